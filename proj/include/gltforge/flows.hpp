#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gltforge/poly.hpp"

namespace gltforge {

struct FlowState {
  CMatrix t1, t2, t3;
  double s = 0.0;
};

struct AForm {
  CMatrix a0, a1, a2;
};

enum class FlowKind { Nahm, Eta2 };
const char* to_string(FlowKind k);
FlowKind flow_kind_from(const std::string& name);

/// A0 = T2 + i T3, A1 = i sqrt(3) T1, A2 = T2 - i T3.
AForm to_aform(const FlowState& t);
FlowState from_aform(const AForm& a, double s = 0.0);

/// Right-hand sides exactly as printed for the eta^2/zeta^2 system (A-form and T-form).
AForm rhs_eta2(const AForm& a);
FlowState rhs_eta2_T(const FlowState& t);
/// rhs_eta2 rewritten in T variables by the substitution above. Differs from
/// the printed T-form in two coefficients; this is the one the integrator uses.
FlowState rhs_eta2_T_pulled(const FlowState& t);
/// Nahm's equations T1' = [T2, T3] and cyclic.
FlowState rhs_nahm(const FlowState& t);

/// Lax pairs: A(zeta) = A0 + A1 zeta + A2 zeta^2 with
/// B = (A1^2 + A0 A2 + A2 A0)/2 + (A1 A2 + A2 A1) zeta + A2^2 zeta^2 for eta^2,
/// and A = (T1 + i T2) + 2i T3 zeta + (T1 - i T2) zeta^2, B = -i T3 - (T1 - i T2) zeta for Nahm.
MatPoly lax_A(const FlowState& t, FlowKind k);
MatPoly lax_B(const FlowState& t, FlowKind k);
MatPoly lax_A(const AForm& a);
MatPoly lax_B(const AForm& a);
/// Coefficients of [A(zeta), B(zeta)], lowest power first.
std::vector<CMatrix> lax_commutator(const MatPoly& a, const MatPoly& b);

/// Flattened coefficients of det(eta - A(zeta)) for the flow's Lax matrix.
CVector spectral_invariants(const FlowState& t, FlowKind k);

/// Largest change of a spectral coefficient of degree i in the entries of A,
/// divided by max(1, |c0|, mu^i) with mu the largest spectral norm among the
/// coefficient matrices of A(zeta) at t.
double invariant_drift(const FlowState& t, const CVector& c0, FlowKind k);

/// max_i || T_i + T_i^* ||_F / max(1, || T_i ||_F)
double hermiticity_drift(const FlowState& t);

/// Ginibre entries skew-hermitianised by (M - M^*)/2.
FlowState random_skew_state(int n, std::mt19937_64& rng);
CMatrix ginibre(int n, std::mt19937_64& rng);

using MatState = std::vector<CMatrix>;
using MatRhs = std::function<MatState(const MatState&)>;

struct IntegrateOptions {
  double tol = 1e-10;
  double h0 = 1e-3;
  double blowup_factor = 1e8;
  long max_steps = 1000000;
};

struct TrajectoryPoint {
  double s = 0.0;
  MatState y;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;  // every accepted step, starting with the initial data
  bool blew_up = false;
  std::optional<std::pair<double, double>> blowup_bracket;
  bool underflow = false;
  std::string diagnosis;
  long rejected = 0;

  bool completed() const { return !blew_up && !underflow; }
};

/// Dormand-Prince 5(4) with PI step control; abs tol = rel tol = opt.tol.
/// Integrates backwards when s1 < s0.
Trajectory integrate(const MatRhs& rhs, const MatState& y0, double s0, double s1, const IntegrateOptions& opt = {});

MatRhs t_rhs(FlowKind k);
MatState to_state(const FlowState& t);
FlowState from_state(const MatState& y, double s);
Trajectory integrate_flow(FlowKind k, const FlowState& t0, double s1, const IntegrateOptions& opt = {});

}  // namespace gltforge
