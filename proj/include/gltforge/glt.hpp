#pragma once

#include <optional>
#include <vector>

#include "gltforge/specs.hpp"

namespace gltforge {

struct FValue {
  double value = 0.0;  // real part
  double imag = 0.0;   // should vanish on tau-real points; reported, not discarded silently
  Complex full{};
};

/// F at an arbitrary (not necessarily tau-real) coefficient vector.
Complex eval_F_complex(const GltSpec& spec, const CVector& w);
FValue eval_F(const GltSpec& spec, const CVector& w);

/// Holomorphic gradient dF/dw over the flat coefficient vector.
CVector grad_F(const GltSpec& spec, const CVector& w);

/// Multiplets held fixed at `values` (a full-length coefficient vector of
/// which only the frozen multiplets are read).
struct SliceSpec {
  std::vector<int> frozen;
  CVector values;
};

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 50;
  double cond_limit = 1e12;
};

struct SolveResult {
  CVector w;
  ChartPoint chart;
  std::vector<int> active;  // multiplets carrying unknowns
  int iterations = 0;
  double residual = 0.0;
  double jacobian_cond = 0.0;
  RMatrix jacobian;
};

/// Writes the coefficients of one multiplet from z, the free unknowns and (sigma).
void fill_multiplet(CVector& w, int offset, int r, Complex z, const RVector& unknowns, int at);

/// Real residual vector of the chart and middle constraints at w.
RVector constraint_residual(const GltSpec& spec, const CVector& w, const ChartPoint& chart,
                            const std::vector<int>& active);

SolveResult solve_constraints(const GltSpec& spec, const ChartPoint& chart,
                              const std::optional<CVector>& guess = std::nullopt,
                              const std::optional<SliceSpec>& slice = std::nullopt, const SolveOptions& opt = {});

/// K = F - sum over active multiplets of (u_i w_1^i + conj(u_i w_1^i)).
double kahler_potential(const GltSpec& spec, const SolveResult& solved);

struct TwistorData {
  CVector dK_du;  // -w_1^i
  CVector dK_dz;  // dF/dw_0^i
  std::vector<PolyZ> U;  // u_i + K_{z_i} zeta
  std::vector<PolyZ> Z;  // z_i - K_{u_i} zeta
};
TwistorData twistor_first_order(const GltSpec& spec, const SolveResult& solved);

enum class NondegVerdict { NotApplicable, Invertible, Degenerate };
const char* to_string(NondegVerdict v);

struct NondegReport {
  NondegVerdict verdict = NondegVerdict::NotApplicable;
  double smin = 0.0;  // middle block 0 < a < 2 r_i
  double smax = 0.0;
  int block_size = 0;
  double printed_smin = 0.0;  // block 0 < a < r_i, as printed next to the remark
  int printed_size = 0;
  bool ranges_disagree = false;
};
NondegReport nondegeneracy(const GltSpec& spec, const SolveResult& solved);

}  // namespace gltforge
