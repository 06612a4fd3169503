#pragma once

#include <functional>
#include <vector>

#include "gltforge/path.hpp"
#include "gltforge/poly.hpp"

namespace gltforge {

/// Half-degrees r_i of the multiplets; coefficient i has 2 r_i + 1 entries.
struct RealStructure {
  std::vector<int> r_list;

  int size() const;
  int offset(int multiplet) const;
  /// r_list = [1, ..., m] for every component.
  static RealStructure for_components(const std::vector<int>& ms);
};

bool is_tau_real(const CVector& w, const RealStructure& rs, double tol = 1e-12);
/// tau(w)_a = (-1)^(r+a) conj(w_{2r-a}) per multiplet.
CVector tau_apply(const CVector& w, const RealStructure& rs);

/// Union of components P_1 ... P_k (all with d = 2), stored in one flat
/// coefficient vector ordered by component, then by alpha_i.
struct ReducibleCurve {
  std::vector<CurveEq> components;

  static ReducibleCurve from_flat(const std::vector<int>& ms, const CVector& w);
  CVector flat() const;
  std::vector<int> degrees() const;
  RealStructure real_structure() const;
  /// Offset of component l inside the flat vector.
  int offset(int l) const;
};

/// Roots in eta of P(zeta, .), with multiplicity.
std::vector<Complex> fiber_roots(const CurveEq& p, Complex zeta);

struct Continuation {
  std::vector<Complex> end_roots;  // end_roots[j] continues start[j]
  std::vector<int> perm;           // perm[j]: index of the start root equal to end_roots[j]
  int steps = 0;
};

/// Follows the ordered roots along the path by nearest-neighbour matching,
/// halving the step while the roots move more than a quarter of their
/// minimal separation. Throws PathThroughBranchPoint below t-step 1e-8.
Continuation continue_roots(const CurveEq& p, const Path& path, const std::vector<Complex>& start);

/// Zeta-coordinates of the branch points (roots of the eta-discriminant).
std::vector<Complex> branch_points(const CurveEq& p);

/// x^k by repeated squaring; negative k inverts.
Complex ipow(Complex x, int k);

/// coeff * eta^i / zeta^j; j may be negative.
struct Monomial {
  Complex coeff{1.0};
  int i = 0;
  int j = 0;
};

struct MonomialSum {
  std::vector<Monomial> terms;

  Complex operator()(Complex zeta, Complex eta) const;
  MonomialSum d_eta() const;
  bool empty() const { return terms.empty(); }
};

/// Either num(zeta, eta) dzeta / zeta^2 (meromorphic) or
/// num(zeta, eta) dzeta / (dP/deta) (holomorphic-type).
struct Differential {
  MonomialSum num;
  bool over_p_eta = false;

  /// omega_rs = zeta^r eta^s / P_eta dzeta with the index ranges enforced for m.
  static Differential omega(int r, int s, int m);
  static Differential meromorphic(MonomialSum g);
  /// zeta^r eta^s / P_eta dzeta without range checks (derivative formulas).
  static Differential weighted(int r, int s);

  Complex integrand(const CurveEq& p, Complex zeta, Complex eta) const;
};

struct QuadOptions {
  double rel_tol = 1e-9;
  int min_panels = 4;
  int max_panels = 1 << 14;
  double transfer_tol = 1e-8;
};

/// f(component, zeta, eta, out) fills `out` (length dim) with integrand values
/// (without the dzeta factor).
using VectorIntegrand = std::function<void(int, Complex, Complex, CVector&)>;

/// Vector-valued integral over a cycle with shared sheet tracking.
CVector integrate_cycle_vec(const ReducibleCurve& curve, const Cycle& c, int dim,
                            const VectorIntegrand& f, const QuadOptions& opt = {});

Complex integrate_cycle(const ReducibleCurve& curve, const Differential& diff, const Cycle& c,
                        const QuadOptions& opt = {});

/// Replaces anchored endpoints by the resultant root nearest to the guess.
Path resolve_anchors(const Path& path, const ReducibleCurve& curve);

struct ResidueResult {
  Complex value{};        // (1/2 pi i) sum over the zero fibre of H dzeta / zeta^2
  Complex quadrature{};   // method (a)
  Complex newton{};       // method (b), NaN when not applied
  bool quadrature_only = false;
  double disagreement = 0.0;
};

ResidueResult residue_at_zero_fiber(const CurveEq& p, const MonomialSum& h);

/// Same quantity via power sums only, with its holomorphic gradient with
/// respect to the flat coefficients of p.
Complex residue_newton(const CurveEq& p, const MonomialSum& h);
CVector residue_newton_gradient(const CurveEq& p, const MonomialSum& h);

/// Coefficient test of conj G(zeta, eta) = -conj(zeta)^2 G(-1/conj zeta, -conj eta/conj zeta^2).
bool check_G_reality(const MonomialSum& h, double tol = 1e-12);

}  // namespace gltforge
