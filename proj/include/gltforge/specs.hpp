#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gltforge/curves.hpp"

namespace gltforge {

/// Chart coordinates: one (u_i, z_i) pair per multiplet.
struct ChartPoint {
  CVector u;
  CVector z;
};

/// coeff * prod w_k^p over (flat index k, power p) pairs; F is treated as a
/// holomorphic polynomial in the coefficients.
struct WMonomial {
  Complex coeff{1.0};
  std::vector<std::pair<int, int>> factors;
};

/// Contributes -weight * (1/2 pi i) * oint over the zero fibre of component l of H dzeta / zeta^2.
struct ResidueTerm {
  int component = 0;
  MonomialSum h;
  double weight = 1.0;
};

/// Contributes weight * oint_c eta dzeta / zeta^2.
struct CycleTerm {
  Cycle cycle;
  double weight = 1.0;
};

struct GltSpec {
  std::string name;
  RealStructure rs;
  std::vector<int> components;  // degrees m_l; empty for closed-form specs
  std::vector<WMonomial> closed;
  std::vector<ResidueTerm> residues;
  std::optional<CycleTerm> cycle;
  /// Positive inside the solvable domain (optional).
  std::function<double(const ChartPoint&)> domain;
  /// Starting point for Newton when the caller gives none (optional).
  std::function<CVector(const ChartPoint&)> initial_guess;
  QuadOptions quad;

  bool is_curve_spec() const { return !components.empty(); }
  int multiplets() const { return static_cast<int>(rs.r_list.size()); }
  int size() const { return rs.size(); }
};

/// 2x^2 - z zbar on alpha(zeta) = z + x zeta - zbar zeta^2.
GltSpec flat_quartic();
/// 2x^3 - 3x z zbar on the same multiplet; domain u + ubar + 3 z zbar > 0.
GltSpec cubic_harmonic();
/// oint_c eta/zeta^2 - (1/2 pi i) oint_0 eta^2/zeta^3 on curves of degree n.
GltSpec monopole(int n, Cycle c);
/// The same function summed over the components of a reducible curve.
GltSpec asymptotic_monopole(const std::vector<int>& ns, Cycle c);
/// Half of the cycle term minus the weighted zero-fibre terms, weights mu_{l+1} - mu_l.
GltSpec su_n(const std::vector<double>& mu, const std::vector<int>& ms, Cycle c);
/// oint_c eta/zeta^2 on curves of degrees 1, ..., k.
GltSpec orbit(int k, Cycle c);

/// Multiplet indices of the last component of a curve spec (the frozen
/// curve of the orbit construction).
std::vector<int> last_component_multiplets(const GltSpec& spec);

}  // namespace gltforge
