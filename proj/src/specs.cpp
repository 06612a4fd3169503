#include "gltforge/specs.hpp"

#include <cmath>

namespace gltforge {
namespace {

MonomialSum eta_squared_over_zeta() { return MonomialSum{{{1.0, 2, 1}}}; }

GltSpec curve_spec(std::string name, std::vector<int> ms) {
  for (int m : ms)
    if (m < 1) throw Error(ErrorKind::InvalidArgument, "component degree must be >= 1");
  GltSpec s;
  s.name = std::move(name);
  s.rs = RealStructure::for_components(ms);
  s.components = std::move(ms);
  return s;
}

CVector single_multiplet_guess(const ChartPoint& c, double x) {
  CVector w(3);
  w << c.z(0), x, -std::conj(c.z(0));
  return w;
}

}  // namespace

GltSpec flat_quartic() {
  GltSpec s;
  s.name = "flat-quartic";
  s.rs.r_list = {1};
  s.closed = {{2.0, {{1, 2}}}, {1.0, {{0, 1}, {2, 1}}}};
  s.initial_guess = [](const ChartPoint& c) { return single_multiplet_guess(c, 0.0); };
  return s;
}

GltSpec cubic_harmonic() {
  GltSpec s;
  s.name = "cubic-harmonic";
  s.rs.r_list = {1};
  s.closed = {{2.0, {{1, 3}}}, {3.0, {{1, 1}, {0, 1}, {2, 1}}}};
  s.domain = [](const ChartPoint& c) { return 2.0 * c.u(0).real() + 3.0 * std::norm(c.z(0)); };
  s.initial_guess = [](const ChartPoint& c) {
    const double d = 2.0 * c.u(0).real() + 3.0 * std::norm(c.z(0));
    return single_multiplet_guess(c, std::sqrt(std::max(d, 1e-6) / 6.0));
  };
  return s;
}

GltSpec monopole(int n, Cycle c) { return asymptotic_monopole({n}, std::move(c)); }

GltSpec asymptotic_monopole(const std::vector<int>& ns, Cycle c) {
  GltSpec s = curve_spec(ns.size() == 1 ? "monopole" : "asymptotic-monopole", ns);
  for (int l = 0; l < static_cast<int>(ns.size()); ++l) s.residues.push_back({l, eta_squared_over_zeta(), 1.0});
  s.cycle = CycleTerm{std::move(c), 1.0};
  return s;
}

GltSpec su_n(const std::vector<double>& mu, const std::vector<int>& ms, Cycle c) {
  if (mu.size() != ms.size() + 1) throw Error(ErrorKind::InvalidArgument, "su-n needs N masses for N-1 components");
  GltSpec s = curve_spec("su-n", ms);
  for (int l = 0; l < static_cast<int>(ms.size()); ++l) {
    const double gap = mu[static_cast<std::size_t>(l) + 1] - mu[static_cast<std::size_t>(l)];
    s.residues.push_back({l, eta_squared_over_zeta(), 0.5 * gap});
  }
  s.cycle = CycleTerm{std::move(c), 0.5};
  return s;
}

GltSpec orbit(int k, Cycle c) {
  std::vector<int> ms;
  for (int m = 1; m <= k; ++m) ms.push_back(m);
  GltSpec s = curve_spec("orbit", ms);
  s.cycle = CycleTerm{std::move(c), 1.0};
  return s;
}

std::vector<int> last_component_multiplets(const GltSpec& spec) {
  if (!spec.is_curve_spec()) return {};
  const int total = spec.multiplets();
  const int m = spec.components.back();
  std::vector<int> out;
  for (int i = total - m; i < total; ++i) out.push_back(i);
  return out;
}

}  // namespace gltforge
