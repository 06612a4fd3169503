#include "gltforge/fixtures.hpp"

#include <cmath>
#include <limits>

namespace gltforge {

CVector random_tau_real(const RealStructure& rs, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  CVector w(rs.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    const double re = normal(rng);
    const double im = normal(rng);
    w(k) = Complex{re, im};
  }
  return 0.5 * (w + tau_apply(w, rs));
}

EnclosingLoop enclosing_loop(const ReducibleCurve& curve, int component) {
  const CurveEq& p = curve.components.at(static_cast<std::size_t>(component));
  const std::vector<Complex> bps = branch_points(p);
  const int n = static_cast<int>(bps.size());
  double best = 0.0;
  Complex best_center{};
  double best_radius = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Complex bi = bps[static_cast<std::size_t>(i)], bj = bps[static_cast<std::size_t>(j)];
      if (std::abs(bj - tau_zeta(bi)) < 1e-6 * (1.0 + std::abs(bj))) continue;
      const Complex center = 0.5 * (bi + bj);
      const double half = 0.5 * std::abs(bi - bj);
      double clear = std::abs(center);
      for (int k = 0; k < n; ++k)
        if (k != i && k != j) clear = std::min(clear, std::abs(bps[static_cast<std::size_t>(k)] - center));
      const double margin = clear - half;
      if (margin > best) {
        best = margin;
        best_center = center;
        best_radius = half + 0.5 * margin;
      }
    }
  }
  if (!(best > 0.0)) throw Error(ErrorKind::InvalidArgument, "no pair of branch points can be enclosed");

  Leg leg;
  leg.component = component;
  leg.path = Path::circle(best_center, best_radius);
  leg.start_eta = fiber_roots(p, leg.path.start()).front();
  EnclosingLoop out;
  out.gamma = Cycle::single(leg);
  out.margin = best;
  return out;
}

ChartPoint chart_from(const GltSpec& spec, const CVector& w) {
  const CVector g = grad_F(spec, w);
  const int nm = spec.multiplets();
  ChartPoint c{CVector(nm), CVector(nm)};
  for (int i = 0; i < nm; ++i) {
    const int off = spec.rs.offset(i);
    c.z(i) = w(off);
    c.u(i) = spec.rs.r_list[static_cast<std::size_t>(i)] == 1 ? Complex{0.5 * g(off + 1).real(), 0.0} : g(off + 1);
  }
  return c;
}

MonopoleFixture monopole_fixture(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const RealStructure rs = RealStructure::for_components({2});
  for (int attempt = 0; attempt < 100; ++attempt) {
    const CVector w0 = random_tau_real(rs, rng);
    const ReducibleCurve curve = ReducibleCurve::from_flat({2}, w0);
    EnclosingLoop loop;
    try {
      loop = enclosing_loop(curve);
    } catch (const Error&) {
      continue;
    }
    if (loop.margin < 0.05) continue;
    const Cycle c = loop.gamma.anti_invariant();
    Complex period;
    try {
      period = integrate_cycle(curve, Differential::omega(0, 0, 2), c);
    } catch (const Error&) {
      continue;
    }
    if (std::abs(period.real()) < 1e-2 || std::abs(period.imag()) > 1e-8 * std::abs(period)) continue;

    const double lambda = 0.5 * period.real();
    MonopoleFixture f;
    f.w = w0;
    f.w.segment(0, 3) *= lambda;
    f.w.segment(3, 5) *= lambda * lambda;
    f.cycle = c.scaled_eta(lambda);
    f.spec = monopole(2, f.cycle);
    f.chart = chart_from(f.spec, f.w);
    f.period = period;
    f.margin = loop.margin;
    return f;
  }
  throw Error(ErrorKind::InvalidArgument, "could not build a monopole fixture for this seed");
}

}  // namespace gltforge
