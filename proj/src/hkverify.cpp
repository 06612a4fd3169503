#include "gltforge/hkverify.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace gltforge {
namespace {

struct RealHessian {
  RMatrix h;
  double schwarz = 0.0;
  double f0 = 0.0;
};

RealHessian nested_hessian(const std::function<double(const RVector&)>& f, const RVector& x0, double h,
                           double ratio) {
  const int n = static_cast<int>(x0.size());
  RealHessian out;
  out.h = RMatrix::Zero(n, n);
  out.f0 = f(x0);

  auto shifted = [&](int i, double hi, int j, double hj) {
    RVector x = x0;
    x(i) += hi;
    x(j) += hj;
    return f(x);
  };
  auto diag = [&](int i, double s) {
    RVector xp = x0, xm = x0;
    xp(i) += s;
    xm(i) -= s;
    return (f(xp) - 2.0 * out.f0 + f(xm)) / (s * s);
  };
  // outer difference in i with step s, inner in j with step ratio * s
  auto mixed = [&](int i, int j, double s) {
    const double t = ratio * s;
    return (shifted(i, s, j, t) - shifted(i, s, j, -t) - shifted(i, -s, j, t) + shifted(i, -s, j, -t)) /
           (4.0 * s * t);
  };
  auto richardson = [](double coarse, double fine) { return (4.0 * fine - coarse) / 3.0; };

  for (int i = 0; i < n; ++i) {
    out.h(i, i) = richardson(diag(i, h), diag(i, 0.5 * h));
    for (int j = i + 1; j < n; ++j) {
      const double ij = richardson(mixed(i, j, h), mixed(i, j, 0.5 * h));
      const double ji = richardson(mixed(j, i, h), mixed(j, i, 0.5 * h));
      out.schwarz = std::max(out.schwarz, std::abs(ij - ji));
      out.h(i, j) = out.h(j, i) = 0.5 * (ij + ji);
    }
  }
  return out;
}

ChartPoint apply_offsets(const ChartPoint& base, const std::vector<int>& active, const RVector& x) {
  ChartPoint c = base;
  const int n = static_cast<int>(active.size());
  for (int k = 0; k < n; ++k) {
    const int i = active[static_cast<std::size_t>(k)];
    c.u(i) += Complex{x(k), x(n + k)};
    c.z(i) += Complex{x(2 * n + k), x(3 * n + k)};
  }
  return c;
}

SecondDerivs assemble(const RealHessian& rh, int n) {
  SecondDerivs sd;
  sd.real_hessian = rh.h;
  sd.schwarz = rh.schwarz;
  sd.k_value = rh.f0;
  // Wirtinger combination for K_{v_i wbar_j}, v, w in {u, z}.
  auto block = [&](int v, int w) {
    CMatrix m(n, n);
    const int av = 2 * v * n, bv = (2 * v + 1) * n, aw = 2 * w * n, bw = (2 * w + 1) * n;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        m(i, j) = 0.25 * Complex{rh.h(av + i, aw + j) + rh.h(bv + i, bw + j),
                                 rh.h(av + i, bw + j) - rh.h(bv + i, aw + j)};
    return m;
  };
  sd.uu = block(0, 0);
  sd.uz = block(0, 1);
  sd.zu = block(1, 0);
  sd.zz = block(1, 1);
  return sd;
}

}  // namespace

CMatrix SecondDerivs::block() const {
  const int k = n();
  CMatrix m(2 * k, 2 * k);
  m << uu, uz, zu, zz;
  return m;
}

SecondDerivs second_derivs(const GltSpec& spec, const ChartPoint& at, const SecondDerivOptions& opt) {
  const SolveResult base = solve_constraints(spec, at, opt.guess, opt.slice, opt.solve);
  const std::vector<int> active = base.active;
  const int n = static_cast<int>(active.size());

  const auto k_of = [&](const RVector& x) {
    const ChartPoint c = apply_offsets(at, active, x);
    try {
      return kahler_potential(spec, solve_constraints(spec, c, base.w, opt.slice, opt.solve));
    } catch (const Error& e) {
      throw Error(ErrorKind::StencilFailure, std::string("inside the difference stencil: ") + e.what());
    }
  };
  SecondDerivs sd = assemble(nested_hessian(k_of, RVector::Zero(4 * n), opt.h, opt.inner_ratio), n);
  sd.at = at;
  return sd;
}

SecondDerivs second_derivs_of(const std::function<double(const ChartPoint&)>& k, const ChartPoint& at, double h,
                              double inner_ratio) {
  const int n = static_cast<int>(at.u.size());
  std::vector<int> active(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) active[static_cast<std::size_t>(i)] = i;
  const auto f = [&](const RVector& x) { return k(apply_offsets(at, active, x)); };
  SecondDerivs sd = assemble(nested_hessian(f, RVector::Zero(4 * n), h, inner_ratio), n);
  sd.at = at;
  return sd;
}

SpResult sp_check(const SecondDerivs& sd) {
  const int n = sd.n();
  const CMatrix m = sd.block();
  CMatrix j = CMatrix::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = CMatrix::Identity(n, n);
  j.bottomLeftCorner(n, n) = -CMatrix::Identity(n, n);
  const CMatrix x = m.transpose() * j * m;
  const Complex lambda = (j.conjugate().cwiseProduct(x)).sum() / j.squaredNorm();
  SpResult out;
  out.lambda = lambda.real();
  out.lambda_imag = lambda.imag();
  out.residual = (x - lambda * j).norm();
  return out;
}

JResult j_structure(const SecondDerivs& sd, double lambda) {
  if (lambda == 0.0) throw Error(ErrorKind::InvalidArgument, "j_structure: lambda must be nonzero");
  const int n = sd.n();
  // Column a: image of d/du_i (a = i) or d/dz_i (a = n + i); rows: d/dubar_j, d/dzbar_j.
  CMatrix b(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      b(j, i) = sd.zu(i, j);
      b(n + j, i) = sd.zz(i, j);
      b(j, n + i) = -sd.uu(i, j);
      b(n + j, n + i) = -sd.uz(i, j);
    }
  }
  b /= std::sqrt(std::abs(lambda));
  if (!b.allFinite()) throw Error(ErrorKind::SingularBlock, "j_structure: non-finite block");
  const CMatrix id = CMatrix::Identity(2 * n, 2 * n);
  const double r1 = (b.conjugate() * b + id).norm();
  const double r2 = (b * b.conjugate() + id).norm();
  return {b, std::sqrt(r1 * r1 + r2 * r2)};
}

MetricReport extract_metric(const SecondDerivs& sd) {
  MetricReport r;
  r.g = -0.5 * sd.block();
  r.k_positive = sd.k_value > 0.0;
  const CMatrix herm = 0.5 * (r.g + r.g.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm);
  const auto& ev = es.eigenvalues();
  const double tol = 1e-9 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (ev(k) > tol) {
      ++r.positive;
    } else if (ev(k) < -tol) {
      ++r.negative;
    } else {
      ++r.null;
    }
  }
  return r;
}

CMatrix cubic_reference_metric(const ChartPoint& at, double dzdz_coefficient) {
  const Complex u = at.u(0), z = at.z(0);
  const double x = std::sqrt((2.0 * u.real() + 3.0 * std::norm(z)) / 6.0);
  CMatrix g(2, 2);
  g << 1.0, 3.0 * z, 3.0 * std::conj(z), dzdz_coefficient * x * x + 9.0 * std::norm(z);
  return g / x;
}

MetricFit fit_metric(const std::vector<CMatrix>& g, const std::vector<CMatrix>& reference) {
  if (g.size() != reference.size() || g.empty()) throw Error(ErrorKind::SizeMismatch, "fit_metric: bad input");
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    num += (reference[k].conjugate().cwiseProduct(g[k])).sum().real();
    den += reference[k].squaredNorm();
  }
  MetricFit fit;
  fit.mu = num / den;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const CMatrix model = fit.mu * reference[k];
    fit.worst = std::max(fit.worst, (g[k] - model).norm() / model.norm());
  }
  return fit;
}

CubicComparison metric_compare_cubic(const std::vector<ChartPoint>& points, const SecondDerivOptions& opt) {
  const GltSpec spec = cubic_harmonic();
  std::vector<CMatrix> g, printed, corrected;
  std::vector<double> z0;
  for (const auto& p : points) {
    const SecondDerivs sd = second_derivs(spec, p, opt);
    g.push_back(extract_metric(sd).g);
    printed.push_back(cubic_reference_metric(p, 6.0));
    corrected.push_back(cubic_reference_metric(p, 36.0));
    if (std::abs(p.z(0)) == 0.0) z0.push_back(g.back()(0, 0).real() * std::sqrt(2.0 * p.u(0).real()));
  }
  CubicComparison c;
  c.printed = fit_metric(g, printed);
  c.corrected = fit_metric(g, corrected);
  c.z0_points = static_cast<int>(z0.size());
  if (!z0.empty()) {
    const auto [lo, hi] = std::minmax_element(z0.begin(), z0.end());
    double mean = 0.0;
    for (double v : z0) mean += v;
    mean /= static_cast<double>(z0.size());
    c.z0_spread = (*hi - *lo) / std::abs(mean);
  }
  return c;
}

}  // namespace gltforge
