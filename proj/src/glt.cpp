#include "gltforge/glt.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

namespace gltforge {
namespace {

Complex closed_value(const std::vector<WMonomial>& terms, const CVector& w) {
  Complex acc{};
  for (const auto& t : terms) {
    Complex v = t.coeff;
    for (const auto& [k, p] : t.factors) v *= ipow(w(k), p);
    acc += v;
  }
  return acc;
}

void closed_gradient(const std::vector<WMonomial>& terms, const CVector& w, CVector& g) {
  for (const auto& t : terms) {
    for (std::size_t f = 0; f < t.factors.size(); ++f) {
      const auto [k, p] = t.factors[f];
      if (p == 0) continue;
      Complex v = t.coeff * static_cast<double>(p) * ipow(w(k), p - 1);
      for (std::size_t o = 0; o < t.factors.size(); ++o)
        if (o != f) v *= ipow(w(t.factors[o].first), t.factors[o].second);
      g(k) += v;
    }
  }
}

void check_size(const GltSpec& spec, const CVector& w) {
  if (w.size() != spec.size()) throw Error(ErrorKind::SizeMismatch, "coefficient vector size does not match the GLT spec");
}

// Cycle term value and, optionally, its gradient from the derivative formula
// d/dw_a^i oint eta dzeta/zeta^2 = -oint zeta^(a-2) eta^(m-i) / P_eta dzeta.
CVector cycle_term(const GltSpec& spec, const ReducibleCurve& curve, bool with_grad) {
  const int n = spec.size();
  const int dim = with_grad ? n + 1 : 1;
  std::vector<int> offsets;
  for (int l = 0; l < static_cast<int>(curve.components.size()); ++l) offsets.push_back(curve.offset(l));
  const VectorIntegrand f = [&](int comp, Complex zeta, Complex eta, CVector& out) {
    out(0) = eta / (zeta * zeta);
    if (!with_grad) return;
    const CurveEq& p = curve.components[static_cast<std::size_t>(comp)];
    const int m = p.m();
    const Complex pe = p.d_eta(zeta, eta);
    int idx = offsets[static_cast<std::size_t>(comp)];
    for (int i = 1; i <= m; ++i) {
      const Complex base = -ipow(eta, m - i) / pe;
      for (int a = 0; a <= 2 * i; ++a) out(1 + idx++) = base * ipow(zeta, a - 2);
    }
  };
  return spec.cycle->weight * integrate_cycle_vec(curve, spec.cycle->cycle, dim, f, spec.quad);
}

std::pair<Complex, CVector> value_and_grad(const GltSpec& spec, const CVector& w, bool with_grad) {
  check_size(spec, w);
  Complex value = closed_value(spec.closed, w);
  CVector grad = CVector::Zero(with_grad ? spec.size() : 0);
  if (with_grad) closed_gradient(spec.closed, w, grad);
  if (!spec.is_curve_spec()) return {value, grad};

  const ReducibleCurve curve = ReducibleCurve::from_flat(spec.components, w);
  if (spec.cycle) {
    const CVector c = cycle_term(spec, curve, with_grad);
    value += c(0);
    if (with_grad) grad += c.tail(spec.size());
  }
  for (const auto& r : spec.residues) {
    const CurveEq& p = curve.components.at(static_cast<std::size_t>(r.component));
    if (with_grad) {
      value -= r.weight * residue_at_zero_fiber(p, r.h).value;
      const CVector g = residue_newton_gradient(p, r.h);
      grad.segment(curve.offset(r.component), g.size()) -= r.weight * g;
    } else {
      value -= r.weight * residue_at_zero_fiber(p, r.h).value;
    }
  }
  return {value, grad};
}

int unknown_count(int r) { return 2 * r - 1; }

std::vector<int> active_multiplets(const GltSpec& spec, const std::optional<SliceSpec>& slice) {
  std::vector<int> active;
  for (int i = 0; i < spec.multiplets(); ++i) {
    const bool frozen = slice && std::find(slice->frozen.begin(), slice->frozen.end(), i) != slice->frozen.end();
    if (!frozen) active.push_back(i);
  }
  return active;
}

RVector unknowns_from(const GltSpec& spec, const CVector& w, const std::vector<int>& active) {
  int n = 0;
  for (int i : active) n += unknown_count(spec.rs.r_list[static_cast<std::size_t>(i)]);
  RVector x(n);
  int at = 0;
  for (int i : active) {
    const int r = spec.rs.r_list[static_cast<std::size_t>(i)];
    const int off = spec.rs.offset(i);
    for (int a = 1; a < r; ++a) {
      x(at++) = w(off + a).real();
      x(at++) = w(off + a).imag();
    }
    x(at++) = w(off + r).real();
  }
  return x;
}

CVector assemble(const GltSpec& spec, const CVector& base, const ChartPoint& chart, const std::vector<int>& active,
                 const RVector& x) {
  CVector w = base;
  int at = 0;
  for (int i : active) {
    const int r = spec.rs.r_list[static_cast<std::size_t>(i)];
    fill_multiplet(w, spec.rs.offset(i), r, chart.z(i), x, at);
    at += unknown_count(r);
  }
  return w;
}

}  // namespace

Complex eval_F_complex(const GltSpec& spec, const CVector& w) { return value_and_grad(spec, w, false).first; }

FValue eval_F(const GltSpec& spec, const CVector& w) {
  const Complex v = eval_F_complex(spec, w);
  return {v.real(), v.imag(), v};
}

CVector grad_F(const GltSpec& spec, const CVector& w) { return value_and_grad(spec, w, true).second; }

void fill_multiplet(CVector& w, int offset, int r, Complex z, const RVector& x, int at) {
  w(offset) = z;
  for (int a = 1; a < r; ++a) {
    w(offset + a) = Complex{x(at), x(at + 1)};
    at += 2;
  }
  w(offset + r) = x(at);
  for (int a = 0; a < r; ++a) {
    const double sign = ((r + a) % 2 == 0) ? 1.0 : -1.0;
    w(offset + 2 * r - a) = sign * std::conj(w(offset + a));
  }
}

RVector constraint_residual(const GltSpec& spec, const CVector& w, const ChartPoint& chart,
                            const std::vector<int>& active) {
  const CVector g = grad_F(spec, w);
  int n = 0;
  for (int i : active) n += unknown_count(spec.rs.r_list[static_cast<std::size_t>(i)]);
  RVector res(n);
  int at = 0;
  for (int i : active) {
    const int r = spec.rs.r_list[static_cast<std::size_t>(i)];
    const int off = spec.rs.offset(i);
    const Complex u = chart.u(i);
    if (r == 1) {
      res(at++) = g(off + 1).real() - 2.0 * u.real();
      continue;
    }
    const Complex c = g(off + 1) - u;
    res(at++) = c.real();
    res(at++) = c.imag();
    for (int a = 2; a < r; ++a) {
      res(at++) = g(off + a).real();
      res(at++) = g(off + a).imag();
    }
    res(at++) = g(off + r).real();
  }
  return res;
}

SolveResult solve_constraints(const GltSpec& spec, const ChartPoint& chart, const std::optional<CVector>& guess,
                              const std::optional<SliceSpec>& slice, const SolveOptions& opt) {
  const int nm = spec.multiplets();
  if (chart.u.size() != nm || chart.z.size() != nm)
    throw Error(ErrorKind::SizeMismatch, "chart needs one (u, z) pair per multiplet");
  if (spec.domain && !(spec.domain(chart) > 0.0))
    throw Error(ErrorKind::DomainBoundary, "chart point outside the domain of " + spec.name);

  CVector base;
  if (guess) {
    base = *guess;
  } else if (spec.initial_guess) {
    base = spec.initial_guess(chart);
  } else {
    throw Error(ErrorKind::InvalidArgument, spec.name + " needs an initial guess");
  }
  if (base.size() != spec.size()) throw Error(ErrorKind::SizeMismatch, "guess has the wrong length");
  if (slice) {
    if (slice->values.size() != spec.size()) throw Error(ErrorKind::SizeMismatch, "slice values have the wrong length");
    for (int i : slice->frozen) {
      const int off = spec.rs.offset(i);
      const int len = 2 * spec.rs.r_list.at(static_cast<std::size_t>(i)) + 1;
      base.segment(off, len) = slice->values.segment(off, len);
    }
  }

  SolveResult out;
  out.chart = chart;
  out.active = active_multiplets(spec, slice);
  RVector x = unknowns_from(spec, base, out.active);
  const int n = static_cast<int>(x.size());

  double scale = 1.0;
  for (int i : out.active) scale = std::max(scale, std::abs(chart.u(i)));

  auto residual_at = [&](const RVector& xs) {
    return constraint_residual(spec, assemble(spec, base, chart, out.active, xs), chart, out.active);
  };

  RVector res = residual_at(x);
  for (int it = 0; it <= opt.max_iter; ++it) {
    out.residual = res.size() ? res.cwiseAbs().maxCoeff() : 0.0;
    if (out.residual < opt.tol * scale) {
      out.iterations = it;
      out.w = assemble(spec, base, chart, out.active, x);
      if (out.jacobian.size() == 0 && n > 0) {
        // Fill in conditioning data for callers even when no step was taken.
        out.jacobian.resize(n, n);
        for (int k = 0; k < n; ++k) {
          const double h = 1e-6 * (1.0 + std::abs(x(k)));
          RVector xp = x, xm = x;
          xp(k) += h;
          xm(k) -= h;
          out.jacobian.col(k) = (residual_at(xp) - residual_at(xm)) / (2.0 * h);
        }
        Eigen::JacobiSVD<RMatrix> svd(out.jacobian);
        const auto& sv = svd.singularValues();
        out.jacobian_cond = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
      }
      return out;
    }
    if (it == opt.max_iter) break;

    RMatrix jac(n, n);
    for (int k = 0; k < n; ++k) {
      const double h = 1e-6 * (1.0 + std::abs(x(k)));
      RVector xp = x, xm = x;
      xp(k) += h;
      xm(k) -= h;
      jac.col(k) = (residual_at(xp) - residual_at(xm)) / (2.0 * h);
    }
    Eigen::JacobiSVD<RMatrix> svd(jac, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cond = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
    out.jacobian = jac;
    out.jacobian_cond = cond;
    if (!(cond <= opt.cond_limit))
      throw Error(ErrorKind::DegenerateConstraint,
                  "constraint Jacobian condition number " + std::to_string(cond) + " exceeds limit");
    const RVector dx = -svd.solve(res);

    double lambda = 1.0;
    const double norm0 = res.norm();
    while (true) {
      RVector trial = x + lambda * dx;
      try {
        RVector r_trial = residual_at(trial);
        if (r_trial.norm() <= (1.0 - 1e-4 * lambda) * norm0 || lambda < 1.0 / 1024) {
          x = trial;
          res = r_trial;
          break;
        }
      } catch (const Error& e) {
        if (lambda < 1.0 / 1024) throw;
      }
      lambda *= 0.5;
    }
  }
  throw Error(ErrorKind::NewtonDivergence, "Newton did not converge in " + std::to_string(opt.max_iter) +
                                               " iterations (residual " + std::to_string(out.residual) + ")");
}

double kahler_potential(const GltSpec& spec, const SolveResult& solved) {
  double k = eval_F(spec, solved.w).value;
  for (int i : solved.active) {
    const Complex uw = solved.chart.u(i) * solved.w(spec.rs.offset(i) + 1);
    k -= 2.0 * uw.real();
  }
  return k;
}

TwistorData twistor_first_order(const GltSpec& spec, const SolveResult& solved) {
  const int nm = spec.multiplets();
  const CVector g = grad_F(spec, solved.w);
  TwistorData t;
  t.dK_du = CVector::Zero(nm);
  t.dK_dz = CVector::Zero(nm);
  for (int i = 0; i < nm; ++i) {
    const int off = spec.rs.offset(i);
    t.dK_du(i) = -solved.w(off + 1);
    t.dK_dz(i) = g(off);
    t.U.emplace_back(std::vector<Complex>{solved.chart.u(i), t.dK_dz(i)});
    t.Z.emplace_back(std::vector<Complex>{solved.chart.z(i), -t.dK_du(i)});
  }
  return t;
}

const char* to_string(NondegVerdict v) {
  switch (v) {
    case NondegVerdict::NotApplicable: return "not-applicable";
    case NondegVerdict::Invertible: return "invertible";
    case NondegVerdict::Degenerate: return "degenerate";
  }
  return "unknown";
}

NondegReport nondegeneracy(const GltSpec& spec, const SolveResult& solved) {
  NondegReport rep;
  std::vector<int> idx, printed;
  for (int i : solved.active) {
    const int r = spec.rs.r_list[static_cast<std::size_t>(i)];
    if (r < 2) continue;
    const int off = spec.rs.offset(i);
    for (int a = 1; a < 2 * r; ++a) idx.push_back(off + a);
    for (int a = 1; a < r; ++a) printed.push_back(off + a);
  }
  if (idx.empty()) return rep;

  const int n = static_cast<int>(idx.size());
  CMatrix hess(n, n);
  for (int b = 0; b < n; ++b) {
    const int k = idx[static_cast<std::size_t>(b)];
    const double h = 1e-5 * (1.0 + std::abs(solved.w(k)));
    CVector wp = solved.w, wm = solved.w;
    wp(k) += h;
    wm(k) -= h;
    const CVector d = (grad_F(spec, wp) - grad_F(spec, wm)) / (2.0 * h);
    for (int a = 0; a < n; ++a) hess(a, b) = d(idx[static_cast<std::size_t>(a)]);
  }
  Eigen::JacobiSVD<CMatrix> svd(hess);
  rep.block_size = n;
  rep.smax = svd.singularValues()(0);
  rep.smin = svd.singularValues()(n - 1);
  rep.verdict = rep.smin > 1e-8 * std::max(1.0, rep.smax) ? NondegVerdict::Invertible : NondegVerdict::Degenerate;

  rep.printed_size = static_cast<int>(printed.size());
  if (!printed.empty()) {
    CMatrix sub(rep.printed_size, rep.printed_size);
    for (int a = 0; a < rep.printed_size; ++a)
      for (int b = 0; b < rep.printed_size; ++b) {
        const auto ia = std::find(idx.begin(), idx.end(), printed[static_cast<std::size_t>(a)]) - idx.begin();
        const auto ib = std::find(idx.begin(), idx.end(), printed[static_cast<std::size_t>(b)]) - idx.begin();
        sub(a, b) = hess(ia, ib);
      }
    Eigen::JacobiSVD<CMatrix> s2(sub);
    rep.printed_smin = s2.singularValues()(rep.printed_size - 1);
  }
  const bool printed_ok = rep.printed_size > 0 && rep.printed_smin > 1e-8 * std::max(1.0, rep.smax);
  rep.ranges_disagree = printed_ok != (rep.verdict == NondegVerdict::Invertible);
  return rep;
}

}  // namespace gltforge
