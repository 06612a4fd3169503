#include "gltforge/flows.hpp"

#include <algorithm>
#include <cmath>

#include "gltforge/algebra.hpp"

namespace gltforge {
namespace {

CMatrix comm(const CMatrix& x, const CMatrix& y) { return x * y - y * x; }

void check_sizes(const CMatrix& a, const CMatrix& b, const CMatrix& c) {
  if (a.rows() != a.cols() || b.rows() != a.rows() || b.cols() != a.cols() || c.rows() != a.rows() ||
      c.cols() != a.cols())
    throw Error(ErrorKind::SizeMismatch, "flow matrices must be square of equal size");
}

double state_norm(const MatState& y) {
  double n = 0.0;
  for (const auto& m : y) n = std::max(n, m.cwiseAbs().maxCoeff());
  return n;
}

MatState axpy(const MatState& y, double h, const std::vector<const MatState*>& ks, const std::vector<double>& cs) {
  MatState out = y;
  for (std::size_t j = 0; j < ks.size(); ++j) {
    if (cs[j] == 0.0) continue;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += (h * cs[j]) * (*ks[j])[i];
  }
  return out;
}

}  // namespace

const char* to_string(FlowKind k) { return k == FlowKind::Nahm ? "nahm" : "eta2"; }

FlowKind flow_kind_from(const std::string& name) {
  if (name == "nahm") return FlowKind::Nahm;
  if (name == "eta2") return FlowKind::Eta2;
  throw Error(ErrorKind::InvalidArgument, "unknown flow kind '" + name + "'");
}

AForm to_aform(const FlowState& t) {
  check_sizes(t.t1, t.t2, t.t3);
  return {t.t2 + kI * t.t3, kI * std::sqrt(3.0) * t.t1, t.t2 - kI * t.t3};
}

FlowState from_aform(const AForm& a, double s) {
  check_sizes(a.a0, a.a1, a.a2);
  FlowState t;
  t.t1 = a.a1 / (kI * std::sqrt(3.0));
  t.t2 = 0.5 * (a.a0 + a.a2);
  t.t3 = (a.a0 - a.a2) / (2.0 * kI);
  t.s = s;
  return t;
}

AForm rhs_eta2(const AForm& a) {
  check_sizes(a.a0, a.a1, a.a2);
  const CMatrix& a0 = a.a0;
  const CMatrix& a1 = a.a1;
  const CMatrix& a2 = a.a2;
  AForm d;
  d.a0 = 0.5 * comm(a0, a1 * a1) + 0.5 * comm(a0 * a0, a2);
  d.a2 = 0.5 * comm(a0, a2 * a2) + 0.5 * comm(a1 * a1, a2);
  d.a1 = a0 * a1 * a2 - a2 * a1 * a0 + 0.5 * a0 * a2 * a1 - 0.5 * a1 * a2 * a0 + 0.5 * a1 * a0 * a2 -
         0.5 * a2 * a0 * a1;
  return d;
}

FlowState rhs_eta2_T(const FlowState& t) {
  check_sizes(t.t1, t.t2, t.t3);
  const CMatrix& t1 = t.t1;
  const CMatrix& t2 = t.t2;
  const CMatrix& t3 = t.t3;
  FlowState d;
  d.t1 = kI * (t3 * t1 * t2 - t2 * t1 * t3 + t3 * t2 * t1 - t1 * t2 * t3 + t1 * t3 * t2 - t2 * t3 * t1);
  d.t2 = 1.5 * kI * comm(t3, t2 * t2 - t1 * t1);
  d.t3 = 1.5 * kI * comm(t3 * t3 - t1 * t1, t2);
  d.s = t.s;
  return d;
}

FlowState rhs_eta2_T_pulled(const FlowState& t) {
  check_sizes(t.t1, t.t2, t.t3);
  const CMatrix& t1 = t.t1;
  const CMatrix& t2 = t.t2;
  const CMatrix& t3 = t.t3;
  const CMatrix s1 = t1 * t1;
  FlowState d;
  d.t1 = kI * (2.0 * t3 * t1 * t2 - 2.0 * t2 * t1 * t3 + t3 * t2 * t1 - t1 * t2 * t3 + t1 * t3 * t2 - t2 * t3 * t1);
  d.t2 = kI * comm(t3, t2 * t2 - 1.5 * s1);
  d.t3 = kI * comm(t3 * t3 - 1.5 * s1, t2);
  d.s = t.s;
  return d;
}

FlowState rhs_nahm(const FlowState& t) {
  check_sizes(t.t1, t.t2, t.t3);
  FlowState d;
  d.t1 = comm(t.t2, t.t3);
  d.t2 = comm(t.t3, t.t1);
  d.t3 = comm(t.t1, t.t2);
  d.s = t.s;
  return d;
}

MatPoly lax_A(const AForm& a) { return MatPoly({a.a0, a.a1, a.a2}); }

MatPoly lax_B(const AForm& a) {
  return MatPoly({0.5 * (a.a1 * a.a1 + a.a0 * a.a2 + a.a2 * a.a0), a.a1 * a.a2 + a.a2 * a.a1, a.a2 * a.a2});
}

MatPoly lax_A(const FlowState& t, FlowKind k) {
  if (k == FlowKind::Eta2) return lax_A(to_aform(t));
  check_sizes(t.t1, t.t2, t.t3);
  return MatPoly({t.t1 + kI * t.t2, 2.0 * kI * t.t3, t.t1 - kI * t.t2});
}

MatPoly lax_B(const FlowState& t, FlowKind k) {
  if (k == FlowKind::Eta2) return lax_B(to_aform(t));
  check_sizes(t.t1, t.t2, t.t3);
  return MatPoly({-kI * t.t3, -(t.t1 - kI * t.t2)});
}

std::vector<CMatrix> lax_commutator(const MatPoly& a, const MatPoly& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::SizeMismatch, "lax_commutator: size mismatch");
  const int n = a.size();
  std::vector<CMatrix> out(static_cast<std::size_t>(a.degree() + b.degree() + 1), CMatrix::Zero(n, n));
  for (int i = 0; i <= a.degree(); ++i)
    for (int j = 0; j <= b.degree(); ++j) out[static_cast<std::size_t>(i + j)] += comm(a.coeff(i), b.coeff(j));
  return out;
}

CVector spectral_invariants(const FlowState& t, FlowKind k) {
  const auto flat = char_curve(lax_A(t, k)).flat();
  return Eigen::Map<const CVector>(flat.data(), static_cast<Eigen::Index>(flat.size()));
}

double invariant_drift(const FlowState& t, const CVector& c0, FlowKind k) {
  const MatPoly a = lax_A(t, k);
  const CurveEq curve = char_curve(a);
  const auto flat = curve.flat();
  if (static_cast<Eigen::Index>(flat.size()) != c0.size())
    throw Error(ErrorKind::SizeMismatch, "invariant_drift: reference has the wrong length");
  double mu = 0.0;
  for (int j = 0; j <= a.degree(); ++j) {
    Eigen::JacobiSVD<CMatrix> svd(a.coeff(j));
    mu = std::max(mu, svd.singularValues()(0));
  }
  double worst = 0.0;
  std::size_t at = 0;
  for (int i = 1; i <= curve.m(); ++i) {
    const double natural = std::pow(mu, i);
    for (int c = 0; c <= curve.alpha(i).deg_bound(); ++c, ++at) {
      const double scale = std::max({1.0, std::abs(c0(static_cast<Eigen::Index>(at))), natural});
      worst = std::max(worst, std::abs(flat[at] - c0(static_cast<Eigen::Index>(at))) / scale);
    }
  }
  return worst;
}

double hermiticity_drift(const FlowState& t) {
  auto rel = [](const CMatrix& m) { return (m + m.adjoint()).norm() / std::max(1.0, m.norm()); };
  return std::max({rel(t.t1), rel(t.t2), rel(t.t3)});
}

CMatrix ginibre(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix m(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(i, j) = Complex{re, im};
    }
  return m;
}

FlowState random_skew_state(int n, std::mt19937_64& rng) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "matrix size must be >= 1");
  auto skew = [&] {
    const CMatrix m = ginibre(n, rng);
    return CMatrix(0.5 * (m - m.adjoint()));
  };
  FlowState t;
  t.t1 = skew();
  t.t2 = skew();
  t.t3 = skew();
  return t;
}

MatState to_state(const FlowState& t) { return {t.t1, t.t2, t.t3}; }

FlowState from_state(const MatState& y, double s) {
  if (y.size() != 3) throw Error(ErrorKind::SizeMismatch, "flow state needs three matrices");
  return {y[0], y[1], y[2], s};
}

MatRhs t_rhs(FlowKind k) {
  return [k](const MatState& y) {
    const FlowState d = k == FlowKind::Nahm ? rhs_nahm(from_state(y, 0.0)) : rhs_eta2_T_pulled(from_state(y, 0.0));
    return to_state(d);
  };
}

Trajectory integrate(const MatRhs& rhs, const MatState& y0, double s0, double s1, const IntegrateOptions& opt) {
  // Dormand-Prince 5(4) tableau; the rhs is autonomous so the nodes c_i are not needed.
  static const std::vector<double> b2{1.0 / 5};
  static const std::vector<double> b3{3.0 / 40, 9.0 / 40};
  static const std::vector<double> b4{44.0 / 45, -56.0 / 15, 32.0 / 9};
  static const std::vector<double> b5{19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729};
  static const std::vector<double> b6{9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656};
  static const std::vector<double> b7{35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84};
  static const std::vector<double> e{71.0 / 57600, 0.0, -71.0 / 16695, 71.0 / 1920, -17253.0 / 339200, 22.0 / 525,
                                     -1.0 / 40};

  Trajectory traj;
  traj.points.push_back({s0, y0});
  if (s1 == s0) return traj;
  const double dir = s1 > s0 ? 1.0 : -1.0;
  const double span = std::abs(s1 - s0);
  const double limit = opt.blowup_factor * std::max(state_norm(y0), 1.0);

  MatState y = y0;
  double s = s0;
  double h = std::min(opt.h0, span);
  double err_prev = 1e-4;
  MatState k1 = rhs(y);
  long steps = 0;

  while (dir * (s1 - s) > 0.0) {
    if (++steps > opt.max_steps) {
      traj.underflow = true;
      traj.diagnosis = "step budget exhausted";
      break;
    }
    h = std::min(h, std::abs(s1 - s));
    const double hs = dir * h;
    const MatState k2 = rhs(axpy(y, hs, {&k1}, b2));
    const MatState k3 = rhs(axpy(y, hs, {&k1, &k2}, b3));
    const MatState k4 = rhs(axpy(y, hs, {&k1, &k2, &k3}, b4));
    const MatState k5 = rhs(axpy(y, hs, {&k1, &k2, &k3, &k4}, b5));
    const MatState k6 = rhs(axpy(y, hs, {&k1, &k2, &k3, &k4, &k5}, b6));
    const MatState y_new = axpy(y, hs, {&k1, &k2, &k3, &k4, &k5, &k6}, b7);
    const MatState k7 = rhs(y_new);

    double err = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      CMatrix d = e[0] * k1[i] + e[2] * k3[i] + e[3] * k4[i] + e[4] * k5[i] + e[5] * k6[i] + e[6] * k7[i];
      d *= hs;
      for (Eigen::Index q = 0; q < d.size(); ++q) {
        const double sc = opt.tol + opt.tol * std::max(std::abs(y[i](q)), std::abs(y_new[i](q)));
        err = std::max(err, std::abs(d(q)) / sc);
      }
    }
    if (!std::isfinite(err)) err = 1e10;

    if (err <= 1.0) {
      s += hs;
      y = y_new;
      k1 = k7;
      traj.points.push_back({s, y});
      if (state_norm(y) > limit) {
        traj.blew_up = true;
        traj.blowup_bracket = std::make_pair(s - hs, s);
        traj.diagnosis = "state norm exceeded blow-up threshold";
        break;
      }
      const double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
      h *= std::clamp(fac, 0.2, 5.0);
      err_prev = std::max(err, 1e-4);
    } else {
      ++traj.rejected;
      h *= std::max(0.2, 0.9 * std::pow(err, -1.0 / 5.0));
    }
    if (h < 1e-14 * std::max(1.0, std::abs(s))) {
      traj.underflow = true;
      traj.blowup_bracket = std::make_pair(s, s + dir * h);
      traj.diagnosis = "step size underflow (likely a pole near s = " + std::to_string(s) + ")";
      break;
    }
  }
  return traj;
}

Trajectory integrate_flow(FlowKind k, const FlowState& t0, double s1, const IntegrateOptions& opt) {
  return integrate(t_rhs(k), to_state(t0), t0.s, s1, opt);
}

}  // namespace gltforge
