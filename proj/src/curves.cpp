#include "gltforge/curves.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>

#include "gltforge/algebra.hpp"

namespace gltforge {
namespace {

constexpr int kGaussOrder = 16;

struct GaussRule {
  std::array<double, kGaussOrder> x{};
  std::array<double, kGaussOrder> w{};
};

const GaussRule& gauss_rule() {
  static const GaussRule rule = [] {
    GaussRule g;
    const int n = kGaussOrder;
    for (int i = 0; i < n; ++i) {
      double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = pk;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      g.x[static_cast<std::size_t>(i)] = x;
      g.w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return g;
  }();
  return rule;
}

double min_separation(const std::vector<Complex>& r) {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = i + 1; j < r.size(); ++j) gap = std::min(gap, std::abs(r[i] - r[j]));
  return gap;
}

// Greedy nearest-neighbour assignment: out[k] is the new root continuing old[k].
std::vector<Complex> match_roots(const std::vector<Complex>& old_roots, const std::vector<Complex>& fresh,
                                 double& movement) {
  const std::size_t m = old_roots.size();
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  pairs.reserve(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) pairs.emplace_back(std::abs(old_roots[i] - fresh[j]), i, j);
  std::sort(pairs.begin(), pairs.end());
  std::vector<Complex> out(m);
  std::vector<bool> used_old(m, false), used_new(m, false);
  movement = 0.0;
  std::size_t assigned = 0;
  for (const auto& [d, i, j] : pairs) {
    if (used_old[i] || used_new[j]) continue;
    used_old[i] = used_new[j] = true;
    out[i] = fresh[j];
    movement = std::max(movement, d);
    if (++assigned == m) break;
  }
  return out;
}

class Tracker {
 public:
  Tracker(const CurveEq& p, const Path& path, std::vector<Complex> roots)
      : p_(p), path_(path), roots_(std::move(roots)) {}

  void advance(double target) {
    // A closed path returns to its start fibre, so an unbounded step could
    // jump over the whole loop without seeing the roots move.
    constexpr double kMaxStep = 1.0 / 32.0;
    double h = std::min(std::max(target - t_, 0.0), kMaxStep);
    while (t_ < target) {
      h = std::min(h, target - t_);
      const double t_new = (target - t_ <= h) ? target : t_ + h;
      const auto fresh = fiber_roots(p_, path_.point(t_new));
      double movement = 0.0;
      auto matched = match_roots(roots_, fresh, movement);
      const double size = 1.0 + std::abs(roots_.front());
      if (roots_.size() < 2 || 4.0 * movement < min_separation(fresh) || movement < 1e-13 * size) {
        roots_ = std::move(matched);
        t_ = t_new;
        ++steps_;
        h = std::min(2.0 * h, kMaxStep);
      } else {
        h *= 0.5;
        if (h < 1e-8)
          throw Error(ErrorKind::PathThroughBranchPoint,
                      "root continuation stalled near zeta = " + std::to_string(path_.point(t_).real()) +
                          std::string(" + ") + std::to_string(path_.point(t_).imag()) + "i");
      }
    }
  }

  const std::vector<Complex>& roots() const { return roots_; }
  int steps() const { return steps_; }

 private:
  const CurveEq& p_;
  const Path& path_;
  std::vector<Complex> roots_;
  double t_ = 0.0;
  int steps_ = 0;
};

std::vector<Complex> sorted_roots(std::vector<Complex> r) {
  std::sort(r.begin(), r.end(), [](Complex a, Complex b) {
    if (std::abs(a.real() - b.real()) > 1e-12 * (1.0 + std::abs(a) + std::abs(b))) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return r;
}

std::size_t nearest_index(const std::vector<Complex>& r, Complex target) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < r.size(); ++k)
    if (std::abs(r[k] - target) < std::abs(r[best] - target)) best = k;
  return best;
}

struct LegIntegral {
  CVector value;
  CVector l1;
  Complex end_eta{};
};

LegIntegral integrate_leg_at(const CurveEq& p, int component, const Path& path, const std::vector<Complex>& start,
                             int panels, int dim, const VectorIntegrand& f) {
  const GaussRule& g = gauss_rule();
  Tracker tracker(p, path, start);
  LegIntegral out{CVector::Zero(dim), CVector::Zero(dim), {}};
  CVector buf(dim);
  for (int q = 0; q < panels; ++q) {
    for (int k = kGaussOrder - 1; k >= 0; --k) {  // nodes ascend in t
      const double x = g.x[static_cast<std::size_t>(k)];
      const double t = (q + 0.5 * (x + 1.0)) / panels;
      tracker.advance(t);
      const Complex zeta = path.point(t);
      const Complex dz = path.derivative(t);
      buf.setZero();
      f(component, zeta, tracker.roots().front(), buf);
      const double wt = g.w[static_cast<std::size_t>(k)] / (2.0 * panels);
      out.value += (wt * dz) * buf;
      out.l1 += (wt * std::abs(dz)) * buf.cwiseAbs().cast<Complex>();
    }
  }
  tracker.advance(1.0);
  out.end_eta = tracker.roots().front();
  return out;
}

LegIntegral integrate_leg(const CurveEq& p, int component, const Path& path, const std::vector<Complex>& start,
                          int dim, const VectorIntegrand& f, const QuadOptions& opt) {
  int panels = std::max(1, opt.min_panels);
  LegIntegral prev = integrate_leg_at(p, component, path, start, panels, dim, f);
  while (true) {
    panels *= 2;
    if (panels > opt.max_panels)
      throw Error(ErrorKind::QuadratureNotConverged, "panel cap reached along a cycle leg");
    LegIntegral cur = integrate_leg_at(p, component, path, start, panels, dim, f);
    bool done = true;
    for (int k = 0; k < dim; ++k) {
      const double scale = std::max(std::abs(cur.value(k)), cur.l1(k).real());
      if (std::abs(cur.value(k) - prev.value(k)) > opt.rel_tol * scale) done = false;
    }
    if (done) return cur;
    prev = std::move(cur);
  }
}

// Power sums p_k = sum_j eta_j^k as polynomials in zeta, k = 0..kmax.
std::vector<PolyZ> power_sums(const CurveEq& p, int kmax) {
  const int m = p.m();
  std::vector<PolyZ> ps;
  ps.push_back(PolyZ::constant(static_cast<double>(m)));
  for (int k = 1; k <= kmax; ++k) {
    PolyZ acc(0);
    for (int l = 1; l <= std::min(k - 1, m); ++l) acc -= p.alpha(l) * ps[static_cast<std::size_t>(k - l)];
    if (k <= m) acc -= static_cast<double>(k) * p.alpha(k);
    ps.push_back(acc);
  }
  return ps;
}

int max_eta_power(const MonomialSum& h) {
  int k = 0;
  for (const auto& t : h.terms) k = std::max(k, t.i);
  return k;
}

Complex power_sum_residue(const std::vector<PolyZ>& ps, const MonomialSum& h) {
  Complex acc{};
  for (const auto& t : h.terms) acc += t.coeff * ps[static_cast<std::size_t>(t.i)].coeff(t.j + 1);
  return acc;
}

}  // namespace

int RealStructure::size() const {
  int n = 0;
  for (int r : r_list) n += 2 * r + 1;
  return n;
}

int RealStructure::offset(int multiplet) const {
  int n = 0;
  for (int i = 0; i < multiplet; ++i) n += 2 * r_list.at(static_cast<std::size_t>(i)) + 1;
  return n;
}

RealStructure RealStructure::for_components(const std::vector<int>& ms) {
  RealStructure rs;
  for (int m : ms)
    for (int i = 1; i <= m; ++i) rs.r_list.push_back(i);
  return rs;
}

CVector tau_apply(const CVector& w, const RealStructure& rs) {
  if (w.size() != rs.size()) throw Error(ErrorKind::SizeMismatch, "tau_apply: coefficient vector length mismatch");
  CVector out(w.size());
  int off = 0;
  for (int r : rs.r_list) {
    for (int a = 0; a <= 2 * r; ++a) {
      const double sign = ((r + a) % 2 == 0) ? 1.0 : -1.0;
      out(off + a) = sign * std::conj(w(off + 2 * r - a));
    }
    off += 2 * r + 1;
  }
  return out;
}

bool is_tau_real(const CVector& w, const RealStructure& rs, double tol) {
  const CVector t = tau_apply(w, rs);
  for (Eigen::Index k = 0; k < w.size(); ++k)
    if (std::abs(t(k) - w(k)) > tol) return false;
  return true;
}

ReducibleCurve ReducibleCurve::from_flat(const std::vector<int>& ms, const CVector& w) {
  ReducibleCurve c;
  int off = 0;
  for (int m : ms) {
    const int len = CurveEq::flat_size(m, 2);
    if (off + len > w.size()) throw Error(ErrorKind::SizeMismatch, "ReducibleCurve::from_flat: vector too short");
    std::vector<Complex> part(w.data() + off, w.data() + off + len);
    c.components.push_back(CurveEq::from_flat(m, 2, part));
    off += len;
  }
  if (off != w.size()) throw Error(ErrorKind::SizeMismatch, "ReducibleCurve::from_flat: vector too long");
  return c;
}

CVector ReducibleCurve::flat() const {
  std::vector<Complex> all;
  for (const auto& c : components) {
    const auto f = c.flat();
    all.insert(all.end(), f.begin(), f.end());
  }
  return Eigen::Map<const CVector>(all.data(), static_cast<Eigen::Index>(all.size()));
}

std::vector<int> ReducibleCurve::degrees() const {
  std::vector<int> ms;
  for (const auto& c : components) ms.push_back(c.m());
  return ms;
}

RealStructure ReducibleCurve::real_structure() const { return RealStructure::for_components(degrees()); }

int ReducibleCurve::offset(int l) const {
  int off = 0;
  for (int k = 0; k < l; ++k) off += CurveEq::flat_size(components.at(static_cast<std::size_t>(k)).m(), 2);
  return off;
}

std::vector<Complex> fiber_roots(const CurveEq& p, Complex zeta) {
  const int m = p.m();
  if (m == 1) return {-p.alpha(1)(zeta)};
  if (m == 2) {
    const Complex b = p.alpha(1)(zeta);
    const Complex c = p.alpha(2)(zeta);
    const Complex s = std::sqrt(b * b - 4.0 * c);
    const Complex q = (std::abs(b + s) >= std::abs(b - s)) ? -0.5 * (b + s) : -0.5 * (b - s);
    if (q == Complex{}) return {Complex{}, Complex{}};
    return {q, c / q};
  }
  const auto c = p.eta_coeffs(zeta);
  std::vector<Complex> rev(c.rbegin(), c.rend());
  auto roots = poly_roots(PolyZ(rev), 0.0);
  return roots;
}

Continuation continue_roots(const CurveEq& p, const Path& path, const std::vector<Complex>& start) {
  if (static_cast<int>(start.size()) != p.m())
    throw Error(ErrorKind::SizeMismatch, "continue_roots: start fibre has the wrong size");
  Tracker tracker(p, path, start);
  tracker.advance(1.0);
  Continuation out;
  out.end_roots = tracker.roots();
  out.steps = tracker.steps();
  for (const Complex& r : out.end_roots) out.perm.push_back(static_cast<int>(nearest_index(start, r)));
  return out;
}

std::vector<Complex> branch_points(const CurveEq& p) {
  if (p.m() < 2) return {};
  const PolyZ disc = discriminant_eta(p);
  if (disc.is_zero()) return {};
  return poly_roots(disc, 1e-12);
}

Complex ipow(Complex x, int k) {
  if (k < 0) return 1.0 / ipow(x, -k);
  Complex acc{1.0};
  while (k > 0) {
    if (k & 1) acc *= x;
    x *= x;
    k >>= 1;
  }
  return acc;
}

Complex MonomialSum::operator()(Complex zeta, Complex eta) const {
  Complex acc{};
  for (const auto& t : terms) acc += t.coeff * ipow(eta, t.i) * ipow(zeta, -t.j);
  return acc;
}

MonomialSum MonomialSum::d_eta() const {
  MonomialSum out;
  for (const auto& t : terms)
    if (t.i > 0) out.terms.push_back({t.coeff * static_cast<double>(t.i), t.i - 1, t.j});
  return out;
}

Differential Differential::omega(int r, int s, int m) {
  if (s < 0 || s > m - 2 || r < 0 || r > 2 * (m - 2) - 2 * s)
    throw Error(ErrorKind::InvalidArgument, "omega_rs index out of range for this component");
  return weighted(r, s);
}

Differential Differential::meromorphic(MonomialSum g) { return Differential{std::move(g), false}; }

Differential Differential::weighted(int r, int s) {
  Differential d;
  d.num.terms.push_back({1.0, s, -r});
  d.over_p_eta = true;
  return d;
}

Complex Differential::integrand(const CurveEq& p, Complex zeta, Complex eta) const {
  if (over_p_eta) return num(zeta, eta) / p.d_eta(zeta, eta);
  return num(zeta, eta) / (zeta * zeta);
}

Path resolve_anchors(const Path& path, const ReducibleCurve& curve) {
  if (!path.anchor_a && !path.anchor_b) return path;
  if (path.kind != PathKind::Segment) throw Error(ErrorKind::InvalidArgument, "only segments can be anchored");
  Path out = path;
  auto resolve = [&](const Anchor& an) {
    const int k = static_cast<int>(curve.components.size());
    if (an.p < 0 || an.q < 0 || an.p >= k || an.q >= k || an.p == an.q)
      throw Error(ErrorKind::InvalidArgument, "anchor refers to invalid components");
    const PolyZ res = resultant_eta(curve.components[static_cast<std::size_t>(an.p)],
                                    curve.components[static_cast<std::size_t>(an.q)]);
    if (res.is_zero()) throw Error(ErrorKind::InvalidArgument, "anchor on components with a common factor");
    auto roots = poly_roots(res, 1e-12);
    if (roots.empty()) throw Error(ErrorKind::InvalidArgument, "components do not meet in the finite plane");
    if (path.tau)
      for (auto& r : roots) r = tau_zeta(r);
    return roots[nearest_index(roots, an.guess)];
  };
  if (path.anchor_a) out.a = resolve(*path.anchor_a);
  if (path.anchor_b) out.b = resolve(*path.anchor_b);
  out.anchor_a.reset();
  out.anchor_b.reset();
  return out;
}

CVector integrate_cycle_vec(const ReducibleCurve& curve, const Cycle& c, int dim, const VectorIntegrand& f,
                            const QuadOptions& opt) {
  CVector total = CVector::Zero(dim);
  const int k = static_cast<int>(curve.components.size());
  for (const auto& loop : c.loops) {
    if (loop.legs.empty()) continue;
    CVector sum = CVector::Zero(dim);
    Complex start_zeta{}, start_eta{}, end_zeta{}, end_eta{};
    int prev_comp = -1;
    for (std::size_t li = 0; li < loop.legs.size(); ++li) {
      const Leg& leg = loop.legs[li];
      if (leg.component < 0 || leg.component >= k)
        throw Error(ErrorKind::InvalidArgument, "cycle leg refers to a missing component");
      const CurveEq& p = curve.components[static_cast<std::size_t>(leg.component)];
      const Path path = resolve_anchors(leg.path, curve);
      const Complex z0 = path.start();
      auto roots = sorted_roots(fiber_roots(p, z0));

      std::size_t sheet = 0;
      if (li == 0) {
        if (leg.start_eta) {
          sheet = nearest_index(roots, *leg.start_eta);
        } else if (leg.start_sheet >= 0 && leg.start_sheet < static_cast<int>(roots.size())) {
          sheet = static_cast<std::size_t>(leg.start_sheet);
        } else {
          throw Error(ErrorKind::InvalidArgument, "first leg of a loop needs a start sheet or eta hint");
        }
        start_zeta = z0;
      } else {
        if (std::abs(z0 - end_zeta) > 1e-8 * (1.0 + std::abs(z0)))
          throw Error(ErrorKind::NonChainingCycle, "consecutive legs do not chain");
        if (leg.component != prev_comp) {
          const PolyZ res = resultant_eta(curve.components[static_cast<std::size_t>(prev_comp)], p);
          if (!res.is_zero()) {
            const auto pts = poly_roots(res, 1e-12);
            double best = std::numeric_limits<double>::infinity();
            for (const auto& r : pts) best = std::min(best, std::abs(r - z0));
            if (best > opt.transfer_tol * (1.0 + std::abs(z0)))
              throw Error(ErrorKind::NonChainingCycle, "component transfer away from an intersection point");
          }
        }
        sheet = nearest_index(roots, end_eta);
        if (std::abs(roots[sheet] - end_eta) > 1e-6 * (1.0 + std::abs(end_eta)))
          throw Error(ErrorKind::NonChainingCycle, "no matching sheet where legs join");
      }
      std::swap(roots[0], roots[sheet]);
      if (li == 0) start_eta = roots[0];

      const LegIntegral r = integrate_leg(p, leg.component, path, roots, dim, f, opt);
      sum += r.value;
      end_zeta = path.end();
      end_eta = r.end_eta;
      prev_comp = leg.component;
    }
    if (!c.chain) {
      const bool same_point = std::abs(end_zeta - start_zeta) <= 1e-8 * (1.0 + std::abs(start_zeta));
      const bool same_comp = prev_comp == loop.legs.front().component;
      const bool same_sheet = std::abs(end_eta - start_eta) <= 1e-8 * (1.0 + std::abs(start_eta));
      if (!(same_point && same_comp && same_sheet))
        throw Error(ErrorKind::OpenCycle, "loop does not return to its starting point and sheet");
    }
    total += loop.weight * sum;
  }
  return total;
}

Complex integrate_cycle(const ReducibleCurve& curve, const Differential& diff, const Cycle& c,
                        const QuadOptions& opt) {
  const VectorIntegrand f = [&](int comp, Complex zeta, Complex eta, CVector& out) {
    out(0) = diff.integrand(curve.components[static_cast<std::size_t>(comp)], zeta, eta);
  };
  return integrate_cycle_vec(curve, c, 1, f, opt)(0);
}

Complex residue_newton(const CurveEq& p, const MonomialSum& h) {
  if (h.empty()) return {};
  return power_sum_residue(power_sums(p, max_eta_power(h)), h);
}

CVector residue_newton_gradient(const CurveEq& p, const MonomialSum& h) {
  const int m = p.m();
  const int n = CurveEq::flat_size(m, p.d());
  CVector grad = CVector::Zero(n);
  if (h.empty()) return grad;
  const int kmax = max_eta_power(h);
  const auto ps = power_sums(p, kmax);

  int off = 0;
  for (int i = 1; i <= m; ++i) {
    for (int a = 0; a <= p.d() * i; ++a) {
      // Forward-mode derivative of the Newton recursion along d alpha_i = zeta^a.
      const PolyZ dalpha = PolyZ::monomial(a);
      std::vector<PolyZ> dps{PolyZ(0)};
      for (int k = 1; k <= kmax; ++k) {
        PolyZ acc(0);
        for (int l = 1; l <= std::min(k - 1, m); ++l) {
          acc -= p.alpha(l) * dps[static_cast<std::size_t>(k - l)];
          if (l == i) acc -= dalpha * ps[static_cast<std::size_t>(k - l)];
        }
        if (k == i) acc -= static_cast<double>(k) * dalpha;
        dps.push_back(acc);
      }
      grad(off + a) = power_sum_residue(dps, h);
    }
    off += p.d() * i + 1;
  }
  return grad;
}

ResidueResult residue_at_zero_fiber(const CurveEq& p, const MonomialSum& h) {
  ResidueResult out;
  if (h.empty()) return out;

  const auto bps = branch_points(p);
  double nearest = std::numeric_limits<double>::infinity();
  for (const auto& b : bps) {
    if (std::abs(b) < 1e-10) {
      out.quadrature_only = true;
    } else {
      nearest = std::min(nearest, std::abs(b));
    }
  }
  const double radius = std::isfinite(nearest) ? 0.5 * nearest : 1.0;

  // Symmetric in the sheets, hence single-valued on the punctured disc.
  auto sample = [&](Complex zeta) {
    Complex acc{};
    for (const auto& eta : fiber_roots(p, zeta)) acc += h(zeta, eta);
    return acc / (zeta * zeta) * zeta;
  };
  int n = 16;
  Complex prev{};
  double mag = 0.0;
  for (int k = 0; k < n; ++k) {
    const Complex v = sample(radius * std::polar(1.0, 2.0 * kPi * k / n));
    prev += v;
    mag = std::max(mag, std::abs(v));
  }
  prev /= static_cast<double>(n);
  while (true) {
    n *= 2;
    Complex cur{};
    for (int k = 0; k < n; ++k) {
      const Complex v = sample(radius * std::polar(1.0, 2.0 * kPi * k / n));
      cur += v;
      mag = std::max(mag, std::abs(v));
    }
    cur /= static_cast<double>(n);
    if (std::abs(cur - prev) <= 1e-13 * std::max(1.0, mag)) {
      out.quadrature = cur;
      break;
    }
    if (n >= (1 << 14)) throw Error(ErrorKind::QuadratureNotConverged, "zero-fibre residue quadrature");
    prev = cur;
  }

  if (out.quadrature_only) {
    out.newton = Complex{std::nan(""), std::nan("")};
    out.value = out.quadrature;
  } else {
    out.newton = residue_newton(p, h);
    out.value = out.newton;
    out.disagreement = std::abs(out.newton - out.quadrature);
  }
  return out;
}

bool check_G_reality(const MonomialSum& h, double tol) {
  std::map<std::pair<int, int>, Complex> coeffs;
  for (const auto& t : h.terms) coeffs[{t.i, t.j}] += t.coeff;
  auto get = [&](int i, int j) {
    auto it = coeffs.find({i, j});
    return it == coeffs.end() ? Complex{} : it->second;
  };
  for (const auto& [key, c] : coeffs) {
    const auto [i, j] = key;
    const Complex partner = get(i, 2 * i - j - 2);
    const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
    if (std::abs(std::conj(c) + sign * partner) > tol * std::max(1.0, std::abs(c))) return false;
  }
  return true;
}

}  // namespace gltforge
