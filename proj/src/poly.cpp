#include "gltforge/poly.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace gltforge {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::SizeMismatch: return "size mismatch";
    case ErrorKind::PathThroughBranchPoint: return "path through branch point";
    case ErrorKind::NonChainingCycle: return "non-chaining segments";
    case ErrorKind::OpenCycle: return "open cycle";
    case ErrorKind::QuadratureNotConverged: return "quadrature not converged";
    case ErrorKind::NewtonDivergence: return "Newton divergence";
    case ErrorKind::DegenerateConstraint: return "degenerate constraint point";
    case ErrorKind::DomainBoundary: return "domain boundary";
    case ErrorKind::SingularBlock: return "singular block";
    case ErrorKind::StencilFailure: return "constraint solve failed inside stencil";
    case ErrorKind::Config: return "config error";
  }
  return "unknown";
}

PolyZ::PolyZ(int deg_bound) {
  if (deg_bound < 0) throw Error(ErrorKind::InvalidArgument, "PolyZ: negative degree bound");
  coeffs_.assign(static_cast<std::size_t>(deg_bound) + 1, Complex{});
}

PolyZ::PolyZ(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.push_back(Complex{});
}

PolyZ PolyZ::constant(Complex c, int deg_bound) {
  PolyZ p(deg_bound);
  p[0] = c;
  return p;
}

PolyZ PolyZ::monomial(int power, Complex c) {
  PolyZ p(power);
  p[power] = c;
  return p;
}

Complex PolyZ::coeff(int a) const {
  if (a < 0 || a > deg_bound()) return {};
  return coeffs_[static_cast<std::size_t>(a)];
}

Complex PolyZ::operator()(Complex zeta) const {
  Complex acc{};
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * zeta + *it;
  return acc;
}

PolyZ PolyZ::derivative() const {
  if (deg_bound() == 0) return PolyZ(0);
  PolyZ out(deg_bound() - 1);
  for (int a = 1; a <= deg_bound(); ++a) out[a - 1] = static_cast<double>(a) * coeff(a);
  return out;
}

PolyZ PolyZ::with_bound(int bound, double tol) const {
  PolyZ out(bound);
  for (int a = 0; a <= deg_bound(); ++a) {
    if (a <= bound) {
      out[a] = coeff(a);
    } else if (std::abs(coeff(a)) > tol) {
      throw Error(ErrorKind::InvalidArgument, "PolyZ::with_bound would drop a nonzero coefficient");
    }
  }
  return out;
}

double PolyZ::max_abs() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

int PolyZ::effective_degree(double rel_tol) const {
  const double cut = rel_tol * max_abs();
  for (int a = deg_bound(); a >= 0; --a)
    if (std::abs(coeff(a)) > cut) return a;
  return -1;
}

bool PolyZ::is_zero(double abs_tol) const { return max_abs() <= abs_tol; }

PolyZ& PolyZ::operator+=(const PolyZ& other) {
  if (other.deg_bound() > deg_bound()) coeffs_.resize(other.coeffs_.size(), Complex{});
  for (int a = 0; a <= other.deg_bound(); ++a) coeffs_[static_cast<std::size_t>(a)] += other.coeff(a);
  return *this;
}

PolyZ& PolyZ::operator-=(const PolyZ& other) {
  if (other.deg_bound() > deg_bound()) coeffs_.resize(other.coeffs_.size(), Complex{});
  for (int a = 0; a <= other.deg_bound(); ++a) coeffs_[static_cast<std::size_t>(a)] -= other.coeff(a);
  return *this;
}

PolyZ& PolyZ::operator*=(Complex s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

PolyZ operator*(const PolyZ& a, const PolyZ& b) {
  PolyZ out(a.deg_bound() + b.deg_bound());
  for (int i = 0; i <= a.deg_bound(); ++i)
    for (int j = 0; j <= b.deg_bound(); ++j) out[i + j] += a.coeff(i) * b.coeff(j);
  return out;
}

std::vector<Complex> poly_roots(const PolyZ& p, double rel_tol) {
  const int deg = p.effective_degree(rel_tol);
  if (deg <= 0) return {};
  const Complex lead = p.coeff(deg);
  if (deg == 1) return {-p.coeff(0) / lead};

  CMatrix companion = CMatrix::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -p.coeff(i) / lead;
  Eigen::ComplexEigenSolver<CMatrix> es(companion, false);
  if (es.info() != Eigen::Success)
    throw Error(ErrorKind::InvalidArgument, "poly_roots: eigenvalue iteration failed");

  const PolyZ dp = p.derivative();
  std::vector<Complex> roots(static_cast<std::size_t>(deg));
  for (int i = 0; i < deg; ++i) {
    Complex r = es.eigenvalues()(i);
    // Newton polish; skip when the derivative vanishes (multiple root).
    for (int it = 0; it < 3; ++it) {
      const Complex d = dp(r);
      if (std::abs(d) < 1e-300) break;
      const Complex step = p(r) / d;
      if (!std::isfinite(std::abs(step)) || std::abs(step) > 1e-3 * (1.0 + std::abs(r))) break;
      r -= step;
    }
    roots[static_cast<std::size_t>(i)] = r;
  }
  return roots;
}

PolyZ interpolate_on_circle(const std::function<Complex(Complex)>& f, int deg_bound,
                            double radius) {
  const int n = deg_bound + 1;
  std::vector<Complex> values(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    values[static_cast<std::size_t>(k)] = f(radius * std::polar(1.0, 2.0 * kPi * k / n));

  PolyZ out(deg_bound);
  double scale = 1.0;
  for (int j = 0; j < n; ++j) {
    Complex acc{};
    for (int k = 0; k < n; ++k)
      acc += values[static_cast<std::size_t>(k)] * std::polar(1.0, -2.0 * kPi * j * k / n);
    out[j] = acc / (static_cast<double>(n) * scale);
    scale *= radius;
  }
  return out;
}

MatPoly::MatPoly(std::vector<CMatrix> mats) : mats_(std::move(mats)) {
  if (mats_.empty()) throw Error(ErrorKind::InvalidArgument, "MatPoly: no coefficients");
  const auto n = mats_.front().rows();
  for (const auto& m : mats_)
    if (m.rows() != n || m.cols() != n)
      throw Error(ErrorKind::SizeMismatch, "MatPoly: coefficients must be square of equal size");
}

CMatrix MatPoly::operator()(Complex zeta) const {
  CMatrix acc = CMatrix::Zero(size(), size());
  for (auto it = mats_.rbegin(); it != mats_.rend(); ++it) acc = acc * zeta + *it;
  return acc;
}

MatPoly MatPoly::principal_minor(int m) const {
  if (m < 1 || m > size()) throw Error(ErrorKind::InvalidArgument, "principal_minor: bad size");
  std::vector<CMatrix> out;
  out.reserve(mats_.size());
  for (const auto& a : mats_) out.emplace_back(a.topLeftCorner(m, m));
  return MatPoly(std::move(out));
}

CurveEq::CurveEq(int d, std::vector<PolyZ> alphas) : d_(d), alphas_(std::move(alphas)) {
  for (std::size_t i = 0; i < alphas_.size(); ++i) {
    const int bound = d_ * static_cast<int>(i + 1);
    if (alphas_[i].deg_bound() != bound) alphas_[i] = alphas_[i].with_bound(bound);
  }
}

CurveEq CurveEq::linear(const PolyZ& p) { return CurveEq(p.deg_bound(), {-p}); }

CurveEq CurveEq::from_flat(int m, int d, std::span<const Complex> w) {
  if (static_cast<int>(w.size()) != flat_size(m, d))
    throw Error(ErrorKind::SizeMismatch, "CurveEq::from_flat: wrong coefficient count");
  std::vector<PolyZ> alphas;
  std::size_t off = 0;
  for (int i = 1; i <= m; ++i) {
    const auto len = static_cast<std::size_t>(d * i + 1);
    alphas.emplace_back(std::vector<Complex>(w.begin() + static_cast<std::ptrdiff_t>(off),
                                             w.begin() + static_cast<std::ptrdiff_t>(off + len)));
    off += len;
  }
  return CurveEq(d, std::move(alphas));
}

std::vector<Complex> CurveEq::flat() const {
  std::vector<Complex> out;
  for (const auto& a : alphas_) out.insert(out.end(), a.coeffs().begin(), a.coeffs().end());
  return out;
}

std::vector<Complex> CurveEq::eta_coeffs(Complex zeta) const {
  std::vector<Complex> c(alphas_.size() + 1);
  c[0] = 1.0;
  for (std::size_t i = 0; i < alphas_.size(); ++i) c[i + 1] = alphas_[i](zeta);
  return c;
}

Complex CurveEq::operator()(Complex zeta, Complex eta) const {
  Complex acc = 1.0;
  for (const auto& a : alphas_) acc = acc * eta + a(zeta);
  return acc;
}

Complex CurveEq::d_eta(Complex zeta, Complex eta) const {
  const int mm = m();
  Complex acc = static_cast<double>(mm);
  for (int i = 1; i < mm; ++i) acc = acc * eta + static_cast<double>(mm - i) * alpha(i)(zeta);
  return acc;
}

Complex CurveEq::d_zeta(Complex zeta, Complex eta) const {
  Complex acc{};
  for (const auto& a : alphas_) acc = acc * eta + a.derivative()(zeta);
  return acc;
}

double CurveEq::scale() const {
  double s = 1.0;
  for (const auto& a : alphas_) s = std::max(s, a.max_abs());
  return s;
}

}  // namespace gltforge
