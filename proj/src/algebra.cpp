#include "gltforge/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace gltforge {
namespace {

// Coefficients of a polynomial sampled at N equally spaced points on |t| = radius.
std::vector<Complex> dft_coefficients(const std::vector<Complex>& values, double radius) {
  const int n = static_cast<int>(values.size());
  std::vector<Complex> out(values.size());
  double scale = 1.0;
  for (int j = 0; j < n; ++j) {
    Complex acc{};
    for (int k = 0; k < n; ++k)
      acc += values[static_cast<std::size_t>(k)] * std::polar(1.0, -2.0 * kPi * j * k / n);
    out[static_cast<std::size_t>(j)] = acc / (static_cast<double>(n) * scale);
    scale *= radius;
  }
  return out;
}

double zeta_radius(const MatPoly& a) {
  const double lo = a.coeff(0).norm();
  const double hi = a.coeff(a.degree()).norm();
  if (a.degree() == 0 || lo == 0.0 || hi == 0.0) return 1.0;
  return std::clamp(std::pow(lo / hi, 1.0 / a.degree()), 1e-2, 1e2);
}

// Sylvester matrix of two polynomials in eta, coefficients highest power first.
CMatrix sylvester(const std::vector<Complex>& p, const std::vector<Complex>& q) {
  const int m = static_cast<int>(p.size()) - 1;
  const int n = static_cast<int>(q.size()) - 1;
  CMatrix s = CMatrix::Zero(m + n, m + n);
  for (int r = 0; r < n; ++r)
    for (int k = 0; k <= m; ++k) s(r, r + k) = p[static_cast<std::size_t>(k)];
  for (int r = 0; r < m; ++r)
    for (int k = 0; k <= n; ++k) s(n + r, r + k) = q[static_cast<std::size_t>(k)];
  return s;
}

double hadamard_bound(const CMatrix& s) {
  double h = 1.0;
  for (Eigen::Index r = 0; r < s.rows(); ++r) h *= std::max(s.row(r).norm(), 1e-300);
  return h;
}

// Resultant in eta of two families of eta-polynomials parametrised by zeta,
// recovered by interpolation on the unit circle.
PolyZ resultant_family(const std::function<std::vector<Complex>(Complex)>& p,
                       const std::function<std::vector<Complex>(Complex)>& q, int deg_bound) {
  const int n = deg_bound + 1;
  std::vector<Complex> values(static_cast<std::size_t>(n));
  double bound = 0.0;
  for (int k = 0; k < n; ++k) {
    const Complex zeta = std::polar(1.0, 2.0 * kPi * k / n);
    const CMatrix s = sylvester(p(zeta), q(zeta));
    values[static_cast<std::size_t>(k)] = s.rows() == 0 ? Complex{1.0} : determinant(s);
    bound = std::max(bound, s.rows() == 0 ? 1.0 : hadamard_bound(s));
  }
  double vmax = 0.0;
  for (const auto& v : values) vmax = std::max(vmax, std::abs(v));
  if (vmax <= 1e-11 * bound) return PolyZ(deg_bound);
  return PolyZ(dft_coefficients(values, 1.0));
}

bool regular_at(const CMatrix& m) {
  const auto n = m.rows();
  if (n <= 1) return true;
  Eigen::ComplexEigenSolver<CMatrix> es(m, false);
  const CVector lambda = es.eigenvalues();
  const double scale = std::max(1.0, m.norm());
  for (Eigen::Index i = 0; i < n; ++i) {
    // Cluster nearly coincident eigenvalues; their spread sets the rank cut.
    Complex centre{};
    int count = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(lambda(j) - lambda(i)) <= 1e-6 * scale) {
        centre += lambda(j);
        ++count;
      }
    }
    centre /= static_cast<double>(count);
    double spread = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (std::abs(lambda(j) - lambda(i)) <= 1e-6 * scale)
        spread = std::max(spread, std::abs(lambda(j) - centre));

    const CMatrix shifted = m - centre * CMatrix::Identity(n, n);
    Eigen::JacobiSVD<CMatrix> svd(shifted);
    const auto& sv = svd.singularValues();
    const double cut = std::max(1e-10 * sv(0), 4.0 * spread);
    int small = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
      if (sv(k) <= cut) ++small;
    if (small > 1) return false;
  }
  return true;
}

}  // namespace

const char* to_string(RegularityVerdict v) {
  switch (v) {
    case RegularityVerdict::SampledRegular: return "sampled-regular";
    case RegularityVerdict::NotRegular: return "not-regular";
    case RegularityVerdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

Complex determinant(const CMatrix& m) {
  if (m.rows() == 0) return 1.0;
  return m.partialPivLu().determinant();
}

CMatrix adjugate(const CMatrix& m) {
  const auto n = m.rows();
  if (m.cols() != n) throw Error(ErrorKind::SizeMismatch, "adjugate: matrix must be square");
  if (n == 1) return CMatrix::Ones(1, 1);
  CMatrix adj(n, n);
  CMatrix minor(n - 1, n - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      // minor with row i and column j removed
      for (Eigen::Index r = 0, rr = 0; r < n; ++r) {
        if (r == i) continue;
        for (Eigen::Index c = 0, cc = 0; c < n; ++c) {
          if (c == j) continue;
          minor(rr, cc++) = m(r, c);
        }
        ++rr;
      }
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      adj(j, i) = sign * minor.fullPivLu().determinant();
    }
  }
  return adj;
}

int numerical_rank(const CMatrix& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& sv = svd.singularValues();
  if (sv(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) > rel_tol * sv(0)) ++rank;
  return rank;
}

CurveEq char_curve(const MatPoly& a) {
  const int n = a.size();
  const int d = a.degree();
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "char_curve: empty matrix polynomial");
  const int nodes = d * n + 1;
  const double rz = zeta_radius(a);

  std::vector<CMatrix> samples;
  samples.reserve(static_cast<std::size_t>(nodes));
  double reta = 1.0;
  for (int k = 0; k < nodes; ++k) {
    samples.push_back(a(rz * std::polar(1.0, 2.0 * kPi * k / nodes)));
    reta = std::max(reta, samples.back().norm());
  }

  // alpha_values[i][k] = alpha_i(zeta_k)
  std::vector<std::vector<Complex>> alpha_values(static_cast<std::size_t>(n) + 1,
                                                 std::vector<Complex>(static_cast<std::size_t>(nodes)));
  const CMatrix id = CMatrix::Identity(n, n);
  for (int k = 0; k < nodes; ++k) {
    std::vector<Complex> dets(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j) {
      const Complex eta = reta * std::polar(1.0, 2.0 * kPi * j / (n + 1));
      dets[static_cast<std::size_t>(j)] = determinant(eta * id - samples[static_cast<std::size_t>(k)]);
    }
    const auto c = dft_coefficients(dets, reta);  // c[p] = coefficient of eta^p
    for (int i = 1; i <= n; ++i)
      alpha_values[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = c[static_cast<std::size_t>(n - i)];
  }

  std::vector<PolyZ> alphas;
  for (int i = 1; i <= n; ++i) {
    auto coeffs = dft_coefficients(alpha_values[static_cast<std::size_t>(i)], rz);
    coeffs.resize(static_cast<std::size_t>(d * i + 1));
    alphas.emplace_back(std::move(coeffs));
  }
  return CurveEq(d, std::move(alphas));
}

BlockSplit split_last(const CMatrix& a) {
  const auto n = a.rows();
  if (n < 2 || a.cols() != n) throw Error(ErrorKind::InvalidArgument, "split_last: need square n >= 2");
  BlockSplit s;
  s.b = a.topLeftCorner(n - 1, n - 1);
  s.y = a.topRightCorner(n - 1, 1);
  s.x = a.bottomLeftCorner(1, n - 1).transpose();
  s.c = a(n - 1, n - 1);
  return s;
}

Complex wa_residual(const MatPoly& a, Complex zeta, Complex eta) {
  const CMatrix m = a(zeta);
  const auto n = m.rows();
  const BlockSplit s = split_last(m);
  const CMatrix eb = eta * CMatrix::Identity(n - 1, n - 1) - s.b;
  const Complex lhs = determinant(eta * CMatrix::Identity(n, n) - m);
  const Complex rhs = (eta - s.c) * determinant(eb) - (s.x.transpose() * adjugate(eb) * s.y)(0, 0);
  return lhs - rhs;
}

AdjColumnResidual adjugate_column_check(const MatPoly& a, Complex zeta, Complex eta) {
  const CMatrix m = a(zeta);
  const auto n = m.rows();
  const BlockSplit s = split_last(m);
  const CMatrix em = eta * CMatrix::Identity(n, n) - m;
  const CMatrix eb = eta * CMatrix::Identity(n - 1, n - 1) - s.b;
  const CMatrix adj_b = adjugate(eb);
  const Complex det_b = determinant(eb);

  CVector expected(n);
  expected.head(n - 1) = adj_b * s.y;
  expected(n - 1) = det_b;
  CVector expected_t(n);
  expected_t.head(n - 1) = adj_b.transpose() * s.x;
  expected_t(n - 1) = det_b;

  const CVector col = adjugate(em).col(n - 1);
  const CVector col_t = adjugate(CMatrix(em.transpose())).col(n - 1);

  AdjColumnResidual r;
  r.scale = std::max({1.0, col.norm(), col_t.norm(), expected.norm()});
  r.column = (col - expected).norm();
  r.transposed = (col_t - expected_t).norm();
  return r;
}

std::vector<CurveEq> gz_curves(const MatPoly& a) {
  std::vector<CurveEq> out;
  for (int m = 1; m <= a.size(); ++m) out.push_back(char_curve(a.principal_minor(m)));
  return out;
}

PolyZ resultant_eta(const CurveEq& p, const CurveEq& q) {
  if (p.d() != q.d()) throw Error(ErrorKind::InvalidArgument, "resultant_eta: curves over different O(d)");
  return resultant_family([&](Complex z) { return p.eta_coeffs(z); },
                          [&](Complex z) { return q.eta_coeffs(z); }, p.d() * p.m() * q.m());
}

PolyZ discriminant_eta(const CurveEq& p) {
  const int m = p.m();
  if (m < 2) return PolyZ::constant(1.0);
  auto deriv = [&](Complex z) {
    const auto c = p.eta_coeffs(z);
    std::vector<Complex> out(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k)
      out[static_cast<std::size_t>(k)] = static_cast<double>(m - k) * c[static_cast<std::size_t>(k)];
    return out;
  };
  return resultant_family([&](Complex z) { return p.eta_coeffs(z); }, deriv, p.d() * m * (m - 1));
}

RegularityReport regularity_scan(const MatPoly& a, int samples, bool all_minors, std::uint64_t seed) {
  if (samples < 1) throw Error(ErrorKind::InvalidArgument, "regularity_scan: samples must be >= 1");
  RegularityReport report;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> radius(0.0, 2.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);

  bool root_failure = false;
  const int first = all_minors ? 1 : a.size();
  for (int m = first; m <= a.size(); ++m) {
    const MatPoly minor = a.principal_minor(m);
    std::vector<Complex> points;
    try {
      const PolyZ disc = discriminant_eta(char_curve(minor));
      if (!disc.is_zero()) points = poly_roots(disc, 1e-10);
    } catch (const Error& e) {
      root_failure = true;
      report.detail = std::string("discriminant root-finding failed: ") + e.what();
    }
    for (int s = 0; s < samples; ++s) points.push_back(std::polar(radius(rng), angle(rng)));

    for (const Complex& zeta : points) {
      ++report.points_tested;
      if (!regular_at(minor(zeta))) {
        report.verdict = RegularityVerdict::NotRegular;
        report.witness = zeta;
        report.failing_minor = m;
        report.detail = "eigenvalue with geometric multiplicity > 1";
        return report;
      }
    }
  }
  report.verdict = root_failure ? RegularityVerdict::Inconclusive : RegularityVerdict::SampledRegular;
  return report;
}

}  // namespace gltforge
