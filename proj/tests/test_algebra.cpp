#include <doctest.h>

#include "gltforge/algebra.hpp"
#include "gltforge/battery.hpp"
#include "oracles.hpp"

using namespace gltforge;

namespace {

CMatrix random_matrix(int n, std::mt19937_64& rng) { return random_matpoly(n, 0, rng).coeff(0); }

double rel(Complex a, Complex b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("mat_poly_eval") {
  const CMatrix id = CMatrix::Identity(3, 3);
  CHECK((mat_poly_eval(MatPoly({id}), 5.0) - id).norm() == 0.0);
  CHECK((mat_poly_eval(MatPoly({CMatrix::Zero(3, 3), id}), 2.0) - 2.0 * id).norm() == 0.0);

  std::mt19937_64 rng(3);
  const MatPoly a = random_matpoly(2, 2, rng);
  const Complex zeta{0.3, 0.1};
  const CMatrix term_sum = a.coeff(0) + a.coeff(1) * zeta + a.coeff(2) * zeta * zeta;
  CHECK((a(zeta) - term_sum).norm() < 1e-14);
}

TEST_CASE("char_curve small cases") {
  const MatPoly lin({CMatrix::Constant(1, 1, Complex{2.0, 1.0}), CMatrix::Constant(1, 1, Complex{-1.0, 0.5})});
  const CurveEq p = char_curve(lin);
  REQUIRE(p.m() == 1);
  CHECK(std::abs(p.alpha(1)[0] - Complex{-2.0, -1.0}) < 1e-14);
  CHECK(std::abs(p.alpha(1)[1] - Complex{1.0, -0.5}) < 1e-14);

  CMatrix nil = CMatrix::Zero(2, 2);
  nil(0, 1) = 1.0;
  const CurveEq q = char_curve(MatPoly({nil}));
  REQUIRE(q.m() == 2);
  for (Complex c : q.flat()) CHECK(std::abs(c) < 1e-14);
}

TEST_CASE("char_curve agrees with cofactor expansion on random 3x3 quadratics") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const MatPoly a = random_matpoly(3, 2, rng);
    const CurveEq p = char_curve(a);
    CHECK(p.m() == 3);
    CHECK(p.alpha(3).deg_bound() == 6);
    for (int k = 0; k < 6; ++k) {
      const Complex zeta = random_complex(rng), eta = random_complex(rng);
      const Complex direct = oracle::laplace_det(eta * CMatrix::Identity(3, 3) - a(zeta));
      CHECK(std::abs(p(zeta, eta) - direct) < 1e-10 * std::max(1.0, std::abs(direct)));
    }
  }
}

TEST_CASE("char_curve vanishes at eigenvalues") {
  std::mt19937_64 rng(5);
  for (int n = 1; n <= 5; ++n) {
    const MatPoly a = random_matpoly(n, 2, rng);
    const CurveEq p = char_curve(a);
    const Complex zeta = random_complex(rng);
    Eigen::ComplexEigenSolver<CMatrix> es(a(zeta));
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
      const Complex lam = es.eigenvalues()(k);
      const double scale = std::pow(std::abs(lam) + a(zeta).norm(), n);
      CHECK(std::abs(p(zeta, lam)) < 1e-8 * scale);
    }
  }
}

TEST_CASE("adjugate") {
  CHECK(std::abs(adjugate(CMatrix::Constant(1, 1, 7.0))(0, 0) - 1.0) < 1e-15);
  CMatrix m(2, 2);
  m << 1.0, 2.0, 3.0, 4.0;
  CMatrix expected(2, 2);
  expected << 4.0, -2.0, -3.0, 1.0;
  CHECK((adjugate(m) - expected).norm() < 1e-14);

  std::mt19937_64 rng(17);
  const CMatrix r4 = random_matrix(4, rng);
  CHECK((adjugate(r4) - oracle::cofactor_adjugate(r4)).norm() < 1e-10 * r4.norm() * r4.norm() * r4.norm());

  for (int n = 1; n <= 5; ++n) {
    const CMatrix r = random_matrix(n, rng);
    const CMatrix adj = adjugate(r);
    const Complex det = determinant(r);
    const double scale = std::max(1.0, adj.norm() * r.norm());
    CHECK((adj * r - det * CMatrix::Identity(n, n)).norm() < 1e-9 * scale);
    CHECK((r * adj - det * CMatrix::Identity(n, n)).norm() < 1e-9 * scale);
  }
}

TEST_CASE("adjugate of a singular matrix") {
  CMatrix m(3, 3);
  m << 1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 1.0, 0.0, 1.0;
  CHECK((adjugate(m) - oracle::cofactor_adjugate(m)).norm() < 1e-12);
}

TEST_CASE("determinant against Laplace expansion") {
  std::mt19937_64 rng(19);
  for (int n = 1; n <= 5; ++n) {
    const CMatrix r = random_matrix(n, rng);
    CHECK(rel(determinant(r), oracle::laplace_det(r)) < 1e-11);
  }
}

TEST_CASE("Weinstein-Aronszajn residual") {
  std::mt19937_64 rng(23);
  std::vector<CMatrix> diag;
  for (int i = 0; i < 3; ++i) diag.push_back(random_matrix(4, rng).diagonal().asDiagonal());
  const MatPoly d(diag);
  for (int k = 0; k < 5; ++k) CHECK(std::abs(wa_residual(d, random_complex(rng), random_complex(rng))) < 1e-12);

  const MatPoly a2 = random_matpoly(2, 2, rng);
  for (int k = 0; k < 20; ++k) {
    const Complex zeta = random_complex(rng), eta = random_complex(rng);
    const double scale = std::pow(std::abs(eta) + a2(zeta).norm(), 2);
    CHECK(std::abs(wa_residual(a2, zeta, eta)) < 1e-9 * scale);
  }
  const MatPoly a4 = random_matpoly(4, 2, rng);
  const Complex zeta = random_complex(rng), eta = random_complex(rng);
  CHECK(std::abs(wa_residual(a4, zeta, eta)) < 1e-8 * std::pow(std::abs(eta) + a4(zeta).norm(), 4));
}

TEST_CASE("adjugate column formulas") {
  std::mt19937_64 rng(29);
  // y = 0: last column of the adjugate is (0, ..., 0, det(eta - B)).
  std::vector<CMatrix> blocks;
  for (int i = 0; i < 3; ++i) {
    CMatrix m = random_matrix(3, rng);
    m(0, 2) = m(1, 2) = m(2, 0) = m(2, 1) = 0.0;
    blocks.push_back(m);
  }
  const MatPoly bd(blocks);
  const Complex zeta{0.4, -0.2}, eta{1.1, 0.3};
  const CMatrix col = adjugate(eta * CMatrix::Identity(3, 3) - bd(zeta)).col(2);
  CHECK(std::abs(col(0)) < 1e-13);
  CHECK(std::abs(col(1)) < 1e-13);
  const CMatrix b = bd(zeta).topLeftCorner(2, 2);
  CHECK(rel(col(2), determinant(eta * CMatrix::Identity(2, 2) - b)) < 1e-13);
  const AdjColumnResidual r0 = adjugate_column_check(bd, zeta, eta);
  CHECK(r0.column < 1e-12 * r0.scale);

  const MatPoly a3 = random_matpoly(3, 2, rng);
  for (int k = 0; k < 5; ++k) {
    const AdjColumnResidual r = adjugate_column_check(a3, random_complex(rng), random_complex(rng));
    CHECK(r.column < 1e-9 * r.scale);
    CHECK(r.transposed < 1e-9 * r.scale);
  }

  // 2x2 closed form: adj(eta - A) e_2 = (A_12, eta - A_11).
  const MatPoly a2 = random_matpoly(2, 1, rng);
  const CMatrix m = a2(zeta);
  const CMatrix adj = adjugate(eta * CMatrix::Identity(2, 2) - m);
  CHECK(std::abs(adj(0, 1) - m(0, 1)) < 1e-14);
  CHECK(std::abs(adj(1, 1) - (eta - m(0, 0))) < 1e-14);
  const AdjColumnResidual r2 = adjugate_column_check(a2, zeta, eta);
  CHECK(r2.column < 1e-12 * r2.scale);
  CHECK(r2.transposed < 1e-12 * r2.scale);
}

TEST_CASE("adjugate column sign: the minus sign as printed does not hold") {
  std::mt19937_64 rng(31);
  const MatPoly a = random_matpoly(3, 2, rng);
  const Complex zeta{0.2, 0.7}, eta{-0.5, 0.9};
  const CMatrix m = a(zeta);
  const CMatrix eb = eta * CMatrix::Identity(2, 2) - m.topLeftCorner(2, 2);
  const CVector col = adjugate(eta * CMatrix::Identity(3, 3) - m).col(2);
  const CVector printed = -adjugate(eb) * m.topRightCorner(2, 1);
  CHECK((col.head(2) - printed).norm() > 1e-3 * col.norm());
}

TEST_CASE("Gelfand-Zeitlin curves") {
  std::mt19937_64 rng(37);
  // Diagonal: S_m = prod_{j <= m} (eta - p_j).
  std::vector<CMatrix> mats;
  for (int i = 0; i < 3; ++i) mats.push_back(random_matrix(3, rng).diagonal().asDiagonal());
  const MatPoly d(mats);
  const auto curves = gz_curves(d);
  REQUIRE(curves.size() == 3);
  for (int m = 1; m <= 3; ++m) {
    const Complex zeta = random_complex(rng), eta = random_complex(rng);
    Complex prod = 1.0;
    for (int j = 0; j < m; ++j) prod *= eta - d(zeta)(j, j);
    CHECK(rel(curves[static_cast<std::size_t>(m - 1)](zeta, eta), prod) < 1e-11);
  }

  const MatPoly a = random_matpoly(2, 2, rng);
  const auto c2 = gz_curves(a);
  const Complex zeta{0.3, -0.6}, eta{0.8, 0.1};
  CHECK(rel(c2[0](zeta, eta), eta - a(zeta)(0, 0)) < 1e-12);
  CHECK(rel(c2[1](zeta, eta), char_curve(a)(zeta, eta)) < 1e-12);
  CHECK(rel(c2[1](zeta, eta), oracle::laplace_det(eta * CMatrix::Identity(2, 2) - a(zeta))) < 1e-11);
}

TEST_CASE("Gelfand-Zeitlin curves of a triangular matrix equal those of its diagonal") {
  std::mt19937_64 rng(41);
  const MatPoly a = random_matpoly(4, 2, rng);
  std::vector<CMatrix> upper, diag;
  for (const CMatrix& m : a.coeffs()) {
    upper.push_back(m.triangularView<Eigen::Upper>());
    diag.push_back(m.diagonal().asDiagonal());
  }
  const auto cu = gz_curves(MatPoly(upper));
  const auto cd = gz_curves(MatPoly(diag));
  for (std::size_t m = 0; m < cu.size(); ++m) {
    const auto fu = cu[m].flat(), fd = cd[m].flat();
    double scale = 1.0;
    for (Complex c : fd) scale = std::max(scale, std::abs(c));
    for (std::size_t k = 0; k < fu.size(); ++k) CHECK(std::abs(fu[k] - fd[k]) < 1e-12 * scale);
  }
}

TEST_CASE("resultant_eta") {
  const PolyZ p({1.0, Complex{2.0, 1.0}, -1.0});
  const PolyZ q({Complex{0.5, -0.5}, 3.0, 0.25});
  const PolyZ r = resultant_eta(CurveEq::linear(p), CurveEq::linear(q));
  for (int a = 0; a <= 2; ++a) CHECK(std::abs(r.coeff(a) - (p.coeff(a) - q.coeff(a))) < 1e-12);

  // eta^2 - zeta^2 and eta - zeta share a component.
  const CurveEq sq(2, {PolyZ(2), PolyZ({0.0, 0.0, -1.0, 0.0, 0.0})});
  const CurveEq ln = CurveEq::linear(PolyZ({0.0, 1.0, 0.0}));
  CHECK(resultant_eta(sq, ln).is_zero(1e-12));

  // Generic (m = 2, m' = 1) pair against P(zeta, q(zeta)) expanded by monomials.
  std::mt19937_64 rng(43);
  std::vector<Complex> a1(3), a2(5), qc(3);
  for (auto& c : a1) c = random_complex(rng);
  for (auto& c : a2) c = random_complex(rng);
  for (auto& c : qc) c = random_complex(rng);
  const CurveEq big(2, {PolyZ(a1), PolyZ(a2)});
  const CurveEq small = CurveEq::linear(PolyZ(qc));
  // Q = eta - q, so Res(P, Q) = P(zeta, q) up to the sign convention (-1)^(deg P deg Q) = 1.
  const auto expanded = oracle::poly_add(oracle::poly_add(oracle::poly_mul(qc, qc), oracle::poly_mul(a1, qc)), a2);
  const PolyZ res = resultant_eta(big, small);
  CHECK(res.effective_degree(1e-12) == 4);
  double err = 0.0, scale = 0.0;
  for (int k = 0; k <= 4; ++k) {
    err = std::max(err, std::abs(res.coeff(k) - expanded[static_cast<std::size_t>(k)]));
    scale = std::max(scale, std::abs(expanded[static_cast<std::size_t>(k)]));
  }
  CHECK(err < 1e-11 * scale);
}

TEST_CASE("resultant degree bound on Gelfand-Zeitlin towers") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + trial % 3;
    const auto curves = gz_curves(random_matpoly(n, 2, rng));
    for (int m = 1; m < n; ++m) {
      const PolyZ r = resultant_eta(curves[static_cast<std::size_t>(m - 1)], curves[static_cast<std::size_t>(m)]);
      CHECK(r.effective_degree(1e-10) == 2 * m * (m + 1));
    }
  }
}

TEST_CASE("regularity_scan") {
  // Companion matrices are regular.
  std::vector<CMatrix> comp(3, CMatrix::Zero(3, 3));
  comp[0](1, 0) = comp[0](2, 1) = 1.0;
  comp[0](0, 2) = 0.5;
  comp[1](1, 2) = -1.0;
  comp[2](2, 2) = 2.0;
  CHECK(regularity_scan(MatPoly(comp), 16).verdict == RegularityVerdict::SampledRegular);

  const RegularityReport zero = regularity_scan(MatPoly({CMatrix::Zero(3, 3)}), 4);
  CHECK(zero.verdict == RegularityVerdict::NotRegular);
  CHECK(zero.witness.has_value());

  std::mt19937_64 rng(53);
  const MatPoly a = random_matpoly(3, 2, rng);
  const RegularityReport r = regularity_scan(a, 16, true);
  CHECK(r.verdict == RegularityVerdict::SampledRegular);
  // Oracle: eigenvalues are pairwise distinct at random points.
  for (int k = 0; k < 10; ++k) {
    Eigen::ComplexEigenSolver<CMatrix> es(a(random_complex(rng)));
    const auto& ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i)
      for (Eigen::Index j = i + 1; j < ev.size(); ++j) CHECK(std::abs(ev(i) - ev(j)) > 1e-6);
  }

  // A scalar block repeated: eigenvalue of geometric multiplicity two everywhere.
  std::vector<CMatrix> rep(2, CMatrix::Identity(2, 2));
  CHECK(regularity_scan(MatPoly(rep), 4).verdict == RegularityVerdict::NotRegular);
}

TEST_CASE("numerical_rank") {
  CMatrix m = CMatrix::Zero(3, 3);
  m(0, 0) = 1.0;
  m(1, 1) = 1e-12;
  CHECK(numerical_rank(m) == 1);
  CHECK(numerical_rank(CMatrix::Identity(4, 4)) == 4);
}
