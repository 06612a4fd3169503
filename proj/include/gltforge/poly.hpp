#pragma once

#include <functional>
#include <span>
#include <vector>

#include "gltforge/core.hpp"

namespace gltforge {

/// Polynomial in zeta with complex coefficients and an explicit degree bound.
///
/// The bound is part of the value: the real structure pairs coefficient a
/// with 2r - a, so a polynomial of bound 2r with a vanishing top coefficient
/// is not the same object as one of bound 2r - 1.
class PolyZ {
 public:
  PolyZ() : coeffs_(1, Complex{}) {}
  explicit PolyZ(int deg_bound);
  explicit PolyZ(std::vector<Complex> coeffs);

  static PolyZ constant(Complex c, int deg_bound = 0);
  static PolyZ monomial(int power, Complex c = 1.0);

  int deg_bound() const { return static_cast<int>(coeffs_.size()) - 1; }
  std::span<const Complex> coeffs() const { return coeffs_; }

  Complex operator[](int a) const { return coeffs_.at(static_cast<std::size_t>(a)); }
  Complex& operator[](int a) { return coeffs_.at(static_cast<std::size_t>(a)); }
  /// Coefficient of zeta^a, zero outside [0, deg_bound].
  Complex coeff(int a) const;

  Complex operator()(Complex zeta) const;
  PolyZ derivative() const;

  /// Same polynomial with a different bound. Throws if truncation would
  /// drop a coefficient larger than `tol`.
  PolyZ with_bound(int deg_bound, double tol = 0.0) const;

  /// Highest index whose coefficient exceeds tol * max_abs(), or -1.
  int effective_degree(double rel_tol = 0.0) const;
  double max_abs() const;
  bool is_zero(double abs_tol = 0.0) const;

  PolyZ& operator+=(const PolyZ& other);
  PolyZ& operator-=(const PolyZ& other);
  PolyZ& operator*=(Complex s);

  friend PolyZ operator+(PolyZ a, const PolyZ& b) { return a += b; }
  friend PolyZ operator-(PolyZ a, const PolyZ& b) { return a -= b; }
  friend PolyZ operator*(PolyZ a, Complex s) { return a *= s; }
  friend PolyZ operator*(Complex s, PolyZ a) { return a *= s; }
  friend PolyZ operator*(const PolyZ& a, const PolyZ& b);
  PolyZ operator-() const { return *this * Complex{-1.0}; }

 private:
  std::vector<Complex> coeffs_;
};

/// Roots of p, ignoring leading coefficients below rel_tol * max|coeff|.
/// Returns an empty vector for (numerically) constant polynomials.
std::vector<Complex> poly_roots(const PolyZ& p, double rel_tol = 1e-13);

/// Recovers the coefficients of a polynomial of degree <= deg_bound from its
/// values at deg_bound + 1 equally spaced points on |zeta| = radius.
PolyZ interpolate_on_circle(const std::function<Complex(Complex)>& f, int deg_bound,
                            double radius = 1.0);

/// Matrix-valued polynomial A(zeta) = sum_i A_i zeta^i with square A_i.
class MatPoly {
 public:
  MatPoly() = default;
  explicit MatPoly(std::vector<CMatrix> mats);

  int size() const { return mats_.empty() ? 0 : static_cast<int>(mats_.front().rows()); }
  int degree() const { return static_cast<int>(mats_.size()) - 1; }
  const CMatrix& coeff(int i) const { return mats_.at(static_cast<std::size_t>(i)); }
  std::span<const CMatrix> coeffs() const { return mats_; }

  CMatrix operator()(Complex zeta) const;

  /// Upper-left m x m block of every coefficient.
  MatPoly principal_minor(int m) const;

 private:
  std::vector<CMatrix> mats_;
};

/// One spectral-curve component, monic in eta:
///   P(zeta, eta) = eta^m + sum_{i=1}^m alpha_i(zeta) eta^{m-i},
/// with deg_bound(alpha_i) = d * i.
class CurveEq {
 public:
  CurveEq() = default;
  CurveEq(int d, std::vector<PolyZ> alphas);

  /// eta - p(zeta) with p of bound d.
  static CurveEq linear(const PolyZ& p);
  /// Curve from the flat layout [alpha_1 coeffs, alpha_2 coeffs, ...].
  static CurveEq from_flat(int m, int d, std::span<const Complex> w);

  int m() const { return static_cast<int>(alphas_.size()); }
  int d() const { return d_; }
  const PolyZ& alpha(int i) const { return alphas_.at(static_cast<std::size_t>(i - 1)); }
  std::span<const PolyZ> alphas() const { return alphas_; }
  int genus() const { return (m() - 1) * (d_ * m() - 2) / 2; }

  /// Flat coefficient vector, length sum_i (d*i + 1).
  std::vector<Complex> flat() const;
  static int flat_size(int m, int d) { return d * m * (m + 1) / 2 + m; }

  /// [1, alpha_1(zeta), ..., alpha_m(zeta)], highest power of eta first.
  std::vector<Complex> eta_coeffs(Complex zeta) const;

  Complex operator()(Complex zeta, Complex eta) const;
  Complex d_eta(Complex zeta, Complex eta) const;
  Complex d_zeta(Complex zeta, Complex eta) const;

  /// Largest coefficient magnitude; used to scale tolerances.
  double scale() const;

 private:
  int d_ = 2;
  std::vector<PolyZ> alphas_;
};

}  // namespace gltforge
