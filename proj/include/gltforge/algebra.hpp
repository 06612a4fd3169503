#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gltforge/poly.hpp"

namespace gltforge {

Complex determinant(const CMatrix& m);

/// Classical adjoint: adjugate(M) * M = M * adjugate(M) = det(M) * 1.
/// Built from cofactors, so it is well defined for singular M.
CMatrix adjugate(const CMatrix& m);

/// Number of singular values above rel_tol * sigma_max (0 for the zero matrix).
int numerical_rank(const CMatrix& m, double rel_tol = 1e-10);

inline CMatrix mat_poly_eval(const MatPoly& a, Complex zeta) { return a(zeta); }

/// P(zeta, eta) = det(eta - A(zeta)), interpolated in both variables at roots
/// of unity (scaled to the coefficient magnitudes).
CurveEq char_curve(const MatPoly& a);

/// Block split A = [[B, y], [x, c]] with B of size n-1.
struct BlockSplit {
  CMatrix b;
  CVector y;       // last column without the corner
  CVector x;       // last row without the corner (as a column vector)
  Complex c;
};
BlockSplit split_last(const CMatrix& a);

/// det(eta - A) - [(eta - c) det(eta - B) - x (eta - B)_adj y]; zero by the
/// Weinstein-Aronszajn identity.
Complex wa_residual(const MatPoly& a, Complex zeta, Complex eta);

struct AdjColumnResidual {
  double column;      // last column of (eta - A)_adj against (adj(eta-B) y ; det(eta-B))
  double transposed;  // same for the transpose with x in place of y
  double scale;       // magnitude used for relative comparisons
};
AdjColumnResidual adjugate_column_check(const MatPoly& a, Complex zeta, Complex eta);

/// Gelfand-Zeitlin tower: char_curve of every leading principal minor.
std::vector<CurveEq> gz_curves(const MatPoly& a);

/// Sylvester resultant in eta; its roots are the zeta-coordinates of P cap Q.
/// Snapped to the exact zero polynomial when the curves share a component.
PolyZ resultant_eta(const CurveEq& p, const CurveEq& q);

/// Res_eta(P, dP/deta); vanishes exactly at the branch points of P.
PolyZ discriminant_eta(const CurveEq& p);

enum class RegularityVerdict { SampledRegular, NotRegular, Inconclusive };
const char* to_string(RegularityVerdict v);

struct RegularityReport {
  RegularityVerdict verdict = RegularityVerdict::Inconclusive;
  std::optional<Complex> witness;  // failing zeta
  int failing_minor = 0;           // size of the minor that failed (0 if none)
  int points_tested = 0;
  std::string detail;
};

/// Samples regularity (every eigenvalue geometrically simple) at the roots
/// of the zeta-discriminant and at `samples` seeded random points. With
/// `all_minors`, every leading principal minor is tested as well.
RegularityReport regularity_scan(const MatPoly& a, int samples, bool all_minors = false,
                                 std::uint64_t seed = 1);

}  // namespace gltforge
