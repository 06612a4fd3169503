#pragma once

#include <optional>
#include <vector>

#include "gltforge/glt.hpp"

namespace gltforge {

struct SecondDerivOptions {
  double h = 1e-2;
  double inner_ratio = 0.75;  // inner step of nested differences, relative to h
  std::optional<CVector> guess;
  std::optional<SliceSpec> slice;
  SolveOptions solve;
};

/// Wirtinger second derivatives of K over the active multiplets, from
/// Richardson-extrapolated nested central differences in the real
/// coordinates (Re u, Im u, Re z, Im z).
struct SecondDerivs {
  CMatrix uu;  // K_{u_i ubar_j}
  CMatrix uz;  // K_{u_i zbar_j}
  CMatrix zu;  // K_{z_i ubar_j}
  CMatrix zz;  // K_{z_i zbar_j}
  ChartPoint at;
  double k_value = 0.0;
  RMatrix real_hessian;  // variables ordered [Re u, Im u, Re z, Im z], each over active multiplets
  double schwarz = 0.0;  // largest difference between the two stencil orders of a mixed partial

  int n() const { return static_cast<int>(uu.rows()); }
  /// [[K_uubar, K_uzbar], [K_zubar, K_zzbar]]
  CMatrix block() const;
};

SecondDerivs second_derivs(const GltSpec& spec, const ChartPoint& at, const SecondDerivOptions& opt = {});

/// Second derivatives of an explicit real function of (u, z), same stencil.
SecondDerivs second_derivs_of(const std::function<double(const ChartPoint&)>& k, const ChartPoint& at,
                              double h = 1e-2, double inner_ratio = 0.75);

struct SpResult {
  double lambda = 0.0;
  double lambda_imag = 0.0;
  double residual = 0.0;  // || M^T J M - lambda J ||_F
};
SpResult sp_check(const SecondDerivs& sd);

struct JResult {
  CMatrix b;       // J restricted to (1,0)-vectors, valued in (0,1)-vectors
  double residual = 0.0;  // || J^2 + 1 ||_F
};
JResult j_structure(const SecondDerivs& sd, double lambda);

struct MetricReport {
  CMatrix g;  // Hermitian coefficients g_{a bbar} = -K_{a bbar} / 2 (K negative convention)
  int positive = 0;
  int negative = 0;
  int null = 0;
  bool k_positive = false;
};
MetricReport extract_metric(const SecondDerivs& sd);

/// (1/x) [[1, 3z], [3 zbar, c x^2 + 9 z zbar]] with x = sqrt((u + ubar + 3 z zbar)/6).
CMatrix cubic_reference_metric(const ChartPoint& at, double dzdz_coefficient = 6.0);

struct MetricFit {
  double mu = 0.0;
  double worst = 0.0;  // worst relative deviation ||g - mu G|| / ||mu G||
};
/// Best single constant mu with g ~ mu * reference over all points.
MetricFit fit_metric(const std::vector<CMatrix>& g, const std::vector<CMatrix>& reference);

struct CubicComparison {
  MetricFit printed;    // reference with dz dzbar coefficient 6 x^2 + 9 z zbar
  MetricFit corrected;  // same with 36 x^2
  double z0_spread = 0.0;  // relative spread of g_{u ubar} sqrt(u + ubar) over the z = 0 points
  int z0_points = 0;
};
CubicComparison metric_compare_cubic(const std::vector<ChartPoint>& points, const SecondDerivOptions& opt = {});

}  // namespace gltforge
