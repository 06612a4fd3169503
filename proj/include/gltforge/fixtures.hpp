#pragma once

#include <cstdint>
#include <random>

#include "gltforge/glt.hpp"

namespace gltforge {

/// Gaussian coefficients projected onto the tau-real subspace.
CVector random_tau_real(const RealStructure& rs, std::mt19937_64& rng, double scale = 1.0);

struct EnclosingLoop {
  Cycle gamma;     // one circle around two branch points that are not tau-partners
  double margin = 0.0;  // clearance of the circle from the other branch points and zeta = 0
};

/// Picks the pair of branch points of component `component` whose enclosing
/// circle has the largest clearance. Throws InvalidArgument if no pair works.
EnclosingLoop enclosing_loop(const ReducibleCurve& curve, int component = 0);

/// A tau-real degree-2 curve together with an anti-invariant cycle
/// c = gamma - tau_* gamma, rescaled so that oint_c dzeta / P_eta = 2.
struct MonopoleFixture {
  CVector w;
  Cycle cycle;
  GltSpec spec;
  ChartPoint chart;  // chart coordinates at which w solves the constraints
  Complex period{};  // of dzeta / P_eta over the cycle before rescaling
  double margin = 0.0;
};

MonopoleFixture monopole_fixture(std::uint64_t seed);

/// Chart coordinates read off a coefficient vector (u from dF/dw_1, z = w_0).
ChartPoint chart_from(const GltSpec& spec, const CVector& w);

}  // namespace gltforge
