#pragma once

#include <optional>
#include <vector>

#include "gltforge/core.hpp"

namespace gltforge {

enum class PathKind { Segment, Arc };

/// Endpoint pinned to an intersection point of two components; resolved to
/// the nearest root of their resultant when the cycle is evaluated.
struct Anchor {
  int p = 0;
  int q = 1;
  Complex guess{};
};

/// Parametrised zeta-path, t in [0, 1]. With `tau` set the path is the image
/// of the underlying segment/arc under zeta -> -1/conj(zeta).
struct Path {
  PathKind kind = PathKind::Segment;
  Complex a{}, b{};
  Complex center{};
  double radius = 1.0;
  double theta0 = 0.0;
  double theta1 = 2.0 * kPi;
  bool tau = false;
  std::optional<Anchor> anchor_a, anchor_b;

  static Path segment(Complex from, Complex to);
  static Path arc(Complex center, double radius, double theta0, double theta1);
  /// Full counter-clockwise circle starting at angle theta0.
  static Path circle(Complex center, double radius, double theta0 = 0.0);

  Complex point(double t) const;
  Complex derivative(double t) const;
  Complex start() const { return point(0.0); }
  Complex end() const { return point(1.0); }

  Path reversed() const;
  Path tau_image() const;
  double length() const;
};

inline Complex tau_zeta(Complex zeta) { return -1.0 / std::conj(zeta); }
inline Complex tau_eta(Complex zeta, Complex eta) {
  const Complex zb = std::conj(zeta);
  return -std::conj(eta) / (zb * zb);
}

/// One piece of a cycle: a path on a single component. The starting sheet is
/// chosen by `start_eta` (nearest fibre root), else by `start_sheet` (index in
/// the fibre sorted by real then imaginary part), else inherited from the
/// previous leg.
struct Leg {
  int component = 0;
  Path path;
  std::optional<Complex> start_eta;
  int start_sheet = -1;
};

/// Consecutive legs chain end-to-start; a loop is closed unless the owning
/// cycle is marked as a chain.
struct Loop {
  std::vector<Leg> legs;
  double weight = 1.0;

  Loop reversed() const;
};

struct Cycle {
  std::vector<Loop> loops;
  bool chain = false;

  static Cycle single(Leg leg);
  static Cycle single(Loop loop);

  Cycle reversed() const;
  /// Pointwise image under the real structure, orientation preserved.
  Cycle tau_image() const;
  /// c - tau_* c, which is anti-invariant by construction.
  Cycle anti_invariant() const;
  /// Multiplies every eta hint by s (for curves rescaled eta -> s eta).
  Cycle scaled_eta(double s) const;
};

}  // namespace gltforge
