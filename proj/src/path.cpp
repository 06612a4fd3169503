#include "gltforge/path.hpp"

#include <cmath>

namespace gltforge {
namespace {

Complex base_point(const Path& p, double t) {
  if (p.kind == PathKind::Segment) return p.a + t * (p.b - p.a);
  return p.center + p.radius * std::polar(1.0, p.theta0 + t * (p.theta1 - p.theta0));
}

Complex base_derivative(const Path& p, double t) {
  if (p.kind == PathKind::Segment) return p.b - p.a;
  const double dtheta = p.theta1 - p.theta0;
  return kI * dtheta * p.radius * std::polar(1.0, p.theta0 + t * dtheta);
}

}  // namespace

Path Path::segment(Complex from, Complex to) {
  Path p;
  p.kind = PathKind::Segment;
  p.a = from;
  p.b = to;
  return p;
}

Path Path::arc(Complex center, double radius, double theta0, double theta1) {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "arc radius must be positive");
  Path p;
  p.kind = PathKind::Arc;
  p.center = center;
  p.radius = radius;
  p.theta0 = theta0;
  p.theta1 = theta1;
  return p;
}

Path Path::circle(Complex center, double radius, double theta0) {
  return arc(center, radius, theta0, theta0 + 2.0 * kPi);
}

Complex Path::point(double t) const {
  const Complex z = base_point(*this, t);
  return tau ? tau_zeta(z) : z;
}

Complex Path::derivative(double t) const {
  const Complex dz = base_derivative(*this, t);
  if (!tau) return dz;
  const Complex zb = std::conj(base_point(*this, t));
  return std::conj(dz) / (zb * zb);
}

Path Path::reversed() const {
  Path r = *this;
  if (kind == PathKind::Segment) {
    std::swap(r.a, r.b);
    std::swap(r.anchor_a, r.anchor_b);
  } else {
    std::swap(r.theta0, r.theta1);
  }
  return r;
}

Path Path::tau_image() const {
  Path r = *this;
  r.tau = !tau;
  return r;
}

double Path::length() const {
  constexpr int kSamples = 64;
  double len = 0.0;
  for (int k = 0; k < kSamples; ++k) len += std::abs(derivative((k + 0.5) / kSamples));
  return len / kSamples;
}

Loop Loop::reversed() const {
  Loop r;
  r.weight = weight;
  for (auto it = legs.rbegin(); it != legs.rend(); ++it) {
    Leg leg;
    leg.component = it->component;
    leg.path = it->path.reversed();
    r.legs.push_back(leg);
  }
  // A closed loop ends where it starts, so the first hint still applies.
  if (!legs.empty() && !r.legs.empty()) {
    r.legs.front().start_eta = legs.front().start_eta;
    r.legs.front().start_sheet = legs.front().start_sheet;
  }
  return r;
}

Cycle Cycle::single(Leg leg) {
  Cycle c;
  c.loops.push_back(Loop{{std::move(leg)}, 1.0});
  return c;
}

Cycle Cycle::single(Loop loop) {
  Cycle c;
  c.loops.push_back(std::move(loop));
  return c;
}

Cycle Cycle::reversed() const {
  Cycle c;
  c.chain = chain;
  for (const auto& l : loops) c.loops.push_back(l.reversed());
  return c;
}

Cycle Cycle::tau_image() const {
  Cycle c;
  c.chain = chain;
  for (const auto& l : loops) {
    Loop t;
    t.weight = l.weight;
    for (const auto& leg : l.legs) {
      Leg img = leg;
      img.path = leg.path.tau_image();
      if (leg.start_eta) img.start_eta = tau_eta(leg.path.start(), *leg.start_eta);
      img.start_sheet = -1;
      if (!leg.start_eta && leg.start_sheet >= 0)
        throw Error(ErrorKind::InvalidArgument, "tau_image needs eta hints, not sheet indices");
      t.legs.push_back(img);
    }
    c.loops.push_back(t);
  }
  return c;
}

Cycle Cycle::anti_invariant() const {
  Cycle c = *this;
  for (auto l : tau_image().loops) {
    l.weight = -l.weight;
    c.loops.push_back(l);
  }
  return c;
}

Cycle Cycle::scaled_eta(double s) const {
  Cycle c = *this;
  for (auto& l : c.loops)
    for (auto& leg : l.legs)
      if (leg.start_eta) leg.start_eta = *leg.start_eta * s;
  return c;
}

}  // namespace gltforge
