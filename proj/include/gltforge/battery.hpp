#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gltforge/algebra.hpp"

namespace gltforge {

/// Independent stream for instance `index` of battery `stream`.
std::mt19937_64 instance_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

/// Ginibre coefficients A_0, ..., A_degree.
MatPoly random_matpoly(int n, int degree, std::mt19937_64& rng);
Complex random_complex(std::mt19937_64& rng);

struct IdentityRow {
  std::string name;
  int instances = 0;
  double worst = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

struct BatteryOptions {
  int count = 100;
  int min_size = 2;
  int max_size = 5;
  int degree = 2;
  std::uint64_t seed = 1;
  int threads = 1;
};

/// Weinstein-Aronszajn, adjugate column/row, triangular Gelfand-Zeitlin and
/// resultant-degree checks on seeded random matricial polynomials.
std::vector<IdentityRow> identity_battery(const BatteryOptions& opt);

}  // namespace gltforge
