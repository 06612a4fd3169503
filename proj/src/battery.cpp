#include "gltforge/battery.hpp"

#include <algorithm>
#include <cmath>

#include "gltforge/sweep.hpp"

namespace gltforge {
namespace {

struct Sample {
  double value = 0.0;
  std::string note;
};

int size_for(const BatteryOptions& opt, int k) { return opt.min_size + k % (opt.max_size - opt.min_size + 1); }

double det_scale(const CMatrix& m, Complex eta) {
  return std::pow(std::abs(eta) + m.operatorNorm(), static_cast<double>(m.rows()));
}

// Coefficient differences of alpha_i divided by max(1, |reference|, mu^i), mu =
// sum of the coefficient norms (a bound for |A(zeta)| on the unit disc).
double curve_difference(const std::vector<CurveEq>& a, const std::vector<CurveEq>& b, double mu) {
  double worst = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) {
    for (int i = 1; i <= a[m].m(); ++i) {
      const PolyZ& pa = a[m].alpha(i);
      const PolyZ& pb = b[m].alpha(i);
      const double natural = std::pow(mu, i);
      for (int c = 0; c <= pa.deg_bound(); ++c) {
        const double scale = std::max({1.0, std::abs(pb.coeff(c)), natural});
        worst = std::max(worst, std::abs(pa.coeff(c) - pb.coeff(c)) / scale);
      }
    }
  }
  return worst;
}

template <class F>
IdentityRow run_row(const std::string& name, double tol, const BatteryOptions& opt, F&& one) {
  const auto samples = sweep_parallel(static_cast<std::size_t>(opt.count), one, opt.threads);
  IdentityRow row;
  row.name = name;
  row.instances = opt.count;
  row.tolerance = tol;
  for (const Sample& s : samples) {
    if (s.value >= row.worst) {
      row.worst = s.value;
      if (!s.note.empty()) row.note = s.note;
    }
  }
  row.pass = row.worst <= tol;
  return row;
}

}  // namespace

std::mt19937_64 instance_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

Complex random_complex(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double re = normal(rng);
  const double im = normal(rng);
  return {re, im};
}

MatPoly random_matpoly(int n, int degree, std::mt19937_64& rng) {
  std::vector<CMatrix> mats;
  for (int i = 0; i <= degree; ++i) {
    CMatrix m(n, n);
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < n; ++r) m(r, c) = random_complex(rng);
    mats.push_back(m);
  }
  return MatPoly(std::move(mats));
}

std::vector<IdentityRow> identity_battery(const BatteryOptions& opt) {
  if (opt.count < 1 || opt.min_size < 2 || opt.max_size < opt.min_size || opt.degree < 0)
    throw Error(ErrorKind::InvalidArgument, "identity battery: bad options");
  std::vector<IdentityRow> rows;

  rows.push_back(run_row("weinstein-aronszajn", 1e-8, opt, [&](std::size_t k) {
    auto rng = instance_rng(opt.seed, 1, k);
    const MatPoly a = random_matpoly(size_for(opt, static_cast<int>(k)), opt.degree, rng);
    const Complex zeta = random_complex(rng), eta = random_complex(rng);
    return Sample{std::abs(wa_residual(a, zeta, eta)) / det_scale(a(zeta), eta), {}};
  }));

  auto adj = [&](bool transposed) {
    return [&, transposed](std::size_t k) {
      auto rng = instance_rng(opt.seed, 2, k);
      const MatPoly a = random_matpoly(size_for(opt, static_cast<int>(k)), opt.degree, rng);
      const Complex zeta = random_complex(rng), eta = random_complex(rng);
      const AdjColumnResidual r = adjugate_column_check(a, zeta, eta);
      return Sample{(transposed ? r.transposed : r.column) / r.scale, {}};
    };
  };
  rows.push_back(run_row("adjugate-column", 1e-8, opt, adj(false)));
  rows.push_back(run_row("adjugate-row", 1e-8, opt, adj(true)));

  rows.push_back(run_row("gz-triangular", 1e-12, opt, [&](std::size_t k) {
    auto rng = instance_rng(opt.seed, 3, k);
    const int n = size_for(opt, static_cast<int>(k));
    const MatPoly a = random_matpoly(n, opt.degree, rng);
    std::vector<CMatrix> upper, diag;
    for (const CMatrix& m : a.coeffs()) {
      upper.push_back(m.triangularView<Eigen::Upper>());
      diag.push_back(m.diagonal().asDiagonal());
    }
    double mu = 0.0;
    for (const CMatrix& m : upper) mu += m.norm();
    return Sample{curve_difference(gz_curves(MatPoly(upper)), gz_curves(MatPoly(diag)), mu), {}};
  }));

  rows.push_back(run_row("resultant-degree", 0.0, opt, [&](std::size_t k) {
    auto rng = instance_rng(opt.seed, 4, k);
    const int n = size_for(opt, static_cast<int>(k));
    const MatPoly a = random_matpoly(n, opt.degree, rng);
    const auto curves = gz_curves(a);
    Sample s{-INFINITY, {}};
    for (int m = 1; m < n; ++m) {
      const PolyZ r = resultant_eta(curves[static_cast<std::size_t>(m - 1)], curves[static_cast<std::size_t>(m)]);
      const int bound = opt.degree * m * (m + 1);
      const int excess = r.effective_degree(1e-10) - bound;
      if (excess > s.value) {
        s.value = excess;
        s.note = "m = " + std::to_string(m) + ", degree " + std::to_string(bound + excess) + ", bound " +
                 std::to_string(bound);
      }
    }
    return s;
  }));
  return rows;
}

}  // namespace gltforge
