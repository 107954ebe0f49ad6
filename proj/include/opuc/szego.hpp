#pragma once

// Szego (outer) function D_mu, the entropy function K(mu, z), and the
// per-n quantities K_n, P_n, F_n at a boundary point.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <vector>

#include "opuc/error.hpp"
#include "opuc/fft.hpp"
#include "opuc/measure.hpp"

namespace opuc {

inline constexpr double kEntropyFloor = -1e-10;
inline constexpr std::size_t kDefaultDeltaGridSize = 64;
inline constexpr double kDeltaMin = 1e-4;

/// D_mu(z) = exp( (1/2) integral log w (1 + conj(xi) z)/(1 - conj(xi) z) dm ).
inline cplx szego_interior(const CircleMeasure& mu, cplx z) {
  require_szego(mu);
  require_interior(z);
  return std::exp(0.5 * detail::horner(mu.log_weight_herglotz(), z));
}

/// Boundary values D_mu(xi_j) on the grid: modulus sqrt(w_j), phase half the
/// discrete conjugate function of log w (zero mean, so D_mu(0) > 0).
inline std::vector<cplx> szego_boundary(const CircleMeasure& mu) {
  require_szego(mu);
  const std::size_t n = mu.grid_size();
  const auto series = fft::series_on_grid(mu.log_weight_herglotz(), n);
  std::vector<cplx> d(n);
  const auto w = mu.weight();
  for (std::size_t j = 0; j < n; ++j) d[j] = std::polar(std::sqrt(w[j]), 0.5 * series[j].imag());
  return d;
}

/// Boundary value of D_mu at an arbitrary angle, from the same series as szego_boundary.
inline cplx szego_boundary_at(const CircleMeasure& mu, double theta) {
  require_szego(mu);
  return std::exp(0.5 * detail::horner(mu.log_weight_herglotz(), unit(theta)));
}

/// K(mu, z) = log P(mu, z) - P(log w, z). Values in [-1e-10, 0) are reported as 0.
inline double entropy(const CircleMeasure& mu, cplx z) {
  require_szego(mu);
  require_interior(z);
  const double k = std::log(poisson(mu, z)) - poisson_log_weight(mu, z);
  if (k < kEntropyFloor) fail(ErrorKind::PositivityLoss, "entropy below tolerance floor: " + std::to_string(k));
  return std::max(k, 0.0);
}

struct EntropyRecord {
  std::size_t n = 0;
  double k_n = 0.0;  // sup over delta of K(mu, (1 - delta/n) xi0)
  double p_n = 0.0;  // inf over delta of P(mu, (1 - delta/n) xi0)
  double f_n = 0.0;  // Fejer mean of order n-1 at xi0
};

struct EntropyProfile {
  cplx xi0;
  std::vector<double> delta_grid;
  std::vector<EntropyRecord> records;
};

/// Log-spaced delta values spanning [1e-4, 1 - 1e-4].
inline std::vector<double> delta_grid(std::size_t size = kDefaultDeltaGridSize) {
  if (size < 2) fail(ErrorKind::InvalidArgument, "delta grid needs at least two points");
  std::vector<double> grid(size);
  const double lo = std::log(kDeltaMin);
  const double hi = std::log(1.0 - kDeltaMin);
  for (std::size_t i = 0; i < size; ++i) {
    grid[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(size - 1));
  }
  return grid;
}

inline EntropyRecord entropy_record(const CircleMeasure& mu, cplx xi0, std::size_t n, std::span<const double> deltas) {
  require_boundary(xi0);
  if (n == 0) fail(ErrorKind::InvalidArgument, "n must be at least 1");
  EntropyRecord rec;
  rec.n = n;
  rec.k_n = 0.0;
  rec.p_n = std::numeric_limits<double>::infinity();
  for (double delta : deltas) {
    const cplx z = (1.0 - delta / static_cast<double>(n)) * xi0;
    rec.k_n = std::max(rec.k_n, entropy(mu, z));
    rec.p_n = std::min(rec.p_n, poisson(mu, z));
  }
  rec.f_n = fejer_mean(mu, xi0, n);
  return rec;
}

inline EntropyProfile entropy_profile(const CircleMeasure& mu, cplx xi0, std::span<const std::size_t> n_list,
                                      std::size_t delta_grid_size = kDefaultDeltaGridSize) {
  EntropyProfile profile;
  profile.xi0 = xi0;
  profile.delta_grid = delta_grid(delta_grid_size);
  profile.records.reserve(n_list.size());
  for (std::size_t n : n_list) profile.records.push_back(entropy_record(mu, xi0, n, profile.delta_grid));
  return profile;
}

}  // namespace opuc
