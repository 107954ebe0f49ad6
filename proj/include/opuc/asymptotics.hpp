#pragma once

// Cesaro means of |phi_k|^2 with the Fejer/Poisson sandwich, CMV Fourier
// coefficients and strong Cesaro deviation, the chi-growth condition, and the
// averaged deviation of phi_k^* D_mu from 1.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <iomanip>
#include <locale>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "opuc/error.hpp"
#include "opuc/measure.hpp"
#include "opuc/parameters.hpp"
#include "opuc/polynomials.hpp"
#include "opuc/szego.hpp"

namespace opuc {

inline constexpr double kSandwichConstant = 64.0;

/// (1/n) sum_{k<n} |phi_k(xi0)|^2.
inline double cesaro_phi_sq(const SchurParameters& params, cplx xi0, std::size_t n) {
  require_boundary(xi0);
  if (n == 0) fail(ErrorKind::InvalidArgument, "n must be at least 1");
  double acc = 0.0;
  for_each_pair(params, xi0, n - 1, [&](std::size_t, cplx p, cplx) { acc += std::norm(p); });
  return acc / static_cast<double>(n);
}

struct ConvergenceRow {
  std::size_t n = 0;
  double cesaro = 0.0;
  double target = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double k_n = 0.0;
  double p_n = 0.0;
  double f_n = 0.0;

  /// The sandwich is only claimed when K_n <= 1.
  bool asserted() const { return k_n <= 1.0; }
  bool holds(double tol = 1e-9) const { return lower <= cesaro + tol && cesaro <= upper + tol; }
};

struct ConvergenceTable {
  cplx xi0;
  std::string family;
  std::size_t grid_size = 0;
  std::vector<double> delta_grid;
  std::vector<ConvergenceRow> rows;
};

/// One row: cesaro mean with lower = 1/F_n and upper = (1 + 64 K_n^{1/4})/P_n.
inline ConvergenceRow mnt_row(const CircleMeasure& mu, const SchurParameters& params, cplx xi0, std::size_t n,
                              std::span<const double> deltas) {
  const auto rec = entropy_record(mu, xi0, n, deltas);
  ConvergenceRow row;
  row.n = n;
  row.cesaro = cesaro_phi_sq(params, xi0, n);
  row.target = 1.0 / density(mu, std::arg(xi0));
  row.k_n = rec.k_n;
  row.p_n = rec.p_n;
  row.f_n = rec.f_n;
  row.lower = 1.0 / rec.f_n;
  row.upper = (1.0 + kSandwichConstant * std::pow(rec.k_n, 0.25)) / rec.p_n;
  return row;
}

inline ConvergenceRow mnt_sandwich(const CircleMeasure& mu, const SchurParameters& params, cplx xi0, std::size_t n,
                                   std::size_t delta_grid_size = kDefaultDeltaGridSize) {
  const auto deltas = delta_grid(delta_grid_size);
  return mnt_row(mu, params, xi0, n, deltas);
}

inline ConvergenceTable mnt_table(const CircleMeasure& mu, const SchurParameters& params, cplx xi0,
                                  std::span<const std::size_t> n_list,
                                  std::size_t delta_grid_size = kDefaultDeltaGridSize) {
  ConvergenceTable table;
  table.xi0 = xi0;
  table.family = mu.family().value_or("custom");
  table.grid_size = mu.grid_size();
  table.delta_grid = delta_grid(delta_grid_size);
  for (std::size_t n : n_list) table.rows.push_back(mnt_row(mu, params, xi0, n, table.delta_grid));
  return table;
}

/// Decimal text with 12 significant digits, independent of the global locale.
inline std::string format_number(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(12) << v;
  return os.str();
}

inline constexpr const char* kConvergenceHeader = "n,cesaro,target,lower,upper,K_n,P_n,F_n";

inline void write_csv(std::ostream& out, const ConvergenceTable& table) {
  out << kConvergenceHeader << '\n';
  for (const auto& r : table.rows) {
    out << r.n << ',' << format_number(r.cesaro) << ',' << format_number(r.target) << ',' << format_number(r.lower)
        << ',' << format_number(r.upper) << ',' << format_number(r.k_n) << ',' << format_number(r.p_n) << ','
        << format_number(r.f_n) << '\n';
  }
}

/// chi_0..chi_{n_max} at every grid node, row-major by node.
inline std::vector<std::vector<cplx>> chi_table(const CircleMeasure& mu, const SchurParameters& params,
                                                std::size_t n_max) {
  std::vector<std::vector<cplx>> out(mu.grid_size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = chi_values(params, mu.node(j), n_max);
  return out;
}

/// c_j = (f, chi_j) in L^2(mu) for j <= n_max, by the trapezoid rule plus atoms.
inline std::vector<cplx> cmv_coefficients(const CircleMeasure& mu, const SchurParameters& params,
                                          const SampledFunction& f, std::size_t n_max) {
  require_aligned(mu, f);
  std::vector<cplx> c(n_max + 1);
  const auto w = mu.weight();
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (w[j] == 0.0) continue;
    const auto chi_j = chi_values(params, mu.node(j), n_max);
    for (std::size_t k = 0; k <= n_max; ++k) c[k] += f.grid[j] * std::conj(chi_j[k]) * w[j];
  }
  for (auto& v : c) v /= static_cast<double>(w.size());
  const auto atoms = mu.atoms();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto chi_a = chi_values(params, unit(atoms[i].angle), n_max);
    for (std::size_t k = 0; k <= n_max; ++k) c[k] += f.atoms[i] * std::conj(chi_a[k]) * atoms[i].mass;
  }
  return c;
}

/// Samples of g on the grid and at the atoms of mu.
template <typename G>
SampledFunction sample(const CircleMeasure& mu, G&& g) {
  SampledFunction out;
  out.grid.resize(mu.grid_size());
  for (std::size_t j = 0; j < out.grid.size(); ++j) out.grid[j] = g(mu.node(j));
  for (const auto& a : mu.atoms()) out.atoms.push_back(g(unit(a.angle)));
  return out;
}

/// (1/n) sum_{k<n} |S_k(f, xi0) - f(xi0)| with S_k = sum_{j<=k} c_j chi_j(xi0).
inline double strong_cesaro_deviation(std::span<const cplx> coefficients, const SchurParameters& params, cplx xi0,
                                      cplx f_at_xi0, std::size_t n) {
  require_boundary(xi0);
  if (n == 0) fail(ErrorKind::InvalidArgument, "n must be at least 1");
  if (coefficients.size() < n) fail(ErrorKind::OutOfRange, "need n CMV coefficients");
  const auto chi_xi = chi_values(params, xi0, n - 1);
  cplx partial{};
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    partial += coefficients[k] * chi_xi[k];
    acc += std::abs(partial - f_at_xi0);
  }
  return acc / static_cast<double>(n);
}

inline double strong_cesaro_deviation(const CircleMeasure& mu, const SchurParameters& params,
                                      const SampledFunction& f, cplx xi0, cplx f_at_xi0, std::size_t n) {
  if (n == 0) fail(ErrorKind::InvalidArgument, "n must be at least 1");
  const auto c = cmv_coefficients(mu, params, f, n - 1);
  return strong_cesaro_deviation(c, params, xi0, f_at_xi0, n);
}

struct ChiGrowth {
  double lhs = 0.0;       // (1/n) sum_{k<=n} |chi_k(xi0)|^2
  double rhs_unit = 0.0;  // 1/P(mu, (1 - 1/n) xi0)
  double ratio() const { return lhs / rhs_unit; }
};

inline ChiGrowth chi_growth(const CircleMeasure& mu, const SchurParameters& params, cplx xi0, std::size_t n) {
  require_boundary(xi0);
  if (n == 0) fail(ErrorKind::InvalidArgument, "n must be at least 1");
  const auto chi_xi = chi_values(params, xi0, n);
  double acc = 0.0;
  for (const auto& v : chi_xi) acc += std::norm(v);
  const double nd = static_cast<double>(n);
  return {acc / nd, 1.0 / poisson(mu, (1.0 - 1.0 / nd) * xi0)};
}

/// max_{1<=k<=n} |S_{k-1} - C_k| / max(1, |C_k|) with S_{k-1} = sum_{j<k} conj(phi_j(0)) phi_j(xi)
/// and C_k = phi_k^*(xi) conj(phi_k^*(0)) - phi_k(xi) conj(phi_k(0)).
inline double kernel_at_zero_residual(const SchurParameters& params, cplx xi, std::size_t n) {
  const auto at_xi = eval_pairs(params, xi, n);
  const auto at_zero = eval_pairs(params, 0.0, n);
  double out = 0.0;
  cplx kernel{};
  for (std::size_t k = 1; k <= n; ++k) {
    kernel += std::conj(at_zero[k - 1].phi) * at_xi[k - 1].phi;
    const cplx closed = at_xi[k].phi_star * std::conj(at_zero[k].phi_star) - at_xi[k].phi * std::conj(at_zero[k].phi);
    out = std::max(out, std::abs(kernel - closed) / std::max(1.0, std::abs(closed)));
  }
  return out;
}

struct PhiStarDeviation {
  double deviation = 0.0;        // (1/n) sum_{k=1..n} |phi_k^*(xi) D(xi) - 1|^2
  double kernel_residual = 0.0;  // kernel_at_zero_residual(params, xi, n)
};

/// Averaged deviation of phi_k^* D_mu from 1 at xi, with the kernel-at-zero check.
inline PhiStarDeviation phi_star_deviation(const CircleMeasure& mu, const SchurParameters& params, cplx xi, std::size_t n) {
  require_szego(mu);
  require_boundary(xi);
  if (n == 0) fail(ErrorKind::InvalidArgument, "n must be at least 1");
  const cplx d = szego_boundary_at(mu, std::arg(xi));
  const auto at_xi = eval_pairs(params, xi, n);
  PhiStarDeviation out;
  for (std::size_t k = 1; k <= n; ++k) out.deviation += std::norm(at_xi[k].phi_star * d - 1.0);
  out.deviation /= static_cast<double>(n);
  out.kernel_residual = kernel_at_zero_residual(params, xi, n);
  return out;
}

}  // namespace opuc
