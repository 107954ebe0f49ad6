#pragma once

// Jost solutions of the transfer-matrix recurrence built from the polynomials
// of mu and of its dual measure nu (Schur function -f), and the duality identity.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "opuc/error.hpp"
#include "opuc/fft.hpp"
#include "opuc/measure.hpp"
#include "opuc/parameters.hpp"
#include "opuc/polynomials.hpp"
#include "opuc/szego.hpp"

namespace opuc {

using Vec2 = std::array<cplx, 2>;

enum class JostSide { Plus, Minus };

struct JostSolution {
  cplx xi;
  JostSide side = JostSide::Plus;
  std::vector<Vec2> entries;  // n = 0..n_max
};

/// Caratheodory boundary values F_mu(xi_j) = w_j + i (conjugate of w)_j plus
/// the purely imaginary atom terms.
inline std::vector<cplx> caratheodory_boundary(const CircleMeasure& mu) {
  auto f = fft::series_on_grid(mu.weight_herglotz(), mu.grid_size());
  const auto w = mu.weight();
  for (std::size_t j = 0; j < f.size(); ++j) {
    f[j] = cplx(w[j], f[j].imag());
    for (const auto& a : mu.atoms()) {
      const cplx xa = unit(a.angle);
      const cplx xi = mu.node(j);
      if (std::abs(xa - xi) > 0.0) f[j] += a.mass * cplx(0.0, ((xa + xi) / (xa - xi)).imag());
    }
  }
  return f;
}

/// Absolutely continuous part of the dual measure: v = Re(1/F_mu) on the grid.
inline CircleMeasure dual_measure(const CircleMeasure& mu) {
  const auto f = caratheodory_boundary(mu);
  std::vector<double> v(f.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = std::max(0.0, (1.0 / f[j]).real());
  MeasureOptions options;
  options.family = "dual of " + mu.family().value_or("custom");
  return build_measure(v, {}, true, options);
}

/// T_n v with T_n = rho_n^{-1} [[z, -conj(a_n)], [-a_n z, 1]].
inline Vec2 transfer(const SchurParameters& params, std::size_t n, cplx z, const Vec2& v) {
  const cplx a = params[n];
  const double inv_rho = 1.0 / params.rho(n);
  return {(z * v[0] - std::conj(a) * v[1]) * inv_rho, (-a * z * v[0] + v[1]) * inv_rho};
}

struct JostPair {
  JostSolution plus;
  JostSolution minus;
};

/// f_+ = (1/2) D_mu^{-1} [(psi_n, -psi_n^*) + F (phi_n, phi_n^*)],
/// f_- = -(1/2) conj(D_mu^{-1}) [(psi_n, -psi_n^*) - conj(F) (phi_n, phi_n^*)], F = D_mu/D_nu.
inline JostPair jost_solutions(const cplx d_mu, const cplx d_nu, const SchurParameters& params, cplx xi,
                               std::size_t n_max) {
  require_boundary(xi);
  const auto phi = eval_pairs(params, xi, n_max);
  const auto psi = eval_pairs(dual_parameters(params), xi, n_max);
  const cplx f = d_mu / d_nu;
  const cplx inv = 1.0 / d_mu;
  JostPair out{{xi, JostSide::Plus, {}}, {xi, JostSide::Minus, {}}};
  out.plus.entries.reserve(n_max + 1);
  out.minus.entries.reserve(n_max + 1);
  for (std::size_t n = 0; n <= n_max; ++n) {
    const Vec2 s{psi[n].phi, -psi[n].phi_star};
    const Vec2 p{phi[n].phi, phi[n].phi_star};
    out.plus.entries.push_back({0.5 * inv * (s[0] + f * p[0]), 0.5 * inv * (s[1] + f * p[1])});
    out.minus.entries.push_back({-0.5 * std::conj(inv) * (s[0] - std::conj(f) * p[0]),
                                 -0.5 * std::conj(inv) * (s[1] - std::conj(f) * p[1])});
  }
  return out;
}

inline JostPair jost_solutions(const CircleMeasure& mu, const CircleMeasure& nu, const SchurParameters& params,
                               cplx xi, std::size_t n_max) {
  const double theta = std::arg(xi);
  return jost_solutions(szego_boundary_at(mu, theta), szego_boundary_at(nu, theta), params, xi, n_max);
}

inline JostPair jost_solutions(const CircleMeasure& mu, const SchurParameters& params, cplx xi, std::size_t n_max) {
  require_szego(mu);
  return jost_solutions(mu, dual_measure(mu), params, xi, n_max);
}

/// max_n |entry_{n+1} - T_n entry_n|.
inline double recurrence_residual(const JostSolution& s, const SchurParameters& params) {
  double out = 0.0;
  for (std::size_t n = 0; n + 1 < s.entries.size(); ++n) {
    const Vec2 t = transfer(params, n, s.xi, s.entries[n]);
    out = std::max(out, std::hypot(std::abs(t[0] - s.entries[n + 1][0]), std::abs(t[1] - s.entries[n + 1][1])));
  }
  return out;
}

/// (1/n) sum_{k<n} |f(k) - target_k| with target (xi^k, 0) for f_+ and (0, 1) for f_-.
inline double averaged_jost_deviation(const JostSolution& s, std::size_t n) {
  if (n == 0) fail(ErrorKind::InvalidArgument, "n must be at least 1");
  if (n > s.entries.size()) fail(ErrorKind::OutOfRange, "solution is shorter than n");
  double acc = 0.0;
  cplx power = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 target = s.side == JostSide::Plus ? Vec2{power, 0.0} : Vec2{0.0, 1.0};
    acc += std::hypot(std::abs(s.entries[k][0] - target[0]), std::abs(s.entries[k][1] - target[1]));
    power *= s.xi;
  }
  return acc / static_cast<double>(n);
}

struct DualityResidual {
  double polynomial = 0.0;  // max |Re(phi_n^* conj(psi_n^*)) - 1| over grid, n <= n_check
  double limit = 0.0;       // max |Re(D_mu^{-1} conj(D_nu^{-1})) - 1| over grid
};

inline DualityResidual duality_identity_residual(const CircleMeasure& mu, const CircleMeasure& nu,
                                                 const SchurParameters& params, std::size_t n_check) {
  require_szego(mu);
  require_szego(nu);
  require_aligned(mu, SampledFunction{std::vector<cplx>(nu.grid_size()), std::vector<cplx>(mu.atoms().size())});
  const auto dual = dual_parameters(params);
  const auto d_mu = szego_boundary(mu);
  const auto d_nu = szego_boundary(nu);
  DualityResidual out;
  for (std::size_t j = 0; j < mu.grid_size(); ++j) {
    const cplx xi = mu.node(j);
    const auto phi = eval_pairs(params, xi, n_check);
    const auto psi = eval_pairs(dual, xi, n_check);
    for (std::size_t n = 0; n <= n_check; ++n) {
      out.polynomial = std::max(out.polynomial, std::abs((phi[n].phi_star * std::conj(psi[n].phi_star)).real() - 1.0));
    }
    out.limit = std::max(out.limit, std::abs((1.0 / d_mu[j] * std::conj(1.0 / d_nu[j])).real() - 1.0));
  }
  return out;
}

inline DualityResidual duality_identity_residual(const CircleMeasure& mu, const SchurParameters& params,
                                                 std::size_t n_check) {
  return duality_identity_residual(mu, dual_measure(mu), params, n_check);
}

}  // namespace opuc
