#pragma once

// Caratheodory and Schur functions, the Schur algorithm on truncated series,
// pointwise Schur iterates, and the product identities they satisfy.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "opuc/error.hpp"
#include "opuc/measure.hpp"
#include "opuc/parameters.hpp"
#include "opuc/polynomials.hpp"
#include "opuc/series.hpp"

namespace opuc {

inline constexpr double kMinIterateArgument = 1e-3;
inline constexpr double kContractivitySlack = 1e-10;
inline constexpr std::size_t kSeriesGuard = 8;
inline constexpr double kDegenerateDenominator = 1e-12;

/// F(z) = 1 + 2 sum_{k>=1} c_k z^k from c_0..c_M.
inline TaylorSeries caratheodory_series(std::span<const cplx> moments) {
  if (moments.empty()) fail(ErrorKind::InvalidArgument, "no moments given");
  if (std::abs(moments[0] - 1.0) > 1e-10) fail(ErrorKind::BadNormalization, "c_0 must equal 1");
  std::vector<cplx> f(moments.size());
  f[0] = 1.0;
  for (std::size_t k = 1; k < moments.size(); ++k) f[k] = 2.0 * moments[k];
  return TaylorSeries(std::move(f));
}

/// f with z f = (F - 1)/(F + 1), one order below F.
inline TaylorSeries schur_series(const TaylorSeries& caratheodory) {
  if (std::abs(caratheodory[0] - 1.0) > 1e-10) fail(ErrorKind::BadNormalization, "F(0) must equal 1");
  if (caratheodory.truncation_order() == 0) fail(ErrorKind::OutOfRange, "need F to order at least 1");
  return divide(caratheodory - 1.0, caratheodory + 1.0).shift_down();
}

/// a_0..a_{n_max-1} as constant terms of the series Schur iterates.
inline SchurParameters schur_parameters_from_series(const TaylorSeries& f, std::size_t n_max) {
  if (n_max > f.truncation_order()) {
    fail(ErrorKind::OutOfRange, "series order " + std::to_string(f.truncation_order()) + " too short for " +
                                    std::to_string(n_max) + " parameters");
  }
  std::vector<cplx> a;
  a.reserve(n_max);
  TaylorSeries current = f;
  for (std::size_t n = 0; n < n_max; ++n) {
    const cplx an = current[0];
    if (std::abs(an) > kParameterEscape) {
      fail(ErrorKind::ParameterEscape, "Schur parameter " + std::to_string(n) + " reached the unit circle");
    }
    a.push_back(an);
    if (n + 1 == n_max) break;
    // 1 - conj(a_n) f_n
    std::vector<cplx> d(current.coefficients().begin(), current.coefficients().end());
    for (auto& v : d) v *= -std::conj(an);
    d[0] += 1.0;
    current = divide(current - an, TaylorSeries(std::move(d))).shift_down();
  }
  return SchurParameters(std::move(a));
}

/// Moments c_0..c_{n+guard} through the series route.
inline SchurParameters schur_parameters_from_moments(std::span<const cplx> moments, std::size_t n_max) {
  if (moments.size() < n_max + kSeriesGuard + 1) {
    fail(ErrorKind::InvalidArgument, "series route needs n_max + 8 + 1 moments");
  }
  return schur_parameters_from_series(schur_series(caratheodory_series(moments)), n_max);
}

namespace detail {

inline cplx forward_step(cplx fk, cplx ak, cplx z) { return (fk - ak) / ((1.0 - std::conj(ak) * fk) * z); }

inline void check_contractive(cplx v, std::size_t k) {
  if (!(std::abs(v) < 1.0 + kContractivitySlack)) {
    fail(ErrorKind::ContractivityLoss, "Schur iterate " + std::to_string(k) + " left the unit disk");
  }
}

}  // namespace detail

/// f_0(z)..f_n(z) by the forward recursion from f(z). Rounding grows like |z|^{-k},
/// so keep n small.
inline std::vector<cplx> schur_iterates_forward(const SchurParameters& params, cplx f_value, cplx z, std::size_t n) {
  if (std::abs(z) < kMinIterateArgument) fail(ErrorKind::NearZeroArgument, "|z| below 1e-3");
  require_interior(z);
  if (n > params.size()) fail(ErrorKind::OutOfRange, "not enough parameters for the requested depth");
  std::vector<cplx> out{f_value};
  detail::check_contractive(f_value, 0);
  for (std::size_t k = 0; k < n; ++k) {
    out.push_back(detail::forward_step(out.back(), params[k], z));
    detail::check_contractive(out.back(), k + 1);
  }
  return out;
}

inline cplx schur_iterate_eval(const SchurParameters& params, cplx f_value, cplx z, std::size_t n) {
  return schur_iterates_forward(params, f_value, z, n).back();
}

/// f_0(z)..f_{count-1}(z) by the backward recursion
/// f_k = (a_k + z f_{k+1}) / (1 + conj(a_k) z f_{k+1}) from f_L = 0, L = params.size().
/// Exact when the parameters vanish beyond L; otherwise the error is O(|z|^{L-k}).
inline std::vector<cplx> schur_iterates(const SchurParameters& params, cplx z, std::size_t count) {
  require_interior(z);
  const std::size_t total = params.size();
  if (count > total + 1) fail(ErrorKind::OutOfRange, "not enough parameters for the requested depth");
  std::vector<cplx> f(total + 1);
  f[total] = 0.0;
  for (std::size_t k = total; k-- > 0;) {
    const cplx zf = z * f[k + 1];
    f[k] = (params[k] + zf) / (1.0 + std::conj(params[k]) * zf);
  }
  f.resize(count);
  return f;
}

/// f(z) from the Caratheodory function of mu; the series route near the origin.
inline cplx schur_value(const CircleMeasure& mu, cplx z) {
  require_interior(z);
  if (std::abs(z) < kMinIterateArgument) {
    const std::size_t order = std::min<std::size_t>(max_trusted_moment(mu), 32);
    const auto c = moments(mu, order + 1);
    auto scaled = c;
    for (auto& v : scaled) v /= c[0].real();
    return schur_series(caratheodory_series(scaled)).evaluate(z);
  }
  cplx f = detail::horner(mu.weight_herglotz(), z);
  for (const auto& a : mu.atoms()) {
    const cplx xi = unit(a.angle);
    f += a.mass * (xi + z) / (xi - z);
  }
  return (f - 1.0) / (z * (f + 1.0));
}

/// |integral log w dm - sum_{k<n} log(1 - |a_k|^2)|.
inline double szego_formula_residual(const CircleMeasure& mu, const SchurParameters& params, std::size_t n) {
  require_szego(mu);
  if (n > params.size()) fail(ErrorKind::OutOfRange, "not enough parameters");
  const double lhs = mu.log_weight_herglotz()[0].real();
  double rhs = 0.0;
  for (std::size_t k = 0; k < n; ++k) rhs += 2.0 * std::log(params.rho(k));
  return std::abs(lhs - rhs);
}

/// log prod_{k<n} (1 - |z f_k|^2)/(1 - |f_k|^2) from iterates f_0..f_{n-1}.
inline double entropy_product(std::span<const cplx> iterates, cplx z, std::size_t n) {
  if (n > iterates.size()) fail(ErrorKind::OutOfRange, "not enough iterates");
  double acc = 0.0;
  const double z2 = std::norm(z);
  for (std::size_t k = 0; k < n; ++k) {
    const double m = std::norm(iterates[k]);
    if (!(m < 1.0)) fail(ErrorKind::ContractivityLoss, "iterate on or outside the unit circle");
    const double term = std::log1p(-z2 * m) - std::log1p(-m);
    if (term < std::log1p(-1e-12)) fail(ErrorKind::PositivityLoss, "entropy factor below one");
    acc += term;
  }
  return acc;
}

inline double entropy_product(const SchurParameters& params, cplx z, std::size_t n) {
  return entropy_product(schur_iterates(params, z, n), z, n);
}

/// Partial product from a given f(z), iterating forward.
inline double entropy_product(const SchurParameters& params, cplx z, cplx f_value, std::size_t n) {
  if (n == 0) return 0.0;
  return entropy_product(schur_iterates_forward(params, f_value, z, n - 1), z, n);
}

/// lhs = (1 - |z|^2) sum_{k<n} |f_k|^2/(1 - |f_k|^2), rhs = e^K - 1.
inline BoundPair schur_sum_bound(std::span<const cplx> iterates, cplx z, std::size_t n, double entropy_value) {
  if (n > iterates.size()) fail(ErrorKind::OutOfRange, "not enough iterates");
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double m = std::norm(iterates[k]);
    acc += m / (1.0 - m);
  }
  return {(1.0 - std::norm(z)) * acc, std::expm1(entropy_value)};
}

/// rhs computed from the full product over every stored parameter.
inline BoundPair schur_sum_bound(const SchurParameters& params, cplx z, std::size_t n) {
  const auto f = schur_iterates(params, z, params.size());
  return schur_sum_bound(f, z, n, entropy_product(f, z, params.size()));
}

/// (1 - |z b_n f_n|^2) / |1 - z b_n f_n|^2 with b_n = phi_n/phi_n^*.
inline double khrushchev_rhs(const SchurParameters& params, cplx z, cplx fn_value, std::size_t n) {
  require_interior(z);
  const auto pair = eval_pair(params, z, n);
  const cplx q = z * (pair.phi / pair.phi_star) * fn_value;
  const double denom = std::norm(1.0 - q);
  if (std::sqrt(denom) < kDegenerateDenominator) fail(ErrorKind::DegenerateDenominator, "|1 - z b_n f_n| too small");
  return (1.0 - std::norm(q)) / denom;
}

inline double khrushchev_rhs(const SchurParameters& params, cplx z, std::size_t n) {
  return khrushchev_rhs(params, z, schur_iterates(params, z, n + 1)[n], n);
}

}  // namespace opuc
