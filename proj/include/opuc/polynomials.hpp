#pragma once

// Orthonormal polynomials on the unit circle: moment (Levinson-type)
// recursion for the parameters, transfer-matrix evaluation of
// (phi_n, phi_n^*), the CMV basis, and both Christoffel-Darboux kernels.
//
// Sign convention: Xi_{n+1} = T_n Xi_n with
//   T_n = rho_n^{-1} [[z, -conj(a_n)], [-a_n z, 1]],
// i.e. Phi_{n+1} = z Phi_n - conj(a_n) Phi_n^* for the monic polynomials.

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "opuc/error.hpp"
#include "opuc/measure.hpp"
#include "opuc/parameters.hpp"
#include "opuc/szego.hpp"

namespace opuc {

inline constexpr std::size_t kDefaultMaxOrder = 512;
inline constexpr double kConfluentThreshold = 1e-8;
inline constexpr std::size_t kExtendedPrecisionDegree = 128;

struct PolynomialPair {
  std::size_t n = 0;
  cplx phi{1.0, 0.0};
  cplx phi_star{1.0, 0.0};
  cplx z{};
};

/// Coefficient rows of the monic Phi_n (index = power) with ||Phi_n||^2.
struct MonicTable {
  std::vector<std::vector<cplx>> rows;
  std::vector<double> norm_sq;
};

namespace detail {

// <z^j, 1> in L^2(mu) read from the moments: conj(c_j).
inline cplx monomial_against_one(std::span<const cplx> c, std::size_t j) { return std::conj(c[j]); }

template <typename Visit>
SchurParameters levinson(std::span<const cplx> c, std::size_t n_max, Visit&& visit) {
  if (c.size() < n_max + 1) fail(ErrorKind::InvalidArgument, "need at least n_max + 1 moments");
  if (std::abs(c[0] - 1.0) > 1e-10) fail(ErrorKind::BadNormalization, "c_0 must equal 1");
  std::vector<cplx> phi{1.0};
  std::vector<cplx> a;
  a.reserve(n_max);
  for (std::size_t n = 0; n < n_max; ++n) {
    // <z Phi_n, 1> and <Phi_n^*, 1>, with Phi_n^*(z) = sum_j conj(Phi_{n, n-j}) z^j.
    cplx shifted{};
    cplx reflected{};
    for (std::size_t j = 0; j <= n; ++j) {
      shifted += phi[j] * monomial_against_one(c, j + 1);
      reflected += std::conj(phi[n - j]) * monomial_against_one(c, j);
    }
    if (!(reflected.real() > 0.0)) fail(ErrorKind::PositivityLoss, "Toeplitz form is not positive definite");
    visit(phi, reflected.real());
    const cplx abar = shifted / reflected.real();
    if (std::abs(abar) > kParameterEscape) {
      fail(ErrorKind::PositivityLoss, "parameter " + std::to_string(n) + " reached the unit circle");
    }
    a.push_back(std::conj(abar));
    std::vector<cplx> next(n + 2);
    for (std::size_t j = 0; j <= n; ++j) {
      next[j + 1] += phi[j];
      next[j] -= abar * std::conj(phi[n - j]);
    }
    phi = std::move(next);
  }
  cplx last{};
  for (std::size_t j = 0; j <= n_max; ++j) last += std::conj(phi[n_max - j]) * monomial_against_one(c, j);
  if (!(last.real() > 0.0)) fail(ErrorKind::PositivityLoss, "Toeplitz form is not positive definite");
  visit(phi, last.real());
  return SchurParameters(std::move(a));
}

}  // namespace detail

/// Parameters a_0..a_{n_max-1} from moments c_0..c_{n_max}, where
/// conj(a_n) = <z Phi_n, 1> / <Phi_n^*, 1>.
inline SchurParameters verblunsky_from_moments(std::span<const cplx> moments, std::size_t n_max) {
  return detail::levinson(moments, n_max, [](const std::vector<cplx>&, double) {});
}

/// Inverse recursion: c_0..c_{count-1} of the measure with parameters a_0..a_{count-2},
/// from conj(c_{n+1}) = conj(a_n) ||Phi_n||^2 - sum_{j<n} Phi_{n,j} conj(c_{j+1}).
inline std::vector<cplx> moments_from_parameters(const SchurParameters& params, std::size_t count) {
  using C = std::complex<long double>;
  if (count == 0) return {};
  if (params.size() + 1 < count) fail(ErrorKind::OutOfRange, "need count - 1 parameters");
  std::vector<C> c(count);
  c[0] = 1.0L;
  std::vector<C> phi{C(1.0L)};
  long double norm_sq = 1.0L;
  for (std::size_t n = 0; n + 1 < count; ++n) {
    const C a(params[n].real(), params[n].imag());
    C partial{};
    for (std::size_t j = 0; j < n; ++j) partial += phi[j] * std::conj(c[j + 1]);
    c[n + 1] = std::conj(std::conj(a) * norm_sq - partial);
    std::vector<C> next(n + 2);
    for (std::size_t j = 0; j <= n; ++j) {
      next[j + 1] += phi[j];
      next[j] -= std::conj(a) * std::conj(phi[n - j]);
    }
    phi = std::move(next);
    norm_sq *= (1.0L - std::abs(a)) * (1.0L + std::abs(a));
  }
  std::vector<cplx> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = cplx(static_cast<double>(c[k].real()), static_cast<double>(c[k].imag()));
  return out;
}

/// Same recursion, keeping the monic rows Phi_0..Phi_{n_max} (O(n_max^2) memory).
inline MonicTable monic_table(std::span<const cplx> moments, std::size_t n_max,
                              std::size_t max_order = kDefaultMaxOrder) {
  if (n_max > max_order) fail(ErrorKind::OutOfRange, "monic table order exceeds the configured cap");
  MonicTable table;
  detail::levinson(moments, n_max, [&](const std::vector<cplx>& row, double norm_sq) {
    table.rows.push_back(row);
    table.norm_sq.push_back(norm_sq);
  });
  return table;
}

namespace detail {

template <typename Real, typename Visit>
void transfer_sweep(const SchurParameters& params, cplx z_in, std::size_t n, Visit&& visit) {
  using C = std::complex<Real>;
  const C z(static_cast<Real>(z_in.real()), static_cast<Real>(z_in.imag()));
  C phi(1), phi_star(1);
  visit(std::size_t{0}, cplx(1.0), cplx(1.0));
  for (std::size_t k = 0; k < n; ++k) {
    const C a(static_cast<Real>(params[k].real()), static_cast<Real>(params[k].imag()));
    const Real inv_rho = Real(1) / std::sqrt((Real(1) - std::abs(a)) * (Real(1) + std::abs(a)));
    const C next_phi = (z * phi - std::conj(a) * phi_star) * inv_rho;
    const C next_star = (-a * z * phi + phi_star) * inv_rho;
    phi = next_phi;
    phi_star = next_star;
    visit(k + 1, cplx(static_cast<double>(phi.real()), static_cast<double>(phi.imag())),
          cplx(static_cast<double>(phi_star.real()), static_cast<double>(phi_star.imag())));
  }
}

}  // namespace detail

/// Calls visit(k, phi_k(z), phi_k^*(z)) for k = 0..n. Extended precision past degree 128.
template <typename Visit>
void for_each_pair(const SchurParameters& params, cplx z, std::size_t n, Visit&& visit) {
  if (n > params.size()) fail(ErrorKind::OutOfRange, "degree exceeds the number of stored parameters");
  if (n > kExtendedPrecisionDegree) {
    detail::transfer_sweep<long double>(params, z, n, visit);
  } else {
    detail::transfer_sweep<double>(params, z, n, visit);
  }
}

inline PolynomialPair eval_pair(const SchurParameters& params, cplx z, std::size_t n) {
  PolynomialPair out;
  out.n = n;
  out.z = z;
  for_each_pair(params, z, n, [&](std::size_t k, cplx p, cplx ps) {
    if (k == n) {
      out.phi = p;
      out.phi_star = ps;
    }
  });
  return out;
}

inline std::vector<PolynomialPair> eval_pairs(const SchurParameters& params, cplx z, std::size_t n) {
  std::vector<PolynomialPair> out;
  out.reserve(n + 1);
  for_each_pair(params, z, n, [&](std::size_t k, cplx p, cplx ps) { out.push_back({k, p, ps, z}); });
  return out;
}

/// chi_k(xi) from a pair at the same point: chi_{2m} = conj(xi)^m phi_{2m}^*, chi_{2m+1} = conj(xi)^m phi_{2m+1}.
inline cplx chi_from_pair(const PolynomialPair& pair, cplx xi) {
  const std::size_t m = pair.n / 2;
  const cplx prefactor = std::pow(std::conj(xi), static_cast<int>(m));
  return pair.n % 2 == 0 ? prefactor * pair.phi_star : prefactor * pair.phi;
}

inline cplx chi(const SchurParameters& params, cplx xi, std::size_t n) {
  require_boundary(xi);
  return chi_from_pair(eval_pair(params, xi, n), xi);
}

/// chi_0(xi)..chi_n(xi).
inline std::vector<cplx> chi_values(const SchurParameters& params, cplx xi, std::size_t n) {
  require_boundary(xi);
  std::vector<cplx> out;
  out.reserve(n + 1);
  cplx prefactor = 1.0;
  const cplx step = std::conj(xi);
  for_each_pair(params, xi, n, [&](std::size_t k, cplx p, cplx ps) {
    if (k % 2 == 0) {
      if (k > 0) prefactor *= step;
      out.push_back(prefactor * ps);
    } else {
      out.push_back(prefactor * p);
    }
  });
  return out;
}

/// sum_{k<=n} conj(phi_k(xi)) phi_k(z).
inline cplx cd_kernel_direct(const SchurParameters& params, cplx xi, cplx z, std::size_t n) {
  const auto at_xi = eval_pairs(params, xi, n);
  const auto at_z = eval_pairs(params, z, n);
  cplx acc{};
  for (std::size_t k = 0; k <= n; ++k) acc += std::conj(at_xi[k].phi) * at_z[k].phi;
  return acc;
}

/// Reproducing kernel of P_n at xi evaluated at z, in Christoffel-Darboux form;
/// falls back to the direct sum when |1 - conj(xi) z| < 1e-8.
inline cplx cd_kernel_poly(const SchurParameters& params, cplx xi, cplx z, std::size_t n) {
  const cplx denom = 1.0 - std::conj(xi) * z;
  if (std::abs(denom) < kConfluentThreshold) return cd_kernel_direct(params, xi, z, n);
  const auto p_xi = eval_pair(params, xi, n + 1);
  const auto p_z = eval_pair(params, z, n + 1);
  return (p_z.phi_star * std::conj(p_xi.phi_star) - p_z.phi * std::conj(p_xi.phi)) / denom;
}

/// sum_{k<=n} conj(chi_k(xi)) chi_k(z) for boundary points.
inline cplx cd_kernel_cmv_direct(const SchurParameters& params, cplx xi, cplx z, std::size_t n) {
  const auto c_xi = chi_values(params, xi, n);
  const auto c_z = chi_values(params, z, n);
  cplx acc{};
  for (std::size_t k = 0; k <= n; ++k) acc += std::conj(c_xi[k]) * c_z[k];
  return acc;
}

/// Reproducing kernel of L_n = span{chi_0..chi_n} at xi, evaluated at z (both on
/// the circle), through chi_{n+1} with the parity-dependent closed form.
inline cplx cd_kernel_cmv(const SchurParameters& params, cplx xi, cplx z, std::size_t n) {
  require_boundary(xi);
  require_boundary(z);
  const cplx denom = 1.0 - std::conj(xi) * z;
  if (std::abs(denom) < kConfluentThreshold) return cd_kernel_cmv_direct(params, xi, z, n);
  const cplx cz = chi(params, z, n + 1);
  const cplx cx = chi(params, xi, n + 1);
  if (n % 2 == 0) {
    return (z * std::conj(cz * xi) * cx - cz * std::conj(cx)) / denom;
  }
  return (z * cz * std::conj(xi * cx) - z * std::conj(cz * xi) * cx) / denom;
}

struct BoundPair {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// |phi_n^*(r xi)| against ((1 + r)/2)^n |phi_n^*(xi)|; the first dominates for zero-free phi_n^*.
inline BoundPair mate_nevai_lower(const SchurParameters& params, cplx xi, double r, std::size_t n) {
  require_boundary(xi);
  if (r < 0.0 || r > 1.0) fail(ErrorKind::InvalidArgument, "radius must lie in [0, 1]");
  const double inner = std::abs(eval_pair(params, r * xi, n).phi_star);
  const double outer = std::abs(eval_pair(params, xi, n).phi_star);
  return {inner, std::pow(0.5 * (1.0 + r), static_cast<double>(n)) * outer};
}

/// integral |phi_n^* - 1/D_mu|^2 w dm on the grid.
inline double phi_star_l2_residual(const CircleMeasure& mu, const SchurParameters& params, std::size_t n) {
  const auto d = szego_boundary(mu);
  const auto w = mu.weight();
  double acc = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const cplx ps = eval_pair(params, mu.node(j), n).phi_star;
    acc += std::norm(ps - 1.0 / d[j]) * w[j];
  }
  return acc / static_cast<double>(w.size());
}

}  // namespace opuc
