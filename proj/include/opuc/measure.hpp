#pragma once

// Probability measures mu = w dm + mu_s on the unit circle, with w sampled on the
// uniform grid theta_j = 2 pi j / N and mu_s a finite sum of atoms.
//
// Integrals of the density are taken against the trigonometric interpolant of
// the samples. For kernels that are smooth on the grid scale this coincides
// with the periodic trapezoid rule (the two differ by O(|z|^N)); close to the
// boundary it stays exact for the interpolant where the trapezoid rule would
// alias. Atom contributions are always added in closed form.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "opuc/error.hpp"
#include "opuc/fft.hpp"

namespace opuc {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kDefaultWeightFloor = 1e-14;
inline constexpr double kBoundaryExclusion = 1e-12;
inline constexpr double kNormalizationTolerance = 1e-12;
inline constexpr std::size_t kDefaultGridSize = 4096;

struct Atom {
  double angle = 0.0;  // in [0, 2 pi)
  double mass = 0.0;   // > 0
};

/// Values of a function on a measure's support: one per grid node, one per atom.
struct SampledFunction {
  std::vector<cplx> grid;
  std::vector<cplx> atoms;
};

struct MeasureOptions {
  double weight_floor = kDefaultWeightFloor;
  std::optional<std::string> family;
  // Moments c_0, c_1, ... known independently of the grid (e.g. from parameters);
  // used by moments() in place of the grid transform up to their length.
  std::vector<cplx> analytic_moments;
};

inline cplx unit(double angle) { return std::polar(1.0, angle); }

inline double wrap_angle(double angle) {
  double a = std::fmod(angle, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

namespace detail {

// Coefficients h_k of the analytic function sum_k h_k z^k whose real part on the
// circle is the trigonometric interpolant of the samples `values`.
inline std::vector<cplx> herglotz_coefficients(std::span<const double> values) {
  const std::size_t n = values.size();
  auto spectrum = fft::real_forward(values);
  std::vector<cplx> h(spectrum.size());
  h[0] = cplx(spectrum[0].real(), 0.0);
  for (std::size_t k = 1; k < spectrum.size(); ++k) {
    const bool nyquist = (n % 2 == 0) && (k == n / 2);
    h[k] = nyquist ? cplx(spectrum[k].real(), 0.0) : 2.0 * spectrum[k];
  }
  return h;
}

inline cplx horner(std::span<const cplx> coefficients, cplx z) {
  cplx acc{};
  for (std::size_t k = coefficients.size(); k-- > 0;) acc = acc * z + coefficients[k];
  return acc;
}

}  // namespace detail

class CircleMeasure {
 public:
  std::size_t grid_size() const { return data_->weight.size(); }
  std::span<const double> weight() const { return data_->weight; }
  std::span<const Atom> atoms() const { return data_->atoms; }
  double total_mass() const { return data_->total_mass; }
  double weight_floor() const { return data_->weight_floor; }
  const std::optional<std::string>& family() const { return data_->family; }

  /// True when every weight sample is at least the weight floor (log w usable).
  bool is_szego() const { return data_->szego; }

  double angle(std::size_t j) const { return kTwoPi * static_cast<double>(j) / static_cast<double>(grid_size()); }
  cplx node(std::size_t j) const { return unit(angle(j)); }

  /// Analytic coefficients of the grid part: Re sum h_k z^k is the Poisson extension of w.
  std::span<const cplx> weight_herglotz() const { return data_->weight_herglotz; }

  /// Same for log w; empty when the measure is not numerically Szego.
  std::span<const cplx> log_weight_herglotz() const { return data_->log_weight_herglotz; }
  std::span<const cplx> analytic_moments() const { return data_->analytic_moments; }

 private:
  struct Data {
    std::vector<double> weight;
    std::vector<Atom> atoms;
    double total_mass = 0.0;
    double weight_floor = kDefaultWeightFloor;
    bool szego = false;
    std::optional<std::string> family;
    std::vector<cplx> weight_herglotz;
    std::vector<cplx> log_weight_herglotz;
    std::vector<cplx> analytic_moments;
  };

  explicit CircleMeasure(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

  std::shared_ptr<const Data> data_;

  friend CircleMeasure build_measure(std::span<const double>, std::span<const Atom>, bool, const MeasureOptions&);
};

/// Validates (or normalizes) sampled weight plus atoms into a probability measure.
inline CircleMeasure build_measure(std::span<const double> weight_samples, std::span<const Atom> atoms,
                                   bool normalize, const MeasureOptions& options = {}) {
  if (weight_samples.empty()) fail(ErrorKind::InvalidArgument, "weight samples must be nonempty");
  for (double w : weight_samples) {
    if (!std::isfinite(w) || w < 0.0) fail(ErrorKind::NegativeInput, "weight samples must be finite and nonnegative");
  }
  std::vector<Atom> sorted(atoms.begin(), atoms.end());
  for (auto& a : sorted) {
    if (!std::isfinite(a.mass) || a.mass <= 0.0) fail(ErrorKind::NegativeInput, "atom masses must be positive");
    if (!std::isfinite(a.angle)) fail(ErrorKind::InvalidArgument, "atom angle must be finite");
    a.angle = wrap_angle(a.angle);
  }
  std::sort(sorted.begin(), sorted.end(), [](const Atom& x, const Atom& y) { return x.angle < y.angle; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].angle == sorted[i - 1].angle) fail(ErrorKind::InvalidArgument, "atom angles must be distinct");
  }

  const double n = static_cast<double>(weight_samples.size());
  double grid_mass = 0.0;
  for (double w : weight_samples) grid_mass += w;
  grid_mass /= n;
  double atom_mass = 0.0;
  for (const auto& a : sorted) atom_mass += a.mass;
  const double total = grid_mass + atom_mass;
  if (!(total > 0.0)) fail(ErrorKind::NonNormalizable, "measure has zero total mass");

  auto data = std::make_shared<CircleMeasure::Data>();
  data->weight.assign(weight_samples.begin(), weight_samples.end());
  data->atoms = std::move(sorted);
  data->weight_floor = options.weight_floor;
  data->family = options.family;
  data->analytic_moments = options.analytic_moments;
  if (normalize) {
    const double scale = 1.0 / total;
    for (double& w : data->weight) w *= scale;
    for (auto& a : data->atoms) a.mass *= scale;
    data->total_mass = total * scale;
  } else {
    if (std::abs(total - 1.0) > kNormalizationTolerance) {
      fail(ErrorKind::NonNormalizable, "total mass " + std::to_string(total) + " differs from 1");
    }
    data->total_mass = total;
  }

  data->szego = std::all_of(data->weight.begin(), data->weight.end(),
                            [&](double w) { return w >= options.weight_floor; });
  data->weight_herglotz = detail::herglotz_coefficients(data->weight);
  if (data->szego) {
    std::vector<double> log_w(data->weight.size());
    std::transform(data->weight.begin(), data->weight.end(), log_w.begin(), [](double w) { return std::log(w); });
    data->log_weight_herglotz = detail::herglotz_coefficients(log_w);
  }
  return CircleMeasure(std::move(data));
}

inline CircleMeasure build_measure(std::span<const double> weight_samples, bool normalize = false) {
  return build_measure(weight_samples, std::span<const Atom>{}, normalize);
}

inline CircleMeasure lebesgue_measure(std::size_t grid_size = kDefaultGridSize) {
  std::vector<double> ones(grid_size, 1.0);
  return build_measure(ones, {}, false, MeasureOptions{kDefaultWeightFloor, "lebesgue", {}});
}

inline void require_interior(cplx z) {
  if (!(std::abs(z) <= 1.0 - kBoundaryExclusion)) fail(ErrorKind::BoundaryPoint, "point must lie strictly inside the disk");
}

inline void require_boundary(cplx xi) {
  if (std::abs(std::abs(xi) - 1.0) > 1e-12) fail(ErrorKind::NotOnBoundary, "point must lie on the unit circle");
}

inline void require_szego(const CircleMeasure& mu) {
  if (!mu.is_szego()) fail(ErrorKind::NotSzego, "weight has samples below the floor; log w is not usable");
}

/// Poisson kernel (1 - |z|^2) / |1 - conj(xi) z|^2.
inline double poisson_kernel(cplx xi, cplx z) {
  return (1.0 - std::norm(z)) / std::norm(1.0 - std::conj(xi) * z);
}

/// P(mu, z): harmonic extension of mu into the disk.
inline double poisson(const CircleMeasure& mu, cplx z) {
  require_interior(z);
  double value = detail::horner(mu.weight_herglotz(), z).real();
  for (const auto& a : mu.atoms()) value += a.mass * poisson_kernel(unit(a.angle), z);
  return value;
}

/// P(log w, z); atoms do not enter.
inline double poisson_log_weight(const CircleMeasure& mu, cplx z) {
  require_szego(mu);
  require_interior(z);
  return detail::horner(mu.log_weight_herglotz(), z).real();
}

/// Value of the density's trigonometric interpolant at angle theta.
inline double density(const CircleMeasure& mu, double theta) {
  return detail::horner(mu.weight_herglotz(), unit(theta)).real();
}

inline void require_aligned(const CircleMeasure& mu, const SampledFunction& g) {
  if (g.grid.size() != mu.grid_size() || g.atoms.size() != mu.atoms().size()) {
    fail(ErrorKind::GridMismatch, "sampled function does not match the measure's grid and atoms");
  }
}

/// P(g dmu, z) for nonnegative g sampled on the grid and at the atoms.
inline double weighted_poisson(const CircleMeasure& mu, const SampledFunction& g, cplx z) {
  require_aligned(mu, g);
  require_interior(z);
  std::vector<double> gw(mu.grid_size());
  for (std::size_t j = 0; j < gw.size(); ++j) {
    if (g.grid[j].real() < 0.0 || g.grid[j].imag() != 0.0) fail(ErrorKind::NegativeInput, "g must be real and nonnegative");
    gw[j] = g.grid[j].real() * mu.weight()[j];
  }
  double value = detail::horner(detail::herglotz_coefficients(gw), z).real();
  const auto atoms = mu.atoms();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (g.atoms[i].real() < 0.0 || g.atoms[i].imag() != 0.0) fail(ErrorKind::NegativeInput, "g must be real and nonnegative");
    value += g.atoms[i].real() * atoms[i].mass * poisson_kernel(unit(atoms[i].angle), z);
  }
  return value;
}

inline std::size_t max_trusted_moment(const CircleMeasure& mu) { return mu.grid_size() / 8; }

inline void require_trusted_order(const CircleMeasure& mu, std::size_t count) {
  if (count > 0 && count - 1 > max_trusted_moment(mu)) {
    fail(ErrorKind::AliasRisk, "moment order " + std::to_string(count - 1) + " exceeds N/8");
  }
}

/// Moments c_0..c_count-1 of the grid weight plus atoms, c_k = integral of conj(xi)^k dmu.
inline std::vector<cplx> grid_moments(const CircleMeasure& mu, std::size_t count) {
  require_trusted_order(mu, count);
  const auto h = mu.weight_herglotz();
  std::vector<cplx> c(count);
  for (std::size_t k = 0; k < count; ++k) {
    // h_k = 2 c_k for 0 < k < N/2.
    cplx grid_part = k == 0 ? h[0] : h[k] * 0.5;
    cplx atom_part{};
    for (const auto& a : mu.atoms()) atom_part += a.mass * unit(-static_cast<double>(k) * a.angle);
    c[k] = grid_part + atom_part;
  }
  return c;
}

/// Moments c_0..c_count-1; analytic moments when the measure carries enough of them.
inline std::vector<cplx> moments(const CircleMeasure& mu, std::size_t count) {
  require_trusted_order(mu, count);
  const auto exact = mu.analytic_moments();
  if (!exact.empty() && count <= exact.size()) return std::vector<cplx>(exact.begin(), exact.begin() + count);
  return grid_moments(mu, count);
}

inline cplx moment(const CircleMeasure& mu, std::size_t k) { return moments(mu, k + 1)[k]; }

/// Fejer mean (1/n) integral |sum_{k<n} (conj(xi0) xi)^k|^2 dmu.
inline double fejer_mean(const CircleMeasure& mu, cplx xi0, std::size_t n) {
  require_boundary(xi0);
  if (n == 0) fail(ErrorKind::InvalidArgument, "Fejer mean needs n >= 1");
  const auto c = moments(mu, n);
  const double nd = static_cast<double>(n);
  double acc = nd * c[0].real();
  cplx rot = 1.0;
  const cplx step = std::conj(xi0);
  for (std::size_t m = 1; m < n; ++m) {
    rot *= step;
    acc += 2.0 * (nd - static_cast<double>(m)) * (rot * std::conj(c[m])).real();
  }
  return acc / nd;
}

/// Normalized Lebesgue measure of the arc {xi : |xi - xi0| < eps}.
inline double arc_measure(double eps) {
  if (eps >= 2.0) return 1.0;
  return 2.0 * std::asin(eps / 2.0) / std::numbers::pi;
}

/// mu_s(I) / m(I) for I = {|xi - xi0| < eps}.
inline double interval_ratio(const CircleMeasure& mu, cplx xi0, double eps) {
  require_boundary(xi0);
  const double spacing = 2.0 * std::sin(std::numbers::pi / static_cast<double>(mu.grid_size()));
  if (!(eps > spacing)) fail(ErrorKind::InvalidArgument, "arc radius must exceed the grid spacing");
  double inside = 0.0;
  for (const auto& a : mu.atoms()) {
    if (std::abs(unit(a.angle) - xi0) < eps) inside += a.mass;
  }
  return inside / arc_measure(eps);
}

/// Integral of g over mu by the trapezoid rule on the grid plus exact atom terms.
template <typename F>
cplx integrate(const CircleMeasure& mu, F&& g) {
  const auto w = mu.weight();
  cplx acc{};
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (w[j] != 0.0) acc += w[j] * g(mu.node(j));
  }
  acc /= static_cast<double>(w.size());
  for (const auto& a : mu.atoms()) acc += a.mass * g(unit(a.angle));
  return acc;
}

}  // namespace opuc
