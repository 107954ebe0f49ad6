#pragma once

// Builtin measure families. Measure-first families sample a weight and extract
// parameters; parameter-first families take parameters as primary data and
// rebuild the grid weight from boundary values of the Caratheodory function.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <locale>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "opuc/error.hpp"
#include "opuc/measure.hpp"
#include "opuc/parameters.hpp"
#include "opuc/polynomials.hpp"
#include "opuc/scattering.hpp"
#include "opuc/schur.hpp"

namespace opuc {

enum class FamilyKind { Lebesgue, BernsteinSzego, Geronimus, Ell2, Mixed };

inline std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::Lebesgue: return "lebesgue";
    case FamilyKind::BernsteinSzego: return "bernstein_szego";
    case FamilyKind::Geronimus: return "geronimus";
    case FamilyKind::Ell2: return "ell2";
    case FamilyKind::Mixed: return "mixed";
  }
  return "unknown";
}

struct FamilySpec {
  FamilyKind kind = FamilyKind::Lebesgue;
  double r = 0.0;               // bernstein_szego, and the base of mixed
  cplx a{};                     // geronimus
  double c = 0.0;               // ell2: a_n = c/(n+1)^p
  double p = 1.0;
  std::size_t truncation = 0;   // ell2: number of nonzero parameters, 0 = N/128
  FamilyKind base = FamilyKind::Lebesgue;  // mixed
  std::vector<Atom> atoms;      // mixed
};

struct Family {
  FamilySpec spec;
  std::string label;
  bool parameter_first = false;
  CircleMeasure measure;
  SchurParameters params;
  // Number of parameters that can be nonzero, when finite.
  std::optional<std::size_t> finite_support;
  // Max difference of the moment-recursion and series routes over the first
  // kCrossCheckOrder parameters, both run on moments(measure).
  double cross_check = 0.0;
  // Parameter-first only: max |a_n - a_n(grid moments)| over the same range,
  // infinity when the recursion on grid moments breaks down.
  std::optional<double> reconstruction_error;
};

inline constexpr std::size_t kCrossCheckOrder = 64;
inline constexpr std::size_t kEll2TruncationDivisor = 128;
inline constexpr double kGapModulus = 1.0 - 1e-14;

/// Number of parameters stored for a grid of size N.
inline std::size_t parameter_count(std::size_t grid_size) { return grid_size / 8 - kSeriesGuard; }

inline std::vector<cplx> grid_nodes(std::size_t n) {
  std::vector<cplx> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = unit(kTwoPi * static_cast<double>(j) / static_cast<double>(n));
  return out;
}

/// Re F(xi) = (1 - |f|^2)/|1 - xi f|^2 for a boundary value f of the Schur function.
inline double weight_from_schur_value(cplx f, cplx xi) {
  const double m = std::norm(f);
  if (m >= kGapModulus) return 0.0;
  return (1.0 - m) / std::norm(1.0 - xi * f);
}

/// Schur function at a boundary point for finitely many parameters (f_L = 0).
inline cplx finite_schur_boundary(std::span<const cplx> a, cplx xi) {
  cplx f = 0.0;
  for (std::size_t k = a.size(); k-- > 0;) {
    const cplx xf = xi * f;
    f = (a[k] + xf) / (1.0 + std::conj(a[k]) * xf);
  }
  return f;
}

/// Root of conj(a) z f^2 + (1 - z) f - a = 0 with the smaller modulus: the
/// Schur function of the constant sequence a_n = a.
inline cplx geronimus_schur(cplx a, cplx z) {
  if (a == 0.0) return 0.0;
  const cplx qa = std::conj(a) * z;
  const cplx qb = 1.0 - z;
  const cplx disc = std::sqrt(qb * qb + 4.0 * std::norm(a) * z);
  const cplx r1 = (-qb + disc) / (2.0 * qa);
  const cplx r2 = (-qb - disc) / (2.0 * qa);
  return std::abs(r1) <= std::abs(r2) ? r1 : r2;
}

/// Point mass of the constant-parameter measure, if any.
inline std::optional<Atom> geronimus_atom(cplx a) {
  const double t = 2.0 * (a.real() + std::norm(a)) / std::norm(1.0 + a);
  if (!(t > 0.0)) return std::nullopt;
  return Atom{std::arg((1.0 + std::conj(a)) / (1.0 + a)), t};
}

namespace detail {

inline std::vector<double> bernstein_szego_weight(double r, std::size_t n) {
  std::vector<double> w(n);
  const auto nodes = grid_nodes(n);
  for (std::size_t j = 0; j < n; ++j) w[j] = (1.0 - r * r) / std::norm(1.0 - r * nodes[j]);
  return w;
}

inline double max_difference(const SchurParameters& x, const SchurParameters& y, std::size_t count) {
  double out = 0.0;
  for (std::size_t n = 0; n < count; ++n) out = std::max(out, std::abs(x[n] - y[n]));
  return out;
}

/// Infinity when either route breaks down.
inline double two_route_difference(const CircleMeasure& mu, std::size_t check) {
  const auto c = moments(mu, check + kSeriesGuard + 1);
  try {
    return max_difference(verblunsky_from_moments(c, check), schur_parameters_from_moments(c, check), check);
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
}

inline void extract_parameters(Family& fam) {
  const std::size_t count = parameter_count(fam.measure.grid_size());
  fam.params = verblunsky_from_moments(moments(fam.measure, count + 1), count);
  fam.cross_check = two_route_difference(fam.measure, std::min(kCrossCheckOrder, count));
}

inline void check_reconstruction(Family& fam) {
  const std::size_t check = std::min(kCrossCheckOrder, fam.params.size());
  fam.cross_check = two_route_difference(fam.measure, check);
  try {
    const auto c = grid_moments(fam.measure, check + 1);
    fam.reconstruction_error = max_difference(verblunsky_from_moments(c, check), fam.params, check);
  } catch (const Error&) {
    fam.reconstruction_error = std::numeric_limits<double>::infinity();
  }
}

/// Measure options carrying the moments of the parameter sequence `all`
/// (which must hold at least N/8 entries).
inline MeasureOptions parameter_first_options(const std::string& label, const std::vector<cplx>& all,
                                              std::size_t grid_size) {
  MeasureOptions options{kDefaultWeightFloor, label, {}};
  const std::size_t count = grid_size / 8 + 1;
  options.analytic_moments = moments_from_parameters(SchurParameters(all), count);
  return options;
}

/// Parameter-first family with a_n = head[n] for n < head.size() and zero beyond.
inline void fill_finite_parameter_family(Family& fam, std::span<const cplx> head, std::size_t grid_size) {
  fam.parameter_first = true;
  std::vector<cplx> a(grid_size / 8);
  std::copy(head.begin(), head.end(), a.begin());
  std::vector<double> w(grid_size);
  const auto nodes = grid_nodes(grid_size);
  for (std::size_t j = 0; j < grid_size; ++j) w[j] = weight_from_schur_value(finite_schur_boundary(head, nodes[j]), nodes[j]);
  fam.measure = build_measure(w, {}, true, parameter_first_options(fam.label, a, grid_size));
  a.resize(parameter_count(grid_size));
  fam.params = SchurParameters(std::move(a));
  fam.finite_support = head.size();
  check_reconstruction(fam);
}

}  // namespace detail

inline void validate(const FamilySpec& spec) {
  auto unit_interval = [](double v, const char* what) {
    if (!(v >= 0.0 && v < 1.0)) fail(ErrorKind::Config, std::string(what) + " must lie in [0, 1)");
  };
  switch (spec.kind) {
    case FamilyKind::Lebesgue: break;
    case FamilyKind::BernsteinSzego: unit_interval(spec.r, "r"); break;
    case FamilyKind::Geronimus: unit_interval(std::abs(spec.a), "|a|"); break;
    case FamilyKind::Ell2:
      unit_interval(spec.c, "c");
      if (!(spec.p > 0.5)) fail(ErrorKind::Config, "p must exceed 1/2 for a square-summable sequence");
      break;
    case FamilyKind::Mixed: {
      if (spec.base != FamilyKind::Lebesgue && spec.base != FamilyKind::BernsteinSzego) {
        fail(ErrorKind::Config, "mixed base must be lebesgue or bernstein_szego");
      }
      unit_interval(spec.r, "r");
      if (spec.atoms.empty()) fail(ErrorKind::Config, "mixed family needs at least one atom");
      double mass = 0.0;
      for (const auto& a : spec.atoms) {
        if (!(a.mass > 0.0)) fail(ErrorKind::Config, "atom masses must be positive");
        mass += a.mass;
      }
      if (!(mass < 1.0)) fail(ErrorKind::Config, "atom masses must sum to less than 1");
      break;
    }
  }
}

inline std::string family_label(const FamilySpec& spec) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << to_string(spec.kind);
  switch (spec.kind) {
    case FamilyKind::Lebesgue: break;
    case FamilyKind::BernsteinSzego: os << "(" << spec.r << ")"; break;
    case FamilyKind::Geronimus: os << "(" << spec.a.real() << (spec.a.imag() < 0 ? "" : "+") << spec.a.imag() << "i)"; break;
    case FamilyKind::Ell2: os << "(" << spec.c << "," << spec.p << ")"; break;
    case FamilyKind::Mixed:
      os << "(" << to_string(spec.base);
      if (spec.base == FamilyKind::BernsteinSzego) os << "(" << spec.r << ")";
      for (const auto& a : spec.atoms) os << ",atom@" << a.angle << ":" << a.mass;
      os << ")";
      break;
  }
  return os.str();
}

inline Family build_family(const FamilySpec& spec, std::size_t grid_size = kDefaultGridSize) {
  validate(spec);
  if (grid_size < 256 || (grid_size & (grid_size - 1)) != 0) {
    fail(ErrorKind::Config, "grid size must be a power of two >= 256");
  }
  Family fam{spec, family_label(spec), false, lebesgue_measure(grid_size), {}, std::nullopt, 0.0, std::nullopt};
  const std::size_t count = parameter_count(grid_size);
  const MeasureOptions options{kDefaultWeightFloor, fam.label, {}};
  switch (spec.kind) {
    case FamilyKind::Lebesgue:
      fam.measure = build_measure(std::vector<double>(grid_size, 1.0), {}, false, options);
      fam.finite_support = 0;
      detail::extract_parameters(fam);
      break;
    case FamilyKind::BernsteinSzego:
      fam.measure = build_measure(detail::bernstein_szego_weight(spec.r, grid_size), {}, true, options);
      fam.finite_support = 1;
      detail::extract_parameters(fam);
      break;
    case FamilyKind::Mixed: {
      double atom_mass = 0.0;
      for (const auto& a : spec.atoms) atom_mass += a.mass;
      auto w = spec.base == FamilyKind::BernsteinSzego ? detail::bernstein_szego_weight(spec.r, grid_size)
                                                       : std::vector<double>(grid_size, 1.0);
      for (double& v : w) v *= 1.0 - atom_mass;
      fam.measure = build_measure(w, spec.atoms, true, options);
      detail::extract_parameters(fam);
      break;
    }
    case FamilyKind::Ell2: {
      const std::size_t m = spec.truncation == 0 ? grid_size / kEll2TruncationDivisor : spec.truncation;
      if (m > count) fail(ErrorKind::Config, "ell2 truncation exceeds the stored parameter count");
      std::vector<cplx> a(m);
      for (std::size_t n = 0; n < m; ++n) a[n] = spec.c / std::pow(static_cast<double>(n + 1), spec.p);
      detail::fill_finite_parameter_family(fam, a, grid_size);
      break;
    }
    case FamilyKind::Geronimus: {
      fam.parameter_first = true;
      std::vector<double> w(grid_size);
      const auto nodes = grid_nodes(grid_size);
      for (std::size_t j = 0; j < grid_size; ++j) w[j] = weight_from_schur_value(geronimus_schur(spec.a, nodes[j]), nodes[j]);
      std::vector<Atom> atoms;
      if (auto atom = geronimus_atom(spec.a)) atoms.push_back(*atom);
      const std::vector<cplx> a(grid_size / 8, spec.a);
      fam.measure = build_measure(w, atoms, true, detail::parameter_first_options(fam.label, a, grid_size));
      fam.params = SchurParameters(std::vector<cplx>(count, spec.a));
      detail::check_reconstruction(fam);
      break;
    }
  }
  return fam;
}

inline FamilySpec lebesgue_spec() { return {}; }

inline FamilySpec bernstein_szego_spec(double r) {
  FamilySpec s;
  s.kind = FamilyKind::BernsteinSzego;
  s.r = r;
  return s;
}

inline FamilySpec geronimus_spec(cplx a) {
  FamilySpec s;
  s.kind = FamilyKind::Geronimus;
  s.a = a;
  return s;
}

inline FamilySpec ell2_spec(double c, double p, std::size_t truncation = 0) {
  FamilySpec s;
  s.kind = FamilyKind::Ell2;
  s.c = c;
  s.p = p;
  s.truncation = truncation;
  return s;
}

inline FamilySpec mixed_spec(FamilyKind base, double r, std::vector<Atom> atoms) {
  FamilySpec s;
  s.kind = FamilyKind::Mixed;
  s.base = base;
  s.r = r;
  s.atoms = std::move(atoms);
  return s;
}

/// Dual measure (parameters -a_n). Parameter-first families rebuild it from the
/// negated parameters; measure-first families use Re(1/F_mu) on the grid.
inline CircleMeasure dual_family_measure(const Family& fam) {
  const std::size_t grid_size = fam.measure.grid_size();
  if (fam.spec.kind == FamilyKind::Geronimus) return build_family(geronimus_spec(-fam.spec.a), grid_size).measure;
  if (fam.parameter_first && fam.finite_support) {
    std::vector<cplx> head(*fam.finite_support);
    for (std::size_t n = 0; n < head.size(); ++n) head[n] = -fam.params[n];
    Family dual{fam.spec, "dual of " + fam.label, true, fam.measure, {}, std::nullopt, 0.0, std::nullopt};
    detail::fill_finite_parameter_family(dual, head, grid_size);
    return dual.measure;
  }
  return dual_measure(fam.measure);
}

}  // namespace opuc
