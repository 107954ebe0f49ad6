#pragma once

// Experiment runner: per-experiment CSV tables and the invariant verdict
// registry, assembled into report.json.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "opuc/asymptotics.hpp"
#include "opuc/config.hpp"
#include "opuc/families.hpp"
#include "opuc/measure.hpp"
#include "opuc/polynomials.hpp"
#include "opuc/scattering.hpp"
#include "opuc/schur.hpp"
#include "opuc/szego.hpp"

namespace opuc {

inline constexpr int kReportSchema = 1;
inline constexpr double kTrendFloor = 1e-12;
inline constexpr double kAtomClearance = 0.05;
inline constexpr std::size_t kRandomPoints = 64;

enum class Status { Pass, Fail, NotApplicable };

inline std::string to_string(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::NotApplicable: return "not_applicable";
  }
  return "unknown";
}

struct Verdict {
  std::string id;
  std::string module;
  std::string statement;
  Status status = Status::NotApplicable;
  double residual = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct Outcome {
  Status status = Status::NotApplicable;
  double residual = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

inline Outcome not_applicable(std::string why) { return {Status::NotApplicable, 0.0, 0.0, std::move(why)}; }

inline Outcome judged(bool ok, double residual, double tolerance, std::string detail = {}) {
  return {ok && std::isfinite(residual) ? Status::Pass : Status::Fail, residual, tolerance, std::move(detail)};
}

inline Outcome within(double residual, double tolerance, std::string detail = {}) {
  return judged(residual <= tolerance, residual, tolerance, std::move(detail));
}

inline std::string join_numbers(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + format_number(v[i]);
  return out;
}

/// Strictly decreasing, except that consecutive values both below the floor count as settled.
inline bool decreasing(const std::vector<double>& v, double floor = kTrendFloor) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1]) && !(v[i] <= floor && v[i - 1] <= floor)) return false;
  }
  return true;
}

/// Shared state for one configured family.
class Context {
 public:
  Context(const ExperimentConfig& cfg, const Family& fam) : cfg_(cfg), fam_(fam) {}

  const ExperimentConfig& config() const { return cfg_; }
  const Family& family() const { return fam_; }
  const CircleMeasure& mu() const { return fam_.measure; }
  const SchurParameters& params() const { return fam_.params; }
  std::size_t stored() const { return fam_.params.size(); }
  std::size_t n_max() const { return cfg_.n_list.back(); }

  bool builtin() const { return !cfg_.measure_path; }
  /// Builtin weights analytic on the circle: lebesgue, bernstein_szego and the
  /// absolutely continuous part of mixed.
  bool smooth_builtin() const {
    const auto k = fam_.spec.kind;
    return builtin() && (k == FamilyKind::Lebesgue || k == FamilyKind::BernsteinSzego || k == FamilyKind::Mixed);
  }

  const CircleMeasure& nu() {
    if (!dual_) dual_ = dual_family_measure(fam_);
    return *dual_;
  }

  Lcg64 rng(std::uint64_t index) const { return stream(cfg_.seed, index); }

  /// Test point away from every atom, with positive density.
  bool certified(double theta) const {
    const cplx xi = unit(theta);
    for (const auto& a : mu().atoms()) {
      if (std::abs(unit(a.angle) - xi) < kAtomClearance) return false;
    }
    return density(mu(), theta) > mu().weight_floor();
  }

  std::vector<double> certified_points() const {
    std::vector<double> out;
    for (double t : cfg_.test_points) {
      if (certified(t)) out.push_back(t);
    }
    return out;
  }

  /// |z| in {0, 0.3, 0.6, 0.9} times 8 equispaced angles.
  static std::vector<cplx> z_grid() {
    std::vector<cplx> out;
    for (double r : {0.0, 0.3, 0.6, 0.9}) {
      for (int k = 0; k < 8; ++k) out.push_back(std::polar(r, kTwoPi * k / 8.0));
    }
    return out;
  }

  std::vector<cplx> random_disk(std::uint64_t index, double radius, std::size_t count = kRandomPoints) const {
    auto g = rng(index);
    std::vector<cplx> out(count);
    for (auto& z : out) z = g.disk(radius);
    return out;
  }

 private:
  const ExperimentConfig& cfg_;
  const Family& fam_;
  std::optional<CircleMeasure> dual_;
};

struct Invariant {
  const char* id;
  const char* module;
  const char* experiment;
  const char* statement;
  std::function<Outcome(Context&, std::uint64_t)> check;  // second argument: stream index
};

namespace checks {

inline Outcome poisson_positive(Context& ctx, std::uint64_t s) {
  const double p0 = poisson(ctx.mu(), 0.0);
  double lowest = std::numeric_limits<double>::infinity();
  for (cplx z : ctx.random_disk(s, 0.99)) lowest = std::min(lowest, poisson(ctx.mu(), z));
  return judged(std::abs(p0 - 1.0) <= 1e-12 && lowest > 0.0, std::abs(p0 - 1.0), 1e-12,
                "min P over |z| <= 0.99: " + format_number(lowest));
}

inline Outcome moment_hermitian(Context& ctx, std::uint64_t) {
  const std::size_t top = std::min<std::size_t>(32, max_trusted_moment(ctx.mu()));
  const auto c = grid_moments(ctx.mu(), top + 1);
  double worst = 0.0;
  for (std::size_t k = 0; k <= top; ++k) {
    const cplx direct = integrate(ctx.mu(), [k](cplx x) { return std::pow(x, static_cast<int>(k)); });
    worst = std::max(worst, std::abs(c[k] - std::conj(direct)));
  }
  return within(worst, 1e-12, "transform moments vs direct sums, k <= " + std::to_string(top));
}

inline Outcome weighted_poisson_unit(Context& ctx, std::uint64_t s) {
  const auto one = sample(ctx.mu(), [](cplx) { return cplx(1.0); });
  double worst = 0.0;
  for (cplx z : ctx.random_disk(s, 0.99)) {
    worst = std::max(worst, std::abs(weighted_poisson(ctx.mu(), one, z) - poisson(ctx.mu(), z)));
  }
  return within(worst, 1e-14);
}

inline Outcome fejer_density(Context& ctx, std::uint64_t) {
  if (!ctx.smooth_builtin()) return not_applicable("needs a smooth builtin weight");
  const auto points = ctx.certified_points();
  if (points.empty()) return not_applicable("no test point away from atoms");
  const std::size_t n = std::min<std::size_t>(256, max_trusted_moment(ctx.mu()));
  double worst = 0.0;
  for (double t : points) {
    const double w = density(ctx.mu(), t);
    worst = std::max(worst, std::abs(fejer_mean(ctx.mu(), unit(t), n) - w) / w);
  }
  return within(worst, 0.05, "relative error at n = " + std::to_string(n));
}

inline Outcome quadrature_convergence(Context& ctx, std::uint64_t s) {
  if (!ctx.builtin() || ctx.family().spec.kind == FamilyKind::Geronimus) return not_applicable("needs a builtin weight without gap edges");
  auto spec = ctx.family().spec;
  if (spec.kind == FamilyKind::Ell2 && spec.truncation == 0) spec.truncation = ctx.mu().grid_size() / kEll2TruncationDivisor;
  const auto fine = build_family(spec, 2 * ctx.mu().grid_size());
  double worst = 0.0;
  for (cplx z : ctx.random_disk(s, 0.9)) worst = std::max(worst, std::abs(poisson(ctx.mu(), z) - poisson(fine.measure, z)));
  return within(worst, 1e-10, "N = " + std::to_string(ctx.mu().grid_size()) + " vs 2N");
}

inline std::vector<cplx> entropy_points(Context& ctx, std::uint64_t s) {
  auto pts = ctx.random_disk(s, 0.99);
  for (cplx z : Context::z_grid()) pts.push_back(z);
  return pts;
}

inline Outcome entropy_nonnegative(Context& ctx, std::uint64_t s) {
  if (!ctx.mu().is_szego()) return not_applicable("measure is not Szego");
  double lowest = std::numeric_limits<double>::infinity();
  for (cplx z : entropy_points(ctx, s)) lowest = std::min(lowest, std::log(poisson(ctx.mu(), z)) - poisson_log_weight(ctx.mu(), z));
  return judged(lowest >= -1e-10, std::max(0.0, -lowest), 1e-10, "min K: " + format_number(lowest));
}

inline Outcome outer_consistency(Context& ctx, std::uint64_t s) {
  if (!ctx.mu().is_szego()) return not_applicable("measure is not Szego");
  double worst = 0.0;
  for (cplx z : entropy_points(ctx, s)) {
    worst = std::max(worst, std::abs(2.0 * std::log(std::abs(szego_interior(ctx.mu(), z))) - poisson_log_weight(ctx.mu(), z)));
  }
  return within(worst, 1e-10);
}

inline Outcome radial_limit(Context& ctx, std::uint64_t) {
  if (!ctx.smooth_builtin() || !ctx.mu().is_szego()) return not_applicable("needs a smooth builtin Szego weight");
  const auto d = szego_boundary(ctx.mu());
  const std::size_t step = ctx.mu().grid_size() / 64;
  double worst = 0.0;
  for (std::size_t j = 0; j < ctx.mu().grid_size(); j += step) {
    worst = std::max(worst, std::abs(szego_interior(ctx.mu(), 0.999 * ctx.mu().node(j)) - d[j]));
  }
  return within(worst, 1e-2, "radius 0.999, 64 nodes");
}

inline Outcome jensen(Context& ctx, std::uint64_t s) {
  if (!ctx.mu().is_szego()) return not_applicable("measure is not Szego");
  double worst = 0.0;
  for (cplx z : entropy_points(ctx, s)) worst = std::max(worst, poisson_log_weight(ctx.mu(), z) - std::log(poisson(ctx.mu(), z)));
  return within(std::max(0.0, worst), 1e-10, "max of P(log w) - log P");
}

inline Outcome two_route(Context& ctx, std::uint64_t) {
  const std::size_t check = std::min(kCrossCheckOrder, ctx.stored());
  return within(detail::two_route_difference(ctx.mu(), check), 1e-8, "n <= " + std::to_string(check));
}

inline Outcome entropy_identity(Context& ctx, std::uint64_t) {
  if (!ctx.mu().is_szego()) return not_applicable("measure is not Szego");
  const std::size_t total = ctx.stored();
  const auto zs = Context::z_grid();
  if (ctx.family().finite_support) {
    double worst = 0.0;
    for (cplx z : zs) {
      const auto f = schur_iterates(ctx.params(), z, total);
      worst = std::max(worst, std::abs(entropy(ctx.mu(), z) - entropy_product(f, z, total)));
    }
    return within(worst, 1e-8, "full product over " + std::to_string(total) + " parameters");
  }
  std::vector<double> dev;
  for (std::size_t n : ctx.config().n_list) {
    double worst = 0.0;
    for (cplx z : zs) {
      const auto f = schur_iterates(ctx.params(), z, total);
      worst = std::max(worst, std::abs(entropy(ctx.mu(), z) - entropy_product(f, z, std::min(n, total))));
    }
    dev.push_back(worst);
  }
  return judged(decreasing(dev), dev.back(), kTrendFloor, "deviation over n_list: " + join_numbers(dev));
}

inline Outcome sum_bound(Context& ctx, std::uint64_t) {
  const std::size_t total = ctx.stored();
  const bool single = ctx.family().finite_support == std::size_t{1};
  double slack = 0.0;
  double gap = 0.0;
  for (cplx z : Context::z_grid()) {
    const auto f = schur_iterates(ctx.params(), z, total);
    const double k = ctx.mu().is_szego() ? entropy(ctx.mu(), z) : entropy_product(f, z, total);
    for (std::size_t n : ctx.config().n_list) {
      const auto b = schur_sum_bound(f, z, std::min(n, total), k);
      slack = std::max(slack, b.lhs - b.rhs);
      gap = std::max(gap, std::abs(b.lhs - b.rhs));
    }
  }
  if (single) {
    return within(std::max(slack, gap), 1e-10, "single-parameter family: equality, max |lhs - rhs| " + format_number(gap));
  }
  return within(std::max(0.0, slack), 1e-10, "max lhs - rhs " + format_number(slack));
}

inline Outcome contractivity(Context& ctx, std::uint64_t s) {
  auto pts = ctx.random_disk(s, 0.9, 32);
  for (cplx z : Context::z_grid()) pts.push_back(z);
  double largest = 0.0;
  for (cplx z : pts) {
    for (cplx v : schur_iterates(ctx.params(), z, ctx.stored())) largest = std::max(largest, std::abs(v));
    largest = std::max(largest, std::abs(schur_value(ctx.mu(), z)));
  }
  return judged(largest < 1.0, std::max(0.0, largest - 1.0), 0.0, "max |f_n(z)|: " + format_number(largest));
}

inline Outcome szego_formula(Context& ctx, std::uint64_t) {
  if (!ctx.mu().is_szego()) return not_applicable("measure is not Szego");
  const std::size_t total = ctx.stored();
  std::vector<double> dev;
  std::vector<std::size_t> ns;
  const std::size_t support = ctx.family().finite_support.value_or(total);
  for (std::size_t n : ctx.config().n_list) {
    if (n <= support) {
      ns.push_back(n);
      dev.push_back(szego_formula_residual(ctx.mu(), ctx.params(), n));
    }
  }
  if (ctx.family().finite_support) {
    const double full = szego_formula_residual(ctx.mu(), ctx.params(), total);
    const bool trend = ctx.family().spec.kind != FamilyKind::Ell2 || decreasing(dev);
    return judged(full <= 1e-10 && trend, full, 1e-10, "residual at n = " + std::to_string(total) +
                                                           (dev.empty() ? "" : "; over n_list: " + join_numbers(dev)));
  }
  if (dev.empty()) return not_applicable("n_list is empty");
  return judged(decreasing(dev), dev.back(), kTrendFloor, "residual over n_list: " + join_numbers(dev));
}

inline Outcome orthonormality(Context& ctx, std::uint64_t) {
  const std::size_t m = std::min<std::size_t>(16, ctx.stored());
  std::vector<cplx> gram((m + 1) * (m + 1));
  auto accumulate = [&](cplx x, double mass) {
    const auto p = eval_pairs(ctx.params(), x, m);
    for (std::size_t j = 0; j <= m; ++j) {
      for (std::size_t k = 0; k <= m; ++k) gram[j * (m + 1) + k] += mass * std::conj(p[j].phi) * p[k].phi;
    }
  };
  const auto w = ctx.mu().weight();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] != 0.0) accumulate(ctx.mu().node(i), w[i] / static_cast<double>(w.size()));
  }
  for (const auto& a : ctx.mu().atoms()) accumulate(unit(a.angle), a.mass);
  double worst = 0.0;
  for (std::size_t j = 0; j <= m; ++j) {
    for (std::size_t k = 0; k <= m; ++k) worst = std::max(worst, std::abs(gram[j * (m + 1) + k] - (j == k ? 1.0 : 0.0)));
  }
  return within(worst, 1e-8, "Gram matrix of phi_0..phi_" + std::to_string(m) + " on the grid plus atoms");
}

inline Outcome phi_star_zero_free(Context& ctx, std::uint64_t) {
  const std::size_t n = std::min<std::size_t>(32, ctx.stored());
  double lowest = std::numeric_limits<double>::infinity();
  for (double r : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99}) {
    for (int k = 0; k < 64; ++k) {
      for (const auto& p : eval_pairs(ctx.params(), std::polar(r, kTwoPi * k / 64.0), n)) lowest = std::min(lowest, std::abs(p.phi_star));
    }
  }
  return judged(lowest >= 1e-8, std::max(0.0, 1e-8 - lowest), 1e-8, "min |phi_n^*|: " + format_number(lowest));
}

inline Outcome cd_three_route(Context& ctx, std::uint64_t s) {
  auto g = ctx.rng(s);
  const std::size_t cap = std::min<std::size_t>(32, ctx.stored() - 1);
  double worst = 0.0;
  for (int i = 0; i < 64; ++i) {
    const cplx xi = g.circle();
    const cplx z = g.circle();
    const std::size_t n = g.below(cap + 1);
    const cplx direct = cd_kernel_cmv_direct(ctx.params(), xi, z, n);
    const cplx via_poly = std::pow(xi / z, static_cast<int>(n / 2)) * cd_kernel_poly(ctx.params(), xi, z, n);
    const cplx via_cmv = cd_kernel_cmv(ctx.params(), xi, z, n);
    const double scale = std::max(1.0, std::abs(direct));
    worst = std::max({worst, std::abs(direct - via_poly) / scale, std::abs(direct - via_cmv) / scale});
  }
  return within(worst, 1e-9, "64 random pairs, n <= " + std::to_string(cap) + ", relative to max(1, |K|)");
}

inline Outcome norm_telescoping(Context& ctx, std::uint64_t) {
  const std::size_t n_max = std::min<std::size_t>(64, ctx.stored());
  const auto table = monic_table(moments(ctx.mu(), n_max + 1), n_max);
  double worst = 0.0;
  for (std::size_t n = 0; n < n_max; ++n) {
    worst = std::max(worst, std::abs(table.norm_sq[n + 1] / table.norm_sq[n] - (1.0 - std::norm(ctx.params()[n]))));
  }
  return within(worst, 1e-10, "n < " + std::to_string(n_max));
}

inline Outcome mnt_sandwich_check(Context& ctx, std::uint64_t) {
  if (!ctx.mu().is_szego()) return not_applicable("measure is not Szego");
  const auto points = ctx.certified_points();
  if (points.empty()) return not_applicable("no certified test point");
  double worst = -std::numeric_limits<double>::infinity();
  std::size_t asserted = 0;
  for (double t : points) {
    const auto table = mnt_table(ctx.mu(), ctx.params(), unit(t), ctx.config().n_list, ctx.config().delta_grid_size);
    for (const auto& row : table.rows) {
      if (!row.asserted()) continue;
      ++asserted;
      worst = std::max({worst, row.lower - row.cesaro, row.cesaro - row.upper});
    }
  }
  if (asserted == 0) return not_applicable("no row with K_n <= 1");
  return within(std::max(0.0, worst), 1e-9, std::to_string(asserted) + " rows with K_n <= 1");
}

inline Outcome fejer_lower(Context& ctx, std::uint64_t) {
  double worst = -std::numeric_limits<double>::infinity();
  for (double t : ctx.config().test_points) {
    for (std::size_t n : ctx.config().n_list) {
      worst = std::max(worst, 1.0 / fejer_mean(ctx.mu(), unit(t), n) - cesaro_phi_sq(ctx.params(), unit(t), n));
    }
  }
  return within(std::max(0.0, worst), 1e-9, "max of 1/F_n - cesaro: " + format_number(worst));
}

inline double real_part(cplx x) { return x.real(); }

inline Outcome bessel(Context& ctx, std::uint64_t) {
  const std::size_t top = std::max<std::size_t>(2, std::min(ctx.n_max(), ctx.stored()) - 1);
  const auto f = sample(ctx.mu(), [](cplx x) { return cplx(real_part(x)); });
  const auto c = cmv_coefficients(ctx.mu(), ctx.params(), f, top);
  const double norm = integrate(ctx.mu(), [](cplx x) { return cplx(real_part(x) * real_part(x)); }).real();
  double all = 0.0;
  double head = 0.0;
  for (std::size_t j = 0; j <= top; ++j) {
    all += std::norm(c[j]);
    if (j <= 2) head += std::norm(c[j]);
  }
  const double residual = std::max(std::max(0.0, all - norm), std::abs(head - norm));
  return within(residual, 1e-8, "f = Re xi: sum_{j<=" + std::to_string(top) + "} |c_j|^2 = " + format_number(all) +
                                    ", sum_{j<=2} = " + format_number(head) + ", norm = " + format_number(norm));
}

inline Outcome strong_cesaro_constant(Context& ctx, std::uint64_t) {
  const std::size_t n = std::min(ctx.n_max(), ctx.stored());
  const auto one = sample(ctx.mu(), [](cplx) { return cplx(1.0); });
  const auto c = cmv_coefficients(ctx.mu(), ctx.params(), one, n - 1);
  const auto points = ctx.certified_points();
  if (points.empty()) return not_applicable("no certified test point");
  double worst = 0.0;
  for (double t : points) worst = std::max(worst, strong_cesaro_deviation(c, ctx.params(), unit(t), 1.0, n));
  return within(worst, 1e-12, "f = 1, n = " + std::to_string(n) + " (exact up to rounding)");
}

inline Outcome kernel_at_zero(Context& ctx, std::uint64_t) {
  double worst = 0.0;
  for (double t : ctx.config().test_points) worst = std::max(worst, kernel_at_zero_residual(ctx.params(), unit(t), ctx.n_max()));
  return within(worst, 1e-9, "kernel at zero relative to max(1, |C_k|), n = " + std::to_string(ctx.n_max()));
}

inline Outcome closure(Context& ctx, std::uint64_t s) {
  auto g = ctx.rng(s);
  std::vector<cplx> points;
  for (double t : ctx.config().test_points) points.push_back(unit(t));
  for (int i = 0; i < 8; ++i) points.push_back(g.circle());
  const std::size_t n = ctx.n_max();
  const auto dual = dual_parameters(ctx.params());
  double worst = 0.0;
  for (cplx xi : points) {
    const cplx alpha(2.0 * g.uniform() - 1.0, 2.0 * g.uniform() - 1.0);
    const cplx beta(2.0 * g.uniform() - 1.0, 2.0 * g.uniform() - 1.0);
    const auto phi = eval_pairs(ctx.params(), xi, n);
    const auto psi = eval_pairs(dual, xi, n);
    auto column = [&](std::size_t k) {
      return Vec2{alpha * phi[k].phi + beta * psi[k].phi, alpha * phi[k].phi_star - beta * psi[k].phi_star};
    };
    for (std::size_t k = 0; k < n; ++k) {
      const Vec2 next = column(k + 1);
      const Vec2 stepped = transfer(ctx.params(), k, xi, column(k));
      const double scale = std::max(1.0, std::hypot(std::abs(next[0]), std::abs(next[1])));
      worst = std::max(worst, std::hypot(std::abs(next[0] - stepped[0]), std::abs(next[1] - stepped[1])) / scale);
    }
  }
  std::string detail = "random combinations, n <= " + std::to_string(n) + ", relative to max(1, |v|)";
  if (ctx.mu().is_szego() && ctx.nu().is_szego()) {
    double jost = 0.0;
    for (double t : ctx.config().test_points) {
      const auto pair = jost_solutions(szego_boundary_at(ctx.mu(), t), szego_boundary_at(ctx.nu(), t), ctx.params(), unit(t), n);
      jost = std::max({jost, recurrence_residual(pair.plus, ctx.params()), recurrence_residual(pair.minus, ctx.params())});
    }
    worst = std::max(worst, jost);
    detail += "; Jost residual " + format_number(jost);
  }
  return within(worst, 1e-8, detail);
}

inline Outcome cesaro_decay(Context& ctx, std::uint64_t) {
  if (!ctx.mu().is_szego() || !ctx.nu().is_szego()) return not_applicable("needs Szego measure and dual");
  const auto points = ctx.certified_points();
  if (points.empty()) return not_applicable("no certified test point");
  bool ok = true;
  double last = 0.0;
  std::string detail;
  for (double t : points) {
    const auto pair = jost_solutions(szego_boundary_at(ctx.mu(), t), szego_boundary_at(ctx.nu(), t), ctx.params(), unit(t), ctx.n_max());
    std::vector<double> plus, minus;
    for (std::size_t n : ctx.config().n_list) {
      plus.push_back(averaged_jost_deviation(pair.plus, n));
      minus.push_back(averaged_jost_deviation(pair.minus, n));
    }
    ok = ok && decreasing(plus) && decreasing(minus);
    last = std::max({last, plus.back(), minus.back()});
    detail += (detail.empty() ? "" : "; ") + format_number(t) + ": plus " + join_numbers(plus) + ", minus " + join_numbers(minus);
  }
  return judged(ok, last, kTrendFloor, detail);
}

inline Outcome dual_of_dual(Context& ctx, std::uint64_t) {
  if (!ctx.mu().is_szego() || !ctx.nu().is_szego()) return not_applicable("needs Szego measure and dual");
  const auto twice = dual_parameters(dual_parameters(ctx.params()));
  double worst = 0.0;
  for (double t : ctx.config().test_points) {
    const cplx dm = szego_boundary_at(ctx.mu(), t);
    const cplx dn = szego_boundary_at(ctx.nu(), t);
    const auto a = jost_solutions(dm, dn, ctx.params(), unit(t), ctx.n_max());
    const auto b = jost_solutions(dm, dn, twice, unit(t), ctx.n_max());
    for (std::size_t n = 0; n < a.plus.entries.size(); ++n) {
      for (int i = 0; i < 2; ++i) {
        worst = std::max({worst, std::abs(a.plus.entries[n][i] - b.plus.entries[n][i]),
                          std::abs(a.minus.entries[n][i] - b.minus.entries[n][i])});
      }
    }
  }
  return within(worst, 1e-12);
}

inline Outcome family_cross_validation(Context& ctx, std::uint64_t) {
  const auto& fam = ctx.family();
  const double recon = fam.reconstruction_error.value_or(0.0);
  return judged(fam.cross_check <= 1e-8 && recon <= 1e-6, std::max(fam.cross_check, recon), 1e-8,
                "two-route " + format_number(fam.cross_check) +
                    (fam.reconstruction_error ? ", grid roundtrip " + format_number(recon) + " (limit 1e-6)" : ""));
}

}  // namespace checks

/// Every invariant of the library modules, in report order, plus the family cross-validation.
inline const std::vector<Invariant>& invariant_registry() {
  static const std::vector<Invariant> registry{
      {"measure.poisson_positive", "circle-measure", "entropy",
       "poisson(mu, z) > 0 for |z| <= 0.99 and poisson(mu, 0) = 1 within 1e-12", checks::poisson_positive},
      {"measure.moment_hermitian", "circle-measure", "entropy",
       "moment(mu, k) = conj(integral of xi^k dmu) recomputed directly, within 1e-12", checks::moment_hermitian},
      {"measure.weighted_poisson_unit", "circle-measure", "entropy",
       "weighted_poisson(mu, 1, z) = poisson(mu, z) within 1e-14", checks::weighted_poisson_unit},
      {"measure.fejer_density", "circle-measure", "mnt",
       "fejer_mean(mu, xi0, 256) matches the density within 5% for smooth builtin weights", checks::fejer_density},
      {"measure.quadrature_convergence", "circle-measure", "entropy",
       "doubling N changes poisson(mu, z) by at most 1e-10 for |z| <= 0.9", checks::quadrature_convergence},
      {"szego.nonnegativity", "szego-outer", "entropy", "entropy(mu, z) >= -1e-10 for |z| <= 0.99",
       checks::entropy_nonnegative},
      {"szego.outer_consistency", "szego-outer", "entropy",
       "log|D(z)|^2 - poisson_log_weight(mu, z) = 0 within 1e-10", checks::outer_consistency},
      {"szego.radial_limit", "szego-outer", "entropy",
       "|D(0.999 xi) - D(xi)| <= 1e-2 for smooth builtin weights", checks::radial_limit},
      {"szego.jensen", "szego-outer", "entropy", "log poisson(mu, z) >= poisson_log_weight(mu, z)", checks::jensen},
      {"schur.two_route", "schur-core", "schur_identities",
       "series Schur parameters equal the moment-recursion parameters within 1e-8, n <= 64", checks::two_route},
      {"schur.entropy_identity", "schur-core", "schur_identities",
       "entropy equals the Schur product within 1e-8 for finite-parameter families, decreasing in n otherwise",
       checks::entropy_identity},
      {"schur.sum_bound", "schur-core", "schur_identities",
       "(1 - |z|^2) sum |f_k|^2/(1 - |f_k|^2) <= e^K - 1 + 1e-10, equality for single-parameter families",
       checks::sum_bound},
      {"schur.contractivity", "schur-core", "schur_identities", "|f_n(z)| < 1 for |z| <= 0.9", checks::contractivity},
      {"schur.szego_formula", "schur-core", "schur_identities",
       "integral log w = sum log(1 - |a_k|^2) within 1e-10 for finite-parameter families", checks::szego_formula},
      {"opuc.two_route", "opuc-core", "schur_identities",
       "moment-recursion and series parameters agree within 1e-8, n <= 64", checks::two_route},
      {"opuc.orthonormality", "opuc-core", "schur_identities",
       "Gram matrix of phi_0..phi_16 under the grid plus atoms is the identity within 1e-8", checks::orthonormality},
      {"opuc.phi_star_zero_free", "opuc-core", "schur_identities",
       "|phi_n^*(z)| >= 1e-8 on a radial-angular grid |z| <= 0.99, n <= 32", checks::phi_star_zero_free},
      {"opuc.cd_three_route", "opuc-core", "schur_identities",
       "direct, polynomial and Laurent kernels agree within 1e-9 relative", checks::cd_three_route},
      {"opuc.norm_telescoping", "opuc-core", "schur_identities",
       "||Phi_{n+1}||^2/||Phi_n||^2 = 1 - |a_n|^2 within 1e-10", checks::norm_telescoping},
      {"asymptotics.mnt_sandwich", "asymptotics-lab", "mnt",
       "lower <= cesaro <= upper within 1e-9 on every row with K_n <= 1 at certified test points",
       checks::mnt_sandwich_check},
      {"asymptotics.fejer_lower", "asymptotics-lab", "mnt", "cesaro_phi_sq >= 1/fejer_mean - 1e-9 for all n",
       checks::fejer_lower},
      {"asymptotics.bessel", "asymptotics-lab", "summability",
       "CMV coefficients satisfy Bessel and Parseval under quadrature within 1e-8", checks::bessel},
      {"asymptotics.strong_cesaro_constant", "asymptotics-lab", "summability",
       "strong_cesaro_deviation of a constant is 0", checks::strong_cesaro_constant},
      {"asymptotics.kernel_at_zero", "asymptotics-lab", "summability",
       "partial kernel at zero matches its two-term closed form within 1e-9", checks::kernel_at_zero},
      {"scattering.closure", "scattering", "scattering",
       "combinations of (phi, phi^*) and (psi, -psi^*) obey the transfer recurrence within 1e-8", checks::closure},
      {"scattering.cesaro_decay", "scattering", "scattering",
       "averaged Jost deviations decrease across n_list", checks::cesaro_decay},
      {"scattering.dual_of_dual", "scattering", "scattering",
       "Jost solutions from twice-negated parameters match within 1e-12", checks::dual_of_dual},
      {"cli.family_cross_validation", "cli", "",
       "family parameters cross-validated by both extraction routes", checks::family_cross_validation},
  };
  return registry;
}

inline Verdict evaluate(const Invariant& inv, Context& ctx, std::uint64_t index) {
  Verdict v{inv.id, inv.module, inv.statement, Status::Fail, 0.0, 0.0, {}};
  Outcome o;
  try {
    o = inv.check(ctx, index);
  } catch (const std::exception& e) {
    o = {Status::Fail, std::numeric_limits<double>::infinity(), 0.0, std::string("error: ") + e.what()};
  }
  v.status = o.status;
  v.residual = o.residual;
  v.tolerance = o.tolerance;
  v.detail = o.detail;
  return v;
}

/// Verdicts for the invariants attached to `experiment` ("all" selects every one).
inline std::vector<Verdict> run_invariants(Context& ctx, const std::string& experiment) {
  std::vector<Verdict> out;
  const auto& registry = invariant_registry();
  for (std::size_t i = 0; i < registry.size(); ++i) {
    const std::string owner = registry[i].experiment;
    if (experiment == "all" || owner == experiment || owner.empty()) out.push_back(evaluate(registry[i], ctx, i));
  }
  return out;
}

struct Table {
  std::string name;
  std::string header;
  std::vector<std::string> rows;
  nlohmann::json meta = nlohmann::json::object();
};

namespace tables {

inline std::string csv_row(std::initializer_list<std::string> cells) {
  std::string out;
  for (const auto& c : cells) out += (out.empty() ? "" : ",") + c;
  return out;
}

inline std::string num(double v) { return format_number(v); }
inline std::string num(std::size_t v) { return std::to_string(v); }

/// Entropy record, with K_n = inf when the measure is not Szego.
inline EntropyRecord record(const CircleMeasure& mu, cplx xi, std::size_t n, std::span<const double> deltas) {
  if (mu.is_szego()) return entropy_record(mu, xi, n, deltas);
  EntropyRecord rec;
  rec.n = n;
  rec.k_n = std::numeric_limits<double>::infinity();
  rec.p_n = std::numeric_limits<double>::infinity();
  for (double d : deltas) rec.p_n = std::min(rec.p_n, poisson(mu, (1.0 - d / static_cast<double>(n)) * xi));
  rec.f_n = fejer_mean(mu, xi, n);
  return rec;
}

inline Table mnt(Context& ctx) {
  Table t{"mnt", std::string("angle,") + kConvergenceHeader, {}, {}};
  const auto deltas = delta_grid(ctx.config().delta_grid_size);
  for (double theta : ctx.config().test_points) {
    const cplx xi = unit(theta);
    for (std::size_t n : ctx.config().n_list) {
      const auto rec = record(ctx.mu(), xi, n, deltas);
      const double cesaro = cesaro_phi_sq(ctx.params(), xi, n);
      const double upper = (1.0 + kSandwichConstant * std::pow(rec.k_n, 0.25)) / rec.p_n;
      t.rows.push_back(csv_row({num(theta), num(n), num(cesaro), num(1.0 / density(ctx.mu(), theta)), num(1.0 / rec.f_n),
                                num(upper), num(rec.k_n), num(rec.p_n), num(rec.f_n)}));
    }
  }
  t.meta["test_points"] = ctx.config().test_points;
  t.meta["certified_test_points"] = ctx.certified_points();
  t.meta["delta_grid"] = deltas;
  t.meta["sandwich_constant"] = kSandwichConstant;
  return t;
}

inline Table entropy_table(Context& ctx) {
  Table t{"entropy", "angle,n,K_n,P_n,F_n", {}, {}};
  const auto deltas = delta_grid(ctx.config().delta_grid_size);
  for (double theta : ctx.config().test_points) {
    for (std::size_t n : ctx.config().n_list) {
      const auto rec = record(ctx.mu(), unit(theta), n, deltas);
      t.rows.push_back(csv_row({num(theta), num(n), num(rec.k_n), num(rec.p_n), num(rec.f_n)}));
    }
  }
  t.meta["delta_grid"] = deltas;
  return t;
}

inline Table schur_identities(Context& ctx) {
  Table t{"schur_identities",
          "abs_z,arg_z,n,entropy,entropy_product,schur_sum_lhs,schur_sum_rhs,khrushchev_lhs,khrushchev_rhs", {}, {}};
  const std::size_t total = ctx.stored();
  std::vector<std::size_t> ns;
  for (std::size_t n = 1; n <= std::min<std::size_t>(16, total); n *= 2) ns.push_back(n);
  std::vector<SampledFunction> weights;
  for (std::size_t n : ns) {
    weights.push_back(sample(ctx.mu(), [&](cplx x) { return cplx(std::norm(eval_pair(ctx.params(), x, n).phi_star)); }));
  }
  for (cplx z : Context::z_grid()) {
    const auto f = schur_iterates(ctx.params(), z, total);
    const double k = ctx.mu().is_szego() ? entropy(ctx.mu(), z) : std::numeric_limits<double>::quiet_NaN();
    const double k_bound = ctx.mu().is_szego() ? k : entropy_product(f, z, total);
    for (std::size_t i = 0; i < ns.size(); ++i) {
      const std::size_t n = ns[i];
      const auto b = schur_sum_bound(f, z, n, k_bound);
      t.rows.push_back(csv_row({num(std::abs(z)), num(std::arg(z)), num(n), num(k), num(entropy_product(f, z, n)),
                                num(b.lhs), num(b.rhs), num(weighted_poisson(ctx.mu(), weights[i], z)),
                                num(khrushchev_rhs(ctx.params(), z, f[n], n))}));
    }
  }
  return t;
}

inline Table summability(Context& ctx) {
  Table t{"summability",
          "angle,n,strong_cesaro_re,strong_cesaro_one,chi_growth_lhs,chi_growth_rhs_unit,chi_growth_ratio,phi_star_deviation,kernel_residual",
          {}, {}};
  const std::size_t top = ctx.n_max();
  const auto re = cmv_coefficients(ctx.mu(), ctx.params(), sample(ctx.mu(), [](cplx x) { return cplx(x.real()); }), top - 1);
  const auto one = cmv_coefficients(ctx.mu(), ctx.params(), sample(ctx.mu(), [](cplx) { return cplx(1.0); }), top - 1);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double theta : ctx.config().test_points) {
    const cplx xi = unit(theta);
    for (std::size_t n : ctx.config().n_list) {
      const auto growth = chi_growth(ctx.mu(), ctx.params(), xi, n);
      const double phi_star_dev = ctx.mu().is_szego() ? phi_star_deviation(ctx.mu(), ctx.params(), xi, n).deviation : nan;
      t.rows.push_back(csv_row({num(theta), num(n), num(strong_cesaro_deviation(re, ctx.params(), xi, xi.real(), n)),
                                num(strong_cesaro_deviation(one, ctx.params(), xi, 1.0, n)), num(growth.lhs),
                                num(growth.rhs_unit), num(growth.ratio()), num(phi_star_dev),
                                num(kernel_at_zero_residual(ctx.params(), xi, n))}));
    }
  }
  return t;
}

inline Table scattering(Context& ctx) {
  Table t{"scattering", "angle,n,jost_plus_deviation,jost_minus_deviation", {}, {}};
  if (!ctx.mu().is_szego() || !ctx.nu().is_szego()) {
    t.meta["skipped"] = "measure or dual is not Szego";
    return t;
  }
  double residual = 0.0;
  for (double theta : ctx.config().test_points) {
    const auto pair = jost_solutions(szego_boundary_at(ctx.mu(), theta), szego_boundary_at(ctx.nu(), theta), ctx.params(),
                                     unit(theta), ctx.n_max());
    residual = std::max({residual, recurrence_residual(pair.plus, ctx.params()), recurrence_residual(pair.minus, ctx.params())});
    for (std::size_t n : ctx.config().n_list) {
      t.rows.push_back(csv_row({num(theta), num(n), num(averaged_jost_deviation(pair.plus, n)),
                                num(averaged_jost_deviation(pair.minus, n))}));
    }
  }
  const auto duality = duality_identity_residual(ctx.mu(), ctx.nu(), ctx.params(), std::min<std::size_t>(32, ctx.stored()));
  t.meta["recurrence_residual"] = residual;
  t.meta["duality_polynomial_residual"] = duality.polynomial;
  t.meta["duality_limit_residual"] = duality.limit;
  return t;
}

inline Table build(Context& ctx, const std::string& name) {
  if (name == "mnt") return mnt(ctx);
  if (name == "entropy") return entropy_table(ctx);
  if (name == "schur_identities") return schur_identities(ctx);
  if (name == "summability") return summability(ctx);
  if (name == "scattering") return scattering(ctx);
  fail(ErrorKind::Config, "unknown experiment '" + name + "'");
}

}  // namespace tables

inline nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

inline nlohmann::json to_json(const Verdict& v) {
  return {{"id", v.id},         {"module", v.module},
          {"statement", v.statement}, {"status", to_string(v.status)},
          {"residual", json_number(v.residual)}, {"tolerance", v.tolerance},
          {"detail", v.detail}};
}

inline nlohmann::json family_summary(const Family& fam) {
  return {{"label", fam.label},
          {"parameter_first", fam.parameter_first},
          {"grid_size", fam.measure.grid_size()},
          {"parameter_count", fam.params.size()},
          {"szego", fam.measure.is_szego()},
          {"finite_support", fam.finite_support ? nlohmann::json(*fam.finite_support) : nlohmann::json(nullptr)},
          {"cross_check", json_number(fam.cross_check)},
          {"reconstruction_error",
           fam.reconstruction_error ? json_number(*fam.reconstruction_error) : nlohmann::json(nullptr)}};
}

struct RunResult {
  nlohmann::json report;
  std::vector<Table> tables;
  std::vector<Verdict> verdicts;
  bool ok = false;  // no failed verdict
};

inline std::vector<std::string> selected_experiments(const ExperimentConfig& cfg) {
  if (cfg.experiment == "all") return experiment_names();
  return {cfg.experiment};
}

/// Builds the family, the selected tables and verdicts. Computation errors in a
/// table are recorded in its metadata; errors in checks become failed verdicts.
inline RunResult execute(const ExperimentConfig& cfg, bool with_tables = true) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto seconds = [](clock::time_point a) { return std::chrono::duration<double>(clock::now() - a).count(); };
  RunResult out;
  const Family fam = build_family(cfg);
  Context ctx(cfg, fam);
  nlohmann::json runtime = nlohmann::json::object();
  nlohmann::json table_meta = nlohmann::json::object();
  if (with_tables) {
    for (const auto& name : selected_experiments(cfg)) {
      const auto t0 = clock::now();
      Table t;
      try {
        t = tables::build(ctx, name);
      } catch (const std::exception& e) {
        t = Table{name, "", {}, {{"error", e.what()}}};
      }
      runtime[name] = seconds(t0);
      auto meta = t.meta;
      meta["file"] = name + ".csv";
      meta["columns"] = t.header;
      meta["rows"] = t.rows.size();
      table_meta[name] = meta;
      out.tables.push_back(std::move(t));
    }
  }
  const auto t0 = clock::now();
  out.verdicts = run_invariants(ctx, cfg.experiment);
  runtime["invariants"] = seconds(t0);
  runtime["total"] = seconds(start);
  std::size_t pass = 0, failed = 0, na = 0;
  nlohmann::json verdicts = nlohmann::json::array();
  for (const auto& v : out.verdicts) {
    verdicts.push_back(to_json(v));
    pass += v.status == Status::Pass;
    failed += v.status == Status::Fail;
    na += v.status == Status::NotApplicable;
  }
  out.ok = failed == 0;
  out.report = {{"schema", kReportSchema},
                {"config", config_to_json(cfg)},
                {"family", family_summary(fam)},
                {"experiments", selected_experiments(cfg)},
                {"tables", table_meta},
                {"verdicts", verdicts},
                {"summary", {{"pass", pass}, {"fail", failed}, {"not_applicable", na}, {"ok", out.ok}}},
                {"runtime_seconds", runtime}};
  return out;
}

inline void write_table(const Table& t, const std::filesystem::path& dir) {
  std::ofstream out(dir / (t.name + ".csv"), std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write " + (dir / (t.name + ".csv")).string());
  if (!t.header.empty()) out << t.header << '\n';
  for (const auto& r : t.rows) out << r << '\n';
}

/// Runs the configured suite and writes <experiment>.csv files plus report.json into `dir`.
inline RunResult run(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
  auto result = execute(cfg, true);
  for (const auto& t : result.tables) write_table(t, dir);
  std::ofstream report(dir / "report.json", std::ios::binary);
  if (!report) fail(ErrorKind::Io, "cannot write " + (dir / "report.json").string());
  report << result.report.dump(2) << '\n';
  return result;
}

/// Invariant suite only, no files.
inline RunResult verify(const ExperimentConfig& cfg) {
  auto all = cfg;
  all.experiment = "all";
  return execute(all, false);
}

}  // namespace opuc
