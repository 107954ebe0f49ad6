#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "opuc/asymptotics.hpp"
#include "opuc/families.hpp"
#include "oracles.hpp"

using opuc::cplx;

namespace {

// Poisson-kernel weight with parameter r: |phi_k(1)|^2 = (1 - r)^2/(1 - r^2) for k >= 1.
double bs_cesaro_at_one(double r, std::size_t n) {
  const double tail = (1.0 - r) * (1.0 - r) / (1.0 - r * r);
  return (1.0 + static_cast<double>(n - 1) * tail) / static_cast<double>(n);
}

}  // namespace

TEST(CesaroPhiSq, Examples) {
  const opuc::SchurParameters zero(std::vector<cplx>(300, 0.0));
  EXPECT_NEAR(opuc::cesaro_phi_sq(zero, opuc::unit(1.3), 256), 1.0, 1e-14);
  const auto fam = opuc::build_family(opuc::bernstein_szego_spec(0.5), 4096);
  EXPECT_NEAR(opuc::cesaro_phi_sq(fam.params, 1.0, 16), 0.375, 1e-13);
  for (std::size_t n : {64u, 256u}) EXPECT_NEAR(opuc::cesaro_phi_sq(fam.params, 1.0, n), bs_cesaro_at_one(0.5, n), 1e-13);
  EXPECT_THROW(opuc::cesaro_phi_sq(zero, 1.0, 0), opuc::Error);
  EXPECT_THROW(opuc::cesaro_phi_sq(zero, 0.5, 4), opuc::Error);
}

TEST(MntSandwich, PoissonKernelWeightAtOne) {
  const auto fam = opuc::build_family(opuc::bernstein_szego_spec(0.5), 4096);
  const std::vector<std::size_t> ns{16, 64, 256};
  const auto table = opuc::mnt_table(fam.measure, fam.params, 1.0, ns);
  ASSERT_EQ(table.rows.size(), 3u);
  for (const auto& row : table.rows) {
    EXPECT_TRUE(row.asserted());
    EXPECT_TRUE(row.holds()) << row.n;
    EXPECT_NEAR(row.target, 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(row.cesaro, bs_cesaro_at_one(0.5, row.n), 1e-13);
  }
  EXPECT_LT(std::abs(table.rows[2].cesaro - table.rows[2].target), std::abs(table.rows[0].cesaro - table.rows[0].target));
}

TEST(MntSandwich, LowerBoundHoldsWithAtom) {
  const auto fam = opuc::build_family(opuc::mixed_spec(opuc::FamilyKind::Lebesgue, 0.0, {{0.0, 0.3}}), 4096);
  for (double t : {1.0, 2.5, 4.0}) {
    for (std::size_t n : {16u, 64u}) {
      const auto row = opuc::mnt_sandwich(fam.measure, fam.params, opuc::unit(t), n);
      EXPECT_LE(row.lower, row.cesaro + 1e-9);
    }
  }
}

TEST(CsvOutput, FormatAndHeader) {
  EXPECT_EQ(opuc::format_number(0.1), "0.1");
  EXPECT_EQ(opuc::format_number(1.0 / 3.0), "0.333333333333");
  opuc::ConvergenceTable t;
  t.rows.push_back({16, 0.375, 1.0 / 3.0, 0.3, 0.4, 0.01, 3.0, 2.9});
  std::ostringstream os;
  opuc::write_csv(os, t);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), opuc::kConvergenceHeader);
  EXPECT_NE(os.str().find("16,0.375,0.333333333333,0.3,0.4,0.01,3,2.9"), std::string::npos);
}

TEST(CmvCoefficients, ConstantAndRealPart) {
  const auto leb = opuc::build_family(opuc::lebesgue_spec(), 1024);
  const auto one = opuc::sample(leb.measure, [](cplx) { return cplx(1.0); });
  const auto c1 = opuc::cmv_coefficients(leb.measure, leb.params, one, 8);
  EXPECT_NEAR(std::abs(c1[0] - 1.0), 0.0, 1e-14);
  for (std::size_t k = 1; k <= 8; ++k) EXPECT_NEAR(std::abs(c1[k]), 0.0, 1e-14);
  const auto re = opuc::sample(leb.measure, [](cplx x) { return cplx(x.real()); });
  const auto c2 = opuc::cmv_coefficients(leb.measure, leb.params, re, 8);
  EXPECT_NEAR(std::abs(c2[1] - 0.5), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(c2[2] - 0.5), 0.0, 1e-14);
  for (std::size_t k : {0u, 3u, 4u, 5u}) EXPECT_NEAR(std::abs(c2[k]), 0.0, 1e-14);
}

TEST(CmvCoefficients, BesselAndParsevalAgainstDirectQuadrature) {
  const auto fam = opuc::build_family(opuc::mixed_spec(opuc::FamilyKind::BernsteinSzego, 0.5, {{3.14159, 0.2}}), 2048);
  const auto f = opuc::sample(fam.measure, [](cplx x) { return cplx(std::exp(x.real()), x.imag()); });
  const auto c = opuc::cmv_coefficients(fam.measure, fam.params, f, 40);
  double partial = 0.0;
  for (cplx v : c) partial += std::norm(v);
  const double norm_sq = oracle::quadrature(fam.measure, [](cplx x) { return cplx(std::norm(cplx(std::exp(x.real()), x.imag()))); }).real();
  EXPECT_LE(partial, norm_sq + 1e-12);
  // f is smooth, so the coefficients are summable and Parseval nearly closes.
  EXPECT_NEAR(partial, norm_sq, 1e-8);
  // c_k agrees with a direct inner product.
  const cplx direct = oracle::quadrature(fam.measure, [&](cplx x) {
    return cplx(std::exp(x.real()), x.imag()) * std::conj(opuc::chi(fam.params, x, 5));
  });
  EXPECT_NEAR(std::abs(c[5] - direct), 0.0, 1e-12);
}

TEST(StrongCesaro, ConstantFunctionIsExact) {
  const auto fam = opuc::build_family(opuc::bernstein_szego_spec(0.5), 2048);
  const auto one = opuc::sample(fam.measure, [](cplx) { return cplx(1.0); });
  for (double t : {0.0, 1.0, 3.0}) {
    EXPECT_NEAR(opuc::strong_cesaro_deviation(fam.measure, fam.params, one, opuc::unit(t), 1.0, 64), 0.0, 1e-12);
  }
}

TEST(StrongCesaro, SmoothFunctionDecreases) {
  const auto fam = opuc::build_family(opuc::bernstein_szego_spec(0.5), 2048);
  const auto f = opuc::sample(fam.measure, [](cplx x) { return cplx(x.real()); });
  const cplx xi0 = opuc::unit(1.0);
  const double d16 = opuc::strong_cesaro_deviation(fam.measure, fam.params, f, xi0, xi0.real(), 16);
  const double d64 = opuc::strong_cesaro_deviation(fam.measure, fam.params, f, xi0, xi0.real(), 64);
  EXPECT_LT(d64, d16);
  EXPECT_LT(d64, 0.05);
}

TEST(ChiGrowth, LebesgueAndPoissonKernelWeight) {
  const auto leb = opuc::build_family(opuc::lebesgue_spec(), 1024);
  for (std::size_t n : {1u, 8u, 64u}) {
    const auto g = opuc::chi_growth(leb.measure, leb.params, opuc::unit(0.5), n);
    EXPECT_NEAR(g.lhs, static_cast<double>(n + 1) / n, 1e-13);
    EXPECT_NEAR(g.rhs_unit, 1.0, 1e-13);
  }
  const auto bs = opuc::build_family(opuc::bernstein_szego_spec(0.5), 4096);
  double worst = 0.0;
  for (std::size_t n : {4u, 16u, 64u, 256u}) worst = std::max(worst, opuc::chi_growth(bs.measure, bs.params, 1.0, n).ratio());
  EXPECT_LT(worst, 2.0);
}

TEST(ChiGrowth, AtomAtTheTestPoint) {
  // At an atom of mass m, sum_k |chi_k|^2 tends to 1/m and P(mu, z_n) ~ 2 m n, so the ratio tends to 2.
  const auto fam = opuc::build_family(opuc::mixed_spec(opuc::FamilyKind::Lebesgue, 0.0, {{0.0, 0.3}}), 4096);
  double worst = 0.0;
  for (std::size_t n = 1; n <= 256; ++n) worst = std::max(worst, opuc::chi_growth(fam.measure, fam.params, 1.0, n).ratio());
  EXPECT_LT(worst, 2.5);
  EXPECT_NEAR(opuc::chi_growth(fam.measure, fam.params, 1.0, 256).ratio(), 2.0, 0.05);
}

TEST(PhiStarDeviation, VanishesForOneParameter) {
  const auto fam = opuc::build_family(opuc::bernstein_szego_spec(0.5), 4096);
  for (double t : {0.0, 1.0, 2.0}) {
    for (std::size_t n : {2u, 16u, 128u}) {
      const auto d = opuc::phi_star_deviation(fam.measure, fam.params, opuc::unit(t), n);
      EXPECT_NEAR(d.deviation, 0.0, 1e-10);
      EXPECT_LE(d.kernel_residual, 1e-9);
    }
  }
}

TEST(PhiStarDeviation, DecreasesForSquareSummableParameters) {
  const auto fam = opuc::build_family(opuc::ell2_spec(0.5, 1.0), 4096);
  const cplx xi = opuc::unit(2.0);
  double previous = INFINITY;
  for (std::size_t n : {16u, 64u, 256u}) {
    const double d = opuc::phi_star_deviation(fam.measure, fam.params, xi, n).deviation;
    EXPECT_LT(d, previous);
    previous = d;
  }
  EXPECT_THROW(opuc::phi_star_deviation(opuc::build_family(opuc::geronimus_spec(cplx(0.2, 0.0)), 1024).measure,
                                        fam.params, xi, 4),
               opuc::Error);
}

TEST(KernelAtZero, TwoTermClosedForm) {
  const auto fam = opuc::build_family(opuc::geronimus_spec(cplx(0.1, 0.1)), 4096);
  for (double t : {0.5, 2.0, 3.0}) EXPECT_LE(opuc::kernel_at_zero_residual(fam.params, opuc::unit(t), 256), 1e-9);
  // Direct check of the closed form at one small order.
  const opuc::SchurParameters p(std::vector<cplx>{{0.3, 0.2}, {-0.1, 0.4}});
  const cplx xi = opuc::unit(0.7);
  const auto a = opuc::eval_pairs(p, xi, 2);
  const auto z = opuc::eval_pairs(p, 0.0, 2);
  const cplx sum = std::conj(z[0].phi) * a[0].phi + std::conj(z[1].phi) * a[1].phi;
  const cplx closed = a[2].phi_star * std::conj(z[2].phi_star) - a[2].phi * std::conj(z[2].phi);
  EXPECT_NEAR(std::abs(sum - closed), 0.0, 1e-14);
}
