#pragma once

// Truncated power series with complex coefficients.

#include <algorithm>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "opuc/error.hpp"

namespace opuc {

using cplx = std::complex<double>;

class TaylorSeries {
 public:
  TaylorSeries() : coefficients_(1) {}
  explicit TaylorSeries(std::vector<cplx> coefficients) : coefficients_(std::move(coefficients)) {
    if (coefficients_.empty()) fail(ErrorKind::InvalidArgument, "series needs at least one coefficient");
  }

  static TaylorSeries constant(cplx value, std::size_t order) {
    std::vector<cplx> c(order + 1);
    c[0] = value;
    return TaylorSeries(std::move(c));
  }

  std::size_t truncation_order() const { return coefficients_.size() - 1; }
  std::span<const cplx> coefficients() const { return coefficients_; }
  cplx operator[](std::size_t k) const { return coefficients_[k]; }

  cplx evaluate(cplx z) const {
    cplx acc{};
    for (std::size_t k = coefficients_.size(); k-- > 0;) acc = acc * z + coefficients_[k];
    return acc;
  }

  TaylorSeries conjugated() const {
    auto c = coefficients_;
    for (auto& v : c) v = std::conj(v);
    return TaylorSeries(std::move(c));
  }

  friend TaylorSeries operator+(TaylorSeries s, cplx v) {
    s.coefficients_[0] += v;
    return s;
  }
  friend TaylorSeries operator-(TaylorSeries s, cplx v) {
    s.coefficients_[0] -= v;
    return s;
  }
  friend TaylorSeries operator*(cplx v, TaylorSeries s) {
    for (auto& c : s.coefficients_) c *= v;
    return s;
  }

  /// Quotient a/b to the smaller of the two orders, by the triangular recursion.
  friend TaylorSeries divide(const TaylorSeries& a, const TaylorSeries& b) {
    if (std::abs(b[0]) < 1e-12) fail(ErrorKind::DivisionBlowup, "series denominator has vanishing constant term");
    const std::size_t m = std::min(a.truncation_order(), b.truncation_order());
    std::vector<cplx> q(m + 1);
    const cplx inv = 1.0 / b[0];
    for (std::size_t k = 0; k <= m; ++k) {
      cplx acc = a[k];
      for (std::size_t j = 1; j <= k; ++j) acc -= b[j] * q[k - j];
      q[k] = acc * inv;
    }
    return TaylorSeries(std::move(q));
  }

  /// (s - s_0) / z, one order lower.
  TaylorSeries shift_down() const {
    if (coefficients_.size() < 2) fail(ErrorKind::OutOfRange, "cannot shift a constant series");
    return TaylorSeries(std::vector<cplx>(coefficients_.begin() + 1, coefficients_.end()));
  }

 private:
  std::vector<cplx> coefficients_;
};

}  // namespace opuc
