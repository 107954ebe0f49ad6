#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "opuc/error.hpp"

namespace opuc {

using cplx = std::complex<double>;

inline constexpr double kParameterEscape = 1.0 - 1e-12;

/// Verblunsky (= Schur) parameters a_n with |a_n| < 1, plus rho_n = sqrt(1 - |a_n|^2).
class SchurParameters {
 public:
  SchurParameters() = default;

  explicit SchurParameters(std::vector<cplx> values) : values_(std::move(values)) {
    rho_.reserve(values_.size());
    for (std::size_t n = 0; n < values_.size(); ++n) {
      const double m = std::abs(values_[n]);
      if (!std::isfinite(m) || m > kParameterEscape) {
        fail(ErrorKind::ParameterEscape, "parameter " + std::to_string(n) + " has modulus " + std::to_string(m));
      }
      rho_.push_back(std::sqrt((1.0 - m) * (1.0 + m)));
    }
  }

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  cplx operator[](std::size_t n) const { return values_[n]; }
  double rho(std::size_t n) const { return rho_[n]; }
  std::span<const cplx> values() const { return values_; }

  /// First `count` parameters.
  SchurParameters head(std::size_t count) const {
    if (count > size()) fail(ErrorKind::OutOfRange, "requested more parameters than stored");
    return SchurParameters(std::vector<cplx>(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(count)));
  }

  friend bool operator==(const SchurParameters& a, const SchurParameters& b) { return a.values_ == b.values_; }

 private:
  std::vector<cplx> values_;
  std::vector<double> rho_;
};

/// Parameters of the dual measure (Schur function -f): a_n -> -a_n.
inline SchurParameters dual_parameters(const SchurParameters& params) {
  std::vector<cplx> v(params.values().begin(), params.values().end());
  for (auto& a : v) a = -a;
  return SchurParameters(std::move(v));
}

}  // namespace opuc
