#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "weakpde/error.hpp"

namespace weakpde {

/// Univariate polynomial in a normalized coordinate; coefficients[i] multiplies x^i.
class Poly1D {
 public:
  Poly1D() = default;
  explicit Poly1D(std::vector<double> coefficients);

  /// (x^2 - 1)^p with exact integer coefficients.
  static Poly1D envelope(int p);

  Poly1D derivative(int order = 1) const;
  double operator()(double x) const;

  bool is_zero() const noexcept { return coefficients_.empty(); }
  int degree() const noexcept { return static_cast<int>(coefficients_.size()) - 1; }
  std::span<const double> coefficients() const noexcept { return coefficients_; }

 private:
  std::vector<double> coefficients_;  // trailing zeros trimmed; empty == 0
};

/// d^order/dx^order (x^2 - 1)^p.
Poly1D envelope_derivative(int p, int order);

enum class WeightKind { ScalarEnvelope, CurlStreamfunction };
enum class TemporalFactor { Polynomial, Sine };

/// Separable test function on the box [-1, 1]^(naxes) in normalized coordinates.
///
/// ScalarEnvelope:     w   = prod_space (s^2 - 1)^p * T(t)
/// CurlStreamfunction: psi = prod_space (s^2 - 1)^p * sin(pi t),  w = (d_y psi, -d_x psi)
///
/// T(t) is (t^2 - 1)^q for TemporalFactor::Polynomial and sin(pi t) for Sine.
struct WeightSpec {
  WeightKind kind = WeightKind::ScalarEnvelope;
  int p = 4;
  int q = 3;
  TemporalFactor temporal = TemporalFactor::Polynomial;

  static WeightSpec scalar_envelope(int p, int q) { return {WeightKind::ScalarEnvelope, p, q, TemporalFactor::Polynomial}; }
  static WeightSpec curl_streamfunction(int p) { return {WeightKind::CurlStreamfunction, p, 0, TemporalFactor::Sine}; }

  bool operator==(const WeightSpec&) const = default;
};

/// Throws InvalidWeight if the spec breaks its kind's invariants
/// (curl kind needs p >= 3 and the sine temporal factor).
void validate(const WeightSpec& spec);

/// Derivative of order `order` of the spatial envelope factor at normalized s,
/// without chain-rule scaling.
double spatial_factor(const WeightSpec& spec, int order, double s);
/// Same for the temporal factor at normalized t.
double temporal_factor(const WeightSpec& spec, int order, double t);

/// Value of d^deriv w (scalar kind) or d^deriv psi (curl kind) at a normalized
/// point, in physical coordinates: an order-m derivative along an axis carries
/// halfwidth[axis]^-m. Layout of deriv, point and halfwidth: (x[, y], t).
/// Throws OutOfRange if any |point| > 1.
double eval_weight(const WeightSpec& spec, std::span<const int> deriv, std::span<const double> point,
                   std::span<const double> halfwidth);

/// d^deriv of the vector weight w = (d_y psi, -d_x psi) for the curl kind (2D only).
std::array<double, 2> eval_curl_weight(const WeightSpec& spec, std::span<const int> deriv,
                                       std::span<const double> point, std::span<const double> halfwidth);

struct WeightReport {
  bool boundary_ok = true;
  bool divergence_ok = true;
  bool time_mean_ok = true;
  double max_boundary = 0.0;
  double max_divergence = 0.0;
  double max_time_mean = 0.0;
  std::vector<std::string> violations;

  bool ok() const noexcept { return violations.empty(); }
};

struct WeightCheckOptions {
  int samples = 1000;
  std::uint64_t seed = 20190901;
  double tolerance = 1e-12;
  std::size_t time_nodes = 2001;
};

/// Numerically confirms, on random samples:
///  - w and all spatial derivatives below `required_spatial_order` vanish on
///    every face of the box (scalar kind), or w = curl(psi) and its first
///    spatial derivatives vanish (curl kind);
///  - div w = 0 at interior points (curl kind);
///  - the trapezoidal time integral of both components of w over [-1, 1] is
///    below tolerance (curl kind).
/// Violations are reported, never thrown.
WeightReport verify_weight(const WeightSpec& spec, int ndim_space, int required_spatial_order,
                           const WeightCheckOptions& options = {});

}  // namespace weakpde
