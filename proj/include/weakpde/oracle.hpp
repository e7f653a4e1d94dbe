#pragma once

// Strong (pre-integration-by-parts) forms of the built-in library terms,
// evaluated on closed-form fields. Exists to check the weak assembly; the
// discovery path never calls into this header.

#include <string>
#include <vector>

#include "weakpde/analytic.hpp"
#include "weakpde/weak_system.hpp"

namespace weakpde {

/// d^deriv of one field component; deriv per axis (x[, y], t).
struct FieldFactor {
  int component = 0;
  std::vector<int> deriv;
};

/// prefactor * (product of factors) * d^weight_deriv w   (or of psi for the curl kind).
struct StrongPart {
  double prefactor = 1.0;
  std::vector<int> weight_deriv;
  std::vector<FieldFactor> factors;
};

struct StrongTerm {
  std::string label;
  std::vector<StrongPart> parts;
};

/// Target first, then the library terms in builtin_library order.
std::vector<StrongTerm> strong_library(BuiltinSystem system);

struct StrongValue {
  double value = 0.0;
  /// Integral of the sum of |part integrands|; a natural scale for zero-valued terms.
  double magnitude = 0.0;
};

/// Trapezoidal quadrature of w * f on the nodes of `geometry` inside the
/// snapped `domain`, with f taken from the closed form of `expr`.
StrongValue strong_column_oracle(const AnalyticField& expr, const StrongTerm& term, const GridGeometry& geometry,
                                 const IntegrationDomain& domain, const WeightSpec& weight);

struct OracleCheck {
  std::string system;
  std::string label;
  std::string field;
  double weak = 0.0;
  double strong = 0.0;
  /// |weak - strong| / scale on the finest grid.
  double difference = 0.0;
  /// Fitted log2 slope of |weak - strong| over the refinements; NaN when the
  /// finest difference is at rounding level.
  double order = 0.0;
  /// 2 when the trapezoid error of some integrand starts at h^2, else 4.
  int expected_order = 2;
  /// Richardson estimate of the limiting |weak - strong| / scale.
  double extrapolated = 0.0;
  /// difference <= tolerance on the reference grid.
  bool agree = false;
  bool extrapolated_agree = false;
  bool order_ok = false;
  /// Both forms converge to the same value at the predicted rate.
  bool consistent() const noexcept { return extrapolated_agree && order_ok; }
};

struct OracleOptions {
  double tolerance = 1e-4;
  double order_lo = 1.7;
  double order_hi = 2.3;
};

/// Weak vs strong for every built-in term and catalog field at the systems'
/// reference grid densities, with grids 4h, 2h, h.
std::vector<OracleCheck> run_oracle_battery(const OracleOptions& options = {});

}  // namespace weakpde
