#pragma once

#include <span>
#include <string>
#include <vector>

#include "weakpde/grid_field.hpp"

namespace weakpde {

/// One plane wave a_c * sin(k . x + omega * t + phase) per component c.
struct SinusoidMode {
  std::vector<double> amplitude;  // per component
  std::vector<double> wavevector; // per space axis
  double omega = 0.0;
  double phase = 0.0;
};

/// coefficient * prod_axis coord^exponent, per component.
struct PolynomialTerm {
  int component = 0;
  double coefficient = 1.0;
  std::vector<int> exponents;  // per axis, time last
};

/// Closed-form fields from a fixed catalog, with exact derivatives of any
/// order. Used to synthesize smooth data with known derivatives.
class AnalyticField {
 public:
  enum class Kind { Sinusoid, Polynomial, Constant };

  static AnalyticField sinusoid(int ndim_space, std::vector<SinusoidMode> modes);
  static AnalyticField polynomial(int ndim_space, int ncomp, std::vector<PolynomialTerm> terms);
  static AnalyticField constant(int ndim_space, std::vector<double> values);

  /// Catalog lookup by id ("sinusoid", "polynomial", "constant") with a flat
  /// parameter list:
  ///   sinusoid:   per mode [a_0..a_{nc-1}, k_0..k_{nd-1}, omega, phase]
  ///   polynomial: per term [component, coefficient, e_0..e_nd]
  ///   constant:   [v_0..v_{nc-1}]
  /// Throws UnknownExpression for any other id.
  static AnalyticField from_id(const std::string& id, int ndim_space, int ncomp,
                               std::span<const double> params);

  Kind kind() const noexcept { return kind_; }
  int ndim_space() const noexcept { return ndim_space_; }
  int ncomp() const noexcept { return ncomp_; }

  /// point = (x[, y], t); orders per axis in the same layout.
  double derivative(int component, std::span<const int> orders, std::span<const double> point) const;
  double value(int component, std::span<const double> point) const;

 private:
  Kind kind_ = Kind::Constant;
  int ndim_space_ = 1;
  int ncomp_ = 1;
  std::vector<SinusoidMode> modes_;
  std::vector<PolynomialTerm> terms_;
  std::vector<double> constants_;
};

/// Samples `expr` exactly at every node of `geometry`.
GridField eval_analytic(const GridGeometry& geometry, const AnalyticField& expr);

}  // namespace weakpde
