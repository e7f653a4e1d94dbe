#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "weakpde/grid_field.hpp"
#include "weakpde/weights.hpp"

namespace weakpde {

/// Axis-aligned space-time box |x_a - center_a| <= halfwidth_a, physical units.
struct IntegrationDomain {
  std::vector<double> center;
  std::vector<double> halfwidth;

  bool operator==(const IntegrationDomain&) const = default;
};

/// A domain snapped to grid nodes: nodes first[a] .. first[a] + 2 * half[a].
struct NodeBox {
  std::vector<std::size_t> first;
  std::vector<std::size_t> half;
};

/// Snaps the halfwidth to the nearest whole number of cells (at least one)
/// and the center to the nearest admissible node.
NodeBox snap_domain(const GridGeometry& geometry, const IntegrationDomain& domain);
IntegrationDomain domain_of(const GridGeometry& geometry, const NodeBox& box);

/// One product  prefactor * (field monomial) * d^deriv(weight).
/// monomial holds an exponent per field component; deriv an order per axis
/// (x[, y], t). For curl-streamfunction weights deriv applies to psi.
struct TermPart {
  double prefactor = 1.0;
  std::vector<int> monomial;
  std::vector<int> deriv;
};

enum class TermSide { Target, Library };

/// A library term already in integrated-by-parts form: sum of parts.
struct TermSpec {
  std::string label;
  std::vector<TermPart> parts;
  TermSide side = TermSide::Library;
};

enum class BuiltinSystem { KuramotoSivashinsky, Kolmogorov, LambdaOmegaU, LambdaOmegaV };

BuiltinSystem parse_system(const std::string& id);
std::string system_id(BuiltinSystem system);

struct Library {
  BuiltinSystem system;
  int ndim_space = 1;
  int ncomp = 1;
  TermSpec target;
  std::vector<TermSpec> terms;
  WeightSpec default_weight;
  /// Highest spatial derivative order the weight must absorb.
  int required_spatial_order = 0;

  std::vector<std::string> labels() const;
};

Library builtin_library(BuiltinSystem system);

/// Largest weight-derivative order per axis used by any part.
std::vector<int> max_derivative_orders(const Library& library);

/// Throws InvalidWeight if `weight` cannot absorb the library's derivatives.
void check_weight_for_library(const WeightSpec& weight, const Library& library);

/// K centers drawn uniformly from [origin + H, origin + extent - H] per axis.
/// Throws DomainTooLarge if 2H exceeds the extent on some axis.
std::vector<IntegrationDomain> sample_domains(const GridGeometry& geometry, std::span<const double> halfwidth,
                                              std::size_t count, std::uint64_t seed);

/// Composite trapezoid weights for n nodes of spacing h.
std::vector<double> trapezoid_weights(std::size_t n, double h);

/// Composite trapezoidal rule over a row-major node box (last axis fastest).
/// Throws TooFewNodes if any axis has fewer than 2 nodes.
double quadrature(std::span<const double> values, std::span<const std::size_t> shape,
                  std::span<const double> spacing);

double assemble_column(const GridField& field, const TermSpec& term, const IntegrationDomain& domain,
                       const WeightSpec& weight);

struct LinearSystem {
  Eigen::MatrixXd Q;
  Eigen::VectorXd q0;
  std::vector<std::string> labels;
  Eigen::VectorXd column_norms;
  /// Domains after snapping, one per row.
  std::vector<IntegrationDomain> domains;
};

LinearSystem build_system(const GridField& field, const TermSpec& target, std::span<const TermSpec> library,
                          std::span<const IntegrationDomain> domains, const WeightSpec& weight);

}  // namespace weakpde
