#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "weakpde/grid_field.hpp"
#include "weakpde/weak_system.hpp"

namespace weakpde {

/// Relative singular-value cutoff used for rank decisions.
inline constexpr double kRankCutoff = 1e-10;

/// Minimum-norm least-squares solution (pseudo-inverse semantics) via SVD.
/// Throws ShapeMismatch if K < N and NonFiniteInput on NaN/Inf.
Eigen::VectorXd least_squares(const Eigen::MatrixXd& Q, const Eigen::VectorXd& q0);

struct RegressionResult {
  Eigen::VectorXd coefficients;
  std::vector<bool> active;
  double residual_norm = 0.0;
  int iterations = 0;
};

/// Sequential thresholding: fit the active columns, drop every active n with
/// |c_n| * ||q_n|| < gamma * ||q0||, refit, until the active set is stable.
/// `initial_active` (default: all) restricts the starting set.
RegressionResult sparsify(const Eigen::MatrixXd& Q, const Eigen::VectorXd& q0, double gamma,
                          const std::vector<bool>& initial_active = {});

struct RelativeErrors {
  /// |(est - ref) / ref| where ref != 0, NaN elsewhere.
  std::vector<double> relative;
  /// |est| where ref == 0, NaN elsewhere.
  std::vector<double> absolute;
};

RelativeErrors relative_errors(const Eigen::VectorXd& estimated, const Eigen::VectorXd& reference);

struct CoefficientSummary {
  std::string label;
  double reference = 0.0;
  double c_mean = 0.0, c_min = 0.0, c_max = 0.0;
  /// Relative error statistics; NaN for terms absent from the reference model
  /// or when no member matched its structure.
  double delta_mean = 0.0, delta_min = 0.0, delta_max = 0.0;
};

struct MemberResult {
  std::uint64_t seed = 0;
  RegressionResult regression;
  bool structure_match = false;
  std::vector<std::string> spurious;
  std::vector<std::string> missing;
  /// Snapped halfwidths (identical for every domain of a member).
  std::vector<double> halfwidth;
};

struct EnsembleReport {
  std::vector<std::string> labels;
  std::vector<CoefficientSummary> coefficients;
  std::vector<MemberResult> members;
  /// Fraction of members whose active set equals the reference support.
  /// NaN without a reference.
  double success_rate = 0.0;
  std::size_t successful_members = 0;
  Eigen::VectorXd mean_column_norms;
};

struct EnsembleConfig {
  std::size_t K = 100;
  std::size_t M = 30;
  double gamma = 0.05;
  std::uint64_t seed = 1;
  std::vector<double> halfwidth;
  WeightSpec weight;
  /// Reference coefficients, zero for terms absent from the true model.
  std::optional<Eigen::VectorXd> reference;
};

/// M independent build + sparsify runs; member m uses
/// derive_seed(config.seed, m) for its domain draw. Coefficient statistics are
/// taken over structure-matching members when a reference is given, over all
/// members otherwise.
EnsembleReport ensemble_discover(const GridField& field, const Library& library, const EnsembleConfig& config);

}  // namespace weakpde
