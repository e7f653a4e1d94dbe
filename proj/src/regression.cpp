#include "weakpde/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "weakpde/error.hpp"
#include "weakpde/random.hpp"

namespace weakpde {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Eigen::VectorXd solve_active(const Eigen::MatrixXd& Q, const Eigen::VectorXd& q0, const std::vector<bool>& active) {
  std::vector<Eigen::Index> cols;
  for (std::size_t n = 0; n < active.size(); ++n)
    if (active[n]) cols.push_back(static_cast<Eigen::Index>(n));
  Eigen::VectorXd c = Eigen::VectorXd::Zero(Q.cols());
  if (cols.empty()) return c;
  Eigen::MatrixXd sub(Q.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) sub.col(static_cast<Eigen::Index>(j)) = Q.col(cols[j]);
  const Eigen::VectorXd x = least_squares(sub, q0);
  for (std::size_t j = 0; j < cols.size(); ++j) c(cols[j]) = x(static_cast<Eigen::Index>(j));
  return c;
}

}  // namespace

Eigen::VectorXd least_squares(const Eigen::MatrixXd& Q, const Eigen::VectorXd& q0) {
  if (Q.rows() != q0.size()) throw Error(ErrorCode::ShapeMismatch, "Q and q0 row counts differ");
  if (Q.rows() < Q.cols())
    throw Error(ErrorCode::ShapeMismatch, "need K >= N (K = " + std::to_string(Q.rows()) +
                                              ", N = " + std::to_string(Q.cols()) + ")");
  if (!Q.allFinite() || !q0.allFinite()) throw Error(ErrorCode::NonFiniteInput, "non-finite entries in the system");
  if (Q.cols() == 0) return Eigen::VectorXd();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Q, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(kRankCutoff);
  return svd.solve(q0);
}

RegressionResult sparsify(const Eigen::MatrixXd& Q, const Eigen::VectorXd& q0, double gamma,
                          const std::vector<bool>& initial_active) {
  if (!(gamma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be >= 0");
  const auto N = static_cast<std::size_t>(Q.cols());
  std::vector<bool> active = initial_active.empty() ? std::vector<bool>(N, true) : initial_active;
  if (active.size() != N) throw Error(ErrorCode::ShapeMismatch, "initial active mask has wrong length");
  if (Q.rows() < Q.cols()) throw Error(ErrorCode::ShapeMismatch, "need K >= N");

  const double threshold = gamma * q0.norm();
  const Eigen::VectorXd norms = Q.colwise().norm().transpose();
  RegressionResult result;
  for (;;) {
    ++result.iterations;
    result.coefficients = solve_active(Q, q0, active);
    bool changed = false;
    for (std::size_t n = 0; n < N; ++n) {
      if (active[n] && std::abs(result.coefficients(n)) * norms(n) < threshold) {
        active[n] = false;
        changed = true;
      }
    }
    if (!changed) break;
    if (std::none_of(active.begin(), active.end(), [](bool a) { return a; })) {
      result.coefficients.setZero();
      break;
    }
  }
  result.active = active;
  result.residual_norm = (q0 - Q * result.coefficients).norm();
  return result;
}

RelativeErrors relative_errors(const Eigen::VectorXd& estimated, const Eigen::VectorXd& reference) {
  if (estimated.size() != reference.size()) throw Error(ErrorCode::ShapeMismatch, "coefficient vectors differ in length");
  RelativeErrors out;
  for (Eigen::Index n = 0; n < estimated.size(); ++n) {
    if (reference(n) != 0.0) {
      out.relative.push_back(std::abs((estimated(n) - reference(n)) / reference(n)));
      out.absolute.push_back(kNaN);
    } else {
      out.relative.push_back(kNaN);
      out.absolute.push_back(std::abs(estimated(n)));
    }
  }
  return out;
}

EnsembleReport ensemble_discover(const GridField& field, const Library& library, const EnsembleConfig& config) {
  if (config.M == 0) throw Error(ErrorCode::InvalidArgument, "ensemble needs M >= 1");
  if (config.K < library.terms.size())
    throw Error(ErrorCode::ShapeMismatch, "need K >= N (K = " + std::to_string(config.K) + ")");
  if (field.ndim_space() != library.ndim_space || field.ncomp() != library.ncomp)
    throw Error(ErrorCode::ShapeMismatch, "field layout does not match the " + system_id(library.system) + " library");
  check_weight_for_library(config.weight, library);
  const auto N = static_cast<Eigen::Index>(library.terms.size());
  if (config.reference && config.reference->size() != N)
    throw Error(ErrorCode::ShapeMismatch, "reference model has wrong length");

  EnsembleReport report;
  report.labels = library.labels();
  report.members.resize(config.M);
  report.mean_column_norms = Eigen::VectorXd::Zero(N);

  // Members are independent; results land in fixed slots so aggregation below
  // runs in member order regardless of scheduling.
  for (std::size_t m = 0; m < config.M; ++m) {
    MemberResult& member = report.members[m];
    member.seed = derive_seed(config.seed, m);
    try {
      const auto domains = sample_domains(field.geometry(), config.halfwidth, config.K, member.seed);
      const LinearSystem sys = build_system(field, library.target, library.terms, domains, config.weight);
      member.halfwidth = sys.domains.front().halfwidth;
      member.regression = sparsify(sys.Q, sys.q0, config.gamma);
      report.mean_column_norms += sys.column_norms / static_cast<double>(config.M);
    } catch (const Error& e) {
      throw Error(e.code(), "ensemble member " + std::to_string(m) + ": " + e.what());
    }
    if (config.reference) {
      member.structure_match = true;
      for (Eigen::Index n = 0; n < N; ++n) {
        const bool expected = (*config.reference)(n) != 0.0;
        const bool found = member.regression.active[static_cast<std::size_t>(n)];
        if (found && !expected) member.spurious.push_back(report.labels[n]);
        if (!found && expected) member.missing.push_back(report.labels[n]);
      }
      member.structure_match = member.spurious.empty() && member.missing.empty();
    }
  }

  std::vector<const MemberResult*> pool;
  for (const auto& m : report.members)
    if (!config.reference || m.structure_match) pool.push_back(&m);
  report.successful_members = config.reference ? pool.size() : config.M;
  report.success_rate =
      config.reference ? static_cast<double>(pool.size()) / static_cast<double>(config.M) : kNaN;

  for (Eigen::Index n = 0; n < N; ++n) {
    CoefficientSummary s;
    s.label = report.labels[n];
    s.reference = config.reference ? (*config.reference)(n) : kNaN;
    if (pool.empty()) {
      s.c_mean = s.c_min = s.c_max = s.delta_mean = s.delta_min = s.delta_max = kNaN;
    } else {
      double sum = 0.0, dsum = 0.0;
      s.c_min = s.delta_min = std::numeric_limits<double>::infinity();
      s.c_max = s.delta_max = -std::numeric_limits<double>::infinity();
      for (const MemberResult* m : pool) {
        const double c = m->regression.coefficients(n);
        sum += c;
        s.c_min = std::min(s.c_min, c);
        s.c_max = std::max(s.c_max, c);
        if (config.reference && s.reference != 0.0) {
          const double d = std::abs((c - s.reference) / s.reference);
          dsum += d;
          s.delta_min = std::min(s.delta_min, d);
          s.delta_max = std::max(s.delta_max, d);
        }
      }
      s.c_mean = sum / static_cast<double>(pool.size());
      if (config.reference && s.reference != 0.0) {
        s.delta_mean = dsum / static_cast<double>(pool.size());
      } else {
        s.delta_mean = s.delta_min = s.delta_max = kNaN;
      }
    }
    report.coefficients.push_back(s);
  }
  return report;
}

}  // namespace weakpde
