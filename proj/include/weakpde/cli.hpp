#pragma once

// Workflow layer behind the weakpde command line tool: configuration,
// generate / corrupt / discover / sweep / validate, and report writing.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "weakpde/error.hpp"
#include "weakpde/regression.hpp"
#include "weakpde/solvers.hpp"

namespace weakpde::cli {

enum class SystemKind { KuramotoSivashinsky, Kolmogorov, LambdaOmega };

SystemKind parse_system_kind(const std::string& id);
std::string to_string(SystemKind kind);

struct DiscoverySettings {
  std::size_t K = 100;
  std::size_t M = 30;
  double gamma = 0.05;
  /// Overrides of the library's default weight exponents.
  std::optional<int> p;
  std::optional<int> q;
  /// Empty: per-system default.
  std::vector<double> halfwidth;
  std::uint64_t seed = 1;
};

struct RunConfig {
  SystemKind system = SystemKind::KuramotoSivashinsky;
  KSParams ks;
  RDParams lambda_omega;
  KolmogorovParams kolmogorov;
  DiscoverySettings discovery;
  std::vector<double> sigmas{0.0};
  std::uint64_t noise_seed = 2019;
  std::filesystem::path output = "weakpde-out";
};

/// Domain halfwidths used when none are configured.
std::vector<double> default_halfwidth(SystemKind kind);

/// Sets one "section.key" entry, e.g. "ks.dt" or "discover.K". Throws
/// Error(InvalidArgument) for unknown keys or unparsable values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Reads an INI-style file: [section] headers and key = value lines.
void load_config(const std::filesystem::path& path, RunConfig& config);

/// Checks parameter ranges before any compute starts.
void validate_config(const RunConfig& config);

/// 2 for usage and configuration errors, 1 for numerical or I/O failures.
int exit_code(const Error& error);

/// Sidecar path for a field file: "<file>.meta".
std::filesystem::path metadata_path(const std::filesystem::path& field);

struct GenerateResult {
  std::filesystem::path field;
  std::filesystem::path metadata;
  std::vector<std::string> warnings;
};

GenerateResult cmd_generate(const RunConfig& config, const std::filesystem::path& out);

void cmd_corrupt(const std::filesystem::path& in, const std::filesystem::path& out, double sigma, std::uint64_t seed);

/// One discovered equation (lambda-omega yields two).
struct EquationResult {
  std::string equation;
  double sigma = 0.0;
  std::uint64_t noise_seed = 0;
  EnsembleReport report;
  std::vector<double> halfwidth;
  WeightSpec weight;
};

/// Runs the ensemble on `field` for every equation of config.system.
/// Reference coefficients come from `metadata` (solver provenance) when given.
std::vector<EquationResult> discover(const RunConfig& config, const GridField& field, const Metadata* metadata,
                                     double sigma, std::uint64_t noise_seed);

/// Writes <prefix>.json and <prefix>.csv atomically.
void write_reports(const RunConfig& config, const std::vector<EquationResult>& results,
                   const std::filesystem::path& prefix);

std::string csv_header();

/// Weight verification and weak-strong oracle batteries; itemized lines go to
/// `out`. Returns true when everything passes. The hook swaps the curl
/// weight's temporal factor for a polynomial to exercise the failure path.
bool cmd_validate(std::ostream& out, bool force_polynomial_time = false);

}  // namespace weakpde::cli
