// weakpde: generate surrogate data, corrupt it, and discover its PDE.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "weakpde/cli.hpp"
#include "weakpde/random.hpp"

namespace fs = std::filesystem;
using namespace weakpde;
using namespace weakpde::cli;

namespace {

struct Common {
  std::string config_file;
  std::vector<std::string> overrides;
  std::string system;
};

void add_common(CLI::App* cmd, Common& c, bool with_system) {
  cmd->add_option("-c,--config", c.config_file, "INI-style config file ([section] key = value)");
  cmd->add_option("--set", c.overrides, "Override one setting, e.g. --set ks.dt=0.2 (repeatable)");
  if (with_system) cmd->add_option("-s,--system", c.system, "ks | kolmogorov | lambda_omega");
}

RunConfig resolve(const Common& c) {
  RunConfig config;
  if (!c.config_file.empty()) load_config(c.config_file, config);
  if (!c.system.empty()) config.system = parse_system_kind(c.system);
  for (const auto& kv : c.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::InvalidArgument, "--set expects key=value, got '" + kv + "'");
    apply_setting(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  validate_config(config);
  return config;
}

std::optional<Metadata> sidecar(const fs::path& field) {
  const fs::path meta = metadata_path(field);
  if (!fs::exists(meta)) return std::nullopt;
  return read_metadata(meta);
}

// Adopt the generating system when the user did not name one.
void adopt_system(RunConfig& config, const Common& c, const std::optional<Metadata>& meta) {
  if (!c.system.empty() || !meta) return;
  auto it = meta->find("system");
  if (it != meta->end()) config.system = parse_system_kind(it->second);
}

double metadata_sigma(const std::optional<Metadata>& meta) {
  if (!meta) return 0.0;
  auto it = meta->find("noise_sigma");
  return it == meta->end() ? 0.0 : std::stod(it->second);
}

std::uint64_t metadata_seed(const std::optional<Metadata>& meta) {
  if (!meta) return 0;
  auto it = meta->find("noise_seed");
  return it == meta->end() ? 0 : std::stoull(it->second);
}

void summarize(const std::vector<EquationResult>& results) {
  for (const auto& r : results) {
    std::cout << r.equation << "  sigma=" << r.sigma << "  success_rate=" << r.report.success_rate << "\n";
    for (const auto& c : r.report.coefficients)
      std::cout << "  " << c.label << ": mean " << c.c_mean << " [" << c.c_min << ", " << c.c_max << "]"
                << "  ref " << c.reference << "  delta_mean " << c.delta_mean << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weak-form sparse regression for PDE discovery"};
  app.require_subcommand(1);

  Common gen_common;
  std::string gen_out;
  auto* gen = app.add_subcommand("generate", "Integrate a surrogate system and write field + metadata");
  add_common(gen, gen_common, true);
  gen->add_option("-o,--out", gen_out, "Field file (default <run.output>/<system>.wfpd)");

  std::string cor_in, cor_out;
  double cor_sigma = 0.0;
  std::uint64_t cor_seed = 2019;
  auto* cor = app.add_subcommand("corrupt", "Add i.i.d. Gaussian noise to a field file");
  cor->add_option("-i,--in", cor_in, "Input field")->required();
  cor->add_option("-o,--out", cor_out, "Output field")->required();
  cor->add_option("--sigma", cor_sigma, "Noise standard deviation")->required();
  cor->add_option("--seed", cor_seed, "Noise seed");

  Common dis_common;
  std::string dis_in, dis_out;
  auto* dis = app.add_subcommand("discover", "Run the ensemble regression on a field file");
  add_common(dis, dis_common, true);
  dis->add_option("-i,--in", dis_in, "Field file")->required();
  dis->add_option("-o,--out", dis_out, "Report prefix (default <run.output>/discover)");

  Common sw_common;
  std::string sw_in, sw_out, sw_sigmas;
  auto* sw = app.add_subcommand("sweep", "Corrupt a clean field at several noise levels and discover each");
  add_common(sw, sw_common, true);
  sw->add_option("-i,--in", sw_in, "Clean field file")->required();
  sw->add_option("-o,--out", sw_out, "Report prefix (default <run.output>/sweep)");
  sw->add_option("--sigmas", sw_sigmas, "Comma-separated noise levels (overrides run.sigmas)");

  bool force_poly = false;
  auto* val = app.add_subcommand("validate", "Check weight invariants and weak-strong consistency");
  val->add_flag("--force-polynomial-time", force_poly,
                "Test hook: give the curl weight a polynomial temporal factor (must fail)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      const RunConfig config = resolve(gen_common);
      const fs::path out = gen_out.empty() ? config.output / (to_string(config.system) + ".wfpd") : fs::path(gen_out);
      const auto t0 = std::chrono::steady_clock::now();
      const GenerateResult r = cmd_generate(config, out);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
      const GridField f = load_field(r.field);
      std::cout << "wrote " << r.field.string() << " (shape";
      for (auto n : f.geometry().shape) std::cout << " " << n;
      std::cout << ", " << f.ncomp() << " component" << (f.ncomp() > 1 ? "s" : "") << ") in " << secs << " s\n";
      std::cout << "metadata " << r.metadata.string() << "\n";
      return 0;
    }
    if (*cor) {
      cmd_corrupt(cor_in, cor_out, cor_sigma, cor_seed);
      std::cout << "wrote " << cor_out << " (sigma " << cor_sigma << ", seed " << cor_seed << ")\n";
      return 0;
    }
    if (*dis) {
      const auto meta = sidecar(dis_in);
      RunConfig config = resolve(dis_common);
      adopt_system(config, dis_common, meta);
      validate_config(config);
      const GridField field = load_field(dis_in);
      const double sigma = metadata_sigma(meta);
      auto results = discover(config, field, meta ? &*meta : nullptr, sigma, metadata_seed(meta));
      const fs::path prefix = dis_out.empty() ? config.output / "discover" : fs::path(dis_out);
      write_reports(config, results, prefix);
      summarize(results);
      std::cout << "reports " << prefix.string() << ".json, " << prefix.string() << ".csv\n";
      return 0;
    }
    if (*sw) {
      const auto meta = sidecar(sw_in);
      Common c = sw_common;
      if (!sw_sigmas.empty()) c.overrides.push_back("run.sigmas=" + sw_sigmas);
      RunConfig config = resolve(c);
      adopt_system(config, c, meta);
      validate_config(config);
      const GridField clean = load_field(sw_in);
      std::vector<EquationResult> all;
      for (std::size_t i = 0; i < config.sigmas.size(); ++i) {
        const double sigma = config.sigmas[i];
        const std::uint64_t seed = derive_seed(config.noise_seed, i);
        const GridField noisy = add_noise(clean, {sigma, seed});
        auto results = discover(config, noisy, meta ? &*meta : nullptr, sigma, seed);
        summarize(results);
        for (auto& r : results) all.push_back(std::move(r));
      }
      const fs::path prefix = sw_out.empty() ? config.output / "sweep" : fs::path(sw_out);
      write_reports(config, all, prefix);
      std::cout << "reports " << prefix.string() << ".json, " << prefix.string() << ".csv\n";
      return 0;
    }
    if (*val) {
      const bool ok = cmd_validate(std::cout, force_poly);
      std::cout << (ok ? "validate: all checks passed" : "validate: FAILURES above") << "\n";
      return ok ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
