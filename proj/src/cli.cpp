#include "weakpde/cli.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "weakpde/oracle.hpp"
#include "weakpde/random.hpp"
#include "weakpde/weak_system.hpp"
#include "weakpde/weights.hpp"

namespace weakpde::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw Error(ErrorCode::InvalidArgument, "cannot parse '" + value + "' for " + key);
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) bad_value(key, text);
  return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) bad_value(key, text);
  return v;
}

int to_int(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) bad_value(key, text);
  return v;
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
  if (out.empty()) bad_value(key, text);
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

template <class T>
Setter real(T RunConfig::*group, double T::*field) {
  return [=](RunConfig& c, const std::string& k, const std::string& v) { (c.*group).*field = to_double(k, v); };
}
template <class T>
Setter integer(T RunConfig::*group, int T::*field) {
  return [=](RunConfig& c, const std::string& k, const std::string& v) { (c.*group).*field = to_int(k, v); };
}
template <class T>
Setter text(T RunConfig::*group, std::string T::*field) {
  return [=](RunConfig& c, const std::string&, const std::string& v) { (c.*group).*field = trim(v); };
}

const std::map<std::string, Setter>& settings() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    t["run.system"] = [](RunConfig& c, const std::string&, const std::string& v) { c.system = parse_system_kind(trim(v)); };
    t["run.seed"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.discovery.seed = to_u64(k, v); };
    t["run.noise_seed"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.noise_seed = to_u64(k, v); };
    t["run.output"] = [](RunConfig& c, const std::string&, const std::string& v) { c.output = trim(v); };
    t["run.sigmas"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.sigmas = to_list(k, v); };

    t["discover.K"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.discovery.K = to_u64(k, v); };
    t["discover.M"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.discovery.M = to_u64(k, v); };
    t["discover.gamma"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.discovery.gamma = to_double(k, v); };
    t["discover.p"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.discovery.p = to_int(k, v); };
    t["discover.q"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.discovery.q = to_int(k, v); };
    t["discover.halfwidth"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.discovery.halfwidth = to_list(k, v); };
    t["discover.seed"] = t["run.seed"];

    t["ks.length"] = real(&RunConfig::ks, &KSParams::length);
    t["ks.duration"] = real(&RunConfig::ks, &KSParams::duration);
    t["ks.dx"] = real(&RunConfig::ks, &KSParams::dx);
    t["ks.dt"] = real(&RunConfig::ks, &KSParams::dt);
    t["ks.substeps"] = integer(&RunConfig::ks, &KSParams::substeps);
    t["ks.initial_condition"] = text(&RunConfig::ks, &KSParams::initial_condition);
    t["ks.ic_amplitude"] = real(&RunConfig::ks, &KSParams::ic_amplitude);
    t["ks.ic_mode"] = integer(&RunConfig::ks, &KSParams::ic_mode);

    t["lambda_omega.D"] = real(&RunConfig::lambda_omega, &RDParams::D);
    t["lambda_omega.beta"] = real(&RunConfig::lambda_omega, &RDParams::beta);
    t["lambda_omega.length"] = real(&RunConfig::lambda_omega, &RDParams::length);
    t["lambda_omega.duration"] = real(&RunConfig::lambda_omega, &RDParams::duration);
    t["lambda_omega.dx"] = real(&RunConfig::lambda_omega, &RDParams::dx);
    t["lambda_omega.dt"] = real(&RunConfig::lambda_omega, &RDParams::dt);
    t["lambda_omega.substeps"] = integer(&RunConfig::lambda_omega, &RDParams::substeps);
    t["lambda_omega.initial_condition"] = text(&RunConfig::lambda_omega, &RDParams::initial_condition);
    t["lambda_omega.ic_u"] = real(&RunConfig::lambda_omega, &RDParams::ic_u);
    t["lambda_omega.ic_v"] = real(&RunConfig::lambda_omega, &RDParams::ic_v);

    t["kolmogorov.c1"] = real(&RunConfig::kolmogorov, &KolmogorovParams::c1);
    t["kolmogorov.c2"] = real(&RunConfig::kolmogorov, &KolmogorovParams::c2);
    t["kolmogorov.c3"] = real(&RunConfig::kolmogorov, &KolmogorovParams::c3);
    t["kolmogorov.amplitude"] = real(&RunConfig::kolmogorov, &KolmogorovParams::amplitude);
    t["kolmogorov.kappa"] = real(&RunConfig::kolmogorov, &KolmogorovParams::kappa);
    t["kolmogorov.lx"] = real(&RunConfig::kolmogorov, &KolmogorovParams::lx);
    t["kolmogorov.ly"] = real(&RunConfig::kolmogorov, &KolmogorovParams::ly);
    t["kolmogorov.duration"] = real(&RunConfig::kolmogorov, &KolmogorovParams::duration);
    t["kolmogorov.spinup"] = real(&RunConfig::kolmogorov, &KolmogorovParams::spinup);
    t["kolmogorov.dx"] = real(&RunConfig::kolmogorov, &KolmogorovParams::dx);
    t["kolmogorov.output_dt"] = real(&RunConfig::kolmogorov, &KolmogorovParams::output_dt);
    t["kolmogorov.time_stride"] = integer(&RunConfig::kolmogorov, &KolmogorovParams::time_stride);
    t["kolmogorov.space_stride"] = integer(&RunConfig::kolmogorov, &KolmogorovParams::space_stride);
    t["kolmogorov.initial_condition"] = text(&RunConfig::kolmogorov, &KolmogorovParams::initial_condition);
    t["kolmogorov.perturbation"] = real(&RunConfig::kolmogorov, &KolmogorovParams::perturbation);
    t["kolmogorov.seed"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.kolmogorov.seed = to_u64(k, v); };
    return t;
  }();
  return table;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

std::string weight_kind(const WeightSpec& w) {
  return w.kind == WeightKind::CurlStreamfunction ? "curl-streamfunction" : "scalar-envelope";
}

std::string csv_number(double v) {
  if (!std::isfinite(v)) return "nan";
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

Metadata solver_metadata(const RunConfig& config) {
  switch (config.system) {
    case SystemKind::KuramotoSivashinsky: return metadata_of(config.ks);
    case SystemKind::Kolmogorov: return metadata_of(config.kolmogorov);
    case SystemKind::LambdaOmega: return metadata_of(config.lambda_omega);
  }
  return {};
}

}  // namespace

SystemKind parse_system_kind(const std::string& id) {
  if (id == "ks") return SystemKind::KuramotoSivashinsky;
  if (id == "kolmogorov") return SystemKind::Kolmogorov;
  if (id == "lambda_omega") return SystemKind::LambdaOmega;
  throw Error(ErrorCode::UnknownSystem, "unknown system '" + id + "' (expected ks, kolmogorov or lambda_omega)");
}

std::string to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::KuramotoSivashinsky: return "ks";
    case SystemKind::Kolmogorov: return "kolmogorov";
    case SystemKind::LambdaOmega: return "lambda_omega";
  }
  return "?";
}

std::vector<double> default_halfwidth(SystemKind kind) {
  switch (kind) {
    case SystemKind::KuramotoSivashinsky: return {12.25, 10.0};
    case SystemKind::Kolmogorov: return {5.6, 7.2, 17.25};
    case SystemKind::LambdaOmega: return {1.0, 1.0, 1.25};
  }
  return {};
}

void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
  const auto& table = settings();
  auto it = table.find(key);
  if (it == table.end()) throw Error(ErrorCode::InvalidArgument, "unknown setting '" + key + "'");
  it->second(config, key, value);
}

void load_config(const fs::path& path, RunConfig& config) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorCode::InvalidArgument, "config " + path.string() + ": " + e.message() + " (line " +
                                                std::to_string(e.line()) + ")");
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      apply_setting(config, "run." + section, body.data());
      continue;
    }
    for (const auto& [key, value] : body) apply_setting(config, section + "." + key, value.data());
  }
}

void validate_config(const RunConfig& config) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); };
  const auto& d = config.discovery;
  if (d.K == 0) fail("discover.K must be >= 1");
  if (d.M == 0) fail("discover.M must be >= 1");
  if (!(d.gamma >= 0.0)) fail("discover.gamma must be >= 0");
  if (d.p && *d.p < 1) fail("discover.p must be >= 1");
  if (d.q && *d.q < 1) fail("discover.q must be >= 1");
  const std::size_t naxes = config.system == SystemKind::KuramotoSivashinsky ? 2 : 3;
  if (!d.halfwidth.empty()) {
    if (d.halfwidth.size() != naxes)
      fail("discover.halfwidth needs " + std::to_string(naxes) + " values for " + to_string(config.system));
    for (double h : d.halfwidth)
      if (!(h > 0.0)) fail("discover.halfwidth entries must be positive");
  }
  for (double s : config.sigmas)
    if (!(s >= 0.0) || !std::isfinite(s)) fail("run.sigmas entries must be finite and >= 0");

  auto positive = [&](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) fail(std::string(name) + " must be positive");
  };
  switch (config.system) {
    case SystemKind::KuramotoSivashinsky:
      positive(config.ks.length, "ks.length");
      positive(config.ks.duration, "ks.duration");
      positive(config.ks.dx, "ks.dx");
      positive(config.ks.dt, "ks.dt");
      if (config.ks.substeps < 1) fail("ks.substeps must be >= 1");
      break;
    case SystemKind::LambdaOmega:
      positive(config.lambda_omega.length, "lambda_omega.length");
      positive(config.lambda_omega.duration, "lambda_omega.duration");
      positive(config.lambda_omega.dx, "lambda_omega.dx");
      positive(config.lambda_omega.dt, "lambda_omega.dt");
      if (config.lambda_omega.D < 0.0) fail("lambda_omega.D must be >= 0");
      if (config.lambda_omega.substeps < 1) fail("lambda_omega.substeps must be >= 1");
      break;
    case SystemKind::Kolmogorov: {
      const auto& k = config.kolmogorov;
      positive(k.lx, "kolmogorov.lx");
      positive(k.ly, "kolmogorov.ly");
      positive(k.duration, "kolmogorov.duration");
      positive(k.dx, "kolmogorov.dx");
      positive(k.output_dt, "kolmogorov.output_dt");
      if (k.spinup < 0.0) fail("kolmogorov.spinup must be >= 0");
      if (k.time_stride < 1) fail("kolmogorov.time_stride must be >= 1");
      if (k.space_stride < 1) fail("kolmogorov.space_stride must be >= 1");
      break;
    }
  }
}

int exit_code(const Error& error) {
  switch (error.code()) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::UnknownSystem:
    case ErrorCode::UnknownExpression:
    case ErrorCode::InvalidWeight:
    case ErrorCode::InvalidDimension:
    case ErrorCode::DegenerateAxis:
    case ErrorCode::DomainTooLarge:
    case ErrorCode::OutOfRange:
    case ErrorCode::EmptyResult:
      return 2;
    default:
      return 1;
  }
}

fs::path metadata_path(const fs::path& field) { return fs::path(field.string() + ".meta"); }

GenerateResult cmd_generate(const RunConfig& config, const fs::path& out) {
  validate_config(config);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  GenerateResult result{out, metadata_path(out), {}};
  Metadata meta = solver_metadata(config);
  switch (config.system) {
    case SystemKind::KuramotoSivashinsky:
      save_field(solve_ks(config.ks), out);
      break;
    case SystemKind::LambdaOmega:
      save_field(solve_lambda_omega(config.lambda_omega), out);
      break;
    case SystemKind::Kolmogorov: {
      const KolmogorovResult r = solve_kolmogorov(config.kolmogorov);
      save_field(r.velocity, out);
      double mean = 0.0;
      for (double e : r.energy) mean += e / static_cast<double>(r.energy.size());
      std::ostringstream os;
      os.precision(17);
      os << mean;
      meta["energy_mean"] = os.str();
      os.str("");
      os << r.max_divergence;
      meta["max_divergence"] = os.str();
      meta["time_dependent"] = r.time_dependent ? "1" : "0";
      if (!r.time_dependent)
        result.warnings.push_back("non-chaotic regime: kinetic energy is steady over the last half of the run; "
                                  "consider raising kolmogorov.amplitude");
      break;
    }
  }
  write_metadata(meta, result.metadata);
  return result;
}

void cmd_corrupt(const fs::path& in, const fs::path& out, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw Error(ErrorCode::InvalidArgument, "sigma must be >= 0");
  const GridField field = load_field(in);
  Metadata meta;
  if (fs::exists(metadata_path(in))) meta = read_metadata(metadata_path(in));
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  save_field(add_noise(field, {sigma, seed}), out);
  std::ostringstream os;
  os.precision(17);
  os << sigma;
  meta["noise_sigma"] = os.str();
  meta["noise_seed"] = std::to_string(seed);
  write_metadata(meta, metadata_path(out));
}

std::vector<EquationResult> discover(const RunConfig& config, const GridField& field, const Metadata* metadata,
                                     double sigma, std::uint64_t noise_seed) {
  validate_config(config);
  if (metadata) {
    auto it = metadata->find("system");
    if (it != metadata->end() && it->second != to_string(config.system))
      throw Error(ErrorCode::InvalidArgument, "field was generated by '" + it->second + "' but system is '" +
                                                  to_string(config.system) + "'");
  }
  std::vector<BuiltinSystem> equations;
  switch (config.system) {
    case SystemKind::KuramotoSivashinsky: equations = {BuiltinSystem::KuramotoSivashinsky}; break;
    case SystemKind::Kolmogorov: equations = {BuiltinSystem::Kolmogorov}; break;
    case SystemKind::LambdaOmega: equations = {BuiltinSystem::LambdaOmegaU, BuiltinSystem::LambdaOmegaV}; break;
  }

  std::vector<EquationResult> out;
  for (BuiltinSystem eq : equations) {
    const Library lib = builtin_library(eq);
    EnsembleConfig ec;
    ec.K = config.discovery.K;
    ec.M = config.discovery.M;
    ec.gamma = config.discovery.gamma;
    ec.seed = config.discovery.seed;
    ec.halfwidth = config.discovery.halfwidth.empty() ? default_halfwidth(config.system) : config.discovery.halfwidth;
    ec.weight = lib.default_weight;
    if (config.discovery.p) ec.weight.p = *config.discovery.p;
    if (config.discovery.q && ec.weight.kind == WeightKind::ScalarEnvelope) ec.weight.q = *config.discovery.q;
    if (metadata) {
      switch (eq) {
        case BuiltinSystem::KuramotoSivashinsky: ec.reference = ks_reference(); break;
        case BuiltinSystem::Kolmogorov: ec.reference = kolmogorov_reference(kolmogorov_params_from(*metadata)); break;
        case BuiltinSystem::LambdaOmegaU: ec.reference = lambda_omega_reference(rd_params_from(*metadata), 0); break;
        case BuiltinSystem::LambdaOmegaV: ec.reference = lambda_omega_reference(rd_params_from(*metadata), 1); break;
      }
    }
    EquationResult r;
    r.equation = system_id(eq);
    r.sigma = sigma;
    r.noise_seed = noise_seed;
    r.halfwidth = ec.halfwidth;
    r.weight = ec.weight;
    r.report = ensemble_discover(field, lib, ec);
    out.push_back(std::move(r));
  }
  return out;
}

std::string csv_header() {
  return "system,sigma,member_count,K,coeff_label,c_ref,c_mean,c_min,c_max,delta_mean,delta_min,delta_max,success_rate";
}

void write_reports(const RunConfig& config, const std::vector<EquationResult>& results, const fs::path& prefix) {
  json cfg;
  cfg["system"] = to_string(config.system);
  cfg["discover"] = {{"K", config.discovery.K},
                     {"M", config.discovery.M},
                     {"gamma", config.discovery.gamma},
                     {"seed", config.discovery.seed}};
  if (config.discovery.p) cfg["discover"]["p"] = *config.discovery.p;
  if (config.discovery.q) cfg["discover"]["q"] = *config.discovery.q;
  cfg["discover"]["halfwidth"] =
      config.discovery.halfwidth.empty() ? default_halfwidth(config.system) : config.discovery.halfwidth;
  cfg["sigmas"] = config.sigmas;
  cfg["noise_seed"] = config.noise_seed;
  cfg["solver"] = solver_metadata(config);

  json doc;
  doc["tool"] = "weakpde";
  doc["config"] = cfg;
  doc["results"] = json::array();
  std::ostringstream csv;
  csv << csv_header() << "\n";
  for (const auto& r : results) {
    const auto& rep = r.report;
    json item;
    item["equation"] = r.equation;
    item["sigma"] = r.sigma;
    item["noise_seed"] = r.noise_seed;
    item["weight"] = {{"kind", weight_kind(r.weight)},
                      {"p", r.weight.p},
                      {"q", r.weight.q},
                      {"temporal", r.weight.temporal == TemporalFactor::Sine ? "sine" : "polynomial"}};
    item["halfwidth_requested"] = r.halfwidth;
    item["halfwidth_snapped"] = rep.members.empty() ? std::vector<double>{} : rep.members.front().halfwidth;
    item["labels"] = rep.labels;
    item["success_rate"] = number(rep.success_rate);
    item["successful_members"] = rep.successful_members;
    item["mean_column_norms"] = vector_json(rep.mean_column_norms);
    item["coefficients"] = json::array();
    for (const auto& c : rep.coefficients) {
      item["coefficients"].push_back({{"label", c.label},
                                      {"c_ref", number(c.reference)},
                                      {"c_mean", number(c.c_mean)},
                                      {"c_min", number(c.c_min)},
                                      {"c_max", number(c.c_max)},
                                      {"delta_mean", number(c.delta_mean)},
                                      {"delta_min", number(c.delta_min)},
                                      {"delta_max", number(c.delta_max)}});
      csv << r.equation << "," << csv_number(r.sigma) << "," << rep.members.size() << "," << config.discovery.K << ","
          << c.label << "," << csv_number(c.reference) << "," << csv_number(c.c_mean) << "," << csv_number(c.c_min)
          << "," << csv_number(c.c_max) << "," << csv_number(c.delta_mean) << "," << csv_number(c.delta_min) << ","
          << csv_number(c.delta_max) << "," << csv_number(rep.success_rate) << "\n";
    }
    item["members"] = json::array();
    for (std::size_t m = 0; m < rep.members.size(); ++m) {
      const auto& mr = rep.members[m];
      json active = json::array();
      for (bool a : mr.regression.active) active.push_back(a);
      item["members"].push_back({{"index", m},
                                 {"seed", mr.seed},
                                 {"coefficients", vector_json(mr.regression.coefficients)},
                                 {"active", active},
                                 {"residual_norm", number(mr.regression.residual_norm)},
                                 {"iterations", mr.regression.iterations},
                                 {"structure_match", mr.structure_match},
                                 {"spurious", mr.spurious},
                                 {"missing", mr.missing}});
    }
    doc["results"].push_back(std::move(item));
  }
  const std::string json_text = doc.dump(2) + "\n";
  const std::string csv_text = csv.str();
  if (prefix.has_parent_path()) fs::create_directories(prefix.parent_path());
  write_atomically(fs::path(prefix.string() + ".json"), std::span(json_text.data(), json_text.size()));
  write_atomically(fs::path(prefix.string() + ".csv"), std::span(csv_text.data(), csv_text.size()));
}

bool cmd_validate(std::ostream& out, bool force_polynomial_time) {
  bool all = true;
  struct WeightCase {
    std::string name;
    WeightSpec spec;
    int ndim;
    int order;
  };
  WeightSpec curl = WeightSpec::curl_streamfunction(3);
  if (force_polynomial_time) {
    curl.temporal = TemporalFactor::Polynomial;
    curl.q = 1;
  }
  const std::vector<WeightCase> weights{
      {"ks scalar p=4 q=3", WeightSpec::scalar_envelope(4, 3), 1, 4},
      {"lambda_omega scalar p=2 q=1", WeightSpec::scalar_envelope(2, 1), 2, 2},
      {std::string("kolmogorov curl p=3") + (force_polynomial_time ? " (polynomial time factor)" : ""), curl, 2, 2},
  };
  for (const auto& w : weights) {
    const WeightReport r = verify_weight(w.spec, w.ndim, w.order);
    all = all && r.ok();
    out << (r.ok() ? "PASS" : "FAIL") << " weight " << w.name << ": boundary " << r.max_boundary;
    if (w.spec.kind == WeightKind::CurlStreamfunction)
      out << ", divergence " << r.max_divergence << ", time mean " << r.max_time_mean;
    out << "\n";
    for (const auto& v : r.violations) out << "     " << v << "\n";
  }
  for (const auto& c : run_oracle_battery()) {
    all = all && c.consistent();
    out << (c.consistent() ? "PASS" : "FAIL") << " oracle " << c.system << " [" << c.label << "] " << c.field
        << ": rel diff " << c.difference << ", extrapolated " << c.extrapolated << ", order ";
    if (std::isnan(c.order))
      out << "n/a (rounding level)";
    else
      out << c.order << " (expected " << c.expected_order << ")";
    if (!c.agree) out << "  [reference-grid difference is the O(h^2) trapezoid error]";
    out << "\n";
  }
  return all;
}

}  // namespace weakpde::cli
