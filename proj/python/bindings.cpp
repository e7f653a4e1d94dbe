#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "weakpde/cli.hpp"
#include "weakpde/oracle.hpp"
#include "weakpde/regression.hpp"
#include "weakpde/solvers.hpp"
#include "weakpde/weak_system.hpp"
#include "weakpde/weights.hpp"

namespace py = pybind11;
using namespace weakpde;

namespace {

// (ncomp, *shape) copy of the field values.
py::array_t<double> to_numpy(const GridField& f) {
  std::vector<py::ssize_t> shape{f.ncomp()};
  for (auto n : f.geometry().shape) shape.push_back(static_cast<py::ssize_t>(n));
  py::array_t<double> out(shape);
  std::copy(f.values().begin(), f.values().end(), out.mutable_data());
  return out;
}

GridField from_numpy(py::array_t<double, py::array::c_style | py::array::forcecast> values,
                     std::vector<double> spacing, std::optional<std::vector<double>> origin) {
  if (values.ndim() < 3 || values.ndim() > 4)
    throw Error(ErrorCode::InvalidDimension, "values must have shape (ncomp, *space, time)");
  const int naxes = static_cast<int>(values.ndim()) - 1;
  std::vector<std::size_t> shape;
  for (int a = 0; a < naxes; ++a) shape.push_back(static_cast<std::size_t>(values.shape(a + 1)));
  GridField f = make_grid(naxes - 1, shape, std::move(spacing), origin.value_or(std::vector<double>(naxes, 0.0)),
                          static_cast<int>(values.shape(0)));
  std::copy(values.data(), values.data() + values.size(), f.values().begin());
  return f;
}

py::dict report_dict(const EnsembleReport& r) {
  py::dict d;
  d["labels"] = r.labels;
  d["success_rate"] = r.success_rate;
  d["mean_column_norms"] = r.mean_column_norms;
  py::list coeffs;
  for (const auto& c : r.coefficients) {
    py::dict e;
    e["label"] = c.label;
    e["c_ref"] = c.reference;
    e["c_mean"] = c.c_mean;
    e["c_min"] = c.c_min;
    e["c_max"] = c.c_max;
    e["delta_mean"] = c.delta_mean;
    e["delta_min"] = c.delta_min;
    e["delta_max"] = c.delta_max;
    coeffs.append(e);
  }
  d["coefficients"] = coeffs;
  py::list members;
  for (const auto& m : r.members) {
    py::dict e;
    e["seed"] = m.seed;
    e["coefficients"] = m.regression.coefficients;
    e["active"] = m.regression.active;
    e["structure_match"] = m.structure_match;
    e["spurious"] = m.spurious;
    e["missing"] = m.missing;
    e["halfwidth"] = m.halfwidth;
    members.append(e);
  }
  d["members"] = members;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Weak-form sparse regression for PDE discovery";

  static py::exception<Error> error_type(m, "WeakPDEError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(error_type.ptr(), e.what());
    }
  });

  py::class_<GridField>(m, "GridField")
      .def(py::init(&from_numpy), py::arg("values"), py::arg("spacing"), py::arg("origin") = py::none())
      .def_property_readonly("ndim_space", &GridField::ndim_space)
      .def_property_readonly("ncomp", &GridField::ncomp)
      .def_property_readonly("shape", [](const GridField& f) { return f.geometry().shape; })
      .def_property_readonly("spacing", [](const GridField& f) { return f.geometry().spacing; })
      .def_property_readonly("origin", [](const GridField& f) { return f.geometry().origin; })
      .def_property_readonly("values", &to_numpy)
      .def("__eq__", [](const GridField& a, const GridField& b) { return a == b; });

  m.def("load_field", &load_field, py::arg("path"));
  m.def("save_field", &save_field, py::arg("field"), py::arg("path"));
  m.def("add_noise", [](const GridField& f, double sigma, std::uint64_t seed) { return add_noise(f, {sigma, seed}); },
        py::arg("field"), py::arg("sigma"), py::arg("seed"));
  m.def("subsample", [](const GridField& f, std::vector<std::size_t> stride) { return subsample(f, stride); },
        py::arg("field"), py::arg("stride"));

  py::class_<KSParams>(m, "KSParams")
      .def(py::init<>())
      .def_readwrite("length", &KSParams::length)
      .def_readwrite("duration", &KSParams::duration)
      .def_readwrite("dx", &KSParams::dx)
      .def_readwrite("dt", &KSParams::dt)
      .def_readwrite("substeps", &KSParams::substeps)
      .def_readwrite("initial_condition", &KSParams::initial_condition)
      .def_readwrite("ic_amplitude", &KSParams::ic_amplitude)
      .def_readwrite("ic_mode", &KSParams::ic_mode)
      .def_readwrite("linear_only", &KSParams::linear_only);
  py::class_<RDParams>(m, "LambdaOmegaParams")
      .def(py::init<>())
      .def_readwrite("D", &RDParams::D)
      .def_readwrite("beta", &RDParams::beta)
      .def_readwrite("length", &RDParams::length)
      .def_readwrite("duration", &RDParams::duration)
      .def_readwrite("dx", &RDParams::dx)
      .def_readwrite("dt", &RDParams::dt)
      .def_readwrite("substeps", &RDParams::substeps)
      .def_readwrite("initial_condition", &RDParams::initial_condition)
      .def_readwrite("ic_u", &RDParams::ic_u)
      .def_readwrite("ic_v", &RDParams::ic_v);
  py::class_<KolmogorovParams>(m, "KolmogorovParams")
      .def(py::init<>())
      .def_readwrite("c1", &KolmogorovParams::c1)
      .def_readwrite("c2", &KolmogorovParams::c2)
      .def_readwrite("c3", &KolmogorovParams::c3)
      .def_readwrite("amplitude", &KolmogorovParams::amplitude)
      .def_readwrite("kappa", &KolmogorovParams::kappa)
      .def_readwrite("lx", &KolmogorovParams::lx)
      .def_readwrite("ly", &KolmogorovParams::ly)
      .def_readwrite("duration", &KolmogorovParams::duration)
      .def_readwrite("spinup", &KolmogorovParams::spinup)
      .def_readwrite("dx", &KolmogorovParams::dx)
      .def_readwrite("output_dt", &KolmogorovParams::output_dt)
      .def_readwrite("time_stride", &KolmogorovParams::time_stride)
      .def_readwrite("space_stride", &KolmogorovParams::space_stride)
      .def_readwrite("initial_condition", &KolmogorovParams::initial_condition)
      .def_readwrite("perturbation", &KolmogorovParams::perturbation)
      .def_readwrite("seed", &KolmogorovParams::seed)
      .def_readwrite("record_latent", &KolmogorovParams::record_latent);

  m.def("solve_ks", &solve_ks, py::arg("params") = KSParams{});
  m.def("solve_lambda_omega", &solve_lambda_omega, py::arg("params") = RDParams{});
  m.def(
      "solve_kolmogorov",
      [](const KolmogorovParams& p) {
        KolmogorovResult r = solve_kolmogorov(p);
        py::dict d;
        d["velocity"] = r.velocity;
        d["energy"] = r.energy;
        d["max_divergence"] = r.max_divergence;
        d["time_dependent"] = r.time_dependent;
        if (r.latent) {
          d["pressure"] = r.latent->pressure;
          d["forcing"] = r.latent->forcing;
        }
        return d;
      },
      py::arg("params") = KolmogorovParams{});

  m.def("ks_reference", &ks_reference);
  m.def("kolmogorov_reference", &kolmogorov_reference, py::arg("params") = KolmogorovParams{});
  m.def("lambda_omega_reference", &lambda_omega_reference, py::arg("params"), py::arg("component"));

  py::enum_<WeightKind>(m, "WeightKind")
      .value("SCALAR_ENVELOPE", WeightKind::ScalarEnvelope)
      .value("CURL_STREAMFUNCTION", WeightKind::CurlStreamfunction);
  py::enum_<TemporalFactor>(m, "TemporalFactor")
      .value("POLYNOMIAL", TemporalFactor::Polynomial)
      .value("SINE", TemporalFactor::Sine);
  py::class_<WeightSpec>(m, "WeightSpec")
      .def(py::init<>())
      .def_static("scalar_envelope", &WeightSpec::scalar_envelope, py::arg("p"), py::arg("q"))
      .def_static("curl_streamfunction", &WeightSpec::curl_streamfunction, py::arg("p"))
      .def_readwrite("kind", &WeightSpec::kind)
      .def_readwrite("p", &WeightSpec::p)
      .def_readwrite("q", &WeightSpec::q)
      .def_readwrite("temporal", &WeightSpec::temporal);
  m.def(
      "eval_weight",
      [](const WeightSpec& w, std::vector<int> deriv, std::vector<double> point, std::vector<double> halfwidth) {
        return eval_weight(w, deriv, point, halfwidth);
      },
      py::arg("weight"), py::arg("deriv"), py::arg("point"), py::arg("halfwidth"));
  m.def(
      "verify_weight",
      [](const WeightSpec& w, int ndim_space, int order) {
        const WeightReport r = verify_weight(w, ndim_space, order);
        py::dict d;
        d["ok"] = r.ok();
        d["max_boundary"] = r.max_boundary;
        d["max_divergence"] = r.max_divergence;
        d["max_time_mean"] = r.max_time_mean;
        d["violations"] = r.violations;
        return d;
      },
      py::arg("weight"), py::arg("ndim_space"), py::arg("required_spatial_order"));

  m.def("least_squares", &least_squares, py::arg("Q"), py::arg("q0"));
  m.def(
      "sparsify",
      [](const Eigen::MatrixXd& Q, const Eigen::VectorXd& q0, double gamma) {
        const RegressionResult r = sparsify(Q, q0, gamma);
        return py::make_tuple(r.coefficients, r.active);
      },
      py::arg("Q"), py::arg("q0"), py::arg("gamma"));

  m.def("library_labels", [](const std::string& system) { return builtin_library(parse_system(system)).labels(); },
        py::arg("system"));

  m.def(
      "build_system",
      [](const GridField& f, const std::string& system, std::vector<double> halfwidth, std::size_t K,
         std::uint64_t seed) {
        const Library lib = builtin_library(parse_system(system));
        const auto domains = sample_domains(f.geometry(), halfwidth, K, seed);
        const LinearSystem s = build_system(f, lib.target, lib.terms, domains, lib.default_weight);
        return py::make_tuple(s.Q, s.q0, s.labels);
      },
      py::arg("field"), py::arg("system"), py::arg("halfwidth"), py::arg("K") = 100, py::arg("seed") = 1);

  m.def(
      "discover",
      [](const GridField& f, const std::string& system, std::optional<std::vector<double>> halfwidth, std::size_t K,
         std::size_t M, double gamma, std::uint64_t seed, std::optional<Eigen::VectorXd> reference,
         std::optional<int> p, std::optional<int> q) {
        const Library lib = builtin_library(parse_system(system));
        EnsembleConfig ec;
        ec.K = K;
        ec.M = M;
        ec.gamma = gamma;
        ec.seed = seed;
        ec.weight = lib.default_weight;
        if (p) ec.weight.p = *p;
        if (q) ec.weight.q = *q;
        ec.reference = reference;
        // KS is the only system whose true coefficients do not depend on solver parameters.
        if (!reference && lib.system == BuiltinSystem::KuramotoSivashinsky) ec.reference = ks_reference();
        if (halfwidth) {
          ec.halfwidth = *halfwidth;
        } else {
          const auto kind = lib.system == BuiltinSystem::KuramotoSivashinsky ? cli::SystemKind::KuramotoSivashinsky
                            : lib.system == BuiltinSystem::Kolmogorov        ? cli::SystemKind::Kolmogorov
                                                                             : cli::SystemKind::LambdaOmega;
          ec.halfwidth = cli::default_halfwidth(kind);
        }
        return report_dict(ensemble_discover(f, lib, ec));
      },
      py::arg("field"), py::arg("system"), py::arg("halfwidth") = py::none(), py::arg("K") = 100, py::arg("M") = 30,
      py::arg("gamma") = 0.05, py::arg("seed") = 1, py::arg("reference") = py::none(), py::arg("p") = py::none(),
      py::arg("q") = py::none());

  m.def(
      "validate",
      [](bool force_polynomial_time) {
        std::ostringstream os;
        const bool ok = cli::cmd_validate(os, force_polynomial_time);
        return py::make_tuple(ok, os.str());
      },
      py::arg("force_polynomial_time") = false);
}
