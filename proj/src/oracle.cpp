#include "weakpde/oracle.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "weakpde/error.hpp"

namespace weakpde {

namespace {

constexpr double kPi = std::numbers::pi;

FieldFactor f(int component, std::vector<int> deriv) { return FieldFactor{component, std::move(deriv)}; }

StrongPart sp(double prefactor, std::vector<int> weight_deriv, std::vector<FieldFactor> factors) {
  return StrongPart{prefactor, std::move(weight_deriv), std::move(factors)};
}

std::vector<StrongTerm> ks_strong() {
  const std::vector<int> w{0, 0};
  return {
      {"d_t u", {sp(1.0, w, {f(0, {0, 1})})}},
      {"u d_x u", {sp(1.0, w, {f(0, {0, 0}), f(0, {1, 0})})}},
      {"d_xx u", {sp(1.0, w, {f(0, {2, 0})})}},
      {"d_xxxx u", {sp(1.0, w, {f(0, {4, 0})})}},
  };
}

// w = (d_y psi, -d_x psi)
std::vector<StrongTerm> kolmogorov_strong() {
  const std::vector<int> wx{0, 1, 0}, wy{1, 0, 0};
  return {
      {"d_t u", {sp(1.0, wx, {f(0, {0, 0, 1})}), sp(-1.0, wy, {f(1, {0, 0, 1})})}},
      {"(u.grad)u",
       {sp(1.0, wx, {f(0, {0, 0, 0}), f(0, {1, 0, 0})}), sp(1.0, wx, {f(1, {0, 0, 0}), f(0, {0, 1, 0})}),
        sp(-1.0, wy, {f(0, {0, 0, 0}), f(1, {1, 0, 0})}), sp(-1.0, wy, {f(1, {0, 0, 0}), f(1, {0, 1, 0})})}},
      {"lap u",
       {sp(1.0, wx, {f(0, {2, 0, 0})}), sp(1.0, wx, {f(0, {0, 2, 0})}), sp(-1.0, wy, {f(1, {2, 0, 0})}),
        sp(-1.0, wy, {f(1, {0, 2, 0})})}},
      {"u", {sp(1.0, wx, {f(0, {0, 0, 0})}), sp(-1.0, wy, {f(1, {0, 0, 0})})}},
  };
}

std::vector<StrongTerm> lambda_omega_strong(int c) {
  const std::vector<int> w{0, 0, 0};
  const std::string name = c == 0 ? "u" : "v";
  std::vector<StrongTerm> out{
      {"d_t " + name, {sp(1.0, w, {f(c, {0, 0, 1})})}},
      {"lap " + name, {sp(1.0, w, {f(c, {2, 0, 0})}), sp(1.0, w, {f(c, {0, 2, 0})})}},
  };
  for (int degree = 1; degree <= 3; ++degree)
    for (int b = 0; b <= degree; ++b) {
      const int a = degree - b;
      std::vector<FieldFactor> factors;
      for (int i = 0; i < a; ++i) factors.push_back(f(0, {0, 0, 0}));
      for (int i = 0; i < b; ++i) factors.push_back(f(1, {0, 0, 0}));
      std::string label = (a ? (a > 1 ? "u^" + std::to_string(a) : std::string("u")) : std::string()) +
                          (b ? (b > 1 ? "v^" + std::to_string(b) : std::string("v")) : std::string());
      out.push_back({label, {sp(1.0, w, std::move(factors))}});
    }
  return out;
}

// Per-axis weight factor tables on the snapped box, including H^-m.
class WeightTables {
 public:
  WeightTables(const WeightSpec& weight, const NodeBox& box, const GridGeometry& g) : weight_(weight), box_(box) {
    for (int a = 0; a < g.naxes(); ++a) H_.push_back(static_cast<double>(box.half[a]) * g.spacing[a]);
    time_axis_ = g.time_axis();
  }

  const std::vector<double>& get(int axis, int order) {
    auto key = std::make_pair(axis, order);
    if (auto it = tables_.find(key); it != tables_.end()) return it->second;
    const std::size_t half = box_.half[axis];
    std::vector<double> t(2 * half + 1);
    const double scale = std::pow(H_[axis], -order);
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double s = (static_cast<double>(i) - static_cast<double>(half)) / static_cast<double>(half);
      t[i] = scale * (axis == time_axis_ ? temporal_factor(weight_, order, s) : spatial_factor(weight_, order, s));
    }
    return tables_.emplace(key, std::move(t)).first->second;
  }

 private:
  WeightSpec weight_;
  NodeBox box_;
  std::vector<double> H_;
  int time_axis_ = 0;
  std::map<std::pair<int, int>, std::vector<double>> tables_;
};

// Does any factor along any axis leave g'(+-1) generically nonzero?
int expected_order(const WeightSpec& weight, int naxes, const std::vector<std::vector<int>>& derivs) {
  for (const auto& d : derivs)
    for (int a = 0; a < naxes; ++a) {
      const bool time = a == naxes - 1;
      auto value = [&](int order) {
        return time ? temporal_factor(weight, order, 1.0) : spatial_factor(weight, order, 1.0);
      };
      if (std::abs(value(d[a])) > 1e-12 || std::abs(value(d[a] + 1)) > 1e-12) return 2;
    }
  return 4;
}

// Integral of |weak integrand| from the closed form, used only as a scale.
double weak_magnitude(const AnalyticField& expr, const TermSpec& term, const GridGeometry& geometry,
                      const IntegrationDomain& domain, const WeightSpec& weight) {
  const int naxes = geometry.naxes();
  const NodeBox box = snap_domain(geometry, domain);
  WeightTables tables(weight, box, geometry);
  std::vector<std::size_t> n(naxes);
  std::vector<std::vector<double>> tw(naxes);
  std::size_t total = 1;
  for (int a = 0; a < naxes; ++a) {
    n[a] = 2 * box.half[a] + 1;
    tw[a] = trapezoid_weights(n[a], geometry.spacing[a]);
    total *= n[a];
  }
  std::vector<std::size_t> idx(naxes, 0);
  std::vector<double> point(naxes);
  double out = 0.0;
  for (std::size_t flat = 0; flat < total; ++flat) {
    double quad = 1.0;
    for (int a = 0; a < naxes; ++a) {
      point[a] = geometry.coordinate(a, box.first[a] + idx[a]);
      quad *= tw[a][idx[a]];
    }
    for (const auto& p : term.parts) {
      double v = p.prefactor;
      for (int a = 0; a < naxes; ++a) v *= tables.get(a, p.deriv[a])[idx[a]];
      for (int c = 0; c < expr.ncomp(); ++c) v *= std::pow(expr.value(c, point), p.monomial[c]);
      out += quad * std::abs(v);
    }
    for (int a = naxes; a-- > 0;) {
      if (++idx[a] < n[a]) break;
      idx[a] = 0;
    }
  }
  return out;
}

struct Refinement {
  std::vector<double> fine_spacing;
  std::vector<std::size_t> coarse_cells;  // domain halfwidth in cells of the 4h grid
};

struct Case {
  std::string name;
  AnalyticField field;
};

struct SystemBattery {
  BuiltinSystem system;
  Refinement grid;
  std::vector<Case> cases;
};

std::vector<double> flat(std::initializer_list<std::initializer_list<double>> rows) {
  std::vector<double> out;
  for (const auto& r : rows) out.insert(out.end(), r.begin(), r.end());
  return out;
}

std::vector<double> solenoidal_mode(double kx, double ky, double amp, double omega, double phase) {
  const double k = std::hypot(kx, ky);
  return {amp * ky / k, -amp * kx / k, kx, ky, omega, phase};
}

std::vector<SystemBattery> batteries() {
  std::vector<SystemBattery> out;
  {
    SystemBattery b{BuiltinSystem::KuramotoSivashinsky, {{0.0982, 0.4}, {31, 6}}, {}};
    b.cases.push_back({"sin(kx)cos(wt)", AnalyticField::from_id("sinusoid", 1, 1, flat({{0.5, 0.5, 0.2, 0.0},
                                                                                       {0.5, 0.5, -0.2, 0.0}}))});
    b.cases.push_back({"two-mode", AnalyticField::from_id("sinusoid", 1, 1, flat({{1.2, 0.3125, -0.15, 0.7},
                                                                                 {0.4, 0.875, 0.35, -1.1}}))});
    b.cases.push_back({"polynomial", AnalyticField::from_id("polynomial", 1, 1,
                                                            flat({{0, 0.002, 2, 1}, {0, -0.05, 1, 0},
                                                                  {0, 1e-4, 3, 0}, {0, 1e-5, 4, 1}, {0, 0.3, 0, 0}}))});
    b.cases.push_back({"constant", AnalyticField::from_id("constant", 1, 1, std::vector<double>{1.5})});
    out.push_back(std::move(b));
  }
  {
    SystemBattery b{BuiltinSystem::Kolmogorov, {{0.1, 0.1, 0.2302}, {14, 18, 19}}, {}};
    b.cases.push_back({"shear", AnalyticField::from_id("sinusoid", 2, 2, std::vector<double>{1, 0, 0, 2 * kPi / 18, 0, 0})});
    auto m1 = solenoidal_mode(2 * kPi / 14, 4 * kPi / 18, 0.8, 0.3, 0.0);
    const auto m2 = solenoidal_mode(-4 * kPi / 14, 2 * kPi / 18, 0.6, -0.2, 1.0);
    m1.insert(m1.end(), m2.begin(), m2.end());
    b.cases.push_back({"two-mode", AnalyticField::from_id("sinusoid", 2, 2, m1)});
    // div u = 0: u_x depends on (y, t), u_y on (x, t).
    b.cases.push_back({"polynomial", AnalyticField::from_id("polynomial", 2, 2,
                                                            flat({{0, 0.01, 0, 2, 1}, {0, 0.2, 0, 1, 0},
                                                                  {1, 0.05, 2, 0, 0}, {1, -0.03, 1, 0, 1}}))});
    b.cases.push_back({"constant", AnalyticField::from_id("constant", 2, 2, std::vector<double>{1.0, 0.5})});
    out.push_back(std::move(b));
  }
  for (BuiltinSystem s : {BuiltinSystem::LambdaOmegaU, BuiltinSystem::LambdaOmegaV}) {
    SystemBattery b{s, {{0.0391, 0.0391, 0.05}, {6, 6, 6}}, {}};
    b.cases.push_back({"three-mode", AnalyticField::from_id("sinusoid", 2, 2,
                                                            flat({{0.8, 0.0, kPi / 2, kPi / 3, 0.7, 0.0},
                                                                  {0.0, 0.6, -kPi / 4, kPi / 2, -0.4, 0.5},
                                                                  {0.3, 0.4, 1.1, -0.6, 0.9, 2.0}}))});
    b.cases.push_back({"polynomial", AnalyticField::from_id("polynomial", 2, 2,
                                                            flat({{0, 0.2, 1, 1, 1}, {0, 0.5, 1, 0, 0},
                                                                  {1, 0.3, 2, 0, 0}, {1, -0.1, 0, 0, 2},
                                                                  {1, 0.4, 0, 1, 0}}))});
    b.cases.push_back({"constant", AnalyticField::from_id("constant", 2, 2, std::vector<double>{0.7, -0.4})});
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace

std::vector<StrongTerm> strong_library(BuiltinSystem system) {
  switch (system) {
    case BuiltinSystem::KuramotoSivashinsky: return ks_strong();
    case BuiltinSystem::Kolmogorov: return kolmogorov_strong();
    case BuiltinSystem::LambdaOmegaU: return lambda_omega_strong(0);
    case BuiltinSystem::LambdaOmegaV: return lambda_omega_strong(1);
  }
  throw Error(ErrorCode::UnknownSystem, "unknown system");
}

StrongValue strong_column_oracle(const AnalyticField& expr, const StrongTerm& term, const GridGeometry& geometry,
                                 const IntegrationDomain& domain, const WeightSpec& weight) {
  geometry.validate();
  if (expr.ndim_space() != geometry.ndim_space)
    throw Error(ErrorCode::ShapeMismatch, "expression and grid dimensionality differ");
  const int naxes = geometry.naxes();
  for (const auto& p : term.parts) {
    if (static_cast<int>(p.weight_deriv.size()) != naxes)
      throw Error(ErrorCode::ShapeMismatch, "strong part layout does not match the grid");
    for (const auto& fac : p.factors)
      if (fac.component < 0 || fac.component >= expr.ncomp() || static_cast<int>(fac.deriv.size()) != naxes)
        throw Error(ErrorCode::ShapeMismatch, "strong factor layout does not match the expression");
  }
  const NodeBox box = snap_domain(geometry, domain);
  WeightTables tables(weight, box, geometry);
  std::vector<std::size_t> n(naxes);
  std::vector<std::vector<double>> tw(naxes);
  for (int a = 0; a < naxes; ++a) {
    n[a] = 2 * box.half[a] + 1;
    tw[a] = trapezoid_weights(n[a], geometry.spacing[a]);
  }

  std::vector<std::vector<const std::vector<double>*>> wt(term.parts.size());
  for (std::size_t k = 0; k < term.parts.size(); ++k)
    for (int a = 0; a < naxes; ++a) wt[k].push_back(&tables.get(a, term.parts[k].weight_deriv[a]));

  StrongValue out;
  std::vector<std::size_t> idx(naxes, 0);
  std::vector<double> point(naxes);
  std::size_t total = 1;
  for (auto v : n) total *= v;
  for (std::size_t flat = 0; flat < total; ++flat) {
    double quad = 1.0;
    for (int a = 0; a < naxes; ++a) {
      point[a] = geometry.coordinate(a, box.first[a] + idx[a]);
      quad *= tw[a][idx[a]];
    }
    double sum = 0.0, mag = 0.0;
    for (std::size_t k = 0; k < term.parts.size(); ++k) {
      const auto& p = term.parts[k];
      double w = p.prefactor;
      for (int a = 0; a < naxes; ++a) w *= (*wt[k][a])[idx[a]];
      double fv = 1.0;
      for (const auto& fac : p.factors) fv *= expr.derivative(fac.component, fac.deriv, point);
      sum += w * fv;
      mag += std::abs(w * fv);
    }
    out.value += quad * sum;
    out.magnitude += quad * mag;
    for (int a = naxes; a-- > 0;) {
      if (++idx[a] < n[a]) break;
      idx[a] = 0;
    }
  }
  return out;
}

std::vector<OracleCheck> run_oracle_battery(const OracleOptions& options) {
  std::vector<OracleCheck> checks;
  for (const auto& battery : batteries()) {
    const Library lib = builtin_library(battery.system);
    const auto strong = strong_library(battery.system);
    std::vector<const TermSpec*> weak{&lib.target};
    for (const auto& t : lib.terms) weak.push_back(&t);
    if (strong.size() != weak.size()) throw Error(ErrorCode::ShapeMismatch, "strong and weak libraries differ in size");

    const int naxes = lib.ndim_space + 1;
    std::vector<GridGeometry> grids;
    IntegrationDomain domain;
    for (int a = 0; a < naxes; ++a) {
      const double H = static_cast<double>(battery.grid.coarse_cells[a]) * 4.0 * battery.grid.fine_spacing[a];
      domain.halfwidth.push_back(H);
      domain.center.push_back(H + 4.0 * battery.grid.fine_spacing[a]);
    }
    for (std::size_t level : {4u, 2u, 1u}) {
      GridGeometry g;
      g.ndim_space = lib.ndim_space;
      for (int a = 0; a < naxes; ++a) {
        // One coarse cell of margin on each side of the domain.
        const std::size_t cells = (battery.grid.coarse_cells[a] * 2 + 2) * (4 / level);
        g.shape.push_back(cells + 1);
        g.spacing.push_back(battery.grid.fine_spacing[a] * static_cast<double>(level));
        g.origin.push_back(0.0);
      }
      grids.push_back(std::move(g));
    }

    for (const auto& c : battery.cases) {
      std::vector<GridField> fields;
      for (const auto& g : grids) fields.push_back(eval_analytic(g, c.field));
      for (std::size_t t = 0; t < strong.size(); ++t) {
        if (strong[t].label != weak[t]->label)
          throw Error(ErrorCode::ShapeMismatch, "label mismatch: " + strong[t].label + " vs " + weak[t]->label);
        OracleCheck check;
        check.system = system_id(battery.system);
        check.label = strong[t].label;
        check.field = c.name;
        std::vector<std::vector<int>> derivs;
        for (const auto& p : weak[t]->parts) derivs.push_back(p.deriv);
        for (const auto& p : strong[t].parts) derivs.push_back(p.weight_deriv);
        check.expected_order = expected_order(lib.default_weight, naxes, derivs);

        std::vector<double> err, signed_err;
        double scale = 0.0, mag = 0.0;
        for (std::size_t l = 0; l < grids.size(); ++l) {
          const double w = assemble_column(fields[l], *weak[t], domain, lib.default_weight);
          const StrongValue s = strong_column_oracle(c.field, strong[t], grids[l], domain, lib.default_weight);
          err.push_back(std::abs(w - s.value));
          signed_err.push_back(w - s.value);
          check.weak = w;
          check.strong = s.value;
          if (l + 1 == grids.size()) {
            mag = std::max(s.magnitude, weak_magnitude(c.field, *weak[t], grids[l], domain, lib.default_weight));
            // Terms that vanish identically for this field are judged against the integrand scale.
            scale = std::abs(s.value) > 1e-10 * mag ? std::abs(s.value) : std::max(mag, 1e-12);
          }
        }
        check.difference = err.back() / scale;
        check.agree = check.difference <= options.tolerance;
        const double r = std::pow(2.0, check.expected_order);
        check.extrapolated = std::abs(signed_err[2] + (signed_err[2] - signed_err[1]) / (r - 1.0)) / scale;
        check.extrapolated_agree = check.extrapolated <= options.tolerance;
        const bool rounding = err.back() <= 1e-12 * std::max(mag, 1e-12);
        if (rounding) {
          check.order = std::numeric_limits<double>::quiet_NaN();
          check.order_ok = true;
        } else {
          // Least-squares slope of log2(err) against log2(h), h = 4, 2, 1.
          const double x[3] = {2.0, 1.0, 0.0};
          double mx = 0, my = 0;
          for (int i = 0; i < 3; ++i) {
            mx += x[i] / 3;
            my += std::log2(err[i]) / 3;
          }
          double num = 0, den = 0;
          for (int i = 0; i < 3; ++i) {
            num += (x[i] - mx) * (std::log2(err[i]) - my);
            den += (x[i] - mx) * (x[i] - mx);
          }
          check.order = num / den;
          check.order_ok = check.expected_order == 2
                               ? check.order >= options.order_lo && check.order <= options.order_hi
                               : check.order >= options.order_lo;
        }
        checks.push_back(std::move(check));
      }
    }
  }
  return checks;
}

}  // namespace weakpde
