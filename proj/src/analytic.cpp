#include "weakpde/analytic.hpp"

#include <cmath>
#include <numbers>

#include "weakpde/error.hpp"

namespace weakpde {

namespace {

// d^m/ds^m sin(s) = sin(s + m*pi/2), evaluated without the phase shift rounding.
double sin_derivative(int m, double s) {
  switch (m % 4) {
    case 0: return std::sin(s);
    case 1: return std::cos(s);
    case 2: return -std::sin(s);
    default: return -std::cos(s);
  }
}

// d^m/dx^m x^e
double power_derivative(int e, int m, double x) {
  if (m > e) return 0.0;
  double factor = 1.0;
  for (int i = 0; i < m; ++i) factor *= static_cast<double>(e - i);
  return factor * std::pow(x, e - m);
}

}  // namespace

AnalyticField AnalyticField::sinusoid(int ndim_space, std::vector<SinusoidMode> modes) {
  if (modes.empty()) throw Error(ErrorCode::InvalidArgument, "sinusoid needs at least one mode");
  AnalyticField f;
  f.kind_ = Kind::Sinusoid;
  f.ndim_space_ = ndim_space;
  f.ncomp_ = static_cast<int>(modes.front().amplitude.size());
  for (const auto& m : modes) {
    if (static_cast<int>(m.amplitude.size()) != f.ncomp_ || static_cast<int>(m.wavevector.size()) != ndim_space)
      throw Error(ErrorCode::InvalidArgument, "inconsistent sinusoid mode layout");
  }
  f.modes_ = std::move(modes);
  return f;
}

AnalyticField AnalyticField::polynomial(int ndim_space, int ncomp, std::vector<PolynomialTerm> terms) {
  AnalyticField f;
  f.kind_ = Kind::Polynomial;
  f.ndim_space_ = ndim_space;
  f.ncomp_ = ncomp;
  for (const auto& t : terms) {
    if (t.component < 0 || t.component >= ncomp || static_cast<int>(t.exponents.size()) != ndim_space + 1)
      throw Error(ErrorCode::InvalidArgument, "inconsistent polynomial term layout");
    for (int e : t.exponents)
      if (e < 0) throw Error(ErrorCode::InvalidArgument, "negative polynomial exponent");
  }
  f.terms_ = std::move(terms);
  return f;
}

AnalyticField AnalyticField::constant(int ndim_space, std::vector<double> values) {
  AnalyticField f;
  f.kind_ = Kind::Constant;
  f.ndim_space_ = ndim_space;
  f.ncomp_ = static_cast<int>(values.size());
  f.constants_ = std::move(values);
  return f;
}

AnalyticField AnalyticField::from_id(const std::string& id, int ndim_space, int ncomp,
                                     std::span<const double> params) {
  auto bad = [&] { return Error(ErrorCode::InvalidArgument, "wrong parameter count for " + id); };
  if (id == "sinusoid") {
    const std::size_t per = static_cast<std::size_t>(ncomp + ndim_space + 2);
    if (params.empty() || params.size() % per != 0) throw bad();
    std::vector<SinusoidMode> modes;
    for (std::size_t o = 0; o < params.size(); o += per) {
      SinusoidMode m;
      m.amplitude.assign(params.begin() + o, params.begin() + o + ncomp);
      m.wavevector.assign(params.begin() + o + ncomp, params.begin() + o + ncomp + ndim_space);
      m.omega = params[o + ncomp + ndim_space];
      m.phase = params[o + ncomp + ndim_space + 1];
      modes.push_back(std::move(m));
    }
    return sinusoid(ndim_space, std::move(modes));
  }
  if (id == "polynomial") {
    const std::size_t per = static_cast<std::size_t>(ndim_space + 3);
    if (params.size() % per != 0) throw bad();
    std::vector<PolynomialTerm> terms;
    for (std::size_t o = 0; o < params.size(); o += per) {
      PolynomialTerm t;
      t.component = static_cast<int>(params[o]);
      t.coefficient = params[o + 1];
      for (std::size_t a = 0; a < static_cast<std::size_t>(ndim_space + 1); ++a)
        t.exponents.push_back(static_cast<int>(params[o + 2 + a]));
      terms.push_back(std::move(t));
    }
    return polynomial(ndim_space, ncomp, std::move(terms));
  }
  if (id == "constant") {
    if (params.size() != static_cast<std::size_t>(ncomp)) throw bad();
    return constant(ndim_space, std::vector<double>(params.begin(), params.end()));
  }
  throw Error(ErrorCode::UnknownExpression, "unknown analytic expression '" + id + "'");
}

double AnalyticField::derivative(int component, std::span<const int> orders, std::span<const double> point) const {
  const int naxes = ndim_space_ + 1;
  switch (kind_) {
    case Kind::Constant: {
      for (int a = 0; a < naxes; ++a)
        if (orders[a] != 0) return 0.0;
      return constants_.at(component);
    }
    case Kind::Polynomial: {
      double sum = 0.0;
      for (const auto& t : terms_) {
        if (t.component != component) continue;
        double v = t.coefficient;
        for (int a = 0; a < naxes && v != 0.0; ++a) v *= power_derivative(t.exponents[a], orders[a], point[a]);
        sum += v;
      }
      return sum;
    }
    case Kind::Sinusoid: {
      int total = 0;
      for (int a = 0; a < naxes; ++a) total += orders[a];
      double sum = 0.0;
      for (const auto& m : modes_) {
        double arg = m.omega * point[ndim_space_] + m.phase;
        double factor = m.amplitude[component] * std::pow(m.omega, orders[ndim_space_]);
        for (int a = 0; a < ndim_space_; ++a) {
          arg += m.wavevector[a] * point[a];
          factor *= std::pow(m.wavevector[a], orders[a]);
        }
        if (factor != 0.0) sum += factor * sin_derivative(total, arg);
      }
      return sum;
    }
  }
  return 0.0;
}

double AnalyticField::value(int component, std::span<const double> point) const {
  const int zero[3] = {0, 0, 0};
  return derivative(component, std::span<const int>(zero, static_cast<std::size_t>(ndim_space_ + 1)), point);
}

GridField eval_analytic(const GridGeometry& geometry, const AnalyticField& expr) {
  if (expr.ndim_space() != geometry.ndim_space)
    throw Error(ErrorCode::ShapeMismatch, "expression and grid dimensionality differ");
  GridField out(geometry, expr.ncomp());
  const int naxes = geometry.naxes();
  std::vector<std::size_t> idx(naxes);
  std::vector<double> point(naxes);
  for (std::size_t flat = 0; flat < out.points(); ++flat) {
    std::size_t rem = flat;
    for (int a = naxes - 1; a >= 0; --a) {
      idx[a] = rem % geometry.shape[a];
      rem /= geometry.shape[a];
      point[a] = geometry.coordinate(a, idx[a]);
    }
    for (int c = 0; c < expr.ncomp(); ++c) out.component(c)[flat] = expr.value(c, point);
  }
  return out;
}

}  // namespace weakpde
