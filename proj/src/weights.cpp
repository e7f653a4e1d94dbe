#include "weakpde/weights.hpp"

#include <cmath>
#include <numbers>

#include "weakpde/error.hpp"
#include "weakpde/random.hpp"

namespace weakpde {

namespace {

// sin(pi t) with exact zeros at integers and exact odd symmetry.
double sinpi(double t) {
  double r = t - 2.0 * std::round(0.5 * t);  // r in [-1, 1]
  if (r > 0.5) r = 1.0 - r;
  else if (r < -0.5) r = -1.0 - r;
  if (r == 0.0) return 0.0;
  return std::sin(std::numbers::pi * r);
}

double cospi(double t) { return sinpi(t + 0.5); }

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

}  // namespace

Poly1D::Poly1D(std::vector<double> coefficients) : coefficients_(std::move(coefficients)) {
  while (!coefficients_.empty() && coefficients_.back() == 0.0) coefficients_.pop_back();
}

Poly1D Poly1D::envelope(int p) {
  if (p < 0) throw Error(ErrorCode::InvalidWeight, "envelope exponent must be >= 0");
  // (x^2 - 1)^p = sum_k C(p, k) x^{2k} (-1)^{p-k}
  std::vector<double> c(static_cast<std::size_t>(2 * p + 1), 0.0);
  for (int k = 0; k <= p; ++k) c[2 * k] = ((p - k) % 2 ? -1.0 : 1.0) * binomial(p, k);
  return Poly1D(std::move(c));
}

Poly1D Poly1D::derivative(int order) const {
  std::vector<double> c = coefficients_;
  for (int m = 0; m < order && !c.empty(); ++m) {
    std::vector<double> d(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * static_cast<double>(i);
    c = std::move(d);
  }
  return Poly1D(std::move(c));
}

double Poly1D::operator()(double x) const {
  double v = 0.0;
  for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) v = v * x + *it;
  return v;
}

Poly1D envelope_derivative(int p, int order) {
  if (p < 1) throw Error(ErrorCode::InvalidWeight, "envelope exponent must be >= 1");
  if (order < 0) throw Error(ErrorCode::InvalidArgument, "derivative order must be >= 0");
  return Poly1D::envelope(p).derivative(order);
}

void validate(const WeightSpec& spec) {
  if (spec.p < 1) throw Error(ErrorCode::InvalidWeight, "p must be >= 1");
  if (spec.kind == WeightKind::CurlStreamfunction) {
    if (spec.p < 3) throw Error(ErrorCode::InvalidWeight, "curl-streamfunction weight needs p >= 3");
    if (spec.temporal != TemporalFactor::Sine)
      throw Error(ErrorCode::InvalidWeight, "curl-streamfunction weight needs the sine temporal factor");
  } else if (spec.temporal == TemporalFactor::Polynomial && spec.q < 1) {
    throw Error(ErrorCode::InvalidWeight, "q must be >= 1");
  }
}

double spatial_factor(const WeightSpec& spec, int order, double s) {
  // Envelope derivatives are cached per (p, order) by the separable assembly;
  // here we simply rebuild.
  return envelope_derivative(spec.p, order)(s);
}

double temporal_factor(const WeightSpec& spec, int order, double t) {
  if (spec.temporal == TemporalFactor::Sine) {
    const double scale = std::pow(std::numbers::pi, order);
    switch (order % 4) {
      case 0: return scale * sinpi(t);
      case 1: return scale * cospi(t);
      case 2: return -scale * sinpi(t);
      default: return -scale * cospi(t);
    }
  }
  return envelope_derivative(spec.q, order)(t);
}

double eval_weight(const WeightSpec& spec, std::span<const int> deriv, std::span<const double> point,
                   std::span<const double> halfwidth) {
  const std::size_t naxes = point.size();
  if (deriv.size() != naxes || halfwidth.size() != naxes)
    throw Error(ErrorCode::InvalidArgument, "deriv, point and halfwidth must have the same length");
  for (double c : point)
    if (!(std::abs(c) <= 1.0)) throw Error(ErrorCode::OutOfRange, "normalized coordinate outside [-1, 1]");
  double value = 1.0;
  double scale = 1.0;
  for (std::size_t a = 0; a + 1 < naxes; ++a) {
    value *= spatial_factor(spec, deriv[a], point[a]);
    scale *= std::pow(halfwidth[a], -deriv[a]);
  }
  value *= temporal_factor(spec, deriv[naxes - 1], point[naxes - 1]);
  scale *= std::pow(halfwidth[naxes - 1], -deriv[naxes - 1]);
  return value * scale;
}

std::array<double, 2> eval_curl_weight(const WeightSpec& spec, std::span<const int> deriv,
                                       std::span<const double> point, std::span<const double> halfwidth) {
  if (point.size() != 3) throw Error(ErrorCode::InvalidArgument, "curl weight is defined in 2D + time");
  std::array<int, 3> dy{deriv[0], deriv[1] + 1, deriv[2]};
  std::array<int, 3> dx{deriv[0] + 1, deriv[1], deriv[2]};
  return {eval_weight(spec, dy, point, halfwidth), -eval_weight(spec, dx, point, halfwidth)};
}

WeightReport verify_weight(const WeightSpec& spec, int ndim_space, int required_spatial_order,
                           const WeightCheckOptions& options) {
  WeightReport report;
  const bool curl = spec.kind == WeightKind::CurlStreamfunction;
  if (curl && ndim_space != 2) {
    report.violations.push_back("curl weight requires two space dimensions");
    return report;
  }
  const int naxes = ndim_space + 1;
  const std::vector<double> unit(naxes, 1.0);
  SplitMix rng(options.seed);

  auto random_point = [&] {
    std::vector<double> pt(naxes);
    for (double& c : pt) c = rng.uniform(-1.0, 1.0);
    return pt;
  };
  // Largest |value| of the weight and its spatial derivatives that must vanish at pt.
  auto boundary_value = [&](const std::vector<double>& pt, int face_axis) {
    double worst = 0.0;
    if (curl) {
      // w = (psi_y, -psi_x) must vanish with its first spatial derivatives.
      const int max_order = face_axis == naxes - 1 ? 0 : 1;
      for (int ox = 0; ox <= max_order; ++ox)
        for (int oy = 0; oy + ox <= max_order; ++oy) {
          const std::array<int, 3> d{ox, oy, 0};
          const auto w = eval_curl_weight(spec, d, pt, unit);
          worst = std::max({worst, std::abs(w[0]), std::abs(w[1])});
        }
    } else {
      const int max_order = face_axis == naxes - 1 ? 0 : std::max(0, required_spatial_order - 1);
      std::vector<int> d(naxes, 0);
      for (int m = 0; m <= max_order; ++m) {
        d.assign(naxes, 0);
        if (face_axis < naxes - 1) d[face_axis] = m;
        worst = std::max(worst, std::abs(eval_weight(spec, d, pt, unit)));
        // Mixed derivatives along the other space axes of the same total order.
        for (int a = 0; a < ndim_space; ++a) {
          if (a == face_axis || m == 0) continue;
          std::vector<int> e(naxes, 0);
          e[a] = m;
          worst = std::max(worst, std::abs(eval_weight(spec, e, pt, unit)));
        }
      }
    }
    return worst;
  };

  for (int i = 0; i < options.samples; ++i) {
    auto pt = random_point();
    const int face = static_cast<int>(rng.next() % static_cast<std::uint64_t>(naxes));
    pt[face] = (rng.next() & 1u) ? 1.0 : -1.0;
    report.max_boundary = std::max(report.max_boundary, boundary_value(pt, face));
  }
  if (report.max_boundary > options.tolerance) {
    report.boundary_ok = false;
    report.violations.push_back("weight or required derivatives do not vanish on the boundary (max " +
                                std::to_string(report.max_boundary) + ")");
  }

  if (curl) {
    for (int i = 0; i < options.samples; ++i) {
      const auto pt = random_point();
      const std::array<int, 3> dx{1, 0, 0}, dy{0, 1, 0};
      const double div = eval_curl_weight(spec, dx, pt, unit)[0] + eval_curl_weight(spec, dy, pt, unit)[1];
      report.max_divergence = std::max(report.max_divergence, std::abs(div));
    }
    if (report.max_divergence > options.tolerance) {
      report.divergence_ok = false;
      report.violations.push_back("divergence of w is not zero");
    }

    const std::size_t n = options.time_nodes;
    const double h = 2.0 / static_cast<double>(n - 1);
    for (int i = 0; i < options.samples; ++i) {
      auto pt = random_point();
      double sx = 0.0, sy = 0.0;
      const std::array<int, 3> d{0, 0, 0};
      for (std::size_t l = 0; l < n; ++l) {
        // Symmetric node placement: t_l = -t_{n-1-l} exactly.
        const double t = (2.0 * static_cast<double>(l) - static_cast<double>(n - 1)) / static_cast<double>(n - 1);
        pt[2] = t;
        const auto w = eval_curl_weight(spec, d, pt, unit);
        const double tw = (l == 0 || l + 1 == n) ? 0.5 * h : h;
        sx += tw * w[0];
        sy += tw * w[1];
      }
      report.max_time_mean = std::max({report.max_time_mean, std::abs(sx), std::abs(sy)});
    }
    if (report.max_time_mean > options.tolerance) {
      report.time_mean_ok = false;
      report.violations.push_back("time integral of w over [-1, 1] is not zero (max " +
                                  std::to_string(report.max_time_mean) + ")");
    }
  }
  return report;
}

}  // namespace weakpde
