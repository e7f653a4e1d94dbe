#include "weakpde/weak_system.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <utility>

#include "weakpde/error.hpp"
#include "weakpde/random.hpp"

namespace weakpde {

namespace {

TermPart part(double prefactor, std::vector<int> monomial, std::vector<int> deriv) {
  return TermPart{prefactor, std::move(monomial), std::move(deriv)};
}

TermSpec term(std::string label, std::vector<TermPart> parts, TermSide side = TermSide::Library) {
  return TermSpec{std::move(label), std::move(parts), side};
}

Library ks_library() {
  Library lib;
  lib.system = BuiltinSystem::KuramotoSivashinsky;
  lib.ndim_space = 1;
  lib.ncomp = 1;
  lib.target = term("d_t u", {part(-1.0, {1}, {0, 1})}, TermSide::Target);
  lib.terms = {
      term("u d_x u", {part(-0.5, {2}, {1, 0})}),
      term("d_xx u", {part(1.0, {1}, {2, 0})}),
      term("d_xxxx u", {part(1.0, {1}, {4, 0})}),
  };
  lib.default_weight = WeightSpec::scalar_envelope(4, 3);
  lib.required_spatial_order = 4;
  return lib;
}

// Weak forms against w = (d_y psi, -d_x psi); parts carry derivatives of psi.
Library kolmogorov_library() {
  Library lib;
  lib.system = BuiltinSystem::Kolmogorov;
  lib.ndim_space = 2;
  lib.ncomp = 2;
  lib.target = term("d_t u", {part(-1.0, {1, 0}, {0, 1, 1}), part(1.0, {0, 1}, {1, 0, 1})}, TermSide::Target);
  lib.terms = {
      // -int u_i u_j d_j w_i
      term("(u.grad)u", {part(-1.0, {1, 1}, {0, 2, 0}), part(1.0, {1, 1}, {2, 0, 0}),
                         part(-1.0, {2, 0}, {1, 1, 0}), part(1.0, {0, 2}, {1, 1, 0})}),
      term("lap u", {part(1.0, {1, 0}, {2, 1, 0}), part(1.0, {1, 0}, {0, 3, 0}),
                     part(-1.0, {0, 1}, {3, 0, 0}), part(-1.0, {0, 1}, {1, 2, 0})}),
      term("u", {part(1.0, {1, 0}, {0, 1, 0}), part(-1.0, {0, 1}, {1, 0, 0})}),
  };
  lib.default_weight = WeightSpec::curl_streamfunction(3);
  lib.required_spatial_order = 2;
  return lib;
}

Library lambda_omega_library(int component) {
  Library lib;
  lib.system = component == 0 ? BuiltinSystem::LambdaOmegaU : BuiltinSystem::LambdaOmegaV;
  lib.ndim_space = 2;
  lib.ncomp = 2;
  const std::string name = component == 0 ? "u" : "v";
  std::vector<int> self(2, 0);
  self[component] = 1;
  lib.target = term("d_t " + name, {part(-1.0, self, {0, 0, 1})}, TermSide::Target);
  lib.terms.push_back(term("lap " + name, {part(1.0, self, {2, 0, 0}), part(1.0, self, {0, 2, 0})}));
  for (int degree = 1; degree <= 3; ++degree) {
    for (int b = 0; b <= degree; ++b) {
      const int a = degree - b;
      std::string label;
      auto append = [&label](const char* sym, int e) {
        if (e == 0) return;
        label += sym;
        if (e > 1) label += "^" + std::to_string(e);
      };
      append("u", a);
      append("v", b);
      lib.terms.push_back(term(label, {part(1.0, {a, b}, {0, 0, 0})}));
    }
  }
  lib.default_weight = WeightSpec::scalar_envelope(2, 1);
  lib.required_spatial_order = 2;
  return lib;
}

using PairKey = std::pair<std::vector<int>, int>;

// Separable evaluation of weak integrals over one snapped domain. Weight
// factors per axis already include trapezoid weights and chain-rule scaling.
class DomainIntegrator {
 public:
  DomainIntegrator(const GridField& field, NodeBox box, const WeightSpec& weight)
      : field_(field), box_(std::move(box)), weight_(weight) {
    const GridGeometry& g = field.geometry();
    naxes_ = g.naxes();
    nx_ = 2 * box_.half[0] + 1;
    ny_ = g.ndim_space == 2 ? 2 * box_.half[1] + 1 : 1;
    nt_ = 2 * box_.half[naxes_ - 1] + 1;
  }

  void prepare(std::span<const TermSpec> terms) {
    std::vector<PairKey> missing;
    for (const auto& t : terms)
      for (const auto& p : t.parts) {
        check_part(p);
        PairKey key{p.monomial, p.deriv[naxes_ - 1]};
        if (!contractions_.contains(key) && std::find(missing.begin(), missing.end(), key) == missing.end())
          missing.push_back(std::move(key));
      }
    if (!missing.empty()) contract_time(missing);
  }

  double integrate(const TermSpec& t) {
    prepare(std::span(&t, 1));
    double total = 0.0;
    for (const auto& p : t.parts) {
      const auto& s = contractions_.at(PairKey{p.monomial, p.deriv[naxes_ - 1]});
      const auto& fx = factors(0, p.deriv[0]);
      double acc = 0.0;
      if (naxes_ == 3) {
        const auto& fy = factors(1, p.deriv[1]);
        for (std::size_t i = 0; i < nx_; ++i) {
          double row = 0.0;
          const double* si = s.data() + i * ny_;
          for (std::size_t j = 0; j < ny_; ++j) row += fy[j] * si[j];
          acc += fx[i] * row;
        }
      } else {
        for (std::size_t i = 0; i < nx_; ++i) acc += fx[i] * s[i];
      }
      total += p.prefactor * acc;
    }
    return total;
  }

 private:
  void check_part(const TermPart& p) const {
    if (static_cast<int>(p.deriv.size()) != naxes_ || static_cast<int>(p.monomial.size()) != field_.ncomp())
      throw Error(ErrorCode::ShapeMismatch, "term part layout does not match the field");
    for (int e : p.monomial)
      if (e < 0) throw Error(ErrorCode::InvalidArgument, "negative monomial exponent");
    for (int d : p.deriv)
      if (d < 0) throw Error(ErrorCode::InvalidArgument, "negative derivative order");
  }

  const std::vector<double>& factors(int axis, int order) {
    auto key = std::make_pair(axis, order);
    if (auto it = factors_.find(key); it != factors_.end()) return it->second;
    const GridGeometry& g = field_.geometry();
    const std::size_t half = box_.half[axis];
    const std::size_t n = 2 * half + 1;
    const double h = g.spacing[axis];
    const double H = static_cast<double>(half) * h;
    const auto tw = trapezoid_weights(n, h);
    const double scale = std::pow(H, -order);
    std::vector<double> f(n);
    const bool time = axis == naxes_ - 1;
    const Poly1D poly = time ? Poly1D() : envelope_derivative(weight_.p, order);
    for (std::size_t i = 0; i < n; ++i) {
      // Exactly symmetric normalized nodes.
      const double s = (static_cast<double>(i) - static_cast<double>(half)) / static_cast<double>(half);
      const double v = time ? temporal_factor(weight_, order, s) : poly(s);
      f[i] = tw[i] * v * scale;
    }
    return factors_.emplace(key, std::move(f)).first->second;
  }

  void contract_time(const std::vector<PairKey>& keys) {
    const GridGeometry& g = field_.geometry();
    const int ncomp = field_.ncomp();
    std::vector<const std::vector<double>*> tf;
    for (const auto& k : keys) tf.push_back(&factors(naxes_ - 1, k.second));
    std::vector<std::vector<double>> out(keys.size(), std::vector<double>(nx_ * ny_));
    std::vector<double> mono(nt_);
    const std::size_t t0 = box_.first[naxes_ - 1];
    for (std::size_t i = 0; i < nx_; ++i) {
      for (std::size_t j = 0; j < ny_; ++j) {
        std::size_t base = (box_.first[0] + i) * g.stride(0);
        if (naxes_ == 3) base += (box_.first[1] + j) * g.stride(1);
        base += t0;
        for (std::size_t k = 0; k < keys.size(); ++k) {
          std::fill(mono.begin(), mono.end(), 1.0);
          for (int c = 0; c < ncomp; ++c) {
            const double* u = field_.component(c).data() + base;
            for (int e = 0; e < keys[k].first[c]; ++e)
              for (std::size_t l = 0; l < nt_; ++l) mono[l] *= u[l];
          }
          const double* w = tf[k]->data();
          double acc = 0.0;
          for (std::size_t l = 0; l < nt_; ++l) acc += mono[l] * w[l];
          out[k][i * ny_ + j] = acc;
        }
      }
    }
    for (std::size_t k = 0; k < keys.size(); ++k) contractions_.emplace(keys[k], std::move(out[k]));
  }

  const GridField& field_;
  NodeBox box_;
  WeightSpec weight_;
  int naxes_ = 0;
  std::size_t nx_ = 0, ny_ = 0, nt_ = 0;
  std::map<std::pair<int, int>, std::vector<double>> factors_;
  std::map<PairKey, std::vector<double>> contractions_;
};

}  // namespace

BuiltinSystem parse_system(const std::string& id) {
  if (id == "ks") return BuiltinSystem::KuramotoSivashinsky;
  if (id == "kolmogorov") return BuiltinSystem::Kolmogorov;
  if (id == "lambda_omega_u") return BuiltinSystem::LambdaOmegaU;
  if (id == "lambda_omega_v") return BuiltinSystem::LambdaOmegaV;
  throw Error(ErrorCode::UnknownSystem, "unknown system '" + id + "'");
}

std::string system_id(BuiltinSystem system) {
  switch (system) {
    case BuiltinSystem::KuramotoSivashinsky: return "ks";
    case BuiltinSystem::Kolmogorov: return "kolmogorov";
    case BuiltinSystem::LambdaOmegaU: return "lambda_omega_u";
    case BuiltinSystem::LambdaOmegaV: return "lambda_omega_v";
  }
  return "unknown";
}

std::vector<std::string> Library::labels() const {
  std::vector<std::string> out;
  for (const auto& t : terms) out.push_back(t.label);
  return out;
}

Library builtin_library(BuiltinSystem system) {
  switch (system) {
    case BuiltinSystem::KuramotoSivashinsky: return ks_library();
    case BuiltinSystem::Kolmogorov: return kolmogorov_library();
    case BuiltinSystem::LambdaOmegaU: return lambda_omega_library(0);
    case BuiltinSystem::LambdaOmegaV: return lambda_omega_library(1);
  }
  throw Error(ErrorCode::UnknownSystem, "unknown system");
}

std::vector<int> max_derivative_orders(const Library& library) {
  std::vector<int> orders(static_cast<std::size_t>(library.ndim_space + 1), 0);
  auto scan = [&](const TermSpec& t) {
    for (const auto& p : t.parts)
      for (std::size_t a = 0; a < orders.size(); ++a) orders[a] = std::max(orders[a], p.deriv[a]);
  };
  scan(library.target);
  for (const auto& t : library.terms) scan(t);
  return orders;
}

void check_weight_for_library(const WeightSpec& weight, const Library& library) {
  validate(weight);
  if (weight.kind != library.default_weight.kind)
    throw Error(ErrorCode::InvalidWeight, "weight kind does not match the " + system_id(library.system) + " library");
  if (weight.kind == WeightKind::ScalarEnvelope && weight.p < library.required_spatial_order)
    throw Error(ErrorCode::InvalidWeight, "p = " + std::to_string(weight.p) + " cannot absorb spatial derivatives of order " +
                                              std::to_string(library.required_spatial_order));
  if (weight.kind == WeightKind::CurlStreamfunction && weight.p < library.required_spatial_order + 1)
    throw Error(ErrorCode::InvalidWeight, "curl weight exponent too small for the library");
}

NodeBox snap_domain(const GridGeometry& geometry, const IntegrationDomain& domain) {
  const int naxes = geometry.naxes();
  if (static_cast<int>(domain.center.size()) != naxes || static_cast<int>(domain.halfwidth.size()) != naxes)
    throw Error(ErrorCode::ShapeMismatch, "domain dimensionality does not match the grid");
  NodeBox box;
  for (int a = 0; a < naxes; ++a) {
    const std::size_t n = geometry.shape[a];
    const double h = geometry.spacing[a];
    auto half = static_cast<std::size_t>(std::max(1.0, std::round(domain.halfwidth[a] / h)));
    if (2 * half > n - 1) half = (n - 1) / 2;
    if (half < 1) throw Error(ErrorCode::TooFewNodes, "axis " + std::to_string(a) + " cannot hold a domain");
    const double c = std::round((domain.center[a] - geometry.origin[a]) / h);
    const double lo = static_cast<double>(half), hi = static_cast<double>(n - 1 - half);
    const auto center = static_cast<std::size_t>(std::clamp(c, lo, hi));
    box.first.push_back(center - half);
    box.half.push_back(half);
  }
  return box;
}

IntegrationDomain domain_of(const GridGeometry& geometry, const NodeBox& box) {
  IntegrationDomain d;
  for (int a = 0; a < geometry.naxes(); ++a) {
    d.center.push_back(geometry.coordinate(a, box.first[a] + box.half[a]));
    d.halfwidth.push_back(static_cast<double>(box.half[a]) * geometry.spacing[a]);
  }
  return d;
}

std::vector<IntegrationDomain> sample_domains(const GridGeometry& geometry, std::span<const double> halfwidth,
                                              std::size_t count, std::uint64_t seed) {
  const int naxes = geometry.naxes();
  if (static_cast<int>(halfwidth.size()) != naxes)
    throw Error(ErrorCode::ShapeMismatch, "one halfwidth per axis required");
  std::vector<double> lo(naxes), hi(naxes);
  for (int a = 0; a < naxes; ++a) {
    const double extent = geometry.extent(a);
    if (!(halfwidth[a] > 0.0)) throw Error(ErrorCode::InvalidArgument, "halfwidths must be positive");
    if (2.0 * halfwidth[a] > extent * (1.0 + 1e-12))
      throw Error(ErrorCode::DomainTooLarge, "2H = " + std::to_string(2.0 * halfwidth[a]) + " exceeds extent " +
                                                 std::to_string(extent) + " on axis " + std::to_string(a));
    lo[a] = geometry.origin[a] + halfwidth[a];
    hi[a] = std::max(lo[a], geometry.origin[a] + extent - halfwidth[a]);
  }
  SplitMix rng(seed);
  std::vector<IntegrationDomain> out(count);
  for (auto& d : out) {
    d.halfwidth.assign(halfwidth.begin(), halfwidth.end());
    for (int a = 0; a < naxes; ++a) d.center.push_back(lo[a] == hi[a] ? lo[a] : rng.uniform(lo[a], hi[a]));
  }
  return out;
}

std::vector<double> trapezoid_weights(std::size_t n, double h) {
  if (n < 2) throw Error(ErrorCode::TooFewNodes, "trapezoid rule needs at least 2 nodes");
  std::vector<double> w(n, h);
  w.front() = w.back() = 0.5 * h;
  return w;
}

double quadrature(std::span<const double> values, std::span<const std::size_t> shape,
                  std::span<const double> spacing) {
  if (shape.size() != spacing.size() || shape.empty())
    throw Error(ErrorCode::ShapeMismatch, "shape and spacing must match");
  std::size_t total = 1;
  std::vector<std::vector<double>> w;
  for (std::size_t a = 0; a < shape.size(); ++a) {
    w.push_back(trapezoid_weights(shape[a], spacing[a]));
    total *= shape[a];
  }
  if (values.size() != total) throw Error(ErrorCode::ShapeMismatch, "value count does not match shape");
  const std::size_t naxes = shape.size();
  std::vector<std::size_t> idx(naxes, 0);
  double sum = 0.0;
  for (std::size_t flat = 0; flat < total; ++flat) {
    double weight = 1.0;
    for (std::size_t a = 0; a < naxes; ++a) weight *= w[a][idx[a]];
    sum += weight * values[flat];
    for (std::size_t a = naxes; a-- > 0;) {
      if (++idx[a] < shape[a]) break;
      idx[a] = 0;
    }
  }
  return sum;
}

double assemble_column(const GridField& field, const TermSpec& term, const IntegrationDomain& domain,
                       const WeightSpec& weight) {
  validate(weight);
  DomainIntegrator integrator(field, snap_domain(field.geometry(), domain), weight);
  return integrator.integrate(term);
}

LinearSystem build_system(const GridField& field, const TermSpec& target, std::span<const TermSpec> library,
                          std::span<const IntegrationDomain> domains, const WeightSpec& weight) {
  validate(weight);
  const auto K = static_cast<Eigen::Index>(domains.size());
  const auto N = static_cast<Eigen::Index>(library.size());
  LinearSystem sys;
  sys.Q.resize(K, N);
  sys.q0.resize(K);
  sys.domains.resize(domains.size());
  for (const auto& t : library) sys.labels.push_back(t.label);

  std::vector<TermSpec> all(library.begin(), library.end());
  all.push_back(target);
  // Each (k, n) entry is written once; rows are independent.
  std::optional<Error> failure;
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index k = 0; k < K; ++k) {
    try {
      const NodeBox box = snap_domain(field.geometry(), domains[k]);
      sys.domains[k] = domain_of(field.geometry(), box);
      DomainIntegrator integrator(field, box, weight);
      integrator.prepare(all);
      for (Eigen::Index n = 0; n < N; ++n) sys.Q(k, n) = integrator.integrate(library[n]);
      sys.q0(k) = integrator.integrate(target);
    } catch (const Error& e) {
#pragma omp critical
      if (!failure) failure.emplace(e.code(), "domain " + std::to_string(k) + ": " + e.what());
    }
  }
  if (failure) throw *failure;
  if (!sys.Q.allFinite() || !sys.q0.allFinite())
    throw Error(ErrorCode::NonFiniteInput, "weak system contains non-finite entries");
  sys.column_norms = sys.Q.colwise().norm().transpose();
  return sys;
}

}  // namespace weakpde
