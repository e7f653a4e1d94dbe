#include "weakpde/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "spectral.hpp"
#include "weakpde/error.hpp"
#include "weakpde/random.hpp"

namespace weakpde {

using spectral::cplx;

namespace {

constexpr double kBlowUp = 1e6;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

std::size_t output_count(double duration, double dt) {
  return static_cast<std::size_t>(std::floor(duration / dt + 1e-9)) + 1;
}

void check_blowup(std::span<const double> u, double t) {
  for (double x : u)
    if (!std::isfinite(x) || std::abs(x) > kBlowUp)
      throw Error(ErrorCode::BlowUp, "solution exceeded 1e6 at t = " + std::to_string(t));
}

bool smooth(std::size_t n) {
  for (std::size_t f : {2u, 3u, 5u, 7u})
    while (n % f == 0) n /= f;
  return n == 1;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double get(const Metadata& m, const std::string& key, double fallback) {
  auto it = m.find(key);
  return it == m.end() ? fallback : std::stod(it->second);
}

std::string get(const Metadata& m, const std::string& key, const std::string& fallback) {
  auto it = m.find(key);
  return it == m.end() ? fallback : it->second;
}

}  // namespace

std::size_t mode_count(double length, double dx) {
  require(length > 0.0 && dx > 0.0, "length and dx must be positive");
  const double ratio = length / dx;
  const auto nearest = static_cast<std::size_t>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(nearest)) < 1e-6 * ratio) return nearest;
  for (std::size_t d = 0;; ++d) {
    for (std::size_t candidate : {nearest - d, nearest + d})
      if (candidate >= 4 && candidate % 2 == 0 && smooth(candidate)) return candidate;
  }
}

GridField solve_ks(const KSParams& params) {
  require(params.length > 0 && params.duration > 0 && params.dt > 0 && params.substeps >= 1,
          "invalid Kuramoto-Sivashinsky parameters");
  const std::size_t n = mode_count(params.length, params.dx);
  const std::size_t nt = output_count(params.duration, params.dt);
  GridField field(GridGeometry{1, {n, nt}, {params.length / static_cast<double>(n), params.dt}, {0.0, 0.0}}, 1);
  const double dx = field.geometry().spacing[0];

  spectral::RealFFT fft({static_cast<int>(n)});
  const std::size_t m = fft.complex_size();
  std::vector<double> k(m), lin(m);
  std::vector<bool> keep(m);
  for (std::size_t j = 0; j < m; ++j) {
    k[j] = j == n / 2 ? 0.0 : kTwoPi * static_cast<double>(j) / params.length;
    lin[j] = k[j] * k[j] - k[j] * k[j] * k[j] * k[j];
    keep[j] = spectral::keep_mode(static_cast<long>(j), n) && j != n / 2;
  }

  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) * dx;
    if (params.initial_condition == "cos_sin") {
      u[i] = std::cos(x / 16.0) * (1.0 + std::sin(x / 16.0));
    } else if (params.initial_condition == "sine") {
      u[i] = params.ic_amplitude * std::sin(kTwoPi * params.ic_mode * x / params.length);
    } else if (params.initial_condition == "zero") {
      u[i] = 0.0;
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown KS initial condition '" + params.initial_condition + "'");
    }
  }
  std::vector<cplx> v(m);
  fft.forward(u, v);
  v[n / 2] = 0.0;

  std::vector<double> phys(n);
  std::vector<cplx> spec(m);
  auto nonlinear = [&](const std::vector<cplx>& in, std::vector<cplx>& out) {
    if (params.linear_only) {
      std::fill(out.begin(), out.end(), cplx{});
      return;
    }
    fft.inverse(in, phys);
    for (double& x : phys) x *= x;
    fft.forward(phys, spec);
    for (std::size_t j = 0; j < m; ++j) out[j] = keep[j] ? cplx(0.0, -0.5 * k[j]) * spec[j] : cplx{};
  };

  spectral::Etdrk4 stepper(lin, params.dt / params.substeps);
  auto values = field.component(0);
  auto record = [&](std::size_t l) {
    fft.inverse(v, phys);
    check_blowup(phys, static_cast<double>(l) * params.dt);
    for (std::size_t i = 0; i < n; ++i) values[i * nt + l] = phys[i];
  };
  record(0);
  for (std::size_t l = 1; l < nt; ++l) {
    for (int s = 0; s < params.substeps; ++s) stepper.step(v, nonlinear);
    record(l);
  }
  return field;
}

GridField solve_lambda_omega(const RDParams& params) {
  require(params.length > 0 && params.duration > 0 && params.dt > 0 && params.substeps >= 1 && params.D >= 0,
          "invalid reaction-diffusion parameters");
  const std::size_t n = mode_count(params.length, params.dx);
  const std::size_t nt = output_count(params.duration, params.dt);
  const double h = params.length / static_cast<double>(n);
  const double origin = -0.5 * params.length;
  GridField field(GridGeometry{2, {n, n, nt}, {h, h, params.dt}, {origin, origin, 0.0}}, 2);

  spectral::ComplexFFT fft({static_cast<int>(n), static_cast<int>(n)});
  const std::size_t size = n * n;
  std::vector<double> lin(size);
  std::vector<bool> keep(size);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const long si = spectral::signed_index(i, n), sj = spectral::signed_index(j, n);
      const double kx = kTwoPi * static_cast<double>(si) / params.length;
      const double ky = kTwoPi * static_cast<double>(sj) / params.length;
      lin[i * n + j] = 1.0 - params.D * (kx * kx + ky * ky);
      keep[i * n + j] = spectral::keep_mode(si, n) && spectral::keep_mode(sj, n);
    }

  std::vector<cplx> z(size);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double x = origin + static_cast<double>(i) * h;
      const double y = origin + static_cast<double>(j) * h;
      if (params.initial_condition == "spiral") {
        const double r = std::hypot(x, y);
        z[i * n + j] = std::tanh(r) * std::exp(cplx(0.0, std::atan2(y, x) - r));
      } else if (params.initial_condition == "uniform") {
        z[i * n + j] = cplx(params.ic_u, params.ic_v);
      } else {
        throw Error(ErrorCode::InvalidArgument, "unknown reaction-diffusion initial condition '" +
                                                    params.initial_condition + "'");
      }
    }
  std::vector<cplx> zh(size);
  fft.forward(z, zh);

  const cplx reaction(-1.0, -params.beta);
  std::vector<cplx> work(size);
  auto nonlinear = [&](const std::vector<cplx>& in, std::vector<cplx>& out) {
    fft.inverse(in, work);
    for (auto& w : work) w = reaction * std::norm(w) * w;
    fft.forward(work, out);
    for (std::size_t i = 0; i < size; ++i)
      if (!keep[i]) out[i] = 0.0;
  };

  spectral::Etdrk4 stepper(lin, params.dt / params.substeps);
  auto u = field.component(0);
  auto v = field.component(1);
  auto record = [&](std::size_t l) {
    fft.inverse(zh, z);
    for (std::size_t p = 0; p < size; ++p) {
      const double re = z[p].real(), im = z[p].imag();
      if (!std::isfinite(re) || !std::isfinite(im) || std::abs(re) > kBlowUp || std::abs(im) > kBlowUp)
        throw Error(ErrorCode::BlowUp, "reaction-diffusion solution diverged at t = " + std::to_string(l * params.dt));
      u[p * nt + l] = re;
      v[p * nt + l] = im;
    }
  };
  record(0);
  for (std::size_t l = 1; l < nt; ++l) {
    for (int s = 0; s < params.substeps; ++s) stepper.step(zh, nonlinear);
    record(l);
  }
  return field;
}

KolmogorovResult solve_kolmogorov(const KolmogorovParams& params) {
  require(params.lx > 0 && params.ly > 0 && params.duration > 0 && params.output_dt > 0 && params.time_stride >= 1 &&
              params.space_stride >= 1 && params.spinup >= 0,
          "invalid Kolmogorov parameters");
  const std::size_t nx = mode_count(params.lx, params.dx);
  const std::size_t ny = mode_count(params.ly, params.dx);
  require(nx % static_cast<std::size_t>(params.space_stride) == 0 && ny % static_cast<std::size_t>(params.space_stride) == 0,
          "space_stride must divide the solver grid");
  const double hx = params.lx / static_cast<double>(nx), hy = params.ly / static_cast<double>(ny);
  const std::size_t rx = nx / params.space_stride, ry = ny / params.space_stride;
  const std::size_t nt = output_count(params.duration, params.output_dt);
  const double h = params.output_dt / params.time_stride;
  const auto stride = static_cast<std::size_t>(params.space_stride);

  const GridGeometry rec_geometry{2, {rx, ry, nt}, {hx * params.space_stride, hy * params.space_stride, params.output_dt},
                                  {0.0, 0.0, 0.0}};
  KolmogorovResult result;
  result.velocity = GridField(rec_geometry, 2);
  if (params.record_latent) result.latent = LatentRecord{GridField(rec_geometry, 1), GridField(rec_geometry, 2)};

  spectral::RealFFT fft({static_cast<int>(nx), static_cast<int>(ny)});
  const std::size_t my = ny / 2 + 1;
  const std::size_t m = nx * my;
  const std::size_t real = nx * ny;
  std::vector<double> kx(m), ky(m), k2(m), lin(m);
  std::vector<bool> keep(m);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < my; ++j) {
      const long si = spectral::signed_index(i, nx);
      const std::size_t p = i * my + j;
      // Nyquist rows carry no derivative information.
      kx[p] = 2 * i == nx ? 0.0 : kTwoPi * static_cast<double>(si) / params.lx;
      ky[p] = 2 * j == ny ? 0.0 : kTwoPi * static_cast<double>(j) / params.ly;
      const double kxf = kTwoPi * static_cast<double>(si) / params.lx, kyf = kTwoPi * static_cast<double>(j) / params.ly;
      k2[p] = kxf * kxf + kyf * kyf;
      lin[p] = -params.c2 * k2[p] + params.c3;
      keep[p] = spectral::keep_mode(si, nx) && spectral::keep_mode(static_cast<long>(j), ny);
    }

  // Curl of the forcing, -A kappa cos(kappa y), in spectral space.
  std::vector<double> phys(real);
  std::vector<cplx> forcing_curl(m);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j)
      phys[i * ny + j] = -params.amplitude * params.kappa * std::cos(params.kappa * static_cast<double>(j) * hy);
  fft.forward(phys, forcing_curl);
  for (std::size_t p = 0; p < m; ++p)
    if (!keep[p]) forcing_curl[p] = 0.0;

  // Initial vorticity.
  const double laminar = params.amplitude / (params.c2 * params.kappa * params.kappa - params.c3);
  SplitMix rng(params.seed);
  std::vector<cplx> w(m);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j) {
      const double x = static_cast<double>(i) * hx, y = static_cast<double>(j) * hy;
      double value = 0.0;
      if (params.initial_condition == "laminar") {
        value = -laminar * params.kappa * std::cos(params.kappa * y);
      } else if (params.initial_condition == "vortex") {
        const double dx = x - 0.5 * params.lx, dy = y - 0.5 * params.ly;
        value = std::exp(-(dx * dx + dy * dy) / 2.0);
      } else if (params.initial_condition != "zero") {
        throw Error(ErrorCode::InvalidArgument, "unknown Kolmogorov initial condition '" + params.initial_condition + "'");
      }
      phys[i * ny + j] = value;
    }
  fft.forward(phys, w);
  if (params.initial_condition == "laminar" && params.perturbation > 0.0) {
    // Random large-scale vorticity modes, |k| index <= 4.
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t j = 0; j <= 4; ++j) {
        const long si = spectral::signed_index(i, nx);
        if (std::abs(si) > 4 || (si == 0 && j == 0)) continue;
        const double amp = params.perturbation * static_cast<double>(real) * rng.normal();
        const double phase = kTwoPi * rng.uniform();
        w[i * my + j] += amp * std::exp(cplx(0.0, phase));
      }
  }
  w[0] = 0.0;
  for (std::size_t p = 0; p < m; ++p)
    if (!keep[p]) w[p] = 0.0;

  std::vector<cplx> a(m), b(m);
  std::vector<double> u(real), v(real), gx(real), gy(real);
  auto velocity_from = [&](const std::vector<cplx>& vort) {
    for (std::size_t p = 0; p < m; ++p) {
      const cplx psi = k2[p] > 0.0 ? vort[p] / k2[p] : cplx{};
      a[p] = cplx(0.0, ky[p]) * psi;   // u = d_y psi
      b[p] = cplx(0.0, -kx[p]) * psi;  // v = -d_x psi
    }
    fft.inverse(a, u);
    fft.inverse(b, v);
  };
  std::vector<cplx> prod(m);
  auto nonlinear = [&](const std::vector<cplx>& in, std::vector<cplx>& out) {
    velocity_from(in);
    for (std::size_t p = 0; p < m; ++p) {
      a[p] = cplx(0.0, kx[p]) * in[p];
      b[p] = cplx(0.0, ky[p]) * in[p];
    }
    fft.inverse(a, gx);
    fft.inverse(b, gy);
    for (std::size_t p = 0; p < real; ++p) phys[p] = params.c1 * (u[p] * gx[p] + v[p] * gy[p]);
    fft.forward(phys, prod);
    for (std::size_t p = 0; p < m; ++p) out[p] = keep[p] ? prod[p] + forcing_curl[p] : cplx{};
  };

  spectral::Etdrk4 stepper(lin, h);
  const auto spin_steps = static_cast<std::size_t>(std::llround(params.spinup / h));
  for (std::size_t s = 0; s < spin_steps; ++s) {
    stepper.step(w, nonlinear);
    if (s % 256 == 0) {
      velocity_from(w);
      check_blowup(u, static_cast<double>(s) * h - params.spinup);
    }
  }

  auto ux = result.velocity.component(0);
  auto uy = result.velocity.component(1);
  std::vector<double> div(real), ax(real), ay(real), bx(real), by(real);
  std::vector<cplx> uh(m), vh(m), nxh(m), nyh(m);
  auto record = [&](std::size_t l) {
    velocity_from(w);
    check_blowup(u, static_cast<double>(l) * params.output_dt);
    double energy = 0.0;
    for (std::size_t p = 0; p < real; ++p) energy += u[p] * u[p] + v[p] * v[p];
    result.energy.push_back(0.5 * energy / static_cast<double>(real));
    for (std::size_t i = 0; i < rx; ++i)
      for (std::size_t j = 0; j < ry; ++j) {
        const std::size_t src = i * stride * ny + j * stride;
        const std::size_t dst = (i * ry + j) * nt + l;
        ux[dst] = u[src];
        uy[dst] = v[src];
      }
    // Spectral divergence of the velocity actually recorded.
    fft.forward(u, uh);
    fft.forward(v, vh);
    for (std::size_t p = 0; p < m; ++p) a[p] = cplx(0.0, kx[p]) * uh[p] + cplx(0.0, ky[p]) * vh[p];
    fft.inverse(a, div);
    for (double d : div) result.max_divergence = std::max(result.max_divergence, std::abs(d));

    if (result.latent) {
      // lap p = c1 div((u.grad)u); the forcing is divergence-free.
      auto derivative = [&](const std::vector<cplx>& src, const std::vector<double>& kk, std::vector<double>& out) {
        for (std::size_t p = 0; p < m; ++p) a[p] = cplx(0.0, kk[p]) * src[p];
        fft.inverse(a, out);
      };
      derivative(uh, kx, ax);
      derivative(uh, ky, ay);
      derivative(vh, kx, bx);
      derivative(vh, ky, by);
      for (std::size_t p = 0; p < real; ++p) phys[p] = u[p] * ax[p] + v[p] * ay[p];
      fft.forward(phys, nxh);
      for (std::size_t p = 0; p < real; ++p) phys[p] = u[p] * bx[p] + v[p] * by[p];
      fft.forward(phys, nyh);
      for (std::size_t p = 0; p < m; ++p) {
        const cplx d = cplx(0.0, kx[p]) * nxh[p] + cplx(0.0, ky[p]) * nyh[p];
        b[p] = k2[p] > 0.0 ? -params.c1 * d / k2[p] : cplx{};
      }
      fft.inverse(b, phys);
      auto pr = result.latent->pressure.component(0);
      auto fx = result.latent->forcing.component(0);
      for (std::size_t i = 0; i < rx; ++i)
        for (std::size_t j = 0; j < ry; ++j) {
          const std::size_t dst = (i * ry + j) * nt + l;
          pr[dst] = phys[i * stride * ny + j * stride];
          fx[dst] = params.amplitude * std::sin(params.kappa * static_cast<double>(j * stride) * hy);
        }
    }
  };
  record(0);
  for (std::size_t l = 1; l < nt; ++l) {
    for (int s = 0; s < params.time_stride; ++s) stepper.step(w, nonlinear);
    record(l);
  }

  // Time dependence over the second half of the record.
  const std::size_t half = result.energy.size() / 2;
  double mean = 0.0, var = 0.0;
  for (std::size_t l = half; l < result.energy.size(); ++l) mean += result.energy[l];
  mean /= static_cast<double>(result.energy.size() - half);
  for (std::size_t l = half; l < result.energy.size(); ++l) var += std::pow(result.energy[l] - mean, 2);
  var /= static_cast<double>(result.energy.size() - half);
  result.time_dependent = var > 1e-10 * mean * mean;
  return result;
}

Metadata metadata_of(const KSParams& p) {
  return {{"system", "ks"},
          {"length", fmt(p.length)},
          {"duration", fmt(p.duration)},
          {"dx", fmt(p.dx)},
          {"dt", fmt(p.dt)},
          {"substeps", std::to_string(p.substeps)},
          {"initial_condition", p.initial_condition},
          {"integrator", "etdrk4"},
          {"contour_points", "32"},
          {"dealias", "2/3"}};
}

Metadata metadata_of(const RDParams& p) {
  return {{"system", "lambda_omega"},
          {"D", fmt(p.D)},
          {"beta", fmt(p.beta)},
          {"length", fmt(p.length)},
          {"duration", fmt(p.duration)},
          {"dx", fmt(p.dx)},
          {"dt", fmt(p.dt)},
          {"substeps", std::to_string(p.substeps)},
          {"initial_condition", p.initial_condition},
          {"integrator", "etdrk4"},
          {"contour_points", "32"},
          {"dealias", "2/3"}};
}

Metadata metadata_of(const KolmogorovParams& p) {
  return {{"system", "kolmogorov"},
          {"c1", fmt(p.c1)},
          {"c2", fmt(p.c2)},
          {"c3", fmt(p.c3)},
          {"amplitude", fmt(p.amplitude)},
          {"kappa", fmt(p.kappa)},
          {"lx", fmt(p.lx)},
          {"ly", fmt(p.ly)},
          {"duration", fmt(p.duration)},
          {"spinup", fmt(p.spinup)},
          {"dx", fmt(p.dx)},
          {"output_dt", fmt(p.output_dt)},
          {"time_stride", std::to_string(p.time_stride)},
          {"space_stride", std::to_string(p.space_stride)},
          {"initial_condition", p.initial_condition},
          {"perturbation", fmt(p.perturbation)},
          {"seed", std::to_string(p.seed)},
          {"integrator", "etdrk4-vorticity"},
          {"contour_points", "32"},
          {"dealias", "2/3"}};
}

void write_metadata(const Metadata& metadata, const std::filesystem::path& path) {
  std::string text;
  for (const auto& [k, v] : metadata) text += k + "=" + v + "\n";
  write_atomically(path, std::span(text.data(), text.size()));
}

Metadata read_metadata(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::Io, "cannot open " + path.string());
  Metadata out;
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    if (line.empty() || line[0] == '#' || eq == std::string::npos) continue;
    out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

KSParams ks_params_from(const Metadata& m) {
  KSParams p;
  p.length = get(m, "length", p.length);
  p.duration = get(m, "duration", p.duration);
  p.dx = get(m, "dx", p.dx);
  p.dt = get(m, "dt", p.dt);
  p.substeps = static_cast<int>(get(m, "substeps", static_cast<double>(p.substeps)));
  p.initial_condition = get(m, "initial_condition", p.initial_condition);
  return p;
}

RDParams rd_params_from(const Metadata& m) {
  RDParams p;
  p.D = get(m, "D", p.D);
  p.beta = get(m, "beta", p.beta);
  p.length = get(m, "length", p.length);
  p.duration = get(m, "duration", p.duration);
  p.dx = get(m, "dx", p.dx);
  p.dt = get(m, "dt", p.dt);
  p.substeps = static_cast<int>(get(m, "substeps", static_cast<double>(p.substeps)));
  p.initial_condition = get(m, "initial_condition", p.initial_condition);
  return p;
}

KolmogorovParams kolmogorov_params_from(const Metadata& m) {
  KolmogorovParams p;
  p.c1 = get(m, "c1", p.c1);
  p.c2 = get(m, "c2", p.c2);
  p.c3 = get(m, "c3", p.c3);
  p.amplitude = get(m, "amplitude", p.amplitude);
  p.kappa = get(m, "kappa", p.kappa);
  p.lx = get(m, "lx", p.lx);
  p.ly = get(m, "ly", p.ly);
  p.duration = get(m, "duration", p.duration);
  p.spinup = get(m, "spinup", p.spinup);
  p.dx = get(m, "dx", p.dx);
  p.output_dt = get(m, "output_dt", p.output_dt);
  p.time_stride = static_cast<int>(get(m, "time_stride", static_cast<double>(p.time_stride)));
  p.space_stride = static_cast<int>(get(m, "space_stride", static_cast<double>(p.space_stride)));
  p.initial_condition = get(m, "initial_condition", p.initial_condition);
  p.perturbation = get(m, "perturbation", p.perturbation);
  if (auto it = m.find("seed"); it != m.end()) p.seed = std::stoull(it->second);
  return p;
}

Eigen::VectorXd ks_reference() { return Eigen::Vector3d(-1.0, -1.0, -1.0); }

Eigen::VectorXd kolmogorov_reference(const KolmogorovParams& params) {
  return Eigen::Vector3d(params.c1, params.c2, params.c3);
}

// Library order: lap, u, v, u^2, uv, v^2, u^3, u^2v, uv^2, v^3.
Eigen::VectorXd lambda_omega_reference(const RDParams& params, int component) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(10);
  c(0) = params.D;
  if (component == 0) {
    c(1) = 1.0;            // u
    c(6) = -1.0;           // u^3
    c(7) = params.beta;    // u^2 v
    c(8) = -1.0;           // u v^2
    c(9) = params.beta;    // v^3
  } else {
    c(2) = 1.0;            // v
    c(6) = -params.beta;   // u^3
    c(7) = -1.0;           // u^2 v
    c(8) = -params.beta;   // u v^2
    c(9) = -1.0;           // v^3
  }
  return c;
}

}  // namespace weakpde
