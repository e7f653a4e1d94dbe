#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>

#include "weakpde/solvers.hpp"

using namespace weakpde;
using std::numbers::pi;

TEST(ModeCount, ExactAndSmooth) {
  EXPECT_EQ(mode_count(14.0, 0.1), 140u);
  EXPECT_EQ(mode_count(20.0, 0.0391), 512u);
  EXPECT_EQ(mode_count(32 * pi, 0.0982), 1024u);
}

TEST(Ks, DefaultShapeAndNoBlowUp) {
  const GridField u = solve_ks(KSParams{});
  EXPECT_EQ(u.geometry().shape, (std::vector<std::size_t>{1024, 251}));
  EXPECT_NEAR(u.geometry().spacing[1], 0.4, 1e-15);
  // Late-time temporal variance at a fixed point is far from zero: the flow is chaotic.
  const std::size_t nt = 251;
  double mean = 0.0, var = 0.0;
  for (std::size_t j = 150; j < nt; ++j) mean += u.values()[300 * nt + j] / 101.0;
  for (std::size_t j = 150; j < nt; ++j) var += std::pow(u.values()[300 * nt + j] - mean, 2) / 101.0;
  EXPECT_GT(var, 0.1);
  for (double v : u.values()) ASSERT_LT(std::abs(v), 10.0);
}

TEST(Ks, ZeroStaysZero) {
  KSParams p;
  p.initial_condition = "zero";
  p.duration = 20.0;
  const GridField u = solve_ks(p);
  for (double v : u.values()) EXPECT_EQ(v, 0.0);
}

TEST(Ks, LinearDispersion) {
  KSParams p;
  p.linear_only = true;
  p.initial_condition = "sine";
  p.ic_amplitude = 1e-3;
  p.ic_mode = 8;
  p.duration = 20.0;
  const GridField u = solve_ks(p);
  const double k = 2 * pi * 8 / p.length;
  const auto& g = u.geometry();
  const std::size_t n = g.shape[0], nt = g.shape[1];
  for (std::size_t j = 0; j < nt; j += 10) {
    const double t = g.coordinate(1, j);
    // Project onto sin(kx) to read the amplitude.
    double proj = 0.0;
    for (std::size_t i = 0; i < n; ++i) proj += u.values()[i * nt + j] * std::sin(k * g.coordinate(0, i));
    const double amp = 2.0 * proj / static_cast<double>(n);
    const double expected = 1e-3 * std::exp((k * k - k * k * k * k) * t);
    EXPECT_NEAR(amp / expected, 1.0, 1e-6) << "t = " << t;
  }
}

TEST(Ks, InvalidParamsRejected) {
  KSParams p;
  p.dt = -1.0;
  EXPECT_THROW(solve_ks(p), Error);
  p = KSParams{};
  p.initial_condition = "gaussian";
  EXPECT_THROW(solve_ks(p), Error);
}

TEST(LambdaOmega, UniformRotation) {
  RDParams p;
  p.length = 5.0;
  p.dx = 5.0 / 32;
  p.duration = 4.0;
  p.initial_condition = "uniform";
  const GridField f = solve_lambda_omega(p);
  const auto& g = f.geometry();
  const std::size_t nt = g.shape[2];
  for (std::size_t j = 0; j < nt; ++j) {
    const double t = g.coordinate(2, j);
    if (t < 1.0) continue;
    const std::complex<double> expected = std::exp(std::complex<double>(0.0, -p.beta * t));
    for (std::size_t i = 0; i < g.points(); i += nt * 37 + 1) {
      const std::size_t at = (i / nt) * nt + j;
      EXPECT_NEAR(f.component(0)[at], expected.real(), 1e-4);
      EXPECT_NEAR(f.component(1)[at], expected.imag(), 1e-4);
    }
  }
}

TEST(LambdaOmega, OriginIsFixedPoint) {
  RDParams p;
  p.length = 5.0;
  p.dx = 5.0 / 32;
  p.duration = 2.0;
  p.initial_condition = "uniform";
  p.ic_u = 0.0;
  p.ic_v = 0.0;
  const GridField f = solve_lambda_omega(p);
  for (double v : f.values()) EXPECT_EQ(v, 0.0);
}

TEST(LambdaOmega, SpiralStaysOnLimitCycle) {
  RDParams p;
  p.length = 10.0;
  p.dx = 10.0 / 128;
  p.duration = 5.0;
  const GridField f = solve_lambda_omega(p);
  EXPECT_EQ(f.ncomp(), 2);
  const auto& g = f.geometry();
  const std::size_t nt = g.shape[2];
  // Away from the core |z| stays near 1 and the phase rotates.
  const std::size_t i = 110, j = 110;
  const std::size_t base = (i * g.shape[1] + j) * nt;
  double rmin = 10.0;
  for (std::size_t l = 0; l < nt; ++l)
    rmin = std::min(rmin, std::hypot(f.component(0)[base + l], f.component(1)[base + l]));
  EXPECT_GT(rmin, 0.8);
  EXPECT_GT(std::abs(f.component(0)[base] - f.component(0)[base + 15]), 0.1);
}

namespace {

KolmogorovParams small_kolmogorov() {
  KolmogorovParams p;
  p.lx = 4.0;
  p.ly = 4.0;
  p.dx = 0.1;
  p.space_stride = 1;
  p.time_stride = 4;
  p.output_dt = 0.2;
  p.spinup = 0.0;
  return p;
}

}  // namespace

TEST(Kolmogorov, UnforcedVortexEnergyDecays) {
  KolmogorovParams p = small_kolmogorov();
  p.amplitude = 0.0;
  p.initial_condition = "vortex";
  p.duration = 10.0;
  const KolmogorovResult r = solve_kolmogorov(p);
  ASSERT_GT(r.energy.size(), 10u);
  EXPECT_GT(r.energy.front(), 0.0);
  for (std::size_t i = 1; i < r.energy.size(); ++i) EXPECT_LT(r.energy[i], r.energy[i - 1]);
  EXPECT_LT(r.max_divergence, 1e-10);
}

TEST(Kolmogorov, WeakForcingReachesLaminarProfile) {
  KolmogorovParams p = small_kolmogorov();
  p.amplitude = 0.1;
  p.initial_condition = "zero";
  p.spinup = 40.0;
  p.duration = 2.0;
  const KolmogorovResult r = solve_kolmogorov(p);
  const GridField& u = r.velocity;
  const auto& g = u.geometry();
  const double U = p.amplitude / (p.c2 * p.kappa * p.kappa - p.c3);
  const std::size_t nt = g.shape[2];
  double err = 0.0;
  for (std::size_t i = 0; i < g.shape[0]; ++i)
    for (std::size_t j = 0; j < g.shape[1]; ++j) {
      const double y = g.coordinate(1, j);
      const std::size_t at = (i * g.shape[1] + j) * nt + nt - 1;
      err = std::max(err, std::abs(u.component(0)[at] - U * std::sin(p.kappa * y)));
      err = std::max(err, std::abs(u.component(1)[at]));
    }
  EXPECT_LE(err, 1e-4 * U);
  EXPECT_FALSE(r.time_dependent);
}

TEST(Kolmogorov, LatentRecordAndStrides) {
  KolmogorovParams p = small_kolmogorov();
  p.record_latent = true;
  p.space_stride = 2;
  p.duration = 1.0;
  const KolmogorovResult r = solve_kolmogorov(p);
  ASSERT_TRUE(r.latent.has_value());
  EXPECT_EQ(r.velocity.geometry(), r.latent->pressure.geometry());
  EXPECT_NEAR(r.velocity.geometry().spacing[0], 0.2, 1e-15);
  EXPECT_EQ(r.velocity.geometry().shape, (std::vector<std::size_t>{20, 20, 6}));
  // Steady forcing A sin(kappa y) in x.
  const auto& g = r.latent->forcing.geometry();
  const std::size_t at = (3 * g.shape[1] + 7) * g.shape[2] + 2;
  EXPECT_NEAR(r.latent->forcing.component(0)[at], p.amplitude * std::sin(p.kappa * g.coordinate(1, 7)), 1e-12);
  EXPECT_EQ(r.latent->forcing.component(1)[at], 0.0);
}

TEST(Kolmogorov, StrideMustDivideGrid) {
  KolmogorovParams p = small_kolmogorov();
  p.space_stride = 3;
  EXPECT_THROW(solve_kolmogorov(p), Error);
}

TEST(Metadata, RoundTripParams) {
  KolmogorovParams k;
  k.c1 = -0.5;
  k.seed = 99;
  const auto path = std::filesystem::temp_directory_path() / "weakpde_test.meta";
  write_metadata(metadata_of(k), path);
  const Metadata m = read_metadata(path);
  EXPECT_EQ(m.at("system"), "kolmogorov");
  const KolmogorovParams back = kolmogorov_params_from(m);
  EXPECT_EQ(back.c1, k.c1);
  EXPECT_EQ(back.seed, 99u);
  EXPECT_EQ(back.dx, k.dx);

  RDParams rd;
  rd.beta = 1.5;
  EXPECT_EQ(rd_params_from(metadata_of(rd)).beta, 1.5);
  KSParams ks;
  ks.dt = 0.25;
  EXPECT_EQ(ks_params_from(metadata_of(ks)).dt, 0.25);
  std::filesystem::remove(path);
}

TEST(References, Coefficients) {
  EXPECT_EQ(ks_reference(), Eigen::Vector3d(-1, -1, -1));
  const KolmogorovParams k;
  EXPECT_EQ(kolmogorov_reference(k), Eigen::Vector3d(k.c1, k.c2, k.c3));
  RDParams rd;
  rd.beta = 2.0;
  const Eigen::VectorXd u = lambda_omega_reference(rd, 0);
  const Eigen::VectorXd v = lambda_omega_reference(rd, 1);
  ASSERT_EQ(u.size(), 10);
  // lap, u, v, u^2, uv, v^2, u^3, u^2v, uv^2, v^3
  Eigen::VectorXd eu(10), ev(10);
  eu << 0.1, 1, 0, 0, 0, 0, -1, 2, -1, 2;
  ev << 0.1, 0, 1, 0, 0, 0, -2, -1, -2, -1;
  EXPECT_EQ(u, eu);
  EXPECT_EQ(v, ev);
}
