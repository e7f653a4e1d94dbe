#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "weakpde/analytic.hpp"
#include "weakpde/grid_field.hpp"

using namespace weakpde;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("weakpde_test_" + name);
}

GridField ramp(std::vector<std::size_t> shape, int ndim, int ncomp) {
  std::vector<double> h(shape.size(), 0.5), o(shape.size(), -1.0);
  GridField f = make_grid(ndim, shape, h, o, ncomp);
  auto v = f.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.37 * static_cast<double>(i)) + 1e-3 * static_cast<double>(i);
  return f;
}

}  // namespace

TEST(MakeGrid, ZeroFilled1D) {
  const GridField f = make_grid(1, {8, 4}, {0.5, 0.25}, {0, 0}, 1);
  EXPECT_EQ(f.values().size(), 32u);
  for (double v : f.values()) EXPECT_EQ(v, 0.0);
  EXPECT_DOUBLE_EQ(f.geometry().extent(0), 3.5);
  EXPECT_DOUBLE_EQ(f.geometry().extent(1), 0.75);
}

TEST(MakeGrid, ZeroFilled2DTwoComponents) {
  const GridField f = make_grid(2, {4, 4, 2}, {1, 1, 1}, {0, 0, 0}, 2);
  EXPECT_EQ(f.values().size(), 64u);
  EXPECT_EQ(f.ncomp(), 2);
}

TEST(MakeGrid, Rejections) {
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  EXPECT_EQ(code_of([] { make_grid(1, {1, 4}, {1, 1}, {0, 0}, 1); }), ErrorCode::DegenerateAxis);
  EXPECT_EQ(code_of([] { make_grid(1, {4, 4}, {0.0, 1}, {0, 0}, 1); }), ErrorCode::DegenerateAxis);
  EXPECT_EQ(code_of([] { make_grid(3, {4, 4, 4, 4}, {1, 1, 1, 1}, {0, 0, 0, 0}, 1); }), ErrorCode::InvalidDimension);
  EXPECT_EQ(code_of([] { make_grid(1, {4, 4}, {1, 1}, {0, 0}, 3); }), ErrorCode::InvalidDimension);
}

TEST(AddNoise, ZeroSigmaIsIdentity) {
  const GridField f = ramp({16, 9}, 1, 1);
  EXPECT_EQ(add_noise(f, {0.0, 11}), f);
}

TEST(AddNoise, MomentsAndDeterminism) {
  const GridField f = make_grid(2, {100, 100, 100}, {1, 1, 1}, {0, 0, 0}, 1);
  const GridField a = add_noise(f, {0.3, 42});
  const GridField b = add_noise(f, {0.3, 42});
  ASSERT_EQ(a, b);
  const auto v = a.values();
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x / n;
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean) / (n - 1.0);
  EXPECT_NEAR(std::sqrt(var), 0.3, 0.003);
  EXPECT_LE(std::abs(mean), 5.0 * 0.3 / std::sqrt(n));
  EXPECT_NE(add_noise(f, {0.3, 43}), a);
}

TEST(AddNoise, NegativeSigmaRejected) {
  EXPECT_THROW(add_noise(ramp({4, 4}, 1, 1), {-1.0, 1}), Error);
}

TEST(Subsample, UnitStrideIsIdentity) {
  const GridField f = ramp({7, 5, 6}, 2, 2);
  const std::vector<std::size_t> s{1, 1, 1};
  EXPECT_EQ(subsample(f, s), f);
}

TEST(Subsample, KeepsEverySthNodeAndScalesSpacing) {
  const GridField f = ramp({9, 7}, 1, 1);
  const std::vector<std::size_t> s{4, 3};
  const GridField g = subsample(f, s);
  ASSERT_EQ(g.geometry().shape, (std::vector<std::size_t>{3, 3}));
  EXPECT_DOUBLE_EQ(g.geometry().spacing[0], 2.0);
  EXPECT_DOUBLE_EQ(g.geometry().spacing[1], 1.5);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(g.values()[i * 3 + j], f.values()[(4 * i) * 7 + 3 * j]);
}

TEST(Subsample, FineKolmogorovGridToRecordedSpacing) {
  // Solver grid dx = 0.025, dt_c = 0.2302 / 12; strides (4, 4, 12).
  const GridField f = make_grid(2, {41, 41, 25}, {0.025, 0.025, 0.2302 / 12}, {0, 0, 0}, 2);
  const std::vector<std::size_t> s{4, 4, 12};
  const GridField g = subsample(f, s);
  EXPECT_NEAR(g.geometry().spacing[0], 0.1, 1e-15);
  EXPECT_NEAR(g.geometry().spacing[1], 0.1, 1e-15);
  EXPECT_NEAR(g.geometry().spacing[2], 0.2302, 1e-15);
  EXPECT_EQ(g.geometry().shape, (std::vector<std::size_t>{11, 11, 3}));
}

TEST(Subsample, ComposesMultiplicatively) {
  const GridField f = ramp({25, 13}, 1, 1);
  const std::vector<std::size_t> a{2, 3}, b{3, 2}, ab{6, 6};
  EXPECT_EQ(subsample(subsample(f, a), b), subsample(f, ab));
}

TEST(Subsample, StrideBeyondAxisIsEmpty) {
  const GridField f = ramp({5, 5}, 1, 1);
  const std::vector<std::size_t> s{5, 1};
  try {
    subsample(f, s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyResult);
  }
}

TEST(FieldFile, RoundTrip) {
  const GridField f = ramp({6, 5, 4}, 2, 2);
  const auto path = temp_file("roundtrip.wfpd");
  save_field(f, path);
  EXPECT_EQ(load_field(path), f);
  std::filesystem::remove(path);
}

TEST(FieldFile, HeaderErrors) {
  const GridField f = ramp({6, 4}, 1, 1);
  std::vector<std::uint8_t> bytes = encode_field(f);
  ASSERT_EQ(decode_field(bytes), f);

  auto code_of = [](std::vector<std::uint8_t> b) {
    try {
      decode_field(b);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_EQ(code_of(bad_magic), ErrorCode::MalformedHeader);

  auto short_payload = bytes;
  short_payload.resize(bytes.size() - 8);
  EXPECT_EQ(code_of(short_payload), ErrorCode::TruncatedPayload);

  auto bad_version = bytes;
  bad_version[4] = 99;
  EXPECT_EQ(code_of(bad_version), ErrorCode::UnsupportedVersion);
}

TEST(FieldFile, MissingFileIsIoError) {
  try {
    load_field(temp_file("does_not_exist.wfpd"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
  }
}

TEST(Analytic, ConstantIsAllOnes) {
  GridGeometry g{1, {9, 5}, {0.1, 0.2}, {0, 0}};
  const GridField f = eval_analytic(g, AnalyticField::constant(1, {1.0}));
  for (double v : f.values()) EXPECT_EQ(v, 1.0);
}

TEST(Analytic, TimeIndependentSlicesIdentical) {
  const double L = 4.0;
  GridGeometry g{1, {17, 6}, {L / 16, 0.3}, {0, 0}};
  const auto expr = AnalyticField::sinusoid(1, {{{1.0}, {2 * std::numbers::pi / L}, 0.0, 0.0}});
  const GridField f = eval_analytic(g, expr);
  for (std::size_t i = 0; i < 17; ++i)
    for (std::size_t j = 1; j < 6; ++j) EXPECT_EQ(f.values()[i * 6 + j], f.values()[i * 6]);
}

TEST(Analytic, ExactSamplingOnRefinedGrids) {
  const double k = 1.3, w = 0.7;
  // sin(kx)cos(wt) = (sin(kx + wt) + sin(kx - wt)) / 2
  const auto expr = AnalyticField::sinusoid(1, {{{0.5}, {k}, w, 0.0}, {{0.5}, {k}, -w, 0.0}});
  for (std::size_t n : {11u, 21u, 41u}) {
    GridGeometry g{1, {n, n}, {3.0 / (n - 1), 2.0 / (n - 1)}, {-1, 0}};
    const GridField f = eval_analytic(g, expr);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double x = g.coordinate(0, i), t = g.coordinate(1, j);
        err = std::max(err, std::abs(f.values()[i * n + j] - std::sin(k * x) * std::cos(w * t)));
      }
    EXPECT_LE(err, 1e-15);
  }
}

TEST(Analytic, DerivativesOfPolynomial) {
  // u = 3 x^2 t - y
  const auto expr = AnalyticField::polynomial(2, 1, {{0, 3.0, {2, 0, 1}}, {0, -1.0, {0, 1, 0}}});
  const std::vector<double> pt{0.5, 2.0, -1.5};
  const std::vector<int> dx{1, 0, 0}, dxt{1, 0, 1}, dy{0, 1, 0}, d3{3, 0, 0};
  EXPECT_DOUBLE_EQ(expr.derivative(0, dx, pt), 6 * 0.5 * -1.5);
  EXPECT_DOUBLE_EQ(expr.derivative(0, dxt, pt), 3.0);
  EXPECT_DOUBLE_EQ(expr.derivative(0, dy, pt), -1.0);
  EXPECT_DOUBLE_EQ(expr.derivative(0, d3, pt), 0.0);
}

TEST(Analytic, UnknownIdRejected) {
  try {
    AnalyticField::from_id("gaussian", 1, 1, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownExpression);
  }
}
