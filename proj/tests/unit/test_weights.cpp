#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "weakpde/random.hpp"
#include "weakpde/weights.hpp"

using namespace weakpde;

TEST(Envelope, ValuesAndDerivatives) {
  const Poly1D e0 = envelope_derivative(4, 0);
  EXPECT_DOUBLE_EQ(e0(0.0), 1.0);
  EXPECT_DOUBLE_EQ(e0(1.0), 0.0);
  EXPECT_DOUBLE_EQ(e0(-1.0), 0.0);
  EXPECT_DOUBLE_EQ(envelope_derivative(4, 1)(0.0), 0.0);
  // (x^2-1)^4 = x^8 - 4x^6 + 6x^4 - 4x^2 + 1; fourth derivative at 0 is 4! * 6.
  EXPECT_DOUBLE_EQ(envelope_derivative(4, 4)(0.0), 144.0);
  EXPECT_TRUE(envelope_derivative(4, 9).is_zero());
}

TEST(Envelope, CoefficientsAreBinomial) {
  const Poly1D e = Poly1D::envelope(3);  // x^6 - 3x^4 + 3x^2 - 1
  const std::vector<double> expected{-1, 0, 3, 0, -3, 0, 1};
  ASSERT_EQ(e.coefficients().size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_EQ(e.coefficients()[i], expected[i]);
}

TEST(Envelope, DerivativeMatchesFiniteDifference) {
  const Poly1D e = envelope_derivative(5, 2);
  const Poly1D d = envelope_derivative(5, 3);
  const double h = 1e-5;
  for (double x : {-0.9, -0.3, 0.2, 0.75})
    EXPECT_NEAR(d(x), (e(x + h) - e(x - h)) / (2 * h), 1e-6 * (1 + std::abs(d(x))));
}

TEST(EvalWeight, CenterValue) {
  const WeightSpec ks = WeightSpec::scalar_envelope(4, 3);
  const std::vector<int> d{0, 0};
  const std::vector<double> pt{0, 0}, H{12.25, 10};
  EXPECT_DOUBLE_EQ(eval_weight(ks, d, pt, H), -1.0);
}

TEST(EvalWeight, ChainRuleScaling) {
  const WeightSpec ks = WeightSpec::scalar_envelope(4, 3);
  const std::vector<int> d{4, 0};
  const std::vector<double> pt{0, 0}, H{2, 5};
  EXPECT_DOUBLE_EQ(eval_weight(ks, d, pt, H), -9.0);
}

TEST(EvalWeight, VanishesOnSpatialFaces) {
  const WeightSpec ks = WeightSpec::scalar_envelope(4, 3);
  const std::vector<double> H{3, 2};
  SplitMix rng(5);
  for (int order = 0; order <= 3; ++order)
    for (int tord = 0; tord <= 2; ++tord)
      for (int i = 0; i < 20; ++i) {
        const double t = rng.uniform(-1, 1);
        const std::vector<int> d{order, tord};
        for (double face : {-1.0, 1.0}) {
          const std::vector<double> pt{face, t};
          EXPECT_EQ(eval_weight(ks, d, pt, H), 0.0);
        }
      }
}

TEST(EvalWeight, OutsideBoxRejected) {
  const WeightSpec ks = WeightSpec::scalar_envelope(4, 3);
  const std::vector<int> d{0, 0};
  const std::vector<double> pt{1.01, 0}, H{1, 1};
  try {
    eval_weight(ks, d, pt, H);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfRange);
  }
}

TEST(EvalCurlWeight, IsCurlOfStreamfunction) {
  const WeightSpec c = WeightSpec::curl_streamfunction(3);
  const std::vector<double> H{0.7, 1.3, 2.0};
  const std::vector<double> pt{0.3, -0.45, 0.2};
  const std::vector<int> none{0, 0, 0}, dx{1, 0, 0}, dy{0, 1, 0};
  const auto w = eval_curl_weight(c, none, pt, H);
  EXPECT_DOUBLE_EQ(w[0], eval_weight(c, dy, pt, H));
  EXPECT_DOUBLE_EQ(w[1], -eval_weight(c, dx, pt, H));
  // div w = d_x w_x + d_y w_y vanishes identically.
  const auto wx = eval_curl_weight(c, dx, pt, H);
  const auto wy = eval_curl_weight(c, dy, pt, H);
  EXPECT_NEAR(wx[0] + wy[1], 0.0, 1e-14);
}

TEST(ValidateWeight, CurlRequiresSineAndP3) {
  EXPECT_NO_THROW(validate(WeightSpec::curl_streamfunction(3)));
  EXPECT_THROW(validate(WeightSpec::curl_streamfunction(2)), Error);
  WeightSpec poly = WeightSpec::curl_streamfunction(3);
  poly.temporal = TemporalFactor::Polynomial;
  poly.q = 1;
  EXPECT_THROW(validate(poly), Error);
  EXPECT_THROW(validate(WeightSpec::scalar_envelope(0, 1)), Error);
}

TEST(VerifyWeight, CurlPassesAllChecks) {
  const WeightReport r = verify_weight(WeightSpec::curl_streamfunction(3), 2, 2);
  EXPECT_TRUE(r.ok());
  EXPECT_LE(r.max_boundary, 1e-12);
  EXPECT_LE(r.max_divergence, 1e-12);
  EXPECT_LE(r.max_time_mean, 1e-12);
}

TEST(VerifyWeight, KsEnvelopePassesOrder4) {
  const WeightReport r = verify_weight(WeightSpec::scalar_envelope(4, 3), 1, 4);
  EXPECT_TRUE(r.ok());
  EXPECT_TRUE(r.boundary_ok);
}

TEST(VerifyWeight, LambdaOmegaEnvelopePassesOrder2) {
  EXPECT_TRUE(verify_weight(WeightSpec::scalar_envelope(2, 1), 2, 2).ok());
}

TEST(VerifyWeight, InsufficientExponentFails) {
  const WeightReport r = verify_weight(WeightSpec::scalar_envelope(1, 1), 1, 4);
  EXPECT_FALSE(r.ok());
  EXPECT_FALSE(r.boundary_ok);
  EXPECT_FALSE(r.violations.empty());
}

TEST(VerifyWeight, PolynomialTimeFactorBreaksTimeMean) {
  WeightSpec poly = WeightSpec::curl_streamfunction(3);
  poly.temporal = TemporalFactor::Polynomial;
  poly.q = 1;
  const WeightReport r = verify_weight(poly, 2, 2);
  EXPECT_FALSE(r.time_mean_ok);
  EXPECT_FALSE(r.ok());
}
