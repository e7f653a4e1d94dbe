#include "spectral.hpp"

#include <algorithm>
#include <cstring>
#include <numbers>
#include <numeric>

namespace weakpde::spectral {

RealFFT::RealFFT(std::vector<int> dims) {
  real_size_ = std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                               [](std::size_t a, int b) { return a * static_cast<std::size_t>(b); });
  complex_size_ = real_size_ / static_cast<std::size_t>(dims.back()) * static_cast<std::size_t>(dims.back() / 2 + 1);
  real_ = fftw_alloc_real(real_size_);
  spec_ = fftw_alloc_complex(complex_size_);
  const int rank = static_cast<int>(dims.size());
  fwd_ = fftw_plan_dft_r2c(rank, dims.data(), real_, spec_, FFTW_ESTIMATE);
  inv_ = fftw_plan_dft_c2r(rank, dims.data(), spec_, real_, FFTW_ESTIMATE);
}

RealFFT::~RealFFT() {
  fftw_destroy_plan(fwd_);
  fftw_destroy_plan(inv_);
  fftw_free(real_);
  fftw_free(spec_);
}

void RealFFT::forward(std::span<const double> in, std::span<cplx> out) {
  std::copy(in.begin(), in.end(), real_);
  fftw_execute(fwd_);
  std::memcpy(static_cast<void*>(out.data()), spec_, complex_size_ * sizeof(cplx));
}

void RealFFT::inverse(std::span<const cplx> in, std::span<double> out) {
  std::memcpy(spec_, in.data(), complex_size_ * sizeof(cplx));
  fftw_execute(inv_);
  const double scale = 1.0 / static_cast<double>(real_size_);
  for (std::size_t i = 0; i < real_size_; ++i) out[i] = real_[i] * scale;
}

ComplexFFT::ComplexFFT(std::vector<int> dims) {
  size_ = std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                          [](std::size_t a, int b) { return a * static_cast<std::size_t>(b); });
  buf_ = fftw_alloc_complex(size_);
  const int rank = static_cast<int>(dims.size());
  fwd_ = fftw_plan_dft(rank, dims.data(), buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
  inv_ = fftw_plan_dft(rank, dims.data(), buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
}

ComplexFFT::~ComplexFFT() {
  fftw_destroy_plan(fwd_);
  fftw_destroy_plan(inv_);
  fftw_free(buf_);
}

void ComplexFFT::forward(std::span<const cplx> in, std::span<cplx> out) {
  std::memcpy(buf_, in.data(), size_ * sizeof(cplx));
  fftw_execute(fwd_);
  std::memcpy(static_cast<void*>(out.data()), buf_, size_ * sizeof(cplx));
}

void ComplexFFT::inverse(std::span<const cplx> in, std::span<cplx> out) {
  std::memcpy(buf_, in.data(), size_ * sizeof(cplx));
  fftw_execute(inv_);
  const double scale = 1.0 / static_cast<double>(size_);
  auto* b = reinterpret_cast<cplx*>(buf_);
  for (std::size_t i = 0; i < size_; ++i) out[i] = b[i] * scale;
}

Etdrk4::Etdrk4(std::span<const double> linear, double h) {
  constexpr int kContour = 32;
  const std::size_t n = linear.size();
  e_.resize(n);
  e2_.resize(n);
  q_.resize(n);
  f1_.resize(n);
  f2_.resize(n);
  f3_.resize(n);
  for (auto* w : {&nv_, &a_, &na_, &b_, &nb_, &c_, &nc_}) w->assign(n, cplx{});
  for (std::size_t i = 0; i < n; ++i) {
    const double hl = h * linear[i];
    e_[i] = std::exp(hl);
    e2_[i] = std::exp(0.5 * hl);
    cplx sq{}, s1{}, s2{}, s3{};
    // Upper half of the unit circle around hL; real L makes the mean real.
    for (int j = 1; j <= kContour; ++j) {
      const cplx r = hl + std::exp(cplx(0.0, std::numbers::pi * (j - 0.5) / kContour));
      const cplx er = std::exp(r);
      const cplx r3 = r * r * r;
      sq += (std::exp(0.5 * r) - 1.0) / r;
      s1 += (-4.0 - r + er * (4.0 - 3.0 * r + r * r)) / r3;
      s2 += (2.0 + r + er * (-2.0 + r)) / r3;
      s3 += (-4.0 - 3.0 * r - r * r + er * (4.0 - r)) / r3;
    }
    q_[i] = h * (sq / static_cast<double>(kContour)).real();
    f1_[i] = h * (s1 / static_cast<double>(kContour)).real();
    f2_[i] = h * (s2 / static_cast<double>(kContour)).real();
    f3_[i] = h * (s3 / static_cast<double>(kContour)).real();
  }
}

}  // namespace weakpde::spectral
