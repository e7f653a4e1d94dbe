#pragma once

// Internal helpers for the pseudospectral solvers: owning FFTW plans and a
// fourth-order exponential time differencing stepper for diagonal linear parts.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace weakpde::spectral {

using cplx = std::complex<double>;

/// Real <-> half-complex transform over a row-major grid (1D or 2D). Forward is
/// unnormalized, inverse divides by the point count.
class RealFFT {
 public:
  explicit RealFFT(std::vector<int> dims);
  ~RealFFT();
  RealFFT(const RealFFT&) = delete;
  RealFFT& operator=(const RealFFT&) = delete;

  std::size_t real_size() const noexcept { return real_size_; }
  std::size_t complex_size() const noexcept { return complex_size_; }

  void forward(std::span<const double> in, std::span<cplx> out);
  void inverse(std::span<const cplx> in, std::span<double> out);

 private:
  std::size_t real_size_ = 0, complex_size_ = 0;
  double* real_ = nullptr;
  fftw_complex* spec_ = nullptr;
  fftw_plan fwd_ = nullptr, inv_ = nullptr;
};

/// Complex 2D transform, same normalization convention as RealFFT.
class ComplexFFT {
 public:
  explicit ComplexFFT(std::vector<int> dims);
  ~ComplexFFT();
  ComplexFFT(const ComplexFFT&) = delete;
  ComplexFFT& operator=(const ComplexFFT&) = delete;

  std::size_t size() const noexcept { return size_; }
  void forward(std::span<const cplx> in, std::span<cplx> out);
  void inverse(std::span<const cplx> in, std::span<cplx> out);

 private:
  std::size_t size_ = 0;
  fftw_complex* buf_ = nullptr;
  fftw_plan fwd_ = nullptr, inv_ = nullptr;
};

/// ETDRK4 for v' = L v + N(v) with real diagonal L. The phi-function
/// coefficients are evaluated by the contour-integral mean over 32 points.
class Etdrk4 {
 public:
  Etdrk4(std::span<const double> linear, double h);

  template <class Nonlinear>
  void step(std::vector<cplx>& v, Nonlinear&& nonlinear) {
    const std::size_t n = v.size();
    nonlinear(v, nv_);
    for (std::size_t i = 0; i < n; ++i) a_[i] = e2_[i] * v[i] + q_[i] * nv_[i];
    nonlinear(a_, na_);
    for (std::size_t i = 0; i < n; ++i) b_[i] = e2_[i] * v[i] + q_[i] * na_[i];
    nonlinear(b_, nb_);
    for (std::size_t i = 0; i < n; ++i) c_[i] = e2_[i] * a_[i] + q_[i] * (2.0 * nb_[i] - nv_[i]);
    nonlinear(c_, nc_);
    for (std::size_t i = 0; i < n; ++i)
      v[i] = e_[i] * v[i] + nv_[i] * f1_[i] + 2.0 * (na_[i] + nb_[i]) * f2_[i] + nc_[i] * f3_[i];
  }

 private:
  std::vector<double> e_, e2_, q_, f1_, f2_, f3_;
  std::vector<cplx> nv_, a_, na_, b_, nb_, c_, nc_;
};

/// Signed integer wavenumber index for position i of an n-point transform.
inline long signed_index(std::size_t i, std::size_t n) {
  return i <= n / 2 ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(n);
}

/// 2/3-rule mask: keep |index| <= n/3.
inline bool keep_mode(long index, std::size_t n) {
  return 3 * std::abs(index) <= static_cast<long>(n);
}

}  // namespace weakpde::spectral
