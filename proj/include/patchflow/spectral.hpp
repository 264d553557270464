#pragma once

// Fourier tools for closed curves sampled at the uniform parameter grid
// alpha_k = 2 pi k / N.  Points are handled as complex samples z = x + iy.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <mutex>
#include <span>
#include <vector>

#include "patchflow/types.hpp"

namespace patchflow::spectral {

namespace detail {

// The FFTW planner is not reentrant; plan creation and destruction go through
// this lock while execution on distinct arrays is free to run concurrently.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

inline void dft(std::vector<std::complex<double>>& data, int sign) {
  const int n = static_cast<int>(data.size());
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
}

/// Signed wavenumber of FFT bin k for length n.
inline long wavenumber(std::size_t k, std::size_t n) {
  return k <= n / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
}

}  // namespace detail

/// Forward DFT normalised so that z_j = sum_k Z_k exp(i k alpha_j).
inline std::vector<std::complex<double>> fourier_coefficients(std::span<const Point2> points) {
  std::vector<std::complex<double>> c(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) c[i] = to_complex(points[i]);
  detail::dft(c, FFTW_FORWARD);
  const double inv_n = 1.0 / static_cast<double>(points.size());
  for (auto& v : c) v *= inv_n;
  return c;
}

/// d z / d alpha at the sample points.  The Nyquist mode is dropped so the
/// derivative of a real sequence stays real.
inline std::vector<Vec2> derivative(std::span<const Point2> points) {
  const std::size_t n = points.size();
  auto c = fourier_coefficients(points);
  for (std::size_t k = 0; k < n; ++k) {
    const long w = detail::wavenumber(k, n);
    if (n % 2 == 0 && k == n / 2) {
      c[k] = 0.0;
    } else {
      c[k] *= std::complex<double>(0.0, static_cast<double>(w));
    }
  }
  detail::dft(c, FFTW_BACKWARD);
  std::vector<Vec2> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = from_complex(c[i]);
  return out;
}

/// Centered second-order difference quotient on the same parameter grid.
inline std::vector<Vec2> centered_difference(std::span<const Point2> points) {
  const std::size_t n = points.size();
  const double h = 2.0 * pi / static_cast<double>(n);
  std::vector<Vec2> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& next = points[(i + 1) % n];
    const Point2& prev = points[(i + n - 1) % n];
    out[i] = (next - prev) / (2.0 * h);
  }
  return out;
}

/// Trigonometric interpolant of a closed marker curve, evaluable at any
/// parameter value.  Evaluation is O(N).
class TrigInterpolant {
 public:
  explicit TrigInterpolant(std::span<const Point2> points)
      : n_(points.size()), coeff_(fourier_coefficients(points)) {}

  std::size_t size() const { return n_; }
  const std::vector<std::complex<double>>& coefficients() const { return coeff_; }

  Point2 position(double alpha) const { return evaluate(alpha, false); }
  Vec2 derivative(double alpha) const { return evaluate(alpha, true); }

 private:
  Vec2 evaluate(double alpha, bool differentiate) const {
    using cd = std::complex<double>;
    const std::size_t half = n_ / 2;
    const bool even = n_ % 2 == 0;
    const std::size_t kmax = even ? half - 1 : half;
    cd sum = differentiate ? cd(0.0) : coeff_[0];
    const cd step = std::polar(1.0, alpha);
    cd wp = 1.0;
    for (std::size_t k = 1; k <= kmax; ++k) {
      // Refresh the running power periodically to bound drift.
      wp = (k % 64 == 0) ? std::polar(1.0, alpha * static_cast<double>(k)) : wp * step;
      const cd wm = std::conj(wp);
      const cd cp = coeff_[k];
      const cd cm = coeff_[n_ - k];
      if (differentiate) {
        const double kk = static_cast<double>(k);
        sum += cd(0.0, kk) * (cp * wp - cm * wm);
      } else {
        sum += cp * wp + cm * wm;
      }
    }
    if (even) {
      const double kk = static_cast<double>(half);
      const cd cn = coeff_[half];
      sum += differentiate ? cn * (-kk * std::sin(kk * alpha)) : cn * std::cos(kk * alpha);
    }
    return from_complex(sum);
  }

  std::size_t n_;
  std::vector<std::complex<double>> coeff_;
};

/// The interpolant (or its alpha-derivative) at alpha_j + shift for every
/// grid point alpha_j, by one inverse DFT of phase-shifted coefficients.
inline std::vector<Vec2> shifted_samples(const TrigInterpolant& f, double shift,
                                         bool differentiate) {
  const auto& coeff = f.coefficients();
  const std::size_t n = coeff.size();
  std::vector<std::complex<double>> c(n);
  for (std::size_t k = 0; k < n; ++k) {
    const long w = detail::wavenumber(k, n);
    const double kk = static_cast<double>(w);
    if (n % 2 == 0 && k == n / 2) {
      // Real Nyquist term c cos(k alpha): the shift gives (-1)^j times a real factor.
      c[k] = coeff[k] * (differentiate ? -kk * std::sin(kk * shift) : std::cos(kk * shift));
      continue;
    }
    c[k] = coeff[k] * std::polar(1.0, kk * shift);
    if (differentiate) c[k] *= std::complex<double>(0.0, kk);
  }
  detail::dft(c, FFTW_BACKWARD);
  std::vector<Vec2> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = from_complex(c[j]);
  return out;
}

}  // namespace patchflow::spectral
