#pragma once

// Orthonormal DCT-II and its inverse (orthonormal DCT-III).
//
//   S_0 = 1/sqrt(J) * sum_j s_j
//   S_l = sqrt(2/J) * sum_j s_j cos(pi l (2j+1) / 2J),   l = 1..J-1
//
// Two routes are provided: a direct O(J^2) evaluation and an O(J log J)
// path (Makhoul reordering + complex FFT, Bluestein for lengths that are not
// powers of two). Both are templated on the scalar type.

#include "evoesn/common.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace evoesn {

namespace detail {

inline bool is_power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

inline Index next_power_of_two(Index n) {
  Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// In-place iterative radix-2 FFT over a power-of-two length. `twiddles`
/// holds exp(-2 pi i k / n) for k < n/2. `inverse` conjugates the twiddles
/// and does not scale.
template <typename Scalar>
void radix2_fft(std::vector<std::complex<Scalar>>& a,
                const std::vector<std::complex<Scalar>>& twiddles, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        std::complex<Scalar> w = twiddles[k * stride];
        if (inverse) w = std::conj(w);
        const std::complex<Scalar> t = w * a[i + k + half];
        a[i + k + half] = a[i + k] - t;
        a[i + k] += t;
      }
    }
  }
}

/// Complex DFT of arbitrary length with precomputed tables.
template <typename Scalar>
class FftPlan {
 public:
  using Complex = std::complex<Scalar>;

  explicit FftPlan(Index n) : n_(n) {
    const Scalar pi = std::numbers::pi_v<Scalar>;
    if (is_power_of_two(n_)) {
      m_ = n_;
    } else {
      m_ = next_power_of_two(2 * n_ - 1);
      // chirp w_k = exp(-i pi k^2 / n); k^2 reduced mod 2n keeps the angle small
      chirp_.resize(n_);
      const auto two_n = static_cast<unsigned long long>(2 * n_);
      for (Index k = 0; k < n_; ++k) {
        const auto kk = static_cast<unsigned long long>(k);
        const unsigned long long r = (kk * kk) % two_n;
        const Scalar angle = -pi * static_cast<Scalar>(r) / static_cast<Scalar>(n_);
        chirp_[k] = Complex(std::cos(angle), std::sin(angle));
      }
      // spectrum of the conjugate-chirp convolution kernel
      kernel_.assign(m_, Complex(0));
      kernel_[0] = std::conj(chirp_[0]);
      for (Index k = 1; k < n_; ++k) {
        kernel_[k] = std::conj(chirp_[k]);
        kernel_[m_ - k] = std::conj(chirp_[k]);
      }
    }
    twiddles_.resize(m_ / 2);
    for (Index k = 0; k < m_ / 2; ++k) {
      const Scalar angle = -2 * pi * static_cast<Scalar>(k) / static_cast<Scalar>(m_);
      twiddles_[k] = Complex(std::cos(angle), std::sin(angle));
    }
    if (!chirp_.empty()) radix2_fft(kernel_, twiddles_, false);
  }

  Index size() const { return n_; }

  /// Forward (sign -1) transform, unscaled.
  void forward(std::vector<Complex>& data) const { transform(data, false); }

  /// Inverse transform scaled by 1/n.
  void inverse(std::vector<Complex>& data) const {
    transform(data, true);
    const Scalar scale = Scalar(1) / static_cast<Scalar>(n_);
    for (auto& v : data) v *= scale;
  }

 private:
  void transform(std::vector<Complex>& data, bool inverse) const {
    if (chirp_.empty()) {
      radix2_fft(data, twiddles_, inverse);
      return;
    }
    // Bluestein: X_k = w_k * sum_j (x_j w_j) conj(w_{k-j}). The inverse is
    // the forward transform of the conjugate, conjugated.
    std::vector<Complex> a(m_, Complex(0));
    for (Index k = 0; k < n_; ++k) {
      const Complex x = inverse ? std::conj(data[k]) : data[k];
      a[k] = x * chirp_[k];
    }
    radix2_fft(a, twiddles_, false);
    for (Index k = 0; k < m_; ++k) a[k] *= kernel_[k];
    radix2_fft(a, twiddles_, true);
    const Scalar scale = Scalar(1) / static_cast<Scalar>(m_);
    for (Index k = 0; k < n_; ++k) {
      const Complex y = a[k] * scale * chirp_[k];
      data[k] = inverse ? std::conj(y) : y;
    }
  }

  Index n_;
  Index m_ = 0;
  std::vector<Complex> chirp_;
  std::vector<Complex> kernel_;
  std::vector<Complex> twiddles_;
};

/// cos(pi * l * (2j+1) / (2J)) with the integer argument reduced mod 4J.
template <typename Scalar>
Scalar dct_cosine(Index l, Index j, Index length) {
  const auto four_j = static_cast<unsigned long long>(4 * length);
  const unsigned long long r =
      (static_cast<unsigned long long>(l) * static_cast<unsigned long long>(2 * j + 1)) % four_j;
  return std::cos(std::numbers::pi_v<Scalar> * static_cast<Scalar>(r) /
                  static_cast<Scalar>(2 * length));
}

inline Index require_nonempty(Index n, const char* what) {
  if (n < 1) throw DomainError(std::string(what) + ": input must have at least one element");
  return n;
}

}  // namespace detail

/// Precomputed tables for repeated transforms of one length. Reuse a plan
/// when transforming many vectors of the same size (e.g. decoding a whole
/// GA population against one layout).
template <typename Scalar>
class DctPlan {
 public:
  using Complex = std::complex<Scalar>;

  explicit DctPlan(Index length) : length_(length), fft_(detail::require_nonempty(length, "DctPlan")) {
    const Scalar pi = std::numbers::pi_v<Scalar>;
    shift_.resize(length_);
    for (Index l = 0; l < length_; ++l) {
      const Scalar angle = -pi * static_cast<Scalar>(l) / static_cast<Scalar>(2 * length_);
      shift_[l] = Complex(std::cos(angle), std::sin(angle));
    }
    dc_scale_ = Scalar(1) / std::sqrt(static_cast<Scalar>(length_));
    ac_scale_ = std::sqrt(Scalar(2) / static_cast<Scalar>(length_));
  }

  Index size() const { return length_; }

  template <typename Derived>
  Vector<Scalar> forward(const Eigen::MatrixBase<Derived>& s) const {
    check_size(s.size());
    const Index n = length_;
    std::vector<Complex> v(n);
    // Makhoul reordering: even samples ascending, odd samples descending.
    for (Index k = 0; 2 * k < n; ++k) v[k] = Complex(s(2 * k), 0);
    for (Index k = 0; 2 * k + 1 < n; ++k) v[n - 1 - k] = Complex(s(2 * k + 1), 0);
    fft_.forward(v);
    Vector<Scalar> out(n);
    for (Index l = 0; l < n; ++l) {
      out(l) = (shift_[l] * v[l]).real() * (l == 0 ? dc_scale_ : ac_scale_);
    }
    return out;
  }

  template <typename Derived>
  Vector<Scalar> inverse(const Eigen::MatrixBase<Derived>& coeffs) const {
    check_size(coeffs.size());
    const Index n = length_;
    // Undo the normalization to get the plain DCT-II sums X_l, then rebuild
    // V_l = conj(shift_l) * (X_l - i X_{n-l}).
    auto raw = [&](Index l) -> Scalar {
      if (l == 0) return coeffs(0) / dc_scale_;
      if (l >= n) return Scalar(0);
      return coeffs(l) / ac_scale_;
    };
    std::vector<Complex> v(n);
    v[0] = Complex(raw(0), 0);
    for (Index l = 1; l < n; ++l) {
      v[l] = std::conj(shift_[l]) * Complex(raw(l), -raw(n - l));
    }
    fft_.inverse(v);
    Vector<Scalar> out(n);
    for (Index k = 0; 2 * k < n; ++k) out(2 * k) = v[k].real();
    for (Index k = 0; 2 * k + 1 < n; ++k) out(2 * k + 1) = v[n - 1 - k].real();
    return out;
  }

 private:
  void check_size(Index n) const {
    if (n != length_) {
      throw DomainError("DctPlan: expected length " + std::to_string(length_) + ", got " +
                        std::to_string(n));
    }
  }

  Index length_;
  detail::FftPlan<Scalar> fft_;
  std::vector<Complex> shift_;
  Scalar dc_scale_;
  Scalar ac_scale_;
};

/// Fast orthonormal DCT-II.
template <typename Derived>
Vector<typename Derived::Scalar> dct(const Eigen::MatrixBase<Derived>& s) {
  using Scalar = typename Derived::Scalar;
  detail::require_nonempty(s.size(), "dct");
  return DctPlan<Scalar>(s.size()).forward(s);
}

/// Fast orthonormal inverse (DCT-III).
template <typename Derived>
Vector<typename Derived::Scalar> idct(const Eigen::MatrixBase<Derived>& coeffs) {
  using Scalar = typename Derived::Scalar;
  detail::require_nonempty(coeffs.size(), "idct");
  return DctPlan<Scalar>(coeffs.size()).inverse(coeffs);
}

/// Single DCT-II coefficient by direct summation, O(J).
template <typename Derived>
typename Derived::Scalar dct_direct_coefficient(const Eigen::MatrixBase<Derived>& s, Index l) {
  using Scalar = typename Derived::Scalar;
  const Index n = s.size();
  detail::require_nonempty(n, "dct_direct_coefficient");
  if (l < 0 || l >= n) throw DomainError("dct_direct_coefficient: index out of range");
  Scalar sum(0);
  for (Index j = 0; j < n; ++j) sum += s(j) * detail::dct_cosine<Scalar>(l, j, n);
  const Scalar scale = l == 0 ? Scalar(1) / std::sqrt(static_cast<Scalar>(n))
                              : std::sqrt(Scalar(2) / static_cast<Scalar>(n));
  return scale * sum;
}

/// Direct O(J^2) DCT-II.
template <typename Derived>
Vector<typename Derived::Scalar> dct_direct(const Eigen::MatrixBase<Derived>& s) {
  using Scalar = typename Derived::Scalar;
  detail::require_nonempty(s.size(), "dct_direct");
  Vector<Scalar> out(s.size());
  for (Index l = 0; l < s.size(); ++l) out(l) = dct_direct_coefficient(s, l);
  return out;
}

/// Direct O(J^2) DCT-III (inverse of dct_direct).
template <typename Derived>
Vector<typename Derived::Scalar> idct_direct(const Eigen::MatrixBase<Derived>& coeffs) {
  using Scalar = typename Derived::Scalar;
  const Index n = coeffs.size();
  detail::require_nonempty(n, "idct_direct");
  const Scalar dc = Scalar(1) / std::sqrt(static_cast<Scalar>(n));
  const Scalar ac = std::sqrt(Scalar(2) / static_cast<Scalar>(n));
  Vector<Scalar> out(n);
  for (Index l = 0; l < n; ++l) {
    Scalar sum = coeffs(0) * dc;
    for (Index j = 1; j < n; ++j) sum += ac * coeffs(j) * detail::dct_cosine<Scalar>(j, l, n);
    out(l) = sum;
  }
  return out;
}

}  // namespace evoesn
