#pragma once

// Independent reference computations used by the tests. Everything here is
// written from the defining formulas in long double, without the library's
// fast paths.

#include "evoesn/common.hpp"

#include <cmath>
#include <vector>

namespace oracle {

using evoesn::Index;
using LD = long double;
using LMatrix = std::vector<std::vector<LD>>;

inline const LD kPi = 3.141592653589793238462643383279502884L;

/// Orthonormal DCT-II coefficient l of s, summed directly.
inline LD dct2(const std::vector<LD>& s, Index l) {
  const auto n = static_cast<Index>(s.size());
  LD acc = 0;
  for (Index j = 0; j < n; ++j) acc += s[j] * std::cos(kPi * l * (2 * j + 1) / (2.0L * n));
  return (l == 0 ? std::sqrt(1.0L / n) : std::sqrt(2.0L / n)) * acc;
}

inline std::vector<LD> to_ld(const evoesn::Vector<double>& v) { return {v.data(), v.data() + v.size()}; }

/// Solves A X = B by Gaussian elimination with partial pivoting.
inline LMatrix solve(LMatrix a, LMatrix b) {
  const std::size_t n = a.size();
  const std::size_t m = b.front().size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::fabs(a[i][k]) > std::fabs(a[p][k])) p = i;
    std::swap(a[k], a[p]);
    std::swap(b[k], b[p]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const LD f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      for (std::size_t j = 0; j < m; ++j) b[i][j] -= f * b[k][j];
    }
  }
  LMatrix x(n, std::vector<LD>(m, 0));
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t j = 0; j < m; ++j) {
      LD acc = b[ii][j];
      for (std::size_t k = ii + 1; k < n; ++k) acc -= a[ii][k] * x[k][j];
      x[ii][j] = acc / a[ii][ii];
    }
  }
  return x;
}

/// Ridge readout from the normal equations: W^T = (D^T D + lambda I)^-1 D^T Z,
/// with D (T x d) the design rows and Z (T x L) the targets.
inline evoesn::Matrix<double> ridge(const evoesn::Matrix<double>& design, const evoesn::Matrix<double>& targets,
                                    double lambda) {
  const Index t = design.rows(), d = design.cols(), l = targets.cols();
  LMatrix gram(d, std::vector<LD>(d, 0)), rhs(d, std::vector<LD>(l, 0));
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      LD acc = 0;
      for (Index r = 0; r < t; ++r) acc += static_cast<LD>(design(r, i)) * design(r, j);
      gram[i][j] = acc + (i == j ? lambda : 0.0L);
    }
    for (Index j = 0; j < l; ++j) {
      LD acc = 0;
      for (Index r = 0; r < t; ++r) acc += static_cast<LD>(design(r, i)) * targets(r, j);
      rhs[i][j] = acc;
    }
  }
  const LMatrix x = solve(gram, rhs);
  evoesn::Matrix<double> w(l, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < l; ++j) w(j, i) = static_cast<double>(x[i][j]);
  return w;
}

inline evoesn::Matrix<double> random_matrix(Index rows, Index cols, evoesn::Rng& rng, double half = 1.0) {
  std::uniform_real_distribution<double> u(-half, half);
  evoesn::Matrix<double> m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = u(rng);
  return m;
}

inline evoesn::Vector<double> random_vector(Index n, evoesn::Rng& rng, double half = 1.0) {
  return random_matrix(n, 1, rng, half);
}

}  // namespace oracle
