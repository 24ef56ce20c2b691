#pragma once

// Frequency-domain encoding of reservoir weights. A chromosome holds the
// first C coefficients of the orthonormal DCT of the weight vector (layout
// order); decoding zero-pads to M, inverts the DCT and scatters the values
// back onto the layout positions.

#include "evoesn/common.hpp"
#include "evoesn/dct.hpp"
#include "evoesn/reservoir_layout.hpp"

namespace evoesn {

template <typename Scalar>
struct Chromosome {
  Vector<Scalar> coeffs;

  Index size() const { return coeffs.size(); }
  friend bool operator==(const Chromosome& a, const Chromosome& b) {
    return a.coeffs.size() == b.coeffs.size() && a.coeffs == b.coeffs;
  }
};

/// `alpha` followed by M - C zeros.
template <typename Scalar>
Vector<Scalar> pad(const Chromosome<Scalar>& alpha, Index length) {
  if (alpha.size() > length) {
    throw DomainError("pad: chromosome has " + std::to_string(alpha.size()) +
                      " coefficients, more than the target length " + std::to_string(length));
  }
  Vector<Scalar> out = Vector<Scalar>::Zero(length);
  out.head(alpha.size()) = alpha.coeffs;
  return out;
}

/// First C entries of a coefficient vector.
template <typename Derived>
Chromosome<typename Derived::Scalar> truncate(const Eigen::MatrixBase<Derived>& coeffs, Index count) {
  if (count < 1 || count > coeffs.size()) {
    throw DomainError("truncate: coefficient count must lie in [1, " + std::to_string(coeffs.size()) + "]");
  }
  return {coeffs.head(count)};
}

/// Encoder/decoder bound to one layout. Holds a DCT plan of length M so a
/// population can be decoded without rebuilding transform tables.
template <typename Scalar>
class FourierCodec {
 public:
  explicit FourierCodec(ReservoirLayout layout)
      : layout_(std::move(layout)), plan_(detail::require_nonempty(layout_.size(), "FourierCodec")) {}

  const ReservoirLayout& layout() const { return layout_; }
  Index weight_count() const { return layout_.size(); }

  /// Weight vector nu = IDCT(pad(alpha, M)).
  Vector<Scalar> weights(const Chromosome<Scalar>& alpha) const {
    check_dimension(alpha.size());
    return plan_.inverse(pad(alpha, layout_.size()));
  }

  SparseMatrix<Scalar> decode(const Chromosome<Scalar>& alpha) const {
    return reservoir_from_values(layout_, weights(alpha));
  }

  Chromosome<Scalar> encode_weights(const Vector<Scalar>& nu, Index count) const {
    check_dimension(count);
    return truncate(plan_.forward(nu), count);
  }

  Chromosome<Scalar> encode(const SparseMatrix<Scalar>& w, Index count) const {
    check_dimension(count);
    return encode_weights(values_from_reservoir(w, layout_), count);
  }

 private:
  void check_dimension(Index count) const {
    if (count < 1 || count > layout_.size()) {
      throw DomainError("chromosome dimension C=" + std::to_string(count) + " must lie in [1, M=" +
                        std::to_string(layout_.size()) + "]");
    }
  }

  ReservoirLayout layout_;
  DctPlan<Scalar> plan_;
};

template <typename Scalar>
SparseMatrix<Scalar> decode(const Chromosome<Scalar>& alpha, const ReservoirLayout& layout) {
  return FourierCodec<Scalar>(layout).decode(alpha);
}

template <typename Scalar>
Chromosome<Scalar> encode(const SparseMatrix<Scalar>& w, const ReservoirLayout& layout, Index count) {
  return FourierCodec<Scalar>(layout).encode(w, count);
}

}  // namespace evoesn
