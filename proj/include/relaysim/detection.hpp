#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "relaysim/types.hpp"

namespace relaysim {

// BPSK map, bit 0 -> -1 and bit 1 -> +1.
inline SymbolVector modulate(const BitVector& bits) {
  SymbolVector x(static_cast<Eigen::Index>(bits.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (bits[i] > 1)
      throw DimensionError("modulate: bit value " + std::to_string(bits[i]) +
                           " outside {0,1}");
    x(i) = bits[i] ? 1.0 : -1.0;
  }
  return x;
}

// Inverse of modulate; rejects anything outside the BPSK alphabet.
inline BitVector demap(const SymbolVector& symbols) {
  BitVector bits(static_cast<std::size_t>(symbols.size()));
  for (Eigen::Index i = 0; i < symbols.size(); ++i) {
    if (symbols(i) != 1.0 && symbols(i) != -1.0)
      throw DimensionError("demap: entry " + std::to_string(symbols(i)) +
                           " outside the BPSK alphabet");
    bits[static_cast<std::size_t>(i)] = symbols(i) > 0 ? 1 : 0;
  }
  return bits;
}

inline void check_enumeration_guard(int num_antennas) {
  if (num_antennas < 1)
    throw DimensionError("antenna count must be >= 1");
  if (num_antennas > kMaxAntennas)
    throw ConfigError(ConfigError::Code::antenna_guard_exceeded,
                      "antenna count " + std::to_string(num_antennas) +
                          " exceeds the 2^M enumeration guard (max " +
                          std::to_string(kMaxAntennas) + ")");
}

// All 2^M BPSK vectors as columns in lexicographic bit order: column b holds
// the bits of b with entry 0 the most significant bit.
inline Eigen::MatrixXd candidate_matrix(int num_antennas) {
  check_enumeration_guard(num_antennas);
  const int count = 1 << num_antennas;
  Eigen::MatrixXd c(num_antennas, count);
  for (int b = 0; b < count; ++b)
    for (int j = 0; j < num_antennas; ++j)
      c(j, b) = ((b >> (num_antennas - 1 - j)) & 1) ? 1.0 : -1.0;
  return c;
}

inline std::vector<SymbolVector> enumerate_candidates(int num_antennas) {
  const Eigen::MatrixXd c = candidate_matrix(num_antennas);
  std::vector<SymbolVector> out(static_cast<std::size_t>(c.cols()));
  for (Eigen::Index b = 0; b < c.cols(); ++b) out[static_cast<std::size_t>(b)] = c.col(b);
  return out;
}

// Candidate index whose bit pattern equals `bits` (entry 0 most significant).
inline int candidate_index(const BitVector& bits) {
  int b = 0;
  for (std::uint8_t bit : bits) b = (b << 1) | (bit & 1);
  return b;
}

// A link together with its amplitude factor sqrt(E/M).
struct ScaledLink {
  ChannelMatrix h;
  Scalar scale = 1.0;
};

// Exhaustive ML receiver for one scaled link. Precomputes the 2^M candidate
// images scale*H*x so detecting the L symbols of a packet reuses them.
class MlDetector {
 public:
  template <typename Derived>
  MlDetector(const Eigen::MatrixBase<Derived>& h, Scalar scale) {
    if (h.rows() != h.cols())
      throw DimensionError("channel matrix must be square, got " +
                           std::to_string(h.rows()) + "x" + std::to_string(h.cols()));
    const int m = static_cast<int>(h.rows());
    check_enumeration_guard(m);
    const ChannelMatrix hc = h.template cast<Complex>();
    images_ = Complex(scale) * (hc * candidate_matrix(m).cast<Complex>());
    candidates_ = candidate_matrix(m);
  }

  explicit MlDetector(const ScaledLink& link) : MlDetector(link.h, link.scale) {}

  int dimension() const { return static_cast<int>(images_.rows()); }
  int num_candidates() const { return static_cast<int>(images_.cols()); }

  // Noise-free received vector for candidate b.
  ComplexVector image(int b) const { return images_.col(b); }

  // argmin over candidates of ||y - scale*H*x'||^2, ties to the lowest index.
  int detect_index(const ComplexVector& y) const {
    if (y.size() != images_.rows())
      throw DimensionError("ml_detect: received vector length " +
                           std::to_string(y.size()) + " does not match " +
                           std::to_string(images_.rows()) + " antennas");
    int best = 0;
    Scalar best_dist = (y - images_.col(0)).squaredNorm();
    for (int b = 1; b < num_candidates(); ++b) {
      const Scalar d = (y - images_.col(b)).squaredNorm();
      if (d < best_dist) {
        best_dist = d;
        best = b;
      }
    }
    return best;
  }

  SymbolVector detect(const ComplexVector& y) const {
    return candidates_.col(detect_index(y));
  }

 private:
  Eigen::MatrixXd candidates_;  // M x 2^M
  Eigen::MatrixXcd images_;     // M x 2^M
};

// One-shot exhaustive ML detection.
template <typename Derived>
SymbolVector ml_detect(const ComplexVector& y, const Eigen::MatrixBase<Derived>& h,
                       Scalar scale) {
  return MlDetector(h, scale).detect(y);
}

inline SymbolVector ml_detect(const ComplexVector& y, const ScaledLink& link) {
  return ml_detect(y, link.h, link.scale);
}

}  // namespace relaysim
