#pragma once

#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "relaysim/detection.hpp"
#include "relaysim/types.hpp"

namespace relaysim {

// Per-slot max-min distance metrics of every link.
struct LinkMetrics {
  RealVector d_min_sr;  // N entries
  RealVector d_min_rd;  // N entries
  Scalar d_min_sd = 0;
};

// Buffer and source status filtering the candidate links.
struct AvailabilityMask {
  std::vector<bool> sr_ok;  // relay buffer has >= M free slots
  std::vector<bool> rd_ok;  // relay buffer holds >= M packets
  bool source_has_data = true;
};

enum class LinkDirection { reception, transmission };

struct RelayChoice {
  int relay = -1;
  LinkDirection direction = LinkDirection::reception;
  Scalar metric = 0;
};

// Smallest squared distance between the images of two distinct BPSK candidate
// vectors through the scaled link: min over all C(2^M, 2) unordered pairs
// (x_l, x_n) of ||scale*H*x_l - scale*H*x_n||^2.
template <typename Derived>
Scalar pair_min_distance(const Eigen::MatrixBase<Derived>& h, Scalar scale) {
  if (h.rows() != h.cols())
    throw DimensionError("pair_min_distance: channel matrix must be square");
  const int m = static_cast<int>(h.rows());
  check_enumeration_guard(m);
  const ChannelMatrix hc = h.template cast<Complex>();
  const Eigen::MatrixXcd images =
      Complex(scale) * (hc * candidate_matrix(m).cast<Complex>());
  const int count = static_cast<int>(images.cols());
  Scalar best = std::numeric_limits<Scalar>::infinity();
  for (int l = 0; l < count - 1; ++l)
    for (int n = l + 1; n < count; ++n) {
      const Scalar d = (images.col(l) - images.col(n)).squaredNorm();
      if (d < best) best = d;
    }
  return best;
}

inline Scalar pair_min_distance(const ScaledLink& link) {
  return pair_min_distance(link.h, link.scale);
}

// Metrics for every link of one slot: SR at sqrt(Es/M), RD at sqrt(Erj/M),
// SD at sqrt(2*Es/M).
LinkMetrics compute_link_metrics(const ChannelSet& channels, const SimConfig& cfg);

// Best usable relay link: argmax over unmasked SR metrics (needs source data)
// and unmasked RD metrics. Ties go to SR before RD, then the lowest relay
// index. Empty candidate set yields nullopt.
std::optional<RelayChoice> select_max_link(const LinkMetrics& metrics,
                                           const AvailabilityMask& mask);

// Applies the mode switch. Direct when the relay choice is empty (source
// permitting) or when d_min_sd >= the winning relay metric; max-link never
// switches to direct while a relay link is usable; the direct protocol always
// transmits directly. nullopt signals that nothing can act (source exhausted,
// all buffers empty): the simulation is finished.
std::optional<SlotDecision> choose_mode(const LinkMetrics& metrics,
                                        const std::optional<RelayChoice>& relay_choice,
                                        Protocol protocol, bool source_has_data,
                                        FallbackPolicy fallback);

}  // namespace relaysim
