#include "relaysim/selection.hpp"

#include <cmath>

namespace relaysim {

LinkMetrics compute_link_metrics(const ChannelSet& channels, const SimConfig& cfg) {
  if (channels.h_sr.size() != channels.h_rd.size())
    throw DimensionError("compute_link_metrics: " + std::to_string(channels.h_sr.size()) +
                         " SR links vs " + std::to_string(channels.h_rd.size()) + " RD links");
  const auto n = static_cast<Eigen::Index>(channels.h_sr.size());
  const Scalar m = static_cast<Scalar>(cfg.num_antennas);
  const Scalar sr_scale = std::sqrt(cfg.symbol_energy / m);
  const Scalar rd_scale = std::sqrt(cfg.relay_energy / m);
  const Scalar sd_scale = std::sqrt(2.0 * cfg.symbol_energy / m);

  LinkMetrics out;
  out.d_min_sr.resize(n);
  out.d_min_rd.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out.d_min_sr(j) = pair_min_distance(channels.h_sr[static_cast<std::size_t>(j)], sr_scale);
    out.d_min_rd(j) = pair_min_distance(channels.h_rd[static_cast<std::size_t>(j)], rd_scale);
  }
  out.d_min_sd = pair_min_distance(channels.h_sd, sd_scale);
  return out;
}

std::optional<RelayChoice> select_max_link(const LinkMetrics& metrics,
                                           const AvailabilityMask& mask) {
  const auto n = metrics.d_min_sr.size();
  if (metrics.d_min_rd.size() != n ||
      static_cast<Eigen::Index>(mask.sr_ok.size()) != n ||
      static_cast<Eigen::Index>(mask.rd_ok.size()) != n)
    throw DimensionError("select_max_link: metric and mask sizes disagree");

  // Strict > keeps the first maximum: SR block before RD block, lowest relay
  // index within a block.
  std::optional<RelayChoice> best;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!mask.source_has_data || !mask.sr_ok[static_cast<std::size_t>(j)]) continue;
    if (!best || metrics.d_min_sr(j) > best->metric)
      best = RelayChoice{static_cast<int>(j), LinkDirection::reception, metrics.d_min_sr(j)};
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!mask.rd_ok[static_cast<std::size_t>(j)]) continue;
    if (!best || metrics.d_min_rd(j) > best->metric)
      best = RelayChoice{static_cast<int>(j), LinkDirection::transmission, metrics.d_min_rd(j)};
  }
  return best;
}

std::optional<SlotDecision> choose_mode(const LinkMetrics& metrics,
                                        const std::optional<RelayChoice>& relay_choice,
                                        Protocol protocol, bool source_has_data,
                                        FallbackPolicy fallback) {
  SlotDecision d;
  d.d_min_sd = metrics.d_min_sd;
  d.d_max_min = relay_choice ? relay_choice->metric : 0.0;

  if (protocol == Protocol::direct) {
    if (!source_has_data) return std::nullopt;
    d.mode = SlotMode::direct;
    return d;
  }

  const Eigen::Index n = metrics.d_min_sr.size();
  d.per_link_metrics.resize(2 * n);
  d.per_link_metrics.head(n) = metrics.d_min_sr;
  d.per_link_metrics.tail(n) = metrics.d_min_rd;

  // The switch: direct wins ties, and is the only option once no relay link
  // is usable while the source still holds packets.
  if (protocol == Protocol::switched_max_link && source_has_data &&
      (!relay_choice || metrics.d_min_sd >= relay_choice->metric)) {
    d.mode = SlotMode::direct;
    return d;
  }

  if (relay_choice) {
    d.mode = relay_choice->direction == LinkDirection::reception ? SlotMode::relay_rx
                                                                 : SlotMode::relay_tx;
    d.relay = relay_choice->relay;
    return d;
  }

  if (!source_has_data) return std::nullopt;  // buffers empty too: run is over

  // Unreachable under this engine's buffer geometry (occupancy moves in steps
  // of M with capacity >= M, so some link is always usable), but the policy
  // stays honest for callers driving choose_mode directly.
  if (fallback == FallbackPolicy::direct_transmission) {
    d.mode = SlotMode::direct;
    return d;
  }
  d.mode = SlotMode::idle;
  return d;
}

}  // namespace relaysim
