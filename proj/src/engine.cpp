#include "relaysim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "relaysim/detection.hpp"

namespace relaysim {

NetworkState::NetworkState(const SimConfig& cfg, std::vector<Packet> source_packets) {
  validate_config(cfg);
  if (source_packets.size() % static_cast<std::size_t>(cfg.num_antennas) != 0)
    throw ConfigError(ConfigError::Code::packets_not_multiple_of_antennas,
                      "source packet count " + std::to_string(source_packets.size()) +
                          " is not a multiple of num_antennas " +
                          std::to_string(cfg.num_antennas));
  originals = std::move(source_packets);
  for (std::size_t i = 0; i < originals.size(); ++i) {
    if (originals[i].seq_id != i)
      throw SimError("packet seq_ids must be dense 0..P-1, got " +
                     std::to_string(originals[i].seq_id) + " at position " + std::to_string(i));
    if (static_cast<int>(originals[i].bits.size()) != cfg.packet_length)
      throw DimensionError("packet " + std::to_string(i) + " holds " +
                           std::to_string(originals[i].bits.size()) + " bits, expected " +
                           std::to_string(cfg.packet_length));
  }
  source_queue.assign(originals.begin(), originals.end());
  buffers.reserve(static_cast<std::size_t>(cfg.num_relays));
  for (int j = 0; j < cfg.num_relays; ++j) buffers.emplace_back(cfg.buffer_capacity);
  delivered_bits.resize(originals.size());
  source_tx_slot.assign(originals.size(), -1);
  delivery_slot.assign(originals.size(), -1);
}

std::uint64_t NetworkState::buffered_count() const {
  std::uint64_t n = 0;
  for (const auto& b : buffers) n += static_cast<std::uint64_t>(b.size());
  return n;
}

void NetworkState::check_conservation() const {
  const std::uint64_t held = source_queue.size() + buffered_count() + delivered_count;
  if (held != total_packets())
    throw SimError("packet conservation violated: " + std::to_string(source_queue.size()) +
                   " at source + " + std::to_string(buffered_count()) + " buffered + " +
                   std::to_string(delivered_count) + " delivered != " +
                   std::to_string(total_packets()));
}

namespace {

// One hop of M packets through one scaled link. Per symbol period t the t-th
// bits of the packets form the transmit vector (packet p on antenna p); the
// receiver sees scale*H*x + CN(0, N0) and ML-detects with the same scale.
std::vector<Packet> transmit_block(const std::vector<Packet>& pkts, const ChannelMatrix& h,
                                   Scalar scale, const SimConfig& cfg, RngStream& rng) {
  const int m = cfg.num_antennas;
  if (static_cast<int>(pkts.size()) != m)
    throw DimensionError("transmit: " + std::to_string(pkts.size()) + " packets for " +
                         std::to_string(m) + " antennas");
  if (h.rows() != m || h.cols() != m)
    throw DimensionError("transmit: channel is " + std::to_string(h.rows()) + "x" +
                         std::to_string(h.cols()) + ", expected " + std::to_string(m) +
                         "x" + std::to_string(m));
  for (const auto& p : pkts)
    if (static_cast<int>(p.bits.size()) != cfg.packet_length)
      throw DimensionError("transmit: packet " + std::to_string(p.seq_id) + " holds " +
                           std::to_string(p.bits.size()) + " bits, expected " +
                           std::to_string(cfg.packet_length));

  const MlDetector detector(h, scale);
  const NoiseModel noise{cfg.noise_power};
  std::vector<Packet> out(pkts.size());
  for (std::size_t p = 0; p < pkts.size(); ++p) {
    out[p].seq_id = pkts[p].seq_id;
    out[p].bits.resize(static_cast<std::size_t>(cfg.packet_length));
  }
  BitVector column(static_cast<std::size_t>(m));
  for (int t = 0; t < cfg.packet_length; ++t) {
    for (int a = 0; a < m; ++a) column[static_cast<std::size_t>(a)] = pkts[static_cast<std::size_t>(a)].bits[static_cast<std::size_t>(t)];
    const ComplexVector y = add_noise(detector.image(candidate_index(column)), noise, rng);
    const int hat = detector.detect_index(y);
    for (int a = 0; a < m; ++a)
      out[static_cast<std::size_t>(a)].bits[static_cast<std::size_t>(t)] =
          static_cast<std::uint8_t>((hat >> (m - 1 - a)) & 1);
  }
  return out;
}

std::vector<Packet> take_from_source(NetworkState& state, const SimConfig& cfg,
                                     SlotOutcome& outcome) {
  if (static_cast<int>(state.source_queue.size()) < cfg.num_antennas)
    throw SimError("source holds " + std::to_string(state.source_queue.size()) +
                   " packets, cannot fill " + std::to_string(cfg.num_antennas) + " antennas");
  std::vector<Packet> pkts;
  pkts.reserve(static_cast<std::size_t>(cfg.num_antennas));
  for (int i = 0; i < cfg.num_antennas; ++i) {
    Packet p = std::move(state.source_queue.front());
    state.source_queue.pop_front();
    state.source_tx_slot[p.seq_id] = static_cast<std::int64_t>(state.slot_count);
    outcome.moved_seq_ids.push_back(p.seq_id);
    pkts.push_back(std::move(p));
  }
  return pkts;
}

void deliver(NetworkState& state, std::vector<Packet> decoded, SlotOutcome& outcome) {
  for (auto& p : decoded) {
    const std::uint64_t seq = p.seq_id;
    if (seq >= state.total_packets() || state.delivery_slot[seq] != -1)
      throw SimError("duplicate or unknown delivery of packet " + std::to_string(seq));
    const BitVector& truth = state.originals[seq].bits;
    std::uint64_t errs = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) errs += truth[i] != p.bits[i];
    state.bit_errors += errs;
    state.sum_sq_packet_errors += errs * errs;
    state.delivered_bits[seq] = std::move(p.bits);
    state.delivery_slot[seq] = static_cast<std::int64_t>(state.slot_count);
    ++state.delivered_count;
    outcome.bit_errors_added += errs;
  }
}

}  // namespace

std::vector<Packet> transmit_direct(const std::vector<Packet>& pkts, const ChannelMatrix& h_sd,
                                    const SimConfig& cfg, RngStream& rng) {
  return transmit_block(pkts, h_sd, std::sqrt(2.0 * cfg.symbol_energy / cfg.num_antennas), cfg,
                        rng);
}

std::vector<Packet> transmit_source_to_relay(const std::vector<Packet>& pkts,
                                             const ChannelMatrix& h_sr, const SimConfig& cfg,
                                             RngStream& rng) {
  return transmit_block(pkts, h_sr, std::sqrt(cfg.symbol_energy / cfg.num_antennas), cfg, rng);
}

std::vector<Packet> transmit_relay_to_destination(RelayBuffer& buffer, const ChannelMatrix& h_rd,
                                                  const SimConfig& cfg, RngStream& rng) {
  return transmit_block(buffer.pop(cfg.num_antennas), h_rd,
                        std::sqrt(cfg.relay_energy / cfg.num_antennas), cfg, rng);
}

SlotOutcome run_slot(NetworkState& state, const SimConfig& cfg, RngStream& rng) {
  // Direct runs involve no relay links, so none are drawn; relay protocols
  // draw all 2N+1 matrices every slot regardless of buffer state, keeping the
  // stream advance independent of the trajectory taken.
  const int relays_drawn = cfg.protocol == Protocol::direct ? 0 : cfg.num_relays;
  const ChannelSet channels =
      draw_channel_set(rng, cfg.num_antennas, relays_drawn, state.slot_count);
  const LinkMetrics metrics = compute_link_metrics(channels, cfg);

  AvailabilityMask mask;
  mask.source_has_data = static_cast<int>(state.source_queue.size()) >= cfg.num_antennas;
  mask.sr_ok.resize(static_cast<std::size_t>(relays_drawn));
  mask.rd_ok.resize(static_cast<std::size_t>(relays_drawn));
  for (int j = 0; j < relays_drawn; ++j) {
    mask.sr_ok[static_cast<std::size_t>(j)] = state.buffers[static_cast<std::size_t>(j)].free_slots() >= cfg.num_antennas;
    mask.rd_ok[static_cast<std::size_t>(j)] = state.buffers[static_cast<std::size_t>(j)].size() >= cfg.num_antennas;
  }

  const auto choice = select_max_link(metrics, mask);
  const auto decision =
      choose_mode(metrics, choice, cfg.protocol, mask.source_has_data, cfg.fallback);
  if (!decision) throw SimError("run_slot called with nothing left to move");

  SlotOutcome outcome;
  outcome.decision = *decision;
  switch (decision->mode) {
    case SlotMode::direct:
      deliver(state, transmit_direct(take_from_source(state, cfg, outcome), channels.h_sd, cfg, rng),
              outcome);
      ++state.counts.direct;
      break;
    case SlotMode::relay_rx: {
      const auto j = static_cast<std::size_t>(decision->relay);
      state.buffers[j].push(
          transmit_source_to_relay(take_from_source(state, cfg, outcome), channels.h_sr[j], cfg, rng));
      ++state.counts.relay_rx;
      break;
    }
    case SlotMode::relay_tx: {
      const auto j = static_cast<std::size_t>(decision->relay);
      std::vector<Packet> sent =
          transmit_relay_to_destination(state.buffers[j], channels.h_rd[j], cfg, rng);
      for (const auto& p : sent) outcome.moved_seq_ids.push_back(p.seq_id);
      deliver(state, std::move(sent), outcome);
      ++state.counts.relay_tx;
      break;
    }
    case SlotMode::idle:
      ++state.counts.idle;
      break;
  }

  ++state.slot_count;
  if (cfg.record_decisions) state.decisions.push_back(outcome.decision);
  state.check_conservation();
  return outcome;
}

void refresh_derived_stats(RunResult& r) {
  r.ber = r.bits_simulated ? static_cast<Scalar>(r.bit_errors) / static_cast<Scalar>(r.bits_simulated) : 0.0;
  r.mean_delay_slots = r.packets_delivered
                           ? static_cast<Scalar>(r.total_delay_slots) / static_cast<Scalar>(r.packets_delivered)
                           : 0.0;
  // Packet-clustered standard error: bits within a slot share one fading
  // draw, so the i.i.d. unit is the packet, not the bit.
  r.ber_standard_error = 0.0;
  if (r.packets_delivered >= 2 && r.packet_length > 0) {
    const Scalar p = static_cast<Scalar>(r.packets_delivered);
    const Scalar mean = static_cast<Scalar>(r.bit_errors) / p;
    const Scalar var =
        (static_cast<Scalar>(r.sum_sq_packet_errors) - p * mean * mean) / (p - 1.0);
    r.ber_standard_error = std::sqrt(std::max(var, 0.0) / p) / static_cast<Scalar>(r.packet_length);
  }
}

RunResult merge_results(const RunResult& a, const RunResult& b) {
  if (a.packet_length != b.packet_length)
    throw DimensionError("merge_results: packet lengths " + std::to_string(a.packet_length) +
                         " and " + std::to_string(b.packet_length) + " differ");
  RunResult m = a;
  m.bit_errors += b.bit_errors;
  m.bits_simulated += b.bits_simulated;
  m.slot_count += b.slot_count;
  m.packets_delivered += b.packets_delivered;
  m.total_delay_slots += b.total_delay_slots;
  m.sum_sq_packet_errors += b.sum_sq_packet_errors;
  m.decisions += b.decisions;
  m.seed = std::min(a.seed, b.seed);  // order-independent representative
  refresh_derived_stats(m);
  return m;
}

RunResult run_simulation(const SimConfig& cfg, NetworkState& state_out) {
  validate_config(cfg);
  RngStream rng(cfg.seed);
  std::vector<Packet> packets(static_cast<std::size_t>(cfg.num_packets));
  for (std::size_t s = 0; s < packets.size(); ++s) {
    packets[s].seq_id = s;
    packets[s].bits.resize(static_cast<std::size_t>(cfg.packet_length));
    for (auto& b : packets[s].bits) b = static_cast<std::uint8_t>(rng.bit());
  }
  NetworkState state(cfg, std::move(packets));

  // Every packet needs at most two hops and no slot is wasted (some link is
  // always usable while work remains), so this bound only trips on a bug.
  const std::uint64_t slot_budget =
      2ULL * static_cast<std::uint64_t>(cfg.num_packets) / static_cast<std::uint64_t>(cfg.num_antennas) + 16;
  while (!state.finished()) {
    if (state.slot_count >= slot_budget)
      throw SimError("slot budget " + std::to_string(slot_budget) + " exceeded: protocol stalled");
    run_slot(state, cfg, rng);
  }

  RunResult r;
  r.bit_errors = state.bit_errors;
  r.bits_simulated = static_cast<std::uint64_t>(cfg.num_packets) *
                     static_cast<std::uint64_t>(cfg.packet_length);
  r.slot_count = state.slot_count;
  r.packets_delivered = state.delivered_count;
  for (std::size_t s = 0; s < state.delivery_slot.size(); ++s)
    r.total_delay_slots +=
        static_cast<std::uint64_t>(state.delivery_slot[s] - state.source_tx_slot[s]);
  r.sum_sq_packet_errors = state.sum_sq_packet_errors;
  r.packet_length = cfg.packet_length;
  r.decisions = state.counts;
  r.seed = cfg.seed;
  refresh_derived_stats(r);
  state_out = std::move(state);
  return r;
}

RunResult run_simulation(const SimConfig& cfg) {
  NetworkState scratch(cfg, {});
  return run_simulation(cfg, scratch);
}

}  // namespace relaysim
