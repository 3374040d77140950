#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "relaysim/channel.hpp"
#include "relaysim/rng.hpp"
#include "relaysim/selection.hpp"
#include "relaysim/types.hpp"

namespace relaysim {

struct DecisionCounts {
  std::uint64_t direct = 0;
  std::uint64_t relay_rx = 0;
  std::uint64_t relay_tx = 0;
  std::uint64_t idle = 0;

  DecisionCounts& operator+=(const DecisionCounts& o) {
    direct += o.direct;
    relay_rx += o.relay_rx;
    relay_tx += o.relay_tx;
    idle += o.idle;
    return *this;
  }
  friend bool operator==(const DecisionCounts&, const DecisionCounts&) = default;
};

// Full state of one simulation run. seq_ids are dense 0..num_packets-1, so
// per-packet bookkeeping is seq-indexed.
struct NetworkState {
  NetworkState(const SimConfig& cfg, std::vector<Packet> source_packets);

  std::deque<Packet> source_queue;
  std::vector<RelayBuffer> buffers;
  std::vector<Packet> originals;             // ground-truth bits by seq_id
  std::vector<BitVector> delivered_bits;     // empty until delivered
  std::vector<std::int64_t> source_tx_slot;  // -1 until the source sent it
  std::vector<std::int64_t> delivery_slot;   // -1 until delivered
  std::uint64_t delivered_count = 0;
  std::uint64_t slot_count = 0;
  std::uint64_t bit_errors = 0;
  std::uint64_t sum_sq_packet_errors = 0;  // sum over delivered packets of (errors in packet)^2
  DecisionCounts counts;
  std::vector<SlotDecision> decisions;  // filled when cfg.record_decisions

  std::uint64_t total_packets() const { return originals.size(); }
  bool finished() const { return delivered_count == total_packets(); }
  std::uint64_t buffered_count() const;
  // Throws SimError when source + buffers + delivered stop partitioning the packets.
  void check_conservation() const;
};

struct SlotOutcome {
  SlotDecision decision;
  std::vector<std::uint64_t> moved_seq_ids;  // M entries for every non-idle slot
  std::uint64_t bit_errors_added = 0;        // only deliveries add errors
};

struct RunResult {
  std::uint64_t bit_errors = 0;
  std::uint64_t bits_simulated = 0;
  std::uint64_t slot_count = 0;
  std::uint64_t packets_delivered = 0;
  std::uint64_t total_delay_slots = 0;
  std::uint64_t sum_sq_packet_errors = 0;
  int packet_length = 0;
  DecisionCounts decisions;
  std::uint64_t seed = 0;
  Scalar ber = 0;
  Scalar mean_delay_slots = 0;
  Scalar ber_standard_error = 0;  // packet-clustered Monte-Carlo standard error
};

// Recomputes ber / mean delay / standard error from the integer tallies.
void refresh_derived_stats(RunResult& r);

// Order-independent merge of runs of the same experiment cell.
RunResult merge_results(const RunResult& a, const RunResult& b);

// One hop of M packets through one scaled link: per symbol period the t-th
// bits form x (packet p on antenna p), y = scale*H*x + CN(0, N0) noise, and
// the exhaustive ML estimate is collected. Returned packets keep their
// seq_ids and carry the decoded bits, errors included.
std::vector<Packet> transmit_direct(const std::vector<Packet>& pkts,
                                    const ChannelMatrix& h_sd, const SimConfig& cfg,
                                    RngStream& rng);
std::vector<Packet> transmit_source_to_relay(const std::vector<Packet>& pkts,
                                             const ChannelMatrix& h_sr,
                                             const SimConfig& cfg, RngStream& rng);
// Pops the M oldest packets from the buffer and sends them over the RD link.
std::vector<Packet> transmit_relay_to_destination(RelayBuffer& buffer,
                                                  const ChannelMatrix& h_rd,
                                                  const SimConfig& cfg, RngStream& rng);

// One time slot: draws a fresh ChannelSet, selects the mode, executes exactly
// one transmission (half-duplex), updates buffers and delivery bookkeeping.
SlotOutcome run_slot(NetworkState& state, const SimConfig& cfg, RngStream& rng);

// Runs slots until every packet is delivered (buffers drained), then reports
// BER, slot count, delays and the decision histogram. Deterministic in
// (cfg, cfg.seed).
RunResult run_simulation(const SimConfig& cfg);

// As run_simulation but leaves the final state available to the caller.
RunResult run_simulation(const SimConfig& cfg, NetworkState& state_out);

}  // namespace relaysim
