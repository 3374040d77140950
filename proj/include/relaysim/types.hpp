#pragma once

#include <complex>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace relaysim {

using Scalar = double;
using Complex = std::complex<Scalar>;

// M x M complex gains of one link (SD, SR_k or RD_j).
using ChannelMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
// BPSK symbol vector, entries in {-1, +1}.
using SymbolVector = Eigen::VectorXd;
using RealVector = Eigen::VectorXd;
using BitVector = std::vector<std::uint8_t>;

// Exhaustive 2^M candidate enumeration is intractable past this.
inline constexpr int kMaxAntennas = 10;

enum class Protocol { direct, max_link, switched_max_link };

// What a relay protocol does when the source still has data but no relay
// link is usable this slot.
enum class FallbackPolicy { direct_transmission, idle };

struct SimError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : SimError {
  enum class Code {
    non_positive_parameter,
    packets_not_multiple_of_antennas,
    antenna_guard_exceeded,
    buffer_smaller_than_antennas,
    unknown_name,
    bad_value,
  };
  ConfigError(Code c, const std::string& what) : SimError(what), code(c) {}
  Code code;
};

struct BufferError : SimError {
  enum class Code { overflow, underflow };
  BufferError(Code c, const std::string& what) : SimError(what), code(c) {}
  Code code;
};

struct DimensionError : SimError {
  using SimError::SimError;
};

std::string to_string(Protocol p);
Protocol protocol_from_string(const std::string& name);
std::string to_string(FallbackPolicy f);
FallbackPolicy fallback_from_string(const std::string& name);

struct SimConfig {
  int num_antennas = 2;        // M, antennas per node
  int num_relays = 10;         // N
  int buffer_capacity = 20;    // packets per relay buffer
  int packet_length = 100;     // L, bits per packet
  int num_packets = 10000;
  Scalar symbol_energy = 1.0;  // Es, total transmit energy per time slot
  Scalar relay_energy = 1.0;   // Erj, equal to Es unless overridden
  Scalar noise_power = 1.0;    // N0, per complex sample
  std::vector<Scalar> snr_grid_db = {0, 2, 4, 6, 8, 10, 12, 14, 16};
  Protocol protocol = Protocol::switched_max_link;
  FallbackPolicy fallback = FallbackPolicy::direct_transmission;
  std::uint64_t seed = 1;
  bool record_decisions = false;
};

// Returns cfg unchanged when every invariant holds, throws ConfigError
// with a distinct code per violation otherwise.
const SimConfig& validate_config(const SimConfig& cfg);

struct Packet {
  std::uint64_t seq_id = 0;
  BitVector bits;
};

// Fixed-capacity FIFO of decoded packets held by one relay.
class RelayBuffer {
 public:
  explicit RelayBuffer(int capacity) : capacity_(capacity) {
    if (capacity < 1)
      throw ConfigError(ConfigError::Code::non_positive_parameter,
                        "buffer capacity must be positive");
  }

  int capacity() const { return capacity_; }
  int size() const { return static_cast<int>(queue_.size()); }
  int free_slots() const { return capacity_ - size(); }
  bool empty() const { return queue_.empty(); }

  void push(std::vector<Packet> pkts) {
    if (size() + static_cast<int>(pkts.size()) > capacity_)
      throw BufferError(BufferError::Code::overflow,
                        "relay buffer overflow: " + std::to_string(pkts.size()) +
                            " packets into " + std::to_string(free_slots()) + " free slots");
    for (auto& p : pkts) queue_.push_back(std::move(p));
  }

  std::vector<Packet> pop(int count) {
    if (count > size())
      throw BufferError(BufferError::Code::underflow,
                        "relay buffer underflow: " + std::to_string(count) +
                            " packets from " + std::to_string(size()) + " stored");
    std::vector<Packet> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
      out.push_back(std::move(queue_.front()));
      queue_.pop_front();
    }
    return out;
  }

  const Packet& front() const { return queue_.front(); }

 private:
  std::deque<Packet> queue_;
  int capacity_;
};

// One slot's draw of every link matrix. Redrawn independently per slot.
struct ChannelSet {
  ChannelMatrix h_sd;
  std::vector<ChannelMatrix> h_sr;
  std::vector<ChannelMatrix> h_rd;
  std::uint64_t slot_index = 0;
};

enum class SlotMode { direct, relay_rx, relay_tx, idle };

// Outcome of the per-slot selection together with the metrics behind it.
struct SlotDecision {
  SlotMode mode = SlotMode::direct;
  int relay = -1;        // selected relay for relay_rx / relay_tx, -1 otherwise
  Scalar d_min_sd = 0;   // SD min pairwise distance at the 2Es/M scale
  Scalar d_max_min = 0;  // winning relay-link metric, 0 when none was usable
  RealVector per_link_metrics;  // 2N entries, SR block then RD block; empty for direct runs
};

}  // namespace relaysim
