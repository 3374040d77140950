#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "relaysim/engine.hpp"
#include "relaysim/types.hpp"

namespace relaysim {

// A grid of (protocol, SNR) cells sharing one base configuration.
struct SweepSpec {
  SimConfig base;
  std::vector<Scalar> snr_points_db = {0, 2, 4, 6, 8, 10, 12, 14, 16};
  std::vector<Protocol> protocols = {Protocol::switched_max_link,
                                     Protocol::max_link, Protocol::direct};
  int trials_per_point = 1;
  int jobs = 1;
};

// Aggregated result of one (protocol, SNR) cell.
struct ResultRow {
  Protocol protocol = Protocol::direct;
  int num_antennas = 0;
  int num_relays = 0;
  int buffer_capacity = 0;
  Scalar snr_db = 0;
  Scalar ber = 0;
  std::uint64_t bit_errors = 0;
  std::uint64_t bits_simulated = 0;
  std::uint64_t slot_count = 0;
  Scalar mean_delay_slots = 0;
  Scalar ber_standard_error = 0;
  DecisionCounts decisions;
  std::uint64_t seed = 0;  // cell seed; trial t runs with seed_mix(seed, t)

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

enum class OutputFormat { csv, json };
OutputFormat format_from_string(const std::string& name);

// Cell seed expansion: mixing the master seed with the protocol tag and the
// SNR bit pattern, so adding grid points never perturbs existing cells.
std::uint64_t cell_seed(std::uint64_t master_seed, Protocol protocol, Scalar snr_db);

// Throws ConfigError on empty lists, duplicate cells or bad counts.
void validate_spec(const SweepSpec& spec);

// Runs every cell (trials aggregated, up to `jobs` cells concurrently) and
// returns rows sorted by (protocol name, snr_db). Deterministic for a fixed
// master seed regardless of execution order.
std::vector<ResultRow> run_sweep(const SweepSpec& spec);

// Fixed-header CSV; BER carries at least 6 significant digits and exact zero
// prints as 0.000000.
std::string to_csv(const std::vector<ResultRow>& rows);
std::string format_ber(Scalar ber);

nlohmann::json to_json(const SweepSpec& spec, const std::vector<ResultRow>& rows);
std::vector<ResultRow> rows_from_json(const nlohmann::json& j);

// Writes rows to path ("-" = stdout) in the requested format.
void emit(const SweepSpec& spec, const std::vector<ResultRow>& rows,
          OutputFormat format, const std::string& path);

// Config-file schema (documented in the README). Unknown keys are rejected.
SweepSpec spec_from_json(const nlohmann::json& j);
SweepSpec load_spec_file(const std::string& path);

// CLI flag values; every present field overrides the file/spec value.
struct SweepOverrides {
  std::optional<std::string> protocols;  // comma-separated names
  std::optional<int> num_antennas;
  std::optional<int> num_relays;
  std::optional<int> buffer_capacity;
  std::optional<int> num_packets;
  std::optional<int> packet_length;
  std::optional<std::string> snr;  // "start:step:stop" or comma list
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> jobs;
  std::optional<std::string> fallback;
};

void apply_overrides(SweepSpec& spec, const SweepOverrides& o);

// "start:step:stop" (inclusive stop) or a comma-separated list, in dB.
std::vector<Scalar> parse_snr_spec(const std::string& text);
std::vector<Protocol> parse_protocol_list(const std::string& text);

}  // namespace relaysim
