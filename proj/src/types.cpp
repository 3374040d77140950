#include "relaysim/types.hpp"

namespace relaysim {

std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::direct: return "direct";
    case Protocol::max_link: return "max-link";
    case Protocol::switched_max_link: return "switched-max-link";
  }
  throw ConfigError(ConfigError::Code::bad_value, "unhandled protocol value");
}

Protocol protocol_from_string(const std::string& name) {
  if (name == "direct") return Protocol::direct;
  if (name == "max-link") return Protocol::max_link;
  if (name == "switched-max-link") return Protocol::switched_max_link;
  throw ConfigError(ConfigError::Code::unknown_name,
                    "unknown protocol '" + name +
                        "' (valid: switched-max-link, max-link, direct)");
}

std::string to_string(FallbackPolicy f) {
  return f == FallbackPolicy::direct_transmission ? "direct" : "idle";
}

FallbackPolicy fallback_from_string(const std::string& name) {
  if (name == "direct") return FallbackPolicy::direct_transmission;
  if (name == "idle") return FallbackPolicy::idle;
  throw ConfigError(ConfigError::Code::unknown_name,
                    "unknown fallback policy '" + name + "' (valid: direct, idle)");
}

const SimConfig& validate_config(const SimConfig& cfg) {
  const auto positive = [](long long v, const char* name) {
    if (v <= 0)
      throw ConfigError(ConfigError::Code::non_positive_parameter,
                        std::string(name) + " must be positive, got " + std::to_string(v));
  };
  const auto positive_real = [](Scalar v, const char* name) {
    if (!(v > 0))
      throw ConfigError(ConfigError::Code::non_positive_parameter,
                        std::string(name) + " must be positive, got " + std::to_string(v));
  };
  positive(cfg.num_antennas, "num_antennas");
  positive(cfg.num_relays, "num_relays");
  positive(cfg.buffer_capacity, "buffer_capacity");
  positive(cfg.packet_length, "packet_length");
  positive(cfg.num_packets, "num_packets");
  positive_real(cfg.symbol_energy, "symbol_energy");
  positive_real(cfg.relay_energy, "relay_energy");
  positive_real(cfg.noise_power, "noise_power");

  if (cfg.num_antennas > kMaxAntennas)
    throw ConfigError(ConfigError::Code::antenna_guard_exceeded,
                      "num_antennas " + std::to_string(cfg.num_antennas) +
                          " exceeds the 2^M enumeration guard (max " +
                          std::to_string(kMaxAntennas) + ")");
  if (cfg.num_packets % cfg.num_antennas != 0)
    throw ConfigError(ConfigError::Code::packets_not_multiple_of_antennas,
                      "num_packets " + std::to_string(cfg.num_packets) +
                          " is not a multiple of num_antennas " +
                          std::to_string(cfg.num_antennas) +
                          " (each slot moves exactly M packets)");
  if (cfg.buffer_capacity < cfg.num_antennas)
    throw ConfigError(ConfigError::Code::buffer_smaller_than_antennas,
                      "buffer_capacity " + std::to_string(cfg.buffer_capacity) +
                          " cannot hold one reception of " +
                          std::to_string(cfg.num_antennas) + " packets");
  return cfg;
}

}  // namespace relaysim
