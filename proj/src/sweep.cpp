#include "relaysim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>
#include <utility>

#include "relaysim/rng.hpp"

namespace relaysim {

OutputFormat format_from_string(const std::string& name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw ConfigError(ConfigError::Code::unknown_name,
                    "unknown output format '" + name + "' (valid: csv, json)");
}

std::uint64_t cell_seed(std::uint64_t master_seed, Protocol protocol, Scalar snr_db) {
  const std::uint64_t by_protocol = seed_mix(master_seed, static_cast<std::uint64_t>(protocol) + 1);
  return seed_mix(by_protocol, std::bit_cast<std::uint64_t>(snr_db));
}

void validate_spec(const SweepSpec& spec) {
  validate_config(spec.base);
  if (spec.snr_points_db.empty())
    throw ConfigError(ConfigError::Code::bad_value, "SNR point list is empty");
  if (spec.protocols.empty())
    throw ConfigError(ConfigError::Code::bad_value, "protocol list is empty");
  if (spec.trials_per_point < 1)
    throw ConfigError(ConfigError::Code::bad_value,
                      "trials_per_point must be >= 1, got " + std::to_string(spec.trials_per_point));
  if (spec.jobs < 1)
    throw ConfigError(ConfigError::Code::bad_value,
                      "jobs must be >= 1, got " + std::to_string(spec.jobs));
  std::set<std::pair<Protocol, std::uint64_t>> seen;
  for (Protocol p : spec.protocols)
    for (Scalar s : spec.snr_points_db)
      if (!seen.insert({p, std::bit_cast<std::uint64_t>(s)}).second)
        throw ConfigError(ConfigError::Code::bad_value,
                          "duplicate sweep cell (" + to_string(p) + ", " +
                              std::to_string(s) + " dB)");
}

namespace {

ResultRow run_cell(const SweepSpec& spec, Protocol protocol, Scalar snr_db) {
  SimConfig cfg = spec.base;
  cfg.protocol = protocol;
  cfg.snr_grid_db = {snr_db};
  const Scalar es = cfg.noise_power * std::pow(10.0, snr_db / 10.0);
  cfg.symbol_energy = es;
  cfg.relay_energy = es;

  const std::uint64_t cell = cell_seed(spec.base.seed, protocol, snr_db);
  RunResult agg;
  for (int t = 0; t < spec.trials_per_point; ++t) {
    cfg.seed = seed_mix(cell, static_cast<std::uint64_t>(t));
    const RunResult r = run_simulation(cfg);
    agg = t == 0 ? r : merge_results(agg, r);
  }

  ResultRow row;
  row.protocol = protocol;
  row.num_antennas = cfg.num_antennas;
  row.num_relays = cfg.num_relays;
  row.buffer_capacity = cfg.buffer_capacity;
  row.snr_db = snr_db;
  row.ber = agg.ber;
  row.bit_errors = agg.bit_errors;
  row.bits_simulated = agg.bits_simulated;
  row.slot_count = agg.slot_count;
  row.mean_delay_slots = agg.mean_delay_slots;
  row.ber_standard_error = agg.ber_standard_error;
  row.decisions = agg.decisions;
  row.seed = cell;
  return row;
}

}  // namespace

std::vector<ResultRow> run_sweep(const SweepSpec& spec) {
  validate_spec(spec);
  struct Cell {
    Protocol protocol;
    Scalar snr_db;
  };
  std::vector<Cell> cells;
  for (Protocol p : spec.protocols)
    for (Scalar s : spec.snr_points_db) cells.push_back({p, s});

  std::vector<ResultRow> rows(cells.size());
  std::vector<std::string> failures(cells.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        rows[i] = run_cell(spec, cells[i].protocol, cells[i].snr_db);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };

  const int jobs = std::min<int>(spec.jobs, static_cast<int>(cells.size()));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (std::size_t i = 0; i < cells.size(); ++i)
    if (!failures[i].empty())
      throw SimError("cell (protocol=" + to_string(cells[i].protocol) + ", snr=" +
                     std::to_string(cells[i].snr_db) + " dB) failed: " + failures[i]);

  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    const std::string an = to_string(a.protocol), bn = to_string(b.protocol);
    return an != bn ? an < bn : a.snr_db < b.snr_db;
  });
  return rows;
}

std::string format_ber(Scalar ber) {
  if (ber == 0.0) return "0.000000";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6e", ber);
  return buf;
}

namespace {

std::string format_real(Scalar v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string format_fixed6(Scalar v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out = "protocol,M,N,buffer,snr_db,ber,bits,slots,mean_delay,seed\n";
  for (const auto& r : rows) {
    out += to_string(r.protocol);
    out += ',' + std::to_string(r.num_antennas);
    out += ',' + std::to_string(r.num_relays);
    out += ',' + std::to_string(r.buffer_capacity);
    out += ',' + format_real(r.snr_db);
    out += ',' + format_ber(r.ber);
    out += ',' + std::to_string(r.bits_simulated);
    out += ',' + std::to_string(r.slot_count);
    out += ',' + format_fixed6(r.mean_delay_slots);
    out += ',' + std::to_string(r.seed);
    out += '\n';
  }
  return out;
}

nlohmann::json to_json(const SweepSpec& spec, const std::vector<ResultRow>& rows) {
  nlohmann::json protocols = nlohmann::json::array();
  for (Protocol p : spec.protocols) protocols.push_back(to_string(p));
  nlohmann::json doc = {
      {"config",
       {{"antennas", spec.base.num_antennas},
        {"relays", spec.base.num_relays},
        {"buffer", spec.base.buffer_capacity},
        {"packets", spec.base.num_packets},
        {"packet_len", spec.base.packet_length},
        {"noise_power", spec.base.noise_power},
        {"snr", spec.snr_points_db},
        {"protocols", protocols},
        {"seed", spec.base.seed},
        {"trials", spec.trials_per_point},
        {"jobs", spec.jobs},
        {"fallback", to_string(spec.base.fallback)}}},
      {"rows", nlohmann::json::array()}};
  for (const auto& r : rows)
    doc["rows"].push_back({{"protocol", to_string(r.protocol)},
                           {"M", r.num_antennas},
                           {"N", r.num_relays},
                           {"buffer", r.buffer_capacity},
                           {"snr_db", r.snr_db},
                           {"ber", r.ber},
                           {"bit_errors", r.bit_errors},
                           {"bits", r.bits_simulated},
                           {"slots", r.slot_count},
                           {"mean_delay", r.mean_delay_slots},
                           {"ber_se", r.ber_standard_error},
                           {"decisions",
                            {{"direct", r.decisions.direct},
                             {"relay_rx", r.decisions.relay_rx},
                             {"relay_tx", r.decisions.relay_tx},
                             {"idle", r.decisions.idle}}},
                           {"seed", r.seed}});
  return doc;
}

std::vector<ResultRow> rows_from_json(const nlohmann::json& j) {
  const nlohmann::json& arr = j.is_array() ? j : j.at("rows");
  std::vector<ResultRow> rows;
  rows.reserve(arr.size());
  for (const auto& e : arr) {
    ResultRow r;
    r.protocol = protocol_from_string(e.at("protocol").get<std::string>());
    r.num_antennas = e.at("M").get<int>();
    r.num_relays = e.at("N").get<int>();
    r.buffer_capacity = e.at("buffer").get<int>();
    r.snr_db = e.at("snr_db").get<Scalar>();
    r.ber = e.at("ber").get<Scalar>();
    r.bit_errors = e.at("bit_errors").get<std::uint64_t>();
    r.bits_simulated = e.at("bits").get<std::uint64_t>();
    r.slot_count = e.at("slots").get<std::uint64_t>();
    r.mean_delay_slots = e.at("mean_delay").get<Scalar>();
    r.ber_standard_error = e.at("ber_se").get<Scalar>();
    const auto& d = e.at("decisions");
    r.decisions.direct = d.at("direct").get<std::uint64_t>();
    r.decisions.relay_rx = d.at("relay_rx").get<std::uint64_t>();
    r.decisions.relay_tx = d.at("relay_tx").get<std::uint64_t>();
    r.decisions.idle = d.at("idle").get<std::uint64_t>();
    r.seed = e.at("seed").get<std::uint64_t>();
    rows.push_back(r);
  }
  return rows;
}

void emit(const SweepSpec& spec, const std::vector<ResultRow>& rows, OutputFormat format,
          const std::string& path) {
  std::string text;
  if (format == OutputFormat::csv)
    text = to_csv(rows);
  else
    text = to_json(spec, rows).dump(2) + "\n";

  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw SimError("failed writing results to stdout");
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw SimError("cannot open '" + path + "' for writing");
  f << text;
  f.flush();
  if (!f) throw SimError("failed writing results to '" + path + "'");
}

namespace {

Scalar parse_real(const std::string& text) {
  std::size_t used = 0;
  Scalar v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(ConfigError::Code::bad_value, "cannot parse number '" + text + "'");
  }
  while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
  if (used != text.size())
    throw ConfigError(ConfigError::Code::bad_value, "trailing junk in number '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) parts.push_back(item);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

std::vector<Scalar> parse_snr_spec(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError(ConfigError::Code::bad_value, "empty SNR specification");
  std::vector<Scalar> points;
  if (t.find(':') != std::string::npos) {
    const auto parts = split(t, ':');
    if (parts.size() != 3)
      throw ConfigError(ConfigError::Code::bad_value,
                        "SNR range must be start:step:stop, got '" + text + "'");
    const Scalar start = parse_real(trim(parts[0]));
    const Scalar step = parse_real(trim(parts[1]));
    const Scalar stop = parse_real(trim(parts[2]));
    if (step <= 0)
      throw ConfigError(ConfigError::Code::bad_value,
                        "SNR range step must be positive, got " + std::to_string(step));
    if (stop < start)
      throw ConfigError(ConfigError::Code::bad_value, "SNR range stop is below start");
    for (Scalar v = start; v <= stop + 1e-9; v += step) points.push_back(v);
  } else {
    for (const auto& part : split(t, ',')) points.push_back(parse_real(trim(part)));
  }
  return points;
}

std::vector<Protocol> parse_protocol_list(const std::string& text) {
  std::vector<Protocol> out;
  for (const auto& part : split(text, ',')) {
    const std::string name = trim(part);
    if (name.empty())
      throw ConfigError(ConfigError::Code::bad_value,
                        "empty protocol name in '" + text + "'");
    out.push_back(protocol_from_string(name));
  }
  if (out.empty())
    throw ConfigError(ConfigError::Code::bad_value, "empty protocol list");
  return out;
}

SweepSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object())
    throw ConfigError(ConfigError::Code::bad_value, "config root must be a JSON object");
  SweepSpec spec;
  for (const auto& [key, value] : j.items()) {
    if (key == "antennas")
      spec.base.num_antennas = value.get<int>();
    else if (key == "relays")
      spec.base.num_relays = value.get<int>();
    else if (key == "buffer")
      spec.base.buffer_capacity = value.get<int>();
    else if (key == "packets")
      spec.base.num_packets = value.get<int>();
    else if (key == "packet_len")
      spec.base.packet_length = value.get<int>();
    else if (key == "noise_power")
      spec.base.noise_power = value.get<Scalar>();
    else if (key == "seed")
      spec.base.seed = value.get<std::uint64_t>();
    else if (key == "fallback")
      spec.base.fallback = fallback_from_string(value.get<std::string>());
    else if (key == "trials")
      spec.trials_per_point = value.get<int>();
    else if (key == "jobs")
      spec.jobs = value.get<int>();
    else if (key == "snr") {
      if (value.is_string())
        spec.snr_points_db = parse_snr_spec(value.get<std::string>());
      else
        spec.snr_points_db = value.get<std::vector<Scalar>>();
    } else if (key == "protocols") {
      if (value.is_string())
        spec.protocols = parse_protocol_list(value.get<std::string>());
      else {
        spec.protocols.clear();
        for (const auto& name : value)
          spec.protocols.push_back(protocol_from_string(name.get<std::string>()));
      }
    } else {
      throw ConfigError(ConfigError::Code::unknown_name,
                        "unknown config key '" + key + "'");
    }
  }
  spec.base.snr_grid_db = spec.snr_points_db;
  return spec;
}

SweepSpec load_spec_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw SimError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(ConfigError::Code::bad_value,
                      "config file '" + path + "': " + e.what());
  }
  return spec_from_json(j);
}

void apply_overrides(SweepSpec& spec, const SweepOverrides& o) {
  if (o.protocols) spec.protocols = parse_protocol_list(*o.protocols);
  if (o.num_antennas) spec.base.num_antennas = *o.num_antennas;
  if (o.num_relays) spec.base.num_relays = *o.num_relays;
  if (o.buffer_capacity) spec.base.buffer_capacity = *o.buffer_capacity;
  if (o.num_packets) spec.base.num_packets = *o.num_packets;
  if (o.packet_length) spec.base.packet_length = *o.packet_length;
  if (o.snr) {
    spec.snr_points_db = parse_snr_spec(*o.snr);
    spec.base.snr_grid_db = spec.snr_points_db;
  }
  if (o.seed) spec.base.seed = *o.seed;
  if (o.trials) spec.trials_per_point = *o.trials;
  if (o.jobs) spec.jobs = *o.jobs;
  if (o.fallback) spec.base.fallback = fallback_from_string(*o.fallback);
}

}  // namespace relaysim
