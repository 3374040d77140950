#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "relaysim/sweep.hpp"

int main(int argc, char** argv) {
  CLI::App app{"relaysim: buffer-aided cooperative MIMO relay BER sweeps"};
  app.get_formatter()->column_width(26);

  std::string config_path;
  std::string format_name = "csv";
  std::string out_path = "-";
  relaysim::SweepOverrides o;

  app.add_option("--config", config_path, "JSON sweep configuration file")
      ->check(CLI::ExistingFile);
  app.add_option("--protocol", o.protocols,
                 "comma-separated protocols: switched-max-link, max-link, direct");
  app.add_option("--antennas", o.num_antennas, "antennas per node (M)");
  app.add_option("--relays", o.num_relays, "number of relays (N)");
  app.add_option("--buffer", o.buffer_capacity, "relay buffer capacity in packets");
  app.add_option("--packets", o.num_packets, "packets per run");
  app.add_option("--packet-len", o.packet_length, "bits per packet (L)");
  app.add_option("--snr", o.snr, "SNR grid in dB: start:step:stop or comma list");
  app.add_option("--seed", o.seed, "master seed");
  app.add_option("--trials", o.trials, "independent trials per (protocol, SNR) cell");
  app.add_option("--jobs", o.jobs, "cells run concurrently");
  app.add_option("--format", format_name, "output format: csv or json")
      ->capture_default_str();
  app.add_option("--out", out_path, "output path, - for stdout")->capture_default_str();
  app.add_option("--fallback", o.fallback,
                 "relay-protocol action when no relay link is usable: direct or idle");

  CLI11_PARSE(app, argc, argv);

  try {
    relaysim::SweepSpec spec =
        config_path.empty() ? relaysim::SweepSpec{} : relaysim::load_spec_file(config_path);
    relaysim::apply_overrides(spec, o);
    relaysim::validate_spec(spec);
    const auto rows = relaysim::run_sweep(spec);
    relaysim::emit(spec, rows, relaysim::format_from_string(format_name), out_path);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
