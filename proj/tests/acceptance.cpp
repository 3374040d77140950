// Acceptance gate: one pass/fail line per criterion, exit 0 only when all
// pass. Every check is deterministic (frozen seeds); tolerances are fixed
// here and never tuned to a particular run.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "relaysim/engine.hpp"
#include "relaysim/sweep.hpp"
#include "testutil.hpp"

using namespace relaysim;

namespace {

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

const ResultRow& row_at(const std::vector<ResultRow>& rows, Protocol p, Scalar snr) {
  for (const auto& r : rows)
    if (r.protocol == p && r.snr_db == snr) return r;
  throw SimError("missing sweep row " + to_string(p) + " @ " + std::to_string(snr));
}

// 1. Simulated direct SISO BER against the closed-form Rayleigh average.
bool analytic_siso_oracle(std::string& detail) {
  SimConfig cfg;
  cfg.protocol = Protocol::direct;
  cfg.num_antennas = 1;
  cfg.num_relays = 1;
  cfg.buffer_capacity = 1;
  cfg.packet_length = 100;
  cfg.num_packets = 40000;  // 4e6 bits
  cfg.symbol_energy = 10.0;  // Es/N0 = 10 dB; the direct path radiates 2*Es
  cfg.relay_energy = 10.0;
  cfg.noise_power = 1.0;
  cfg.seed = 20260821;

  const RunResult r = run_simulation(cfg);
  const Scalar oracle = testutil::rayleigh_bpsk_ber(2.0 * cfg.symbol_energy / cfg.noise_power);
  const Scalar rel = std::abs(r.ber - oracle) / oracle;
  detail = fmt("ber=%.6e analytic=%.6e rel_err=%.2f%% over %llu bits", r.ber, oracle,
               100.0 * rel, static_cast<unsigned long long>(r.bits_simulated));
  return rel <= 0.05;
}

// 2. Effectively zero noise: every protocol/M/N combination delivers all
// packets with BER exactly 0.
bool noise_free_delivery(std::string& detail) {
  int runs = 0;
  for (Protocol p : {Protocol::direct, Protocol::max_link, Protocol::switched_max_link})
    for (int m : {1, 2, 3})
      for (int n : {1, 2, 4}) {
        SimConfig cfg;
        cfg.protocol = p;
        cfg.num_antennas = m;
        cfg.num_relays = n;
        cfg.buffer_capacity = std::max(4, m);
        cfg.packet_length = 16;
        cfg.num_packets = 12;
        cfg.symbol_energy = 1e20;  // 200 dB
        cfg.relay_energy = 1e20;
        cfg.noise_power = 1.0;
        cfg.seed = seed_mix(0xC2, static_cast<std::uint64_t>(runs));

        const RunResult r = run_simulation(cfg);
        ++runs;
        if (r.bit_errors != 0 || r.ber != 0.0 ||
            r.packets_delivered != static_cast<std::uint64_t>(cfg.num_packets)) {
          detail = fmt("%s M=%d N=%d: ber=%.3e delivered=%llu/%d", to_string(p).c_str(), m, n,
                       r.ber, static_cast<unsigned long long>(r.packets_delivered),
                       cfg.num_packets);
          return false;
        }
      }
  detail = fmt("%d runs, all delivered with BER 0", runs);
  return true;
}

// 3. Pairwise-enumeration metric against the independent difference-pattern
// oracle min over e in {-2,0,2}^M \ {0} of scale^2*||H e||^2.
bool metric_oracle(std::string& detail) {
  RngStream rng(0xacce55);
  Scalar worst = 0;
  int matrices = 0;
  for (int m = 1; m <= 3; ++m)
    for (int trial = 0; trial < 100; ++trial) {
      const ChannelMatrix h = testutil::random_channel(rng, m);
      const Scalar scale = 0.25 + 2.0 * rng.uniform_unit();
      const Scalar pairwise = pair_min_distance(h, scale);
      const Scalar oracle = testutil::oracle_min_distance_full(h, scale);
      const Scalar rel = std::abs(pairwise - oracle) / std::max<Scalar>(oracle, 1e-300);
      worst = std::max(worst, rel);
      ++matrices;
    }
  detail = fmt("max rel err %.3e over %d random matrices, M in {1,2,3}", worst, matrices);
  return worst <= 1e-12;
}

// 4. Low-SNR ordering: the switched protocol is no worse than max-link and
// no worse than direct at every grid point, within 3 combined standard errors.
bool protocol_ordering(std::string& detail) {
  SweepSpec spec;
  spec.base.num_antennas = 2;
  spec.base.num_relays = 10;
  spec.base.buffer_capacity = 20;
  spec.base.packet_length = 100;
  spec.base.num_packets = 10000;  // 1e6 bits per cell
  spec.base.seed = 40;
  spec.protocols = {Protocol::switched_max_link, Protocol::max_link, Protocol::direct};
  spec.snr_points_db = {0, 2, 4, 6, 8};

  const auto rows = run_sweep(spec);
  Scalar min_slack = 1e300;
  std::string worst;
  for (Scalar snr : spec.snr_points_db) {
    const ResultRow& sw = row_at(rows, Protocol::switched_max_link, snr);
    for (Protocol other : {Protocol::max_link, Protocol::direct}) {
      const ResultRow& o = row_at(rows, other, snr);
      const Scalar sigma = std::sqrt(sw.ber_standard_error * sw.ber_standard_error +
                                     o.ber_standard_error * o.ber_standard_error);
      const Scalar slack = o.ber + 3.0 * sigma - sw.ber;
      if (slack < min_slack) {
        min_slack = slack;
        worst = fmt("vs %s @ %g dB: %.3e <= %.3e + 3*%.1e", to_string(other).c_str(), snr,
                    sw.ber, o.ber, sigma);
      }
    }
  }
  detail = fmt("tightest margin %s (slack %.2e)", worst.c_str(), min_slack);
  return min_slack >= 0.0;
}

// 5. With M=3 the max-link and direct BER curves cross exactly once on the
// 0..16 dB grid, inside [3, 11] dB.
bool crossover(std::string& detail) {
  SweepSpec spec;
  spec.base.num_antennas = 3;
  spec.base.num_relays = 10;
  spec.base.buffer_capacity = 20;
  spec.base.packet_length = 100;
  spec.base.num_packets = 9999;  // ~1e6 bits per cell
  spec.base.seed = 50;
  spec.protocols = {Protocol::max_link, Protocol::direct};
  spec.snr_points_db = {0, 2, 4, 6, 8, 10, 12, 14, 16};

  const auto rows = run_sweep(spec);
  std::vector<std::pair<Scalar, Scalar>> diffs;  // (snr, ber_maxlink - ber_direct)
  for (Scalar snr : spec.snr_points_db) {
    const Scalar d =
        row_at(rows, Protocol::max_link, snr).ber - row_at(rows, Protocol::direct, snr).ber;
    if (d != 0.0) diffs.push_back({snr, d});
  }
  int sign_changes = 0;
  Scalar cross_db = -1;
  for (std::size_t i = 1; i < diffs.size(); ++i) {
    if ((diffs[i - 1].second > 0) != (diffs[i].second > 0)) {
      ++sign_changes;
      const auto [s0, d0] = diffs[i - 1];
      const auto [s1, d1] = diffs[i];
      cross_db = s0 + (s1 - s0) * d0 / (d0 - d1);  // linear interpolation
    }
  }
  detail = fmt("%d sign change(s), crossover at %.2f dB", sign_changes, cross_db);
  return sign_changes == 1 && cross_db >= 3.0 && cross_db <= 11.0;
}

// 6. Growing the antenna count does not improve the switched protocol at
// 8 dB: BER(M=1) <= BER(M=2) within 3 combined standard errors.
bool antenna_trend(std::string& detail) {
  RunResult runs[2];
  const int antennas[2] = {1, 2};
  for (int i = 0; i < 2; ++i) {
    SimConfig cfg;
    cfg.protocol = Protocol::switched_max_link;
    cfg.num_antennas = antennas[i];
    cfg.num_relays = 10;
    cfg.buffer_capacity = 20;
    cfg.packet_length = 100;
    cfg.num_packets = 20000;  // 2e6 bits
    cfg.symbol_energy = std::pow(10.0, 0.8);  // 8 dB
    cfg.relay_energy = cfg.symbol_energy;
    cfg.noise_power = 1.0;
    cfg.seed = seed_mix(60, static_cast<std::uint64_t>(i));
    runs[i] = run_simulation(cfg);
  }
  const Scalar sigma =
      std::sqrt(runs[0].ber_standard_error * runs[0].ber_standard_error +
                runs[1].ber_standard_error * runs[1].ber_standard_error);
  detail = fmt("M=1: %.3e, M=2: %.3e, 3*sigma=%.1e", runs[0].ber, runs[1].ber, 3.0 * sigma);
  return runs[0].ber <= runs[1].ber + 3.0 * sigma;
}

// 7. Structural property sweep: buffers vs a reference queue, FIFO delivery,
// half-duplex slots, masked-argmax laws, byte-identical reruns.
bool structural_suite(std::string& detail) {
  std::string parts;
  bool ok = true;
  const auto report = [&](const char* name, bool good) {
    parts += fmt("%s%s=%s", parts.empty() ? "" : " ", name, good ? "ok" : "FAIL");
    ok = ok && good;
  };

  {  // buffer contract under random interleaving, against std::deque
    RngStream rng(0x70);
    RelayBuffer buf(9);
    std::deque<std::uint64_t> ref;
    std::uint64_t next_seq = 0;
    bool good = true;
    for (int step = 0; step < 3000 && good; ++step) {
      const int batch = 1 + static_cast<int>(rng.next_u64() % 3);
      if (rng.bit()) {
        std::vector<Packet> pkts;
        for (int i = 0; i < batch; ++i)
          pkts.push_back(Packet{next_seq + static_cast<std::uint64_t>(i), BitVector(4, 0)});
        if (buf.size() + batch <= buf.capacity()) {
          buf.push(std::move(pkts));
          for (int i = 0; i < batch; ++i) ref.push_back(next_seq + static_cast<std::uint64_t>(i));
          next_seq += static_cast<std::uint64_t>(batch);
        } else {
          try {
            buf.push(std::move(pkts));
            good = false;  // overflow must throw
          } catch (const BufferError&) {
          }
        }
      } else if (batch <= buf.size()) {
        for (const Packet& p : buf.pop(batch)) {
          good = good && !ref.empty() && p.seq_id == ref.front();
          if (!ref.empty()) ref.pop_front();
        }
      } else {
        try {
          buf.pop(batch);
          good = false;  // underflow must throw
        } catch (const BufferError&) {
        }
      }
      good = good && buf.size() == static_cast<int>(ref.size()) && buf.size() <= buf.capacity();
    }
    report("buffer-fifo", good);
  }

  {  // half-duplex: every slot moves one block over exactly one link
    SimConfig cfg;
    cfg.protocol = Protocol::switched_max_link;
    cfg.num_antennas = 2;
    cfg.num_relays = 3;
    cfg.buffer_capacity = 4;
    cfg.packet_length = 8;
    cfg.num_packets = 60;
    cfg.seed = 71;
    RngStream bits(cfg.seed);
    std::vector<Packet> pkts(static_cast<std::size_t>(cfg.num_packets));
    for (std::size_t s = 0; s < pkts.size(); ++s) {
      pkts[s].seq_id = s;
      pkts[s].bits.resize(8);
      for (auto& b : pkts[s].bits) b = static_cast<std::uint8_t>(bits.bit());
    }
    NetworkState state(cfg, std::move(pkts));
    RngStream rng(cfg.seed, 1);
    bool good = true;
    while (!state.finished() && good) {
      const std::uint64_t delivered_before = state.delivered_count;
      const std::uint64_t buffered_before = state.buffered_count();
      const std::size_t source_before = state.source_queue.size();
      const SlotOutcome o = run_slot(state, cfg, rng);  // conservation asserted inside
      good = good && o.moved_seq_ids.size() == 2;
      switch (o.decision.mode) {
        case SlotMode::direct:
          good = good && state.delivered_count == delivered_before + 2 &&
                 state.buffered_count() == buffered_before &&
                 state.source_queue.size() == source_before - 2;
          break;
        case SlotMode::relay_rx:
          good = good && state.delivered_count == delivered_before &&
                 state.buffered_count() == buffered_before + 2 &&
                 state.source_queue.size() == source_before - 2;
          break;
        case SlotMode::relay_tx:
          good = good && state.delivered_count == delivered_before + 2 &&
                 state.buffered_count() == buffered_before - 2 &&
                 state.source_queue.size() == source_before;
          break;
        case SlotMode::idle:
          good = false;  // unreachable with capacity >= M
          break;
      }
    }
    good = good && state.finished();
    report("half-duplex", good);
  }

  {  // masked-argmax dominance, monotonicity, positive-scale equivariance
    RngStream rng(0x72);
    bool good = true;
    for (int trial = 0; trial < 500 && good; ++trial) {
      const int n = 1 + static_cast<int>(rng.next_u64() % 6);
      LinkMetrics m;
      m.d_min_sr.resize(n);
      m.d_min_rd.resize(n);
      for (int j = 0; j < n; ++j) {
        m.d_min_sr(j) = 5.0 * rng.uniform_unit();
        m.d_min_rd(j) = 5.0 * rng.uniform_unit();
      }
      AvailabilityMask mask;
      mask.source_has_data = rng.bit() == 1;
      mask.sr_ok.resize(n);
      mask.rd_ok.resize(n);
      for (int j = 0; j < n; ++j) {
        mask.sr_ok[j] = rng.bit() == 1;
        mask.rd_ok[j] = rng.bit() == 1;
      }
      const auto choice = select_max_link(m, mask);
      if (choice) {
        for (int j = 0; j < n; ++j) {
          if (mask.source_has_data && mask.sr_ok[j]) good = good && choice->metric >= m.d_min_sr(j);
          if (mask.rd_ok[j]) good = good && choice->metric >= m.d_min_rd(j);
        }
        AvailabilityMask larger = mask;
        larger.source_has_data = true;
        for (int j = 0; j < n; ++j) {
          larger.sr_ok[j] = larger.sr_ok[j] || rng.bit() == 1;
          larger.rd_ok[j] = larger.rd_ok[j] || rng.bit() == 1;
        }
        const auto bigger = select_max_link(m, larger);
        good = good && bigger && bigger->metric >= choice->metric;

        const Scalar c = 0.05 + 4.0 * rng.uniform_unit();
        LinkMetrics scaled = m;
        scaled.d_min_sr *= c;
        scaled.d_min_rd *= c;
        const auto s = select_max_link(scaled, mask);
        good = good && s && s->relay == choice->relay && s->direction == choice->direction;
      }
    }
    report("masked-argmax", good);
  }

  {  // determinism: identical seeds give identical CSV bytes, jobs included
    SweepSpec spec;
    spec.base.num_antennas = 2;
    spec.base.num_relays = 3;
    spec.base.buffer_capacity = 4;
    spec.base.packet_length = 10;
    spec.base.num_packets = 50;
    spec.base.seed = 73;
    spec.snr_points_db = {0, 6, 12};
    spec.protocols = {Protocol::switched_max_link, Protocol::max_link, Protocol::direct};
    const std::string once = to_csv(run_sweep(spec));
    const std::string again = to_csv(run_sweep(spec));
    spec.jobs = 3;
    const std::string parallel = to_csv(run_sweep(spec));
    report("determinism", once == again && once == parallel);
  }

  detail = parts;
  return ok;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<bool(std::string&)> run;
  };
  const std::vector<Criterion> criteria = {
      {"analytic SISO BER oracle", analytic_siso_oracle},
      {"noise-free delivery", noise_free_delivery},
      {"metric difference-pattern oracle", metric_oracle},
      {"protocol ordering, M=2, 0-8 dB", protocol_ordering},
      {"max-link/direct crossover, M=3", crossover},
      {"antenna trend at 8 dB", antenna_trend},
      {"structural property suite", structural_suite},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = criteria[i].run(detail);
    } catch (const std::exception& e) {
      detail = fmt("exception: %s", e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %zu. %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", i + 1, criteria[i].name,
                secs, detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
