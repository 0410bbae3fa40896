// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "deobs/analytics.hpp"
#include "deobs/buffer_file.hpp"
#include "deobs/error.hpp"
#include "deobs/obs_store.hpp"
#include "deobs/replay_buffer.hpp"
#include "deobs/synthetic.hpp"
#include "deobs/trace_io.hpp"
#include "oracles.hpp"

using namespace deobs;
using deobs::testing::HistoryOracle;
using deobs::testing::NaiveReplay;
using deobs::testing::oracle_payload_bytes;

namespace {

struct Failure {
  std::string what;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

/// Episodic Static/Drift/Noise segments with episode breaks drawn
/// independently of the segment boundaries.
Trace mixed_trace(std::size_t frames, std::size_t side, std::uint64_t seed) {
  GenParams p;
  p.frames = frames;
  p.height = side;
  p.width = side;
  p.min_episode = 20;
  p.max_episode = 400;
  p.rho = 0.05;
  Trace trace = generate(GenMode::kEpisodic, p, seed);
  std::mt19937_64 rng(seed ^ 0x5eed);
  const auto segment_starts = trace.start_flags();
  trace.episode_starts = {0};
  for (std::size_t k = 1; k < frames; ++k) {
    const bool at_segment = segment_starts[k] && rng() % 2 == 0;
    if (at_segment || rng() % 150 == 0) trace.episode_starts.push_back(k);
  }
  return trace;
}

// 1: every readable state equals the uncompressed history.
std::string losslessness() {
  const Trace trace = mixed_trace(10000, 84, 1);
  const auto starts = trace.start_flags();
  std::uint64_t checked = 0;
  for (const auto mode : {StorageMode::kFull, StorageMode::kHalf}) {
    for (const std::size_t f : {1u, 3u, 4u, 10u}) {
      for (const std::size_t capacity : {1980u, 10020u}) {
        const StoreConfig config{capacity, f, 84, 84, mode};
        ObsStore store(config);
        HistoryOracle oracle(f);
        for (std::size_t k = 0; k < trace.frames.size(); ++k) {
          store.append(trace.frames[k], starts[k]);
          oracle.append(trace.frames[k], starts[k]);
          const auto range = store.valid_range();
          require(range == oracle.window(config), "valid range differs at step " +
                                                      std::to_string(k));
          if (!range) continue;
          // Newest step now, the whole window every half capacity and at the end.
          const bool sweep = k % (capacity / 2) == 0 || k + 1 == trace.frames.size();
          for (auto i = sweep ? range->lo : range->hi; i <= range->hi; ++i, ++checked) {
            require(store.get(i) == oracle.state(i),
                    std::string(to_string(mode)) + " f=" + std::to_string(f) +
                        " step " + std::to_string(i) + " differs");
          }
        }
      }
    }
  }
  return std::to_string(checked) + " states bit-exact";
}

// 2: memory_bytes equals the closed form with live N.
std::string memory_accounting() {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t f = 1 + rng() % 10;
    const std::size_t d = 1 + rng() % 30;
    const std::size_t side = 8 + rng() % 77;
    const StoreConfig config{d * f, f, side, side, StorageMode::kFull};
    ObsStore store(config);
    HistoryOracle oracle(f);
    GenParams p;
    p.frames = 1 + rng() % (3 * d * f + 10);
    p.height = p.width = side;
    p.blob = 1 + rng() % 6;
    p.rho = static_cast<double>(rng() % 100) / 200.0;
    p.min_episode = 1 + rng() % 10;
    p.max_episode = p.min_episode + rng() % 50;
    const Trace trace = generate(GenMode::kEpisodic, p, rng());
    const auto starts = trace.start_flags();
    for (std::size_t k = 0; k < trace.frames.size(); ++k) {
      store.append(trace.frames[k], starts[k]);
      oracle.append(trace.frames[k], starts[k]);
    }
    const std::uint64_t pixels = side * side;
    const std::uint64_t expected = pixels * d + 8 * d * (f - 1) +
                                   oracle_payload_bytes(oracle, config) +
                                   4 * config.capacity_steps * f;
    require(store.memory_bytes().total_bytes == expected,
            "trial " + std::to_string(trial) + ": " +
                std::to_string(store.memory_bytes().total_bytes) +
                " != " + std::to_string(expected));
  }
  return "100 configs exact";
}

// 3: model factor at (f=4, phi=0.05) and (f=10, phi=0.25).
std::string operating_points() {
  const std::vector<std::uint64_t> fs{4, 10};
  const std::vector<double> phis{0.05, 0.25};
  const SweepTable table = sweep(fs, phis, 7056);
  const double a = table.factors[0][0];
  const double b = table.factors[1][1];
  require(std::abs(a - 9.92) <= 0.05, "f=4 phi=0.05 gives " + fmt(a));
  require(std::abs(b - 9.93) <= 0.05, "f=10 phi=0.25 gives " + fmt(b));
  require(std::lround(a) == 10 && std::lround(b) == 10, "not an order of magnitude");
  return "f=4: " + fmt(a) + ", f=10: " + fmt(b);
}

// 4: static trace stays at the N = 0 ceiling.
std::string ceiling() {
  GenParams p;
  p.frames = 1000;
  const Trace trace = generate(GenMode::kStatic, p, 4);
  ReplayBuffer buffer(StoreConfig{1000, 4, 84, 84, StorageMode::kFull}, 0);
  double highest = 0;
  for (std::size_t k = 0; k < trace.frames.size(); ++k) {
    buffer.add(trace.frames[k], {}, k == 0);
    highest = std::max(highest, buffer.stats().factor);
  }
  const double factor = buffer.stats().factor;
  require(factor >= 15.5 && factor <= 15.81, "factor " + fmt(factor));
  require(highest <= 15.81, "factor reached " + fmt(highest));
  return "factor " + fmt(factor);
}

// 5: indexing-only factor.
std::string half_mode() {
  GenParams p;
  p.frames = 1000;
  const Trace trace = generate(GenMode::kDrift, p, 5);
  ReplayBuffer buffer(StoreConfig{1000, 4, 84, 84, StorageMode::kHalf}, 0);
  for (std::size_t k = 0; k < trace.frames.size(); ++k) buffer.add(trace.frames[k], {}, k == 0);
  const double factor = buffer.stats().factor;
  require(std::abs(factor - 3.991) <= 0.01, "factor " + fmt(factor));
  return "factor " + fmt(factor);
}

// 6: all-noise trace degrades to dense records plus fixed overhead only.
std::string adversarial() {
  GenParams p;
  p.frames = 1000;
  p.rho = 1.0;
  const Trace trace = generate(GenMode::kNoise, p, 6);
  const StoreConfig config{1000, 4, 84, 84, StorageMode::kFull};
  ReplayBuffer buffer(config, 0);
  for (std::size_t k = 0; k < trace.frames.size(); ++k) buffer.add(trace.frames[k], {}, k == 0);
  const auto& store = buffer.store();
  for (const auto& slot : store.diff_slots()) {
    require(slot && !slot->is_sparse(), "a diff slot is not dense");
  }
  const std::uint64_t d = 250, f = 4, pixels = 7056;
  const std::uint64_t uncompressed = pixels * 1000 * f;
  const std::uint64_t bound = uncompressed + 8 * d * (f - 1) + 4 * 1000 * f;
  const std::uint64_t predicted = pixels * d + 8 * d * (f - 1) + pixels * d * (f - 1) + 4 * 1000 * f;
  const auto total = store.memory_bytes().total_bytes;
  require(total <= bound, "total " + std::to_string(total) + " above bound");
  require(total == predicted, "total " + std::to_string(total) + " != " + std::to_string(predicted));
  const double factor = buffer.stats().factor;
  require(factor == static_cast<double>(uncompressed) / static_cast<double>(predicted),
          "measured factor differs from prediction");
  return std::to_string(store.dense_records()) + " dense records, " + std::to_string(total) +
         " bytes";
}

// 7: compressed and naive buffers sample identical batches.
std::string sampling_equivalence() {
  const Trace trace = mixed_trace(3000, 32, 7);
  const auto starts = trace.start_flags();
  std::mt19937_64 rng(7);
  std::uint64_t draws = 0;
  for (const auto mode : {StorageMode::kFull, StorageMode::kHalf}) {
    const StoreConfig config{1200, 4, 32, 32, mode};
    ReplayBuffer buffer(config, 2);
    NaiveReplay naive(config, 2);
    for (std::size_t k = 0; k < trace.frames.size(); ++k) {
      const bool terminal = k + 1 < trace.frames.size() && starts[k + 1] && rng() % 3 != 0;
      const TransitionMeta meta{{static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(k)},
                                static_cast<double>(rng() % 1000) / 10.0, terminal};
      buffer.add(trace.frames[k], meta, starts[k]);
      naive.add(trace.frames[k], meta, starts[k]);
    }
    for (std::uint64_t seed = 0; seed < 500; ++seed, draws += 2) {
      require(buffer.sample_states(8, seed) == naive.sample_states(8, seed),
              "sample_states differs for seed " + std::to_string(seed));
      require(buffer.sample_transitions(8, seed) == naive.sample_transitions(8, seed),
              "sample_transitions differs for seed " + std::to_string(seed));
    }
  }
  return std::to_string(draws) + " batches identical";
}

// 8: trace and buffer files roundtrip bit-exactly and canonically.
std::string roundtrips() {
  const Trace trace = mixed_trace(1500, 40, 8);
  const auto trace_bytes = encode_trace(trace);
  require(decode_trace(trace_bytes) == trace, "trace decode differs");
  require(encode_trace(decode_trace(trace_bytes)) == trace_bytes, "trace bytes differ");

  const auto starts = trace.start_flags();
  for (const auto mode : {StorageMode::kFull, StorageMode::kHalf, StorageMode::kNone}) {
    const auto build = [&] {
      ReplayBuffer buffer(StoreConfig{800, 4, 40, 40, mode}, 1);
      for (std::size_t k = 0; k < trace.frames.size(); ++k) {
        buffer.add(trace.frames[k], {{static_cast<std::uint8_t>(k)}, 0.5 * k, false}, starts[k]);
      }
      return buffer;
    };
    const ReplayBuffer a = build();
    const auto bytes = serialize_buffer(a);
    require(serialize_buffer(build()) == bytes, "same history, different bytes");
    const ReplayBuffer b = deserialize_buffer(bytes);
    require(serialize_buffer(b) == bytes, "reserialized bytes differ");
    require(a.valid_range() == b.valid_range(), "valid range differs after load");
    require(a.store().memory_bytes() == b.store().memory_bytes(), "memory differs after load");
    for (auto i = a.valid_range()->lo; i <= a.valid_range()->hi; ++i) {
      require(a.get(i) == b.get(i), "state differs after load");
    }
    require(a.sample_transitions(32, 1) == b.sample_transitions(32, 1),
            "sampling differs after load");
  }
  return "trace and 3 buffer modes canonical";
}

// 9: closed form differs from the exact factor by the dropped index term.
std::string closed_form_gap() {
  const double exact = compression_factor(7056, 1000, 4, 0.0);
  const double closed = simplified_factor(4, 0);
  require(exact != closed, "closed form unexpectedly equals exact factor");
  const double gap = 1764.0 * 4 / exact - 1764.0 * 4 / closed;
  require(std::abs(gap - 4.0) < 1e-9, "denominator gap " + fmt(gap) + " != f");
  return "exact " + fmt(exact) + ", closed form " + fmt(closed) + ", gap " + fmt(gap);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<std::string()>>> criteria{
      {"1 losslessness vs uncompressed oracle", losslessness},
      {"2 memory model with live N", memory_accounting},
      {"3 operating points f=4/phi=0.05, f=10/phi=0.25", operating_points},
      {"4 static-trace ceiling", ceiling},
      {"5 half-mode factor", half_mode},
      {"6 all-noise overhead bound", adversarial},
      {"7 sampling equivalence with naive buffer", sampling_equivalence},
      {"8 file format roundtrips", roundtrips},
      {"9 closed-form discrepancy", closed_form_gap},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      detail = check();
      ok = true;
    } catch (const Failure& f) {
      detail = f.what;
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %s: %s (%.2fs)\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str(),
                secs);
    failures += !ok;
  }
  return failures == 0 ? 0 : 1;
}
