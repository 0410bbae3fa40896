#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <utility>

#include "deobs/analytics.hpp"
#include "deobs/buffer_file.hpp"
#include "deobs/error.hpp"
#include "deobs/reference_store.hpp"
#include "deobs/replay_buffer.hpp"
#include "deobs/synthetic.hpp"
#include "deobs/trace_io.hpp"

namespace deobs::cli {

namespace {

using Clock = std::chrono::steady_clock;

struct StoreOptions {
  std::string trace_path;
  std::size_t frame_stack = 4;
  std::string mode = "full";
  std::size_t capacity = 0;
};

struct CommandOptions {
  StoreOptions store;
  std::string out_path;
  std::string buffer_path;
  std::string format = "human";
  std::size_t batch = 32;
  std::size_t batches = 1000;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> f_values;
  std::vector<double> phi_values;
  std::size_t side = 84;
  std::string gen_mode;
  GenParams gen;
};

/// Rows of (key, value) printed either as "key: value" lines or as a
/// two-line CSV with a header.
class Report {
 public:
  void add(std::string key, std::string value) {
    rows_.emplace_back(std::move(key), std::move(value));
  }
  void add(std::string key, double value) {
    std::ostringstream s;
    s << std::setprecision(10) << value;
    add(std::move(key), s.str());
  }
  void add(std::string key, std::uint64_t value) { add(std::move(key), std::to_string(value)); }

  void print(std::ostream& out, bool csv) const {
    if (csv) {
      for (std::size_t k = 0; k < rows_.size(); ++k) out << (k ? "," : "") << rows_[k].first;
      out << '\n';
      for (std::size_t k = 0; k < rows_.size(); ++k) out << (k ? "," : "") << rows_[k].second;
      out << '\n';
      return;
    }
    for (const auto& [key, value] : rows_) out << key << ": " << value << '\n';
  }

 private:
  std::vector<std::pair<std::string, std::string>> rows_;
};

StoreConfig store_config(const StoreOptions& opts, const Trace& trace) {
  StoreConfig config;
  config.frame_stack = opts.frame_stack;
  config.height = trace.height;
  config.width = trace.width;
  config.mode = *parse_storage_mode(opts.mode);
  const std::size_t f = opts.frame_stack;
  config.capacity_steps =
      opts.capacity ? opts.capacity : (trace.frames.size() + f - 1) / f * f;
  validate(config);
  return config;
}

/// Steps before an episode start are terminal; everything else carries no
/// action and zero reward.
ReplayBuffer fill_buffer(const Trace& trace, const StoreConfig& config) {
  ReplayBuffer buffer(config, 0);
  const auto starts = trace.start_flags();
  for (std::size_t k = 0; k < trace.frames.size(); ++k) {
    TransitionMeta meta;
    meta.done = k + 1 < trace.frames.size() && starts[k + 1];
    buffer.add(trace.frames[k], meta, starts[k]);
  }
  return buffer;
}

void add_stats(Report& report, const AnalyticsReport& stats) {
  report.add("mode", std::string(to_string(stats.mode)));
  report.add("f", stats.frame_stack);
  report.add("capacity", stats.capacity);
  report.add("steps", stats.steps_resident);
  report.add("uncompressed_bytes", stats.uncompressed_bytes);
  report.add("model_bytes", static_cast<std::uint64_t>(stats.model_bytes));
  report.add("factor", stats.factor);
  report.add("N", stats.sparse_entries);
  report.add("n", stats.mean_entries);
  report.add("phi", stats.phi);
}

int cmd_compress(const CommandOptions& opts, std::ostream& out) {
  const Trace trace = read_trace_file(opts.store.trace_path);
  const ReplayBuffer buffer = fill_buffer(trace, store_config(opts.store, trace));
  save_buffer(buffer, opts.out_path);
  Report report;
  add_stats(report, buffer.stats());
  report.print(out, opts.format == "csv");
  return kExitOk;
}

/// First readable step whose state differs between the two stores.
template <typename Store>
std::optional<StepIndex> first_divergence(const Store& store,
                                          const ReferenceStore& reference) {
  const auto range = store.valid_range();
  if (range != reference.valid_range()) return range ? range->lo : 0;
  if (!range) return std::nullopt;
  for (StepIndex i = range->lo; i <= range->hi; ++i) {
    if (store.get(i) != reference.get(i)) return i;
  }
  return std::nullopt;
}

int report_divergence(std::optional<StepIndex> step, std::ostream& out) {
  if (step) {
    out << "divergence at step " << *step << '\n';
    return kExitMismatch;
  }
  out << "ok\n";
  return kExitOk;
}

int cmd_verify(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  const Trace trace = read_trace_file(opts.store.trace_path);
  const auto starts = trace.start_flags();

  if (!opts.buffer_path.empty()) {
    std::optional<ReplayBuffer> loaded;
    try {
      loaded.emplace(load_buffer(opts.buffer_path));
    } catch (const Error& e) {
      err << "buffer unreadable: " << e.what() << '\n';
      return kExitMismatch;
    }
    const auto& config = loaded->config();
    if (config.height != trace.height || config.width != trace.width ||
        loaded->store().head() != trace.frames.size()) {
      err << "buffer does not hold this trace\n";
      return kExitMismatch;
    }
    auto reference = ReferenceStore::matching(config);
    for (std::size_t k = 0; k < trace.frames.size(); ++k) {
      reference.append(trace.frames[k], starts[k]);
    }
    try {
      return report_divergence(first_divergence(loaded->store(), reference), out);
    } catch (const Error& e) {
      err << "decode failed: " << e.what() << '\n';
      return kExitMismatch;
    }
  }

  const StoreConfig config = store_config(opts.store, trace);
  ObsStore store(config);
  auto reference = ReferenceStore::matching(config);
  for (std::size_t k = 0; k < trace.frames.size(); ++k) {
    const StepIndex i = store.append(trace.frames[k], starts[k]);
    reference.append(trace.frames[k], starts[k]);
    const auto range = store.valid_range();
    if (range != reference.valid_range()) return report_divergence(i, out);
    if (range && range->contains(i) && store.get(i) != reference.get(i)) {
      return report_divergence(i, out);
    }
  }
  return report_divergence(first_divergence(store, reference), out);
}

std::uint64_t fnv1a(std::uint64_t hash, std::span<const std::uint8_t> bytes) {
  for (const auto b : bytes) {
    hash ^= b;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

double per_second(std::uint64_t count, Clock::duration elapsed) {
  const double seconds = std::chrono::duration<double>(elapsed).count();
  return seconds > 0 ? static_cast<double>(count) / seconds : 0.0;
}

int cmd_bench(const CommandOptions& opts, std::ostream& out) {
  const Trace trace = read_trace_file(opts.store.trace_path);
  const StoreConfig config = store_config(opts.store, trace);
  const auto wall_start = Clock::now();

  auto t0 = Clock::now();
  const ReplayBuffer buffer = fill_buffer(trace, config);
  const auto append_time = Clock::now() - t0;

  std::uint64_t checksum = 0xcbf29ce484222325ull;
  std::uint64_t gets = 0;
  t0 = Clock::now();
  if (const auto range = buffer.valid_range()) {
    for (StepIndex i = range->lo; i <= range->hi; ++i, ++gets) {
      const State state = buffer.get(i);
      checksum = fnv1a(checksum, state.frames.back().pixels());
    }
  }
  const auto get_time = Clock::now() - t0;

  std::uint64_t sampled = 0;
  t0 = Clock::now();
  for (std::size_t k = 0; k < opts.batches; ++k) {
    try {
      const Batch batch = buffer.sample_transitions(opts.batch, opts.seed + k);
      checksum = fnv1a(checksum, batch.packed_states());
      checksum = fnv1a(checksum, batch.packed_next_states());
      checksum = fnv1a(checksum, batch.dones);
      ++sampled;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoValidTransitions) throw;
      break;
    }
  }
  const auto sample_time = Clock::now() - t0;

  Report report;
  report.add("mode", opts.store.mode);
  report.add("frames", static_cast<std::uint64_t>(trace.frames.size()));
  report.add("append_ops_per_sec", per_second(trace.frames.size(), append_time));
  report.add("get_ops_per_sec", per_second(gets, get_time));
  report.add("sample_batches_per_sec", per_second(sampled, sample_time));
  report.add("wall_seconds",
             std::chrono::duration<double>(Clock::now() - wall_start).count());
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << checksum;
  report.add("checksum", hex.str());
  report.print(out, opts.format == "csv");
  return kExitOk;
}

int cmd_theory(const CommandOptions& opts, std::ostream& out) {
  const std::uint64_t pixels = opts.side * opts.side;
  const SweepTable table = sweep(opts.f_values, opts.phi_values, pixels);
  const bool csv = opts.format == "csv";
  const bool closed_form = opts.side == 84;
  if (csv) {
    out << "f,phi,n,factor,simplified_factor\n";
  } else {
    out << std::setw(6) << "f" << std::setw(10) << "phi" << std::setw(12) << "n"
        << std::setw(12) << "factor" << std::setw(14) << "simplified" << '\n';
  }
  out << std::fixed;
  for (std::size_t row = 0; row < table.frame_stacks.size(); ++row) {
    for (std::size_t col = 0; col < table.phis.size(); ++col) {
      const auto f = table.frame_stacks[row];
      const double phi = table.phis[col];
      const double n = phi * static_cast<double>(pixels);
      const double factor = table.factors[row][col];
      std::ostringstream simplified;
      simplified << std::fixed << std::setprecision(6);
      if (closed_form) simplified << simplified_factor(static_cast<double>(f), n);
      if (csv) {
        out << f << ',' << std::setprecision(6) << phi << ',' << n << ','
            << factor << ',' << simplified.str() << '\n';
      } else {
        out << std::setw(6) << f << std::setprecision(4) << std::setw(10) << phi
            << std::setprecision(1) << std::setw(12) << n << std::setprecision(4)
            << std::setw(12) << factor << std::setw(14) << simplified.str() << '\n';
      }
    }
  }
  return kExitOk;
}

int cmd_gen(const CommandOptions& opts, std::ostream& out) {
  const GenMode mode = *parse_gen_mode(opts.gen_mode);
  const Trace trace = generate(mode, opts.gen, opts.seed);
  write_trace_file(trace, opts.out_path);
  Report report;
  report.add("mode", opts.gen_mode);
  report.add("frames", static_cast<std::uint64_t>(trace.frames.size()));
  report.add("episodes", static_cast<std::uint64_t>(trace.episode_starts.size()));
  report.add("expected_change_density", expected_change_density(mode, opts.gen));
  report.add("measured_change_density", measured_change_density(trace));
  report.print(out, opts.format == "csv");
  return kExitOk;
}

void add_store_flags(CLI::App* cmd, StoreOptions& opts) {
  cmd->add_option("--trace", opts.trace_path, "Input trace file")->required();
  cmd->add_option("--f", opts.frame_stack, "Frame stack length")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 16));
  cmd->add_option("--mode", opts.mode, "Storage mode")
      ->check(CLI::IsMember({"full", "half", "none"}));
  cmd->add_option("--capacity", opts.capacity,
                  "Capacity in steps (default: trace length rounded up to f)");
}

void add_format_flag(CLI::App* cmd, std::string& format) {
  cmd->add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"human", "csv"}));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lossless compressed storage for stacked image observations", "deobs"};
  app.require_subcommand(1);
  CommandOptions opts;

  auto* compress = app.add_subcommand("compress", "Compress a trace into a buffer file");
  add_store_flags(compress, opts.store);
  compress->add_option("--out", opts.out_path, "Output buffer file")->required();
  add_format_flag(compress, opts.format);

  auto* verify = app.add_subcommand(
      "verify", "Check compressed states against an uncompressed replay of a trace");
  add_store_flags(verify, opts.store);
  verify->add_option("--buffer", opts.buffer_path,
                     "Check this buffer file instead of compressing the trace");

  auto* bench = app.add_subcommand("bench", "Measure append, get and sampling throughput");
  add_store_flags(bench, opts.store);
  bench->add_option("--batch", opts.batch, "Sample batch size")
      ->check(CLI::PositiveNumber);
  bench->add_option("--batches", opts.batches, "Number of sampled batches");
  bench->add_option("--seed", opts.seed, "Sampling seed");
  add_format_flag(bench, opts.format);

  auto* theory = app.add_subcommand("theory", "Tabulate the model compression factor");
  theory->add_option("--f", opts.f_values, "Frame stack lengths")
      ->required()
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  theory->add_option("--phi", opts.phi_values, "Remaining pixel fractions")
      ->required()
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0));
  theory->add_option("--side", opts.side, "Image side length")
      ->check(CLI::Range(std::size_t{1}, kMaxSide));
  add_format_flag(theory, opts.format);

  auto* gen = app.add_subcommand("gen", "Generate a synthetic trace");
  gen->add_option("mode", opts.gen_mode, "static | drift | noise | episodic")
      ->required()
      ->check(CLI::IsMember({"static", "drift", "noise", "episodic"}));
  gen->add_option("--frames", opts.gen.frames)->check(CLI::PositiveNumber);
  gen->add_option("--height", opts.gen.height);
  gen->add_option("--width", opts.gen.width);
  gen->add_option("--blob", opts.gen.blob, "Drift blob side");
  gen->add_option("--vx", opts.gen.velocity_x, "Drift velocity, columns per step");
  gen->add_option("--vy", opts.gen.velocity_y, "Drift velocity, rows per step");
  gen->add_option("--rho", opts.gen.rho, "Noise change probability")
      ->check(CLI::Range(0.0, 1.0));
  gen->add_option("--min-episode", opts.gen.min_episode);
  gen->add_option("--max-episode", opts.gen.max_episode);
  gen->add_option("--seed", opts.seed);
  gen->add_option("--out", opts.out_path, "Output trace file")->required();
  add_format_flag(gen, opts.format);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (compress->parsed()) return cmd_compress(opts, out);
    if (verify->parsed()) return cmd_verify(opts, out, err);
    if (bench->parsed()) return cmd_bench(opts, out);
    if (theory->parsed()) return cmd_theory(opts, out);
    if (gen->parsed()) return cmd_gen(opts, out);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace deobs::cli
