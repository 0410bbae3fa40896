#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "deobs/buffer_file.hpp"
#include "deobs/synthetic.hpp"
#include "deobs/trace_io.hpp"

using namespace deobs;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

/// Value of a CSV report column.
std::string column(const std::string& csv, const std::string& name) {
  std::istringstream in(csv);
  std::string header, values;
  std::getline(in, header);
  std::getline(in, values);
  std::istringstream hs(header), vs(values);
  std::string h, v;
  while (std::getline(hs, h, ',') && std::getline(vs, v, ',')) {
    if (h == name) return v;
  }
  FAIL("missing column " << name);
  return {};
}

/// Factor column of the theory CSV row for (f, phi).
double theory_factor(const std::string& f, const std::string& phi) {
  const auto r = run({"theory", "--f", f, "--phi", phi, "--format", "csv"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "f,phi,n,factor,simplified_factor");
  std::getline(in, line);
  std::istringstream row(line);
  std::string cell;
  for (int k = 0; k < 4; ++k) std::getline(row, cell, ',');
  return std::stod(cell);
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("deobs_cli_" + std::to_string(counter_++))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

}  // namespace

TEST_CASE("theory reproduces the operating points") {
  CHECK(theory_factor("4", "0.05") == doctest::Approx(9.92).epsilon(0.005));
  CHECK(theory_factor("10", "0.25") == doctest::Approx(9.93).epsilon(0.005));
  CHECK(theory_factor("4", "0.0") == doctest::Approx(15.80).epsilon(0.001));
  const auto grid = run({"theory", "--f", "4,10", "--phi", "0,0.05,0.25"});
  CHECK(grid.code == 0);
  CHECK(run({"theory", "--f", "0", "--phi", "0.1"}).code == cli::kExitUsage);
  CHECK(run({"theory", "--f", "4", "--phi", "1.5"}).code == cli::kExitUsage);
}

TEST_CASE("gen, compress and report") {
  TempDir dir;
  const auto trace = dir.file("static.tr");
  auto r = run({"gen", "static", "--frames", "1000", "--out", trace});
  REQUIRE(r.code == 0);
  CHECK(read_trace_file(trace).frames.size() == 1000);

  r = run({"compress", "--trace", trace, "--out", dir.file("full.bf"), "--f", "4",
           "--mode", "full", "--format", "csv"});
  REQUIRE(r.code == 0);
  const double full = std::stod(column(r.out, "factor"));
  CHECK(full >= 15.5);
  CHECK(full <= 15.81);
  CHECK(load_buffer(dir.file("full.bf")).store().head() == 1000);

  r = run({"compress", "--trace", trace, "--out", dir.file("half.bf"), "--mode", "half",
           "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(std::stod(column(r.out, "factor")) == doctest::Approx(3.991).epsilon(0.001));

  r = run({"compress", "--trace", trace, "--out", dir.file("none.bf"), "--mode", "none",
           "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(std::stod(column(r.out, "factor")) == 1.0);
}

TEST_CASE("drift traces compress far below five percent density") {
  TempDir dir;
  const auto trace = dir.file("drift.tr");
  REQUIRE(run({"gen", "drift", "--blob", "5", "--frames", "1000", "--out", trace}).code == 0);
  const auto r = run({"compress", "--trace", trace, "--out", dir.file("d.bf"), "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(std::stod(column(r.out, "phi")) < 0.05);
  CHECK(std::stod(column(r.out, "factor")) > 10.0);
}

TEST_CASE("gen is deterministic") {
  TempDir dir;
  const std::vector<std::string> base{"gen", "noise", "--rho", "0.5", "--frames", "50",
                                      "--seed", "7", "--out"};
  auto a = base;
  a.push_back(dir.file("a.tr"));
  auto b = base;
  b.push_back(dir.file("b.tr"));
  REQUIRE(run(a).code == 0);
  REQUIRE(run(b).code == 0);
  CHECK(read_file_bytes(dir.file("a.tr")) == read_file_bytes(dir.file("b.tr")));
}

TEST_CASE("verify passes on generated traces and catches corrupted buffers") {
  TempDir dir;
  const auto trace = dir.file("ep.tr");
  REQUIRE(run({"gen", "episodic", "--frames", "400", "--min-episode", "5", "--max-episode",
               "50", "--rho", "0.3", "--out", trace})
              .code == 0);
  for (const std::string mode : {"full", "half", "none"}) {
    for (const std::string f : {"1", "3", "4"}) {
      CHECK(run({"verify", "--trace", trace, "--mode", mode, "--f", f}).code == 0);
      CHECK(run({"verify", "--trace", trace, "--mode", mode, "--f", f, "--capacity", "60"})
                .code == 0);
    }
  }

  const auto buffer = dir.file("ep.bf");
  REQUIRE(run({"compress", "--trace", trace, "--out", buffer}).code == 0);
  CHECK(run({"verify", "--trace", trace, "--buffer", buffer}).code == 0);

  // Flip one pixel of keyframe slot 3 (steps 12..15).
  auto bytes = read_file_bytes(buffer);
  bytes[40 + 3 * 7056 + 100] ^= 0x01;
  write_file_bytes(buffer, bytes);
  const auto r = run({"verify", "--trace", trace, "--buffer", buffer});
  CHECK(r.code == cli::kExitMismatch);
  CHECK(r.out.find("divergence at step 12") != std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
  TempDir dir;
  const auto empty = dir.file("empty.tr");
  write_file_bytes(empty, std::vector<std::uint8_t>{});
  CHECK(run({"verify", "--trace", empty}).code == cli::kExitUsage);
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run({"compress", "--trace", dir.file("missing.tr"), "--out", dir.file("x.bf")}).code ==
        cli::kExitUsage);
  CHECK(run({"compress", "--trace", empty, "--out", dir.file("x.bf"), "--mode", "zip"}).code ==
        cli::kExitUsage);
  CHECK(run({"help"}).code == cli::kExitUsage);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("bench runs and full matches none") {
  TempDir dir;
  const auto trace = dir.file("drift.tr");
  REQUIRE(run({"gen", "drift", "--frames", "2000", "--out", trace}).code == 0);
  const auto full = run({"bench", "--trace", trace, "--mode", "full", "--batches", "50",
                         "--seed", "3", "--format", "csv"});
  const auto none = run({"bench", "--trace", trace, "--mode", "none", "--batches", "50",
                         "--seed", "3", "--format", "csv"});
  REQUIRE(full.code == 0);
  REQUIRE(none.code == 0);
  CHECK(column(full.out, "checksum") == column(none.out, "checksum"));
  CHECK(std::stod(column(full.out, "append_ops_per_sec")) > 0);
  CHECK(std::stod(column(full.out, "get_ops_per_sec")) > 0);
  CHECK(std::stod(column(full.out, "sample_batches_per_sec")) > 0);
  CHECK(run({"bench", "--trace", trace, "--batch", "0"}).code == cli::kExitUsage);
}
