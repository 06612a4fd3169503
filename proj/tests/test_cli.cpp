#include <doctest.h>

#include <sstream>

#include "gltforge/experiment.hpp"
#include "gltforge/sweep.hpp"

using namespace gltforge;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string log;
};

Run run(const Json& config, Overrides ov = {}) {
  std::ostringstream out, log;
  Run r;
  r.code = run_experiment(config, ov, out, log);
  r.out = out.str();
  r.log = log.str();
  return r;
}

std::vector<std::string> split_crlf(const std::string& s) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t end = s.find("\r\n", pos);
    if (end == std::string::npos) break;
    lines.push_back(s.substr(pos, end - pos));
    pos = end + 2;
  }
  return lines;
}

std::vector<Json> jsonl(const std::string& s) {
  std::vector<Json> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) out.push_back(Json::parse(line));
  return out;
}

}  // namespace

TEST_CASE("config errors carry a JSON pointer and exit 2") {
  const Run empty = run(Json::object());
  CHECK(empty.code == kExitConfigError);
  CHECK(empty.log.find("/") != std::string::npos);
  CHECK(empty.log.find("kind") != std::string::npos);

  const Run bad_kind = run({{"kind", "nope"}});
  CHECK(bad_kind.code == kExitConfigError);
  CHECK(bad_kind.log.find("/kind") != std::string::npos);

  const Run nested = run({{"kind", "hk-verify"}, {"spec", "cubic-harmonic"}, {"points", {{{"u", {1.0}}, {"z", "x"}}}}});
  CHECK(nested.code == kExitConfigError);
  CHECK(nested.log.find("/points/0/z") != std::string::npos);

  const Run unknown = run({{"kind", "flow-run"}, {"flow", "eta2"}, {"bogus", 1}});
  CHECK(unknown.code == kExitConfigError);
  CHECK(unknown.log.find("bogus") != std::string::npos);

  CHECK_THROWS_AS(validate_experiment({{"kind", "flow-run"}}), Error);
  CHECK_NOTHROW(validate_experiment({{"kind", "flow-run"}, {"flow", "nahm"}}));
}

TEST_CASE("hk-verify on a cubic grid writes one CSV row per point") {
  const Run r = run({{"kind", "hk-verify"}, {"spec", "cubic-harmonic"}, {"grid", {3, 3}}});
  REQUIRE(r.code == kExitOk);
  const auto lines = split_crlf(r.out);
  CHECK(lines.size() == 10);
  CHECK(lines.front().rfind("index,", 0) == 0);
  CHECK(r.log.find("lambda") != std::string::npos);
}

TEST_CASE("flow-run keeps the eta^2 invariants") {
  const Run r = run({{"kind", "flow-run"}, {"flow", "eta2"}, {"n", 3}, {"s_span", {0.0, 0.1}}, {"tol", 1e-11}});
  REQUIRE(r.code == kExitOk);
  const auto lines = jsonl(r.out);
  REQUIRE(lines.size() >= 3);
  double worst = 0.0;
  for (const auto& l : lines)
    if (l.contains("invariant_drift")) worst = std::max(worst, l["invariant_drift"].get<double>());
  CHECK(worst < 1e-8);
  CHECK(lines.back()["end"] == true);
  CHECK(lines.back().contains("completed"));
}

TEST_CASE("runs are deterministic in the seed and the thread count") {
  const Json cfg = {{"kind", "flow-run"}, {"flow", "nahm"}, {"n", 2}, {"ensemble", 4}, {"s_span", {0.0, 0.05}}};
  const Run a = run(cfg, {std::nullopt, 1, std::nullopt});
  const Run b = run(cfg, {std::nullopt, 2, std::nullopt});
  const Run c = run(cfg, {std::uint64_t{99}, 1, std::nullopt});
  REQUIRE(a.code == kExitOk);
  CHECK(a.out == b.out);
  CHECK(a.out != c.out);
  CHECK(a.out == run(cfg).out);

  const Json hk = {{"kind", "hk-verify"}, {"spec", "flat-quartic"}, {"grid", {2, 2}}};
  CHECK(run(hk, {std::nullopt, 1, std::nullopt}).out == run(hk, {std::nullopt, 2, std::nullopt}).out);
}

TEST_CASE("CSV quoting and number fields") {
  CsvTable t({"a", "b,c"});
  t.add_row({"x\"y", "line\nbreak"});
  CHECK(t.str() == "a,\"b,c\"\r\n\"x\"\"y\",\"line\nbreak\"\r\n");
  CHECK(CsvTable::field(0.1) == "0.1");
  CHECK(CsvTable::field(-2.5e-20) == "-2.5e-20");
  CHECK(CsvTable::field(7L) == "7");
  CHECK_THROWS_AS(t.add_row({"only one"}), Error);
}

TEST_CASE("parallel sweeps match the serial reference") {
  auto f = [](std::size_t k) { return std::sin(static_cast<double>(k)) * static_cast<double>(k); };
  const auto s = sweep_serial(257, f);
  for (int threads : {1, 2, 3}) CHECK(sweep_parallel(257, f, threads) == s);
  // The first failing index is reported whatever the schedule.
  auto g = [](std::size_t k) -> double {
    if (k == 5 || k == 40) throw Error(ErrorKind::InvalidArgument, "at " + std::to_string(k));
    return 0.0;
  };
  try {
    sweep_parallel(64, g, 3);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("at 5") != std::string::npos);
  }
  CHECK(resolve_threads(4) == 4);
}

TEST_CASE("identity-suite passes") {
  const Run r = run({{"kind", "identity-suite"}, {"count", 10}, {"sizes", {2, 4}}});
  CHECK(r.code == kExitOk);
  CHECK(r.log.find("weinstein-aronszajn") != std::string::npos);
  CHECK(r.log.find("FAIL") == std::string::npos);
}

TEST_CASE("gz-analyze reports curves and intersection degrees") {
  const Run r = run({{"kind", "gz-analyze"}, {"random", {{"n", 3}, {"degree", 2}}}, {"samples", 8}});
  REQUIRE(r.code == kExitOk);
  const Json j = Json::parse(r.out);
  CHECK(j["kind"] == "gz-analyze");
  CHECK(j["curves"].is_array());
  CHECK(!j["intersections"].empty());
  for (const auto& x : j["intersections"]) CHECK(x["degree"].get<int>() <= x["bound"].get<int>());
}

TEST_CASE("glt-solve on a monopole fixture") {
  const Run r = run({{"kind", "glt-solve"}, {"spec", {{"name", "monopole"}, {"fixture_seed", 1}}}});
  REQUIRE(r.code == kExitOk);
  const Json j = Json::parse(r.out);
  REQUIRE(j["records"].size() == 1);
  CHECK(j["records"][0]["residual"].get<double>() < 1e-10);
  CHECK(j["records"][0]["iterations"].get<int>() == 0);
}

TEST_CASE("module errors exit 1 and name the point") {
  const Run r = run({{"kind", "glt-solve"}, {"spec", "cubic-harmonic"}, {"points", {{{"u", {-2.0}}, {"z", {0.0}}}}}});
  CHECK(r.code == kExitModuleError);
  CHECK(r.log.find("point 0") != std::string::npos);
}
