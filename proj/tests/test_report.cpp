#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ssf/errors.hpp"
#include "ssf/invariants.hpp"
#include "ssf/report.hpp"

using namespace ssf;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ErrorKind kind_of(const std::string& config) {
  try {
    parse_run_config(config);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("config was accepted: " << config);
  return ErrorKind::usage;
}

const char* kPt = R"({"potential": {"dim": 1, "family": "poschl_teller", "params": {"n": 1}}, )";

std::string pt_config(const std::string& tasks) { return std::string(kPt) + R"("tasks": )" + tasks + "}"; }

// Points SSF_LAB_OUTPUT_ROOT at a fresh directory for the lifetime of the guard.
struct OutputRoot {
  fs::path root;
  explicit OutputRoot(const std::string& name) : root(fs::temp_directory_path() / ("ssf_lab_test_" + name)) {
    fs::remove_all(root);
    setenv("SSF_LAB_OUTPUT_ROOT", root.c_str(), 1);
  }
  ~OutputRoot() {
    unsetenv("SSF_LAB_OUTPUT_ROOT");
    fs::remove_all(root);
  }
};

}  // namespace

TEST_CASE("schema violations are usage errors") {
  CHECK(kind_of("not json") == ErrorKind::usage);
  CHECK(kind_of("[]") == ErrorKind::usage);
  CHECK(kind_of(R"({"tasks": []})") == ErrorKind::usage);
  CHECK(kind_of(pt_config(R"([{"kind": "bogus"}])")) == ErrorKind::usage);
  CHECK(kind_of(pt_config(R"([{"kind": "identities", "tolerance": -1}])")) == ErrorKind::usage);
  CHECK(kind_of(pt_config(R"([{"kind": "identities", "tolerance": 0}])")) == ErrorKind::usage);
  CHECK(kind_of(pt_config(R"([{"kind": "identities", "colour": 1}])")) == ErrorKind::usage);
  CHECK(kind_of(pt_config(R"([{"kind": "ssf", "lambda_grid": []}])")) == ErrorKind::usage);
  CHECK(kind_of(pt_config(R"([{"kind": "ssf", "lambda_grid": [1, 0.5]}])")) == ErrorKind::usage);
  CHECK(kind_of(pt_config(R"([{"kind": "ssf", "lambda_grid": {"min": 1, "max": 10, "points": 0}}])")) == ErrorKind::usage);
  CHECK(kind_of(pt_config(R"([{"kind": "heat", "times": ["a"]}])")) == ErrorKind::usage);
  CHECK(kind_of(pt_config(R"([{"kind": "heat", "times": [0.2, 0.1]}])")) == ErrorKind::usage);
  CHECK(kind_of(pt_config(R"([{"kind": "invariants", "max_n": 6}])")) == ErrorKind::usage);
  CHECK(kind_of(pt_config(R"([{"kind": "resolvent", "points": [[1]]}])")) == ErrorKind::usage);
  CHECK(kind_of(R"({"potential": {"dim": 1}, "tasks": []})") == ErrorKind::usage);
  CHECK(kind_of(R"({"potential": {"dim": 4, "family": "zero"}, "tasks": []})") == ErrorKind::usage);
  CHECK(kind_of(R"({"potential": {"dim": 1, "family": "zero", "expression": "x"}, "tasks": []})") == ErrorKind::usage);
  CHECK(kind_of(R"({"potential": {"dim": 1, "family": "poschl_teller", "params": {"n": 1.5}}, "tasks": []})") ==
        ErrorKind::usage);
  CHECK(kind_of(R"({"potential": {"dim": 3, "family": "gaussian_well"}, "tasks": [{"kind": "identities", "half_orders": [0]}]})") ==
        ErrorKind::usage);
  CHECK(kind_of(pt_config(R"([{"kind": "levinson"}], "output": {"formats": ["pdf"]})")) == ErrorKind::usage);
}

TEST_CASE("defaults are filled in and visible in the parsed config") {
  RunConfig c = parse_run_config(pt_config(R"([{"kind": "identities"}, {"kind": "heat"}])"));
  REQUIRE(c.tasks.size() == 2);
  CHECK(c.tasks[0].params["tolerance"].get<double>() == 1e-4);
  CHECK(c.tasks[0].params["integer_orders"] == OrderedJson::array({1, 2}));
  CHECK(c.tasks[1].params["times"].size() == 3);
  CHECK(c.output_directory == "ssf-lab-output");
  CHECK(c.sha256 == sha256_hex(pt_config(R"([{"kind": "identities"}, {"kind": "heat"}])")));
}

TEST_CASE("sha256 of known strings") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("report numbers carry twelve significant digits") {
  CHECK(report_number(1.0 / 3.0).dump() == "0.333333333333");
  CHECK(report_number(-2.0).dump() == "-2.0");
  CHECK(report_number(std::nan("")).is_null());
  CHECK(report_number(HUGE_VAL).is_null());
}

TEST_CASE("output root override") {
  unsetenv("SSF_LAB_OUTPUT_ROOT");
  CHECK(resolve_output_directory("out") == fs::path("out"));
  setenv("SSF_LAB_OUTPUT_ROOT", "/tmp/root", 1);
  CHECK(resolve_output_directory("out") == fs::path("/tmp/root/out"));
  CHECK(resolve_output_directory("/abs/out") == fs::path("/tmp/root/out"));
  unsetenv("SSF_LAB_OUTPUT_ROOT");
}

TEST_CASE("invariant tables contain the canonical forms") {
  std::string text = invariant_tables_text(1, 2);
  CHECK(text.find(heat_invariant_closed(2, 1).to_string()) != std::string::npos);
  CHECK(text.find(xn(2, 1).to_string()) != std::string::npos);
  CHECK_THROWS_AS(invariant_tables_text(1, 6), Error);
  CHECK_THROWS_AS(invariant_tables_text(0, 2), Error);
}

TEST_CASE("zero potential check-all passes with vanishing residuals") {
  OutputRoot guard("zero");
  RunConfig c = parse_run_config(R"({"potential": {"dim": 1, "family": "zero"}, "tasks": [{"kind": "check-all"}]})");
  RunResult r = run(c);
  CHECK(r.exit_status == 0);
  for (const auto& t : r.tasks) {
    CHECK(t.pass);
    if (t.report.contains("identities"))
      for (const auto& id : t.report["identities"]) CHECK(id["residual"].get<double>() == 0.0);
  }
  CHECK(fs::exists(r.directory / "summary.json"));
}

TEST_CASE("reports are byte-identical across runs") {
  const std::string cfg = pt_config(R"([{"kind": "invariants", "max_n": 2}, {"kind": "ssf", "lambda_grid": {"min": 0.1, "max": 10, "points": 12}}, {"kind": "identities"}, {"kind": "birman_krein"}])");
  RunConfig c = parse_run_config(cfg);
  std::map<std::string, std::string> first;
  {
    OutputRoot guard("det_a");
    RunResult r = run(c);
    CHECK(r.exit_status == 0);
    for (const auto& e : fs::directory_iterator(r.directory)) first[e.path().filename().string()] = slurp(e.path());
  }
  OutputRoot guard("det_b");
  RunResult r = run(c);
  std::size_t compared = 0;
  for (const auto& e : fs::directory_iterator(r.directory)) {
    const std::string name = e.path().filename().string();
    REQUIRE(first.count(name) == 1);
    CHECK(first[name] == slurp(e.path()));
    ++compared;
  }
  CHECK(compared == first.size());
  CHECK(first.count("01_ssf.csv") == 1);
  const std::string csv = first["01_ssf.csv"];
  CHECK(csv.rfind("lambda [energy]", 0) == 0);
  CHECK(csv.find("\r\n") != std::string::npos);
  OrderedJson report = OrderedJson::parse(first["02_identities.json"]);
  CHECK(report["config_sha256"] == sha256_hex(cfg));
}

TEST_CASE("a failing check gives exit status 1 with a report") {
  OutputRoot guard("fail");
  // An absurd tolerance cannot be met.
  RunConfig c = parse_run_config(pt_config(R"([{"kind": "birman_krein", "tolerance": 1e-30}])"));
  RunResult r = run(c);
  CHECK(r.exit_status == 1);
  REQUIRE(r.tasks.size() == 1);
  CHECK_FALSE(r.tasks[0].pass);
  CHECK(fs::exists(r.directory / "00_birman_krein.json"));
}

TEST_CASE("plot data") {
  CHECK(parse_plot_kind("ssf") == PlotKind::ssf);
  CHECK_THROWS_AS(parse_plot_kind("pie"), Error);
  RunConfig c = parse_run_config(pt_config(R"([{"kind": "ssf", "lambda_grid": [0.5, 1.0, 2.0]}])"));
  std::string csv = plot_data_csv(PlotKind::ssf, c);
  CHECK(csv.rfind("lambda [energy],xi [count]\r\n", 0) == 0);
  std::istringstream rows(csv);
  std::string line;
  int count = 0;
  while (std::getline(rows, line)) ++count;
  CHECK(count == 4);
  CHECK(csv.find("1.000000000000e+00,-5.000000000") != std::string::npos);
  CHECK_THROWS_AS(plot_data_csv(PlotKind::phase_shifts, c), Error);
}
