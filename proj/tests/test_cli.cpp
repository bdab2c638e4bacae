#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "privmarket/privmarket.hpp"
#include "test_config.hpp"

using namespace privmarket;
using Catch::Matchers::ContainsSubstring;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  std::string cmd = std::string(PRIVMARKET_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string scenario(const std::string& name) {
  return std::string(PRIVMARKET_SCENARIO_DIR) + "/" + name;
}

std::string tmp_path(const std::string& name) {
  std::filesystem::create_directories(PRIVMARKET_TEST_TMP_DIR);
  return std::string(PRIVMARKET_TEST_TMP_DIR) + "/" + name;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

MarketScenario triopoly() {
  return load_scenario_file(scenario("triopoly.json")).scenario;
}

}  // namespace

TEST_CASE("cli pce prints the competitive equilibrium") {
  CliResult r = run_cli("pce --scenario " + scenario("triopoly.json"));
  CHECK(r.code == 0);
  CHECK_THAT(r.out, ContainsSubstring("kind: PCE\n"));
  CHECK_THAT(r.out, ContainsSubstring("price: 0.105714285714\n"));
  CHECK_THAT(r.out, ContainsSubstring("total_cost: 0.205714285714\n"));
  CHECK_THAT(r.out, ContainsSubstring("participants: 1 3\n"));
  CHECK_THAT(r.out, ContainsSubstring("kkt_pass: true\n"));
  CHECK_THAT(r.out, ContainsSubstring("holder 1: label=A a=0.1 h=0.002 q=1.42857142857 "
                                      "b=13.5135135135 net_revenue=0.00408163265306\n"));
  CHECK_THAT(r.out, ContainsSubstring("holder 2: label=B a=0.2 h=0.005 q=0 b=0 "
                                      "net_revenue=0\n"));
}

TEST_CASE("cli one prints the strategic equilibrium") {
  CliResult r = run_cli("one --scenario " + scenario("triopoly.json"));
  CHECK(r.code == 0);
  CHECK_THAT(r.out, ContainsSubstring("kind: ONE\n"));
  CHECK_THAT(r.out, ContainsSubstring("price: 0.287686801539\n"));
  CHECK_THAT(r.out, ContainsSubstring("participants: 1 2 3\n"));
  CHECK_THAT(r.out, ContainsSubstring("kkt_pass: true\n"));
}

TEST_CASE("cli output is deterministic across runs") {
  std::string args = "pce --scenario " + scenario("triopoly.json");
  CHECK(run_cli(args).out == run_cli(args).out);
}

TEST_CASE("cli one refuses markets with too few holders") {
  CliResult r = run_cli("one --scenario " + scenario("duopoly.json"));
  CHECK(r.code == 3);
  CHECK_THAT(r.out, ContainsSubstring(
                        "no oligopolistic Nash equilibrium exists for two holders"));
}

TEST_CASE("cli rejects malformed scenario files with exit 2") {
  std::string bad = tmp_path("bad.json");
  {
    std::ofstream out(bad, std::ios::binary);
    out << R"({"demand": 1, "holders": [{"a": 0, "h": 1}], "wat": 3})";
  }
  CliResult r = run_cli("pce --scenario " + bad);
  CHECK(r.code == 2);
  CHECK_THAT(r.out, ContainsSubstring("unknown key \"wat\""));

  std::string flat = tmp_path("flat.json");
  {
    std::ofstream out(flat, std::ios::binary);
    out << R"({"demand": 1, "holders": [{"a": 0.1, "h": 0}]})";
  }
  CliResult zero_h = run_cli("pce --scenario " + flat);
  CHECK(zero_h.code == 2);
  CHECK_THAT(zero_h.out, ContainsSubstring("holders[0].h"));
  CHECK_THAT(zero_h.out, ContainsSubstring("> 0"));

  CliResult missing = run_cli("pce --scenario " + tmp_path("nope.json"));
  CHECK(missing.code == 2);
  CHECK_THAT(missing.out, ContainsSubstring("cannot open file"));
}

TEST_CASE("cli one splits identical holders evenly") {
  CliResult r = run_cli("one --scenario " + scenario("symmetric4.json"));
  CHECK(r.code == 0);
  CHECK_THAT(r.out, ContainsSubstring("price: 0.156\n"));
  for (int i = 1; i <= 4; ++i)
    CHECK_THAT(r.out, ContainsSubstring("holder " + std::to_string(i) +
                                        ": a=0.1 h=0.002 q=1 b="));
}

TEST_CASE("cli poa on identical holders reports the clean ratios") {
  CliResult r = run_cli("poa --scenario " + scenario("symmetric4.json"));
  CHECK(r.code == 0);
  CHECK_THAT(r.out, ContainsSubstring("cost_ratio: 1\n"));
  CHECK_THAT(r.out, ContainsSubstring("price_ratio: 1.5\n"));
  CHECK_THAT(r.out, ContainsSubstring("price_bound: 1.5\n"));
  CHECK_THAT(r.out, ContainsSubstring("cost_bound: 1.5\n"));
}

TEST_CASE("cli requires its flags") {
  CliResult r = run_cli("pce");
  CHECK(r.code != 0);
  CHECK_THAT(r.out, ContainsSubstring("--scenario"));
}

TEST_CASE("cli simulate competitive mode converges and writes the trajectory") {
  std::string csv_path = tmp_path("traj_pce.csv");
  CliResult r = run_cli("simulate --scenario " + scenario("triopoly.json") +
                        " --out " + csv_path);
  CHECK(r.code == 0);
  CHECK_THAT(r.out, ContainsSubstring("mode: competitive\n"));
  CHECK_THAT(r.out, ContainsSubstring("p0: 0.2\n"));
  CHECK_THAT(r.out, ContainsSubstring("converged: true\n"));
  CHECK_THAT(r.out, ContainsSubstring("exact_price: 0.105714285714\n"));
  CHECK_THAT(r.out, ContainsSubstring("csv: " + csv_path + "\n"));

  MarketScenario s = triopoly();
  Trajectory traj = run_competitive_bidding(s, 0.2, recommend_step_size(s));
  CHECK(read_file(csv_path) == to_csv(traj));
  CHECK(std::fabs(traj.final_state.price - 0.10571428571428571) < 1e-6);
}

TEST_CASE("cli simulate oligopoly mode converges to the strategic price") {
  std::string csv_path = tmp_path("traj_one.csv");
  CliResult r = run_cli("simulate --scenario " + scenario("triopoly.json") +
                        " --mode oligopoly --out " + csv_path);
  CHECK(r.code == 0);
  CHECK_THAT(r.out, ContainsSubstring("mode: oligopoly\n"));
  CHECK_THAT(r.out, ContainsSubstring("converged: true\n"));
  CHECK_THAT(r.out, ContainsSubstring("exact_price: 0.287686801539\n"));

  MarketScenario s = triopoly();
  Trajectory traj = run_oligopoly_bidding(s, 0.2, recommend_step_size(s));
  CHECK(read_file(csv_path) == to_csv(traj));

  std::string again = tmp_path("traj_one_again.csv");
  CliResult r2 = run_cli("simulate --scenario " + scenario("triopoly.json") +
                         " --mode oligopoly --out " + again);
  CHECK(r2.code == 0);
  CHECK(read_file(again) == read_file(csv_path));
}

TEST_CASE("cli simulate reports divergence with exit 4") {
  double wild = 1000.0 * recommend_step_size(triopoly());
  char step[64];
  std::snprintf(step, sizeof step, "%.12g", wild);
  CliResult r = run_cli("simulate --scenario " + scenario("triopoly.json") +
                        " --out " + tmp_path("traj_diverged.csv") +
                        " --step-size " + step);
  CHECK(r.code == 4);
  CHECK_THAT(r.out, ContainsSubstring("diverged"));
}

TEST_CASE("cli simulate honors the tolerance flag") {
  std::string loose_path = tmp_path("traj_loose.csv");
  std::string tight_path = tmp_path("traj_tight.csv");
  CliResult loose = run_cli("simulate --scenario " + scenario("triopoly.json") +
                            " --out " + loose_path + " --tol 1e-3");
  CliResult tight = run_cli("simulate --scenario " + scenario("triopoly.json") +
                            " --out " + tight_path + " --tol 1e-10");
  CHECK(loose.code == 0);
  CHECK(tight.code == 0);
  auto count_lines = [](const std::string& text) {
    return std::count(text.begin(), text.end(), '\n');
  };
  CHECK(count_lines(read_file(loose_path)) < count_lines(read_file(tight_path)));
}

TEST_CASE("cli sweep writes the worst-case table") {
  std::string csv_path = tmp_path("sweep.csv");
  CliResult r = run_cli("sweep --r 1 10 100 --out " + csv_path);
  CHECK(r.code == 0);
  CHECK_THAT(r.out, ContainsSubstring("wrote " + csv_path + " (3 rows)"));

  const std::vector<double> rs = {1.0, 10.0, 100.0};
  CHECK(read_file(csv_path) == to_csv(poa_sweep(rs, 1.0, 1.0)));

  CliResult scaled = run_cli("sweep --r 1 10 --scale 2 --demand 3 --out " +
                             tmp_path("sweep_scaled.csv"));
  CHECK(scaled.code == 0);
  const std::vector<double> rs2 = {1.0, 10.0};
  CHECK(read_file(tmp_path("sweep_scaled.csv")) == to_csv(poa_sweep(rs2, 2.0, 3.0)));

  CliResult bad = run_cli("sweep --r 10 1 --out " + tmp_path("sweep_bad.csv"));
  CHECK(bad.code == 2);
  CHECK_THAT(bad.out, ContainsSubstring("strictly increasing"));
}

TEST_CASE("cli poa prints the efficiency report") {
  CliResult r = run_cli("poa --scenario " + scenario("triopoly.json"));
  CHECK(r.code == 0);
  CHECK_THAT(r.out, ContainsSubstring("holders: 3\n"));
  CHECK_THAT(r.out, ContainsSubstring("price_ratio: 2.72136163618\n"));
  CHECK_THAT(r.out, ContainsSubstring("cost_ratio: 1.21555104492\n"));
  CHECK_THAT(r.out, ContainsSubstring("price_bound: 4.02597402597\n"));
  CHECK_THAT(r.out, ContainsSubstring("price_bound_holds: true\n"));
  CHECK_THAT(r.out, ContainsSubstring("cost_bound: n/a\n"));
  CHECK_THAT(r.out, ContainsSubstring("cost_bound_holds: true\n"));
  CHECK_THAT(r.out, ContainsSubstring("participation_superset: true\n"));
}

TEST_CASE("cli export is canonical and idempotent") {
  std::string first = tmp_path("export1.json");
  std::string second = tmp_path("export2.json");
  CliResult r1 = run_cli("export --scenario " + scenario("triopoly.json") +
                         " --out " + first);
  CHECK(r1.code == 0);
  CHECK_THAT(r1.out, ContainsSubstring("wrote " + first));
  CliResult r2 = run_cli("export --scenario " + first + " --out " + second);
  CHECK(r2.code == 0);
  CHECK(read_file(first) == read_file(second));
  CHECK(read_file(first) ==
        scenario_to_json(load_scenario_file(scenario("triopoly.json"))));
}
