// privmarket: command-line front end for the privacy-trading market toolkit.
//
// Subcommands: pce, one, simulate, poa, sweep, export.  All numeric output is
// printed with 12 significant digits.  Exit status: 0 success, 2 scenario
// parse/validation error, 3 solver infeasibility, 4 divergence.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "privmarket/privmarket.hpp"

namespace {

using namespace privmarket;

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt_bool(bool v) { return v ? "true" : "false"; }

void print_equilibrium(const ScenarioDocument& doc, const EquilibriumResult& r,
                       const KktReport& kkt, const std::vector<double>& net) {
  const MarketScenario& s = doc.scenario;
  std::cout << "kind: " << to_string(r.kind) << '\n';
  std::cout << "price: " << fmt12(r.price) << '\n';
  std::cout << "demand: " << fmt12(s.demand) << '\n';
  std::cout << "total_cost: " << fmt12(r.total_cost) << '\n';
  std::cout << "participants:";
  for (std::size_t i : r.participants) std::cout << ' ' << i + 1;
  std::cout << '\n';
  std::cout << "kkt_max_residual: " << fmt12(kkt.max_residual) << '\n';
  std::cout << "kkt_pass: " << fmt_bool(kkt.pass) << '\n';
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::cout << "holder " << i + 1 << ':';
    if (!doc.labels[i].empty()) std::cout << " label=" << doc.labels[i];
    std::cout << " a=" << fmt12(s.holders[i].a) << " h=" << fmt12(s.holders[i].h)
              << " q=" << fmt12(r.quantities[i]) << " b=" << fmt12(r.bids[i])
              << " net_revenue=" << fmt12(net[i]) << '\n';
  }
}

int cmd_equilibrium(const std::string& path, EquilibriumKind kind) {
  ScenarioDocument doc = load_scenario_file(path);
  EquilibriumResult r = kind == EquilibriumKind::pce ? solve_pce(doc.scenario)
                                                     : solve_one(doc.scenario);
  KktReport kkt = verify_kkt(r, doc.scenario);
  std::vector<double> net = individual_rationality(r, doc.scenario);
  print_equilibrium(doc, r, kkt, net);
  return 0;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ScenarioParseError(path + ": cannot open file for writing");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"privacy-trading market equilibria, bidding dynamics and efficiency bounds"};
  app.require_subcommand(1);

  std::string scenario_path, out_path, mode = "competitive";
  double flag_step = 0.0, flag_tol = 0.0;
  long flag_iters = 0;
  std::vector<double> r_values;
  double sweep_scale = 1.0, sweep_demand = 1.0;

  CLI::App* pce = app.add_subcommand("pce", "solve the competitive equilibrium");
  pce->add_option("--scenario", scenario_path, "scenario file")->required();

  CLI::App* one = app.add_subcommand("one", "solve the oligopolistic Nash equilibrium");
  one->add_option("--scenario", scenario_path, "scenario file")->required();

  CLI::App* simulate = app.add_subcommand("simulate", "run the iterative bidding loop");
  simulate->add_option("--scenario", scenario_path, "scenario file")->required();
  simulate->add_option("--mode", mode, "competitive or oligopoly")
      ->check(CLI::IsMember({"competitive", "oligopoly"}));
  simulate->add_option("--out", out_path, "trajectory CSV path")->required();
  simulate->add_option("--step-size", flag_step, "price adjustment step")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--max-iters", flag_iters, "iteration budget")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--tol", flag_tol, "absolute and relative tolerance")
      ->check(CLI::PositiveNumber);

  CLI::App* poa = app.add_subcommand("poa", "efficiency report comparing ONE to PCE");
  poa->add_option("--scenario", scenario_path, "scenario file")->required();

  CLI::App* sweep = app.add_subcommand("sweep", "worst-case family efficiency sweep");
  sweep->add_option("--r", r_values, "cheapness ratios, strictly increasing")->required();
  sweep->add_option("--scale", sweep_scale, "cost scale c")->check(CLI::PositiveNumber);
  sweep->add_option("--demand", sweep_demand, "total demand d")->check(CLI::PositiveNumber);
  sweep->add_option("--out", out_path, "sweep CSV path")->required();

  CLI::App* export_cmd = app.add_subcommand("export", "canonical scenario re-serialization");
  export_cmd->add_option("--scenario", scenario_path, "scenario file")->required();
  export_cmd->add_option("--out", out_path, "output scenario path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (pce->parsed()) return cmd_equilibrium(scenario_path, EquilibriumKind::pce);
    if (one->parsed()) return cmd_equilibrium(scenario_path, EquilibriumKind::one);

    if (simulate->parsed()) {
      ScenarioDocument doc = load_scenario_file(scenario_path);
      const MarketScenario& s = doc.scenario;
      bool oligopoly = mode == "oligopoly";

      double p0 = doc.dynamics.p0.value_or(probe_price(s));
      double step = flag_step > 0.0 ? flag_step
                    : doc.dynamics.step_size ? *doc.dynamics.step_size
                                             : recommend_step_size(s);
      long iters = flag_iters > 0 ? flag_iters : doc.dynamics.max_iters.value_or(100000L);
      TolerancePair tol;
      if (flag_tol > 0.0) {
        tol.abs_tol = tol.rel_tol = flag_tol;
      } else {
        tol.abs_tol = doc.dynamics.tol_abs.value_or(tol.abs_tol);
        tol.rel_tol = doc.dynamics.tol_rel.value_or(tol.rel_tol);
      }

      EquilibriumResult exact = oligopoly ? solve_one(s) : solve_pce(s);
      Trajectory traj = oligopoly
                            ? run_oligopoly_bidding(s, p0, step, iters, tol)
                            : run_competitive_bidding(s, p0, step, iters, tol);
      write_text_file(out_path, to_csv(traj));

      const EquilibriumResult& fin = traj.final_state;
      double max_q_dist = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i)
        max_q_dist = std::max(max_q_dist,
                              std::fabs(fin.quantities[i] - exact.quantities[i]));
      std::cout << "mode: " << mode << '\n';
      std::cout << "p0: " << fmt12(p0) << '\n';
      std::cout << "step_size: " << fmt12(step) << '\n';
      std::cout << "iterations: " << traj.records.size() << '\n';
      std::cout << "converged: " << fmt_bool(traj.converged) << '\n';
      std::cout << "final_price: " << fmt12(fin.price) << '\n';
      std::cout << "final_supply_gap: " << fmt12(traj.records.back().supply_gap) << '\n';
      std::cout << "exact_price: " << fmt12(exact.price) << '\n';
      std::cout << "price_distance: " << fmt12(std::fabs(fin.price - exact.price)) << '\n';
      std::cout << "max_quantity_distance: " << fmt12(max_q_dist) << '\n';
      std::cout << "csv: " << out_path << '\n';
      if (!traj.converged) {
        std::cerr << "error: did not converge within " << iters
                  << " iterations; final supply gap "
                  << fmt12(traj.records.back().supply_gap) << '\n';
        return 4;
      }
      return 0;
    }

    if (poa->parsed()) {
      ScenarioDocument doc = load_scenario_file(scenario_path);
      EquilibriumResult pce_r = solve_pce(doc.scenario);
      EquilibriumResult one_r = solve_one(doc.scenario);
      EfficiencyReport rep = efficiency_report(pce_r, one_r, doc.scenario);
      std::cout << "holders: " << doc.scenario.size() << '\n';
      std::cout << "price_pce: " << fmt12(pce_r.price) << '\n';
      std::cout << "price_one: " << fmt12(one_r.price) << '\n';
      std::cout << "cost_pce: " << fmt12(pce_r.total_cost) << '\n';
      std::cout << "cost_one: " << fmt12(one_r.total_cost) << '\n';
      std::cout << "price_ratio: " << fmt12(rep.price_ratio) << '\n';
      std::cout << "cost_ratio: " << fmt12(rep.cost_ratio) << '\n';
      std::cout << "price_bound: " << fmt12(rep.price_bound) << '\n';
      std::cout << "price_bound_holds: " << fmt_bool(rep.price_bound_holds) << '\n';
      std::cout << "cost_bound: "
                << (rep.cost_bound ? fmt12(*rep.cost_bound) : std::string("n/a")) << '\n';
      std::cout << "cost_bound_holds: " << fmt_bool(rep.cost_bound_holds) << '\n';
      std::cout << "participation_superset: " << fmt_bool(rep.participation_superset) << '\n';
      std::cout << "max_uniform_marginal: " << fmt12(rep.max_uniform_marginal) << '\n';
      std::cout << "min_uniform_marginal: " << fmt12(rep.min_uniform_marginal) << '\n';
      return 0;
    }

    if (sweep->parsed()) {
      std::vector<SweepRow> rows = poa_sweep(r_values, sweep_scale, sweep_demand);
      write_text_file(out_path, to_csv(rows));
      std::cout << "wrote " << out_path << " (" << rows.size() << " rows)\n";
      return 0;
    }

    if (export_cmd->parsed()) {
      ScenarioDocument doc = load_scenario_file(scenario_path);
      write_scenario_file(out_path, doc);
      std::cout << "wrote " << out_path << '\n';
      return 0;
    }
  } catch (const ScenarioParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NoEquilibriumError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const RejectedBidError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const DivergedError& e) {
    std::cerr << "error: " << e.what() << " (final supply gap "
              << fmt12(e.supply_gap()) << ")\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
