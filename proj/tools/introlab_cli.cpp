#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "introlab/experiments.hpp"

using namespace introlab;

namespace {

json parse_params(const std::string& s) {
  if (s.empty()) return json::object();
  return json::parse(s);
}

void emit(const json& report, const std::string& out_path) {
  std::string text = report.dump(2);
  text.push_back('\n');
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    out << text;
  }
}

int run_named(const std::string& name, const std::string& params, uint64_t seed,
              const std::string& out_path) {
  auto r = run_experiment(name, parse_params(params), seed);
  emit(r.report, out_path);
  return r.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"introlab: desk-scale MIP* protocol laboratory"};
  app.require_subcommand(1);

  std::string params, out_path, instance_path, game_name, strategy = "honest", mode = "exact";
  uint64_t seed = 1, trials = 10000;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--params", params, "experiment parameter JSON");
    cmd->add_option("--seed", seed, "rng seed");
    cmd->add_option("--trials", trials, "Monte Carlo trials");
    cmd->add_option("--out", out_path, "write the JSON report to a file");
  };

  // one subcommand per module namespace, each running its experiments
  std::map<std::string, std::vector<std::string>> groups = {
      {"gf", {"field-code-algebra"}},
      {"poly", {"field-code-algebra"}},
      {"ldt", {"intro-distribution"}},
      {"sat", {"pcp-classical"}},
      {"qsim", {"pauli-algebra", "twirl-identities"}},
      {"anred", {"answer-reduction"}},
  };
  for (auto& [ns, exps] : groups) {
    auto* cmd = app.add_subcommand(ns, "run the " + ns + " experiments");
    add_common(cmd);
    auto list = exps;
    cmd->callback([&, list]() {
      bool ok = true;
      json combined = json::array();
      for (const auto& name : list) {
        auto r = run_experiment(name, parse_params(params), seed);
        combined.push_back(r.report);
        ok = ok && r.pass;
      }
      emit(combined.size() == 1 ? combined[0] : json{{"reports", combined}}, out_path);
      if (!ok) throw CLI::RuntimeError(1);
    });
  }

  // game namespace: value reports for a named game and strategy
  auto* game = app.add_subcommand("game", "evaluate a game value");
  game->add_option("--game", game_name, "game name")->required();
  game->add_option("--strategy", strategy, "honest or cheat:<name>");
  game->add_option("--mode", mode, "exact or mc");
  game->add_option("--instance", instance_path, "instance file for formula/neexp games");
  add_common(game);
  game->callback([&]() {
    auto f2 = Gf::make(2, 1);
    auto f16 = Gf::make(2, 4);
    RegisterParams lam1{1, {2}, {f2}};
    RegisterParams lam2{2, {2, 2}, {f2, f2}};
    json report;
    report["game"] = game_name;
    report["strategy"] = strategy;
    report["mode"] = mode;
    report["seed"] = seed;
    auto finish_exact = [&](const Game& g, const Strategy& s) {
      double v = exact_value(g, s);
      report["value"] = v;
      report["method"] = "exact";
    };
    auto finish_mc = [&](const Game& g, const SamplerStrategy& s) {
      auto r = mc_value(g, s, trials, seed);
      report["value"] = r.estimate;
      report["stderr"] = r.stderr_;
      report["trials"] = r.trials;
      report["rejections"] = r.rejections;
      report["method"] = "mc";
    };
    bool cheat = strategy.rfind("cheat:", 0) == 0;
    std::string cheat_name = cheat ? strategy.substr(6) : "";
    if (game_name == "basis") {
      PauliBasisConfig cfg{f2, 2, 0.25, true};
      auto pack = pauli_basis_game(cfg);
      finish_exact(pack.game, cheat ? pauli_basis_wrong_basis_cheater(cfg) : *pack.honest);
    } else if (game_name == "hide") {
      auto pack = data_hiding_game(lam1, "ask");
      finish_exact(pack.game, cheat ? data_hiding_zread_cheater(lam1, "ask") : *pack.honest);
    } else if (game_name == "partial-hide") {
      std::vector<std::vector<Vec>> S{{{1, 0}}};
      auto pack = partial_data_hiding_game(lam1, S, "x");
      finish_exact(pack.game,
                   cheat ? partial_hiding_zread_cheater(lam1, S, "x") : *pack.honest);
    } else if (game_name == "intro-hide") {
      auto pack = intro_hide_game(lam2, "payload");
      finish_exact(pack.game, *pack.honest);
    } else if (game_name == "intro-surf") {
      auto pack = intro_surface_sampler(lam2, 2);
      finish_exact(pack.game, cheat ? lying_surface_cheater(lam2, 2) : *pack.honest);
    } else if (game_name == "intro-cross") {
      auto pack = intro_cross_check(lam2, 2);
      finish_exact(pack.game, *pack.honest);
    } else if (game_name == "intro-ldt") {
      auto pack = intro_low_degree(lam2, 2);
      finish_exact(pack.game, *pack.honest);
    } else if (game_name == "intersect") {
      auto pack = intersecting_lines_game(f2, 2, 2);
      MultiPoly g = MultiPoly::variable(f2, 2, 0) * MultiPoly::variable(f2, 2, 1);
      auto r = honest_line_responder(g, pack.store);
      report["value"] = exact_deterministic_value(pack.game, r, r);
      report["method"] = "exact-deterministic";
    } else if (game_name == "intro-intersect") {
      auto pack = intro_intersect_game(lam2, 2);
      finish_exact(pack.game, *pack.honest);
    } else if (game_name == "formula" || game_name == "intro-neexp") {
      PcpParams pp{f16, 1, 2};
      auto inst = instance_path.empty()
                      ? load_instance("sat_toy.circ")
                      : [&] {
                          std::ifstream in(instance_path);
                          std::string text{std::istreambuf_iterator<char>(in),
                                           std::istreambuf_iterator<char>()};
                          return SuccinctSatInstance::from_circuit(parse_circuit(text));
                        }();
      auto assignment = inst.brute_force();
      if (!assignment) throw CLI::RuntimeError(2);
      if (game_name == "formula") {
        auto pack = formula_game(inst, pp);
        finish_mc(pack.game, formula_game_sampler(pack, inst, pp, *assignment));
      } else {
        auto pack = intro_neexp_game(inst, pp);
        finish_mc(pack.game, intro_neexp_sampler(pack, inst, pp, *assignment));
      }
    } else if (game_name == "compiled-toy") {
      auto stack = compile_full_toy_stack();
      finish_exact(stack.game, stack.honest);
    } else {
      std::cerr << "unknown game: " << game_name << "\n";
      throw CLI::RuntimeError(2);
    }
    (void)cheat_name;
    emit(report, out_path);
  });

  // run: a single registered experiment by name
  std::string exp_name;
  auto* runc = app.add_subcommand("run", "run one registered experiment");
  runc->add_option("name", exp_name, "experiment name")->required();
  add_common(runc);
  runc->callback([&]() {
    int rc = run_named(exp_name, params, seed, out_path);
    if (rc) throw CLI::RuntimeError(rc);
  });

  // suite: all acceptance criteria, deterministic report
  auto* suite = app.add_subcommand("suite", "run every acceptance criterion");
  add_common(suite);
  suite->callback([&]() {
    json report = run_suite(seed);
    emit(report, out_path);
    for (const auto& item : report["criteria"])
      std::cerr << (item["pass"].get<bool>() ? "PASS " : "FAIL ")
                << item["experiment"].get<std::string>() << "\n";
    if (!report["pass"].get<bool>()) throw CLI::RuntimeError(1);
  });

  // parse-instance utility
  std::string circ_path;
  auto* pc = app.add_subcommand("parse-instance", "validate a circuit file");
  pc->add_option("file", circ_path, "circuit file")->required();
  pc->callback([&]() {
    std::ifstream in(circ_path);
    std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    auto inst = SuccinctSatInstance::from_circuit(parse_circuit(text));
    json report{{"file", circ_path},
                {"n", inst.n},
                {"variables", 1ull << inst.n},
                {"gates", inst.circuit.size()},
                {"roundtrip", serialize_circuit(parse_circuit(serialize_circuit(inst.circuit))) ==
                                  serialize_circuit(inst.circuit)}};
    emit(report, out_path);
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}
