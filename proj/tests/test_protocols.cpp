#include "doctest.h"
#include "introlab/experiments.hpp"
#include "introlab/protocols.hpp"

using namespace introlab;

TEST_CASE("mixture weights always sum to one") {
  auto f2 = Gf::make(2, 1);
  RegisterParams lam1{1, {2}, {f2}};
  RegisterParams lam2{2, {2, 2}, {f2, f2}};
  data_hiding_game(lam1, "x").game.check_enumerable_weights();
  partial_data_hiding_game(lam1, {{{1, 0}}}, "x").game.check_enumerable_weights();
  intro_hide_game(lam2, "x").game.check_enumerable_weights();
  intro_surface_sampler(lam2, 2).game.check_enumerable_weights();
  intro_cross_check(lam2, 2).game.check_enumerable_weights();
  intro_low_degree(lam2, 2).game.check_enumerable_weights();
  intersecting_lines_game(f2, 2, 2).game.check_enumerable_weights();
  intro_intersect_game(lam2, 2).game.check_enumerable_weights();
  PauliBasisConfig cfg{f2, 2, 0.25, true};
  ld_pauli_subgame(cfg).game.check_enumerable_weights();
  pauli_basis_game(cfg).game.check_enumerable_weights();
  compile_full_toy_stack().game.check_enumerable_weights();
}

TEST_CASE("pauli basis cross-check bounds a wrong-basis prover") {
  auto f2 = Gf::make(2, 1);
  PauliBasisConfig cfg{f2, 2, 0.25, true};
  auto pb = pauli_basis_game(cfg);
  double cheat = exact_value(pb.game, pauli_basis_wrong_basis_cheater(cfg));
  // cross-check carries half the weight; the core subgame still passes
  double dq = static_cast<double>(cfg.d()) / cfg.field->q();
  CHECK(cheat <= 0.5 + 0.5 * (0.5 + dq) + 1e-9);
  CHECK(cheat < 1.0);
}

TEST_CASE("answer formats are rejected where the figures demand") {
  auto f2 = Gf::make(2, 1);
  RegisterParams lam1{1, {1}, {f2}};
  auto dh = data_hiding_game(lam1, "ask");
  // a2 format mismatch rejects
  const auto& item = (*dh.game.enumerable)[0];
  json a0 = json{{"u", json::array({nullptr})}, {"a2", 0}};
  json a1 = json{{"u", json::array({nullptr})}};  // missing a2
  CHECK(!dh.game.accept(item.second.x0, item.second.x1, a0, a1));
  json a1b = json{{"u", json::array({nullptr})}, {"a2", 0}};
  CHECK(dh.game.accept(item.second.x0, item.second.x1, a0, a1b));
}

TEST_CASE("conditional distribution of u+v given the second line is uniform") {
  // enumerate u, v over F_2^2; condition on (ell', u); u+v uniform on ell'
  auto f2 = Gf::make(2, 1);
  std::map<std::string, std::map<std::string, int>> counts;
  for (uint32_t ui = 0; ui < 4; ++ui)
    for (uint32_t vi = 0; vi < 4; ++vi) {
      Vec u = index_to_string(*f2, 2, ui), v = index_to_string(*f2, 2, vi);
      auto ellp = AffineSubspace::from_point_dirs(f2, v, {u});
      Vec w{f2->add(u[0], v[0]), f2->add(u[1], v[1])};
      CHECK(ellp.contains(w));
      json cond = json::array({ellp.key(), u});
      counts[cond.dump()][json(w).dump()]++;
    }
  for (auto& [cond, hist] : counts) {
    int total = 0;
    for (auto& [w, c] : hist) total += c;
    // uniform over the points of ell': every observed point equally often
    int per = total / static_cast<int>(hist.size());
    for (auto& [w, c] : hist) CHECK(c == per);
  }
}

TEST_CASE("intro games validate as register strategies") {
  auto f2 = Gf::make(2, 1);
  RegisterParams lam2{2, {2, 2}, {f2, f2}};
  auto ic = intro_cross_check(lam2, 2);
  auto v = validate_register_strategy(*ic.honest, lam2, RegisterKind::Register);
  CHECK(v.ok);
  auto is = intro_surface_sampler(lam2, 2);
  auto v2 = validate_register_strategy(*is.honest, lam2, RegisterKind::Register);
  CHECK(v2.ok);
}

TEST_CASE("formula game accepts honest samplers and the k=n surface case") {
  auto f16 = Gf::make(2, 4);
  PcpParams pp{f16, 1, 2};
  auto inst = load_instance("sat_toy.circ");
  auto pack = formula_game(inst, pp);
  pack.game.check_enumerable_weights();
  auto assignment = *inst.brute_force();
  auto strat = formula_game_sampler(pack, inst, pp, assignment);
  auto r = mc_value(pack.game, strat, 3000, 21);
  CHECK(r.rejections == 0);
  // directions spanning everything make the surface the whole space
  auto f2 = Gf::make(2, 1);
  RegisterParams lam2{2, {2, 2}, {f2, f2}};
  auto ih = intro_hide_game(lam2, "x");
  double v = exact_value(ih.game, *ih.honest);
  CHECK(v == doctest::Approx(1.0));
}

