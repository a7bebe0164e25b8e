#include "doctest.h"
#include "introlab/games.hpp"

using namespace introlab;

namespace {

// Consistency game with one question; strategies measure the EPR qubit.
Game consistency_game(const Question& q) {
  Game g;
  g.name = "consistency";
  g.enumerable = {{Rational::one(), QuestionPair{q, q}}};
  g.accept = [](const Question&, const Question&, const Answer& a0, const Answer& a1) {
    return a0 == a1;
  };
  return g;
}

Measurement basis_measurement(const Gf& f, char W) {
  RegOp op{W == 'Z' ? RegOp::Kind::ZFull : RegOp::Kind::XFull, {}};
  return regop_measurement(f, 1, op);
}

}  // namespace

TEST_CASE("exact value on consistency games") {
  auto f2 = Gf::make(2, 1);
  Question ask = json{{"q", "ask"}};
  Game g = consistency_game(ask);
  QuditLayout lay{{{1, f2}}, 1};
  Strategy zz;
  zz.psi = BipartiteState::epr(lay);
  zz.set(ask, basis_measurement(*f2, 'Z'));
  CHECK(exact_value(g, zz) == doctest::Approx(1.0));
  // Alice Z, Bob X: value 1/2
  Strategy zx;
  zx.psi = zz.psi;
  zx.symmetric = false;
  zx.meas[ask.dump()] = basis_measurement(*f2, 'Z');
  // relabel X outcomes to match the Z label space
  Measurement mx = basis_measurement(*f2, 'X');
  Measurement mx_relabel;
  mx_relabel.kind = mx.kind;
  for (auto& [l, e] : mx.elems) mx_relabel.elems.emplace_back(json{{"z", l["x"]}}, e);
  zx.meas_bob[ask.dump()] = mx_relabel;
  CHECK(exact_value(g, zx) == doctest::Approx(0.5));
  // always-accept game
  Game trivial = g;
  trivial.accept = [](const Question&, const Question&, const Answer&, const Answer&) {
    return true;
  };
  CHECK(exact_value(trivial, zx) == doctest::Approx(1.0));
  // Monte Carlo agrees with the exact value within 3 sigma
  auto mc = mc_value(g, zx, 20000, 5);
  CHECK(std::abs(mc.estimate - 0.5) <= 3 * mc.stderr_);
}

TEST_CASE("distance diagnostics") {
  auto f2 = Gf::make(2, 1);
  QuditLayout lay{{{1, f2}}, 1};
  auto psi = BipartiteState::epr(lay);
  Question q = json{{"x", 0}};
  std::vector<std::pair<Rational, Question>> dist{{Rational::one(), q}};
  std::map<std::string, Measurement> famA{{q.dump(), basis_measurement(*f2, 'Z')}};
  // A = B projective on EPR: sim_delta = 0
  auto rep = distance_diagnostics(dist, famA, famA, psi);
  CHECK(rep.sim_delta == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(rep.approx_delta == doctest::Approx(0.0).epsilon(1e-10));
  // orthogonal rank-1 projector families: approx_delta = 2
  Measurement m0, m1;
  m0.kind = m1.kind = Measurement::Kind::Projective;
  Mat p0 = Mat::Zero(2, 2), p1 = Mat::Zero(2, 2);
  p0(0, 0) = 1;
  p1(1, 1) = 1;
  m0.elems.emplace_back(json{{"o", 0}}, p0);
  m0.elems.emplace_back(json{{"o", 1}}, p1);
  m1.elems.emplace_back(json{{"o", 0}}, p1);
  m1.elems.emplace_back(json{{"o", 1}}, p0);
  std::map<std::string, Measurement> fb{{q.dump(), m1}};
  std::map<std::string, Measurement> fa{{q.dump(), m0}};
  auto rep2 = distance_diagnostics(dist, fa, fb, psi);
  CHECK(rep2.approx_delta == doctest::Approx(2.0));
  // projective families: sim_delta = delta implies approx_delta = O(delta)
  CHECK(rep2.approx_delta <= 2 * rep2.sim_delta + 1e-9);
}

TEST_CASE("register strategy validation") {
  auto f2 = Gf::make(2, 1);
  RegisterParams lam{1, {1}, {f2}};
  QuditLayout lay = lam.layout(2);
  Question qh = make_reg_question({"H"}, "ask");
  // honest: hidden register untouched
  Strategy honest;
  honest.psi = BipartiteState::epr(lay);
  Measurement m;
  m.kind = Measurement::Kind::Projective;
  for (uint32_t z = 0; z < 2; ++z) {
    Mat aux = Mat::Zero(2, 2);
    aux(z, z) = 1;
    m.elems.emplace_back(json{{"u", json::array({nullptr})}, {"a2", z}}, on_aux(lay, aux));
  }
  honest.set(qh, m);
  auto ok = validate_register_strategy(honest, lam, RegisterKind::Register);
  CHECK(ok.ok);
  // violator: measures the hidden register
  Strategy bad = honest;
  Measurement mv;
  mv.kind = Measurement::Kind::Projective;
  for (uint32_t z = 0; z < 2; ++z)
    mv.elems.emplace_back(json{{"u", json::array({nullptr})}, {"a2", z}},
                          on_register(lay, 0, tau_proj(*f2, 1, 'Z', Vec{z})));
  bad.set(qh, mv);
  auto res = validate_register_strategy(bad, lam, RegisterKind::Register);
  CHECK(!res.ok);
  REQUIRE(!res.failures.empty());
  CHECK(res.failures[0].find("register 0") != std::string::npos);
  // semiregister validation exempts exactly register k
  auto res_semi = validate_register_strategy(bad, lam, RegisterKind::Semiregister);
  CHECK(res_semi.ok);
}

TEST_CASE("oracularization") {
  auto f2 = Gf::make(2, 1);
  Question ask = json{{"q", "ask"}};
  Game g = consistency_game(ask);
  QuditLayout lay{{{1, f2}}, 1};
  Strategy honest;
  honest.psi = BipartiteState::epr(lay);
  honest.set(ask, basis_measurement(*f2, 'Z'));
  Game og = oracularize(g);
  og.check_enumerable_weights();
  Strategy ohonest = oracularize_strategy(g, honest);
  CHECK(exact_value(og, ohonest) == doctest::Approx(1.0));
  // always-accept game stays value 1 for any consistent strategy
  Game trivial = g;
  trivial.accept = [](const Question&, const Question&, const Answer&, const Answer&) {
    return true;
  };
  Game ot = oracularize(trivial);
  CHECK(exact_value(ot, oracularize_strategy(trivial, honest)) == doctest::Approx(1.0));
  // non-commuting recipes are refused by the extension
  Game zx;
  zx.name = "zx";
  Question qz = json{{"w", "Z"}}, qx = json{{"w", "X"}};
  zx.enumerable = {{Rational::one(), QuestionPair{qz, qx}}};
  zx.accept = [](const Question&, const Question&, const Answer&, const Answer&) {
    return true;
  };
  Strategy s2;
  s2.psi = honest.psi;
  s2.set(qz, basis_measurement(*f2, 'Z'));
  s2.set(qx, basis_measurement(*f2, 'X'));
  CHECK_THROWS(oracularize_strategy(zx, s2));
}

TEST_CASE("build_honest_commuting_strategy checks the recipe") {
  auto f2 = Gf::make(2, 1);
  QuditLayout lay{{{1, f2}}, 1};
  auto psi = BipartiteState::epr(lay);
  Question q0 = json{{"r", 0}}, q1 = json{{"r", 1}};
  // Z everywhere: fine
  auto s = build_honest_commuting_strategy(
      psi, {{q0, basis_measurement(*f2, 'Z')}, {q1, basis_measurement(*f2, 'Z')}},
      {QuestionPair{q0, q1}});
  CHECK(s.has(0, q0));
  // X and Z on the same register: rejected
  CHECK_THROWS(build_honest_commuting_strategy(
      psi, {{q0, basis_measurement(*f2, 'Z')}, {q1, basis_measurement(*f2, 'X')}},
      {QuestionPair{q0, q1}}));
}
