#include "introlab/protocols.hpp"

#include <algorithm>
#include <stdexcept>

namespace introlab {

namespace {

Vec concat_point(const Answer& a, uint32_t blocks) {
  Vec out;
  for (uint32_t i = 0; i < blocks; ++i) {
    if (a["u"][i].is_null()) throw std::invalid_argument("missing block outcome");
    Vec b = a["u"][i].get<Vec>();
    out.insert(out.end(), b.begin(), b.end());
  }
  return out;
}

struct NeexpCtx {
  RegisterParams lambda;
  GfPtr f;
  uint32_t m = 0, s = 0, mp = 0;
  uint32_t d_ld = 0, d_sup = 0;
  std::shared_ptr<GPsi> gpsi;
  PolyStorePtr store;
};

json null_u(uint32_t k) {
  json u = json::array();
  for (uint32_t i = 0; i < k; ++i) u.push_back(nullptr);
  return u;
}

// Question builders.  Every question is a register-formatted token over the
// six registers plus a role tag in aux.
Question q_point(const NeexpCtx& c, uint32_t reg) {
  std::vector<std::string> w(6, "H");
  w[reg] = "Z";
  return make_reg_question(w, json{{"nx", "point"}, {"reg", reg}, {"d", c.d_ld}});
}

Question q_formula(const NeexpCtx&) {
  std::vector<std::string> w{"Z", "Z", "Z", "Z", "H", "H"};
  return make_reg_question(w, json{{"nx", "formula"}});
}

Question q_idle() {
  return make_reg_question(std::vector<std::string>(6, "H"), json{{"nx", "idle"}});
}

// ihide-family questions for a low-degree test instance.  `pt` lists the
// physical registers forming the point (super)register, `dirs` the direction
// registers.  `t` is the ihide role.
Question q_ldt(const NeexpCtx& c, const std::string& game, const std::vector<uint32_t>& pt,
               const std::vector<uint32_t>& dirs, const std::string& t, uint32_t d) {
  std::vector<std::string> w(6, "H");
  for (uint32_t r : pt) w[r] = (t == "zx") ? "Z" : (t == "xfull" ? "X" : "bot");
  for (uint32_t r : dirs) w[r] = "Z";
  return make_reg_question(
      w, json{{"nx", "ldt"}, {"game", game}, {"t", t}, {"pt", pt}, {"dirs", dirs}, {"d", d}});
}

struct LdtInstance {
  std::string game;
  std::vector<uint32_t> pt;
  std::vector<uint32_t> dirs;
  uint32_t d;
  Question cross_partner;  // the points prover for this instance
};

// Items of one introspective LDT: surface-sampler tests (1/2, four ihide
// tests with the Correct Surface Check) plus the cross-check (1/2).
std::vector<std::pair<Rational, QuestionPair>> ldt_items(const NeexpCtx& c,
                                                         const LdtInstance& inst,
                                                         Rational base) {
  std::vector<std::pair<Rational, QuestionPair>> items;
  auto q = [&](const std::string& t) { return q_ldt(c, inst.game, inst.pt, inst.dirs, t, inst.d); };
  Rational w8 = base * Rational(1, 16);  // 1/2 sampler * 1/4 test * 1/2 flip
  auto both = [&](const Question& a, const Question& b, Rational w) {
    items.emplace_back(w, QuestionPair{a, b});
    items.emplace_back(w, QuestionPair{b, a});
  };
  both(q("x"), q("zx"), w8);
  both(q("x"), q("xX"), w8);
  both(q("xfull"), q("botX"), w8);
  both(q("xX"), q("botX"), w8);
  both(q("x"), inst.cross_partner, base * Rational(1, 4));  // 1/2 cross * 1/2 flip
  return items;
}

// --- acceptance -----------------------------------------------------------

// Extract direction tuple from an answer's u-block.
std::vector<Vec> answer_dirs(const Answer& a, const std::vector<uint32_t>& dirs) {
  std::vector<Vec> out;
  for (uint32_t r : dirs) {
    if (a["u"][r].is_null()) throw std::invalid_argument("missing direction");
    out.push_back(a["u"][r].get<Vec>());
  }
  return out;
}

bool ldt_pair_accept(const NeexpCtx& c, const Question& x0, const Question& x1, const Answer& a0,
                     const Answer& a1) {
  auto t_of = [](const Question& q) { return q["aux"]["t"].get<std::string>(); };
  std::string t0 = t_of(x0), t1 = t_of(x1);
  auto pt = x0["aux"]["pt"].get<std::vector<uint32_t>>();
  auto dirs = x0["aux"]["dirs"].get<std::vector<uint32_t>>();
  uint32_t d = x0["aux"]["d"].get<uint32_t>();
  auto ordered = [&](const std::string& a, const std::string& b, const Answer*& aa,
                     const Answer*& ab) {
    if (t0 == a && t1 == b) {
      aa = &a0;
      ab = &a1;
      return true;
    }
    if (t1 == a && t0 == b) {
      aa = &a1;
      ab = &a0;
      return true;
    }
    return false;
  };
  const Answer *aa, *ab;
  try {
    if (ordered("x", "zx", aa, ab)) {
      if ((*aa)["a2"] != (*ab)["a2"]) return false;
      // Correct Surface Check: the reported surface must be the flat through
      // the Z-player's point along their directions.
      Vec p;
      for (uint32_t r : pt) {
        Vec b = (*ab)["u"][r].get<Vec>();
        p.insert(p.end(), b.begin(), b.end());
      }
      std::vector<Vec> vtuple = answer_dirs(*ab, dirs);
      AffineSubspace s = AffineSubspace::from_point_dirs(c.f, p, vtuple);
      return (*aa)["a2"]["s"] == subspace_to_json(s);
    }
    if (ordered("x", "xX", aa, ab)) return (*aa)["a2"] == (*ab)["a2"];
    if (ordered("xfull", "botX", aa, ab)) {
      auto va = answer_dirs(*aa, dirs);
      auto vb = answer_dirs(*ab, dirs);
      if (va != vb) return false;
      Vec xs;
      for (uint32_t r : pt) {
        Vec b = (*aa)["u"][r].get<Vec>();
        xs.insert(xs.end(), b.begin(), b.end());
      }
      Vec xp = (*ab)["xp"].get<Vec>();
      if (xp.size() != vb.size()) return false;
      for (size_t i = 0; i < vb.size(); ++i)
        if (xp[i] != c.f->dot(vb[i], xs)) return false;
      return true;
    }
    if (ordered("xX", "botX", aa, ab)) return (*aa)["xp"] == (*ab)["xp"];
  } catch (const std::exception&) {
    return false;
  }
  return false;
}

// Cross-check between a surface answer and a point-style answer; fs lists the
// expected function handles and vals the claimed values at the point.
bool cross_accept(const NeexpCtx& c, const Answer& surf, const Vec& point,
                  const std::vector<uint32_t>& vals, uint32_t d) {
  try {
    AffineSubspace s = subspace_from_json(c.f, surf["a2"]["s"]);
    if (!s.contains(point)) return false;
    const json& fs = surf["a2"]["fs"];
    if (fs.size() != vals.size()) return false;
    for (size_t i = 0; i < vals.size(); ++i) {
      if (poly_answer_degree(c.store, c.f, fs[i], s.k) > static_cast<int>(d)) return false;
      if (eval_poly_answer(c.store, c.f, fs[i], s, point) != vals[i]) return false;
    }
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

bool formula_accept(const NeexpCtx& c, const Answer& a) {
  try {
    Vec point = concat_point(a, 4);
    auto nu = a["a2"]["nu"].get<std::vector<uint32_t>>();
    auto mu = a["a2"]["mu"].get<std::vector<uint32_t>>();
    if (nu.size() != 3 || mu.size() != c.mp) return false;
    return c.gpsi->sat_value(point, nu) == c.gpsi->zero_value(point, mu);
  } catch (const std::exception&) {
    return false;
  }
}

bool neexp_accept(const NeexpCtx& c, const Question& x0, const Question& x1, const Answer& a0,
                  const Answer& a1) {
  auto tag = [](const Question& q) { return q["aux"]["nx"].get<std::string>(); };
  std::string t0 = tag(x0), t1 = tag(x1);
  try {
    if (t0 == "idle" || t1 == "idle") {
      const Answer& fa = t0 == "idle" ? a1 : a0;
      return formula_accept(c, fa);
    }
    if (t0 == "formula" && t1 == "formula")
      return a0["a2"]["nu"] == a1["a2"]["nu"] && a0["a2"]["mu"] == a1["a2"]["mu"];
    if (t0 == "point" && t1 == "point") return a0["a2"]["v"] == a1["a2"]["v"];
    if ((t0 == "point" && t1 == "formula") || (t0 == "formula" && t1 == "point")) {
      const Question& pq = t0 == "point" ? x0 : x1;
      const Answer& pa = t0 == "point" ? a0 : a1;
      const Answer& fa = t0 == "point" ? a1 : a0;
      uint32_t reg = pq["aux"]["reg"].get<uint32_t>();
      return pa["a2"]["v"] == fa["a2"]["nu"][reg];
    }
    if (t0 == "ldt" && t1 == "ldt") {
      // Either an ihide pair within one instance, or the intersecting lines
      // branch pairing two different lines instances.
      std::string g0 = x0["aux"]["game"], g1 = x1["aux"]["game"];
      if (g0 == g1) return ldt_pair_accept(c, x0, x1, a0, a1);
      // intersecting lines: both are "x"-tagged lines provers
      auto pt0 = x0["aux"]["pt"].get<std::vector<uint32_t>>();
      auto dirs0 = x0["aux"]["dirs"].get<std::vector<uint32_t>>();
      uint32_t d = x0["aux"]["d"].get<uint32_t>();
      // line 1: point reg = pt0[0], directions from dirs0[0]
      Vec v = a0["u"][dirs0[0]].get<Vec>();
      Vec u = a1["u"][pt0[0]].get<Vec>();
      Vec w(u.size());
      for (size_t i = 0; i < u.size(); ++i) w[i] = c.f->add(u[i], v[i]);
      AffineSubspace ell = subspace_from_json(c.f, a0["a2"]["s"]);
      AffineSubspace ellp = subspace_from_json(c.f, a1["a2"]["s"]);
      if (!ell.contains(w) || !ellp.contains(w)) return false;
      const json& f0 = a0["a2"]["fs"][0];
      const json& f1 = a1["a2"]["fs"][0];
      if (poly_answer_degree(c.store, c.f, f0, ell.k) > static_cast<int>(d)) return false;
      if (poly_answer_degree(c.store, c.f, f1, ellp.k) > static_cast<int>(d)) return false;
      return eval_poly_answer(c.store, c.f, f0, ell, w) ==
             eval_poly_answer(c.store, c.f, f1, ellp, w);
    }
    // LDT cross-checks: surface prover vs its points prover
    if ((t0 == "ldt") != (t1 == "ldt")) {
      const Question& lq = t0 == "ldt" ? x0 : x1;
      const Answer& la = t0 == "ldt" ? a0 : a1;
      const Question& oq = t0 == "ldt" ? x1 : x0;
      const Answer& oa = t0 == "ldt" ? a1 : a0;
      auto pt = lq["aux"]["pt"].get<std::vector<uint32_t>>();
      uint32_t d = lq["aux"]["d"].get<uint32_t>();
      std::string otag = tag(oq);
      if (otag == "point") {
        Vec u = oa["u"][pt[0]].get<Vec>();
        return cross_accept(c, la, u, {oa["a2"]["v"].get<uint32_t>()}, d);
      }
      if (otag == "formula") {
        Vec point = concat_point(oa, 4);
        std::vector<uint32_t> vals = oa["a2"]["nu"].get<std::vector<uint32_t>>();
        auto mu = oa["a2"]["mu"].get<std::vector<uint32_t>>();
        vals.insert(vals.end(), mu.begin(), mu.end());
        return cross_accept(c, la, point, vals, d);
      }
      return false;
    }
  } catch (const std::exception&) {
    return false;
  }
  return false;
}

NeexpCtx make_ctx(const SuccinctSatInstance& inst, const PcpParams& params,
                  const IntroNeexpOptions& opts) {
  NeexpCtx c;
  c.f = params.field;
  c.m = params.m;
  c.s = static_cast<uint32_t>(inst.circuit.size());
  c.mp = 3 * c.m + 3 + c.s;
  c.gpsi = std::make_shared<GPsi>(inst, params);
  c.store = std::make_shared<PolyStore>();
  LdParams ld = params.assignment_code(inst.n);
  c.d_ld = opts.d ? opts.d : ld.degree();
  int satdeg = c.gpsi->poly().total_degree() + 3 * static_cast<int>(ld.degree());
  c.d_sup = std::max<int>(satdeg, c.d_ld);
  c.lambda = RegisterParams{6,
                            {c.m, c.m, c.m, 3 + c.s, c.mp, c.mp},
                            {c.f, c.f, c.f, c.f, c.f, c.f}};
  return c;
}

std::vector<LdtInstance> neexp_ldt_instances(const NeexpCtx& c) {
  std::vector<LdtInstance> v;
  // G_LD: planes on register 0
  v.push_back({"ld", {0}, {1, 2}, c.d_ld, Question()});
  // IL1: lines on (0, 1) and (1, 0); IL2: lines on (0, 2) and (2, 0)
  v.push_back({"il1a", {0}, {1}, c.d_ld, Question()});
  v.push_back({"il1b", {1}, {0}, c.d_ld, Question()});
  v.push_back({"il2a", {0}, {2}, c.d_ld, Question()});
  v.push_back({"il2b", {2}, {0}, c.d_ld, Question()});
  // LDSUP: planes on the (0..3) superregister with directions 4, 5
  v.push_back({"sup", {0, 1, 2, 3}, {4, 5}, c.d_sup, Question()});
  for (auto& inst : v) {
    if (inst.game == "sup")
      inst.cross_partner = Question();  // set to the formula question by the caller
    else
      inst.cross_partner = Question();
  }
  return v;
}

}  // namespace

GamePack formula_game(const SuccinctSatInstance& inst, const PcpParams& params) {
  NeexpCtx c = make_ctx(inst, params, {});
  // Standalone formula game: lambda = (4, (m, m, m, 3+s), q).
  GamePack pack;
  pack.store = c.store;
  pack.lambda = RegisterParams{4, {c.m, c.m, c.m, 3 + c.s}, {c.f, c.f, c.f, c.f}};
  std::vector<std::string> w{"Z", "Z", "Z", "Z"};
  Question fq = make_reg_question(w, json{{"nx", "formula"}});
  Question idle = make_reg_question(std::vector<std::string>(4, "H"), json{{"nx", "idle"}});
  pack.game.name = "formula-game";
  pack.game.params = json{{"pcp", params.descriptor()}, {"m_prime", c.mp}};
  pack.game.enumerable = {{Rational(1, 2), QuestionPair{fq, idle}},
                          {Rational(1, 2), QuestionPair{idle, fq}}};
  NeexpCtx cc = c;
  pack.game.accept = [cc](const Question& x0, const Question& x1, const Answer& a0,
                          const Answer& a1) -> bool {
    bool f0 = x0["aux"]["nx"] == "formula";
    if (!f0 && x1["aux"]["nx"] != "formula") return false;
    return formula_accept(cc, f0 ? a0 : a1);
  };
  pack.game.qlength = 5;
  pack.game.alength = c.mp + 3 + c.mp;
  pack.notes["lambda"] = pack.lambda.descriptor();
  return pack;
}

SamplerStrategy formula_game_sampler(const GamePack& pack, const SuccinctSatInstance& inst,
                                     const PcpParams& params,
                                     std::span<const uint8_t> assignment) {
  PcpProof proof = pcp_prove_unchecked(inst, params, assignment);
  NeexpCtx c = make_ctx(inst, params, {});
  (void)pack;
  auto g = std::make_shared<MultiPoly>(proof.g);
  auto cs = std::make_shared<std::vector<MultiPoly>>(proof.cs);
  uint32_t m = c.m, s = c.s, mp = c.mp;
  GfPtr f = c.f;
  SamplerStrategy strat;
  strat.respond = [g, cs, m, s, mp, f](const QuestionPair& qp, Rng& rng) {
    auto mk_formula_answer = [&](const Vec& point) {
      json ub = null_u(4);
      ub[0] = Vec(point.begin(), point.begin() + m);
      ub[1] = Vec(point.begin() + m, point.begin() + 2 * m);
      ub[2] = Vec(point.begin() + 2 * m, point.begin() + 3 * m);
      ub[3] = Vec(point.begin() + 3 * m, point.end());
      std::vector<uint32_t> nu(3), mu(mp);
      for (uint32_t i = 0; i < 3; ++i) {
        Vec x(point.begin() + i * m, point.begin() + (i + 1) * m);
        nu[i] = g->eval(x);
      }
      for (uint32_t j = 0; j < mp; ++j) mu[j] = (*cs)[j].eval(point);
      return json{{"u", ub}, {"a2", json{{"nu", nu}, {"mu", mu}}}};
    };
    Vec point(mp);
    for (auto& x : point) x = static_cast<uint32_t>(rng.below(f->q()));
    json idle_answer = json{{"u", null_u(4)}, {"a2", nullptr}};
    bool f0 = qp.x0["aux"]["nx"] == "formula";
    bool f1 = qp.x1["aux"]["nx"] == "formula";
    json fa = mk_formula_answer(point);
    return std::make_pair(f0 ? fa : idle_answer, f1 ? fa : idle_answer);
  };
  return strat;
}

GamePack intro_neexp_game(const SuccinctSatInstance& inst, const PcpParams& params,
                          const IntroNeexpOptions& opts) {
  SuccinctSatInstance use = inst;
  if (opts.use_padding) {
    PaddedParams pp = pad_instance(inst, opts.s_inst);
    use = pp.padded;
  }
  NeexpCtx c = make_ctx(use, params, opts);
  GamePack pack;
  pack.store = c.store;
  pack.lambda = c.lambda;
  pack.game.name = "intro-neexp";
  pack.game.params = json{{"pcp", params.descriptor()},
                          {"lambda", c.lambda.descriptor()},
                          {"d_ld", c.d_ld},
                          {"d_sup", c.d_sup},
                          {"padded", opts.use_padding}};
  std::vector<std::pair<Rational, QuestionPair>> items;
  Rational ninth(1, 9);
  Question fq = q_formula(c);
  // 1. G_LD
  {
    LdtInstance ld{"ld", {0}, {1, 2}, c.d_ld, q_point(c, 0)};
    auto sub = ldt_items(c, ld, ninth);
    items.insert(items.end(), sub.begin(), sub.end());
  }
  // 2-3. intersecting lines instances: each is itself a 1/4 mixture
  for (int il = 0; il < 2; ++il) {
    uint32_t other = il == 0 ? 1 : 2;
    std::string ga = il == 0 ? "il1a" : "il2a";
    std::string gb = il == 0 ? "il1b" : "il2b";
    LdtInstance la{ga, {0}, {other}, c.d_ld, q_point(c, 0)};
    LdtInstance lb{gb, {other}, {0}, c.d_ld, q_point(c, other)};
    Rational sub = ninth * Rational(1, 4);
    auto ia = ldt_items(c, la, sub);
    auto ib = ldt_items(c, lb, sub);
    items.insert(items.end(), ia.begin(), ia.end());
    items.insert(items.end(), ib.begin(), ib.end());
    // intersecting lines check (1/4 within the branch)
    Question qa = q_ldt(c, ga, {0}, {other}, "x", c.d_ld);
    Question qb = q_ldt(c, gb, {other}, {0}, "x", c.d_ld);
    items.emplace_back(ninth * Rational(1, 8), QuestionPair{qa, qb});
    items.emplace_back(ninth * Rational(1, 8), QuestionPair{qb, qa});
    // points consistency (1/4 within the branch)
    items.emplace_back(ninth * Rational(1, 4), QuestionPair{q_point(c, 0), q_point(c, 0)});
  }
  // 4. LDSUP
  {
    LdtInstance sup{"sup", {0, 1, 2, 3}, {4, 5}, c.d_sup, fq};
    auto sub = ldt_items(c, sup, ninth);
    items.insert(items.end(), sub.begin(), sub.end());
  }
  // 5. formula test
  items.emplace_back(ninth * Rational(1, 2), QuestionPair{fq, q_idle()});
  items.emplace_back(ninth * Rational(1, 2), QuestionPair{q_idle(), fq});
  // 6-8. consistency: points provers vs formula
  for (uint32_t reg = 0; reg < 3; ++reg) {
    items.emplace_back(ninth * Rational(1, 2), QuestionPair{q_point(c, reg), fq});
    items.emplace_back(ninth * Rational(1, 2), QuestionPair{fq, q_point(c, reg)});
  }
  // 9. formula self-consistency
  items.emplace_back(ninth, QuestionPair{fq, fq});
  pack.game.enumerable = items;
  NeexpCtx cc = c;
  pack.game.accept = [cc](const Question& x0, const Question& x1, const Answer& a0,
                          const Answer& a1) { return neexp_accept(cc, x0, x1, a0, a1); };
  pack.game.qlength = 8;
  pack.game.alength = 2 * c.mp + 8;
  pack.notes["weights"] =
      "ihide figure lists four tests and the LDT figure two; uniform weights over listed items";
  return pack;
}

SamplerStrategy intro_neexp_sampler(const GamePack& pack, const SuccinctSatInstance& inst,
                                    const PcpParams& params,
                                    std::span<const uint8_t> assignment) {
  PcpProof proof = pcp_prove_unchecked(inst, params, assignment);
  NeexpCtx c = make_ctx(inst, params, {});
  c.store = pack.store;
  // Register the global polynomials: g as a function of each x-block (lifted
  // to m' variables for superregister answers), the plain g for line tests,
  // and the coefficient polynomials.
  int gid = c.store->add(proof.g);
  std::vector<int> sup_ids;
  for (uint32_t blk = 0; blk < 3; ++blk) {
    MultiPoly lifted(c.f, c.mp);
    for (const auto& [e, coeff] : proof.g.terms()) {
      std::vector<uint16_t> ee(c.mp, 0);
      for (uint32_t j = 0; j < c.m; ++j) ee[blk * c.m + j] = e[j];
      lifted.add_term(ee, coeff);
    }
    sup_ids.push_back(c.store->add(lifted));
  }
  for (const auto& cp : proof.cs) sup_ids.push_back(c.store->add(cp));
  auto g = std::make_shared<MultiPoly>(proof.g);
  auto cs = std::make_shared<std::vector<MultiPoly>>(proof.cs);
  NeexpCtx cc = c;
  int g_id = gid;
  std::vector<int> sup = sup_ids;

  SamplerStrategy strat;
  strat.respond = [cc, g, cs, g_id, sup](const QuestionPair& qp, Rng& rng)
      -> std::pair<Answer, Answer> {
    const Gf& f = *cc.f;
    auto tag = [](const Question& q) { return q["aux"]["nx"].get<std::string>(); };
    std::string t0 = tag(qp.x0), t1 = tag(qp.x1);
    auto reg_len = [&](uint32_t r) { return cc.lambda.n[r]; };
    auto rand_vec = [&](uint32_t len) {
      Vec v(len);
      for (auto& x : v) x = static_cast<uint32_t>(rng.below(f.q()));
      return v;
    };
    // Per-round shared Z strings per register, drawn lazily; both sides see
    // the same string (EPR Z correlations at p = 2).
    std::map<uint32_t, Vec> zshared;
    auto zreg = [&](uint32_t r) {
      auto it = zshared.find(r);
      if (it != zshared.end()) return it->second;
      Vec v = rand_vec(reg_len(r));
      zshared[r] = v;
      return v;
    };
    auto formula_answer = [&]() {
      Vec point;
      for (uint32_t r = 0; r < 4; ++r) {
        Vec b = zreg(r);
        point.insert(point.end(), b.begin(), b.end());
      }
      json ub = null_u(6);
      for (uint32_t r = 0; r < 4; ++r) ub[r] = zreg(r);
      std::vector<uint32_t> nu(3), mu(cc.mp);
      for (uint32_t i = 0; i < 3; ++i) nu[i] = g->eval(zreg(i));
      for (uint32_t j = 0; j < cc.mp; ++j) mu[j] = (*cs)[j].eval(point);
      return json{{"u", ub}, {"a2", json{{"nu", nu}, {"mu", mu}}}};
    };
    auto point_answer = [&](const Question& q) {
      uint32_t r = q["aux"]["reg"].get<uint32_t>();
      json ub = null_u(6);
      ub[r] = zreg(r);
      return json{{"u", ub}, {"a2", json{{"v", g->eval(zreg(r))}}}};
    };
    // Surface machinery: the point (super)register string is shared via
    // zreg; the surface is the flat through it along the measured directions.
    auto pt_string = [&](const std::vector<uint32_t>& pt) {
      Vec p;
      for (uint32_t r : pt) {
        Vec b = zreg(r);
        p.insert(p.end(), b.begin(), b.end());
      }
      return p;
    };
    auto fs_handles = [&](const std::vector<uint32_t>& pt) {
      json fs = json::array();
      if (pt.size() == 4) {
        for (int id : sup) fs.push_back(json{{"pid", id}});
      } else {
        fs.push_back(json{{"pid", g_id}});
      }
      return fs;
    };
    auto ldt_answer = [&](const Question& q) -> json {
      std::string t = q["aux"]["t"].get<std::string>();
      auto pt = q["aux"]["pt"].get<std::vector<uint32_t>>();
      auto dirs = q["aux"]["dirs"].get<std::vector<uint32_t>>();
      std::vector<Vec> vtuple;
      json ub = null_u(6);
      for (uint32_t r : dirs) {
        ub[r] = zreg(r);
        vtuple.push_back(zreg(r));
      }
      if (t == "x" || t == "zx" || t == "xX") {
        Vec p = pt_string(pt);
        AffineSubspace s = AffineSubspace::from_point_dirs(cc.f, p, vtuple);
        json a2 = json{{"s", subspace_to_json(s)}, {"fs", fs_handles(pt)}};
        json ans = json{{"u", ub}, {"a2", a2}};
        if (t == "zx")
          for (uint32_t r : pt) ans["u"][r] = zreg(r);
        if (t == "xX") {
          // partial-X values from a fresh shared string, independent of s
          uint32_t len = 0;
          for (uint32_t r : pt) len += reg_len(r);
          Vec ux = zshared.count(1000) ? zshared[1000] : (zshared[1000] = rand_vec(len), zshared[1000]);
          Vec xp(vtuple.size());
          for (size_t i = 0; i < vtuple.size(); ++i) xp[i] = f.dot(vtuple[i], ux);
          ans["xp"] = xp;
        }
        return ans;
      }
      if (t == "botX" || t == "xfull") {
        uint32_t len = 0;
        for (uint32_t r : pt) len += reg_len(r);
        Vec ux = zshared.count(1000) ? zshared[1000] : (zshared[1000] = rand_vec(len), zshared[1000]);
        json ans = json{{"u", ub}};
        if (t == "xfull") {
          uint32_t off = 0;
          for (uint32_t r : pt) {
            ans["u"][r] = Vec(ux.begin() + off, ux.begin() + off + reg_len(r));
            off += reg_len(r);
          }
        } else {
          Vec xp(vtuple.size());
          for (size_t i = 0; i < vtuple.size(); ++i) xp[i] = f.dot(vtuple[i], ux);
          ans["xp"] = xp;
          ans["a2"] = nullptr;
        }
        return ans;
      }
      throw std::runtime_error("intro_neexp_sampler: unknown ldt tag " + t);
    };
    auto answer_for = [&](const Question& q) -> json {
      std::string t = tag(q);
      if (t == "idle") return json{{"u", null_u(6)}, {"a2", nullptr}};
      if (t == "formula") return formula_answer();
      if (t == "point") return point_answer(q);
      if (t == "ldt") return ldt_answer(q);
      throw std::runtime_error("intro_neexp_sampler: unknown role " + t);
    };
    json a0 = answer_for(qp.x0);
    json a1 = answer_for(qp.x1);
    return {a0, a1};
  };
  return strat;
}

}  // namespace introlab
