#include "introlab/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace introlab {

uint32_t eval_poly_answer(const PolyStorePtr& store, GfPtr f, const json& ans,
                          const AffineSubspace& on, const Point& ambient) {
  if (ans.contains("pid")) {
    if (!store) throw std::invalid_argument("eval_poly_answer: no store");
    return store->get(ans["pid"].get<int>()).eval(ambient);
  }
  MultiPoly p = MultiPoly::from_coeff_list_graded_lex(
      f, ans.at("arity").get<uint32_t>(), ans.at("cap").get<uint32_t>(),
      ans.at("coeffs").get<std::vector<uint32_t>>());
  return p.eval(on.coordinates_of(ambient));
}

int poly_answer_degree(const PolyStorePtr& store, GfPtr f, const json& ans, uint32_t arity_on) {
  if (ans.contains("pid")) return store->get(ans["pid"].get<int>()).total_degree();
  MultiPoly p = MultiPoly::from_coeff_list_graded_lex(
      f, ans.at("arity").get<uint32_t>(), ans.at("cap").get<uint32_t>(),
      ans.at("coeffs").get<std::vector<uint32_t>>());
  if (p.arity() != arity_on) return INT32_MAX;
  return p.total_degree();
}

namespace {

json poly_coeff_answer(const MultiPoly& p, uint32_t cap) {
  return json{{"coeffs", p.coeff_list_graded_lex(cap)}, {"arity", p.arity()}, {"cap", cap}};
}

std::vector<Vec> all_vectors(const Gf& f, uint32_t n) {
  uint64_t count = 1;
  for (uint32_t i = 0; i < n; ++i) count *= f.q();
  std::vector<Vec> out;
  out.reserve(count);
  for (uint64_t i = 0; i < count; ++i) out.push_back(index_to_string(f, n, i));
  return out;
}

json null_u_block(uint32_t k) {
  json u = json::array();
  for (uint32_t i = 0; i < k; ++i) u.push_back(nullptr);
  return u;
}

}  // namespace

// --- Pauli basis -------------------------------------------------------------

uint32_t PauliBasisConfig::h() const {
  uint32_t q = field->q();
  uint32_t root = static_cast<uint32_t>(std::ceil(std::sqrt(static_cast<double>(q))));
  uint32_t hh = 1;
  while (hh < root) hh <<= 1;
  return std::min(hh, q);
}

uint32_t PauliBasisConfig::m() const {
  double lg = std::log(static_cast<double>(std::max(n, 2u))) /
              std::log(static_cast<double>(field->q()));
  uint32_t mm = 2 * static_cast<uint32_t>(std::ceil(lg));
  return std::max(mm, 2u);
}

bool PauliBasisConfig::condition_holds() const {
  double q = field->q();
  double logn = std::log2(static_cast<double>(std::max(n, 2u)));
  return eta > 0 && eta <= 0.5 && 64.0 * logn * logn / (eta * eta) <= q;
}

LdParams PauliBasisConfig::ld() const {
  uint32_t t1 = 0;
  uint32_t hh = h();
  while ((1u << t1) < hh) ++t1;
  return LdParams{field, n, t1, m()};
}

json PauliBasisConfig::descriptor() const {
  return json{{"n", n},      {"q", field->q()},          {"eta", eta},  {"h", h()},
              {"m", m()},    {"d", d()},                 {"condition", condition_holds()},
              {"override", desk_override}};
}

namespace {

// Honest measurement for the stand-in subgame / cross-check: measure the full
// register in the W basis, then answer a function of the outcome string.
Measurement string_function_measurement(const QuditLayout& lay, const Gf& f, uint32_t n, char W,
                                        const std::function<json(const Vec&)>& label_of) {
  std::map<std::string, std::pair<json, Mat>> groups;
  for (const Vec& u : all_vectors(f, n)) {
    json label = label_of(u);
    Mat el = on_register(lay, 0, tau_proj(f, n, W, u));
    std::string key = label.dump();
    auto it = groups.find(key);
    if (it == groups.end())
      groups[key] = {label, el};
    else
      it->second.second += el;
  }
  Measurement m;
  m.kind = Measurement::Kind::Projective;
  for (auto& [k, v] : groups) m.elems.emplace_back(v.first, v.second);
  return m;
}

}  // namespace

GamePack ld_pauli_subgame(const PauliBasisConfig& cfg) {
  GamePack pack;
  const Gf& f = *cfg.field;
  LdParams ld = cfg.ld();
  if (!ld.admissible()) throw std::invalid_argument("ld_pauli_subgame: inadmissible parameters");
  CanonicalMaps maps(ld);
  uint32_t d = cfg.d();

  SurfaceTestConfig scfg{cfg.field, cfg.m(), d, 2, 1};
  auto draws = enumerate_surface_draws(scfg);
  std::vector<std::pair<Rational, QuestionPair>> items;
  Rational quarter(1, 4);  // W choice x role flip
  for (const auto& [w, dr] : draws) {
    for (const char* W : {"Z", "X"}) {
      json sq = json{{"game", "qld"}, {"W", W}, {"role", "surface"}, {"s", subspace_to_json(dr.s)},
                     {"dirs", dr.dirs}};
      json pq = json{{"game", "qld"}, {"W", W}, {"role", "point"}, {"u", dr.u}};
      items.emplace_back(w * quarter, QuestionPair{sq, pq});
      items.emplace_back(w * quarter, QuestionPair{pq, sq});
    }
  }
  pack.game.name = "ld-pauli-subgame";
  pack.game.params = cfg.descriptor();
  pack.game.enumerable = items;
  GfPtr fp = cfg.field;
  uint32_t dd = d;
  pack.game.accept = [fp, dd](const Question& x0, const Question& x1, const Answer& a0,
                              const Answer& a1) -> bool {
    const Question* sq = &x0;
    const Answer* sa = &a0;
    const Answer* pa = &a1;
    const Question* pq = &x1;
    if (x0["role"] == "point") {
      sq = &x1;
      sa = &a1;
      pa = &a0;
      pq = &x0;
    }
    AffineSubspace s = subspace_from_json(fp, (*sq)["s"]);
    Point u = (*pq)["u"].get<Point>();
    if (!s.contains(u)) return false;
    if (!a0.is_object() || !a1.is_object()) return false;
    if (!sa->contains("f") || !pa->contains("v")) return false;
    MultiPoly fpoly = MultiPoly::from_coeff_list_graded_lex(
        fp, (*sa)["f"].at("arity").get<uint32_t>(), (*sa)["f"].at("cap").get<uint32_t>(),
        (*sa)["f"].at("coeffs").get<std::vector<uint32_t>>());
    if (fpoly.arity() != s.k || fpoly.total_degree() > static_cast<int>(dd)) return false;
    return fpoly.eval(s.coordinates_of(u)) == (*pa)["v"].get<uint32_t>();
  };
  pack.game.qlength = cfg.m() * 3;
  pack.game.alength = (d + 1) * (d + 2) / 2;

  // Honest strategy: same W-basis measurement on both sides; answers are the
  // low-degree encoding of the outcome string, restricted or evaluated.
  QuditLayout lay{{{cfg.n, cfg.field}}, 1};
  Strategy honest;
  honest.psi = BipartiteState::epr(lay);
  std::map<std::string, bool> seen;
  for (const auto& [w, qp] : items) {
    for (const Question* q : {&qp.x0, &qp.x1}) {
      std::string key = q->dump();
      if (seen.count(key)) continue;
      seen[key] = true;
      char W = (*q)["W"].get<std::string>()[0];
      if ((*q)["role"] == "surface") {
        AffineSubspace s = subspace_from_json(cfg.field, (*q)["s"]);
        honest.set(*q, string_function_measurement(lay, f, cfg.n, W, [&](const Vec& u) {
          MultiPoly g = ld_encode(ld, u);
          return json{{"f", poly_coeff_answer(g.restricted_to(s), d)}};
        }));
      } else {
        Point u = (*q)["u"].get<Point>();
        honest.set(*q, string_function_measurement(lay, f, cfg.n, W, [&](const Vec& str) {
          MultiPoly g = ld_encode(ld, str);
          return json{{"v", g.eval(u)}};
        }));
      }
    }
  }
  pack.honest = honest;
  pack.lambda = RegisterParams{1, {cfg.n}, {cfg.field}};
  return pack;
}

GamePack pauli_basis_game(const PauliBasisConfig& cfg, const std::optional<Game>& core) {
  GamePack pack;
  const Gf& f = *cfg.field;
  LdParams ld = cfg.ld();
  CanonicalMaps maps(ld);
  GamePack core_pack;
  Game core_game;
  if (core) {
    core_game = *core;
  } else {
    core_pack = ld_pauli_subgame(cfg);
    core_game = core_pack.game;
  }
  if (!core_game.enumerable)
    throw std::invalid_argument("pauli_basis_game: core subgame must be enumerable");
  std::vector<std::pair<Rational, QuestionPair>> items;
  Rational half(1, 2);
  for (const auto& [w, qp] : *core_game.enumerable) items.emplace_back(w * half, qp);
  // cross-check: W uniform, w uniform in F_q^m, b flip
  uint64_t points = 1;
  for (uint32_t i = 0; i < cfg.m(); ++i) points *= f.q();
  Rational cross_w = half * Rational(1, 2 * points * 2);
  for (const char* W : {"Z", "X"}) {
    for (const Vec& pt : all_vectors(f, cfg.m())) {
      json full = json{{"game", "basis"}, {"W", W}};
      json point = json{{"game", "basis"}, {"W", W}, {"w", pt}};
      items.emplace_back(cross_w, QuestionPair{full, point});
      items.emplace_back(cross_w, QuestionPair{point, full});
    }
  }
  pack.game.name = "pauli-basis";
  pack.game.params = cfg.descriptor();
  pack.game.enumerable = items;
  auto core_accept = core_game.accept;
  GfPtr fp = cfg.field;
  LdParams ldc = ld;
  pack.game.accept = [core_accept, fp, ldc](const Question& x0, const Question& x1,
                                            const Answer& a0, const Answer& a1) -> bool {
    bool is_cross = x0.is_object() && x0.value("game", "") == "basis";
    if (!is_cross) return core_accept(x0, x1, a0, a1);
    const Question* fq = &x0;
    const Answer* fa = &a0;
    const Answer* pa = &a1;
    const Question* pq = &x1;
    if (x0.contains("w")) {
      fq = &x1;
      fa = &a1;
      pa = &a0;
      pq = &x0;
    }
    (void)fq;
    if (!fa->contains("u") || !pa->contains("v")) return false;
    Vec u = (*fa)["u"].get<Vec>();
    Point w = (*pq)["w"].get<Point>();
    MultiPoly g = ld_encode(ldc, u);
    return g.eval(w) == (*pa)["v"].get<uint32_t>();
  };
  pack.game.qlength = cfg.m() + 1;
  pack.game.alength = cfg.n;

  QuditLayout lay{{{cfg.n, cfg.field}}, 1};
  Strategy honest = core ? Strategy{} : *core_pack.honest;
  if (core) honest.psi = BipartiteState::epr(lay);
  for (const char* W : {"Z", "X"}) {
    json full = json{{"game", "basis"}, {"W", W}};
    honest.set(full, string_function_measurement(lay, f, cfg.n, (*W), [&](const Vec& u) {
      return json{{"u", u}};
    }));
    for (const Vec& pt : all_vectors(f, cfg.m())) {
      json point = json{{"game", "basis"}, {"W", W}, {"w", pt}};
      honest.set(point, string_function_measurement(lay, f, cfg.n, (*W), [&](const Vec& u) {
        MultiPoly g = ld_encode(ld, u);
        return json{{"v", g.eval(pt)}};
      }));
    }
  }
  pack.honest = honest;
  pack.lambda = RegisterParams{1, {cfg.n}, {cfg.field}};
  if (!cfg.condition_holds())
    pack.notes["pauli_basis_condition"] = "waived by desk-scale override";
  return pack;
}

Strategy pauli_basis_wrong_basis_cheater(const PauliBasisConfig& cfg) {
  // Answers full-string W queries by measuring the other basis.
  GamePack pack = pauli_basis_game(cfg);
  Strategy s = *pack.honest;
  const Gf& f = *cfg.field;
  QuditLayout lay{{{cfg.n, cfg.field}}, 1};
  for (const char* W : {"Z", "X"}) {
    char other = (*W == 'Z') ? 'X' : 'Z';
    json full = json{{"game", "basis"}, {"W", W}};
    s.set(full, string_function_measurement(lay, f, cfg.n, other, [&](const Vec& u) {
      return json{{"u", u}};
    }));
  }
  return s;
}

Strategy ld_pauli_mismatched_cheater(const PauliBasisConfig& cfg) {
  // Point prover answers from a fixed string independent of its measurement.
  GamePack pack = ld_pauli_subgame(cfg);
  Strategy s = *pack.honest;
  LdParams ld = cfg.ld();
  Vec fixed(cfg.n, 1);
  MultiPoly g = ld_encode(ld, fixed);
  QuditLayout lay = s.psi.layout();
  for (const auto& [key, m] : pack.honest->meas) {
    Question q = json::parse(key);
    if (q.value("role", "") != "point") continue;
    Point u = q["u"].get<Point>();
    Measurement cheat;
    cheat.kind = Measurement::Kind::Projective;
    cheat.elems.emplace_back(json{{"v", g.eval(u)}},
                             Mat::Identity(lay.side_dim(), lay.side_dim()));
    s.set(q, cheat);
  }
  return s;
}

// --- Data hiding --------------------------------------------------------------

GamePack data_hiding_game(const RegisterParams& lambda, const json& x_aux) {
  GamePack pack;
  uint32_t k = lambda.k;
  std::vector<std::string> wx(k, "bot");
  wx[k - 1] = "H";
  Question x = make_reg_question(wx, x_aux);
  std::vector<std::pair<Rational, QuestionPair>> items;
  Rational quarter(1, 4);
  for (const char* W : {"Z", "X"}) {
    std::vector<std::string> wxp = wx;
    wxp[k - 1] = W;
    Question xp = make_reg_question(wxp, x_aux);
    items.emplace_back(quarter, QuestionPair{x, xp});
    items.emplace_back(quarter, QuestionPair{xp, x});
  }
  pack.game.name = "data-hiding";
  pack.game.params = json{{"lambda", lambda.descriptor()}, {"x", x_aux}};
  pack.game.enumerable = items;
  pack.game.accept = [](const Question&, const Question&, const Answer& a0,
                        const Answer& a1) -> bool {
    return a0.contains("a2") && a1.contains("a2") && a0["a2"] == a1["a2"];
  };
  pack.lambda = lambda;

  // Honest strategy: a2 is the Z-reading of a shared aux EPR qubit; the
  // hidden register is never touched.
  QuditLayout lay = lambda.layout(2);
  Strategy honest;
  honest.psi = BipartiteState::epr(lay);
  const Gf& fk = *lambda.fields[k - 1];
  uint32_t nk = lambda.n[k - 1];
  auto aux_z = [&](uint32_t z) {
    Mat m = Mat::Zero(2, 2);
    m(z, z) = 1;
    return on_aux(lay, m);
  };
  {
    Measurement m;
    m.kind = Measurement::Kind::Projective;
    for (uint32_t z = 0; z < 2; ++z)
      m.elems.emplace_back(json{{"u", null_u_block(k)}, {"a2", z}}, aux_z(z));
    honest.set(x, m);
  }
  for (const char* W : {"Z", "X"}) {
    std::vector<std::string> wxp = wx;
    wxp[k - 1] = W;
    Question xp = make_reg_question(wxp, x_aux);
    Measurement m;
    m.kind = Measurement::Kind::Projective;
    for (const Vec& u : all_vectors(fk, nk)) {
      for (uint32_t z = 0; z < 2; ++z) {
        json ub = null_u_block(k);
        ub[k - 1] = u;
        m.elems.emplace_back(json{{"u", ub}, {"a2", z}},
                             on_register(lay, k - 1, tau_proj(fk, nk, *W, u)) * aux_z(z));
      }
    }
    honest.set(xp, m);
  }
  pack.honest = honest;
  return pack;
}

Strategy data_hiding_zread_cheater(const RegisterParams& lambda, const json& x_aux) {
  uint32_t k = lambda.k;
  std::vector<std::string> wx(k, "bot");
  wx[k - 1] = "H";
  Question x = make_reg_question(wx, x_aux);
  QuditLayout lay = lambda.layout(1);
  Strategy s;
  s.psi = BipartiteState::epr(lay);
  const Gf& fk = *lambda.fields[k - 1];
  uint32_t nk = lambda.n[k - 1];
  {
    Measurement m;
    m.kind = Measurement::Kind::Projective;
    for (const Vec& u : all_vectors(fk, nk))
      m.elems.emplace_back(json{{"u", null_u_block(k)}, {"a2", u}},
                           on_register(lay, k - 1, tau_proj(fk, nk, 'Z', u)));
    s.set(x, m);
  }
  for (const char* W : {"Z", "X"}) {
    std::vector<std::string> wxp = wx;
    wxp[k - 1] = W;
    Question xp = make_reg_question(wxp, x_aux);
    Measurement m;
    m.kind = Measurement::Kind::Projective;
    for (const Vec& u : all_vectors(fk, nk)) {
      json ub = null_u_block(k);
      ub[k - 1] = u;
      m.elems.emplace_back(json{{"u", ub}, {"a2", u}},
                           on_register(lay, k - 1, tau_proj(fk, nk, *W, u)));
    }
    s.set(xp, m);
  }
  return s;
}

// --- Partial data hiding --------------------------------------------------------

namespace {

json phide_q(const char* role, const json& x_aux, const std::vector<Vec>* dirs) {
  json aux = json{{"phide", role}};
  if (!x_aux.is_null()) aux["x"] = x_aux;
  if (dirs) aux["v"] = *dirs;
  std::string w = "bot";
  if (std::string(role) == "z-x-v") w = "Z";
  if (std::string(role) == "dot") w = "X";
  return make_reg_question({w}, aux);
}

}  // namespace

GamePack partial_data_hiding_game(const RegisterParams& lambda,
                                  const std::vector<std::vector<Vec>>& S, const json& x_aux) {
  if (S.empty()) throw std::invalid_argument("partial_data_hiding_game: empty direction set");
  if (lambda.k != 1) throw std::invalid_argument("partial_data_hiding_game: k = 1 expected");
  GamePack pack;
  GfPtr f = lambda.fields[0];
  uint32_t n = lambda.n[0];
  std::vector<std::pair<Rational, QuestionPair>> items;
  Rational base(1, S.size() * 4 * 2);  // v uniform, four tests, b flip
  for (const auto& v : S) {
    Question q_bx = phide_q("bot-x-v", x_aux, &v);
    Question q_zx = phide_q("z-x-v", x_aux, &v);
    Question q_bX = phide_q("bot-x-Xv", x_aux, &v);
    Question q_bbX = phide_q("bot-bot-Xv", nullptr, &v);
    Question q_dot = phide_q("dot", nullptr, nullptr);
    auto both = [&](const Question& a, const Question& b) {
      items.emplace_back(base, QuestionPair{a, b});
      items.emplace_back(base, QuestionPair{b, a});
    };
    both(q_bx, q_zx);   // test 1
    both(q_bx, q_bX);   // test 2
    both(q_dot, q_bbX); // test 3
    both(q_bX, q_bbX);  // test 4
  }
  pack.game.name = "partial-data-hiding";
  pack.game.params = json{{"lambda", lambda.descriptor()}, {"x", x_aux}, {"S", S}};
  pack.game.enumerable = items;
  GfPtr fp = f;
  pack.game.accept = [fp](const Question& x0, const Question& x1, const Answer& a0,
                          const Answer& a1) -> bool {
    auto role = [](const Question& q) { return q["aux"]["phide"].get<std::string>(); };
    std::string r0 = role(x0), r1 = role(x1);
    auto is_pair = [&](const char* a, const char* b, const Question*& qa, const Question*& qb,
                       const Answer*& aa, const Answer*& ab) {
      if (r0 == a && r1 == b) {
        qa = &x0; qb = &x1; aa = &a0; ab = &a1;
        return true;
      }
      if (r1 == a && r0 == b) {
        qa = &x1; qb = &x0; aa = &a1; ab = &a0;
        return true;
      }
      return false;
    };
    const Question *qa, *qb;
    const Answer *aa, *ab;
    if (is_pair("bot-x-v", "z-x-v", qa, qb, aa, ab) ||
        is_pair("bot-x-v", "bot-x-Xv", qa, qb, aa, ab))
      return aa->contains("a2") && ab->contains("a2") && (*aa)["a2"] == (*ab)["a2"];
    if (is_pair("dot", "bot-bot-Xv", qa, qb, aa, ab)) {
      if (!aa->contains("u") || (*aa)["u"][0].is_null() || !ab->contains("xp")) return false;
      Vec a1v = (*aa)["u"][0].get<Vec>();
      auto dirs = (*qb)["aux"]["v"].get<std::vector<Vec>>();
      auto xp = (*ab)["xp"].get<Vec>();
      if (xp.size() != dirs.size()) return false;
      for (size_t i = 0; i < dirs.size(); ++i)
        if (xp[i] != fp->dot(dirs[i], a1v)) return false;
      return true;
    }
    if (is_pair("bot-x-Xv", "bot-bot-Xv", qa, qb, aa, ab))
      return aa->contains("xp") && ab->contains("xp") && (*aa)["xp"] == (*ab)["xp"];
    return false;
  };
  pack.lambda = lambda;

  // Honest strategy: surface projector plus trivial aux answer (the surface
  // label itself plays the role of a2).
  QuditLayout lay = lambda.layout(1);
  Strategy honest;
  honest.psi = BipartiteState::epr(lay);
  const Gf& gf = *f;
  for (const auto& v : S) {
    RegOp surf{RegOp::Kind::Surface, v};
    RegOp surfz{RegOp::Kind::SurfaceZ, v};
    RegOp surfx{RegOp::Kind::SurfaceXPartial, v};
    RegOp xpart{RegOp::Kind::XPartial, v};
    auto to_meas = [&](const RegOp& op, const std::function<json(const json&)>& relabel) {
      Measurement m = regop_measurement(gf, n, op);
      Measurement out;
      out.kind = m.kind;
      for (auto& [label, e] : m.elems) out.elems.emplace_back(relabel(label), e);
      return out;
    };
    auto surf_label = [](const json& l) { return l["surface"]; };
    honest.set(phide_q("bot-x-v", x_aux, &v), to_meas(surf, [&](const json& l) {
      return json{{"u", null_u_block(1)}, {"a2", json{{"s", surf_label(l)}}}};
    }));
    honest.set(phide_q("z-x-v", x_aux, &v), to_meas(surfz, [&](const json& l) {
      json ub = null_u_block(1);
      ub[0] = l["z"];
      return json{{"u", ub}, {"a2", json{{"s", surf_label(l)}}}};
    }));
    honest.set(phide_q("bot-x-Xv", x_aux, &v), to_meas(surfx, [&](const json& l) {
      return json{{"u", null_u_block(1)}, {"a2", json{{"s", surf_label(l)}}},
                  {"xp", l["xpart"]}};
    }));
    honest.set(phide_q("bot-bot-Xv", nullptr, &v), to_meas(xpart, [&](const json& l) {
      return json{{"u", null_u_block(1)}, {"xp", l["xpart"]}};
    }));
  }
  RegOp xfull{RegOp::Kind::XFull, {}};
  Measurement mdot = regop_measurement(gf, n, xfull);
  Measurement mdot_lab;
  mdot_lab.kind = mdot.kind;
  for (auto& [label, e] : mdot.elems) {
    json ub = null_u_block(1);
    ub[0] = label["x"];
    mdot_lab.elems.emplace_back(json{{"u", ub}}, e);
  }
  honest.set(phide_q("dot", nullptr, nullptr), mdot_lab);
  pack.honest = honest;
  return pack;
}

Strategy partial_hiding_zread_cheater(const RegisterParams& lambda,
                                      const std::vector<std::vector<Vec>>& S, const json& x_aux) {
  GamePack pack = partial_data_hiding_game(lambda, S, x_aux);
  Strategy s = *pack.honest;
  GfPtr f = lambda.fields[0];
  uint32_t n = lambda.n[0];
  const Gf& gf = *f;
  // On (bot, x, v) and (Z, x, v) the cheater reads the register fully in Z
  // and leaks the point as a2.
  for (const auto& v : S) {
    RegOp zfull{RegOp::Kind::ZFull, {}};
    Measurement m = regop_measurement(gf, n, zfull);
    Measurement m1, m2;
    m1.kind = m2.kind = m.kind;
    for (auto& [label, e] : m.elems) {
      m1.elems.emplace_back(json{{"u", null_u_block(1)}, {"a2", json{{"z", label["z"]}}}}, e);
      json ub = null_u_block(1);
      ub[0] = label["z"];
      m2.elems.emplace_back(json{{"u", ub}, {"a2", json{{"z", label["z"]}}}}, e);
    }
    s.set(phide_q("bot-x-v", x_aux, &v), m1);
    s.set(phide_q("z-x-v", x_aux, &v), m2);
  }
  return s;
}

// --- Introspective games (statevector scale) -----------------------------------

namespace {

// Question builders for the ihide family on (k+1) registers: register 0 is
// the point/surface register, 1..k the direction registers.
struct IhideQs {
  Question q_surf;   // (bot, Z^k, x)
  Question q_zx;     // (Z, Z^k, x)
  Question q_surfX;  // (bot, Z^k, x, {X})
  Question q_botX;   // (bot, Z^k, bot, {X})
  Question q_xfull;  // (X, Z^k, empty)
};

IhideQs ihide_questions(uint32_t k, const json& x_aux) {
  IhideQs qs;
  std::vector<std::string> w(k + 1, "Z");
  w[0] = "bot";
  qs.q_surf = make_reg_question(w, json{{"ihide", "x"}, {"x", x_aux}});
  std::vector<std::string> wz = w;
  wz[0] = "Z";
  qs.q_zx = make_reg_question(wz, json{{"ihide", "x"}, {"x", x_aux}});
  qs.q_surfX = make_reg_question(w, json{{"ihide", "x-X"}, {"x", x_aux}});
  qs.q_botX = make_reg_question(w, json{{"ihide", "botX"}});
  std::vector<std::string> wx = w;
  wx[0] = "X";
  qs.q_xfull = make_reg_question(wx, json{{"ihide", "none"}});
  return qs;
}

std::vector<std::pair<Rational, QuestionPair>> ihide_items(const IhideQs& qs, Rational base) {
  std::vector<std::pair<Rational, QuestionPair>> items;
  Rational w = base * Rational(1, 8);
  auto both = [&](const Question& a, const Question& b) {
    items.emplace_back(w, QuestionPair{a, b});
    items.emplace_back(w, QuestionPair{b, a});
  };
  both(qs.q_surf, qs.q_zx);
  both(qs.q_surf, qs.q_surfX);
  both(qs.q_xfull, qs.q_botX);
  both(qs.q_surfX, qs.q_botX);
  return items;
}

// Direction tuple read from the u-block of an answer (registers 1..k).
std::vector<Vec> dirs_from_answer(const Answer& a, uint32_t k) {
  std::vector<Vec> dirs;
  for (uint32_t i = 1; i <= k; ++i) {
    if (a["u"][i].is_null()) throw std::invalid_argument("missing direction outcome");
    dirs.push_back(a["u"][i].get<Vec>());
  }
  return dirs;
}

// The ihide acceptance rules; `surface_check` additionally enforces the
// Correct Surface Check on test 1 given the field.
bool ihide_accept(GfPtr f, uint32_t k, const Question& x0, const Question& x1, const Answer& a0,
                  const Answer& a1, bool surface_check) {
  auto tag = [](const Question& q) { return q["aux"]["ihide"].get<std::string>(); };
  auto wfirst = [](const Question& q) { return q["w"][0].get<std::string>(); };
  std::string t0 = tag(x0) + ":" + wfirst(x0);
  std::string t1 = tag(x1) + ":" + wfirst(x1);
  auto ordered = [&](const std::string& a, const std::string& b, const Question*& qa,
                     const Question*& qb, const Answer*& aa, const Answer*& ab) {
    if (t0 == a && t1 == b) {
      qa = &x0; qb = &x1; aa = &a0; ab = &a1;
      return true;
    }
    if (t1 == a && t0 == b) {
      qa = &x1; qb = &x0; aa = &a1; ab = &a0;
      return true;
    }
    return false;
  };
  const Question *qa, *qb;
  const Answer *aa, *ab;
  try {
    if (ordered("x:bot", "x:Z", qa, qb, aa, ab)) {
      if ((*aa)["a2"] != (*ab)["a2"]) return false;
      if (surface_check) {
        // reported surface must equal the flat through the Z-player's point
        auto dirs = dirs_from_answer(*ab, k);
        Vec pt = (*ab)["u"][0].get<Vec>();
        AffineSubspace s = AffineSubspace::from_point_dirs(f, pt, dirs);
        if ((*aa)["a2"]["s"] != subspace_to_json(s)) return false;
      }
      return true;
    }
    if (ordered("x:bot", "x-X:bot", qa, qb, aa, ab)) return (*aa)["a2"] == (*ab)["a2"];
    if (ordered("none:X", "botX:bot", qa, qb, aa, ab)) {
      auto va = dirs_from_answer(*aa, k);
      auto vb = dirs_from_answer(*ab, k);
      if (va != vb) return false;
      Vec xs = (*aa)["u"][0].get<Vec>();
      Vec xp = (*ab)["xp"].get<Vec>();
      if (xp.size() != k) return false;
      for (uint32_t i = 0; i < k; ++i)
        if (xp[i] != f->dot(va[i], xs)) return false;
      return true;
    }
    if (ordered("x-X:bot", "botX:bot", qa, qb, aa, ab))
      return (*aa)["xp"] == (*ab)["xp"];
  } catch (const std::exception&) {
    return false;
  }
  return false;
}

// Honest ihide measurements on the (k+1)-register layout; `a2_of` maps the
// measured surface (and directions) to the a2 token.
void add_ihide_measurements(Strategy& s, const RegisterParams& lambda, const IhideQs& qs,
                            const std::function<json(const AffineSubspace&,
                                                     const std::vector<Vec>&)>& a2_of) {
  GfPtr f = lambda.fields[0];
  const Gf& gf = *f;
  uint32_t n = lambda.n[0];
  uint32_t k = lambda.k - 1;
  QuditLayout lay = s.psi.layout();
  // enumerate direction tuples
  std::vector<std::vector<Vec>> tuples{{}};
  for (uint32_t i = 0; i < k; ++i) {
    std::vector<std::vector<Vec>> next;
    for (const auto& t : tuples)
      for (const Vec& v : all_vectors(*lambda.fields[i + 1], lambda.n[i + 1])) {
        auto t2 = t;
        t2.push_back(v);
        next.push_back(t2);
      }
    tuples = next;
  }
  auto dir_proj = [&](const std::vector<Vec>& dirs) {
    Mat m = Mat::Identity(lay.side_dim(), lay.side_dim());
    for (uint32_t i = 0; i < k; ++i)
      m = m * on_register(lay, i + 1,
                          tau_proj(*lambda.fields[i + 1], lambda.n[i + 1], 'Z', dirs[i]));
    return m;
  };
  auto build = [&](const RegOp::Kind kind, const std::vector<Vec>& dirs,
                   const std::function<json(const json&)>& relabel, Measurement& out) {
    RegOp op{kind, dirs};
    Measurement m = regop_measurement(gf, n, op);
    Mat dp = dir_proj(dirs);
    for (auto& [label, e] : m.elems)
      out.elems.emplace_back(relabel(label), on_register(lay, 0, e) * dp);
  };
  Measurement m_surf, m_zx, m_surfX, m_botX, m_xfull;
  m_surf.kind = m_zx.kind = m_surfX.kind = m_botX.kind = m_xfull.kind =
      Measurement::Kind::Projective;
  for (const auto& dirs : tuples) {
    json ub = null_u_block(lambda.k);
    for (uint32_t i = 0; i < k; ++i) ub[i + 1] = dirs[i];
    build(RegOp::Kind::Surface, dirs, [&](const json& l) {
      AffineSubspace sj = subspace_from_json(f, l["surface"]);
      return json{{"u", ub}, {"a2", a2_of(sj, dirs)}};
    }, m_surf);
    build(RegOp::Kind::SurfaceZ, dirs, [&](const json& l) {
      json ub2 = ub;
      ub2[0] = l["z"];
      AffineSubspace sj = subspace_from_json(f, l["surface"]);
      return json{{"u", ub2}, {"a2", a2_of(sj, dirs)}};
    }, m_zx);
    build(RegOp::Kind::SurfaceXPartial, dirs, [&](const json& l) {
      AffineSubspace sj = subspace_from_json(f, l["surface"]);
      return json{{"u", ub}, {"a2", a2_of(sj, dirs)}, {"xp", l["xpart"]}};
    }, m_surfX);
    build(RegOp::Kind::XPartial, dirs, [&](const json& l) {
      return json{{"u", ub}, {"xp", l["xpart"]}};
    }, m_botX);
    build(RegOp::Kind::XFull, dirs, [&](const json& l) {
      json ub2 = ub;
      ub2[0] = l["x"];
      return json{{"u", ub2}};
    }, m_xfull);
  }
  s.set(qs.q_surf, m_surf);
  s.set(qs.q_zx, m_zx);
  s.set(qs.q_surfX, m_surfX);
  s.set(qs.q_botX, m_botX);
  s.set(qs.q_xfull, m_xfull);
}

// Deterministic toy global polynomial of total degree <= d on F_q^n.
MultiPoly toy_global_poly(GfPtr f, uint32_t n, uint32_t d) {
  MultiPoly g = MultiPoly::constant(f, n, 1);
  if (d >= 2 && n >= 2)
    g = g + MultiPoly::variable(f, n, 0) * MultiPoly::variable(f, n, 1);
  if (d >= 1) g = g + MultiPoly::variable(f, n, n - 1);
  return g;
}

}  // namespace

GamePack intro_hide_game(const RegisterParams& lambda, const json& x_aux) {
  GamePack pack;
  uint32_t k = lambda.k - 1;
  IhideQs qs = ihide_questions(k, x_aux);
  pack.game.name = "intro-hide";
  pack.game.params = json{{"lambda", lambda.descriptor()}, {"x", x_aux}};
  pack.game.enumerable = ihide_items(qs, Rational::one());
  GfPtr f = lambda.fields[0];
  pack.game.accept = [f, k](const Question& x0, const Question& x1, const Answer& a0,
                            const Answer& a1) {
    return ihide_accept(f, k, x0, x1, a0, a1, /*surface_check=*/false);
  };
  pack.lambda = lambda;
  Strategy honest;
  honest.psi = BipartiteState::epr(lambda.layout(1));
  add_ihide_measurements(honest, lambda, qs, [](const AffineSubspace& s, const std::vector<Vec>&) {
    return json{{"s", subspace_to_json(s)}};
  });
  pack.honest = honest;
  return pack;
}

GamePack intro_surface_sampler(const RegisterParams& lambda, uint32_t d) {
  GamePack pack;
  uint32_t k = lambda.k - 1;
  GfPtr f = lambda.fields[0];
  uint32_t n = lambda.n[0];
  IhideQs qs = ihide_questions(k, json{{"role", "surface"}, {"d", d}});
  pack.game.name = "intro-surface-sampler";
  pack.game.params = json{{"lambda", lambda.descriptor()}, {"d", d}};
  pack.game.enumerable = ihide_items(qs, Rational::one());
  pack.game.accept = [f, k](const Question& x0, const Question& x1, const Answer& a0,
                            const Answer& a1) {
    return ihide_accept(f, k, x0, x1, a0, a1, /*surface_check=*/true);
  };
  pack.lambda = lambda;
  MultiPoly g = toy_global_poly(f, n, d);
  Strategy honest;
  honest.psi = BipartiteState::epr(lambda.layout(1));
  uint32_t dd = d;
  add_ihide_measurements(honest, lambda, qs,
                         [g, dd](const AffineSubspace& s, const std::vector<Vec>&) {
                           return json{{"s", subspace_to_json(s)},
                                       {"f", poly_coeff_answer(g.restricted_to(s), dd)}};
                         });
  pack.honest = honest;
  pack.notes["global"] = g.str();
  return pack;
}

Strategy lying_surface_cheater(const RegisterParams& lambda, uint32_t d) {
  GamePack pack = intro_surface_sampler(lambda, d);
  GfPtr f = lambda.fields[0];
  uint32_t n = lambda.n[0];
  MultiPoly g = toy_global_poly(f, n, d);
  IhideQs qs = ihide_questions(lambda.k - 1, json{{"role", "surface"}, {"d", d}});
  Strategy s;
  s.psi = BipartiteState::epr(lambda.layout(1));
  // Shift the reported surface by the first vector outside its span.
  auto shift = [f, n](const AffineSubspace& sp, const std::vector<Vec>& dirs) {
    for (const Vec& cand : all_vectors(*f, n)) {
      bool zero = std::all_of(cand.begin(), cand.end(), [](uint32_t c) { return c == 0; });
      if (zero) continue;
      Vec moved(sp.intercept);
      for (uint32_t j = 0; j < n; ++j) moved[j] = f->add(moved[j], cand[j]);
      AffineSubspace alt = AffineSubspace::from_point_dirs(f, moved, dirs);
      if (!(alt == sp)) return alt;
    }
    return sp;
  };
  uint32_t dd = d;
  add_ihide_measurements(s, lambda, qs,
                         [g, dd, shift](const AffineSubspace& sp, const std::vector<Vec>& dirs) {
                           AffineSubspace alt = shift(sp, dirs);
                           return json{{"s", subspace_to_json(alt)},
                                       {"f", poly_coeff_answer(g.restricted_to(alt), dd)}};
                         });
  return s;
}

namespace {

Question intro_point_question(const RegisterParams& lambda, uint32_t pt_reg, uint32_t d) {
  std::vector<std::string> w(lambda.k, "H");
  w[pt_reg] = "Z";
  return make_reg_question(w, json{{"icc", "point"}, {"pt", pt_reg}, {"d", d}});
}

Measurement intro_point_measurement(const RegisterParams& lambda, const QuditLayout& lay,
                                    uint32_t pt_reg, const MultiPoly& g) {
  Measurement m;
  m.kind = Measurement::Kind::Projective;
  const Gf& f = *lambda.fields[pt_reg];
  for (const Vec& u : all_vectors(f, lambda.n[pt_reg])) {
    json ub = null_u_block(lambda.k);
    ub[pt_reg] = u;
    m.elems.emplace_back(json{{"u", ub}, {"a2", json{{"v", g.eval(u)}}}},
                         on_register(lay, pt_reg, tau_proj(f, lambda.n[pt_reg], 'Z', u)));
  }
  return m;
}

bool cross_check_accept(GfPtr f, uint32_t pt_reg, uint32_t d, const Question& x0,
                        const Question& x1, const Answer& a0, const Answer& a1) {
  const Answer* sa = &a0;
  const Answer* pa = &a1;
  if (x1["aux"].contains("role") || (x1["aux"].contains("ihide"))) {
    sa = &a1;
    pa = &a0;
  } else if (!(x0["aux"].contains("role") || x0["aux"].contains("ihide"))) {
    return false;
  }
  (void)x0;
  (void)x1;
  try {
    AffineSubspace s = subspace_from_json(f, (*sa)["a2"]["s"]);
    Vec u = (*pa)["u"][pt_reg].get<Vec>();
    if (!s.contains(u)) return false;
    const json& fans = (*sa)["a2"]["f"];
    MultiPoly fp = MultiPoly::from_coeff_list_graded_lex(
        f, fans.at("arity").get<uint32_t>(), fans.at("cap").get<uint32_t>(),
        fans.at("coeffs").get<std::vector<uint32_t>>());
    if (fp.arity() != s.k || fp.total_degree() > static_cast<int>(d)) return false;
    return fp.eval(s.coordinates_of(u)) == (*pa)["a2"]["v"].get<uint32_t>();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

GamePack intro_cross_check(const RegisterParams& lambda, uint32_t d) {
  GamePack pack;
  uint32_t k = lambda.k - 1;
  GfPtr f = lambda.fields[0];
  uint32_t n = lambda.n[0];
  IhideQs qs = ihide_questions(k, json{{"role", "surface"}, {"d", d}});
  Question pq = intro_point_question(lambda, 0, d);
  std::vector<std::pair<Rational, QuestionPair>> items;
  items.emplace_back(Rational(1, 2), QuestionPair{qs.q_surf, pq});
  items.emplace_back(Rational(1, 2), QuestionPair{pq, qs.q_surf});
  pack.game.name = "intro-cross-check";
  pack.game.params = json{{"lambda", lambda.descriptor()}, {"d", d}};
  pack.game.enumerable = items;
  pack.game.accept = [f, d](const Question& x0, const Question& x1, const Answer& a0,
                            const Answer& a1) {
    return cross_check_accept(f, 0, d, x0, x1, a0, a1);
  };
  pack.lambda = lambda;
  MultiPoly g = toy_global_poly(f, n, d);
  Strategy honest;
  honest.psi = BipartiteState::epr(lambda.layout(1));
  uint32_t dd = d;
  add_ihide_measurements(honest, lambda, qs,
                         [g, dd](const AffineSubspace& s, const std::vector<Vec>&) {
                           return json{{"s", subspace_to_json(s)},
                                       {"f", poly_coeff_answer(g.restricted_to(s), dd)}};
                         });
  honest.set(pq, intro_point_measurement(lambda, honest.psi.layout(), 0, g));
  pack.honest = honest;
  return pack;
}

GamePack intro_low_degree(const RegisterParams& lambda, uint32_t d, uint32_t ell) {
  if (ell != 1)
    throw std::invalid_argument("intro_low_degree: statevector variant supports ell = 1");
  GamePack sampler = intro_surface_sampler(lambda, d);
  GamePack cross = intro_cross_check(lambda, d);
  GamePack pack;
  pack.game.name = "intro-low-degree";
  pack.game.params = json{{"lambda", lambda.descriptor()}, {"d", d}};
  std::vector<std::pair<Rational, QuestionPair>> items;
  Rational half(1, 2);
  for (const auto& [w, qp] : *sampler.game.enumerable) items.emplace_back(w * half, qp);
  for (const auto& [w, qp] : *cross.game.enumerable) items.emplace_back(w * half, qp);
  pack.game.enumerable = items;
  auto acc_s = sampler.game.accept;
  auto acc_c = cross.game.accept;
  pack.game.accept = [acc_s, acc_c](const Question& x0, const Question& x1, const Answer& a0,
                                    const Answer& a1) {
    bool is_cross = (x0["aux"].contains("icc")) || (x1["aux"].contains("icc"));
    return is_cross ? acc_c(x0, x1, a0, a1) : acc_s(x0, x1, a0, a1);
  };
  pack.lambda = lambda;
  Strategy honest = *cross.honest;  // includes the ihide questions and the point question
  pack.honest = honest;
  return pack;
}

std::vector<std::pair<Rational, std::string>> intro_cross_question_distribution(
    const RegisterParams& lambda) {
  // Closed form of the honest measurements: directions uniform, point
  // uniform, surface the flat through the point.
  GfPtr f = lambda.fields[0];
  const Gf& gf = *f;
  uint32_t n = lambda.n[0];
  uint32_t k = lambda.k - 1;
  uint64_t per = 1;
  for (uint32_t i = 0; i < n; ++i) per *= gf.q();
  std::vector<std::vector<Vec>> tuples{{}};
  for (uint32_t i = 0; i < k; ++i) {
    std::vector<std::vector<Vec>> next;
    for (const auto& t : tuples)
      for (const Vec& v : all_vectors(gf, n)) {
        auto t2 = t;
        t2.push_back(v);
        next.push_back(t2);
      }
    tuples = next;
  }
  std::map<std::string, Rational> acc;
  uint64_t total = tuples.size() * per;
  for (const auto& dirs : tuples) {
    for (const Vec& u : all_vectors(gf, n)) {
      AffineSubspace s = AffineSubspace::from_point_dirs(f, u, dirs);
      json key = json::array({dirs, s.key(), u});
      auto it = acc.find(key.dump());
      Rational w(1, total);
      if (it == acc.end())
        acc[key.dump()] = w;
      else
        it->second = it->second + w;
    }
  }
  std::vector<std::pair<Rational, std::string>> out;
  for (auto& [kk, w] : acc) out.emplace_back(w, kk);
  return out;
}

std::vector<std::pair<Rational, std::string>> classical_surface_question_distribution(
    GfPtr f, uint32_t m, uint32_t k) {
  SurfaceTestConfig cfg{f, m, 1, k, 1};
  std::map<std::string, Rational> acc;
  for (const auto& [w, d] : enumerate_surface_draws(cfg)) {
    json key = json::array({d.dirs, d.s.key(), d.u});
    auto it = acc.find(key.dump());
    if (it == acc.end())
      acc[key.dump()] = w;
    else
      it->second = it->second + w;
  }
  std::vector<std::pair<Rational, std::string>> out;
  for (auto& [kk, w] : acc) out.emplace_back(w, kk);
  return out;
}

// --- Intersecting lines ---------------------------------------------------------

GamePack intersecting_lines_game(GfPtr f, uint32_t n, uint32_t d) {
  GamePack pack;
  pack.store = std::make_shared<PolyStore>();
  const Gf& gf = *f;
  std::vector<std::pair<Rational, QuestionPair>> items;
  uint64_t per = 1;
  for (uint32_t i = 0; i < n; ++i) per *= gf.q();
  Rational w(1, per * per);
  for (const Vec& u : all_vectors(gf, n)) {
    for (const Vec& v : all_vectors(gf, n)) {
      AffineSubspace ell = AffineSubspace::from_point_dirs(f, u, {v});
      AffineSubspace ellp = AffineSubspace::from_point_dirs(f, v, {u});
      json qa = json{{"il", "A"}, {"ell", subspace_to_json(ell)}, {"v", v}, {"d", d}};
      json qb = json{{"il", "B"}, {"ell", subspace_to_json(ellp)}, {"u", u}, {"d", d}};
      items.emplace_back(w, QuestionPair{qa, qb});
    }
  }
  pack.game.name = "intersecting-lines";
  pack.game.params = json{{"n", n}, {"q", gf.q()}, {"d", d}};
  pack.game.enumerable = items;
  PolyStorePtr store = pack.store;
  pack.game.accept = [f, store, d](const Question& x0, const Question& x1, const Answer& a0,
                                   const Answer& a1) -> bool {
    const Question* qa = x0["il"] == "A" ? &x0 : &x1;
    const Question* qb = x0["il"] == "A" ? &x1 : &x0;
    const Answer* aa = x0["il"] == "A" ? &a0 : &a1;
    const Answer* ab = x0["il"] == "A" ? &a1 : &a0;
    try {
      Vec v = (*qa)["v"].get<Vec>();
      Vec u = (*qb)["u"].get<Vec>();
      Vec w2(u.size());
      for (size_t i = 0; i < u.size(); ++i) w2[i] = f->add(u[i], v[i]);
      AffineSubspace ell = subspace_from_json(f, (*qa)["ell"]);
      AffineSubspace ellp = subspace_from_json(f, (*qb)["ell"]);
      if (!ell.contains(w2) || !ellp.contains(w2)) return false;
      if (poly_answer_degree(store, f, (*aa)["f"], ell.k) > static_cast<int>(d)) return false;
      if (poly_answer_degree(store, f, (*ab)["f"], ellp.k) > static_cast<int>(d)) return false;
      return eval_poly_answer(store, f, (*aa)["f"], ell, w2) ==
             eval_poly_answer(store, f, (*ab)["f"], ellp, w2);
    } catch (const std::exception&) {
      return false;
    }
  };
  return pack;
}

LineResponder honest_line_responder(const MultiPoly& g, PolyStorePtr store) {
  int pid = store->add(g);
  LineResponder r;
  r.respond = [pid](const Question&) { return json{{"f", json{{"pid", pid}}}}; };
  return r;
}

double exact_deterministic_value(const Game& g, const LineResponder& alice,
                                 const LineResponder& bob) {
  if (!g.enumerable) throw std::invalid_argument("exact_deterministic_value: not enumerable");
  double v = 0;
  for (const auto& [w, qp] : *g.enumerable) {
    json a0 = alice.respond(qp.x0);
    json a1 = bob.respond(qp.x1);
    if (g.accept(qp.x0, qp.x1, a0, a1)) v += w.to_double();
  }
  return v;
}

GamePack intro_intersect_game(const RegisterParams& lambda, uint32_t d) {
  if (lambda.k != 2) throw std::invalid_argument("intro_intersect_game: lambda = (2, n, q)");
  GfPtr f = lambda.fields[0];
  uint32_t n = lambda.n[0];
  const Gf& gf = *f;
  GamePack pack;
  pack.game.name = "intro-intersect";
  pack.game.params = json{{"lambda", lambda.descriptor()}, {"d", d}};
  pack.lambda = lambda;

  // Role questions over the two registers.
  auto lines_q = [&](uint32_t pt, uint32_t dir) {
    std::vector<std::string> w(2, "H");
    w[pt] = "bot";
    w[dir] = "Z";
    return make_reg_question(w, json{{"iline", "lines"}, {"pt", pt}, {"dir", dir}, {"d", d}});
  };
  auto zx_q = [&](uint32_t pt, uint32_t dir) {  // ihide test-1 partner: Z on pt
    std::vector<std::string> w(2, "H");
    w[pt] = "Z";
    w[dir] = "Z";
    return make_reg_question(w, json{{"iline", "lines-z"}, {"pt", pt}, {"dir", dir}, {"d", d}});
  };
  auto point_q = [&](uint32_t pt) {
    std::vector<std::string> w(2, "H");
    w[pt] = "Z";
    return make_reg_question(w, json{{"iline", "point"}, {"pt", pt}, {"d", d}});
  };

  std::vector<std::pair<Rational, QuestionPair>> items;
  // Branches 1 and 2 (1/4 each): abbreviated introspective LDTs consisting of
  // the surface-sampler consistency pair (with the Correct Surface Check) and
  // the cross-check, 1/2 each within the branch.
  for (uint32_t g1 = 0; g1 < 2; ++g1) {
    uint32_t pt = g1, dir = 1 - g1;
    Rational e(1, 16);  // 1/4 branch * 1/2 subtest * 1/2 flip
    items.emplace_back(e, QuestionPair{lines_q(pt, dir), zx_q(pt, dir)});
    items.emplace_back(e, QuestionPair{zx_q(pt, dir), lines_q(pt, dir)});
    items.emplace_back(e, QuestionPair{lines_q(pt, dir), point_q(pt)});
    items.emplace_back(e, QuestionPair{point_q(pt), lines_q(pt, dir)});
  }
  // Branch 3 (1/4): intersecting lines between the two lines provers.
  items.emplace_back(Rational(1, 8), QuestionPair{lines_q(0, 1), lines_q(1, 0)});
  items.emplace_back(Rational(1, 8), QuestionPair{lines_q(1, 0), lines_q(0, 1)});
  // Branch 4 (1/4): consistency between the two copies of Points_1.
  items.emplace_back(Rational(1, 4), QuestionPair{point_q(0), point_q(0)});
  pack.game.enumerable = items;

  pack.game.accept = [f](const Question& x0, const Question& x1, const Answer& a0,
                         const Answer& a1) -> bool {
    auto tag = [](const Question& q) { return q["aux"]["iline"].get<std::string>(); };
    std::string t0 = tag(x0), t1 = tag(x1);
    uint32_t d = x0["aux"]["d"].get<uint32_t>();
    try {
      if (t0 == "point" && t1 == "point") return a0["a2"]["v"] == a1["a2"]["v"];
      if (t0 == "lines" && t1 == "lines") {
        uint32_t pt0 = x0["aux"]["pt"].get<uint32_t>();
        const Answer& l1 = pt0 == 0 ? a0 : a1;  // lines1: pt register 0
        const Answer& l2 = pt0 == 0 ? a1 : a0;
        Vec v = l1["u"][1].get<Vec>();
        Vec u = l2["u"][0].get<Vec>();
        Vec w(u.size());
        for (size_t i = 0; i < u.size(); ++i) w[i] = f->add(u[i], v[i]);
        AffineSubspace ell = subspace_from_json(f, l1["a2"]["s"]);
        AffineSubspace ellp = subspace_from_json(f, l2["a2"]["s"]);
        if (!ell.contains(w) || !ellp.contains(w)) return false;
        auto evalf = [&](const Answer& a, const AffineSubspace& s) {
          const json& fa = a["a2"]["f"];
          MultiPoly p = MultiPoly::from_coeff_list_graded_lex(
              f, fa.at("arity").get<uint32_t>(), fa.at("cap").get<uint32_t>(),
              fa.at("coeffs").get<std::vector<uint32_t>>());
          if (p.arity() != s.k || p.total_degree() > static_cast<int>(d))
            throw std::invalid_argument("bad line poly");
          return p.eval(s.coordinates_of(w));
        };
        return evalf(l1, ell) == evalf(l2, ellp);
      }
      // lines vs lines-z: consistency pair with the Correct Surface Check
      if ((t0 == "lines" && t1 == "lines-z") || (t0 == "lines-z" && t1 == "lines")) {
        const Question& qz = t0 == "lines-z" ? x0 : x1;
        const Answer& az = t0 == "lines-z" ? a0 : a1;
        const Answer& al = t0 == "lines-z" ? a1 : a0;
        uint32_t pt = qz["aux"]["pt"].get<uint32_t>();
        uint32_t dir = qz["aux"]["dir"].get<uint32_t>();
        if (al["a2"] != az["a2"]) return false;
        Vec ptv = az["u"][pt].get<Vec>();
        Vec dv = az["u"][dir].get<Vec>();
        AffineSubspace s = AffineSubspace::from_point_dirs(f, ptv, {dv});
        return al["a2"]["s"] == subspace_to_json(s);
      }
      // lines vs point: cross-check f(u) = nu
      if ((t0 == "lines" && t1 == "point") || (t0 == "point" && t1 == "lines")) {
        const Question& ql = t0 == "lines" ? x0 : x1;
        const Answer& al = t0 == "lines" ? a0 : a1;
        const Answer& ap = t0 == "lines" ? a1 : a0;
        uint32_t pt = ql["aux"]["pt"].get<uint32_t>();
        AffineSubspace s = subspace_from_json(f, al["a2"]["s"]);
        Vec u = ap["u"][pt].get<Vec>();
        if (!s.contains(u)) return false;
        const json& fa = al["a2"]["f"];
        MultiPoly p = MultiPoly::from_coeff_list_graded_lex(
            f, fa.at("arity").get<uint32_t>(), fa.at("cap").get<uint32_t>(),
            fa.at("coeffs").get<std::vector<uint32_t>>());
        if (p.arity() != s.k || p.total_degree() > static_cast<int>(d)) return false;
        return p.eval(s.coordinates_of(u)) == ap["a2"]["v"].get<uint32_t>();
      }
    } catch (const std::exception&) {
      return false;
    }
    return false;
  };

  // Honest strategy from a single global polynomial.
  MultiPoly g = toy_global_poly(f, n, d);
  Strategy honest;
  honest.psi = BipartiteState::epr(lambda.layout(1));
  QuditLayout lay = honest.psi.layout();
  for (uint32_t pt = 0; pt < 2; ++pt) {
    uint32_t dir = 1 - pt;
    // lines: surface measurement on pt register, Z on dir register
    Measurement m_lines, m_zx;
    m_lines.kind = m_zx.kind = Measurement::Kind::Projective;
    for (const Vec& v : all_vectors(gf, n)) {
      RegOp surf{RegOp::Kind::Surface, {v}};
      Measurement base = regop_measurement(gf, n, surf);
      Mat dirproj = on_register(lay, dir, tau_proj(gf, n, 'Z', v));
      for (auto& [label, e] : base.elems) {
        AffineSubspace s = subspace_from_json(f, label["surface"]);
        json ub = null_u_block(2);
        ub[dir] = v;
        json a2 = json{{"s", subspace_to_json(s)},
                       {"f", poly_coeff_answer(g.restricted_to(s), d)}};
        m_lines.elems.emplace_back(json{{"u", ub}, {"a2", a2}},
                                   on_register(lay, pt, e) * dirproj);
      }
      RegOp surfz{RegOp::Kind::SurfaceZ, {v}};
      Measurement basez = regop_measurement(gf, n, surfz);
      for (auto& [label, e] : basez.elems) {
        AffineSubspace s = subspace_from_json(f, label["surface"]);
        json ub = null_u_block(2);
        ub[dir] = v;
        ub[pt] = label["z"];
        json a2 = json{{"s", subspace_to_json(s)},
                       {"f", poly_coeff_answer(g.restricted_to(s), d)}};
        m_zx.elems.emplace_back(json{{"u", ub}, {"a2", a2}}, on_register(lay, pt, e) * dirproj);
      }
    }
    honest.set(lines_q(pt, dir), m_lines);
    honest.set(zx_q(pt, dir), m_zx);
    // point prover on register pt
    Measurement m_pt;
    m_pt.kind = Measurement::Kind::Projective;
    for (const Vec& u : all_vectors(gf, n)) {
      json ub = null_u_block(2);
      ub[pt] = u;
      m_pt.elems.emplace_back(json{{"u", ub}, {"a2", json{{"v", g.eval(u)}}}},
                              on_register(lay, pt, tau_proj(gf, n, 'Z', u)));
    }
    honest.set(point_q(pt), m_pt);
  }
  pack.honest = honest;
  pack.notes["global"] = g.str();
  return pack;
}

// --- Register compilers ----------------------------------------------------------

Game compile_k_to_semi(const Game& g, const RegisterParams& lambda) {
  Game out;
  out.name = "k-to-semi(" + g.name + ")";
  out.params = json{{"inner", g.descriptor()}, {"lambda", lambda.descriptor()}};
  if (!g.enumerable) throw std::invalid_argument("compile_k_to_semi: enumerable games only");
  std::vector<std::pair<Rational, QuestionPair>> items;
  Rational half(1, 2);
  uint32_t k = lambda.k;
  for (const auto& [w, qp] : *g.enumerable) {
    // play branch
    items.emplace_back(w * half, qp);
    // data-hiding branch: if W_k = H, play hide-one on x; otherwise vacuous
    std::string wk = qp.x0["w"][k - 1].get<std::string>();
    if (wk == "H") {
      Rational hw = w * half * Rational(1, 4);
      for (const char* W : {"Z", "X"}) {
        Question xp = qp.x0;
        xp["w"][k - 1] = W;
        Question tag_x = qp.x0;
        tag_x["hide"] = true;
        Question tag_xp = xp;
        tag_xp["hide"] = true;
        items.emplace_back(hw, QuestionPair{tag_x, tag_xp});
        items.emplace_back(hw, QuestionPair{tag_xp, tag_x});
      }
    } else {
      Question tag0 = qp.x0;
      tag0["vacuous"] = true;
      Question tag1 = qp.x1;
      tag1["vacuous"] = true;
      items.emplace_back(w * half, QuestionPair{tag0, tag1});
    }
  }
  out.enumerable = items;
  auto inner = g.accept;
  out.accept = [inner](const Question& x0, const Question& x1, const Answer& a0,
                       const Answer& a1) -> bool {
    if (x0.contains("vacuous")) return true;
    if (x0.contains("hide")) return a0.contains("a2") && a1.contains("a2") && a0["a2"] == a1["a2"];
    return inner(x0, x1, a0, a1);
  };
  return out;
}

Game compile_semi_to_km1(const Game& g, const RegisterParams& lambda,
                         const PauliBasisConfig& basis_cfg) {
  GamePack basis = pauli_basis_game(basis_cfg);
  Game out;
  out.name = "semi-to-" + std::to_string(lambda.k - 1) + "(" + g.name + ")";
  out.params = json{{"inner", g.descriptor()}, {"lambda", lambda.descriptor()}};
  if (!g.enumerable) throw std::invalid_argument("compile_semi_to_km1: enumerable games only");
  uint32_t k = lambda.k;
  std::vector<std::string> hidden(k - 1, "H");
  auto embed = [&](const Question& basis_q) {
    return json{{"w", hidden}, {"aux", json{{"basis", basis_q}}}};
  };
  std::vector<std::pair<Rational, QuestionPair>> items;
  Rational quarter(1, 4);
  // 1. Pauli basis branch
  for (const auto& [w, qp] : *basis.game.enumerable)
    items.emplace_back(w * quarter, QuestionPair{embed(qp.x0), embed(qp.x1)});
  for (const auto& [w, qp] : *g.enumerable) {
    // 2. cross-check: full question vs (H^{k-1}, W_k)
    std::string wk = qp.x0["w"][k - 1].get<std::string>();
    Question crossq = json{{"w", hidden}, {"aux", json{{"crossW", wk}}}};
    Rational cw = w * quarter * Rational(1, 2);
    Question tagged = qp.x0;
    tagged["cross"] = true;
    items.emplace_back(cw, QuestionPair{tagged, crossq});
    items.emplace_back(cw, QuestionPair{crossq, tagged});
    // 3. consistency
    Question cons = qp.x0;
    cons["cons"] = true;
    items.emplace_back(w * quarter, QuestionPair{cons, cons});
    // 4. play
    items.emplace_back(w * quarter, qp);
  }
  out.enumerable = items;
  auto inner = g.accept;
  auto basis_accept = basis.game.accept;
  uint32_t kk = k;
  out.accept = [inner, basis_accept, kk](const Question& x0, const Question& x1,
                                         const Answer& a0, const Answer& a1) -> bool {
    bool b0 = x0["aux"].is_object() && x0["aux"].contains("basis");
    bool b1 = x1["aux"].is_object() && x1["aux"].contains("basis");
    try {
      if (b0 && b1)
        return basis_accept(x0["aux"]["basis"], x1["aux"]["basis"], a0["a2"], a1["a2"]);
      bool c0 = x0["aux"].is_object() && x0["aux"].contains("crossW");
      bool c1 = x1["aux"].is_object() && x1["aux"].contains("crossW");
      if (c0 || c1) {
        const Question& fullq = c0 ? x1 : x0;
        const Answer& fulla = c0 ? a1 : a0;
        const Answer& singlea = c0 ? a0 : a1;
        std::string wk = fullq["w"][kk - 1].get<std::string>();
        const json& uk = fulla["u"][kk - 1];
        if (wk == "X" || wk == "Z") return !uk.is_null() && uk == singlea["a2"]["u"];
        return uk.is_null();
      }
      if (x0.contains("cons")) return a0 == a1;
      return inner(x0, x1, a0, a1);
    } catch (const std::exception&) {
      return false;
    }
  };
  return out;
}

GamePack toy_register_game() {
  // One-register game at lambda = (1, (2), (2)): on question (Z, play) both
  // players report the Z string and must agree; on (H, play) they must agree
  // on an auxiliary bit.
  GamePack pack;
  GfPtr f2 = Gf::make(2, 1);
  RegisterParams lambda{1, {2}, {f2}};
  pack.lambda = lambda;
  Question qz = make_reg_question({"Z"}, "play");
  Question qh = make_reg_question({"H"}, "play");
  pack.game.name = "toy-register-game";
  pack.game.params = json{{"lambda", lambda.descriptor()}};
  pack.game.enumerable = {{Rational(1, 2), QuestionPair{qz, qz}},
                          {Rational(1, 2), QuestionPair{qh, qh}}};
  pack.game.accept = [](const Question& x0, const Question&, const Answer& a0,
                        const Answer& a1) -> bool {
    if (x0["w"][0] == "Z") return !a0["u"][0].is_null() && a0["u"][0] == a1["u"][0];
    return a0["a2"] == a1["a2"];
  };
  QuditLayout lay = lambda.layout(2);
  Strategy honest;
  honest.psi = BipartiteState::epr(lay);
  const Gf& gf = *f2;
  auto aux_z = [&](uint32_t z) {
    Mat m = Mat::Zero(2, 2);
    m(z, z) = 1;
    return on_aux(lay, m);
  };
  {
    Measurement m;
    m.kind = Measurement::Kind::Projective;
    for (const Vec& u : all_vectors(gf, 2)) {
      json ub = null_u_block(1);
      ub[0] = u;
      m.elems.emplace_back(json{{"u", ub}, {"a2", nullptr}},
                           on_register(lay, 0, tau_proj(gf, 2, 'Z', u)));
    }
    honest.set(qz, m);
  }
  {
    Measurement m;
    m.kind = Measurement::Kind::Projective;
    for (uint32_t z = 0; z < 2; ++z)
      m.elems.emplace_back(json{{"u", null_u_block(1)}, {"a2", z}}, aux_z(z));
    honest.set(qh, m);
  }
  pack.honest = honest;
  return pack;
}

namespace {

// Fill measurements for tag-decorated question variants by stripping the
// compiler tags and reusing the base measurement.
void complete_strategy_for_game(Strategy& s, const Game& g) {
  if (!g.enumerable) return;
  const char* tags[4] = {"cross", "cons", "hide", "vacuous"};
  for (const auto& [w, qp] : *g.enumerable) {
    for (const Question* q : {&qp.x0, &qp.x1}) {
      if (s.has(0, *q)) continue;
      for (int mask = 1; mask < 16; ++mask) {
        Question stripped = *q;
        for (int i = 0; i < 4; ++i)
          if (mask & (1 << i)) stripped.erase(tags[i]);
        if (s.has(0, stripped)) {
          s.set(*q, s.measurement_for(0, stripped));
          break;
        }
      }
    }
  }
}

}  // namespace

CompiledStack compile_full_toy_stack() {
  GamePack toy = toy_register_game();
  GfPtr f2 = Gf::make(2, 1);
  RegisterParams lambda = toy.lambda;
  Game semi = compile_k_to_semi(toy.game, lambda);
  PauliBasisConfig bcfg{f2, 2, 0.25, true};
  Game full = compile_semi_to_km1(semi, lambda, bcfg);

  // Honest strategy: register EPR_2^2, one aux qubit for the toy a2 answers,
  // and the Pauli-basis honest measurements acting on the register.
  QuditLayout lay{{{2, f2}}, 2};
  Strategy honest;
  honest.psi = BipartiteState::epr(lay);
  const Gf& gf = *f2;
  auto aux_z = [&](uint32_t z) {
    Mat m = Mat::Zero(2, 2);
    m(z, z) = 1;
    return on_aux(lay, m);
  };
  Question qz = make_reg_question({"Z"}, "play");
  Question qh = make_reg_question({"H"}, "play");
  Measurement m_z, m_h;
  m_z.kind = m_h.kind = Measurement::Kind::Projective;
  for (const Vec& u : all_vectors(gf, 2)) {
    json ub = null_u_block(1);
    ub[0] = u;
    m_z.elems.emplace_back(json{{"u", ub}, {"a2", nullptr}},
                           on_register(lay, 0, tau_proj(gf, 2, 'Z', u)));
  }
  for (uint32_t z = 0; z < 2; ++z)
    m_h.elems.emplace_back(json{{"u", null_u_block(1)}, {"a2", z}}, aux_z(z));
  honest.set(qz, m_z);
  honest.set(qh, m_h);
  // hide branch variants: tagged copies plus the X/Z-opened partner question
  for (const char* W : {"Z", "X", "H"}) {
    Question tagged = make_reg_question({W}, "play");
    tagged["hide"] = true;
    Measurement m;
    m.kind = Measurement::Kind::Projective;
    if (std::string(W) == "H") {
      honest.set(tagged, m_h);
    } else {
      for (const Vec& u : all_vectors(gf, 2)) {
        for (uint32_t z = 0; z < 2; ++z) {
          json ub = null_u_block(1);
          ub[0] = u;
          m.elems.emplace_back(json{{"u", ub}, {"a2", z}},
                               on_register(lay, 0, tau_proj(gf, 2, *W, u)) * aux_z(z));
        }
      }
      honest.set(tagged, m);
    }
  }
  // consistency-tagged copies
  for (const Question& q : {qz, qh}) {
    Question cons = q;
    cons["cons"] = true;
    honest.set(cons, honest.measurement_for(0, q));
    Question crossq = q;
    crossq["cross"] = true;
    honest.set(crossq, honest.measurement_for(0, q));
  }
  // cross-check single-register questions (H^{k-1}, W_k) with k = 1: W on reg
  for (const char* W : {"Z", "X", "H", "bot"}) {
    Question crossq = json{{"w", json::array()}, {"aux", json{{"crossW", W}}}};
    Measurement m;
    m.kind = Measurement::Kind::Projective;
    if (std::string(W) == "Z" || std::string(W) == "X") {
      for (const Vec& u : all_vectors(gf, 2))
        m.elems.emplace_back(json{{"a2", json{{"u", u}}}},
                             on_register(lay, 0, tau_proj(gf, 2, *W, u)));
    } else {
      m.elems.emplace_back(json{{"a2", json{{"u", nullptr}}}},
                           Mat::Identity(lay.side_dim(), lay.side_dim()));
    }
    honest.set(crossq, m);
  }
  // Pauli basis branch: embedded questions (H^0, y) with the basis honest
  // strategy acting on the register plus our aux untouched.
  PauliBasisConfig cfg{f2, 2, 0.25, true};
  GamePack basis = pauli_basis_game(cfg);
  for (const auto& [key, meas] : basis.honest->meas) {
    Question y = json::parse(key);
    Question embedded = json{{"w", json::array()}, {"aux", json{{"basis", y}}}};
    Measurement m;
    m.kind = meas.kind;
    for (const auto& [label, e] : meas.elems) {
      // basis measurements act on a bare (2, q=2) register layout; embed
      m.elems.emplace_back(json{{"a2", label}}, on_register(lay, 0, e));
    }
    honest.set(embedded, m);
  }
  complete_strategy_for_game(honest, full);
  CompiledStack out;
  out.game = full;
  out.honest = honest;
  out.notes = json{{"stack", "toy-register-game -> k-to-semi -> semi-to-0"},
                   {"basis", cfg.descriptor()}};
  return out;
}

}  // namespace introlab
