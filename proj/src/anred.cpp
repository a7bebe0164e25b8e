#include "introlab/anred.hpp"

#include <algorithm>
#include <stdexcept>

namespace introlab {

Point EfficientCode::index_point(uint64_t idx) const {
  return index_to_string(*params.field, params.m, idx);
}

uint64_t EfficientCode::point_index(const Point& p) const {
  return string_to_index(*params.field, p);
}

uint32_t EfficientCode::enc_symbol(std::span<const uint8_t> bits, uint64_t idx) const {
  return enc_symbol_at(bits, index_point(idx));
}

uint32_t EfficientCode::enc_symbol_at(std::span<const uint8_t> bits, const Point& p) const {
  const Gf& f = *params.field;
  auto H = params.subset_H();
  uint32_t h = params.h();
  // Per-coordinate indicator values ind_H(c, p_j), indexed by element value.
  std::vector<std::vector<uint32_t>> ind(params.m, std::vector<uint32_t>(f.q(), 0));
  for (uint32_t j = 0; j < params.m; ++j) {
    // prefix/suffix products of (p_j - H_b) so each indicator costs O(h)
    std::vector<uint32_t> pre(h + 1, 1), suf(h + 1, 1);
    for (uint32_t bi = 0; bi < h; ++bi) pre[bi + 1] = f.mul(pre[bi], f.sub(p[j], H[bi]));
    for (uint32_t bi = h; bi-- > 0;) suf[bi] = f.mul(suf[bi + 1], f.sub(p[j], H[bi]));
    for (uint32_t ci = 0; ci < h; ++ci) {
      uint32_t num = f.mul(pre[ci], suf[ci + 1]);
      uint32_t den = 1;
      for (uint32_t bi = 0; bi < h; ++bi) {
        if (bi == ci) continue;
        den = f.mul(den, f.sub(H[ci], H[bi]));
      }
      ind[j][H[ci]] = f.mul(num, f.inv(den));
    }
  }
  uint32_t acc = 0;
  for (uint64_t i = 0; i < bits.size(); ++i) {
    if (!bits[i]) continue;
    const Point& pi = (*pi_points)[i];
    uint32_t prod = 1;
    for (uint32_t j = 0; j < params.m; ++j) prod = f.mul(prod, ind[j][pi[j]]);
    acc = f.add(acc, prod);
  }
  return acc;
}

std::vector<uint32_t> EfficientCode::enc_table(std::span<const uint8_t> bits) const {
  std::vector<uint32_t> out(length);
  for (uint64_t i = 0; i < length; ++i) out[i] = enc_symbol(bits, i);
  return out;
}

MultiPoly EfficientCode::enc_restricted(std::span<const uint8_t> bits,
                                        const AffineSubspace& s) const {
  std::vector<uint32_t> values(bits.begin(), bits.end());
  MultiPoly g = ld_encode(params, values);
  return g.restricted_to(s);
}

std::optional<std::vector<uint8_t>> EfficientCode::decode(
    std::span<const uint32_t> table) const {
  if (table.size() != length) return std::nullopt;
  std::vector<uint8_t> bits(n_bits);
  for (uint64_t i = 0; i < n_bits; ++i) {
    uint32_t v = table[mu(i)];
    if (v > 1) return std::nullopt;
    bits[i] = static_cast<uint8_t>(v);
  }
  for (uint64_t idx = 0; idx < length; ++idx)
    if (enc_symbol(bits, idx) != table[idx]) return std::nullopt;
  return bits;
}

bool EfficientCode::sub_member(std::span<const uint32_t> table) const {
  if (table.size() != length) return false;
  // Solve for a degree-<=d polynomial agreeing with the table (GF Gaussian
  // elimination over the graded-lex monomials).
  const Gf& f = *params.field;
  uint32_t d = params.degree();
  auto exps = MultiPoly::graded_lex_exponents(params.m, d);
  size_t rows = length, cols = exps.size();
  std::vector<std::vector<uint32_t>> M(rows, std::vector<uint32_t>(cols + 1));
  for (uint64_t r = 0; r < rows; ++r) {
    Point p = index_point(r);
    for (size_t c = 0; c < cols; ++c) {
      uint32_t v = 1;
      for (uint32_t j = 0; j < params.m; ++j)
        v = f.mul(v, f.pow(p[j], exps[c][j]));
      M[r][c] = v;
    }
    M[r][cols] = table[r];
  }
  size_t rank = 0;
  for (size_t c = 0; c < cols && rank < rows; ++c) {
    size_t piv = rank;
    while (piv < rows && M[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(M[rank], M[piv]);
    uint32_t inv = f.inv(M[rank][c]);
    for (auto& x : M[rank]) x = f.mul(x, inv);
    for (size_t r = 0; r < rows; ++r) {
      if (r == rank || M[r][c] == 0) continue;
      uint32_t factor = M[r][c];
      for (size_t cc = 0; cc <= cols; ++cc)
        M[r][cc] = f.sub(M[r][cc], f.mul(factor, M[rank][cc]));
    }
    ++rank;
  }
  for (size_t r = 0; r < rows; ++r) {
    bool all_zero = true;
    for (size_t c = 0; c < cols; ++c)
      if (M[r][c] != 0) all_zero = false;
    if (all_zero && M[r][cols] != 0) return false;
  }
  return true;
}

uint64_t EfficientCode::mu(uint64_t i) const { return point_index((*pi_points)[i]); }

json EfficientCode::descriptor() const {
  return json{{"n", n_bits}, {"length", length}, {"q", params.field->q()},
              {"h", params.h()}, {"m", params.m}, {"d", params.degree()}, {"eta", eta}};
}

EfficientCode ld_code(const LdParams& params) {
  if (!params.admissible()) throw std::invalid_argument("ld_code: inadmissible parameters");
  EfficientCode c;
  c.params = params;
  c.n_bits = params.n;
  uint64_t len = 1;
  for (uint32_t i = 0; i < params.m; ++i) len *= params.field->q();
  c.length = len;
  c.eta = static_cast<double>(params.degree()) / static_cast<double>(params.field->q());
  CanonicalMaps maps(params);
  c.pi_points = std::make_shared<std::vector<Point>>();
  c.pi_points->reserve(params.n);
  for (uint64_t i = 0; i < params.n; ++i) c.pi_points->push_back(maps.pi_index(i));
  return c;
}

std::string bits_to_hex(std::span<const uint8_t> bits) {
  std::string out;
  out.reserve((bits.size() + 3) / 4);
  for (size_t i = 0; i < bits.size(); i += 4) {
    uint32_t nib = 0;
    for (size_t j = 0; j < 4 && i + j < bits.size(); ++j) nib |= (bits[i + j] & 1) << j;
    out.push_back("0123456789abcdef"[nib]);
  }
  return out;
}

std::vector<uint8_t> hex_to_bits(const std::string& hex, uint64_t len) {
  std::vector<uint8_t> bits(len, 0);
  for (uint64_t i = 0; i < len; ++i) {
    char c = hex[i / 4];
    uint32_t nib = (c >= 'a') ? (c - 'a' + 10) : (c - '0');
    bits[i] = (nib >> (i % 4)) & 1;
  }
  return bits;
}

json enc_handle(std::span<const uint8_t> bits) {
  return json{{"enc", json{{"bits", bits_to_hex(bits)}, {"len", bits.size()}}}};
}

std::vector<uint8_t> string_to_bits(const std::string& s, uint64_t pad_to) {
  if (s.size() * 8 > pad_to)
    throw std::invalid_argument("string_to_bits: answer exceeds the serialization cap (" +
                                std::to_string(s.size() * 8) + " > " + std::to_string(pad_to) +
                                ")");
  std::vector<uint8_t> bits(pad_to, 0);
  for (size_t i = 0; i < s.size(); ++i)
    for (int b = 0; b < 8; ++b)
      bits[i * 8 + b] = (static_cast<uint8_t>(s[i]) >> b) & 1;
  return bits;
}

std::string bits_to_string(std::span<const uint8_t> bits) {
  std::string out;
  for (size_t i = 0; i + 7 < bits.size(); i += 8) {
    uint8_t ch = 0;
    for (int b = 0; b < 8; ++b) ch |= (bits[i + b] & 1) << b;
    if (ch == 0) break;
    out.push_back(static_cast<char>(ch));
  }
  return out;
}

namespace {

json indexset_json(const std::vector<uint64_t>& idx, uint64_t length) {
  if (idx.size() >= length) return json{{"all", length}};
  return json(idx);
}

std::vector<uint64_t> indexset_expand(const json& j) {
  if (j.is_object() && j.contains("all")) {
    uint64_t n = j["all"].get<uint64_t>();
    std::vector<uint64_t> v(n);
    for (uint64_t i = 0; i < n; ++i) v[i] = i;
    return v;
  }
  return j.get<std::vector<uint64_t>>();
}

bool indexset_is_all(const json& j) { return j.is_object() && j.contains("all"); }

}  // namespace

CodewordView CodewordView::from_json(const EfficientCode& code, const json& j) {
  CodewordView v;
  v.code = &code;
  if (j.contains("enc")) {
    v.msg = hex_to_bits(j["enc"]["bits"].get<std::string>(), j["enc"]["len"].get<uint64_t>());
  } else if (j.contains("table")) {
    v.table = j["table"].get<std::vector<uint32_t>>();
  } else {
    throw std::invalid_argument("CodewordView: malformed codeword answer");
  }
  return v;
}

uint32_t CodewordView::symbol(uint64_t idx) const {
  if (table) return (*table)[idx];
  return code->enc_symbol(*msg, idx);
}

bool CodewordView::same_as(const CodewordView& o, std::span<const uint64_t> indices) const {
  // Lazy handles compare by message (symbol-wise equality follows from Enc
  // being a function); otherwise compare the queried symbols.
  if (msg && o.msg) return *msg == *o.msg;
  for (uint64_t idx : indices)
    if (symbol(idx) != o.symbol(idx)) return false;
  return true;
}

std::optional<std::vector<uint8_t>> CodewordView::decode() const {
  if (msg) {
    // A lazy handle is Enc(msg) by construction; spot-check the embedding.
    for (uint64_t i = 0; i < std::min<uint64_t>(code->n_bits, 4); ++i)
      if (symbol(code->mu(i)) != (*msg)[i]) return std::nullopt;
    return msg;
  }
  return code->decode(*table);
}

// --- sources ---------------------------------------------------------------

AnredSource oracularized_source(const Game& g, const SamplerStrategy& honest,
                                uint64_t alen_bits) {
  AnredSource src;
  src.game = oracularize(g);
  src.alen_bits = alen_bits;
  auto accept = src.game.accept;
  src.decide_bits = [accept](const Question& x0, const Question& x1,
                             const std::vector<uint8_t>& b0,
                             const std::vector<uint8_t>& b1) -> bool {
    try {
      Answer a0 = json::parse(bits_to_string(b0));
      Answer a1 = json::parse(bits_to_string(b1));
      return accept(x0, x1, a0, a1);
    } catch (const std::exception&) {
      return false;
    }
  };
  uint64_t cap = alen_bits;
  src.serialize = [cap](const Question&, const Answer& a) {
    return string_to_bits(a.dump(), cap);
  };
  // Oracularized honest sampler: joint answers from the base responder with
  // shared draws; pair questions answered identically on both sides.
  SamplerStrategy base = honest;
  src.honest_sampler = SamplerStrategy{};
  src.honest_sampler->respond = [base](const QuestionPair& qp, Rng& rng)
      -> std::pair<Answer, Answer> {
    bool p0 = qp.x0.is_object() && qp.x0.contains("pair");
    bool p1 = qp.x1.is_object() && qp.x1.contains("pair");
    if (p0 && p1) {
      QuestionPair inner{qp.x0["pair"][0], qp.x0["pair"][1]};
      auto [a0, a1] = base.respond(inner, rng);
      json pa = json{{"a", json::array({a0, a1})}};
      return {pa, pa};
    }
    if (p0 || p1) {
      const Question& pairq = p0 ? qp.x0 : qp.x1;
      QuestionPair inner{pairq["pair"][0], pairq["pair"][1]};
      auto [a0, a1] = base.respond(inner, rng);
      json pa = json{{"a", json::array({a0, a1})}};
      int c = pairq["check"]["c"].get<int>();
      json single = c == 0 ? a0 : a1;
      return p0 ? std::make_pair(pa, single) : std::make_pair(single, pa);
    }
    return base.respond(qp, rng);
  };
  return src;
}

AnredSource toy_anred_source() {
  // Consistency game with four-bit answers on EPR_2^4.
  AnredSource src;
  GfPtr f2 = Gf::make(2, 1);
  Question ask = json{{"toy", "ask"}};
  src.game.name = "toy-consistency";
  src.game.enumerable = {{Rational::one(), QuestionPair{ask, ask}}};
  src.game.accept = [](const Question&, const Question&, const Answer& a0, const Answer& a1) {
    return a0 == a1;
  };
  src.alen_bits = 4;
  src.decide_bits = [](const Question&, const Question&, const std::vector<uint8_t>& b0,
                       const std::vector<uint8_t>& b1) { return b0 == b1; };
  src.serialize = [](const Question&, const Answer& a) {
    return a["bits"].get<std::vector<uint8_t>>();
  };
  QuditLayout lay{{{4, f2}}, 1};
  Strategy honest;
  honest.psi = BipartiteState::epr(lay);
  Measurement m;
  m.kind = Measurement::Kind::Projective;
  for (uint64_t z = 0; z < 16; ++z) {
    Vec u = index_to_string(*f2, 4, z);
    std::vector<uint8_t> bits(u.begin(), u.end());
    m.elems.emplace_back(json{{"bits", bits}}, tau_proj(*f2, 4, 'Z', u));
  }
  honest.set(ask, m);
  src.honest = honest;
  return src;
}

// --- PCPP ---------------------------------------------------------------------

PcppVerifier exhaustive_pcpp(const AnredSource& source, const EfficientCode& code) {
  PcppVerifier v;
  uint64_t len = code.length;
  v.plan = [len](const Question&, const Question&, Rng&) {
    PcppView view;
    view.all = true;
    (void)len;
    return view;
  };
  auto decide_bits = source.decide_bits;
  v.decide = [decide_bits](const Question& x0, const Question& x1, const CodewordView& z0,
                           const CodewordView& z1, const std::vector<uint32_t>&) -> bool {
    auto b0 = z0.decode();
    auto b1 = z1.decode();
    if (!b0 || !b1) return false;
    return decide_bits(x0, x1, *b0, *b1);
  };
  v.proof_len = 0;
  v.declared = json{{"kind", "exhaustive"},
                    {"randomness", 0},
                    {"queries", 2 * len},
                    {"proof_len", 0}};
  return v;
}

PcppVerifier spot_pcpp(const AnredSource& source, const EfficientCode& code, uint32_t spots) {
  PcppVerifier v;
  uint64_t len = code.length;
  v.plan = [len, spots](const Question&, const Question&, Rng& rng) {
    PcppView view;
    for (uint32_t i = 0; i < spots; ++i) {
      view.I0.push_back(rng.below(len));
      view.I1.push_back(rng.below(len));
    }
    return view;
  };
  auto decide_bits = source.decide_bits;
  v.decide = [decide_bits](const Question& x0, const Question& x1, const CodewordView& z0,
                           const CodewordView& z1, const std::vector<uint32_t>&) -> bool {
    auto b0 = z0.decode();
    auto b1 = z1.decode();
    if (!b0 || !b1) return false;
    return decide_bits(x0, x1, *b0, *b1);
  };
  v.proof_len = 0;
  v.declared = json{{"kind", "spot"}, {"queries", 2 * spots}, {"proof_len", 0}};
  return v;
}

// --- subset tester over codeword indices ----------------------------------------

namespace {

std::vector<Point> points_of_indices(const EfficientCode& code,
                                     const std::vector<uint64_t>& F) {
  std::vector<Point> pts;
  pts.reserve(F.size());
  for (uint64_t i : F) pts.push_back(code.index_point(i));
  return pts;
}

// Uniform linear subspace of dimension min(|F|+1, m) containing span(F); the
// span is accumulated with an early exit once it fills the ambient space.
AffineSubspace cover_subspace_for(const EfficientCode& code, const json& Fspec, Rng& rng) {
  const Gf& f = *code.params.field;
  uint32_t m = code.params.m;
  std::vector<Vec> rows;
  uint32_t rank = 0;
  auto push = [&](const Point& p) {
    rows.push_back(p);
    uint32_t r2 = 0;
    rref(f, rows, &r2);
    if (r2 == rank) rows.pop_back();
    rank = std::max(rank, r2);
    return rank >= m;
  };
  if (indexset_is_all(Fspec)) {
    for (uint64_t i = 0; i < code.length; ++i)
      if (push(code.index_point(i))) break;
    return AffineSubspace::from_point_dirs(code.params.field, Vec(m, 0), rows);
  }
  auto F = indexset_expand(Fspec);
  uint32_t dim = std::min<uint32_t>(static_cast<uint32_t>(F.size()) + 1, m);
  for (uint64_t i : F)
    if (push(code.index_point(i))) break;
  while (rank < dim) {
    Vec cand(m);
    for (auto& c : cand) c = static_cast<uint32_t>(rng.below(f.q()));
    push(cand);
  }
  return AffineSubspace::from_point_dirs(code.params.field, Vec(m, 0), rows);
}

}  // namespace

json sample_tester_question(const EfficientCode& code, const json& Fspec, Rng& rng) {
  const Gf& f = *code.params.field;
  uint32_t m = code.params.m;
  uint64_t branch = rng.below(4);
  if (branch <= 1) {
    SurfaceTestConfig scfg{code.params.field, m, code.params.degree(), 2, 1};
    SurfaceDraw d = sample_surface_point(scfg, rng);
    return json{{"branch", "low-degree"}, {"s", subspace_to_json(d.s)}, {"u", d.u}};
  }
  AffineSubspace s = cover_subspace_for(code, Fspec, rng);
  if (branch == 2) {
    Vec lam(s.k);
    for (auto& c : lam) c = static_cast<uint32_t>(rng.below(f.q()));
    return json{{"branch", "cover-point"}, {"s", subspace_to_json(s)}, {"w", s.point_at(lam)}};
  }
  return json{{"branch", "cover-subset"}, {"s", subspace_to_json(s)}, {"F", Fspec}};
}

std::vector<std::pair<Rational, std::pair<json, json>>> enumerate_tester_questions(
    const EfficientCode& code, const std::vector<uint64_t>& F) {
  // Branch questions as (alice, bob) pairs with exact weights, both orders.
  const Gf& f = *code.params.field;
  uint32_t m = code.params.m;
  std::vector<std::pair<Rational, std::pair<json, json>>> out;
  SurfaceTestConfig scfg{code.params.field, m, code.params.degree(), 2, 1};
  Rational half(1, 2), quarter(1, 4);
  for (const auto& [w, d] : enumerate_surface_draws(scfg)) {
    json sq = json{{"branch", "low-degree"}, {"role", "s"}, {"s", subspace_to_json(d.s)}};
    json pq = json{{"branch", "low-degree"}, {"role", "u"}, {"u", d.u}};
    Rational ww = w * half * half;
    out.emplace_back(ww, std::make_pair(sq, pq));
    out.emplace_back(ww, std::make_pair(pq, sq));
  }
  // Cover subspaces: with exhaustive F spanning everything there is exactly
  // one cover (the row space of F extended to dimension min(|F|+1, m)).
  SubsetTesterConfig cfg{code.params.field, m, code.params.degree(), points_of_indices(code, F)};
  Rng probe(1);
  AffineSubspace cover = subset_cover_subspace(cfg, probe);
  uint64_t npts = 1;
  for (uint32_t i = 0; i < cover.k; ++i) npts *= f.q();
  bool unique_cover = cover.k == m;
  if (!unique_cover)
    throw std::invalid_argument("enumerate_tester_questions: F must span the ambient space");
  for (const auto& pt : cover.enumerate_points()) {
    json sq = json{{"branch", "cover-point"}, {"role", "s"}, {"s", subspace_to_json(cover)}};
    json pq = json{{"branch", "cover-point"}, {"role", "w"}, {"w", pt}};
    Rational ww = quarter * Rational(1, npts) * half;
    out.emplace_back(ww, std::make_pair(sq, pq));
    out.emplace_back(ww, std::make_pair(pq, sq));
  }
  {
    json sq = json{{"branch", "cover-subset"}, {"role", "s"}, {"s", subspace_to_json(cover)}};
    json fq = json{{"branch", "cover-subset"}, {"role", "F"}, {"F", F}};
    Rational ww = quarter * half;
    out.emplace_back(ww, std::make_pair(sq, fq));
    out.emplace_back(ww, std::make_pair(fq, sq));
  }
  return out;
}

json honest_tester_answer(const EfficientCode& code, const json& q, const CodewordView& w) {
  const std::string role = q.contains("role") ? q["role"].get<std::string>() : "";
  GfPtr f = code.params.field;
  auto poly_answer = [&](const AffineSubspace& s) -> json {
    if (w.msg) {
      // lazy restriction handle; symbols evaluated on demand
      return json{{"renc", json{{"bits", bits_to_hex(*w.msg)}, {"len", w.msg->size()},
                                 {"s", subspace_to_json(s)}}}};
    }
    auto bits = code.decode(*w.table);
    if (!bits) throw std::invalid_argument("honest_tester_answer: non-codeword table");
    MultiPoly restr = code.enc_restricted(*bits, s);
    return json{{"coeffs", restr.coeff_list_graded_lex(code.params.degree())},
                {"arity", restr.arity()}, {"cap", code.params.degree()}};
  };
  if (role == "s") {
    AffineSubspace s = subspace_from_json(f, q["s"]);
    return json{{"f", poly_answer(s)}};
  }
  if (role == "u" || role == "w") {
    Point u = q[role].get<Point>();
    return json{{"v", w.symbol(code.point_index(u))}};
  }
  if (role == "F") {
    if (w.msg && (indexset_is_all(q["F"]) || q["F"].size() > 64)) {
      // large subset: serve the values as a lazy codeword handle
      return json{{"encvals", json{{"bits", bits_to_hex(*w.msg)}, {"len", w.msg->size()}}}};
    }
    std::vector<uint32_t> vals;
    for (uint64_t idx : indexset_expand(q["F"])) vals.push_back(w.symbol(idx));
    return json{{"vals", vals}};
  }
  throw std::invalid_argument("honest_tester_answer: bad question " + q.dump());
}

namespace {

// Evaluate a tester polynomial answer at an ambient point; supports explicit
// coefficient lists and lazy restricted-encoding handles.
std::optional<uint32_t> tester_poly_eval(const EfficientCode& code, const json& fans,
                                         const AffineSubspace& s, const Point& ambient,
                                         bool* degree_ok) {
  GfPtr f = code.params.field;
  *degree_ok = true;
  if (fans.contains("renc")) {
    auto bits = hex_to_bits(fans["renc"]["bits"].get<std::string>(),
                            fans["renc"]["len"].get<uint64_t>());
    AffineSubspace declared = subspace_from_json(f, fans["renc"]["s"]);
    if (!(declared == s)) return std::nullopt;
    // restriction of a degree-d codeword: degree bound holds structurally
    return code.enc_symbol_at(bits, ambient);
  }
  MultiPoly p = MultiPoly::from_coeff_list_graded_lex(
      f, fans.at("arity").get<uint32_t>(), fans.at("cap").get<uint32_t>(),
      fans.at("coeffs").get<std::vector<uint32_t>>());
  if (p.arity() != s.k || p.total_degree() > static_cast<int>(code.params.degree())) {
    *degree_ok = false;
    return std::nullopt;
  }
  return p.eval(s.coordinates_of(ambient));
}

}  // namespace

bool tester_accept(const EfficientCode& code, const json& q0, const json& q1, const json& a0,
                   const json& a1) {
  GfPtr f = code.params.field;
  try {
    std::string branch = q0["branch"].get<std::string>();
    bool s_first = a0.contains("f");
    const json& sq = s_first ? q0 : q1;
    const json& sa = s_first ? a0 : a1;
    const json& oq = s_first ? q1 : q0;
    const json& oa = s_first ? a1 : a0;
    AffineSubspace s = subspace_from_json(f, sq["s"]);
    bool degree_ok = true;
    if (branch == "low-degree" || branch == "cover-point") {
      Point u = (branch == "low-degree") ? oq["u"].get<Point>() : oq["w"].get<Point>();
      if (!s.contains(u)) return false;
      auto val = tester_poly_eval(code, sa["f"], s, u, &degree_ok);
      if (!val || !degree_ok) return false;
      return *val == oa["v"].get<uint32_t>();
    }
    if (branch == "cover-subset") {
      bool all = indexset_is_all(oq["F"]);
      std::vector<uint64_t> F;
      if (all) {
        uint64_t n = oq["F"]["all"].get<uint64_t>();
        F = {0, n / 2, n - 1};
      } else {
        F = indexset_expand(oq["F"]);
      }
      if (oa.contains("encvals") && sa["f"].contains("renc")) {
        // both sides lazy: equal messages mean equal values everywhere; spot
        // evaluations guard the handle plumbing
        auto b0 = hex_to_bits(oa["encvals"]["bits"].get<std::string>(),
                              oa["encvals"]["len"].get<uint64_t>());
        auto b1 = hex_to_bits(sa["f"]["renc"]["bits"].get<std::string>(),
                              sa["f"]["renc"]["len"].get<uint64_t>());
        if (b0 != b1) return false;
        for (uint64_t idx : {F.front(), F[F.size() / 2], F.back()}) {
          Point p = code.index_point(idx);
          if (!s.contains(p)) return false;
          auto val = tester_poly_eval(code, sa["f"], s, p, &degree_ok);
          if (!val || !degree_ok) return false;
          if (*val != code.enc_symbol(b0, idx)) return false;
        }
        return true;
      }
      auto vals = oa["vals"].get<std::vector<uint32_t>>();
      if (vals.size() != F.size()) return false;
      for (size_t i = 0; i < F.size(); ++i) {
        Point p = code.index_point(F[i]);
        if (!s.contains(p)) return false;
        auto val = tester_poly_eval(code, sa["f"], s, p, &degree_ok);
        if (!val || !degree_ok) return false;
        if (*val != vals[i]) return false;
      }
      return true;
    }
  } catch (const std::exception&) {
    return false;
  }
  return false;
}

// --- the answer reduction game ---------------------------------------------------

namespace {

void build_honest_sampler(AnredPack& pack, const AnredSource& source,
                          const EfficientCode& code) {
  if (!source.honest_sampler) return;
  {
    auto base = *source.honest_sampler;
    auto serialize = source.serialize;
    const EfficientCode codev = code;
    pack.honest_sampler = SamplerStrategy{};
    pack.honest_sampler->respond = [base, serialize, codev](const QuestionPair& qp, Rng& rng)
        -> std::pair<Answer, Answer> {
      auto tag = [](const Question& q) { return q.value("ar", std::string("?")); };
      std::string t0 = tag(qp.x0), t1 = tag(qp.x1);
      json vac = json{{"ok", true}};
      if (t0 == "vacuous" && t1 == "vacuous") return {vac, vac};
      // locate the source question pair
      const Question* fq = nullptr;
      for (const Question* q : {&qp.x0, &qp.x1})
        if (q->contains("x") && (*q)["x"].is_array()) fq = q;
      Question sx0, sx1;
      if (fq) {
        sx0 = (*fq)["x"][0];
        sx1 = (*fq)["x"][1];
      } else {
        // both are single-sided (codecheck pair shares x under "x")
        sx0 = qp.x0["x"];
        sx1 = qp.x1.contains("x") ? qp.x1["x"].get<json>() : sx0;
      }
      if (t0 == "codecheck") {
        // both players answer tester questions from the codeword of their
        // joint answer to (x0, x1) -- here x is the single source question
        // queried; the honest prover measures it and encodes the answer.
        auto [a0, a1] = base.respond({sx0, sx0}, rng);
        auto bits = serialize(sx0, a0);
        CodewordView w;
        w.code = &codev;
        w.msg = bits;
        json t0a = honest_tester_answer(codev, qp.x0["tq"], w);
        json t1a = honest_tester_answer(codev, qp.x1["tq"], w);
        return {t0a, t1a};
      }
      // answer the source pair jointly with shared randomness
      auto [a0, a1] = base.respond({sx0, sx1}, rng);
      auto b0 = serialize(sx0, a0);
      auto b1 = serialize(sx1, a1);
      auto full_answer = [&]() {
        return json{{"z0", enc_handle(b0)}, {"z1", enc_handle(b1)}, {"zpi", nullptr}};
      };
      auto one = [&](const Question& q, const std::string& t) -> json {
        if (t == "vacuous") return vac;
        if (t == "verify" || t == "full") return full_answer();
        if (t == "answer") {
          int c = q["c"].get<int>();
          return json{{"zc", enc_handle(c == 0 ? b0 : b1)}};
        }
        throw std::runtime_error("anred honest: unknown tag " + t);
      };
      return {one(qp.x0, t0), one(qp.x1, t1)};
    };
  }
}

}  // namespace

AnredPack answer_reduction_game(const AnredSource& source, const EfficientCode& code,
                                const PcppVerifier& pcpp, const AnredConfig& cfg) {
  if (1.0 - code.eta < 2.0 * cfg.gamma)
    throw std::invalid_argument("answer_reduction_game: 1 - eta >= 2*gamma violated");
  AnredPack pack;
  pack.code = code;
  pack.game.name = "answer-reduction(" + source.game.name + ")";
  pack.game.params = json{{"code", code.descriptor()},
                          {"pcpp", pcpp.declared},
                          {"s", cfg.s},
                          {"gamma", cfg.gamma}};
  pack.notes["weights"] =
      "figure prose says eight tests at 1/8; the listing nests six leaves, weighted uniformly";
  pack.notes["proofless"] =
      pcpp.proof_len == 0 ? "proof cross-check and proof code check accept vacuously" : "";

  const EfficientCode* codep = &pack.code;
  auto source_accept = source.game.accept;
  auto pcpp_decide = pcpp.decide;

  auto full_q = [](const Question& x0, const Question& x1, const json& view) {
    return json{{"ar", "full"}, {"x", json::array({x0, x1})}, {"view", view}};
  };

  pack.game.accept = [codep, pcpp_decide](const Question& x0, const Question& x1,
                                          const Answer& a0, const Answer& a1) -> bool {
    auto tag = [](const Question& q) { return q.value("ar", std::string("?")); };
    std::string t0 = tag(x0), t1 = tag(x1);
    try {
      if (t0 == "vacuous" || t1 == "vacuous") return true;
      if (t0 == "verify" || t1 == "verify") {
        const Question& q = t0 == "verify" ? x0 : x1;
        const Answer& a = t0 == "verify" ? a0 : a1;
        CodewordView z0 = CodewordView::from_json(*codep, a.at("z0"));
        CodewordView z1 = CodewordView::from_json(*codep, a.at("z1"));
        std::vector<uint32_t> proof_syms;
        return pcpp_decide(q["x"][0], q["x"][1], z0, z1, proof_syms);
      }
      if (t0 == "full" && t1 == "full") {
        // consistency: answers equal on the queried content
        CodewordView a00 = CodewordView::from_json(*codep, a0.at("z0"));
        CodewordView a01 = CodewordView::from_json(*codep, a0.at("z1"));
        CodewordView b00 = CodewordView::from_json(*codep, a1.at("z0"));
        CodewordView b01 = CodewordView::from_json(*codep, a1.at("z1"));
        auto same = [&](const CodewordView& a, const CodewordView& b, const json& spec) {
          if (a.msg && b.msg) return *a.msg == *b.msg;
          auto T = indexset_expand(spec);
          return a.same_as(b, T);
        };
        return same(a00, b00, x0["view"]["T0"]) && same(a01, b01, x0["view"]["T1"]);
      }
      if ((t0 == "full") != (t1 == "full")) {
        const Answer& fa = t0 == "full" ? a0 : a1;
        const Question& sq = t0 == "full" ? x1 : x0;
        const Answer& sa = t0 == "full" ? a1 : a0;
        int c = sq["c"].get<int>();
        CodewordView zc =
            CodewordView::from_json(*codep, fa.at(c == 0 ? "z0" : "z1"));
        CodewordView zs = CodewordView::from_json(*codep, sa.at("zc"));
        if (zc.msg && zs.msg) return *zc.msg == *zs.msg;
        auto T = indexset_expand(sq["T"]);
        return zc.same_as(zs, T);
      }
      if (t0 == "codecheck" && t1 == "codecheck")
        return tester_accept(*codep, x0["tq"], x1["tq"], a0, a1);
    } catch (const std::exception&) {
      return false;
    }
    return false;
  };

  // Question sampling: six uniform leaves.
  Game src_game = source.game;
  PcppVerifier pv = pcpp;
  const EfficientCode code_copy = code;
  pack.game.sample = [src_game, pv, code_copy, full_q](Rng& rng) -> QuestionPair {
    QuestionPair sqp = src_game.draw(rng);
    PcppView view = pv.plan(sqp.x0, sqp.x1, rng);
    // augment with the extra uniform indices (absorbed when already full)
    json T0, T1;
    if (view.all) {
      rng.below(code_copy.length);
      rng.below(code_copy.length);
      T0 = T1 = json{{"all", code_copy.length}};
    } else {
      view.I0.push_back(rng.below(code_copy.length));
      view.I1.push_back(rng.below(code_copy.length));
      T0 = indexset_json(view.I0, code_copy.length);
      T1 = indexset_json(view.I1, code_copy.length);
    }
    json viewj = json{{"T0", T0}, {"T1", T1}, {"U", view.J}};
    uint64_t leaf = rng.below(6);
    int b = rng.coin();
    Question fq = full_q(sqp.x0, sqp.x1, viewj);
    if (leaf == 0) {
      Question vq = fq;
      vq["ar"] = "verify";
      Question idle = json{{"ar", "vacuous"}};
      return b ? QuestionPair{idle, vq} : QuestionPair{vq, idle};
    }
    if (leaf == 1) return {fq, fq};
    if (leaf == 2) {
      int c = rng.coin();
      Question sq = json{{"ar", "answer"}, {"c", c}, {"x", c == 0 ? sqp.x0 : sqp.x1},
                         {"T", c == 0 ? T0 : T1}};
      return b ? QuestionPair{sq, fq} : QuestionPair{fq, sq};
    }
    if (leaf == 3) {
      // proof cross-check; vacuous in proofless mode
      Question v0 = json{{"ar", "vacuous"}, {"leaf", "proof-cross"}};
      return {v0, v0};
    }
    if (leaf == 4) {
      int c = rng.coin();
      json tq = sample_tester_question(code_copy, c == 0 ? T0 : T1, rng);
      json tq0 = tq, tq1 = tq;
      // split the draw into the two roles
      if (tq["branch"] == "low-degree") {
        tq0 = json{{"branch", "low-degree"}, {"role", "s"}, {"s", tq["s"]}};
        tq1 = json{{"branch", "low-degree"}, {"role", "u"}, {"u", tq["u"]}};
      } else if (tq["branch"] == "cover-point") {
        tq0 = json{{"branch", "cover-point"}, {"role", "s"}, {"s", tq["s"]}};
        tq1 = json{{"branch", "cover-point"}, {"role", "w"}, {"w", tq["w"]}};
      } else {
        tq0 = json{{"branch", "cover-subset"}, {"role", "s"}, {"s", tq["s"]}};
        tq1 = json{{"branch", "cover-subset"}, {"role", "F"}, {"F", tq["F"]}};
      }
      Question q0 = json{{"ar", "codecheck"}, {"x", c == 0 ? sqp.x0 : sqp.x1}, {"c", c},
                         {"tq", tq0}};
      Question q1 = json{{"ar", "codecheck"}, {"x", c == 0 ? sqp.x0 : sqp.x1}, {"c", c},
                         {"tq", tq1}};
      return b ? QuestionPair{q1, q0} : QuestionPair{q0, q1};
    }
    // leaf 5: proof code check; vacuous in proofless mode
    Question v0 = json{{"ar", "vacuous"}, {"leaf", "proof-code"}};
    return {v0, v0};
  };

  if (source.honest_sampler) build_honest_sampler(pack, source, code);
  return pack;
}

AnredPack answer_reduction_toy_exact(const AnredSource& source, const EfficientCode& code,
                                     const PcppVerifier& pcpp, const AnredConfig& cfg) {
  if (!source.game.enumerable || !source.honest)
    throw std::invalid_argument("answer_reduction_toy_exact: enumerable source with honest "
                                "strategy required");
  if (pcpp.proof_len != 0)
    throw std::invalid_argument("answer_reduction_toy_exact: proofless PCPP only");
  AnredPack pack = answer_reduction_game(source, code, pcpp, cfg);
  pack.honest_sampler.reset();
  std::vector<uint64_t> all(code.length);
  for (uint64_t i = 0; i < code.length; ++i) all[i] = i;
  json viewj = json{{"T0", all}, {"T1", all}, {"U", json::array()}};
  Rational sixth(1, 6);
  std::vector<std::pair<Rational, QuestionPair>> items;
  Question idle = json{{"ar", "vacuous"}};
  Question vac_pc = json{{"ar", "vacuous"}, {"leaf", "proof-cross"}};
  Question vac_cc = json{{"ar", "vacuous"}, {"leaf", "proof-code"}};
  items.emplace_back(sixth, QuestionPair{vac_pc, vac_pc});
  items.emplace_back(sixth, QuestionPair{vac_cc, vac_cc});
  auto tester_items = enumerate_tester_questions(code, all);
  for (const auto& [w, qp] : *source.game.enumerable) {
    Question fq = json{{"ar", "full"}, {"x", json::array({qp.x0, qp.x1})}, {"view", viewj}};
    Question vq = fq;
    vq["ar"] = "verify";
    Rational w6 = w * sixth;
    items.emplace_back(w6 * Rational(1, 2), QuestionPair{vq, idle});
    items.emplace_back(w6 * Rational(1, 2), QuestionPair{idle, vq});
    items.emplace_back(w6, QuestionPair{fq, fq});
    for (int c = 0; c < 2; ++c) {
      Question sq = json{{"ar", "answer"}, {"c", c}, {"x", c == 0 ? qp.x0 : qp.x1}, {"T", all}};
      items.emplace_back(w6 * Rational(1, 4), QuestionPair{sq, fq});
      items.emplace_back(w6 * Rational(1, 4), QuestionPair{fq, sq});
      for (const auto& [tw, tqp] : tester_items) {
        Question q0 = json{{"ar", "codecheck"}, {"x", c == 0 ? qp.x0 : qp.x1}, {"c", c},
                           {"tq", tqp.first}};
        Question q1 = json{{"ar", "codecheck"}, {"x", c == 0 ? qp.x0 : qp.x1}, {"c", c},
                           {"tq", tqp.second}};
        items.emplace_back(w6 * Rational(1, 2) * tw, QuestionPair{q0, q1});
      }
    }
  }
  pack.game.enumerable = items;
  pack.game.sample = nullptr;

  // Honest measurements: relabel the source strategy's outcomes into encoded
  // answers; commuting products serve the paired questions.
  const Strategy& src = *source.honest;
  Strategy honest;
  honest.psi = src.psi;
  uint64_t dim = src.psi.side_dim();
  Measurement vac;
  vac.kind = Measurement::Kind::Projective;
  vac.elems.emplace_back(json{{"ok", true}}, Mat::Identity(dim, dim));
  honest.set(idle, vac);
  honest.set(vac_pc, vac);
  honest.set(vac_cc, vac);
  auto serialize = source.serialize;
  for (const auto& [w, qp] : *source.game.enumerable) {
    const Measurement& A = src.measurement_for(0, qp.x0);
    const Measurement& B = src.measurement_for(0, qp.x1);
    Measurement joint;
    joint.kind = Measurement::Kind::Projective;
    for (const auto& [la, ea] : A.elems) {
      for (const auto& [lb, eb] : B.elems) {
        Mat prod = ea * eb;
        if ((prod - eb * ea).cwiseAbs().maxCoeff() > 1e-10)
          throw std::runtime_error("answer_reduction_toy_exact: non-commuting source");
        if (prod.cwiseAbs().maxCoeff() < 1e-14) continue;
        auto b0 = serialize(qp.x0, la);
        auto b1 = serialize(qp.x1, lb);
        json label = json{{"z0", json{{"table", code.enc_table(b0)}}},
                          {"z1", json{{"table", code.enc_table(b1)}}},
                          {"zpi", nullptr}};
        joint.elems.emplace_back(label, prod);
      }
    }
    Question fq = json{{"ar", "full"}, {"x", json::array({qp.x0, qp.x1})}, {"view", viewj}};
    Question vq = fq;
    vq["ar"] = "verify";
    honest.set(fq, joint);
    honest.set(vq, joint);
    for (int c = 0; c < 2; ++c) {
      const Question& xc = c == 0 ? qp.x0 : qp.x1;
      const Measurement& M = src.measurement_for(0, xc);
      Measurement single;
      single.kind = Measurement::Kind::Projective;
      for (const auto& [la, ea] : M.elems) {
        auto bc = serialize(xc, la);
        single.elems.emplace_back(json{{"zc", json{{"table", code.enc_table(bc)}}}}, ea);
      }
      Question sq = json{{"ar", "answer"}, {"c", c}, {"x", xc}, {"T", all}};
      honest.set(sq, single);
      for (const auto& [tw, tqp] : tester_items) {
        for (const json* tq : {&tqp.first, &tqp.second}) {
          Question q = json{{"ar", "codecheck"}, {"x", xc}, {"c", c}, {"tq", *tq}};
          if (honest.has(0, q)) continue;
          Measurement tm;
          tm.kind = Measurement::Kind::Projective;
          std::map<std::string, std::pair<json, Mat>> groups;
          for (const auto& [la, ea] : M.elems) {
            auto bc = serialize(xc, la);
            CodewordView wv;
            wv.code = &pack.code;
            wv.table = code.enc_table(bc);
            json ans = honest_tester_answer(code, *tq, wv);
            std::string key = ans.dump();
            auto it = groups.find(key);
            if (it == groups.end())
              groups[key] = {ans, ea};
            else
              it->second.second += ea;
          }
          for (auto& [k, v] : groups) tm.elems.emplace_back(v.first, v.second);
          honest.set(q, tm);
        }
      }
    }
  }
  pack.honest = honest;
  return pack;
}

}  // namespace introlab
