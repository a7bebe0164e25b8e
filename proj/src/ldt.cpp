#include "introlab/ldt.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace introlab {

namespace {

Vec random_vec(const Gf& f, uint32_t m, Rng& rng) {
  Vec v(m);
  for (auto& c : v) c = static_cast<uint32_t>(rng.below(f.q()));
  return v;
}

uint64_t ipow64(uint64_t b, uint32_t e) {
  uint64_t r = 1;
  while (e--) r *= b;
  return r;
}

Vec index_vec(const Gf& f, uint32_t m, uint64_t idx) {
  Vec v(m);
  for (uint32_t i = 0; i < m; ++i) {
    v[i] = static_cast<uint32_t>(idx % f.q());
    idx /= f.q();
  }
  return v;
}

}  // namespace

SurfaceDraw sample_surface_point(const SurfaceTestConfig& cfg, Rng& rng) {
  const Gf& f = *cfg.field;
  SurfaceDraw d;
  for (uint32_t i = 0; i < cfg.k; ++i) d.dirs.push_back(random_vec(f, cfg.m, rng));
  Vec w = random_vec(f, cfg.m, rng);
  d.s = AffineSubspace::from_point_dirs(cfg.field, w, d.dirs);
  Vec u = w;
  for (uint32_t i = 0; i < cfg.k; ++i) {
    uint32_t lam = static_cast<uint32_t>(rng.below(f.q()));
    for (uint32_t j = 0; j < cfg.m; ++j) u[j] = f.add(u[j], f.mul(lam, d.dirs[i][j]));
  }
  d.u = u;
  return d;
}

std::vector<std::pair<Rational, SurfaceDraw>> enumerate_surface_draws(
    const SurfaceTestConfig& cfg) {
  const Gf& f = *cfg.field;
  uint64_t per = ipow64(f.q(), cfg.m);
  uint64_t dirs_total = ipow64(per, cfg.k);
  uint64_t lam_total = ipow64(f.q(), cfg.k);
  uint64_t total = dirs_total * per * lam_total;
  std::map<std::string, std::pair<Rational, SurfaceDraw>> acc;
  for (uint64_t di = 0; di < dirs_total; ++di) {
    std::vector<Vec> dirs;
    uint64_t t = di;
    for (uint32_t i = 0; i < cfg.k; ++i) {
      dirs.push_back(index_vec(f, cfg.m, t % per));
      t /= per;
    }
    for (uint64_t wi = 0; wi < per; ++wi) {
      Vec w = index_vec(f, cfg.m, wi);
      auto s = AffineSubspace::from_point_dirs(cfg.field, w, dirs);
      for (uint64_t li = 0; li < lam_total; ++li) {
        Vec u = w;
        uint64_t lt = li;
        for (uint32_t i = 0; i < cfg.k; ++i) {
          uint32_t lam = static_cast<uint32_t>(lt % f.q());
          lt /= f.q();
          for (uint32_t j = 0; j < cfg.m; ++j) u[j] = f.add(u[j], f.mul(lam, dirs[i][j]));
        }
        json key = json::array();
        key.push_back(dirs);
        key.push_back(s.key());
        key.push_back(u);
        std::string k = key.dump();
        auto it = acc.find(k);
        if (it == acc.end()) {
          SurfaceDraw d;
          d.dirs = dirs;
          d.s = s;
          d.u = u;
          acc.emplace(k, std::make_pair(Rational(1, total), d));
        } else {
          it->second.first = it->second.first + Rational(1, total);
        }
      }
    }
  }
  std::vector<std::pair<Rational, SurfaceDraw>> out;
  out.reserve(acc.size());
  for (auto& [k, v] : acc) out.push_back(v);
  return out;
}

AnswerOracle honest_oracle(const std::vector<MultiPoly>& globals) {
  AnswerOracle o;
  o.surface = [globals](const SurfaceDraw& d) {
    std::vector<MultiPoly> fs;
    fs.reserve(globals.size());
    for (const auto& g : globals) fs.push_back(g.restricted_to(d.s));
    return fs;
  };
  o.point = [globals](const Point& u) {
    std::vector<uint32_t> vals;
    vals.reserve(globals.size());
    for (const auto& g : globals) vals.push_back(g.eval(u));
    return vals;
  };
  return o;
}

namespace {

bool surface_vs_point_accept(const SurfaceTestConfig& cfg, const SurfaceDraw& d,
                             const std::vector<MultiPoly>& fs, const std::vector<uint32_t>& bs,
                             std::string* diag) {
  if (fs.size() != cfg.ell || bs.size() != cfg.ell) {
    if (diag) *diag = "wrong answer count";
    return false;
  }
  Vec lam = d.s.coordinates_of(d.u);
  for (uint32_t i = 0; i < cfg.ell; ++i) {
    if (fs[i].arity() != d.s.k) {
      if (diag) *diag = "surface answer arity mismatch";
      return false;
    }
    if (fs[i].total_degree() > static_cast<int>(cfg.d)) {
      if (diag) *diag = "surface answer degree too high";
      return false;
    }
    if (fs[i].eval(lam) != bs[i]) {
      if (diag) *diag = "value mismatch at index " + std::to_string(i);
      return false;
    }
  }
  return true;
}

}  // namespace

RoundResult run_surface_vs_point(const SurfaceTestConfig& cfg, const AnswerOracle& alice,
                                 const AnswerOracle& bob, Rng& rng) {
  SurfaceDraw d = sample_surface_point(cfg, rng);
  auto fs = alice.surface(d);
  auto bs = bob.point(d.u);
  std::string diag;
  bool ok = surface_vs_point_accept(cfg, d, fs, bs, &diag);
  json answers = json::array();
  for (const auto& fp : fs)
    answers.push_back(
        fp.coeff_list_graded_lex(std::max<int>(cfg.d, std::max(fp.total_degree(), 0))));
  RoundResult r;
  r.accept = ok;
  r.transcript = transcript_entry(
      "surface-vs-point",
      json{{"dirs", d.dirs}, {"s", d.s.key()}, {"u", d.u}},
      json{{"surface", answers}, {"point", bs}, {"diag", diag}}, ok);
  return r;
}

double exact_surface_vs_point_value(const SurfaceTestConfig& cfg, const AnswerOracle& alice,
                                    const AnswerOracle& bob) {
  double v = 0;
  for (const auto& [w, d] : enumerate_surface_draws(cfg)) {
    auto fs = alice.surface(d);
    auto bs = bob.point(d.u);
    if (surface_vs_point_accept(cfg, d, fs, bs, nullptr)) v += w.to_double();
  }
  return v;
}

MultiPoly combine_polys(const std::vector<MultiPoly>& gs) {
  if (gs.empty()) throw std::invalid_argument("combine_polys: empty");
  uint32_t ell = static_cast<uint32_t>(gs.size());
  uint32_t m = gs[0].arity();
  GfPtr f = gs[0].field();
  MultiPoly out(f, ell + m);
  for (uint32_t i = 0; i < ell; ++i) {
    for (const auto& [e, c] : gs[i].terms()) {
      std::vector<uint16_t> ee(ell + m, 0);
      ee[i] = 1;
      for (uint32_t j = 0; j < m; ++j) ee[ell + j] = e[j];
      out.add_term(ee, c);
    }
  }
  return out;
}

AffineSubspace proj_subspace(const AffineSubspace& s, uint32_t ell) {
  Point pt(s.intercept.begin() + ell, s.intercept.end());
  std::vector<Vec> rows;
  for (const auto& r : s.rows) rows.emplace_back(r.begin() + ell, r.end());
  return AffineSubspace::from_point_dirs(s.field, pt, rows);
}

AffineSubspace lift_containing(const AffineSubspace& base, uint32_t k, Rng& rng) {
  const Gf& f = *base.field;
  std::vector<Vec> rows = base.rows;
  while (true) {
    uint32_t rank = 0;
    rref(f, rows, &rank);
    if (rank >= k) break;
    rows.push_back(random_vec(f, base.m, rng));
    uint32_t rank2 = 0;
    rref(f, rows, &rank2);
    if (rank2 == rank) rows.pop_back();  // rejected: dependent draw
  }
  return AffineSubspace::from_point_dirs(base.field, base.intercept, rows);
}

bool exactly_linear_in_x(const MultiPoly& f, uint32_t ell) {
  for (const auto& [e, c] : f.terms()) {
    uint32_t xdeg = 0;
    for (uint32_t i = 0; i < ell; ++i) xdeg += e[i];
    if (xdeg != 1) return false;
  }
  return true;
}

SubsetOracle honest_subset_oracle(const MultiPoly& g) {
  SubsetOracle o;
  o.subspace = [g](const AffineSubspace& s) { return g.restricted_to(s); };
  o.point = [g](const Point& u) { return g.eval(u); };
  o.subset = [g](const std::vector<Point>& pts) {
    std::vector<uint32_t> vals;
    for (const auto& p : pts) vals.push_back(g.eval(p));
    return vals;
  };
  return o;
}

AffineSubspace subset_cover_subspace(const SubsetTesterConfig& cfg, Rng& rng) {
  const Gf& f = *cfg.field;
  uint32_t dim = std::min<uint32_t>(static_cast<uint32_t>(cfg.F.size()) + 1, cfg.m);
  std::vector<Vec> rows;
  for (const auto& p : cfg.F) rows.push_back(p);
  while (true) {
    uint32_t rank = 0;
    rref(f, rows, &rank);
    if (rank >= dim) break;
    Vec cand = random_vec(f, cfg.m, rng);
    rows.push_back(cand);
    uint32_t rank2 = 0;
    rref(f, rows, &rank2);
    if (rank2 == rank) rows.pop_back();
  }
  return AffineSubspace::from_point_dirs(cfg.field, Vec(cfg.m, 0), rows);
}

namespace {

// All dim-`dim` linear subspaces containing span(F), by enumerating the
// sequential uniform-independent extension tuples; all tuples are equally
// likely, so the weights are uniform over tuples.
std::vector<std::pair<Rational, AffineSubspace>> enumerate_cover_subspaces(
    const SubsetTesterConfig& cfg) {
  const Gf& f = *cfg.field;
  uint32_t dim = std::min<uint32_t>(static_cast<uint32_t>(cfg.F.size()) + 1, cfg.m);
  std::vector<Vec> base;
  for (const auto& p : cfg.F) base.push_back(p);
  uint32_t rank0 = 0;
  rref(f, base, &rank0);
  uint64_t per = ipow64(f.q(), cfg.m);
  std::vector<std::vector<Vec>> frontier{base};
  uint32_t cur = rank0;
  while (cur < dim) {
    std::vector<std::vector<Vec>> next;
    for (const auto& rows : frontier) {
      for (uint64_t ci = 0; ci < per; ++ci) {
        Vec cand = index_vec(f, cfg.m, ci);
        auto ext = rows;
        ext.push_back(cand);
        uint32_t r1 = 0, r2 = 0;
        rref(f, rows, &r1);
        rref(f, ext, &r2);
        if (r2 > r1) next.push_back(ext);
      }
    }
    frontier = next;
    ++cur;
  }
  std::map<std::string, std::pair<Rational, AffineSubspace>> acc;
  uint64_t total = frontier.size() ? frontier.size() : 1;
  for (const auto& rows : frontier) {
    auto s = AffineSubspace::from_point_dirs(cfg.field, Vec(cfg.m, 0), rows);
    auto it = acc.find(s.key());
    if (it == acc.end())
      acc.emplace(s.key(), std::make_pair(Rational(1, total), s));
    else
      it->second.first = it->second.first + Rational(1, total);
  }
  std::vector<std::pair<Rational, AffineSubspace>> out;
  for (auto& [k, v] : acc) out.push_back(v);
  return out;
}

bool subset_point_accept(const SubsetTesterConfig& cfg, const AffineSubspace& s,
                         const MultiPoly& g, const Point& w, uint32_t y) {
  if (g.arity() != s.k || g.total_degree() > static_cast<int>(cfg.d)) return false;
  return g.eval(s.coordinates_of(w)) == y;
}

bool subset_restrict_accept(const SubsetTesterConfig& cfg, const AffineSubspace& s,
                            const MultiPoly& g, const std::vector<uint32_t>& fvals) {
  if (g.arity() != s.k || g.total_degree() > static_cast<int>(cfg.d)) return false;
  if (fvals.size() != cfg.F.size()) return false;
  for (size_t i = 0; i < cfg.F.size(); ++i)
    if (g.eval(s.coordinates_of(cfg.F[i])) != fvals[i]) return false;
  return true;
}

}  // namespace

RoundResult run_subset_tester(const SubsetTesterConfig& cfg, const SubsetOracle& alice,
                              const SubsetOracle& bob, Rng& rng) {
  const SubsetOracle* provers[2] = {&alice, &bob};
  int b = rng.coin();
  uint64_t branch = rng.below(4);  // 0,1: low-degree; 2: point cross; 3: subset cross
  RoundResult r;
  if (branch <= 1) {
    SurfaceTestConfig scfg{cfg.field, cfg.m, cfg.d, 2, 1};
    SurfaceDraw d = sample_surface_point(scfg, rng);
    MultiPoly g = provers[b]->subspace(d.s);
    uint32_t y = provers[1 - b]->point(d.u);
    r.accept = g.arity() == d.s.k && g.total_degree() <= static_cast<int>(cfg.d) &&
               g.eval(d.s.coordinates_of(d.u)) == y;
    r.transcript = transcript_entry("low-degree", json{{"s", d.s.key()}, {"u", d.u}},
                                    json{{"y", y}}, r.accept);
  } else if (branch == 2) {
    auto s = subset_cover_subspace(cfg, rng);
    Vec lam(s.k);
    for (auto& c : lam) c = static_cast<uint32_t>(rng.below(cfg.field->q()));
    Point w = s.point_at(lam);
    uint32_t y = provers[b]->point(w);
    MultiPoly g = provers[1 - b]->subspace(s);
    r.accept = subset_point_accept(cfg, s, g, w, y);
    r.transcript = transcript_entry("cover-point", json{{"s", s.key()}, {"w", w}},
                                    json{{"y", y}}, r.accept);
  } else {
    auto s = subset_cover_subspace(cfg, rng);
    MultiPoly g = provers[b]->subspace(s);
    auto fvals = provers[1 - b]->subset(cfg.F);
    r.accept = subset_restrict_accept(cfg, s, g, fvals);
    r.transcript = transcript_entry("cover-subset", json{{"s", s.key()}}, json{{"f", fvals}},
                                    r.accept);
  }
  return r;
}

double exact_subset_tester_value(const SubsetTesterConfig& cfg, const SubsetOracle& alice,
                                 const SubsetOracle& bob) {
  const Gf& f = *cfg.field;
  const SubsetOracle* provers[2] = {&alice, &bob};
  double total = 0;
  // branch 1 (weight 1/2): plane-vs-point
  {
    SurfaceTestConfig scfg{cfg.field, cfg.m, cfg.d, 2, 1};
    auto draws = enumerate_surface_draws(scfg);
    for (int b = 0; b < 2; ++b) {
      double v = 0;
      for (const auto& [w, d] : draws) {
        MultiPoly g = provers[b]->subspace(d.s);
        uint32_t y = provers[1 - b]->point(d.u);
        if (g.arity() == d.s.k && g.total_degree() <= static_cast<int>(cfg.d) &&
            g.eval(d.s.coordinates_of(d.u)) == y)
          v += w.to_double();
      }
      total += 0.25 * v;
    }
  }
  auto covers = enumerate_cover_subspaces(cfg);
  // branch 2 (weight 1/4): cover subspace vs point
  for (int b = 0; b < 2; ++b) {
    double v = 0;
    for (const auto& [w, s] : covers) {
      uint64_t pts = ipow64(f.q(), s.k);
      double per_point = w.to_double() / static_cast<double>(pts);
      for (const auto& pt : s.enumerate_points()) {
        uint32_t y = provers[b]->point(pt);
        MultiPoly g = provers[1 - b]->subspace(s);
        if (subset_point_accept(cfg, s, g, pt, y)) v += per_point;
      }
    }
    total += 0.125 * v;
  }
  // branch 3 (weight 1/4): cover subspace vs subset
  for (int b = 0; b < 2; ++b) {
    double v = 0;
    for (const auto& [w, s] : covers) {
      MultiPoly g = provers[b]->subspace(s);
      auto fvals = provers[1 - b]->subset(cfg.F);
      if (subset_restrict_accept(cfg, s, g, fvals)) v += w.to_double();
    }
    total += 0.125 * v;
  }
  return total;
}

std::vector<std::pair<Rational, Point>> two_step_point_distribution(
    const SubsetTesterConfig& cfg) {
  const Gf& f = *cfg.field;
  auto covers = enumerate_cover_subspaces(cfg);
  std::map<std::string, std::pair<Rational, Point>> acc;
  for (const auto& [w, s] : covers) {
    auto pts = s.enumerate_points();
    Rational per = w * Rational(1, pts.size());
    for (const auto& p : pts) {
      json key = p;
      auto it = acc.find(key.dump());
      if (it == acc.end())
        acc.emplace(key.dump(), std::make_pair(per, p));
      else
        it->second.first = it->second.first + per;
    }
  }
  std::vector<std::pair<Rational, Point>> out;
  for (auto& [k, v] : acc) out.push_back(v);
  (void)f;
  return out;
}

json transcript_entry(const std::string& branch, const json& queries, const json& answers,
                      bool verdict) {
  return json{{"branch", branch}, {"queries", queries}, {"answers", answers},
              {"verdict", verdict}};
}

}  // namespace introlab
