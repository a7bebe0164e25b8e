#include <chrono>

#include "doctest.h"
#include "introlab/poly.hpp"
#include "introlab/rng.hpp"

using namespace introlab;

TEST_CASE("evaluation") {
  auto f4 = Gf::make(2, 2);
  auto x0 = MultiPoly::variable(f4, 2, 0);
  auto x1 = MultiPoly::variable(f4, 2, 1);
  auto f = x0 * x1;
  CHECK(f.eval(std::vector<uint32_t>{2, 2}) == 3);  // w * w = w + 1
  CHECK(MultiPoly::constant(f4, 2, 1).eval(std::vector<uint32_t>{3, 1}) == 1);
  CHECK(MultiPoly(f4, 2).eval(std::vector<uint32_t>{3, 1}) == 0);
  CHECK_THROWS(f.eval(std::vector<uint32_t>{1}));
}

TEST_CASE("restriction") {
  auto f2 = Gf::make(2, 1);
  auto f = MultiPoly::variable(f2, 2, 0) + MultiPoly::variable(f2, 2, 1);
  auto line = AffineSubspace::from_point_dirs(f2, {0, 0}, {{1, 1}});
  auto restricted = f.restricted_to(line);
  CHECK(restricted.is_zero());  // lambda + lambda = 0 in characteristic 2
  // zero-dimensional flat: restriction is the constant f(u)
  auto pt = AffineSubspace::from_point_dirs(f2, {1, 0}, {});
  auto c = f.restricted_to(pt);
  CHECK(c.arity() == 0);
  CHECK(c.eval(std::vector<uint32_t>{}) == 1);
  // degree never grows, and restriction commutes with evaluation
  auto f4 = Gf::make(2, 2);
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    MultiPoly g(f4, 3);
    auto exps = MultiPoly::graded_lex_exponents(3, 3);
    for (const auto& e : exps) g.add_term(e, static_cast<uint32_t>(rng.below(4)));
    Point p(3);
    for (auto& x : p) x = static_cast<uint32_t>(rng.below(4));
    std::vector<Vec> dirs{{1, 0, 2}, {0, 1, 1}};
    auto s = AffineSubspace::from_point_dirs(f4, p, dirs);
    auto r = g.restricted_to(s);
    CHECK(r.total_degree() <= g.total_degree());
    for (uint32_t l0 = 0; l0 < 4; ++l0)
      for (uint32_t l1 = 0; l1 < 4; ++l1) {
        Vec lam{l0, l1};
        CHECK(r.eval(lam) == g.eval(s.point_at(lam)));
      }
  }
}

TEST_CASE("indicator polynomials") {
  auto f4 = Gf::make(2, 2);
  std::vector<uint32_t> H{0, 1};
  auto ind = indicator_1d(f4, H, 1);
  CHECK(ind.eval(std::vector<uint32_t>{1}) == 1);
  CHECK(ind.eval(std::vector<uint32_t>{0}) == 0);
  CHECK(ind.total_degree() == 1);
  CHECK_THROWS(indicator_1d(f4, H, 2));
  auto ind2 = indicator_nd(f4, {H, H}, {1, 0});
  CHECK(ind2.eval(std::vector<uint32_t>{1, 0}) == 1);
  CHECK(ind2.eval(std::vector<uint32_t>{1, 1}) == 0);
}

TEST_CASE("low-degree encoding and canonical maps") {
  auto f4 = Gf::make(2, 2);
  LdParams lp{f4, 4, 1, 2};
  REQUIRE(lp.admissible());
  REQUIRE(lp.exactly_admissible());
  CHECK(ld_encode(lp, std::vector<uint32_t>{0, 0, 0, 0}).is_zero());
  CanonicalMaps maps(lp);
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<uint32_t> a(4);
    for (auto& c : a) c = static_cast<uint32_t>(rng.below(4));
    auto g = ld_encode(lp, a);
    CHECK(g.total_degree() <= static_cast<int>(lp.degree()));
    for (uint64_t i = 0; i < 4; ++i) CHECK(g.eval(maps.pi_index(i)) == a[i]);
  }
  // nu inverts pi
  for (uint64_t i = 0; i < 4; ++i) {
    auto bits = maps.nu(maps.pi_index(i));
    uint64_t v = 0;
    for (auto b : bits) v = (v << 1) | b;
    CHECK(v == i);
  }
  // sigma sends the zero bit block to the zero point
  std::vector<uint8_t> zeros(lp.bits(), 0);
  auto z = maps.sigma(zeros);
  CHECK(std::all_of(z.begin(), z.end(), [](uint32_t c) { return c == 0; }));
  // pi is cheap: well under a millisecond per call at these parameters
  auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 1000; ++i) maps.pi_index(i % 4);
  double per_call =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 1000;
  CHECK(per_call < 1e-3);
  // mu components have degree h - 1 < h
  for (uint32_t i = 0; i < lp.t1; ++i)
    CHECK(maps.mu_poly(i).total_degree() <= static_cast<int>(lp.h()));
}

TEST_CASE("Schwartz-Zippel at the encoding degree") {
  auto f4 = Gf::make(2, 2);
  LdParams lp{f4, 4, 1, 2};
  // distinct degree-d encodings agree on at most d/q of points, exhaustively
  uint32_t d = lp.degree();
  std::vector<std::vector<uint32_t>> msgs;
  for (uint32_t a = 0; a < 256; ++a)
    msgs.push_back({a & 3u, (a >> 2) & 3u, (a >> 4) & 3u, (a >> 6) & 3u});
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    auto& m1 = msgs[rng.below(msgs.size())];
    auto& m2 = msgs[rng.below(msgs.size())];
    if (m1 == m2) continue;
    auto g1 = ld_encode(lp, m1), g2 = ld_encode(lp, m2);
    uint32_t agree = 0;
    for (uint32_t x = 0; x < 4; ++x)
      for (uint32_t y = 0; y < 4; ++y) {
        Vec p{x, y};
        if (g1.eval(p) == g2.eval(p)) ++agree;
      }
    CHECK(static_cast<double>(agree) / 16.0 <= static_cast<double>(d) / 4.0 + 1e-12);
  }
}

TEST_CASE("zero polynomials and the subcube decomposition") {
  auto f4 = Gf::make(2, 2);
  std::vector<uint32_t> S{0, 1};
  auto z = zero_poly(f4, S);
  // x^2 + x over GF(4)
  CHECK(z.eval(std::vector<uint32_t>{0}) == 0);
  CHECK(z.eval(std::vector<uint32_t>{1}) == 0);
  for (uint32_t c = 2; c < 4; ++c) CHECK(z.eval(std::vector<uint32_t>{c}) != 0);
  CHECK(z.total_degree() == 2);

  auto x0 = MultiPoly::variable(f4, 2, 0);
  auto fp = x0 * x0 + x0;
  auto dec = subcube_decompose(fp, {{0, 1}, {0, 1}});
  REQUIRE(dec.ok);
  CHECK(dec.coeffs[0] == MultiPoly::constant(f4, 2, 1));
  CHECK(dec.coeffs[1].is_zero());

  auto one = MultiPoly::constant(f4, 2, 1);
  auto dec2 = subcube_decompose(one, {{0, 1}, {0, 1}});
  CHECK(!dec2.ok);
  REQUIRE(dec2.witness.has_value());
  CHECK(one.eval(*dec2.witness) != 0);

  // round trip: f built as sum zero_H(x_i) c_i decomposes exactly
  Rng rng(7);
  MultiPoly zuni = zero_poly(f4, S);
  auto lift = [&](uint32_t var) {
    MultiPoly zl(f4, 2);
    for (const auto& [e, cc] : zuni.terms()) {
      std::vector<uint16_t> ee(2, 0);
      ee[var] = e[0];
      zl.add_term(ee, cc);
    }
    return zl;
  };
  for (int trial = 0; trial < 100; ++trial) {
    MultiPoly f(f4, 2);
    for (uint32_t i = 0; i < 2; ++i) {
      MultiPoly c(f4, 2);
      auto exps = MultiPoly::graded_lex_exponents(2, 2);
      for (const auto& e : exps) c.add_term(e, static_cast<uint32_t>(rng.below(4)));
      f = f + lift(i) * c;
    }
    auto d3 = subcube_decompose(f, {{0, 1}, {0, 1}});
    REQUIRE(d3.ok);
    MultiPoly rebuilt(f4, 2);
    for (uint32_t i = 0; i < 2; ++i) {
      rebuilt = rebuilt + lift(i) * d3.coeffs[i];
      if (!d3.coeffs[i].is_zero() && !f.is_zero())
        CHECK(d3.coeffs[i].total_degree() <= f.total_degree() - 2);
    }
    CHECK(rebuilt == f);
  }
}

TEST_CASE("subspace canonicalization") {
  auto f2 = Gf::make(2, 1);
  // dependent directions collapse; the raw tuple is preserved
  auto s = AffineSubspace::from_point_dirs(f2, {1, 1}, {{1, 0}, {1, 0}});
  CHECK(s.k == 1);
  CHECK(s.raw_dirs.size() == 2);
  // intercept is the lexicographically minimal point of the flat
  auto pts = s.enumerate_points();
  Point min = *std::min_element(pts.begin(), pts.end());
  CHECK(s.intercept == min);
  // all-zero directions give a point flat
  auto s0 = AffineSubspace::from_point_dirs(f2, {1, 0}, {{0, 0}});
  CHECK(s0.k == 0);
  CHECK(s0.contains(Point{1, 0}));
  CHECK(!s0.contains(Point{0, 0}));
  // graded-lex coefficient round trip
  auto f4 = Gf::make(2, 2);
  Rng rng(9);
  MultiPoly p(f4, 2);
  auto exps = MultiPoly::graded_lex_exponents(2, 3);
  for (const auto& e : exps) p.add_term(e, static_cast<uint32_t>(rng.below(4)));
  auto coeffs = p.coeff_list_graded_lex(3);
  auto back = MultiPoly::from_coeff_list_graded_lex(f4, 2, 3, coeffs);
  CHECK(back == p);
}

TEST_CASE("opt-in x^q normalization") {
  auto f4 = Gf::make(2, 2);
  auto x = MultiPoly::variable(f4, 1, 0);
  auto p = x * x * x * x;  // x^4 == x as a function on GF(4)
  CHECK(p.degree_in(0) == 4);
  auto n = p.normalized_xq();
  CHECK(n.degree_in(0) == 1);
  for (uint32_t c = 0; c < 4; ++c)
    CHECK(p.eval(std::vector<uint32_t>{c}) == n.eval(std::vector<uint32_t>{c}));
}
