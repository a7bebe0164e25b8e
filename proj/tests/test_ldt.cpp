#include "doctest.h"
#include "introlab/ldt.hpp"

using namespace introlab;

TEST_CASE("surface draw distribution") {
  auto f2 = Gf::make(2, 1);
  SurfaceTestConfig cfg{f2, 2, 1, 1, 1};
  // the point marginal is exactly uniform (enumerated)
  std::map<std::string, Rational> marg;
  for (const auto& [w, d] : enumerate_surface_draws(cfg)) {
    json key = d.u;
    auto it = marg.find(key.dump());
    if (it == marg.end())
      marg[key.dump()] = w;
    else
      it->second = it->second + w;
    CHECK(d.s.contains(d.u));
  }
  REQUIRE(marg.size() == 4);
  for (auto& [k, w] : marg) CHECK(w == Rational(1, 4));
  // dimension deficiency: Pr[dim s < k] matches the enumeration at k = 2
  SurfaceTestConfig cfg2{f2, 2, 1, 2, 1};
  Rational deficient;
  for (const auto& [w, d] : enumerate_surface_draws(cfg2))
    if (d.s.k < 2) deficient = deficient + w;
  CHECK(deficient.to_double() <= 1.0);  // bound q^k/q^m = 1 here; just sanity
  SurfaceTestConfig cfg3{Gf::make(2, 2), 3, 1, 2, 1};
  Rng rng(4);
  uint64_t bad = 0;
  const int T = 20000;
  for (int i = 0; i < T; ++i)
    if (sample_surface_point(cfg3, rng).s.k < 2) ++bad;
  CHECK(static_cast<double>(bad) / T <= std::pow(4.0, 2) / std::pow(4.0, 3) + 0.02);
}

TEST_CASE("surface-vs-point rounds") {
  auto f4 = Gf::make(2, 2);
  SurfaceTestConfig cfg{f4, 2, 2, 1, 1};
  MultiPoly g = MultiPoly::variable(f4, 2, 0) * MultiPoly::variable(f4, 2, 1) +
                MultiPoly::constant(f4, 2, 2);
  auto honest = honest_oracle({g});
  CHECK(exact_surface_vs_point_value(cfg, honest, honest) == doctest::Approx(1.0));
  // corrupted point oracle: g(u) + 1 always rejects
  AnswerOracle bad = honest;
  bad.point = [g, f4](const Point& u) {
    return std::vector<uint32_t>{f4->add(g.eval(u), 1)};
  };
  CHECK(exact_surface_vs_point_value(cfg, honest, bad) == doctest::Approx(0.0));
  // answering from g' != g: pass rate equals the exact agreement fraction
  MultiPoly g2 = g + MultiPoly::variable(f4, 2, 0);
  auto other = honest_oracle({g2});
  uint32_t agree = 0;
  for (uint32_t x = 0; x < 4; ++x)
    for (uint32_t y = 0; y < 4; ++y) {
      Vec p{x, y};
      if (g.eval(p) == g2.eval(p)) ++agree;
    }
  double expected = static_cast<double>(agree) / 16.0;
  CHECK(exact_surface_vs_point_value(cfg, honest, other) == doctest::Approx(expected));
  // malformed answers (wrong degree) are rejected
  AnswerOracle high = honest;
  high.surface = [f4](const SurfaceDraw& d) {
    MultiPoly p(f4, d.s.k);
    std::vector<uint16_t> e(d.s.k, 0);
    if (d.s.k) e[0] = 9;
    p.add_term(e, 1);
    return std::vector<MultiPoly>{p};
  };
  SurfaceTestConfig strict{f4, 2, 2, 1, 1};
  Rng rng(8);
  auto r = run_surface_vs_point(strict, high, honest, rng);
  CHECK(!r.accept);
  CHECK(r.transcript["answers"]["diag"].get<std::string>() != "");
}

TEST_CASE("combine machinery") {
  auto f4 = Gf::make(2, 2);
  MultiPoly g = MultiPoly::variable(f4, 2, 0) + MultiPoly::constant(f4, 2, 1);
  auto comb = combine_polys({g});
  // ell = 1: combine(x, y) = x1 g(y)
  for (uint32_t x = 0; x < 4; ++x)
    for (uint32_t y0 = 0; y0 < 4; ++y0)
      for (uint32_t y1 = 0; y1 < 4; ++y1) {
        Vec p{x, y0, y1};
        CHECK(comb.eval(p) == f4->mul(x, g.eval(Vec{y0, y1})));
      }
  CHECK(exactly_linear_in_x(comb, 1));
  // proj of a line in F^{1+2} is a point or line in F^2
  auto line = AffineSubspace::from_point_dirs(f4, {1, 2, 3}, {{1, 0, 2}});
  auto proj = proj_subspace(line, 1);
  CHECK(proj.m == 2);
  CHECK(proj.k <= 1);
  // lift: a random dim-2 flat containing the projection
  Rng rng(6);
  auto lifted = lift_containing(proj, 2, rng);
  CHECK(lifted.k == 2);
  for (const auto& pt : proj.enumerate_points()) CHECK(lifted.contains(pt));
  // x1 * g(y) is exactly linear in the x block
  CHECK(exactly_linear_in_x(MultiPoly::variable(f4, 2, 0) * MultiPoly::variable(f4, 2, 1), 1));
  CHECK(!exactly_linear_in_x(MultiPoly::constant(f4, 2, 1), 1));
  // a non-exactly-linear polynomial restricts to exactly-linear on <= d/q of y
  auto x = MultiPoly::variable(f4, 2, 0);
  auto y = MultiPoly::variable(f4, 2, 1);
  MultiPoly f = x * x * y;  // x-degree two
  CHECK(!exactly_linear_in_x(f, 1));
  uint32_t linear_count = 0;
  for (uint32_t yv = 0; yv < 4; ++yv) {
    // f|_y(x) = y x^2: exactly linear only on the vanishing slice
    auto fy = AffineSubspace::from_point_dirs(f4, {0, yv}, {{1, 0}});
    auto r = f.restricted_to(fy);
    if (exactly_linear_in_x(r, 1)) ++linear_count;
  }
  CHECK(static_cast<double>(linear_count) / 4.0 <=
        static_cast<double>(f.total_degree()) / 4.0 + 1e-12);
}

TEST_CASE("subset tester") {
  auto f4 = Gf::make(2, 2);
  MultiPoly g = MultiPoly::variable(f4, 2, 0) * MultiPoly::variable(f4, 2, 1) +
                MultiPoly::variable(f4, 2, 1);
  SubsetTesterConfig cfg{f4, 2, 2, {Point{1, 2}}};
  auto honest = honest_subset_oracle(g);
  CHECK(exact_subset_tester_value(cfg, honest, honest) == doctest::Approx(1.0));
  // oracle answering F from a different codeword: pass rate strictly below 1
  MultiPoly g2 = g + MultiPoly::constant(f4, 2, 1);
  SubsetOracle cheat = honest;
  cheat.subset = [g2](const std::vector<Point>& pts) {
    std::vector<uint32_t> vals;
    for (const auto& p : pts) vals.push_back(g2.eval(p));
    return vals;
  };
  double v = exact_subset_tester_value(cfg, cheat, cheat);
  CHECK(v < 1.0);
  // two-step point marginal is within 1/q of uniform, exactly
  for (uint32_t deg : {1u, 2u}) {
    auto f = Gf::make(2, deg);
    for (uint32_t m : {2u, 3u}) {
      for (uint32_t kk : {1u, 2u}) {
        std::vector<Point> F;
        F.push_back(Point(m, 0));
        F[0][0] = 1;
        if (kk == 2 && m >= 2) {
          F.push_back(Point(m, 0));
          F[1][1] = 1;
        }
        SubsetTesterConfig c2{f, m, 1, F};
        auto dist = two_step_point_distribution(c2);
        uint64_t total = 1;
        for (uint32_t i = 0; i < m; ++i) total *= f->q();
        double uniform = 1.0 / static_cast<double>(total);
        double tv = 0;
        double seen_mass = 0;
        for (const auto& [w, p] : dist) {
          tv += std::abs(w.to_double() - uniform);
          seen_mass += w.to_double();
        }
        tv += static_cast<double>(total - dist.size()) * uniform;  // unreached points
        tv /= 2;
        CHECK(seen_mass == doctest::Approx(1.0));
        CHECK(tv <= 1.0 / f->q() + 1e-12);
      }
    }
  }
}
