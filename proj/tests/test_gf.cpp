#include "doctest.h"
#include "introlab/gf.hpp"
#include "introlab/rng.hpp"

using namespace introlab;

TEST_CASE("prime field and GF(4) basics") {
  auto f2 = Gf::make(2, 1);
  CHECK(f2->q() == 2);
  CHECK(f2->add(1, 1) == 0);
  auto f4 = Gf::make(2, 2, {1, 1, 1});  // x^2 + x + 1
  uint32_t w = 2;                        // the power-basis generator
  CHECK(f4->mul(w, w) == 3);             // w^2 = w + 1
  CHECK(f4->inv(w) == 3);
  CHECK(f4->add(w, 0) == w);
  CHECK_THROWS(Gf::make(2, 2, {1, 0, 1}));  // x^2 + 1 has the root 1
  CHECK_THROWS(Gf::make(4, 1));             // non-prime p
  CHECK_THROWS_AS((void)f4->inv(0), std::domain_error);
}

TEST_CASE("trace values and linearity") {
  auto f4 = Gf::make(2, 2);
  CHECK(f4->trace(0) == 0);
  CHECK(f4->trace(1) == 0);
  CHECK(f4->trace(2) == 1);
  CHECK(f4->trace(3) == 1);
  auto f2 = Gf::make(2, 1);
  for (uint32_t a = 0; a < 2; ++a) CHECK(f2->trace(a) == a);
  auto f8 = Gf::make(2, 3);
  for (uint32_t a = 0; a < 8; ++a)
    for (uint32_t b = 0; b < 8; ++b)
      CHECK(f8->trace(f8->add(a, b)) == (f8->trace(a) ^ f8->trace(b)));
}

TEST_CASE("field axioms: exhaustive small, randomized large") {
  for (uint32_t t : {1u, 2u, 3u, 4u}) {
    auto f = Gf::make(2, t);
    for (uint32_t a = 0; a < f->q(); ++a)
      for (uint32_t b = 0; b < f->q(); ++b) {
        CHECK(f->add(a, b) == f->add(b, a));
        CHECK(f->mul(a, b) == f->mul(b, a));
        if (a) CHECK(f->mul(a, f->inv(a)) == 1);
        for (uint32_t c = 0; c < f->q(); ++c)
          CHECK(f->mul(a, f->add(b, c)) == f->add(f->mul(a, b), f->mul(a, c)));
      }
  }
  auto f = Gf::make(2, 8);
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    uint32_t a = static_cast<uint32_t>(rng.below(256));
    uint32_t b = static_cast<uint32_t>(rng.below(256));
    uint32_t c = static_cast<uint32_t>(rng.below(256));
    CHECK(f->mul(a, f->add(b, c)) == f->add(f->mul(a, b), f->mul(a, c)));
    CHECK(f->mul(f->mul(a, b), c) == f->mul(a, f->mul(b, c)));
  }
}

TEST_CASE("self-dual basis: Gram identity and coefficient recovery") {
  for (uint32_t t : {1u, 2u, 3u, 4u, 8u}) {
    auto f = Gf::make(2, t);
    const auto& basis = f->self_dual_basis();
    REQUIRE(basis.size() == t);
    for (uint32_t i = 0; i < t; ++i)
      for (uint32_t j = 0; j < t; ++j)
        CHECK(f->trace(f->mul(basis[i], basis[j])) == (i == j ? 1u : 0u));
  }
  auto f8 = Gf::make(2, 3);
  const auto& b8 = f8->self_dual_basis();
  for (uint32_t u = 0; u < 8; ++u) {
    uint32_t rec = 0;
    for (uint32_t j = 0; j < 3; ++j)
      if (f8->trace(f8->mul(u, b8[j]))) rec = f8->add(rec, b8[j]);
    CHECK(rec == u);
  }
  CHECK_THROWS(Gf::make(3, 2)->self_dual_basis());
}

TEST_CASE("character sums") {
  for (uint32_t t : {1u, 2u, 3u, 4u}) {
    auto f = Gf::make(2, t);
    for (uint32_t a = 0; a < f->q(); ++a) {
      auto c = f->character_sum(a);
      double expect = a == 0 ? 1.0 : 0.0;
      CHECK(std::abs(c.real() - expect) <= 1e-12);
      CHECK(std::abs(c.imag()) <= 1e-12);
    }
  }
  // subspace variant over GF(2)^2, V = span{(1,0)}: a = (0,1) lies in V-perp
  auto f2 = Gf::make(2, 1);
  std::vector<std::vector<uint32_t>> V{{1, 0}};
  std::vector<uint32_t> a_in{0, 1}, a_out{1, 0};
  CHECK(std::abs(character_sum_subspace(*f2, V, a_in).real() - 1.0) <= 1e-12);
  CHECK(std::abs(character_sum_subspace(*f2, V, a_out).real()) <= 1e-12);
}

TEST_CASE("serialization") {
  auto f4 = Gf::make(2, 2);
  CHECK(f4->name() == "GF(2^2)/111");
  for (uint32_t a = 0; a < 4; ++a) CHECK(f4->elem_from_hex(f4->elem_hex(a)) == a);
  // default modulus is the lexicographically smallest irreducible
  for (uint32_t t : {2u, 3u, 4u, 8u}) {
    auto mod = default_modulus(2, t);
    CHECK(is_irreducible(2, mod));
  }
}
