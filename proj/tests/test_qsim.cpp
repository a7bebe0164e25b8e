#include "doctest.h"
#include "introlab/qsim.hpp"

using namespace introlab;

TEST_CASE("pauli commutation and observables") {
  for (uint32_t t : {1u, 2u}) {
    auto f = Gf::make(2, t);
    const Gf& gf = *f;
    for (uint32_t x = 0; x < gf.q(); ++x)
      for (uint32_t z = 0; z < gf.q(); ++z) {
        Vec vx{x}, vz{z};
        Mat L = pauli_X(gf, 1, vx) * pauli_Z(gf, 1, vz);
        std::complex<double> w = gf.root_of_unity(gf.trace(gf.mul(x, z)));
        Mat R = (1.0 / w) * (pauli_Z(gf, 1, vz) * pauli_X(gf, 1, vx));
        CHECK((L - R).cwiseAbs().maxCoeff() <= 1e-12);
      }
  }
  auto f2 = Gf::make(2, 1);
  CHECK((pauli_X(*f2, 1, Vec{0}) - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("measurement semantics") {
  auto f2 = Gf::make(2, 1);
  QuditLayout lay{{{1, f2}}, 1};
  auto epr = BipartiteState::epr(lay);
  RegOp zop{RegOp::Kind::ZFull, {}};
  auto mz = regop_measurement(*f2, 1, zop);
  mz.validate();
  Rng rng(12);
  for (int i = 0; i < 30; ++i) {
    auto ra = measure(epr, 0, mz, rng);
    auto rb = measure(ra.post, 1, mz, rng);
    CHECK(ra.outcome == rb.outcome);  // Z (x) Z on EPR agrees
    // repeating a projective measurement yields the same outcome
    auto again = measure(rb.post, 0, mz, rng);
    CHECK(again.outcome == ra.outcome);
    CHECK(again.probability == doctest::Approx(1.0));
  }
  // measuring the identity POVM leaves the state unchanged
  Measurement ident;
  ident.kind = Measurement::Kind::Povm;
  ident.elems.emplace_back(json{{"only", 0}}, Mat::Identity(2, 2));
  auto r = measure(epr, 0, ident, rng);
  CHECK(r.probability == doctest::Approx(1.0));
  CHECK((r.post.matrix() - epr.matrix()).cwiseAbs().maxCoeff() <= 1e-12);
  // Z then X on the Alice side: outcomes uniform
  RegOp xop{RegOp::Kind::XFull, {}};
  auto mx = regop_measurement(*f2, 1, xop);
  std::map<std::string, int> counts;
  Rng rng2(99);
  for (int i = 0; i < 4000; ++i) {
    auto rz = measure(epr, 0, mz, rng2);
    auto rx = measure(rz.post, 0, mx, rng2);
    counts[rx.outcome.dump()]++;
  }
  for (auto& [k, c] : counts) CHECK(std::abs(c - 2000) < 300);
}

TEST_CASE("marginalize") {
  auto f2 = Gf::make(2, 1);
  RegOp zop{RegOp::Kind::ZFull, {}};
  auto mz = regop_measurement(*f2, 2, zop);
  // to the first coordinate
  auto marg = marginalize(mz, [](const json& l) { return json{{"z0", l["z"][0]}}; });
  CHECK(marg.elems.size() == 2);
  marg.validate();
  for (auto& [label, e] : marg.elems) {
    Mat expect = kron(tau_proj(*f2, 1, 'Z', Vec{label["z0"].get<uint32_t>()}),
                      Mat::Identity(2, 2));
    CHECK((e - expect).cwiseAbs().maxCoeff() <= 1e-12);
  }
  // identity relabeling keeps the measurement; discarding everything gives {I}
  auto same = marginalize(mz, [](const json& l) { return l; });
  CHECK(same.elems.size() == mz.elems.size());
  auto all = marginalize(mz, [](const json&) { return json{{"u", 0}}; });
  CHECK(all.elems.size() == 1);
  CHECK((all.elems[0].second - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("subspace projectors") {
  auto f2 = Gf::make(2, 1);
  const Gf& gf = *f2;
  // v spanning everything: the single surface is the whole space
  auto whole = AffineSubspace::from_point_dirs(f2, {0, 0}, {{1, 0}, {0, 1}});
  CHECK((subspace_projector(gf, 2, whole) - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-15);
  // v = {(1,0)}: two surfaces of rank 2 partitioning the identity
  std::vector<Vec> dirs{{1, 0}};
  std::map<std::string, AffineSubspace> surfaces;
  for (uint32_t i = 0; i < 4; ++i) {
    auto s = AffineSubspace::from_point_dirs(f2, index_to_string(gf, 2, i), dirs);
    surfaces.emplace(s.key(), s);
  }
  CHECK(surfaces.size() == 2);
  Mat sum = Mat::Zero(4, 4);
  for (auto& [k, s] : surfaces) {
    Mat p = subspace_projector(gf, 2, s);
    CHECK(std::abs(p.trace().real() - 2.0) <= 1e-12);
    sum += p;
  }
  CHECK((sum - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-15);
  // commutes with the partial-X projector, exhaustively at q=2, n=2
  for (uint32_t a = 0; a < 2; ++a) {
    Mat tx = tau_partial(gf, 2, 'X', dirs, Vec{a});
    for (auto& [k, s] : surfaces) {
      Mat p = subspace_projector(gf, 2, s);
      CHECK((p * tx - tx * p).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("naimark dilation") {
  auto f2 = Gf::make(2, 1);
  // projective input comes back unchanged with trivial aux
  RegOp zop{RegOp::Kind::ZFull, {}};
  auto mz = regop_measurement(*f2, 1, zop);
  auto d0 = naimark_dilate(mz);
  CHECK(d0.aux_dim == 1);
  // binary POVM {I/2, I/2}: dilation reproduces uniform outcomes
  Measurement povm;
  povm.kind = Measurement::Kind::Povm;
  povm.elems.emplace_back(json{{"o", 0}}, Mat(0.5 * Mat::Identity(2, 2)));
  povm.elems.emplace_back(json{{"o", 1}}, Mat(0.5 * Mat::Identity(2, 2)));
  auto dil = naimark_dilate(povm);
  dil.projective.validate(1e-9);
  // outcome distributions agree on random states
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    CVec psi(2);
    psi << std::complex<double>(rng.unit() - 0.5, rng.unit() - 0.5),
        std::complex<double>(rng.unit() - 0.5, rng.unit() - 0.5);
    psi.normalize();
    CVec big = CVec::Zero(2 * dil.aux_dim);
    for (int i = 0; i < 2; ++i) big(i * dil.aux_dim) = psi(i);  // aux = |0>
    for (size_t a = 0; a < povm.elems.size(); ++a) {
      double p_povm = std::real((psi.adjoint() * povm.elems[a].second * psi)(0));
      double p_proj = std::real((big.adjoint() * dil.projective.elems[a].second * big)(0));
      CHECK(p_povm == doctest::Approx(p_proj).epsilon(1e-9));
    }
  }
}

TEST_CASE("real projective measurements act symmetrically on EPR") {
  auto f4 = Gf::make(2, 2);
  QuditLayout lay{{{1, f4}}, 1};
  auto epr = BipartiteState::epr(lay);
  for (char W : {'X', 'Z'}) {
    for (uint32_t u = 0; u < 4; ++u) {
      Mat m = tau_proj(*f4, 1, W, Vec{u});
      auto left = epr.applied(&m, nullptr);
      auto right = epr.applied(nullptr, &m);
      CHECK((left.matrix() - right.matrix()).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("epr sampler closed forms") {
  auto f4 = Gf::make(2, 2);
  // (Z, Z) on EPR_4: equal uniform outcomes
  RegOp z{RegOp::Kind::ZFull, {}};
  Rng rng(17);
  std::map<uint32_t, int> hist;
  for (int i = 0; i < 4000; ++i) {
    auto [a, b] = epr_sample(*f4, 1, z, z, rng);
    REQUIRE(a.z.has_value());
    CHECK(*a.z == *b.z);
    hist[(*a.z)[0]]++;
  }
  for (auto& [v, c] : hist) CHECK(std::abs(c - 1000) < 200);
  // (Pi^v, Z) at q=2, n=2: the point is uniform on the sampled surface
  auto f2 = Gf::make(2, 1);
  RegOp surf{RegOp::Kind::Surface, {{1, 1}}};
  for (int i = 0; i < 200; ++i) {
    auto [a, b] = epr_sample(*f2, 2, surf, z, rng);
    REQUIRE(a.surface.has_value());
    REQUIRE(b.z.has_value());
    CHECK(a.surface->contains(*b.z));
  }
  // hidden side produces the empty outcome
  RegOp hid{RegOp::Kind::Hidden, {}};
  auto [a, b] = epr_sample(*f2, 2, z, hid, rng);
  CHECK(b.hidden);
  CHECK(!b.z.has_value());
  // unsupported pairs are rejected
  RegOp x{RegOp::Kind::XFull, {}};
  CHECK_THROWS(epr_sample(*f2, 2, x, z, rng));
}

TEST_CASE("dimension cap") {
  auto f2 = Gf::make(2, 1);
  QuditLayout big{{{13, f2}}, 1};  // 2^13 exceeds the default cap
  CHECK_THROWS(BipartiteState::epr(big));
}
