#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "introlab/games.hpp"
#include "introlab/poly.hpp"
#include "introlab/rng.hpp"

namespace introlab {

struct SurfaceTestConfig {
  GfPtr field;
  uint32_t m = 0;
  uint32_t d = 0;
  uint32_t k = 1;
  uint32_t ell = 1;
};

struct SurfaceDraw {
  std::vector<Vec> dirs;  // k iid uniform vectors, possibly dependent
  AffineSubspace s;
  Point u;
};

SurfaceDraw sample_surface_point(const SurfaceTestConfig& cfg, Rng& rng);

// Exact question distribution over (dirs, s, u), enumerated from the raw
// (v_1..v_k, w, lambda) tuples.  Key is "dirs|s.key()|u".
std::vector<std::pair<Rational, SurfaceDraw>> enumerate_surface_draws(const SurfaceTestConfig& cfg);

// Prover models: the surface responder returns ell polynomials of arity k on
// the queried flat; the point responder returns ell values.
struct AnswerOracle {
  std::function<std::vector<MultiPoly>(const SurfaceDraw&)> surface;
  std::function<std::vector<uint32_t>(const Point&)> point;
};

// Honest oracle answering from global polynomials.
AnswerOracle honest_oracle(const std::vector<MultiPoly>& globals);

struct RoundResult {
  bool accept = false;
  json transcript;
};

RoundResult run_surface_vs_point(const SurfaceTestConfig& cfg, const AnswerOracle& alice,
                                 const AnswerOracle& bob, Rng& rng);

// Exact pass probability over the enumerated question space.
double exact_surface_vs_point_value(const SurfaceTestConfig& cfg, const AnswerOracle& alice,
                                    const AnswerOracle& bob);

// combine_g(x, y) = x_1 g_1(y) + ... + x_ell g_ell(y), arity ell + m.
MultiPoly combine_polys(const std::vector<MultiPoly>& gs);
// Projection of a flat in F_q^{ell+m} onto the last m coordinates.
AffineSubspace proj_subspace(const AffineSubspace& s, uint32_t ell);
// Uniformly random dim-k subspace of F_q^m containing the given flat.
AffineSubspace lift_containing(const AffineSubspace& base, uint32_t k, Rng& rng);
// f(x, y) is exactly linear in the first ell variables: every term has total
// x-degree exactly one.
bool exactly_linear_in_x(const MultiPoly& f, uint32_t ell);

// --- Low-degree subset tester (classical), three-branch mixture -----------

struct SubsetTesterConfig {
  GfPtr field;
  uint32_t m = 0;
  uint32_t d = 0;
  std::vector<Point> F;  // |F| <= k
};

// Oracles for the subset tester: subspace queries (any dimension), point
// queries, and subset queries.
struct SubsetOracle {
  std::function<MultiPoly(const AffineSubspace&)> subspace;      // arity = dim
  std::function<uint32_t(const Point&)> point;
  std::function<std::vector<uint32_t>(const std::vector<Point>&)> subset;
};
SubsetOracle honest_subset_oracle(const MultiPoly& g);

RoundResult run_subset_tester(const SubsetTesterConfig& cfg, const SubsetOracle& alice,
                              const SubsetOracle& bob, Rng& rng);
double exact_subset_tester_value(const SubsetTesterConfig& cfg, const SubsetOracle& alice,
                                 const SubsetOracle& bob);

// The two-step point marginal (random dim-(k+1) subspace containing F, then
// a uniform point in it) as an exact distribution; for TV-vs-uniform checks.
std::vector<std::pair<Rational, Point>> two_step_point_distribution(const SubsetTesterConfig& cfg);

// Uniformly random linear subspace of dimension `dim` containing span(F),
// drawn via uniform extension vectors conditioned on independence.
AffineSubspace subset_cover_subspace(const SubsetTesterConfig& cfg, Rng& rng);

// Serialize transcripts to a JSON-lines log entry.
json transcript_entry(const std::string& branch, const json& queries, const json& answers,
                      bool verdict);

}  // namespace introlab
