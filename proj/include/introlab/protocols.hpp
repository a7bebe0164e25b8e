#pragma once

#include <memory>
#include <optional>

#include "introlab/games.hpp"
#include "introlab/ldt.hpp"
#include "introlab/sat.hpp"

namespace introlab {

// Shared registry for polynomial-valued answers in sampler-mode games:
// answers carry {"pid": id} handles and the verifier evaluates through the
// store.  Strategies (honest or cheating) register their own entries.
struct PolyStore {
  std::vector<MultiPoly> polys;
  int add(MultiPoly p) {
    polys.push_back(std::move(p));
    return static_cast<int>(polys.size() - 1);
  }
  const MultiPoly& get(int id) const { return polys.at(id); }
};
using PolyStorePtr = std::shared_ptr<PolyStore>;

// Evaluate a polynomial answer at an ambient point.  Accepts either
// {"pid": id} (store handle, evaluated directly at the ambient point) or
// {"coeffs": [...], "arity": k, "cap": d} together with the subspace the
// polynomial lives on.
uint32_t eval_poly_answer(const PolyStorePtr& store, GfPtr f, const json& ans,
                          const AffineSubspace& on, const Point& ambient);
int poly_answer_degree(const PolyStorePtr& store, GfPtr f, const json& ans, uint32_t arity_on);

struct GamePack {
  Game game;
  std::optional<Strategy> honest;
  std::optional<SamplerStrategy> honest_sampler;
  RegisterParams lambda;
  PolyStorePtr store;
  json notes = json::object();
};

// --- Pauli basis test -------------------------------------------------------

struct PauliBasisConfig {
  GfPtr field;
  uint32_t n = 0;
  double eta = 0.25;
  bool desk_override = true;  // waive the Pauli basis condition at toy sizes

  uint32_t h() const;  // ceil(sqrt(q)) rounded up to a power of two
  uint32_t m() const;  // 2 ceil(log n / log q), at least 2
  uint32_t d() const { return m() * (h() - 1); }
  bool condition_holds() const;  // 64 log(n)^2 / eta^2 <= q <= n^10 etc.
  LdParams ld() const;
  json descriptor() const;
};

// Desk-scale stand-in for the quantum low-degree self-test: both provers
// measure the full register in a common basis W; one returns the restriction
// of the outcome's low-degree encoding to a random plane, the other its
// value at a random point of the plane.
GamePack ld_pauli_subgame(const PauliBasisConfig& cfg);

// Fig.-style Pauli basis game: 1/2 core subgame, 1/2 cross-check against
// full-string answers.
GamePack pauli_basis_game(const PauliBasisConfig& cfg,
                          const std::optional<Game>& core = std::nullopt);
// Cheater answering W-basis queries from the wrong basis.
Strategy pauli_basis_wrong_basis_cheater(const PauliBasisConfig& cfg);
// Core-subgame cheater answering from a string unrelated to the measurement.
Strategy ld_pauli_mismatched_cheater(const PauliBasisConfig& cfg);

// --- Data hiding ------------------------------------------------------------

// lambda = (k, n, q) with the k-th register hidden in question x.
GamePack data_hiding_game(const RegisterParams& lambda, const json& x_aux);
Strategy data_hiding_zread_cheater(const RegisterParams& lambda, const json& x_aux);

// Partial data hiding for a set S of direction tuples.
GamePack partial_data_hiding_game(const RegisterParams& lambda,
                                  const std::vector<std::vector<Vec>>& S, const json& x_aux);
Strategy partial_hiding_zread_cheater(const RegisterParams& lambda,
                                      const std::vector<std::vector<Vec>>& S, const json& x_aux);

// --- Introspection layer ------------------------------------------------------

// lambda = (k+1, n, q): register 0 is the point/surface register, registers
// 1..k hold directions.
GamePack intro_hide_game(const RegisterParams& lambda, const json& x_aux);
GamePack intro_surface_sampler(const RegisterParams& lambda, uint32_t d);
GamePack intro_cross_check(const RegisterParams& lambda, uint32_t d);
GamePack intro_low_degree(const RegisterParams& lambda, uint32_t d, uint32_t ell = 1);
// Cheater reporting a shifted surface.
Strategy lying_surface_cheater(const RegisterParams& lambda, uint32_t d);

// Honest question distribution of the introspective cross-check, from the
// closed-form sampler; exact rationals keyed by ((dirs, s), u).
std::vector<std::pair<Rational, std::string>> intro_cross_question_distribution(
    const RegisterParams& lambda);
// The classical surface-vs-point question distribution under the same key.
std::vector<std::pair<Rational, std::string>> classical_surface_question_distribution(
    GfPtr f, uint32_t m, uint32_t k);

// --- Intersecting lines -------------------------------------------------------

GamePack intersecting_lines_game(GfPtr f, uint32_t n, uint32_t d);
// Deterministic classical responders for the classical game.
struct LineResponder {
  std::function<json(const Question&)> respond;
};
LineResponder honest_line_responder(const MultiPoly& g, PolyStorePtr store);
double exact_deterministic_value(const Game& g, const LineResponder& alice,
                                 const LineResponder& bob);

GamePack intro_intersect_game(const RegisterParams& lambda, uint32_t d);

// --- Formula game and the introspective NEEXP game ---------------------------

GamePack formula_game(const SuccinctSatInstance& inst, const PcpParams& params);
// Honest-format sampler from an arbitrary assignment (for unsat experiments).
SamplerStrategy formula_game_sampler(const GamePack& pack, const SuccinctSatInstance& inst,
                                     const PcpParams& params, std::span<const uint8_t> assignment);

struct IntroNeexpOptions {
  uint32_t d = 0;          // 0: derive from the honest proof degrees
  bool use_padding = false;
  uint32_t s_inst = 0;     // if padding
};
GamePack intro_neexp_game(const SuccinctSatInstance& inst, const PcpParams& params,
                          const IntroNeexpOptions& opts = {});
SamplerStrategy intro_neexp_sampler(const GamePack& pack, const SuccinctSatInstance& inst,
                                    const PcpParams& params, std::span<const uint8_t> assignment);

// --- Register compilers -------------------------------------------------------

Game compile_k_to_semi(const Game& g, const RegisterParams& lambda);
Game compile_semi_to_km1(const Game& g, const RegisterParams& lambda,
                         const PauliBasisConfig& basis_cfg);
// Alternates the two compilers k times down to an ordinary game; honest
// strategies are extended alongside.
struct CompiledStack {
  Game game;
  Strategy honest;
  json notes;
};
CompiledStack compile_full_toy_stack();

// Toy one-register game used by the compiled-stack experiments.
GamePack toy_register_game();

}  // namespace introlab
