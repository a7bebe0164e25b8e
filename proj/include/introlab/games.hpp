#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "introlab/qsim.hpp"
#include "introlab/rational.hpp"
#include "introlab/rng.hpp"

namespace introlab {

using Question = json;
using Answer = json;

struct QuestionPair {
  Question x0;
  Question x1;
};

// Two-prover one-round game.  The question distribution is either an
// enumerable list of (probability, pair) with exact rational weights, or a
// seeded sampler for larger supports; the acceptance predicate is total.
struct Game {
  std::string name;
  json params = json::object();
  std::optional<std::vector<std::pair<Rational, QuestionPair>>> enumerable;
  std::function<QuestionPair(Rng&)> sample;
  std::function<bool(const Question&, const Question&, const Answer&, const Answer&)> accept;
  uint64_t qlength = 0;
  uint64_t alength = 0;

  QuestionPair draw(Rng& rng) const;
  json descriptor() const;
  void check_enumerable_weights() const;  // probabilities sum to 1 (1e-12)
};

// Shared state plus per-question measurements.  Symmetric strategies store a
// single measurement family used by both sides.
struct Strategy {
  BipartiteState psi;
  bool symmetric = true;
  std::map<std::string, Measurement> meas;        // keyed by question dump
  std::map<std::string, Measurement> meas_bob;    // used when !symmetric

  void set(const Question& q, Measurement m);
  void set_bob(const Question& q, Measurement m);
  const Measurement& measurement_for(int side, const Question& q) const;
  bool has(int side, const Question& q) const;
};

// Honest joint responder used when the state is too large to materialize:
// given both questions, sample the pair of answers from the honest joint
// distribution.
struct SamplerStrategy {
  std::function<std::pair<Answer, Answer>(const QuestionPair&, Rng&)> respond;
};

double exact_value(const Game& g, const Strategy& s);

struct McResult {
  double estimate = 0;
  double stderr_ = 0;
  uint64_t trials = 0;
  uint64_t rejections = 0;
};
McResult mc_value(const Game& g, const Strategy& s, uint64_t trials, uint64_t seed);
McResult mc_value(const Game& g, const SamplerStrategy& s, uint64_t trials, uint64_t seed);

struct DistanceReport {
  double sim_delta = 0;     // 1 - E_x sum_a <psi| A (x) B |psi>
  double approx_delta = 0;  // E_x sum_a || (A - B) (x) I psi ||^2
};
// Families keyed by question dump; the distribution lists (weight, question).
DistanceReport distance_diagnostics(
    const std::vector<std::pair<Rational, Question>>& dist,
    const std::map<std::string, Measurement>& fam_a,
    const std::map<std::string, Measurement>& fam_b, const BipartiteState& psi);

struct RegisterParams {
  uint32_t k = 0;
  std::vector<uint32_t> n;
  std::vector<GfPtr> fields;
  QuditLayout layout(uint64_t aux_dim = 1) const;
  json descriptor() const;
};

enum class RegisterKind { Register, Semiregister };

struct RegisterValidation {
  bool ok = true;
  std::vector<std::string> failures;
};

// Checks (i) the shared state is a tensor of EPR registers (fidelity
// 1 - 1e-9 per register), (ii) the first answer block marginalizes to the
// tensor of tau projectors demanded by the Pauli queries, (iii) measurements
// act as the identity on hidden registers (semiregister exempts register k).
RegisterValidation validate_register_strategy(const Strategy& s, const RegisterParams& lambda,
                                              RegisterKind kind);

// Oracularization: 1/2 verify branch (the pair to one player, one question
// to the other, answers must match and satisfy the predicate), 1/2
// consistency branch.
Game oracularize(const Game& g);
// Extends a strategy whose per-question measurements pairwise commute on the
// support of g to the oracularized game (simultaneous measurement M^x0 M^x1).
Strategy oracularize_strategy(const Game& g, const Strategy& s, double comm_tol = 1e-10);

// Builds a symmetric strategy from a per-question recipe after verifying
// realness, projectivity, and pairwise commutation on supported pairs.
Strategy build_honest_commuting_strategy(
    const BipartiteState& psi,
    const std::vector<std::pair<Question, Measurement>>& recipe,
    const std::vector<QuestionPair>& support, double comm_tol = 1e-10);

// Helpers for question/answer tokens used across the protocol games.
Question make_reg_question(const std::vector<std::string>& w, const json& aux);
json pair_question(const Question& x0, const Question& x1);

}  // namespace introlab
