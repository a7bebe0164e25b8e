#pragma once

#include "introlab/protocols.hpp"

namespace introlab {

// Error-correcting code abstraction with the low-degree instantiation.
// Symbols are field elements; codeword indices are points of F_q^m in
// row-major (most significant coordinate first) order.
struct EfficientCode {
  LdParams params;
  uint64_t n_bits = 0;   // message length
  uint64_t length = 0;   // q^m
  double eta = 0;        // normalized agreement bound d/q
  std::shared_ptr<std::vector<Point>> pi_points;  // cached injection images

  Point index_point(uint64_t idx) const;
  uint64_t point_index(const Point& p) const;

  // Enc(x)_idx without materializing the table.
  uint32_t enc_symbol(std::span<const uint8_t> bits, uint64_t idx) const;
  uint32_t enc_symbol_at(std::span<const uint8_t> bits, const Point& p) const;
  std::vector<uint32_t> enc_table(std::span<const uint8_t> bits) const;
  // Restriction of Enc(x) to a flat, as a polynomial on the flat.
  MultiPoly enc_restricted(std::span<const uint8_t> bits, const AffineSubspace& s) const;

  // Dec: read the message off the embedding points, re-encode, compare
  // everywhere; returns nullopt for non-codewords.
  std::optional<std::vector<uint8_t>> decode(std::span<const uint32_t> table) const;

  // Sub membership: the table agrees with some degree-d polynomial
  // (interpolation-rank check); toy sizes only.
  bool sub_member(std::span<const uint32_t> table) const;

  // mu: message index -> codeword index with Enc(x)_{mu(i)} = x_i.
  uint64_t mu(uint64_t i) const;

  json descriptor() const;
};

EfficientCode ld_code(const LdParams& params);

// A codeword as served by a prover: either an explicit table or a lazy
// Enc(bits) handle.  Answers carry the JSON forms {"table": [...]} or
// {"enc": {"bits": hex, "len": n}}.
struct CodewordView {
  const EfficientCode* code = nullptr;
  std::optional<std::vector<uint8_t>> msg;
  std::optional<std::vector<uint32_t>> table;

  static CodewordView from_json(const EfficientCode& code, const json& j);
  uint32_t symbol(uint64_t idx) const;
  bool same_as(const CodewordView& o, std::span<const uint64_t> indices) const;
  std::optional<std::vector<uint8_t>> decode() const;
};

std::string bits_to_hex(std::span<const uint8_t> bits);
std::vector<uint8_t> hex_to_bits(const std::string& hex, uint64_t len);
json enc_handle(std::span<const uint8_t> bits);
std::vector<uint8_t> string_to_bits(const std::string& s, uint64_t pad_to);
std::string bits_to_string(std::span<const uint8_t> bits);

// --- source games for answer reduction --------------------------------------

// A two-prover game packaged for answer reduction: the question sampler, the
// single-prover decision predicate, and a fixed-width bit serialization of
// answers.
struct AnredSource {
  Game game;
  uint64_t alen_bits = 0;
  std::function<bool(const Question&, const Question&, const std::vector<uint8_t>&,
                     const std::vector<uint8_t>&)> decide_bits;
  std::function<std::vector<uint8_t>(const Question&, const Answer&)> serialize;
  // Honest responders (one of the two forms).
  std::optional<Strategy> honest;
  std::optional<SamplerStrategy> honest_sampler;
};

// Wraps a game + strategy: the decider is the game's own predicate applied to
// deserialized answers (answers are serialized JSON dumps, padded).
AnredSource oracularized_source(const Game& g, const SamplerStrategy& honest,
                                uint64_t alen_bits);
// Toy source with explicit bit-vector answers.
AnredSource toy_anred_source();

// --- PCPP interface -----------------------------------------------------------

struct PcppView {
  bool all = false;              // query the entire implicit inputs
  std::vector<uint64_t> I0, I1;  // implicit-input queries (codeword indices)
  std::vector<uint64_t> J;       // proof queries (message indices)
};

struct PcppVerifier {
  // plan(x0, x1, rng): index sets into the two implicit inputs and the proof.
  std::function<PcppView(const Question&, const Question&, Rng&)> plan;
  // decide(x0, x1, z0, z1, proof_symbols): the composed decision.
  std::function<bool(const Question&, const Question&, const CodewordView&, const CodewordView&,
                     const std::vector<uint32_t>&)> decide;
  uint64_t proof_len = 0;  // message bits of the proof (0: proofless)
  json declared;
};

// Desk-scale stand-in: queries the entire implicit input, ignores the proof,
// decides by decode-and-delegate.  Perfect completeness; Sub-member
// non-witnesses are accepted with probability 0.
PcppVerifier exhaustive_pcpp(const AnredSource& source, const EfficientCode& code);
// Test planner querying `spots` uniform indices per input plus the proof; the
// decision still decodes from full handles when available.  Used to exercise
// subset-query paths and the extra-index distribution.
PcppVerifier spot_pcpp(const AnredSource& source, const EfficientCode& code, uint32_t spots);

// --- the answer reduction game -------------------------------------------------

struct AnredConfig {
  double s = 0.1;
  double gamma = 0.1;
  bool enumerable = false;  // expand the full branch space (toy scale only)
  uint64_t seed_salt = 0;
};

struct AnredPack {
  Game game;
  EfficientCode code;
  std::optional<Strategy> honest;          // statevector mode (toy)
  std::optional<SamplerStrategy> honest_sampler;
  json notes;
};

AnredPack answer_reduction_game(const AnredSource& source, const EfficientCode& code,
                                const PcppVerifier& pcpp, const AnredConfig& cfg);

// Fully enumerated variant with statevector honest measurements, for exact
// value computation at toy scale.  Requires an enumerable source with an
// honest Strategy and the exhaustive (proofless) PCPP.
AnredPack answer_reduction_toy_exact(const AnredSource& source, const EfficientCode& code,
                                     const PcppVerifier& pcpp, const AnredConfig& cfg);

// The subset-tester game for a code, with F given by codeword indices; the
// tester draw is embedded in the question.
json sample_tester_question(const EfficientCode& code, const json& Fspec, Rng& rng);
std::vector<std::pair<Rational, std::pair<json, json>>> enumerate_tester_questions(
    const EfficientCode& code, const std::vector<uint64_t>& F);
bool tester_accept(const EfficientCode& code, const json& q0, const json& q1, const json& a0,
                   const json& a1);
// Honest tester answers from a codeword view.
json honest_tester_answer(const EfficientCode& code, const json& q, const CodewordView& w);

}  // namespace introlab
