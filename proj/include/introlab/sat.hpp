#pragma once

#include <optional>
#include <string>
#include <vector>

#include "introlab/ldt.hpp"
#include "introlab/poly.hpp"
#include "introlab/rng.hpp"

namespace introlab {

// Gate-list circuit; six gate types with arities 0, 0, 0, 2, 2, 1.
struct Gate {
  enum class Type { Input, True, False, And, Or, Not };
  Type type = Type::False;
  int a = -1;          // first input gate id
  int b = -1;          // second input gate id
  int input_index = -1;  // for Input gates
};

struct Circuit {
  uint32_t n_inputs = 0;
  std::vector<Gate> gates;
  uint32_t output = 0;

  void check_well_formed() const;  // acyclic (ids reference earlier gates), arities
  bool eval(std::span<const uint8_t> inputs) const;
  size_t size() const { return gates.size(); }
};

// Line-based circuit text format:
//   inputs <k>
//   gate <id> INPUT <idx> | TRUE | FALSE | AND <id> <id> | OR <id> <id> | NOT <id>
//   output <id>
Circuit parse_circuit(const std::string& text);
std::string serialize_circuit(const Circuit& c);

// Boolean formula as a tree (every node has fan-out one; leaves are
// variables or constants, possibly repeated).
struct Formula {
  struct Node {
    enum class Kind { Var, Const, And, Or, Not };
    Kind kind;
    uint32_t var = 0;   // for Var
    bool value = false; // for Const
    int left = -1, right = -1;
  };
  uint32_t n_vars = 0;
  std::vector<Node> nodes;
  int root = -1;

  bool eval(std::span<const uint8_t> inputs) const;
  size_t gate_count() const;  // non-leaf nodes
};

// Tseitin transformation: formula over n + s variables with
// C(x) = 1 iff exists w with F(x, w) = 1; exactly 7s + (s-1) gates.
Formula tseitin(const Circuit& c);

// Arithmetization: eval over F_q agreeing with the formula on {0,1}.
uint32_t arith_eval(const Formula& f, const Gf& gf, std::span<const uint32_t> inputs);
// Symbolic arithmetization, for small variable counts.
MultiPoly arith_poly(const Formula& f, GfPtr gf, uint32_t max_vars = 20);

// Succinct-3Sat instance: circuit with 3n+3 inputs encoding the 3Sat formula
// with variables x_u, u in {0,1}^n, containing (x_i^{b1} v x_j^{b2} v x_k^{b3})
// whenever C(i, j, k, b1, b2, b3) = 1.
struct SuccinctSatInstance {
  Circuit circuit;
  uint32_t n = 0;

  static SuccinctSatInstance from_circuit(Circuit c);
  bool clause_oracle(uint64_t i, uint64_t j, uint64_t k, bool b1, bool b2, bool b3) const;
  // Does `assignment` (length 2^n) satisfy every encoded clause?
  bool satisfied_by(std::span<const uint8_t> assignment) const;
  // Brute-force search; n <= 4.
  std::optional<std::vector<uint8_t>> brute_force() const;
};

// Register-parameter padding: inputs widened to N = 2^{s_inst} index bits and
// the circuit padded to exactly S = 4N gates; encodes the same formula on the
// low-index variables, with all clauses touching high bits suppressed.
struct PaddedParams {
  uint64_t N = 0;  // padded index bit length
  uint64_t S = 0;  // padded gate count, 4N
  SuccinctSatInstance padded;
};
PaddedParams pad_instance(const SuccinctSatInstance& inst, uint32_t s_inst);

// --- PCP for Succinct-3Sat -------------------------------------------------

// Desk-scale parameters: h = 2^{t1}, q = 2^{t2}, m with h^m = 2^n (exactly
// admissible); m' = 3m + 3 + s.
struct PcpParams {
  GfPtr field;
  uint32_t t1 = 0;
  uint32_t m = 0;

  uint32_t h() const { return 1u << t1; }
  LdParams assignment_code(uint32_t n) const {  // message = 2^n bits
    return LdParams{field, 1ull << n, t1, m};
  }
  json descriptor() const;
};

// Evaluator for the encoded formula g_psi(x1, x2, x3, b, w) =
// F_arith(nu(x1), nu(x2), nu(x3), b, w).
class GPsi {
 public:
  GPsi(const SuccinctSatInstance& inst, const PcpParams& params);

  uint32_t m_prime() const { return 3 * params_.m + 3 + s_; }
  uint32_t s() const { return s_; }
  const Formula& formula() const { return formula_; }
  const PcpParams& params() const { return params_; }
  const SuccinctSatInstance& instance() const { return inst_; }

  // point = (x1, x2, x3, b, w) in F_q^{m'}
  uint32_t eval(std::span<const uint32_t> point) const;
  // Symbolic version (toy sizes): m' variables.
  const MultiPoly& poly() const;

  // sat_{psi,nu}(x, b, w) = g_psi(x,b,w) (nu1-b1)(nu2-b2)(nu3-b3)
  uint32_t sat_value(std::span<const uint32_t> point, std::span<const uint32_t> nu) const;
  // zero_{H,mu}(x) = sum_i zero_{(H0)_i}(x_i) mu_i
  uint32_t zero_value(std::span<const uint32_t> point, std::span<const uint32_t> mu) const;
  // Function-form: nu_i = g(x_i), mu_j = c_j(point).
  uint32_t sat_value_fn(std::span<const uint32_t> point, const MultiPoly& g) const;
  uint32_t zero_value_fn(std::span<const uint32_t> point,
                         const std::vector<MultiPoly>& cs) const;

  // The cube H_zero = H^{3m} x {0,1}^{3+s}.
  std::vector<std::vector<uint32_t>> zero_cube() const;
  // Symbolic sat polynomial for a given g (arity m).
  MultiPoly sat_poly(const MultiPoly& g) const;

 private:
  SuccinctSatInstance inst_;
  PcpParams params_;
  uint32_t s_ = 0;
  Formula formula_;
  CanonicalMaps maps_;
  mutable std::optional<MultiPoly> poly_;
};

// Four-table proof: g, the coefficient polynomials, and lazily served plane
// restrictions of both.
struct PcpProof {
  MultiPoly g;
  std::vector<MultiPoly> cs;
  MultiPoly sat_minus_zero;  // division remainder; identically zero iff honest
};

// Builds the proof from a satisfying assignment; refuses unsatisfying
// assignments with a violated-clause witness in the exception text.
PcpProof pcp_prove(const SuccinctSatInstance& inst, const PcpParams& params,
                   std::span<const uint8_t> assignment);
// Best-effort honest-format proof from an arbitrary assignment (the division
// quotients), for soundness experiments.
PcpProof pcp_prove_unchecked(const SuccinctSatInstance& inst, const PcpParams& params,
                             std::span<const uint8_t> assignment);

// Proof tables as a query->answer oracle.
struct PcpOracle {
  std::function<uint32_t(const Point&)> g_point;
  std::function<std::vector<uint32_t>(const Point&)> c_point;  // all m' values
  std::function<MultiPoly(const AffineSubspace&)> g_plane;
  std::function<std::vector<MultiPoly>(const AffineSubspace&)> c_planes;
};
PcpOracle honest_pcp_oracle(const PcpProof& proof);

struct PcpRound {
  bool accept = false;
  json transcript;
};
// One verifier round: 1/3 low-degree test on g, 1/3 simultaneous low-degree
// test on the c_i, 1/3 formula check at a uniform point.
PcpRound pcp_verify(const SuccinctSatInstance& inst, const PcpParams& params, const GPsi& gpsi,
                    const PcpOracle& oracle, uint32_t d1, uint32_t d2, Rng& rng);

json pcp_degrees(const GPsi& gpsi, const PcpProof& proof);

}  // namespace introlab
