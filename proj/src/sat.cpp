#include "introlab/sat.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace introlab {

void Circuit::check_well_formed() const {
  if (output >= gates.size()) throw std::invalid_argument("circuit: output id out of range");
  for (size_t i = 0; i < gates.size(); ++i) {
    const Gate& g = gates[i];
    auto check_ref = [&](int r, const char* what) {
      if (r < 0 || static_cast<size_t>(r) >= i)
        throw std::invalid_argument("circuit: gate " + std::to_string(i) + " has " + what +
                                    " reference " + std::to_string(r) +
                                    (r >= 0 ? " (forward reference forms a cycle)" : ""));
    };
    switch (g.type) {
      case Gate::Type::Input:
        if (g.input_index < 0 || static_cast<uint32_t>(g.input_index) >= n_inputs)
          throw std::invalid_argument("circuit: input index out of range at gate " +
                                      std::to_string(i));
        break;
      case Gate::Type::True:
      case Gate::Type::False:
        break;
      case Gate::Type::And:
      case Gate::Type::Or:
        check_ref(g.a, "left");
        check_ref(g.b, "right");
        break;
      case Gate::Type::Not:
        check_ref(g.a, "operand");
        break;
    }
  }
}

bool Circuit::eval(std::span<const uint8_t> inputs) const {
  if (inputs.size() != n_inputs) throw std::invalid_argument("circuit eval: input arity");
  std::vector<uint8_t> val(gates.size());
  for (size_t i = 0; i < gates.size(); ++i) {
    const Gate& g = gates[i];
    switch (g.type) {
      case Gate::Type::Input: val[i] = inputs[g.input_index]; break;
      case Gate::Type::True: val[i] = 1; break;
      case Gate::Type::False: val[i] = 0; break;
      case Gate::Type::And: val[i] = val[g.a] & val[g.b]; break;
      case Gate::Type::Or: val[i] = val[g.a] | val[g.b]; break;
      case Gate::Type::Not: val[i] = !val[g.a]; break;
    }
  }
  return val[output];
}

Circuit parse_circuit(const std::string& text) {
  Circuit c;
  std::istringstream is(text);
  std::string line;
  bool have_output = false;
  int lineno = 0;
  std::map<uint64_t, size_t> ids;  // declared id -> position
  auto resolve = [&](uint64_t id) -> int {
    auto it = ids.find(id);
    if (it == ids.end())
      throw std::invalid_argument("circuit parse: line " + std::to_string(lineno) +
                                  ": reference to undeclared gate " + std::to_string(id) +
                                  " (cycle or forward reference)");
    return static_cast<int>(it->second);
  };
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok[0] == '#') continue;
    if (tok == "inputs") {
      if (!(ls >> c.n_inputs))
        throw std::invalid_argument("circuit parse: line " + std::to_string(lineno) +
                                    ": bad inputs count");
    } else if (tok == "output") {
      uint64_t id;
      if (!(ls >> id))
        throw std::invalid_argument("circuit parse: line " + std::to_string(lineno) +
                                    ": bad output id");
      c.output = static_cast<uint32_t>(resolve(id));
      have_output = true;
    } else if (tok == "gate") {
      uint64_t id;
      std::string type;
      if (!(ls >> id >> type))
        throw std::invalid_argument("circuit parse: line " + std::to_string(lineno) +
                                    ": bad gate line");
      if (ids.count(id))
        throw std::invalid_argument("circuit parse: line " + std::to_string(lineno) +
                                    ": duplicate gate id " + std::to_string(id));
      Gate g;
      if (type == "INPUT") {
        uint32_t idx;
        if (!(ls >> idx)) throw std::invalid_argument("circuit parse: bad INPUT index");
        g.type = Gate::Type::Input;
        g.input_index = static_cast<int>(idx);
      } else if (type == "TRUE") {
        g.type = Gate::Type::True;
      } else if (type == "FALSE") {
        g.type = Gate::Type::False;
      } else if (type == "AND" || type == "OR") {
        uint64_t a, b;
        if (!(ls >> a >> b))
          throw std::invalid_argument("circuit parse: line " + std::to_string(lineno) +
                                      ": bad binary gate");
        g.type = type == "AND" ? Gate::Type::And : Gate::Type::Or;
        g.a = resolve(a);
        g.b = resolve(b);
      } else if (type == "NOT") {
        uint64_t a;
        if (!(ls >> a))
          throw std::invalid_argument("circuit parse: line " + std::to_string(lineno) +
                                      ": bad NOT gate");
        g.type = Gate::Type::Not;
        g.a = resolve(a);
      } else {
        throw std::invalid_argument("circuit parse: line " + std::to_string(lineno) +
                                    ": unknown gate type " + type);
      }
      ids[id] = c.gates.size();
      c.gates.push_back(g);
    } else {
      throw std::invalid_argument("circuit parse: line " + std::to_string(lineno) +
                                  ": unknown directive " + tok);
    }
  }
  if (!have_output) throw std::invalid_argument("circuit parse: missing output line");
  c.check_well_formed();
  return c;
}

std::string serialize_circuit(const Circuit& c) {
  std::ostringstream os;
  os << "inputs " << c.n_inputs << "\n";
  for (size_t i = 0; i < c.gates.size(); ++i) {
    const Gate& g = c.gates[i];
    os << "gate " << i << " ";
    switch (g.type) {
      case Gate::Type::Input: os << "INPUT " << g.input_index; break;
      case Gate::Type::True: os << "TRUE"; break;
      case Gate::Type::False: os << "FALSE"; break;
      case Gate::Type::And: os << "AND " << g.a << " " << g.b; break;
      case Gate::Type::Or: os << "OR " << g.a << " " << g.b; break;
      case Gate::Type::Not: os << "NOT " << g.a; break;
    }
    os << "\n";
  }
  os << "output " << c.output << "\n";
  return os.str();
}

bool Formula::eval(std::span<const uint8_t> inputs) const {
  std::vector<int8_t> memo(nodes.size(), -1);
  std::function<bool(int)> rec = [&](int id) -> bool {
    const Node& nd = nodes[id];
    switch (nd.kind) {
      case Node::Kind::Var: return inputs[nd.var];
      case Node::Kind::Const: return nd.value;
      case Node::Kind::And: return rec(nd.left) && rec(nd.right);
      case Node::Kind::Or: return rec(nd.left) || rec(nd.right);
      case Node::Kind::Not: return !rec(nd.left);
    }
    return false;
  };
  (void)memo;
  return rec(root);
}

size_t Formula::gate_count() const {
  size_t c = 0;
  for (const auto& n : nodes)
    if (n.kind != Node::Kind::Var && n.kind != Node::Kind::Const) ++c;
  return c;
}

Formula tseitin(const Circuit& circ) {
  circ.check_well_formed();
  uint32_t n = circ.n_inputs;
  uint32_t s = static_cast<uint32_t>(circ.gates.size());
  Formula f;
  f.n_vars = n + s;
  auto var = [&](uint32_t v) {
    f.nodes.push_back({Formula::Node::Kind::Var, v, false, -1, -1});
    return static_cast<int>(f.nodes.size() - 1);
  };
  auto cnst = [&](bool b) {
    f.nodes.push_back({Formula::Node::Kind::Const, 0, b, -1, -1});
    return static_cast<int>(f.nodes.size() - 1);
  };
  auto mk = [&](Formula::Node::Kind k, int l, int r) {
    f.nodes.push_back({k, 0, false, l, r});
    return static_cast<int>(f.nodes.size() - 1);
  };
  using K = Formula::Node::Kind;
  // Gate i's function over the input variables and wire variables w_j (the
  // children enter as variables, never as subtrees).
  auto gate_expr = [&](size_t i) -> int {
    const Gate& g = circ.gates[i];
    switch (g.type) {
      case Gate::Type::Input: return var(g.input_index);
      case Gate::Type::True: return cnst(true);
      case Gate::Type::False: return cnst(false);
      case Gate::Type::And: return mk(K::And, var(n + g.a), var(n + g.b));
      case Gate::Type::Or: return mk(K::Or, var(n + g.a), var(n + g.b));
      case Gate::Type::Not: return mk(K::Not, var(n + g.a), -1);
    }
    return -1;
  };
  int acc = -1;
  for (uint32_t i = 0; i < s; ++i) {
    int gi1 = gate_expr(i);
    int gi2 = gate_expr(i);  // second copy; formulas have fan-out one
    int wi = var(n + i);
    int nwi = mk(K::Not, var(n + i), -1);
    int zi = mk(K::Or, mk(K::And, gi1, wi), mk(K::And, mk(K::Not, gi2, -1), nwi));
    acc = acc < 0 ? zi : mk(K::And, acc, zi);
  }
  // Force the output wire: C(x) = 1 iff some w satisfies all the wire
  // constraints together with w_out = 1.
  int wout = var(n + circ.output);
  f.root = acc < 0 ? wout : mk(K::And, acc, wout);
  return f;
}

uint32_t arith_eval(const Formula& f, const Gf& gf, std::span<const uint32_t> inputs) {
  std::function<uint32_t(int)> rec = [&](int id) -> uint32_t {
    const Formula::Node& nd = f.nodes[id];
    switch (nd.kind) {
      case Formula::Node::Kind::Var: return inputs[nd.var];
      case Formula::Node::Kind::Const: return nd.value ? 1 : 0;
      case Formula::Node::Kind::And: return gf.mul(rec(nd.left), rec(nd.right));
      case Formula::Node::Kind::Or: {
        // a v b = 1 - (1-a)(1-b), via the And/Not replacement
        uint32_t a = rec(nd.left), b = rec(nd.right);
        return gf.sub(1, gf.mul(gf.sub(1, a), gf.sub(1, b)));
      }
      case Formula::Node::Kind::Not: return gf.sub(1, rec(nd.left));
    }
    return 0;
  };
  return rec(f.root);
}

namespace {

MultiPoly arith_poly_with_leaves(const Formula& f, GfPtr gf,
                                 const std::vector<MultiPoly>& leaves, uint32_t arity) {
  MultiPoly one = MultiPoly::constant(gf, arity, 1);
  std::function<MultiPoly(int)> rec = [&](int id) -> MultiPoly {
    const Formula::Node& nd = f.nodes[id];
    switch (nd.kind) {
      case Formula::Node::Kind::Var: return leaves[nd.var];
      case Formula::Node::Kind::Const:
        return MultiPoly::constant(gf, arity, nd.value ? 1 : 0);
      case Formula::Node::Kind::And: return rec(nd.left) * rec(nd.right);
      case Formula::Node::Kind::Or: {
        MultiPoly a = rec(nd.left), b = rec(nd.right);
        return one - (one - a) * (one - b);
      }
      case Formula::Node::Kind::Not: return one - rec(nd.left);
    }
    return MultiPoly(gf, arity);
  };
  return rec(f.root);
}

}  // namespace

MultiPoly arith_poly(const Formula& f, GfPtr gf, uint32_t max_vars) {
  if (f.n_vars > max_vars) throw std::invalid_argument("arith_poly: too many variables");
  std::vector<MultiPoly> leaves;
  for (uint32_t v = 0; v < f.n_vars; ++v) leaves.push_back(MultiPoly::variable(gf, f.n_vars, v));
  return arith_poly_with_leaves(f, gf, leaves, f.n_vars);
}

SuccinctSatInstance SuccinctSatInstance::from_circuit(Circuit c) {
  c.check_well_formed();
  if (c.n_inputs < 6 || (c.n_inputs - 3) % 3 != 0)
    throw std::invalid_argument("SuccinctSatInstance: input arity must be 3n+3");
  SuccinctSatInstance inst;
  inst.n = (c.n_inputs - 3) / 3;
  inst.circuit = std::move(c);
  return inst;
}

bool SuccinctSatInstance::clause_oracle(uint64_t i, uint64_t j, uint64_t k, bool b1, bool b2,
                                        bool b3) const {
  std::vector<uint8_t> in(3 * n + 3);
  for (uint32_t b = 0; b < n; ++b) {
    in[b] = static_cast<uint8_t>((i >> (n - 1 - b)) & 1);
    in[n + b] = static_cast<uint8_t>((j >> (n - 1 - b)) & 1);
    in[2 * n + b] = static_cast<uint8_t>((k >> (n - 1 - b)) & 1);
  }
  in[3 * n] = b1;
  in[3 * n + 1] = b2;
  in[3 * n + 2] = b3;
  return circuit.eval(in);
}

bool SuccinctSatInstance::satisfied_by(std::span<const uint8_t> assignment) const {
  uint64_t N = 1ull << n;
  if (assignment.size() != N) throw std::invalid_argument("satisfied_by: assignment length");
  for (uint64_t i = 0; i < N; ++i)
    for (uint64_t j = 0; j < N; ++j)
      for (uint64_t k = 0; k < N; ++k)
        for (int b = 0; b < 8; ++b) {
          bool b1 = b & 4, b2 = b & 2, b3 = b & 1;
          if (!clause_oracle(i, j, k, b1, b2, b3)) continue;
          bool lit1 = assignment[i] == (b1 ? 1 : 0);
          bool lit2 = assignment[j] == (b2 ? 1 : 0);
          bool lit3 = assignment[k] == (b3 ? 1 : 0);
          if (!lit1 && !lit2 && !lit3) return false;
        }
  return true;
}

std::optional<std::vector<uint8_t>> SuccinctSatInstance::brute_force() const {
  if (n > 4) throw std::invalid_argument("brute_force: instance too large");
  uint64_t N = 1ull << n;
  for (uint64_t a = 0; a < (1ull << N); ++a) {
    std::vector<uint8_t> assign(N);
    for (uint64_t v = 0; v < N; ++v) assign[v] = static_cast<uint8_t>((a >> v) & 1);
    if (satisfied_by(assign)) return assign;
  }
  return std::nullopt;
}

PaddedParams pad_instance(const SuccinctSatInstance& inst, uint32_t s_inst) {
  uint64_t N = 1ull << s_inst;
  uint64_t s = inst.circuit.size();
  if (N < inst.n || N < s)
    throw std::invalid_argument("pad_instance: 2^s_inst must upper-bound n and s");
  uint64_t S = 4 * N;
  Circuit pc;
  pc.n_inputs = static_cast<uint32_t>(3 * N + 3);
  uint32_t n = inst.n;
  auto add = [&](Gate g) {
    pc.gates.push_back(g);
    return static_cast<int>(pc.gates.size() - 1);
  };
  // OR of the high (N - n) bits of each of the three index blocks.
  std::vector<int> high_bits;
  for (int blk = 0; blk < 3; ++blk)
    for (uint64_t b = 0; b < N - n; ++b)
      high_bits.push_back(add({Gate::Type::Input, -1, -1, static_cast<int>(blk * N + b)}));
  int any_high;
  if (high_bits.empty()) {
    any_high = add({Gate::Type::False, -1, -1, -1});
  } else {
    any_high = high_bits[0];
    for (size_t i = 1; i < high_bits.size(); ++i)
      any_high = add({Gate::Type::Or, any_high, static_cast<int>(high_bits[i]), -1});
  }
  int not_high = add({Gate::Type::Not, any_high, -1, -1});
  // Inline the original circuit on the low input bits.
  std::vector<int> remap(inst.circuit.gates.size());
  for (size_t gi = 0; gi < inst.circuit.gates.size(); ++gi) {
    Gate g = inst.circuit.gates[gi];
    if (g.type == Gate::Type::Input) {
      uint32_t idx = static_cast<uint32_t>(g.input_index);
      uint32_t blk = idx / n;
      uint32_t pos = idx % n;
      int mapped;
      if (idx >= 3 * n) {
        mapped = static_cast<int>(3 * N + (idx - 3 * n));  // b bits
      } else {
        mapped = static_cast<int>(blk * N + (N - n) + pos);  // low bits of block
      }
      remap[gi] = add({Gate::Type::Input, -1, -1, mapped});
    } else {
      Gate ng = g;
      if (ng.a >= 0) ng.a = remap[ng.a];
      if (ng.b >= 0) ng.b = remap[ng.b];
      remap[gi] = add(ng);
    }
  }
  int out = add({Gate::Type::And, not_high, remap[inst.circuit.output], -1});
  pc.output = static_cast<uint32_t>(out);
  if (pc.gates.size() > S)
    throw std::runtime_error("pad_instance: construction exceeded 4N gates");
  while (pc.gates.size() < S) add({Gate::Type::True, -1, -1, -1});
  PaddedParams out_params;
  out_params.N = N;
  out_params.S = S;
  out_params.padded = SuccinctSatInstance::from_circuit(std::move(pc));
  return out_params;
}

json PcpParams::descriptor() const {
  return json{{"q", field->q()}, {"h", h()}, {"m", m}};
}

GPsi::GPsi(const SuccinctSatInstance& inst, const PcpParams& params)
    : inst_(inst),
      params_(params),
      s_(static_cast<uint32_t>(inst.circuit.size())),
      formula_(tseitin(inst.circuit)),
      maps_(params.assignment_code(inst.n)) {
  LdParams ld = params.assignment_code(inst.n);
  if (!ld.exactly_admissible())
    throw std::invalid_argument("GPsi: parameters not exactly admissible (h^m != 2^n)");
}

uint32_t GPsi::eval(std::span<const uint32_t> point) const {
  if (point.size() != m_prime()) throw std::invalid_argument("GPsi::eval: arity");
  uint32_t n = inst_.n;
  uint32_t m = params_.m;
  uint32_t t1 = params_.t1;
  std::vector<uint32_t> inputs(formula_.n_vars);
  for (uint32_t blk = 0; blk < 3; ++blk)
    for (uint32_t bit = 0; bit < n; ++bit)
      inputs[blk * n + bit] = maps_.mu_value(bit % t1, point[blk * m + bit / t1]);
  for (uint32_t i = 0; i < 3 + s_; ++i) inputs[3 * n + i] = point[3 * m + i];
  return arith_eval(formula_, *params_.field, inputs);
}

const MultiPoly& GPsi::poly() const {
  if (poly_) return *poly_;
  uint32_t n = inst_.n;
  uint32_t m = params_.m;
  uint32_t t1 = params_.t1;
  uint32_t mp = m_prime();
  std::vector<MultiPoly> leaves;
  leaves.reserve(formula_.n_vars);
  for (uint32_t blk = 0; blk < 3; ++blk)
    for (uint32_t bit = 0; bit < n; ++bit) {
      // mu_{bit mod t1} applied to coordinate blk*m + bit/t1
      const MultiPoly& mu = maps_.mu_poly(bit % t1);
      MultiPoly lifted(params_.field, mp);
      for (const auto& [e, c] : mu.terms()) {
        std::vector<uint16_t> ee(mp, 0);
        ee[blk * m + bit / t1] = e[0];
        lifted.add_term(ee, c);
      }
      leaves.push_back(lifted);
    }
  for (uint32_t i = 0; i < 3 + s_; ++i)
    leaves.push_back(MultiPoly::variable(params_.field, mp, 3 * m + i));
  poly_ = arith_poly_with_leaves(formula_, params_.field, leaves, mp);
  return *poly_;
}

uint32_t GPsi::sat_value(std::span<const uint32_t> point, std::span<const uint32_t> nu) const {
  const Gf& f = *params_.field;
  uint32_t v = eval(point);
  for (uint32_t i = 0; i < 3; ++i)
    v = f.mul(v, f.sub(nu[i], point[3 * params_.m + i]));
  return v;
}

uint32_t GPsi::zero_value(std::span<const uint32_t> point, std::span<const uint32_t> mu) const {
  const Gf& f = *params_.field;
  auto cube = zero_cube();
  uint32_t acc = 0;
  for (uint32_t i = 0; i < m_prime(); ++i)
    acc = f.add(acc, f.mul(zero_poly_eval(f, cube[i], point[i]), mu[i]));
  return acc;
}

uint32_t GPsi::sat_value_fn(std::span<const uint32_t> point, const MultiPoly& g) const {
  std::vector<uint32_t> nu(3);
  for (uint32_t i = 0; i < 3; ++i) {
    std::vector<uint32_t> x(point.begin() + i * params_.m, point.begin() + (i + 1) * params_.m);
    nu[i] = g.eval(x);
  }
  return sat_value(point, nu);
}

uint32_t GPsi::zero_value_fn(std::span<const uint32_t> point,
                             const std::vector<MultiPoly>& cs) const {
  std::vector<uint32_t> mu(m_prime());
  for (uint32_t i = 0; i < m_prime(); ++i) mu[i] = cs[i].eval(point);
  return zero_value(point, mu);
}

std::vector<std::vector<uint32_t>> GPsi::zero_cube() const {
  LdParams ld = params_.assignment_code(inst_.n);
  auto H = ld.subset_H();
  std::vector<std::vector<uint32_t>> cube;
  for (uint32_t i = 0; i < 3 * params_.m; ++i) cube.push_back(H);
  for (uint32_t i = 0; i < 3 + s_; ++i) cube.push_back({0u, 1u});
  return cube;
}

MultiPoly GPsi::sat_poly(const MultiPoly& g) const {
  uint32_t m = params_.m;
  uint32_t mp = m_prime();
  MultiPoly result = poly();
  for (uint32_t i = 0; i < 3; ++i) {
    // lift g onto block i's variables
    MultiPoly lifted(params_.field, mp);
    for (const auto& [e, c] : g.terms()) {
      std::vector<uint16_t> ee(mp, 0);
      for (uint32_t j = 0; j < m; ++j) ee[i * m + j] = e[j];
      lifted.add_term(ee, c);
    }
    result = result * (lifted - MultiPoly::variable(params_.field, mp, 3 * m + i));
  }
  return result;
}

PcpProof pcp_prove(const SuccinctSatInstance& inst, const PcpParams& params,
                   std::span<const uint8_t> assignment) {
  if (!inst.satisfied_by(assignment)) {
    // name a violated clause
    uint64_t N = 1ull << inst.n;
    for (uint64_t i = 0; i < N; ++i)
      for (uint64_t j = 0; j < N; ++j)
        for (uint64_t k = 0; k < N; ++k)
          for (int b = 0; b < 8; ++b) {
            bool b1 = b & 4, b2 = b & 2, b3 = b & 1;
            if (!inst.clause_oracle(i, j, k, b1, b2, b3)) continue;
            if (assignment[i] != (b1 ? 1 : 0) && assignment[j] != (b2 ? 1 : 0) &&
                assignment[k] != (b3 ? 1 : 0))
              throw std::invalid_argument(
                  "pcp_prove: assignment violates clause (" + std::to_string(i) + "," +
                  std::to_string(j) + "," + std::to_string(k) + ";" + std::to_string(b) + ")");
          }
    throw std::invalid_argument("pcp_prove: unsatisfying assignment");
  }
  return pcp_prove_unchecked(inst, params, assignment);
}

PcpProof pcp_prove_unchecked(const SuccinctSatInstance& inst, const PcpParams& params,
                             std::span<const uint8_t> assignment) {
  GPsi gpsi(inst, params);
  LdParams ld = params.assignment_code(inst.n);
  std::vector<uint32_t> values(assignment.begin(), assignment.end());
  PcpProof proof;
  proof.g = ld_encode(ld, values);
  MultiPoly sat = gpsi.sat_poly(proof.g);
  auto dec = subcube_decompose(sat, gpsi.zero_cube());
  proof.cs = dec.coeffs;
  proof.sat_minus_zero = dec.remainder;
  return proof;
}

PcpOracle honest_pcp_oracle(const PcpProof& proof) {
  PcpOracle o;
  o.g_point = [&proof](const Point& u) { return proof.g.eval(u); };
  o.c_point = [&proof](const Point& u) {
    std::vector<uint32_t> vals;
    vals.reserve(proof.cs.size());
    for (const auto& c : proof.cs) vals.push_back(c.eval(u));
    return vals;
  };
  o.g_plane = [&proof](const AffineSubspace& s) { return proof.g.restricted_to(s); };
  o.c_planes = [&proof](const AffineSubspace& s) {
    std::vector<MultiPoly> out;
    out.reserve(proof.cs.size());
    for (const auto& c : proof.cs) out.push_back(c.restricted_to(s));
    return out;
  };
  return o;
}

PcpRound pcp_verify(const SuccinctSatInstance& inst, const PcpParams& params, const GPsi& gpsi,
                    const PcpOracle& oracle, uint32_t d1, uint32_t d2, Rng& rng) {
  (void)inst;
  const Gf& f = *params.field;
  uint32_t m = params.m;
  uint32_t mp = gpsi.m_prime();
  uint64_t branch = rng.below(3);
  PcpRound r;
  auto rand_vec = [&](uint32_t len) {
    Vec v(len);
    for (auto& c : v) c = static_cast<uint32_t>(rng.below(f.q()));
    return v;
  };
  if (branch == 0) {
    SurfaceTestConfig cfg{params.field, m, d1, 2, 1};
    SurfaceDraw dr = sample_surface_point(cfg, rng);
    MultiPoly fs = oracle.g_plane(dr.s);
    uint32_t y = oracle.g_point(dr.u);
    r.accept = fs.arity() == dr.s.k && fs.total_degree() <= static_cast<int>(d1) &&
               fs.eval(dr.s.coordinates_of(dr.u)) == y;
    r.transcript = transcript_entry("g-low-degree", json{{"s", dr.s.key()}, {"u", dr.u}},
                                    json{{"y", y}}, r.accept);
  } else if (branch == 1) {
    SurfaceTestConfig cfg{params.field, mp, d2, 2,
                          static_cast<uint32_t>(gpsi.m_prime())};
    SurfaceDraw dr = sample_surface_point(cfg, rng);
    auto fs = oracle.c_planes(dr.s);
    auto ys = oracle.c_point(dr.u);
    bool ok = fs.size() == mp && ys.size() == mp;
    if (ok) {
      Vec lam = dr.s.coordinates_of(dr.u);
      for (uint32_t i = 0; i < mp && ok; ++i)
        ok = fs[i].arity() == dr.s.k && fs[i].total_degree() <= static_cast<int>(d2) &&
             fs[i].eval(lam) == ys[i];
    }
    r.accept = ok;
    r.transcript = transcript_entry("c-simultaneous", json{{"s", dr.s.key()}, {"u", dr.u}},
                                    json{{"y", ys}}, r.accept);
  } else {
    Vec point = rand_vec(mp);
    std::vector<uint32_t> nu(3);
    for (uint32_t i = 0; i < 3; ++i) {
      Vec x(point.begin() + i * m, point.begin() + (i + 1) * m);
      nu[i] = oracle.g_point(x);
    }
    auto mu = oracle.c_point(point);
    uint32_t sat = gpsi.sat_value(point, nu);
    uint32_t zero = gpsi.zero_value(point, mu);
    r.accept = sat == zero;
    r.transcript = transcript_entry("formula", json{{"point", point}},
                                    json{{"sat", sat}, {"zero", zero}}, r.accept);
  }
  return r;
}

json pcp_degrees(const GPsi& gpsi, const PcpProof& proof) {
  json cs_deg = json::array();
  for (const auto& c : proof.cs) cs_deg.push_back(c.total_degree());
  MultiPoly sat = gpsi.sat_poly(proof.g);
  return json{{"g", proof.g.total_degree()},
              {"cs", cs_deg},
              {"sat", sat.total_degree()},
              {"gpsi", gpsi.poly().total_degree()},
              {"remainder", proof.sat_minus_zero.total_degree()},
              {"remainder_terms", proof.sat_minus_zero.term_count()}};
}

}  // namespace introlab
