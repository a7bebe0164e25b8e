#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace introlab {

class Gf;
using GfPtr = std::shared_ptr<const Gf>;

// Finite field GF(p^t), q = p^t <= 2^16.  Elements are packed base-p digit
// vectors in the power basis: digit i of the packed value is the coefficient
// of x^i.  For p = 2 the packed value is the usual bitmask representation.
// Multiplication and inversion run on discrete-log tables; addition is
// digitwise mod p (xor when p = 2).
class Gf {
 public:
  static GfPtr make(uint32_t p, uint32_t t);
  static GfPtr make(uint32_t p, uint32_t t, const std::vector<uint32_t>& modulus);

  uint32_t p() const { return p_; }
  uint32_t t() const { return t_; }
  uint32_t q() const { return q_; }
  const std::vector<uint32_t>& modulus() const { return modulus_; }

  uint32_t add(uint32_t a, uint32_t b) const;
  uint32_t sub(uint32_t a, uint32_t b) const;
  uint32_t neg(uint32_t a) const;
  uint32_t mul(uint32_t a, uint32_t b) const {
    if (a == 0 || b == 0) return 0;
    return exp_[log_[a] + log_[b]];
  }
  uint32_t inv(uint32_t a) const;
  uint32_t pow(uint32_t a, uint64_t e) const;

  // One fixed multiplicative generator; powers enumerate the nonzero elements.
  uint32_t generator() const { return gen_; }

  // tr(a) = sum_{l<t} a^{p^l}, reduced into the prime field as an integer in [0, p).
  uint32_t trace(uint32_t a) const { return trace_[a]; }

  // Basis alpha_1..alpha_t with tr(alpha_i alpha_j) = delta_ij.  p = 2 only.
  const std::vector<uint32_t>& self_dual_basis() const;

  // (1/q) sum_u omega^{tr(u a)} with omega = exp(2 pi i / p).
  std::complex<double> character_sum(uint32_t a) const;

  // omega^k for the p-th root of unity.
  std::complex<double> root_of_unity(uint32_t k) const;

  uint32_t from_int(uint64_t n) const;       // base-p digits of n
  uint64_t to_int(uint32_t a) const;         // inverse of from_int
  std::string elem_hex(uint32_t a) const;    // little-endian digit hex string
  uint32_t elem_from_hex(const std::string& s) const;
  std::string name() const;                  // "GF(p^t)/<modulus hex>"

  uint32_t dot(std::span<const uint32_t> a, std::span<const uint32_t> b) const;

  bool same(const Gf& o) const {
    return p_ == o.p_ && t_ == o.t_ && modulus_ == o.modulus_;
  }

 private:
  Gf() = default;
  void build_tables();

  uint32_t p_ = 0, t_ = 0, q_ = 0;
  uint32_t gen_ = 0;
  std::vector<uint32_t> modulus_;   // length t+1, monic
  std::vector<uint32_t> exp_;       // size 2(q-1): exp_[i] = gen^i
  std::vector<uint32_t> log_;       // size q: log of nonzero elements
  std::vector<uint32_t> trace_;     // size q
  mutable std::vector<uint32_t> self_dual_;  // built on first use (p = 2)
};

// Irreducibility of a monic polynomial over GF(p), coefficients low-to-high.
bool is_irreducible(uint32_t p, const std::vector<uint32_t>& poly);

// Lexicographically smallest monic irreducible of degree t over GF(p),
// ordering coefficient sequences (c_0, c_1, ..., c_{t-1}) as base-p integers.
std::vector<uint32_t> default_modulus(uint32_t p, uint32_t t);

// E_{u in V} omega^{tr(<u, a>)} over a subspace V of F_q^n spanned by
// `basis` rows; equals 1 when a is orthogonal to V.
std::complex<double> character_sum_subspace(const Gf& f,
                                            const std::vector<std::vector<uint32_t>>& basis,
                                            std::span<const uint32_t> a);

// Thin value type for the public/binding surface; core loops use packed
// uint32_t values with an explicit field reference.
struct FieldElement {
  GfPtr field;
  uint32_t v = 0;

  FieldElement() = default;
  FieldElement(GfPtr f, uint32_t value) : field(std::move(f)), v(value) {}

  FieldElement operator+(const FieldElement& o) const { return {check(o), field->add(v, o.v)}; }
  FieldElement operator-(const FieldElement& o) const { return {check(o), field->sub(v, o.v)}; }
  FieldElement operator*(const FieldElement& o) const { return {check(o), field->mul(v, o.v)}; }
  FieldElement inverse() const { return {field, field->inv(v)}; }
  bool operator==(const FieldElement& o) const { return field->same(*o.field) && v == o.v; }

 private:
  GfPtr check(const FieldElement& o) const;
};

}  // namespace introlab
