#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "introlab/gf.hpp"

#include "json.hpp"

namespace introlab {

using Point = std::vector<uint32_t>;
using Vec = std::vector<uint32_t>;

// Affine k-flat in F_q^m, stored canonically: direction rows in reduced row
// echelon form and the intercept at the lexicographically minimal point of
// the flat.  The original (possibly dependent, possibly zero) direction
// tuple is preserved for protocol messages that transmit it verbatim.
struct AffineSubspace {
  GfPtr field;
  uint32_t m = 0;
  uint32_t k = 0;             // rank of the direction matrix
  Point intercept;            // lex-min point
  std::vector<Vec> rows;      // RREF rows, k of them
  std::vector<Vec> raw_dirs;  // as supplied

  static AffineSubspace from_point_dirs(GfPtr f, const Point& p,
                                        const std::vector<Vec>& dirs);

  bool contains(std::span<const uint32_t> pt) const;
  // Points enumerated as intercept + sum lambda_i rows_i, lambdas in
  // lexicographic order; q^k must be small.
  std::vector<Point> enumerate_points() const;
  Point point_at(std::span<const uint32_t> lambdas) const;
  // Coordinates of a member point in the rows basis.
  Vec coordinates_of(std::span<const uint32_t> pt) const;

  bool operator==(const AffineSubspace& o) const {
    return m == o.m && k == o.k && intercept == o.intercept && rows == o.rows;
  }
  bool operator<(const AffineSubspace& o) const;
  // Wire encoding (u, w_1, ..., w_k).
  std::string key() const;
};

// Canonical JSON wire form {"u": intercept, "rows": RREF rows}.
AffineSubspace subspace_from_json(GfPtr f, const nlohmann::json& j);
nlohmann::json subspace_to_json(const AffineSubspace& s);

// Sparse multivariate polynomial over GF(q).  Exponents are not reduced via
// x^q = x unless normalize_xq is called; encoding and restriction degrees
// are tracked on the formal polynomial.
class MultiPoly {
 public:
  MultiPoly() = default;
  MultiPoly(GfPtr f, uint32_t arity) : field_(std::move(f)), arity_(arity) {}

  static MultiPoly constant(GfPtr f, uint32_t arity, uint32_t c);
  static MultiPoly variable(GfPtr f, uint32_t arity, uint32_t index);

  GfPtr field() const { return field_; }
  uint32_t arity() const { return arity_; }
  bool is_zero() const { return terms_.empty(); }
  int total_degree() const;  // -1 for the zero polynomial
  int degree_in(uint32_t var) const;
  size_t term_count() const { return terms_.size(); }
  const std::map<std::vector<uint16_t>, uint32_t>& terms() const { return terms_; }

  void add_term(const std::vector<uint16_t>& exps, uint32_t coeff);

  MultiPoly operator+(const MultiPoly& o) const;
  MultiPoly operator-(const MultiPoly& o) const;
  MultiPoly operator*(const MultiPoly& o) const;
  bool operator==(const MultiPoly& o) const {
    return arity_ == o.arity_ && terms_ == o.terms_;
  }
  MultiPoly scaled(uint32_t c) const;

  uint32_t eval(std::span<const uint32_t> x) const;

  // f' of arity s.k with f'(lambda) = f(intercept + sum lambda_i rows_i).
  MultiPoly restricted_to(const AffineSubspace& s) const;

  // Substitute variable `var` by an affine form c0 + sum c[i] y_i over a new
  // variable set of the given arity (used by arithmetization composition).
  MultiPoly substituted(uint32_t var, const MultiPoly& replacement) const;

  // Reduce exponents with x^q = x (opt-in).
  MultiPoly normalized_xq() const;

  // Graded-lexicographic coefficient list up to total degree `cap`.
  std::vector<uint32_t> coeff_list_graded_lex(uint32_t cap) const;
  static MultiPoly from_coeff_list_graded_lex(GfPtr f, uint32_t arity, uint32_t cap,
                                              std::span<const uint32_t> coeffs);
  static std::vector<std::vector<uint16_t>> graded_lex_exponents(uint32_t arity, uint32_t cap);

  std::string str() const;

 private:
  GfPtr field_;
  uint32_t arity_ = 0;
  std::map<std::vector<uint16_t>, uint32_t> terms_;
};

// Univariate indicator of x over H: 1 at x, 0 on H \ {x}, degree |H|-1.
MultiPoly indicator_1d(GfPtr f, const std::vector<uint32_t>& H, uint32_t x);
// Product indicator over H_1 x ... x H_m at the point xs.
MultiPoly indicator_nd(GfPtr f, const std::vector<std::vector<uint32_t>>& Hs, const Point& xs);

// zero_S(x) = prod_{b in S} (x - b); univariate.
MultiPoly zero_poly(GfPtr f, const std::vector<uint32_t>& S);
uint32_t zero_poly_eval(const Gf& f, const std::vector<uint32_t>& S, uint32_t x);

// Canonical low-degree encoding parameters: messages of length n indexed by
// bit strings, subcube H^m with |H| = h = 2^{t1}, field q = 2^{t2}.
struct LdParams {
  GfPtr field;
  uint64_t n = 0;   // message length
  uint32_t t1 = 0;  // h = 2^t1
  uint32_t m = 0;   // variables

  uint32_t h() const { return 1u << t1; }
  uint32_t degree() const { return m * (h() - 1); }
  uint64_t capacity() const;  // h^m
  bool admissible() const;
  bool exactly_admissible() const;  // h^m == 2^n_bits == n
  uint32_t bits() const { return t1 * m; }  // message index bit length
  std::vector<uint32_t> subset_H() const;   // the canonical H, enumerated
};

// Canonical maps sigma / pi / nu / mu from the self-dual basis.
struct CanonicalMaps {
  explicit CanonicalMaps(const LdParams& params);

  uint32_t sigma1(std::span<const uint8_t> bits) const;  // t1 bits -> H element
  Point sigma(std::span<const uint8_t> bits) const;      // t1*m bits -> H^m
  Point pi_index(uint64_t i) const;                      // binary expansion, then sigma
  Point pi_bits(std::span<const uint8_t> bits) const;
  std::vector<uint8_t> nu(std::span<const uint32_t> x) const;  // componentwise mu
  uint8_t mu_component(uint32_t i, uint32_t y) const;          // mu_i as a bit (valid on H)
  uint32_t mu_value(uint32_t i, uint32_t y) const;             // mu_i as a field value
  const MultiPoly& mu_poly(uint32_t i) const { return mu_polys()[i]; }

  const LdParams& params() const { return params_; }

 private:
  const std::vector<MultiPoly>& mu_polys() const;  // built on first use

  LdParams params_;
  std::vector<uint32_t> H_;
  mutable std::vector<MultiPoly> mu_polys_;  // univariate, degree h-1
};

// Low-degree (Reed-Muller) encoding g_a with g_a(pi(i)) = a_i.
MultiPoly ld_encode(const LdParams& params, std::span<const uint32_t> values);
MultiPoly ld_encode_with_injection(const LdParams& params, std::span<const uint32_t> values,
                                   const std::vector<Point>& injection);

struct SubcubeDecomposition {
  bool ok = false;                 // true iff the input vanishes on the cube
  std::vector<MultiPoly> coeffs;   // c_1..c_m, deg(c_i) <= deg(f) - |H_i|
  MultiPoly remainder;             // f - sum zero_{H_i}(x_i) c_i
  std::optional<Point> witness;    // cube point with f != 0 when !ok
};

// Successive division by zero_{H_i}(x_i) in variable order 1..m.
SubcubeDecomposition subcube_decompose(const MultiPoly& f,
                                       const std::vector<std::vector<uint32_t>>& cube);

// RREF of a direction matrix over GF(q); returns rows and rank.
std::vector<Vec> rref(const Gf& f, std::vector<Vec> rows, uint32_t* rank = nullptr);

}  // namespace introlab
