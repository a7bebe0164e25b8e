#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "introlab/gf.hpp"
#include "introlab/poly.hpp"
#include "introlab/rational.hpp"
#include "introlab/rng.hpp"

#include "json.hpp"

namespace introlab {

using Mat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using json = nlohmann::json;

inline uint64_t default_dim_cap() {
  if (const char* env = std::getenv("INTROSPECT_DIM_CAP")) return std::strtoull(env, nullptr, 10);
  return 1ull << 12;
}

// One side of a bipartite system: a list of qudit registers (n_i qudits over
// F_{q_i}) plus an optional unstructured auxiliary slot.
struct QuditLayout {
  struct Reg {
    uint32_t n;
    GfPtr field;
    uint64_t dim() const {
      uint64_t d = 1;
      for (uint32_t i = 0; i < n; ++i) d *= field->q();
      return d;
    }
  };
  std::vector<Reg> regs;
  uint64_t aux_dim = 1;

  uint64_t side_dim() const {
    uint64_t d = aux_dim;
    for (const auto& r : regs) d *= r.dim();
    return d;
  }
  uint64_t dim_before(size_t i) const {
    uint64_t d = 1;
    for (size_t j = 0; j < i; ++j) d *= regs[j].dim();
    return d;
  }
  uint64_t dim_after(size_t i) const {
    uint64_t d = aux_dim;
    for (size_t j = i + 1; j < regs.size(); ++j) d *= regs[j].dim();
    return d;
  }
  std::string str() const;
};

Mat kron(const Mat& a, const Mat& b);

// Basis-string helpers on a single register of n qudits over F_q: index
// <-> digit vector, most significant qudit first.
Vec index_to_string(const Gf& f, uint32_t n, uint64_t idx);
uint64_t string_to_index(const Gf& f, std::span<const uint32_t> s);

// Generalized Paulis on n qudits over F_q.
Mat pauli_X(const Gf& f, uint32_t n, std::span<const uint32_t> x);
Mat pauli_Z(const Gf& f, uint32_t n, std::span<const uint32_t> z);
// Projector onto the W-basis string u (W in {X, Z}).
Mat tau_proj(const Gf& f, uint32_t n, char w, std::span<const uint32_t> u);
// Single X-basis vector |tau^X_u> as a column.
CVec tau_x_vector(const Gf& f, uint32_t n, std::span<const uint32_t> u);
// Projector onto span of W-strings u with u . v_i = a_i for all i.
Mat tau_partial(const Gf& f, uint32_t n, char w, const std::vector<Vec>& dirs,
                std::span<const uint32_t> a);
// Subspace projector Pi^v_s = sum_{w in s} |w><w|.
Mat subspace_projector(const Gf& f, uint32_t n, const AffineSubspace& s);

struct Measurement {
  enum class Kind { Projective, Povm };
  Kind kind = Kind::Projective;
  std::vector<std::pair<json, Mat>> elems;  // only nonzero elements listed

  // Sum to identity within tol; PSD; projective also idempotent.
  void validate(double tol = 1e-10) const;
  uint64_t dim() const { return elems.empty() ? 0 : elems[0].second.rows(); }
};

// Group outcomes by a relabeling map.
Measurement marginalize(const Measurement& m, const std::function<json(const json&)>& relabel);

class BipartiteState {
 public:
  BipartiteState() = default;
  BipartiteState(QuditLayout layout, CVec amp);

  // Tensor of EPR states per register, with the aux slot in a shared
  // maximally-entangled state of dimension aux_dim (aux_dim = 1: trivial).
  static BipartiteState epr(const QuditLayout& layout);
  // Same but with an explicit (possibly non-EPR) shared aux amplitude matrix
  // (aux_dim x aux_dim, Frobenius-normalized by the constructor).
  static BipartiteState epr_with_aux(const QuditLayout& layout, const Mat& aux);

  const QuditLayout& layout() const { return layout_; }
  uint64_t side_dim() const { return layout_.side_dim(); }
  const CVec& amplitudes() const { return amp_; }
  // State as a D_A x D_B matrix Psi with |psi> = sum Psi_ab |a>|b>.
  const Mat& matrix() const { return psi_; }

  double norm() const { return amp_.norm(); }
  // <psi| A (x) B |psi>; pass identity via nullptr.
  std::complex<double> bilinear(const Mat* a, const Mat* b) const;
  BipartiteState applied(const Mat* a, const Mat* b) const;  // (A (x) B)|psi>, unnormalized
  // Overlap with the EPR state on register i (projector fidelity).
  double epr_register_fidelity(size_t i) const;

 private:
  QuditLayout layout_;
  CVec amp_;
  Mat psi_;
};

// Embed an operator acting on register i into the full side space.
Mat on_register(const QuditLayout& layout, size_t i, const Mat& op);
Mat on_aux(const QuditLayout& layout, const Mat& op);
// Embed an operator acting on a consecutive register range [first, last].
Mat on_registers(const QuditLayout& layout, size_t first, size_t last, const Mat& op);

struct MeasureResult {
  json outcome;
  double probability;
  BipartiteState post;
};
MeasureResult measure(const BipartiteState& state, int side, const Measurement& m, Rng& rng);

// hide_i(M) = (1/tr I_i) I_i (x) tr_i(M), on the side operator M.
Mat hide_register(const QuditLayout& layout, size_t i, const Mat& op);

// Pauli twirl over all q^{2n} pairs X(u)Z(u') on a single register embedded
// in `layout` at position i (identity elsewhere).
Mat pauli_twirl(const Gf& f, uint32_t n, const Mat& op);
// v-subspace twirl: Z-twirl over all Z(a), then X-twirl over X(a), a in span(v).
Mat subspace_twirl(const Gf& f, uint32_t n, const std::vector<Vec>& dirs, const Mat& op);

// Naimark dilation: POVM -> projective measurement on dim * n_outcomes with
// aux state |0>; outcome distributions agree on |psi> (x) |0>.
struct NaimarkDilation {
  Measurement projective;
  uint64_t aux_dim;
};
NaimarkDilation naimark_dilate(const Measurement& povm);

// ---------------------------------------------------------------------------
// Closed-form joint sampling of honest register measurements on EPR pairs.

struct RegOp {
  enum class Kind {
    None,       // no measurement on this side
    Hidden,     // explicit hide: outcome is the empty symbol
    ZFull,      // full Z-basis string
    XFull,      // full X-basis string
    XPartial,   // values u.v_i for the direction tuple
    Surface,    // Pi^v measurement: outcome is an affine subspace
    SurfaceZ,   // commuting Z-string + containing surface (oracularized pairs)
    SurfaceXPartial  // surface plus partial-X values (ihide test 4 side)
  };
  Kind kind = Kind::None;
  std::vector<Vec> dirs;  // for XPartial / Surface* kinds
};

struct RegOutcome {
  std::optional<Vec> z;
  std::optional<Vec> x;
  std::optional<Vec> xpart;
  std::optional<AffineSubspace> surface;
  bool hidden = false;
  json to_json() const;
};

// Sample the joint outcome of the honest commuting measurements described by
// `ops` on the two halves of EPR_q^n; exact closed form, no statevector.
std::pair<RegOutcome, RegOutcome> epr_sample(const Gf& f, uint32_t n,
                                             const RegOp& alice, const RegOp& bob, Rng& rng);

// Exact distribution of epr_sample as (probability, outcome-pair-key) items;
// the key is the JSON dump of both outcomes.  Enumerates the underlying
// uniform draws, so q^n must be small.
std::vector<std::pair<Rational, std::string>> epr_sample_support(const Gf& f, uint32_t n,
                                                                 const RegOp& alice,
                                                                 const RegOp& bob);

// Build the honest measurement matrices realizing a RegOp on one register
// (for validating the sampler against the statevector oracle).
Measurement regop_measurement(const Gf& f, uint32_t n, const RegOp& op);

}  // namespace introlab
