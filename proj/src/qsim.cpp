#include "introlab/qsim.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace introlab {

std::string QuditLayout::str() const {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < regs.size(); ++i)
    os << (i ? "," : "") << "(" << regs[i].n << "," << regs[i].field->q() << ")";
  if (aux_dim > 1) os << ";aux=" << aux_dim;
  os << "]";
  return os.str();
}

Mat kron(const Mat& a, const Mat& b) {
  Mat r(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return r;
}

Vec index_to_string(const Gf& f, uint32_t n, uint64_t idx) {
  Vec s(n);
  for (uint32_t i = n; i-- > 0;) {
    s[i] = static_cast<uint32_t>(idx % f.q());
    idx /= f.q();
  }
  return s;
}

uint64_t string_to_index(const Gf& f, std::span<const uint32_t> s) {
  uint64_t idx = 0;
  for (uint32_t c : s) idx = idx * f.q() + c;
  return idx;
}

namespace {

Mat pauli_X1(const Gf& f, uint32_t x) {
  Mat m = Mat::Zero(f.q(), f.q());
  for (uint32_t j = 0; j < f.q(); ++j) m(f.add(j, x), j) = 1.0;
  return m;
}

Mat pauli_Z1(const Gf& f, uint32_t z) {
  Mat m = Mat::Zero(f.q(), f.q());
  for (uint32_t j = 0; j < f.q(); ++j) m(j, j) = f.root_of_unity(f.trace(f.mul(z, j)));
  return m;
}

CVec tau_x_vector1(const Gf& f, uint32_t u) {
  CVec v(f.q());
  double s = 1.0 / std::sqrt(static_cast<double>(f.q()));
  for (uint32_t w = 0; w < f.q(); ++w)
    v(w) = s * std::conj(f.root_of_unity(f.trace(f.mul(u, w))));
  return v;
}

}  // namespace

Mat pauli_X(const Gf& f, uint32_t n, std::span<const uint32_t> x) {
  Mat m = Mat::Identity(1, 1);
  for (uint32_t i = 0; i < n; ++i) m = kron(m, pauli_X1(f, x[i]));
  return m;
}

Mat pauli_Z(const Gf& f, uint32_t n, std::span<const uint32_t> z) {
  Mat m = Mat::Identity(1, 1);
  for (uint32_t i = 0; i < n; ++i) m = kron(m, pauli_Z1(f, z[i]));
  return m;
}

CVec tau_x_vector(const Gf& f, uint32_t n, std::span<const uint32_t> u) {
  CVec v = CVec::Ones(1);
  for (uint32_t i = 0; i < n; ++i) {
    CVec vi = tau_x_vector1(f, u[i]);
    CVec next(v.size() * vi.size());
    for (Eigen::Index a = 0; a < v.size(); ++a)
      for (Eigen::Index b = 0; b < vi.size(); ++b) next(a * vi.size() + b) = v(a) * vi(b);
    v = next;
  }
  return v;
}

Mat tau_proj(const Gf& f, uint32_t n, char w, std::span<const uint32_t> u) {
  uint64_t d = 1;
  for (uint32_t i = 0; i < n; ++i) d *= f.q();
  if (w == 'Z') {
    Mat m = Mat::Zero(d, d);
    uint64_t idx = string_to_index(f, u);
    m(idx, idx) = 1.0;
    return m;
  }
  if (w == 'X') {
    CVec v = tau_x_vector(f, n, u);
    return v * v.adjoint();
  }
  throw std::invalid_argument("tau_proj: basis must be X or Z");
}

Mat tau_partial(const Gf& f, uint32_t n, char w, const std::vector<Vec>& dirs,
                std::span<const uint32_t> a) {
  uint64_t d = 1;
  for (uint32_t i = 0; i < n; ++i) d *= f.q();
  Mat m = Mat::Zero(d, d);
  for (uint64_t idx = 0; idx < d; ++idx) {
    Vec u = index_to_string(f, n, idx);
    bool ok = true;
    for (size_t i = 0; i < dirs.size() && ok; ++i)
      ok = (f.dot(u, dirs[i]) == a[i]);
    if (ok) m += tau_proj(f, n, w, u);
  }
  return m;
}

Mat subspace_projector(const Gf& f, uint32_t n, const AffineSubspace& s) {
  if (s.m != n) throw std::invalid_argument("subspace_projector: dim mismatch");
  uint64_t d = 1;
  for (uint32_t i = 0; i < n; ++i) d *= f.q();
  Mat m = Mat::Zero(d, d);
  for (const auto& pt : s.enumerate_points()) {
    uint64_t idx = string_to_index(f, pt);
    m(idx, idx) = 1.0;
  }
  return m;
}

void Measurement::validate(double tol) const {
  if (elems.empty()) throw std::invalid_argument("Measurement: empty");
  uint64_t d = elems[0].second.rows();
  Mat sum = Mat::Zero(d, d);
  for (const auto& [label, e] : elems) {
    if (static_cast<uint64_t>(e.rows()) != d || static_cast<uint64_t>(e.cols()) != d)
      throw std::invalid_argument("Measurement: inconsistent dimensions");
    if ((e - e.adjoint()).cwiseAbs().maxCoeff() > tol)
      throw std::invalid_argument("Measurement: element not Hermitian");
    Eigen::SelfAdjointEigenSolver<Mat> es(e, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol)
      throw std::invalid_argument("Measurement: element not PSD");
    if (kind == Kind::Projective && (e * e - e).cwiseAbs().maxCoeff() > tol)
      throw std::invalid_argument("Measurement: element not idempotent");
    sum += e;
  }
  if ((sum - Mat::Identity(d, d)).cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument("Measurement: elements do not sum to identity");
}

Measurement marginalize(const Measurement& m, const std::function<json(const json&)>& relabel) {
  Measurement out;
  out.kind = Measurement::Kind::Povm;
  std::map<std::string, size_t> index;
  for (const auto& [label, e] : m.elems) {
    json nl = relabel(label);
    std::string key = nl.dump();
    auto it = index.find(key);
    if (it == index.end()) {
      index[key] = out.elems.size();
      out.elems.emplace_back(nl, e);
    } else {
      out.elems[it->second].second += e;
    }
  }
  // Marginalizing a projective measurement stays projective (sums of
  // pairwise-orthogonal projectors are projectors).
  if (m.kind == Measurement::Kind::Projective) out.kind = Measurement::Kind::Projective;
  return out;
}

BipartiteState::BipartiteState(QuditLayout layout, CVec amp)
    : layout_(std::move(layout)), amp_(std::move(amp)) {
  uint64_t d = layout_.side_dim();
  if (static_cast<uint64_t>(amp_.size()) != d * d)
    throw std::invalid_argument("BipartiteState: amplitude length mismatch");
  double n = amp_.norm();
  if (std::abs(n - 1.0) > 1e-10) throw std::invalid_argument("BipartiteState: not normalized");
  psi_ = Eigen::Map<const Mat>(amp_.data(), d, d).transpose();
}

BipartiteState BipartiteState::epr(const QuditLayout& layout) {
  Mat aux = Mat::Identity(layout.aux_dim, layout.aux_dim);
  return epr_with_aux(layout, aux);
}

BipartiteState BipartiteState::epr_with_aux(const QuditLayout& layout, const Mat& aux) {
  uint64_t d = layout.side_dim();
  if (d > default_dim_cap())
    throw std::invalid_argument("BipartiteState: dimension exceeds cap");
  if (static_cast<uint64_t>(aux.rows()) != layout.aux_dim ||
      static_cast<uint64_t>(aux.cols()) != layout.aux_dim)
    throw std::invalid_argument("BipartiteState: aux dimension mismatch");
  Mat auxn = aux / aux.norm();
  // Psi = (prod_i delta(a_i, b_i) / sqrt(d_i)) * aux(a_aux, b_aux)
  Mat psi = Mat::Zero(d, d);
  double scale = 1.0;
  for (const auto& r : layout.regs) scale /= std::sqrt(static_cast<double>(r.dim()));
  uint64_t reg_dim = 1;
  for (const auto& r : layout.regs) reg_dim *= r.dim();
  for (uint64_t ra = 0; ra < reg_dim; ++ra)
    for (uint64_t xa = 0; xa < layout.aux_dim; ++xa)
      for (uint64_t xb = 0; xb < layout.aux_dim; ++xb)
        psi(ra * layout.aux_dim + xa, ra * layout.aux_dim + xb) = scale * auxn(xa, xb);
  CVec amp(d * d);
  for (uint64_t a = 0; a < d; ++a)
    for (uint64_t b = 0; b < d; ++b) amp(a * d + b) = psi(a, b);
  BipartiteState st;
  st.layout_ = layout;
  st.amp_ = amp;
  st.psi_ = psi;
  double n = amp.norm();
  st.amp_ /= n;
  st.psi_ /= n;
  return st;
}

std::complex<double> BipartiteState::bilinear(const Mat* a, const Mat* b) const {
  // <psi| A (x) B |psi> = tr(Psi^dag A Psi B^T)
  Mat left = a ? (*a * psi_) : psi_;
  Mat mid = psi_.adjoint() * left;
  if (!b) return mid.trace();
  return (mid * b->transpose()).trace();
}

BipartiteState BipartiteState::applied(const Mat* a, const Mat* b) const {
  Mat np = a ? (*a * psi_) : psi_;
  if (b) np = np * b->transpose();
  BipartiteState st;
  st.layout_ = layout_;
  st.psi_ = np;
  uint64_t d = layout_.side_dim();
  st.amp_.resize(d * d);
  for (uint64_t i = 0; i < d; ++i)
    for (uint64_t j = 0; j < d; ++j) st.amp_(i * d + j) = np(i, j);
  return st;
}

double BipartiteState::epr_register_fidelity(size_t i) const {
  uint64_t di = layout_.regs[i].dim();
  uint64_t pre = layout_.dim_before(i);
  uint64_t post = layout_.dim_after(i);
  // Project onto |EPR_i> across the two sides and measure the squared norm.
  // P = |e><e| on the (reg_i(A), reg_i(B)) factor with |e> = sum_j |jj>/sqrt(di).
  // Accumulate T(aR, bR) = (1/sqrt(di)) sum_j psi[(a_pre, j, a_post), (b_pre, j, b_post)]
  // and the projected norm = (1/di) sum |T|^2 summed over diag placements.
  double acc = 0.0;
  for (uint64_t ap = 0; ap < pre; ++ap)
    for (uint64_t as = 0; as < post; ++as)
      for (uint64_t bp = 0; bp < pre; ++bp)
        for (uint64_t bs = 0; bs < post; ++bs) {
          std::complex<double> t = 0;
          for (uint64_t j = 0; j < di; ++j) {
            uint64_t ra = (ap * di + j) * post + as;
            uint64_t rb = (bp * di + j) * post + bs;
            t += psi_(ra, rb);
          }
          acc += std::norm(t) / static_cast<double>(di);
        }
  return acc;
}

Mat on_register(const QuditLayout& layout, size_t i, const Mat& op) {
  uint64_t pre = layout.dim_before(i);
  uint64_t post = layout.dim_after(i);
  Mat m = kron(Mat::Identity(pre, pre), kron(op, Mat::Identity(post, post)));
  return m;
}

Mat on_aux(const QuditLayout& layout, const Mat& op) {
  uint64_t pre = layout.side_dim() / layout.aux_dim;
  return kron(Mat::Identity(pre, pre), op);
}

Mat on_registers(const QuditLayout& layout, size_t first, size_t last, const Mat& op) {
  uint64_t pre = layout.dim_before(first);
  uint64_t post = layout.dim_after(last);
  return kron(Mat::Identity(pre, pre), kron(op, Mat::Identity(post, post)));
}

MeasureResult measure(const BipartiteState& state, int side, const Measurement& m, Rng& rng) {
  std::vector<double> probs;
  probs.reserve(m.elems.size());
  double total = 0;
  for (const auto& [label, e] : m.elems) {
    double p = std::real(side == 0 ? state.bilinear(&e, nullptr) : state.bilinear(nullptr, &e));
    p = std::max(0.0, p);
    probs.push_back(p);
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-8)
    throw std::runtime_error("measure: probabilities sum to " + std::to_string(total));
  double r = rng.unit() * total;
  size_t pick = 0;
  double acc = 0;
  for (size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (r < acc) {
      pick = i;
      break;
    }
    pick = i;
  }
  const Mat& e = m.elems[pick].second;
  Mat root;
  if (m.kind == Measurement::Kind::Projective) {
    root = e;
  } else {
    Eigen::SelfAdjointEigenSolver<Mat> es(e);
    root = es.eigenvectors() *
           es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
           es.eigenvectors().adjoint();
  }
  BipartiteState post = side == 0 ? state.applied(&root, nullptr) : state.applied(nullptr, &root);
  double n = post.matrix().norm();
  Mat normalized = post.matrix() / n;
  uint64_t d = state.side_dim();
  CVec amp(d * d);
  for (uint64_t i = 0; i < d; ++i)
    for (uint64_t j = 0; j < d; ++j) amp(i * d + j) = normalized(i, j);
  return {m.elems[pick].first, probs[pick], BipartiteState(state.layout(), amp)};
}

Mat hide_register(const QuditLayout& layout, size_t i, const Mat& op) {
  uint64_t di = layout.regs[i].dim();
  uint64_t pre = layout.dim_before(i);
  uint64_t post = layout.dim_after(i);
  uint64_t rest = pre * post;
  Mat traced = Mat::Zero(rest, rest);
  auto full_index = [&](uint64_t p, uint64_t r, uint64_t s) { return (p * di + r) * post + s; };
  for (uint64_t p = 0; p < pre; ++p)
    for (uint64_t s = 0; s < post; ++s)
      for (uint64_t p2 = 0; p2 < pre; ++p2)
        for (uint64_t s2 = 0; s2 < post; ++s2) {
          std::complex<double> t = 0;
          for (uint64_t r = 0; r < di; ++r) t += op(full_index(p, r, s), full_index(p2, r, s2));
          traced(p * post + s, p2 * post + s2) = t;
        }
  // Reassemble with I_i in place: (1/di) I_i (x) tr_i(op), in the original ordering.
  Mat out = Mat::Zero(op.rows(), op.cols());
  for (uint64_t p = 0; p < pre; ++p)
    for (uint64_t s = 0; s < post; ++s)
      for (uint64_t p2 = 0; p2 < pre; ++p2)
        for (uint64_t s2 = 0; s2 < post; ++s2)
          for (uint64_t r = 0; r < di; ++r)
            out(full_index(p, r, s), full_index(p2, r, s2)) =
                traced(p * post + s, p2 * post + s2) / static_cast<double>(di);
  return out;
}

Mat pauli_twirl(const Gf& f, uint32_t n, const Mat& op) {
  uint64_t d = 1;
  for (uint32_t i = 0; i < n; ++i) d *= f.q();
  if (static_cast<uint64_t>(op.rows()) % d != 0)
    throw std::invalid_argument("pauli_twirl: dimension mismatch");
  uint64_t rest = op.rows() / d;
  Mat acc = Mat::Zero(op.rows(), op.cols());
  uint64_t count = 0;
  for (uint64_t iu = 0; iu < d; ++iu)
    for (uint64_t iz = 0; iz < d; ++iz) {
      Vec u = index_to_string(f, n, iu), z = index_to_string(f, n, iz);
      Mat g = kron(pauli_X(f, n, u) * pauli_Z(f, n, z), Mat::Identity(rest, rest));
      acc += g * op * g.adjoint();
      ++count;
    }
  return acc / static_cast<double>(count);
}

Mat subspace_twirl(const Gf& f, uint32_t n, const std::vector<Vec>& dirs, const Mat& op) {
  uint64_t d = 1;
  for (uint32_t i = 0; i < n; ++i) d *= f.q();
  if (static_cast<uint64_t>(op.rows()) % d != 0)
    throw std::invalid_argument("subspace_twirl: dimension mismatch");
  uint64_t rest = op.rows() / d;
  // Z-twirl over all Z(a)
  Mat zt = Mat::Zero(op.rows(), op.cols());
  for (uint64_t ia = 0; ia < d; ++ia) {
    Vec a = index_to_string(f, n, ia);
    Mat g = kron(pauli_Z(f, n, a), Mat::Identity(rest, rest));
    zt += g * op * g.adjoint();
  }
  zt /= static_cast<double>(d);
  // X-twirl over span of dirs (distinct elements via RREF combos)
  uint32_t rank = 0;
  auto rows = rref(f, dirs, &rank);
  uint64_t count = 1;
  for (uint32_t i = 0; i < rank; ++i) count *= f.q();
  Mat xt = Mat::Zero(op.rows(), op.cols());
  for (uint64_t idx = 0; idx < count; ++idx) {
    Vec a(n, 0);
    uint64_t t = idx;
    for (uint32_t i = 0; i < rank; ++i) {
      uint32_t lam = static_cast<uint32_t>(t % f.q());
      t /= f.q();
      for (uint32_t j = 0; j < n; ++j) a[j] = f.add(a[j], f.mul(lam, rows[i][j]));
    }
    Mat g = kron(pauli_X(f, n, a), Mat::Identity(rest, rest));
    xt += g * zt * g.adjoint();
  }
  return xt / static_cast<double>(count);
}

NaimarkDilation naimark_dilate(const Measurement& povm) {
  uint64_t d = povm.dim();
  uint64_t L = povm.elems.size();
  if (povm.kind == Measurement::Kind::Projective) {
    // Already projective: trivial aux.
    return {povm, 1};
  }
  uint64_t D = d * L;
  // Isometry V|psi> = sum_a sqrt(M_a)|psi> (x) |a>, index (i, a) = i*L + a.
  Mat V = Mat::Zero(D, d);
  for (uint64_t a = 0; a < L; ++a) {
    Eigen::SelfAdjointEigenSolver<Mat> es(povm.elems[a].second);
    Mat root = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
               es.eigenvectors().adjoint();
    for (uint64_t i = 0; i < d; ++i)
      for (uint64_t j = 0; j < d; ++j) V(i * L + a, j) += root(i, j);
  }
  // Unitary U with U(|psi> (x) |0>) = V|psi>: columns (j, 0) get V.col(j),
  // the rest get an orthonormal basis of the complement of col(V).
  Mat compl_proj = Mat::Identity(D, D) - V * V.adjoint();
  Eigen::SelfAdjointEigenSolver<Mat> es(compl_proj);
  std::vector<Eigen::Index> comp_cols;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > 0.5) comp_cols.push_back(i);
  if (comp_cols.size() != D - d) throw std::runtime_error("naimark_dilate: complement rank");
  Mat U = Mat::Zero(D, D);
  size_t next = 0;
  for (uint64_t j = 0; j < d; ++j) U.col(j * L) = V.col(j);
  for (uint64_t col = 0; col < D; ++col) {
    if (col % L == 0 && col / L < d) continue;
    U.col(col) = es.eigenvectors().col(comp_cols[next++]);
  }
  Measurement proj;
  proj.kind = Measurement::Kind::Projective;
  for (uint64_t a = 0; a < L; ++a) {
    Mat Qa = Mat::Zero(D, D);
    for (uint64_t i = 0; i < d; ++i) Qa(i * L + a, i * L + a) = 1.0;
    proj.elems.emplace_back(povm.elems[a].first, U.adjoint() * Qa * U);
  }
  return {proj, L};
}

// ---------------------------------------------------------------------------

json RegOutcome::to_json() const {
  json j = json::object();
  if (hidden) j["hidden"] = true;
  if (z) j["z"] = *z;
  if (x) j["x"] = *x;
  if (xpart) j["xpart"] = *xpart;
  if (surface) j["surface"] = subspace_to_json(*surface);
  return j;
}

namespace {

struct UniformSource {
  std::function<Vec(uint32_t)> draw;
};

bool same_span(const Gf& f, const std::vector<Vec>& a, const std::vector<Vec>& b) {
  uint32_t ra = 0, rb = 0;
  auto rrefa = rref(f, a, &ra);
  auto rrefb = rref(f, b, &rb);
  return rrefa == rrefb;
}

std::pair<RegOutcome, RegOutcome> sample_pair(const Gf& f, uint32_t n, const RegOp& alice,
                                              const RegOp& bob, UniformSource& src) {
  using K = RegOp::Kind;
  auto negv = [&](const Vec& v) {
    Vec r(v.size());
    for (size_t i = 0; i < v.size(); ++i) r[i] = f.neg(v[i]);
    return r;
  };
  auto dots = [&](const std::vector<Vec>& dirs, const Vec& u) {
    Vec r(dirs.size());
    for (size_t i = 0; i < dirs.size(); ++i) r[i] = f.dot(u, dirs[i]);
    return r;
  };
  auto surf_through = [&](const Vec& pt, const std::vector<Vec>& dirs) {
    return AffineSubspace::from_point_dirs(Gf::make(f.p(), f.t(), f.modulus()), pt, dirs);
  };

  RegOutcome A, B;
  K ka = alice.kind, kb = bob.kind;
  if (ka == K::Hidden) A.hidden = true;
  if (kb == K::Hidden) B.hidden = true;
  bool a_none = (ka == K::None || ka == K::Hidden);
  bool b_none = (kb == K::None || kb == K::Hidden);
  if (a_none && b_none) return {A, B};

  // Z-compatible group: ZFull / Surface / SurfaceZ pair with each other.
  auto z_like = [](K k) {
    return k == K::ZFull || k == K::Surface || k == K::SurfaceZ || k == K::SurfaceXPartial;
  };
  auto x_like = [](K k) { return k == K::XFull || k == K::XPartial; };

  if ((z_like(ka) || a_none) && (z_like(kb) || b_none)) {
    // Underlying shared Z-string u; surfaces derive from it.  When only
    // surfaces are measured (no full-Z on either side), the surface is still
    // the one containing the implicit u, which is uniform, so the surface is
    // uniform on surfaces(v).  XPartial components attached to surfaces use
    // an independent uniform string.
    const std::vector<Vec>* dirs = nullptr;
    for (const RegOp* op : {&alice, &bob}) {
      if (op->kind == K::Surface || op->kind == K::SurfaceZ || op->kind == K::SurfaceXPartial) {
        if (dirs && !same_span(f, *dirs, op->dirs))
          throw std::invalid_argument("epr_sample: mismatched surface directions");
        dirs = &op->dirs;
      }
    }
    Vec u = src.draw(n);
    auto apply = [&](const RegOp& op, RegOutcome& out) {
      switch (op.kind) {
        case K::ZFull:
          out.z = u;
          break;
        case K::Surface:
          out.surface = surf_through(u, op.dirs);
          break;
        case K::SurfaceZ:
          out.z = u;
          out.surface = surf_through(u, op.dirs);
          break;
        case K::SurfaceXPartial:
          out.surface = surf_through(u, op.dirs);
          break;
        default:
          break;
      }
    };
    apply(alice, A);
    apply(bob, B);
    // Partial-X values: shared fresh string (X(x)~X(x) correlation), values
    // independent of the surface outcome.
    if (ka == K::SurfaceXPartial || kb == K::SurfaceXPartial) {
      Vec ux = src.draw(n);
      if (ka == K::SurfaceXPartial) A.xpart = dots(alice.dirs, ux);
      if (kb == K::SurfaceXPartial) B.xpart = dots(bob.dirs, negv(ux));
    }
    return {A, B};
  }

  if ((x_like(ka) || a_none) && (x_like(kb) || b_none)) {
    Vec u = src.draw(n);
    if (ka == K::XFull) A.x = u;
    if (ka == K::XPartial) A.xpart = dots(alice.dirs, u);
    Vec ub = negv(u);
    if (kb == K::XFull) B.x = ub;
    if (kb == K::XPartial) B.xpart = dots(bob.dirs, ub);
    return {A, B};
  }

  throw std::invalid_argument("epr_sample: unsupported measurement pair");
}

}  // namespace

std::pair<RegOutcome, RegOutcome> epr_sample(const Gf& f, uint32_t n, const RegOp& alice,
                                             const RegOp& bob, Rng& rng) {
  UniformSource src;
  src.draw = [&](uint32_t len) {
    Vec v(len);
    for (auto& c : v) c = static_cast<uint32_t>(rng.below(f.q()));
    return v;
  };
  return sample_pair(f, n, alice, bob, src);
}

std::vector<std::pair<Rational, std::string>> epr_sample_support(const Gf& f, uint32_t n,
                                                                 const RegOp& alice,
                                                                 const RegOp& bob) {
  // Enumerate up to two underlying uniform vectors.
  uint64_t per = 1;
  for (uint32_t i = 0; i < n; ++i) per *= f.q();
  std::map<std::string, Rational> acc;
  uint64_t total = per * per;
  for (uint64_t idx = 0; idx < total; ++idx) {
    uint64_t i1 = idx % per, i2 = idx / per;
    int calls = 0;
    UniformSource src;
    src.draw = [&](uint32_t len) {
      uint64_t v = (calls++ == 0) ? i1 : i2;
      return index_to_string(f, len, v);
    };
    auto [a, b] = sample_pair(f, n, alice, bob, src);
    json j = json::array({a.to_json(), b.to_json()});
    std::string key = j.dump();
    auto it = acc.find(key);
    Rational w(1, total);
    if (it == acc.end())
      acc[key] = w;
    else
      it->second = it->second + w;
  }
  std::vector<std::pair<Rational, std::string>> out;
  for (auto& [k, w] : acc) out.emplace_back(w, k);
  return out;
}

Measurement regop_measurement(const Gf& f, uint32_t n, const RegOp& op) {
  using K = RegOp::Kind;
  uint64_t d = 1;
  for (uint32_t i = 0; i < n; ++i) d *= f.q();
  GfPtr fp = Gf::make(f.p(), f.t(), f.modulus());
  Measurement m;
  m.kind = Measurement::Kind::Projective;
  auto out_json = [&](RegOutcome& o) { return o.to_json(); };
  switch (op.kind) {
    case K::None:
    case K::Hidden: {
      RegOutcome o;
      o.hidden = (op.kind == K::Hidden);
      m.elems.emplace_back(out_json(o), Mat::Identity(d, d));
      break;
    }
    case K::ZFull:
      for (uint64_t i = 0; i < d; ++i) {
        RegOutcome o;
        o.z = index_to_string(f, n, i);
        m.elems.emplace_back(out_json(o), tau_proj(f, n, 'Z', *o.z));
      }
      break;
    case K::XFull:
      for (uint64_t i = 0; i < d; ++i) {
        RegOutcome o;
        o.x = index_to_string(f, n, i);
        m.elems.emplace_back(out_json(o), tau_proj(f, n, 'X', *o.x));
      }
      break;
    case K::XPartial: {
      std::map<std::string, std::pair<json, Mat>> groups;
      for (uint64_t i = 0; i < d; ++i) {
        Vec u = index_to_string(f, n, i);
        Vec a(op.dirs.size());
        for (size_t k = 0; k < op.dirs.size(); ++k) a[k] = f.dot(u, op.dirs[k]);
        RegOutcome o;
        o.xpart = a;
        std::string key = o.to_json().dump();
        auto it = groups.find(key);
        if (it == groups.end())
          groups[key] = {o.to_json(), tau_proj(f, n, 'X', u)};
        else
          it->second.second += tau_proj(f, n, 'X', u);
      }
      for (auto& [k, v] : groups) m.elems.emplace_back(v.first, v.second);
      break;
    }
    case K::Surface:
    case K::SurfaceZ:
    case K::SurfaceXPartial: {
      // Collect distinct surfaces via representative points.
      std::map<std::string, AffineSubspace> surfaces;
      for (uint64_t i = 0; i < d; ++i) {
        Vec pt = index_to_string(f, n, i);
        auto s = AffineSubspace::from_point_dirs(fp, pt, op.dirs);
        surfaces.emplace(s.key(), s);
      }
      for (auto& [key, s] : surfaces) {
        if (op.kind == K::Surface) {
          RegOutcome o;
          o.surface = s;
          m.elems.emplace_back(o.to_json(), subspace_projector(f, n, s));
        } else if (op.kind == K::SurfaceZ) {
          for (const auto& pt : s.enumerate_points()) {
            RegOutcome o;
            o.surface = s;
            o.z = pt;
            m.elems.emplace_back(o.to_json(), tau_proj(f, n, 'Z', pt));
          }
        } else {
          // Surface x partial-X labels; the projectors commute.
          std::map<std::string, std::pair<json, Mat>> groups;
          for (uint64_t i = 0; i < d; ++i) {
            Vec u = index_to_string(f, n, i);
            Vec a(op.dirs.size());
            for (size_t k = 0; k < op.dirs.size(); ++k) a[k] = f.dot(u, op.dirs[k]);
            RegOutcome o;
            o.surface = s;
            o.xpart = a;
            std::string gkey = o.to_json().dump();
            Mat el = subspace_projector(f, n, s) * tau_proj(f, n, 'X', u);
            auto it = groups.find(gkey);
            if (it == groups.end())
              groups[gkey] = {o.to_json(), el};
            else
              it->second.second += el;
          }
          for (auto& [k2, v] : groups)
            if (v.second.cwiseAbs().maxCoeff() > 1e-12) m.elems.emplace_back(v.first, v.second);
        }
      }
      break;
    }
  }
  return m;
}

}  // namespace introlab
