#include "introlab/poly.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace introlab {

namespace {

void check_same_field(const MultiPoly& a, const MultiPoly& b) {
  if (!a.field() || !b.field() || !a.field()->same(*b.field()))
    throw std::invalid_argument("MultiPoly: field mismatch");
  if (a.arity() != b.arity()) throw std::invalid_argument("MultiPoly: arity mismatch");
}

}  // namespace

std::vector<Vec> rref(const Gf& f, std::vector<Vec> rows, uint32_t* rank) {
  size_t r = 0;
  size_t m = rows.empty() ? 0 : rows[0].size();
  for (size_t col = 0; col < m && r < rows.size(); ++col) {
    size_t piv = r;
    while (piv < rows.size() && rows[piv][col] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[r], rows[piv]);
    uint32_t inv = f.inv(rows[r][col]);
    for (auto& c : rows[r]) c = f.mul(c, inv);
    for (size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][col] == 0) continue;
      uint32_t factor = rows[i][col];
      for (size_t j = 0; j < m; ++j)
        rows[i][j] = f.sub(rows[i][j], f.mul(factor, rows[r][j]));
    }
    ++r;
  }
  rows.resize(r);
  if (rank) *rank = static_cast<uint32_t>(r);
  return rows;
}

AffineSubspace AffineSubspace::from_point_dirs(GfPtr f, const Point& p,
                                               const std::vector<Vec>& dirs) {
  AffineSubspace s;
  s.field = f;
  s.m = static_cast<uint32_t>(p.size());
  s.raw_dirs = dirs;
  for (const auto& d : dirs)
    if (d.size() != p.size())
      throw std::invalid_argument("AffineSubspace: direction length mismatch");
  uint32_t rank = 0;
  s.rows = rref(*f, dirs, &rank);
  s.k = rank;
  // Zero the pivot coordinates of the base point: the unique flat point with
  // zeros at all pivots is also the lexicographically minimal one.
  Point u = p;
  for (const auto& row : s.rows) {
    size_t piv = 0;
    while (piv < row.size() && row[piv] == 0) ++piv;
    uint32_t c = u[piv];
    if (c != 0)
      for (size_t j = 0; j < u.size(); ++j) u[j] = f->sub(u[j], f->mul(c, row[j]));
  }
  s.intercept = u;
  return s;
}

bool AffineSubspace::contains(std::span<const uint32_t> pt) const {
  if (pt.size() != m) return false;
  Vec d(m);
  for (uint32_t j = 0; j < m; ++j) d[j] = field->sub(pt[j], intercept[j]);
  // reduce d by RREF rows
  for (const auto& row : rows) {
    size_t piv = 0;
    while (piv < row.size() && row[piv] == 0) ++piv;
    uint32_t c = d[piv];
    if (c != 0)
      for (size_t j = 0; j < m; ++j) d[j] = field->sub(d[j], field->mul(c, row[j]));
  }
  return std::all_of(d.begin(), d.end(), [](uint32_t x) { return x == 0; });
}

Point AffineSubspace::point_at(std::span<const uint32_t> lambdas) const {
  if (lambdas.size() != k) throw std::invalid_argument("point_at: lambda arity");
  Point p = intercept;
  for (uint32_t i = 0; i < k; ++i)
    for (uint32_t j = 0; j < m; ++j)
      p[j] = field->add(p[j], field->mul(lambdas[i], rows[i][j]));
  return p;
}

Vec AffineSubspace::coordinates_of(std::span<const uint32_t> pt) const {
  Vec d(m);
  for (uint32_t j = 0; j < m; ++j) d[j] = field->sub(pt[j], intercept[j]);
  Vec lam(k, 0);
  for (uint32_t i = 0; i < k; ++i) {
    size_t piv = 0;
    while (piv < rows[i].size() && rows[i][piv] == 0) ++piv;
    lam[i] = d[piv];
    if (lam[i] != 0)
      for (size_t j = 0; j < m; ++j) d[j] = field->sub(d[j], field->mul(lam[i], rows[i][j]));
  }
  if (!std::all_of(d.begin(), d.end(), [](uint32_t x) { return x == 0; }))
    throw std::invalid_argument("coordinates_of: point not in subspace");
  return lam;
}

std::vector<Point> AffineSubspace::enumerate_points() const {
  uint64_t count = 1;
  for (uint32_t i = 0; i < k; ++i) count *= field->q();
  std::vector<Point> pts;
  pts.reserve(count);
  Vec lam(k, 0);
  for (uint64_t idx = 0; idx < count; ++idx) {
    uint64_t n = idx;
    for (uint32_t i = 0; i < k; ++i) {
      lam[k - 1 - i] = static_cast<uint32_t>(n % field->q());
      n /= field->q();
    }
    pts.push_back(point_at(lam));
  }
  return pts;
}

bool AffineSubspace::operator<(const AffineSubspace& o) const {
  if (m != o.m) return m < o.m;
  if (k != o.k) return k < o.k;
  if (intercept != o.intercept) return intercept < o.intercept;
  return rows < o.rows;
}

std::string AffineSubspace::key() const {
  std::ostringstream os;
  os << "(";
  for (uint32_t j = 0; j < m; ++j) os << (j ? "," : "") << intercept[j];
  for (const auto& row : rows) {
    os << ";";
    for (uint32_t j = 0; j < m; ++j) os << (j ? "," : "") << row[j];
  }
  os << ")";
  return os.str();
}

MultiPoly MultiPoly::constant(GfPtr f, uint32_t arity, uint32_t c) {
  MultiPoly p(f, arity);
  if (c != 0) p.terms_[std::vector<uint16_t>(arity, 0)] = c;
  return p;
}

MultiPoly MultiPoly::variable(GfPtr f, uint32_t arity, uint32_t index) {
  if (index >= arity) throw std::invalid_argument("MultiPoly: variable index");
  MultiPoly p(f, arity);
  std::vector<uint16_t> e(arity, 0);
  e[index] = 1;
  p.terms_[e] = 1;
  return p;
}

int MultiPoly::total_degree() const {
  int d = -1;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (uint16_t x : e) s += x;
    d = std::max(d, s);
  }
  return d;
}

int MultiPoly::degree_in(uint32_t var) const {
  int d = -1;
  for (const auto& [e, c] : terms_) d = std::max(d, static_cast<int>(e[var]));
  return d;
}

void MultiPoly::add_term(const std::vector<uint16_t>& exps, uint32_t coeff) {
  if (exps.size() != arity_) throw std::invalid_argument("MultiPoly: exponent arity");
  if (coeff == 0) return;
  auto it = terms_.find(exps);
  if (it == terms_.end()) {
    terms_[exps] = coeff;
  } else {
    uint32_t c = field_->add(it->second, coeff);
    if (c == 0)
      terms_.erase(it);
    else
      it->second = c;
  }
}

MultiPoly MultiPoly::operator+(const MultiPoly& o) const {
  check_same_field(*this, o);
  MultiPoly r = *this;
  for (const auto& [e, c] : o.terms_) r.add_term(e, c);
  return r;
}

MultiPoly MultiPoly::operator-(const MultiPoly& o) const {
  check_same_field(*this, o);
  MultiPoly r = *this;
  for (const auto& [e, c] : o.terms_) r.add_term(e, field_->neg(c));
  return r;
}

MultiPoly MultiPoly::operator*(const MultiPoly& o) const {
  check_same_field(*this, o);
  MultiPoly r(field_, arity_);
  std::vector<uint16_t> e(arity_);
  for (const auto& [e1, c1] : terms_) {
    for (const auto& [e2, c2] : o.terms_) {
      for (uint32_t i = 0; i < arity_; ++i) {
        uint32_t s = static_cast<uint32_t>(e1[i]) + e2[i];
        if (s > 0xffff) throw std::overflow_error("MultiPoly: exponent overflow");
        e[i] = static_cast<uint16_t>(s);
      }
      r.add_term(e, field_->mul(c1, c2));
    }
  }
  return r;
}

MultiPoly MultiPoly::scaled(uint32_t c) const {
  MultiPoly r(field_, arity_);
  if (c == 0) return r;
  for (const auto& [e, cc] : terms_) r.terms_[e] = field_->mul(cc, c);
  return r;
}

uint32_t MultiPoly::eval(std::span<const uint32_t> x) const {
  if (x.size() != arity_) throw std::invalid_argument("MultiPoly: eval arity mismatch");
  // Per-variable power tables up to the max exponent present.
  std::vector<std::vector<uint32_t>> pows(arity_);
  for (uint32_t i = 0; i < arity_; ++i) {
    int d = degree_in(i);
    auto& t = pows[i];
    t.resize(static_cast<size_t>(d < 0 ? 0 : d) + 1);
    if (!t.empty()) t[0] = 1;
    for (int e = 1; e <= d; ++e) t[e] = field_->mul(t[e - 1], x[i]);
  }
  uint32_t acc = 0;
  for (const auto& [e, c] : terms_) {
    uint32_t prod = c;
    for (uint32_t i = 0; i < arity_; ++i)
      if (e[i]) prod = field_->mul(prod, pows[i][e[i]]);
    acc = field_->add(acc, prod);
  }
  return acc;
}

MultiPoly MultiPoly::restricted_to(const AffineSubspace& s) const {
  if (s.m != arity_) throw std::invalid_argument("restricted_to: ambient mismatch");
  // Substitute x_j = intercept_j + sum_i lambda_i rows[i][j] and expand.
  // Affine forms per variable, arity k.
  std::vector<MultiPoly> aff(arity_);
  for (uint32_t j = 0; j < arity_; ++j) {
    MultiPoly a = MultiPoly::constant(field_, s.k, s.intercept[j]);
    for (uint32_t i = 0; i < s.k; ++i) {
      if (s.rows[i][j] == 0) continue;
      a = a + MultiPoly::variable(field_, s.k, i).scaled(s.rows[i][j]);
    }
    aff[j] = a;
  }
  // Cache powers of each affine form on demand.
  std::vector<std::vector<MultiPoly>> pow_cache(arity_);
  for (uint32_t j = 0; j < arity_; ++j)
    pow_cache[j].push_back(MultiPoly::constant(field_, s.k, 1));
  auto power = [&](uint32_t j, uint16_t e) -> const MultiPoly& {
    auto& cache = pow_cache[j];
    while (cache.size() <= e) cache.push_back(cache.back() * aff[j]);
    return cache[e];
  };
  MultiPoly result(field_, s.k);
  for (const auto& [e, c] : terms_) {
    MultiPoly term = MultiPoly::constant(field_, s.k, c);
    for (uint32_t j = 0; j < arity_; ++j)
      if (e[j]) term = term * power(j, e[j]);
    result = result + term;
  }
  return result;
}

MultiPoly MultiPoly::substituted(uint32_t var, const MultiPoly& replacement) const {
  if (replacement.arity() != arity_)
    throw std::invalid_argument("substituted: replacement arity mismatch");
  MultiPoly result(field_, arity_);
  std::vector<MultiPoly> pow_cache{MultiPoly::constant(field_, arity_, 1)};
  auto power = [&](uint16_t e) -> const MultiPoly& {
    while (pow_cache.size() <= e) pow_cache.push_back(pow_cache.back() * replacement);
    return pow_cache[e];
  };
  for (const auto& [e, c] : terms_) {
    std::vector<uint16_t> rest = e;
    uint16_t k = e[var];
    rest[var] = 0;
    MultiPoly base(field_, arity_);
    base.add_term(rest, c);
    result = result + base * power(k);
  }
  return result;
}

MultiPoly MultiPoly::normalized_xq() const {
  uint32_t q = field_->q();
  MultiPoly r(field_, arity_);
  for (const auto& [e, c] : terms_) {
    std::vector<uint16_t> ne = e;
    for (auto& x : ne)
      if (x >= q) x = static_cast<uint16_t>((x - 1) % (q - 1) + 1);
    r.add_term(ne, c);
  }
  return r;
}

std::vector<std::vector<uint16_t>> MultiPoly::graded_lex_exponents(uint32_t arity, uint32_t cap) {
  std::vector<std::vector<uint16_t>> out;
  std::vector<uint16_t> cur(arity, 0);
  // enumerate all exponent vectors with total degree <= cap, grouped by total
  // degree, lexicographic within a degree block
  for (uint32_t d = 0; d <= cap; ++d) {
    std::function<void(uint32_t, uint32_t)> rec = [&](uint32_t pos, uint32_t left) {
      if (pos == arity) {
        if (left == 0) out.push_back(cur);
        return;
      }
      if (pos == arity - 1) {
        cur[pos] = static_cast<uint16_t>(left);
        out.push_back(cur);
        cur[pos] = 0;
        return;
      }
      for (uint32_t e = 0; e <= left; ++e) {
        cur[pos] = static_cast<uint16_t>(e);
        rec(pos + 1, left - e);
      }
      cur[pos] = 0;
    };
    rec(0, d);
  }
  return out;
}

std::vector<uint32_t> MultiPoly::coeff_list_graded_lex(uint32_t cap) const {
  auto exps = graded_lex_exponents(arity_, cap);
  std::vector<uint32_t> out;
  out.reserve(exps.size());
  for (const auto& e : exps) {
    auto it = terms_.find(e);
    out.push_back(it == terms_.end() ? 0 : it->second);
  }
  // Every term must fit under the cap.
  if (total_degree() > static_cast<int>(cap))
    throw std::invalid_argument("coeff_list_graded_lex: degree exceeds cap");
  return out;
}

MultiPoly MultiPoly::from_coeff_list_graded_lex(GfPtr f, uint32_t arity, uint32_t cap,
                                                std::span<const uint32_t> coeffs) {
  auto exps = graded_lex_exponents(arity, cap);
  if (coeffs.size() != exps.size())
    throw std::invalid_argument("from_coeff_list_graded_lex: length mismatch");
  MultiPoly p(f, arity);
  for (size_t i = 0; i < exps.size(); ++i) p.add_term(exps[i], coeffs[i]);
  return p;
}

std::string MultiPoly::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << c;
    for (uint32_t i = 0; i < arity_; ++i)
      if (e[i]) os << "*x" << i << (e[i] > 1 ? "^" + std::to_string(e[i]) : "");
  }
  return os.str();
}

MultiPoly indicator_1d(GfPtr f, const std::vector<uint32_t>& H, uint32_t x) {
  if (std::find(H.begin(), H.end(), x) == H.end())
    throw std::invalid_argument("indicator_1d: x not in H");
  MultiPoly num = MultiPoly::constant(f, 1, 1);
  uint32_t den = 1;
  for (uint32_t b : H) {
    if (b == x) continue;
    num = num * (MultiPoly::variable(f, 1, 0) - MultiPoly::constant(f, 1, b));
    den = f->mul(den, f->sub(x, b));
  }
  return num.scaled(f->inv(den));
}

MultiPoly indicator_nd(GfPtr f, const std::vector<std::vector<uint32_t>>& Hs, const Point& xs) {
  uint32_t m = static_cast<uint32_t>(Hs.size());
  if (xs.size() != m) throw std::invalid_argument("indicator_nd: arity mismatch");
  MultiPoly result = MultiPoly::constant(f, m, 1);
  for (uint32_t j = 0; j < m; ++j) {
    MultiPoly uni = indicator_1d(f, Hs[j], xs[j]);
    // lift univariate to variable j of arity m
    MultiPoly lifted(f, m);
    for (const auto& [e, c] : uni.terms()) {
      std::vector<uint16_t> ee(m, 0);
      ee[j] = e[0];
      lifted.add_term(ee, c);
    }
    result = result * lifted;
  }
  return result;
}

MultiPoly zero_poly(GfPtr f, const std::vector<uint32_t>& S) {
  MultiPoly p = MultiPoly::constant(f, 1, 1);
  for (uint32_t b : S)
    p = p * (MultiPoly::variable(f, 1, 0) - MultiPoly::constant(f, 1, b));
  return p;
}

uint32_t zero_poly_eval(const Gf& f, const std::vector<uint32_t>& S, uint32_t x) {
  uint32_t acc = 1;
  for (uint32_t b : S) acc = f.mul(acc, f.sub(x, b));
  return acc;
}

uint64_t LdParams::capacity() const {
  uint64_t c = 1;
  for (uint32_t i = 0; i < m; ++i) {
    if (c > (1ull << 62) / h()) return UINT64_MAX;
    c *= h();
  }
  return c;
}

bool LdParams::admissible() const {
  return field && field->p() == 2 && t1 <= field->t() && capacity() >= n;
}

bool LdParams::exactly_admissible() const {
  if (!admissible()) return false;
  uint64_t cap = capacity();
  return cap == n && (n & (n - 1)) == 0;
}

std::vector<uint32_t> LdParams::subset_H() const {
  const auto& e = field->self_dual_basis();
  std::vector<uint32_t> H;
  H.reserve(h());
  for (uint32_t bits = 0; bits < h(); ++bits) {
    uint32_t x = 0;
    for (uint32_t i = 0; i < t1; ++i)
      if (bits & (1u << i)) x = field->add(x, e[i]);
    H.push_back(x);
  }
  return H;
}

CanonicalMaps::CanonicalMaps(const LdParams& params) : params_(params) {
  if (!params.admissible()) throw std::invalid_argument("CanonicalMaps: inadmissible parameters");
  H_ = params.subset_H();
}

const std::vector<MultiPoly>& CanonicalMaps::mu_polys() const {
  if (!mu_polys_.empty()) return mu_polys_;
  const auto& e = params_.field->self_dual_basis();
  // mu_i(y) = sum over x in H with tr(e_i x) = 1 of ind_H(x, y)
  for (uint32_t i = 0; i < params_.t1; ++i) {
    MultiPoly mu(params_.field, 1);
    for (uint32_t x : H_) {
      if (params_.field->trace(params_.field->mul(e[i], x)) == 1)
        mu = mu + indicator_1d(params_.field, H_, x);
    }
    mu_polys_.push_back(mu);
  }
  return mu_polys_;
}

uint32_t CanonicalMaps::sigma1(std::span<const uint8_t> bits) const {
  const auto& e = params_.field->self_dual_basis();
  uint32_t x = 0;
  for (uint32_t i = 0; i < params_.t1; ++i)
    if (bits[i]) x = params_.field->add(x, e[i]);
  return x;
}

Point CanonicalMaps::sigma(std::span<const uint8_t> bits) const {
  if (bits.size() != params_.bits()) throw std::invalid_argument("sigma: bit-length mismatch");
  Point out(params_.m);
  for (uint32_t j = 0; j < params_.m; ++j)
    out[j] = sigma1(bits.subspan(j * params_.t1, params_.t1));
  return out;
}

Point CanonicalMaps::pi_bits(std::span<const uint8_t> bits) const { return sigma(bits); }

Point CanonicalMaps::pi_index(uint64_t i) const {
  std::vector<uint8_t> bits(params_.bits(), 0);
  for (uint32_t b = 0; b < params_.bits(); ++b)
    bits[params_.bits() - 1 - b] = static_cast<uint8_t>((i >> b) & 1);
  return sigma(bits);
}

uint32_t CanonicalMaps::mu_value(uint32_t i, uint32_t y) const {
  return mu_polys()[i].eval(std::vector<uint32_t>{y});
}

uint8_t CanonicalMaps::mu_component(uint32_t i, uint32_t y) const {
  uint32_t v = mu_value(i, y);
  return static_cast<uint8_t>(v == 0 ? 0 : 1);  // values on H are 0/1; off H arbitrary field value
}

std::vector<uint8_t> CanonicalMaps::nu(std::span<const uint32_t> x) const {
  std::vector<uint8_t> bits;
  bits.reserve(params_.bits());
  for (uint32_t j = 0; j < params_.m; ++j)
    for (uint32_t i = 0; i < params_.t1; ++i)
      bits.push_back(mu_component(i, x[j]));
  return bits;
}

MultiPoly ld_encode(const LdParams& params, std::span<const uint32_t> values) {
  if (!params.admissible()) throw std::invalid_argument("ld_encode: inadmissible parameters");
  if (values.size() > params.capacity()) throw std::invalid_argument("ld_encode: message too long");
  CanonicalMaps maps(params);
  std::vector<Point> pts;
  pts.reserve(values.size());
  for (uint64_t i = 0; i < values.size(); ++i) pts.push_back(maps.pi_index(i));
  return ld_encode_with_injection(params, values, pts);
}

MultiPoly ld_encode_with_injection(const LdParams& params, std::span<const uint32_t> values,
                                   const std::vector<Point>& injection) {
  if (injection.size() < values.size())
    throw std::invalid_argument("ld_encode_with_injection: injection too short");
  std::vector<std::vector<uint32_t>> Hs(params.m, params.subset_H());
  MultiPoly g(params.field, params.m);
  for (size_t i = 0; i < values.size(); ++i) {
    if (values[i] == 0) continue;
    g = g + indicator_nd(params.field, Hs, injection[i]).scaled(values[i]);
  }
  return g;
}

SubcubeDecomposition subcube_decompose(const MultiPoly& f,
                                       const std::vector<std::vector<uint32_t>>& cube) {
  uint32_t m = f.arity();
  if (cube.size() != m) throw std::invalid_argument("subcube_decompose: cube arity");
  GfPtr field = f.field();
  SubcubeDecomposition out;
  out.coeffs.reserve(m);
  MultiPoly rem = f;
  for (uint32_t i = 0; i < m; ++i) {
    // Divide rem by zero_{H_i}(x_i), monic of degree h_i in x_i.
    const auto& H = cube[i];
    uint32_t h = static_cast<uint32_t>(H.size());
    MultiPoly zp = zero_poly(field, H);  // univariate
    // lift zero poly into arity m on variable i
    MultiPoly z(field, m);
    for (const auto& [e, c] : zp.terms()) {
      std::vector<uint16_t> ee(m, 0);
      ee[i] = e[0];
      z.add_term(ee, c);
    }
    MultiPoly quot(field, m);
    for (;;) {
      // find the term with maximal exponent in variable i, at least h
      const std::vector<uint16_t>* best = nullptr;
      uint32_t bc = 0;
      for (const auto& [e, c] : rem.terms()) {
        if (e[i] >= h && (!best || e[i] > (*best)[i])) {
          best = &e;
          bc = c;
        }
      }
      if (!best) break;
      std::vector<uint16_t> qe = *best;
      qe[i] = static_cast<uint16_t>(qe[i] - h);
      MultiPoly qterm(field, m);
      qterm.add_term(qe, bc);
      quot = quot + qterm;
      rem = rem - qterm * z;
    }
    out.coeffs.push_back(quot);
  }
  out.remainder = rem;
  out.ok = rem.is_zero();
  if (!out.ok) {
    // The remainder has per-variable degree < h_i, so it vanishes on the cube
    // iff it is zero; find a witness point by scanning the cube.
    std::vector<size_t> idx(m, 0);
    for (;;) {
      Point pt(m);
      for (uint32_t i = 0; i < m; ++i) pt[i] = cube[i][idx[i]];
      if (rem.eval(pt) != 0) {
        out.witness = pt;
        break;
      }
      uint32_t i = 0;
      while (i < m && ++idx[i] == cube[i].size()) idx[i++] = 0;
      if (i == m) break;
    }
  }
  return out;
}

AffineSubspace subspace_from_json(GfPtr f, const nlohmann::json& j) {
  Point u = j.at("u").get<Point>();
  std::vector<Vec> rows = j.at("rows").get<std::vector<Vec>>();
  return AffineSubspace::from_point_dirs(std::move(f), u, rows);
}

nlohmann::json subspace_to_json(const AffineSubspace& s) {
  return nlohmann::json{{"u", s.intercept}, {"rows", s.rows}};
}

}  // namespace introlab
