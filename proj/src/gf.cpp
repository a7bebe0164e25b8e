#include "introlab/gf.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace introlab {

namespace {

bool is_prime(uint32_t n) {
  if (n < 2) return false;
  for (uint32_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// Dense univariate polynomials over GF(p), coefficients low-to-high.
using Upoly = std::vector<uint32_t>;

Upoly trim(Upoly a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
  return a;
}

Upoly poly_mod(Upoly a, const Upoly& m, uint32_t p) {
  a = trim(std::move(a));
  while (a.size() >= m.size()) {
    uint32_t lead = a.back();
    if (lead != 0) {
      // m is monic
      size_t shift = a.size() - m.size();
      for (size_t i = 0; i < m.size(); ++i) {
        uint32_t sub = (lead * m[i]) % p;
        a[shift + i] = (a[shift + i] + p - sub) % p;
      }
    }
    a.pop_back();
    a = trim(std::move(a));
  }
  return a;
}

Upoly poly_mulmod(const Upoly& a, const Upoly& b, const Upoly& m, uint32_t p) {
  if (a.empty() || b.empty()) return {};
  Upoly r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j)
      r[i + j] = (r[i + j] + a[i] * b[j]) % p;
  }
  return poly_mod(std::move(r), m, p);
}

Upoly poly_powmod(Upoly base, uint64_t e, const Upoly& m, uint32_t p) {
  Upoly r{1};
  base = poly_mod(std::move(base), m, p);
  while (e) {
    if (e & 1) r = poly_mulmod(r, base, m, p);
    base = poly_mulmod(base, base, m, p);
    e >>= 1;
  }
  return r;
}

Upoly poly_gcd(Upoly a, Upoly b, uint32_t p) {
  a = trim(std::move(a));
  b = trim(std::move(b));
  while (!b.empty()) {
    // reduce a mod b (b need not be monic: scale)
    uint32_t lead = b.back();
    uint32_t inv_lead = 1;
    for (uint32_t x = 1; x < p; ++x)
      if ((x * lead) % p == 1) inv_lead = x;
    Upoly bm = b;
    for (auto& c : bm) c = (c * inv_lead) % p;
    a = poly_mod(std::move(a), bm, p);
    std::swap(a, b);
  }
  return a;
}

std::vector<uint32_t> prime_factors(uint64_t n) {
  std::vector<uint32_t> fs;
  for (uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      fs.push_back(static_cast<uint32_t>(d));
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) fs.push_back(static_cast<uint32_t>(n));
  return fs;
}

uint64_t ipow(uint64_t b, uint32_t e) {
  uint64_t r = 1;
  while (e--) r *= b;
  return r;
}

}  // namespace

bool is_irreducible(uint32_t p, const std::vector<uint32_t>& poly) {
  Upoly f = trim(poly);
  if (f.size() < 2) return false;
  uint32_t t = static_cast<uint32_t>(f.size()) - 1;
  if (f.back() != 1) return false;  // monic only
  if (t == 1) return true;
  // Rabin: x^(p^t) == x mod f, and gcd(x^(p^(t/r)) - x, f) == const for prime r | t.
  Upoly x{0, 1};
  Upoly xq = poly_powmod(x, ipow(p, t), f, p);
  Upoly diff = xq;
  diff.resize(std::max<size_t>(diff.size(), 2), 0);
  diff[1] = (diff[1] + p - 1) % p;
  if (!trim(diff).empty()) return false;
  for (uint32_t r : prime_factors(t)) {
    Upoly xe = poly_powmod(x, ipow(p, t / r), f, p);
    Upoly d = xe;
    d.resize(std::max<size_t>(d.size(), 2), 0);
    d[1] = (d[1] + p - 1) % p;
    Upoly g = poly_gcd(trim(d), f, p);
    if (g.size() > 1) return false;
  }
  return true;
}

std::vector<uint32_t> default_modulus(uint32_t p, uint32_t t) {
  if (t == 1) {
    return {1, 1};  // x + 1; any monic degree-1 works for the prime field
  }
  uint64_t count = ipow(p, t);
  for (uint64_t low = 0; low < count; ++low) {
    std::vector<uint32_t> f(t + 1, 0);
    uint64_t n = low;
    for (uint32_t i = 0; i < t; ++i) {
      f[i] = static_cast<uint32_t>(n % p);
      n /= p;
    }
    f[t] = 1;
    if (is_irreducible(p, f)) return f;
  }
  throw std::runtime_error("no irreducible polynomial found");
}

GfPtr Gf::make(uint32_t p, uint32_t t) { return make(p, t, default_modulus(p, t)); }

GfPtr Gf::make(uint32_t p, uint32_t t, const std::vector<uint32_t>& modulus) {
  if (!is_prime(p)) throw std::invalid_argument("Gf: p must be prime");
  if (t < 1) throw std::invalid_argument("Gf: t must be positive");
  uint64_t q = ipow(p, t);
  if (q > (1u << 16)) throw std::invalid_argument("Gf: fields beyond 2^16 unsupported");
  Upoly m = trim(modulus);
  if (m.size() != t + 1) throw std::invalid_argument("Gf: modulus degree must equal t");
  for (uint32_t c : m)
    if (c >= p) throw std::invalid_argument("Gf: modulus coefficient out of range");
  if (t > 1 && !is_irreducible(p, m))
    throw std::invalid_argument("Gf: modulus is reducible");

  static std::mutex mu;
  static std::map<std::tuple<uint32_t, uint32_t, std::vector<uint32_t>>, GfPtr> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(p, t, m);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  auto f = std::shared_ptr<Gf>(new Gf());
  f->p_ = p;
  f->t_ = t;
  f->q_ = static_cast<uint32_t>(q);
  f->modulus_ = m;
  f->build_tables();
  cache[key] = f;
  return f;
}

void Gf::build_tables() {
  // Packed <-> digit-vector conversions happen inline; arithmetic for table
  // construction runs on digit vectors.
  auto unpack = [&](uint32_t a) {
    Upoly d(t_, 0);
    for (uint32_t i = 0; i < t_; ++i) {
      d[i] = a % p_;
      a /= p_;
    }
    return d;
  };
  auto pack = [&](const Upoly& d) {
    uint32_t a = 0;
    for (uint32_t i = static_cast<uint32_t>(d.size()); i-- > 0;) a = a * p_ + d[i];
    return a;
  };

  auto raw_mul = [&](uint32_t a, uint32_t b) {
    Upoly r = poly_mulmod(trim(unpack(a)), trim(unpack(b)), modulus_, p_);
    r.resize(t_, 0);
    return pack(r);
  };

  // Find a generator of the multiplicative group.
  auto factors = prime_factors(q_ - 1);
  gen_ = 0;
  for (uint32_t cand = 1; cand < q_; ++cand) {
    bool ok = true;
    for (uint32_t r : factors) {
      // cand^((q-1)/r) == 1 ?
      uint64_t e = (q_ - 1) / r;
      uint32_t acc = 1, base = cand;
      while (e) {
        if (e & 1) acc = raw_mul(acc, base);
        base = raw_mul(base, base);
        e >>= 1;
      }
      if (acc == 1) {
        ok = false;
        break;
      }
    }
    if (ok) {
      gen_ = cand;
      break;
    }
  }
  if (gen_ == 0) throw std::runtime_error("Gf: no generator found");

  exp_.assign(2 * (q_ - 1), 0);
  log_.assign(q_, 0);
  uint32_t cur = 1;
  for (uint32_t i = 0; i < q_ - 1; ++i) {
    exp_[i] = cur;
    exp_[i + q_ - 1] = cur;
    log_[cur] = i;
    cur = raw_mul(cur, gen_);
  }

  trace_.assign(q_, 0);
  for (uint32_t a = 0; a < q_; ++a) {
    uint32_t acc_packed = 0;
    uint32_t x = a;
    for (uint32_t l = 0; l < t_; ++l) {
      Upoly da = unpack(acc_packed), dx = unpack(x);
      for (uint32_t i = 0; i < t_; ++i) da[i] = (da[i] + dx[i]) % p_;
      acc_packed = pack(da);
      uint32_t xp = 1;
      for (uint32_t e = 0; e < p_; ++e) xp = raw_mul(xp, x);
      x = xp;
    }
    // The trace lies in the prime field: packed value is a single digit.
    trace_[a] = acc_packed % p_;
  }
}

uint32_t Gf::add(uint32_t a, uint32_t b) const {
  if (p_ == 2) return a ^ b;
  uint32_t r = 0, mul = 1;
  for (uint32_t i = 0; i < t_; ++i) {
    r += ((a % p_ + b % p_) % p_) * mul;
    a /= p_;
    b /= p_;
    mul *= p_;
  }
  return r;
}

uint32_t Gf::neg(uint32_t a) const {
  if (p_ == 2) return a;
  uint32_t r = 0, mul = 1;
  for (uint32_t i = 0; i < t_; ++i) {
    r += ((p_ - a % p_) % p_) * mul;
    a /= p_;
    mul *= p_;
  }
  return r;
}

uint32_t Gf::sub(uint32_t a, uint32_t b) const { return add(a, neg(b)); }

uint32_t Gf::inv(uint32_t a) const {
  if (a == 0) throw std::domain_error("Gf: inversion of zero");
  return exp_[(q_ - 1) - log_[a]];
}

uint32_t Gf::pow(uint32_t a, uint64_t e) const {
  if (a == 0) return e == 0 ? 1 : 0;
  uint64_t le = (static_cast<uint64_t>(log_[a]) * (e % (q_ - 1))) % (q_ - 1);
  return exp_[le];
}

namespace {

// Keep only an xor-independent subset, preserving order.
std::vector<uint32_t> xor_independent(const std::vector<uint32_t>& vs) {
  std::vector<uint32_t> rows, keep;
  for (uint32_t v : vs) {
    uint32_t r = v;
    for (uint32_t b : rows) {
      uint32_t hb = 1u << (31 - __builtin_clz(b));
      if (r & hb) r ^= b;
    }
    if (r != 0) {
      rows.push_back(r);
      keep.push_back(v);
    }
  }
  return keep;
}

}  // namespace

const std::vector<uint32_t>& Gf::self_dual_basis() const {
  if (!self_dual_.empty()) return self_dual_;
  if (p_ != 2)
    throw std::domain_error("Gf: self-dual basis construction requires p = 2");
  // Orthonormalize the trace form B(x, y) = tr(xy) over GF(2).  tr(x^2) =
  // tr(x) is onto, so the form is non-alternating and an orthonormal basis
  // exists; if the running complement turns alternating, a hyperbolic pair
  // (u, v) is folded into the last orthonormal vector e via the replacement
  // {e, u, v} -> {e+u, e+v, e+u+v}.
  auto B = [&](uint32_t x, uint32_t y) { return trace(mul(x, y)); };
  std::vector<uint32_t> space;  // independent set spanning the complement
  for (uint32_t i = 0; i < t_; ++i) space.push_back(1u << i);
  std::vector<uint32_t> ortho;

  while (!space.empty()) {
    uint32_t pick = 0;
    for (uint32_t cand : space) {
      if (B(cand, cand)) {
        pick = cand;
        break;
      }
    }
    if (pick != 0) {
      ortho.push_back(pick);
      std::vector<uint32_t> next;
      for (uint32_t v : space) {
        uint32_t w = B(v, pick) ? add(v, pick) : v;
        if (w != 0) next.push_back(w);
      }
      space = xor_independent(next);
    } else {
      if (ortho.empty() || space.size() < 2)
        throw std::runtime_error("Gf: self-dual basis construction failed");
      uint32_t u = 0, v = 0;
      for (size_t i = 0; i < space.size() && u == 0; ++i)
        for (size_t j = 0; j < space.size() && u == 0; ++j)
          if (i != j && B(space[i], space[j])) {
            u = space[i];
            v = space[j];
          }
      if (u == 0) throw std::runtime_error("Gf: degenerate trace form");
      uint32_t e = ortho.back();
      ortho.pop_back();
      ortho.push_back(add(e, u));
      ortho.push_back(add(e, v));
      ortho.push_back(add(e, add(u, v)));
      std::vector<uint32_t> next;
      for (uint32_t w : space) {
        if (w == u || w == v) continue;
        uint32_t r = w;
        if (B(r, v)) r = add(r, u);
        if (B(r, u)) r = add(r, v);
        if (r != 0) next.push_back(r);
      }
      space = xor_independent(next);
    }
  }
  if (ortho.size() != t_) throw std::runtime_error("Gf: self-dual basis size mismatch");
  for (uint32_t i = 0; i < t_; ++i)
    for (uint32_t j = 0; j < t_; ++j)
      if (B(ortho[i], ortho[j]) != (i == j ? 1u : 0u))
        throw std::runtime_error("Gf: self-dual basis Gram check failed");
  self_dual_ = ortho;
  return self_dual_;
}

std::complex<double> Gf::root_of_unity(uint32_t k) const {
  if (p_ == 2) return (k & 1) ? std::complex<double>(-1.0, 0.0) : std::complex<double>(1.0, 0.0);
  double ang = 2.0 * std::numbers::pi * static_cast<double>(k % p_) / static_cast<double>(p_);
  return {std::cos(ang), std::sin(ang)};
}

std::complex<double> Gf::character_sum(uint32_t a) const {
  std::complex<double> s = 0;
  for (uint32_t u = 0; u < q_; ++u) s += root_of_unity(trace(mul(u, a)));
  return s / static_cast<double>(q_);
}

std::complex<double> character_sum_subspace(const Gf& f,
                                            const std::vector<std::vector<uint32_t>>& basis,
                                            std::span<const uint32_t> a) {
  size_t k = basis.size();
  uint64_t count = 1;
  for (size_t i = 0; i < k; ++i) count *= f.q();
  std::complex<double> s = 0;
  std::vector<uint32_t> u(a.size(), 0);
  for (uint64_t idx = 0; idx < count; ++idx) {
    std::fill(u.begin(), u.end(), 0);
    uint64_t n = idx;
    for (size_t i = 0; i < k; ++i) {
      uint32_t lambda = static_cast<uint32_t>(n % f.q());
      n /= f.q();
      for (size_t j = 0; j < u.size(); ++j)
        u[j] = f.add(u[j], f.mul(lambda, basis[i][j]));
    }
    s += f.root_of_unity(f.trace(f.dot(u, a)));
  }
  return s / static_cast<double>(count);
}

uint32_t Gf::from_int(uint64_t n) const {
  if (p_ == 2) return static_cast<uint32_t>(n % q_);
  uint32_t r = 0, mul = 1;
  for (uint32_t i = 0; i < t_; ++i) {
    r += static_cast<uint32_t>(n % p_) * mul;
    n /= p_;
    mul *= p_;
  }
  return r;
}

uint64_t Gf::to_int(uint32_t a) const { return a; }

std::string Gf::elem_hex(uint32_t a) const {
  // little-endian digits, one hex char per digit (p <= 16 always holds for
  // our supported sizes when t > 1; single-digit fields print one char per
  // digit of the base-p expansion)
  std::ostringstream os;
  uint32_t x = a;
  for (uint32_t i = 0; i < t_; ++i) {
    os << std::hex << (x % p_);
    x /= p_;
  }
  return os.str();
}

uint32_t Gf::elem_from_hex(const std::string& s) const {
  if (s.size() != t_) throw std::invalid_argument("Gf: bad element hex length");
  uint32_t r = 0, mul = 1;
  for (uint32_t i = 0; i < t_; ++i) {
    uint32_t d = std::stoul(s.substr(i, 1), nullptr, 16);
    if (d >= p_) throw std::invalid_argument("Gf: element digit out of range");
    r += d * mul;
    mul *= p_;
  }
  return r;
}

std::string Gf::name() const {
  std::ostringstream os;
  os << "GF(" << p_ << "^" << t_ << ")/";
  for (uint32_t c : modulus_) os << std::hex << c;
  return os.str();
}

uint32_t Gf::dot(std::span<const uint32_t> a, std::span<const uint32_t> b) const {
  if (a.size() != b.size()) throw std::invalid_argument("Gf: dot length mismatch");
  uint32_t s = 0;
  for (size_t i = 0; i < a.size(); ++i) s = add(s, mul(a[i], b[i]));
  return s;
}

GfPtr FieldElement::check(const FieldElement& o) const {
  if (!field || !o.field || !field->same(*o.field))
    throw std::invalid_argument("FieldElement: field spec mismatch");
  return field;
}

}  // namespace introlab
