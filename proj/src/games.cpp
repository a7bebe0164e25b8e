#include "introlab/games.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace introlab {

QuestionPair Game::draw(Rng& rng) const {
  if (enumerable) {
    // Exact rational mixture: draw over the common denominator.
    uint64_t den = 1;
    for (const auto& [w, qp] : *enumerable) den = std::lcm(den, w.den);
    uint64_t total = 0;
    for (const auto& [w, qp] : *enumerable) total += w.num * (den / w.den);
    uint64_t r = rng.below(total);
    for (const auto& [w, qp] : *enumerable) {
      uint64_t mass = w.num * (den / w.den);
      if (r < mass) return qp;
      r -= mass;
    }
    return enumerable->back().second;
  }
  if (!sample) throw std::runtime_error("Game: no question source");
  return sample(rng);
}

json Game::descriptor() const {
  return json{{"name", name},
              {"params", params},
              {"enumerable", enumerable.has_value()},
              {"qlength", qlength},
              {"alength", alength}};
}

void Game::check_enumerable_weights() const {
  if (!enumerable) return;
  Rational total;
  for (const auto& [w, qp] : *enumerable) total = total + w;
  if (!(total == Rational::one()))
    throw std::runtime_error("Game: question weights sum to " + total.str());
}

void Strategy::set(const Question& q, Measurement m) { meas[q.dump()] = std::move(m); }
void Strategy::set_bob(const Question& q, Measurement m) { meas_bob[q.dump()] = std::move(m); }

const Measurement& Strategy::measurement_for(int side, const Question& q) const {
  const auto& table = (side == 1 && !symmetric) ? meas_bob : meas;
  auto it = table.find(q.dump());
  if (it == table.end())
    throw std::runtime_error("Strategy: no measurement for question " + q.dump());
  return it->second;
}

bool Strategy::has(int side, const Question& q) const {
  const auto& table = (side == 1 && !symmetric) ? meas_bob : meas;
  return table.count(q.dump()) > 0;
}

double exact_value(const Game& g, const Strategy& s) {
  if (!g.enumerable)
    throw std::invalid_argument("exact_value: question distribution not enumerable; use mc_value");
  g.check_enumerable_weights();
  // <psi| A (x) B |psi> = sum_ij (Psi^dag A Psi)^T_ij B_ij; the left factors
  // are cached per question since measurements recur across items.
  const Mat& psi = s.psi.matrix();
  std::map<std::string, std::vector<Mat>> left_cache;
  auto left_of = [&](const Question& q, const Measurement& m) -> const std::vector<Mat>& {
    std::string key = q.dump();
    auto it = left_cache.find(key);
    if (it != left_cache.end()) return it->second;
    std::vector<Mat> ms;
    ms.reserve(m.elems.size());
    for (const auto& [label, e] : m.elems)
      ms.push_back((psi.adjoint() * (e * psi)).transpose());
    return left_cache.emplace(key, std::move(ms)).first->second;
  };
  double total = 0;
  for (const auto& [w, qp] : *g.enumerable) {
    const Measurement& A = s.measurement_for(0, qp.x0);
    const Measurement& B = s.measurement_for(1, qp.x1);
    const std::vector<Mat>& lefts = left_of(qp.x0, A);
    double branch = 0;
    for (size_t ai = 0; ai < A.elems.size(); ++ai) {
      for (const auto& [lb, eb] : B.elems) {
        if (!g.accept(qp.x0, qp.x1, A.elems[ai].first, lb)) continue;
        branch += std::real(lefts[ai].cwiseProduct(eb).sum());
      }
    }
    total += w.to_double() * branch;
  }
  if (total < -1e-10 || total > 1 + 1e-10)
    throw std::runtime_error("exact_value: value out of range: " + std::to_string(total));
  return total;
}

McResult mc_value(const Game& g, const Strategy& s, uint64_t trials, uint64_t seed) {
  Rng rng(seed);
  uint64_t ok = 0;
  for (uint64_t t = 0; t < trials; ++t) {
    QuestionPair qp = g.draw(rng);
    auto ra = measure(s.psi, 0, s.measurement_for(0, qp.x0), rng);
    auto rb = measure(ra.post, 1, s.measurement_for(1, qp.x1), rng);
    if (g.accept(qp.x0, qp.x1, ra.outcome, rb.outcome)) ++ok;
  }
  McResult r;
  r.trials = trials;
  r.rejections = trials - ok;
  r.estimate = static_cast<double>(ok) / static_cast<double>(trials);
  r.stderr_ = std::sqrt(std::max(r.estimate * (1 - r.estimate), 1e-12) / static_cast<double>(trials));
  return r;
}

McResult mc_value(const Game& g, const SamplerStrategy& s, uint64_t trials, uint64_t seed) {
  Rng rng(seed);
  uint64_t ok = 0;
  for (uint64_t t = 0; t < trials; ++t) {
    QuestionPair qp = g.draw(rng);
    auto [a0, a1] = s.respond(qp, rng);
    if (g.accept(qp.x0, qp.x1, a0, a1)) ++ok;
  }
  McResult r;
  r.trials = trials;
  r.rejections = trials - ok;
  r.estimate = static_cast<double>(ok) / static_cast<double>(trials);
  r.stderr_ = std::sqrt(std::max(r.estimate * (1 - r.estimate), 1e-12) / static_cast<double>(trials));
  return r;
}

DistanceReport distance_diagnostics(
    const std::vector<std::pair<Rational, Question>>& dist,
    const std::map<std::string, Measurement>& fam_a,
    const std::map<std::string, Measurement>& fam_b, const BipartiteState& psi) {
  DistanceReport rep;
  double agree = 0;
  double approx = 0;
  for (const auto& [w, q] : dist) {
    auto ita = fam_a.find(q.dump());
    auto itb = fam_b.find(q.dump());
    if (ita == fam_a.end() || itb == fam_b.end())
      throw std::invalid_argument("distance_diagnostics: missing family entry");
    // index elements by label
    std::map<std::string, const Mat*> bmap;
    for (const auto& [lb, eb] : itb->second.elems) bmap[lb.dump()] = &eb;
    double branch_agree = 0;
    double branch_approx = 0;
    for (const auto& [la, ea] : ita->second.elems) {
      auto itbm = bmap.find(la.dump());
      const Mat* eb = itbm == bmap.end() ? nullptr : itbm->second;
      if (eb) branch_agree += std::real(psi.bilinear(&ea, eb));
      // ||(A - B) (x) I psi||^2 with A, B acting on the same (Alice) side
      Mat diff = eb ? Mat(ea - *eb) : ea;
      branch_approx += psi.applied(&diff, nullptr).matrix().squaredNorm();
    }
    // labels present only in B
    for (const auto& [lb, eb] : itb->second.elems) {
      bool in_a = false;
      for (const auto& [la, ea] : ita->second.elems)
        if (la == lb) in_a = true;
      if (!in_a) branch_approx += psi.applied(&eb, nullptr).matrix().squaredNorm();
    }
    agree += w.to_double() * branch_agree;
    approx += w.to_double() * branch_approx;
  }
  rep.sim_delta = 1.0 - agree;
  rep.approx_delta = approx;
  return rep;
}

QuditLayout RegisterParams::layout(uint64_t aux_dim) const {
  QuditLayout l;
  for (uint32_t i = 0; i < k; ++i) l.regs.push_back({n[i], fields[i]});
  l.aux_dim = aux_dim;
  return l;
}

json RegisterParams::descriptor() const {
  json qs = json::array();
  for (const auto& f : fields) qs.push_back(f->q());
  return json{{"k", k}, {"n", n}, {"q", qs}};
}

namespace {

// A register-formatted question {"w": [...], "aux": ...}; returns the W list
// or nullopt for non-register questions.
std::optional<std::vector<std::string>> w_block(const Question& q) {
  if (!q.is_object() || !q.contains("w")) return std::nullopt;
  std::vector<std::string> w;
  for (const auto& e : q["w"]) w.push_back(e.get<std::string>());
  return w;
}

}  // namespace

RegisterValidation validate_register_strategy(const Strategy& s, const RegisterParams& lambda,
                                              RegisterKind kind) {
  RegisterValidation out;
  auto fail = [&](const std::string& msg) {
    out.ok = false;
    out.failures.push_back(msg);
  };
  // (i) shared state is a tensor of EPR registers (times arbitrary aux)
  for (uint32_t i = 0; i < lambda.k; ++i) {
    double fid = s.psi.epr_register_fidelity(i);
    if (fid < 1.0 - 1e-9)
      fail("register " + std::to_string(i) + ": EPR fidelity " + std::to_string(fid));
  }
  const QuditLayout& lay = s.psi.layout();
  for (const auto& [qdump, m] : s.meas) {
    Question q = json::parse(qdump);
    auto w = w_block(q);
    if (!w) continue;
    if (w->size() != lambda.k) {
      fail("question " + qdump + ": W-block size mismatch");
      continue;
    }
    // (ii) marginal over a2 equals the tensor of tau projectors
    // the second answer block holds a2 and any partial-observable values
    Measurement marg = marginalize(m, [](const json& label) {
      json j = label;
      j.erase("a2");
      j.erase("xp");
      return j;
    });
    for (const auto& [label, e] : marg.elems) {
      Mat expect = Mat::Identity(1, 1);
      for (uint32_t i = 0; i < lambda.k; ++i) {
        const std::string& wi = (*w)[i];
        uint64_t di = lay.regs[i].dim();
        Mat block;
        if (wi == "X" || wi == "Z") {
          if (!label.contains("u") || label["u"][i].is_null()) {
            block = Mat::Zero(di, di);  // no such outcome should appear
          } else {
            Vec u = label["u"][i].get<Vec>();
            block = tau_proj(*lambda.fields[i], lambda.n[i], wi[0], u);
          }
        } else {
          block = Mat::Identity(di, di);
        }
        expect = kron(expect, block);
      }
      expect = kron(expect, Mat::Identity(lay.aux_dim, lay.aux_dim));
      if ((e - expect).cwiseAbs().maxCoeff() > 1e-9)
        fail("question " + qdump + ": first-block marginal mismatch at " + label.dump());
    }
    // (iii) hidden registers untouched
    for (uint32_t i = 0; i < lambda.k; ++i) {
      if ((*w)[i] != "H") continue;
      if (kind == RegisterKind::Semiregister && i == lambda.k - 1) continue;
      for (const auto& [label, e] : m.elems) {
        Mat hidden = hide_register(lay, i, e);
        if ((e - hidden).cwiseAbs().maxCoeff() > 1e-9) {
          fail("question " + qdump + ": measurement touches hidden register " + std::to_string(i));
          break;
        }
      }
    }
  }
  return out;
}

Question make_reg_question(const std::vector<std::string>& w, const json& aux) {
  return json{{"w", w}, {"aux", aux}};
}

json pair_question(const Question& x0, const Question& x1) {
  return json{{"pair", json::array({x0, x1})}};
}

Game oracularize(const Game& g) {
  Game out;
  out.name = "oracle(" + g.name + ")";
  out.params = g.params;
  out.qlength = 2 * g.qlength;
  out.alength = 2 * g.alength;
  auto inner_accept = g.accept;
  if (g.enumerable) {
    std::vector<std::pair<Rational, QuestionPair>> items;
    Rational half(1, 2), eighth(1, 8);
    for (const auto& [w, qp] : *g.enumerable) {
      Question pq = pair_question(qp.x0, qp.x1);
      // verify branch: b chooses which player gets the pair, c which single
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) {
          Question single = c == 0 ? qp.x0 : qp.x1;
          json meta = json{{"oracle", "verify"}, {"c", c}};
          Question pq_tagged = pq;
          pq_tagged["check"] = meta;
          QuestionPair item = b == 0 ? QuestionPair{pq_tagged, single}
                                     : QuestionPair{single, pq_tagged};
          items.emplace_back(w * eighth, item);
        }
      // consistency branch: both take the pair
      items.emplace_back(w * half, QuestionPair{pq, pq});
    }
    out.enumerable = items;
  } else {
    auto base = g.sample;
    out.sample = [base](Rng& rng) -> QuestionPair {
      QuestionPair qp = base(rng);
      Question pq = pair_question(qp.x0, qp.x1);
      if (rng.coin()) return {pq, pq};
      int b = rng.coin(), c = rng.coin();
      Question pq_tagged = pq;
      pq_tagged["check"] = json{{"oracle", "verify"}, {"c", c}};
      Question single = c == 0 ? qp.x0 : qp.x1;
      return b == 0 ? QuestionPair{pq_tagged, single} : QuestionPair{single, pq_tagged};
    };
  }
  out.accept = [inner_accept](const Question& x0, const Question& x1, const Answer& a0,
                              const Answer& a1) -> bool {
    bool p0 = x0.is_object() && x0.contains("pair");
    bool p1 = x1.is_object() && x1.contains("pair");
    if (p0 && p1) return a0 == a1;  // consistency branch
    const Question& pairq = p0 ? x0 : x1;
    const Answer& pa = p0 ? a0 : a1;
    const Answer& sa = p0 ? a1 : a0;
    if (!pa.is_object() || !pa.contains("a") || pa["a"].size() != 2) return false;
    int c = pairq["check"]["c"].get<int>();
    const Question& qx0 = pairq["pair"][0];
    const Question& qx1 = pairq["pair"][1];
    if (pa["a"][c] != sa) return false;
    return inner_accept(qx0, qx1, pa["a"][0], pa["a"][1]);
  };
  return out;
}

Strategy oracularize_strategy(const Game& g, const Strategy& s, double comm_tol) {
  Strategy out;
  out.psi = s.psi;
  out.symmetric = s.symmetric;
  out.meas = s.meas;
  if (!g.enumerable) throw std::invalid_argument("oracularize_strategy: enumerable games only");
  std::map<std::string, bool> done;
  for (const auto& [w, qp] : *g.enumerable) {
    Question pq = pair_question(qp.x0, qp.x1);
    std::string key = pq.dump();
    if (done.count(key)) continue;
    done[key] = true;
    const Measurement& A = s.measurement_for(0, qp.x0);
    const Measurement& B = s.measurement_for(0, qp.x1);
    Measurement joint;
    joint.kind = Measurement::Kind::Projective;
    for (const auto& [la, ea] : A.elems) {
      for (const auto& [lb, eb] : B.elems) {
        if ((ea * eb - eb * ea).cwiseAbs().maxCoeff() > comm_tol)
          throw std::runtime_error("oracularize_strategy: non-commuting measurements for " + key);
        Mat prod = ea * eb;
        if (prod.cwiseAbs().maxCoeff() < 1e-14) continue;
        joint.elems.emplace_back(json{{"a", json::array({la, lb})}}, prod);
      }
    }
    out.meas[key] = joint;
    // verify-branch tags reuse the same joint measurement
    for (int c = 0; c < 2; ++c) {
      Question tagged = pq;
      tagged["check"] = json{{"oracle", "verify"}, {"c", c}};
      out.meas[tagged.dump()] = joint;
    }
  }
  return out;
}

Strategy build_honest_commuting_strategy(
    const BipartiteState& psi, const std::vector<std::pair<Question, Measurement>>& recipe,
    const std::vector<QuestionPair>& support, double comm_tol) {
  Strategy s;
  s.psi = psi;
  s.symmetric = true;
  for (const auto& [q, m] : recipe) {
    m.validate(1e-10);
    for (const auto& [label, e] : m.elems) {
      if (e.imag().cwiseAbs().maxCoeff() > 1e-12)
        throw std::runtime_error("build_honest_commuting_strategy: non-real measurement");
      if (((e * e) - e).cwiseAbs().maxCoeff() > 1e-10)
        throw std::runtime_error("build_honest_commuting_strategy: non-projective element");
    }
    s.set(q, m);
  }
  for (const auto& qp : support) {
    const Measurement& A = s.measurement_for(0, qp.x0);
    const Measurement& B = s.measurement_for(0, qp.x1);
    for (const auto& [la, ea] : A.elems)
      for (const auto& [lb, eb] : B.elems)
        if ((ea * eb - eb * ea).cwiseAbs().maxCoeff() > comm_tol)
          throw std::runtime_error("build_honest_commuting_strategy: commutation violation on " +
                                   qp.x0.dump() + " / " + qp.x1.dump());
  }
  return s;
}

}  // namespace introlab
