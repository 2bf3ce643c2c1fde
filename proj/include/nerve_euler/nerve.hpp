/*
 * Copyright 2026 The nerve-euler Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

/**
 * @file nerve.hpp
 * @brief Face maps of the nerve NG, the two differentials of the double
 * complex Omega^{r,s} = Omega^s(NG(r)), and a sampled total-cocycle checker.
 *
 *   d'  = sum_{i=0}^{r+1} (-1)^i eps_i^*      : Omega^{r,s} -> Omega^{r+1,s}
 *   d'' = (-1)^r d                           : Omega^{r,s} -> Omega^{r,s+1}
 */

#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "forms.hpp"
#include "matgroup.hpp"
#include "parallel.hpp"

namespace nerve_euler {

// ---------------------------------------------------------------------------
// Face maps

/// eps_i : NG(q) -> NG(q-1).
inline NervePoint face_point(int i, const NervePoint& p) {
  const int q = p.level();
  if (q < 1 || i < 0 || i > q) {
    throw std::out_of_range("face index " + std::to_string(i) + " out of range for level " + std::to_string(q));
  }
  std::vector<GroupPoint> out;
  for (int k = 0; k < q; ++k) {
    if (i == 0 && k == 0) continue;
    if (i == q && k == q - 1) continue;
    if (i >= 1 && i < q && k == i - 1) {
      out.push_back(p[k] * p[k + 1]);
      ++k;
      continue;
    }
    out.push_back(p[k]);
  }
  return NervePoint(std::move(out));
}

/// Exact differential of eps_i on left-trivialized tangents. The merged slot
/// of h_i h_{i+1} receives Ad(h_{i+1}^{-1}) xi_i + xi_{i+1}.
inline TangentFrame face_pushforward(int i, const NervePoint& p, const TangentFrame& v) {
  const int q = p.level();
  if (q < 1 || i < 0 || i > q) {
    throw std::out_of_range("face index " + std::to_string(i) + " out of range for level " + std::to_string(q));
  }
  if (v.level() != q) throw std::invalid_argument("face_pushforward: frame level does not match point");
  std::vector<AlgebraVector> out;
  for (int k = 0; k < q; ++k) {
    if (i == 0 && k == 0) continue;
    if (i == q && k == q - 1) continue;
    if (i >= 1 && i < q && k == i - 1) {
      out.push_back(adjoint(p[k + 1].inverse(), v[k]) + v[k + 1]);
      ++k;
      continue;
    }
    out.push_back(v[k]);
  }
  return TangentFrame(std::move(out));
}

inline FormEvaluator d_prime(const FormEvaluator& w) {
  const int q = w.level() + 1;
  return {q, w.degree(), [w, q](const NervePoint& p, std::span<const TangentFrame> frames) {
            double total = 0.0;
            std::vector<TangentFrame> pushed(frames.size());
            for (int i = 0; i <= q; ++i) {
              for (std::size_t j = 0; j < frames.size(); ++j) pushed[j] = face_pushforward(i, p, frames[j]);
              const double term = w.call(face_point(i, p), pushed);
              total += (i % 2) ? -term : term;
            }
            return total;
          }};
}

inline FormEvaluator d_second(const FormEvaluator& w, double step = tolerance::fd_step) {
  const FormEvaluator raw = exterior_derivative(w, step);
  return (w.level() % 2) ? (-1.0) * raw : raw;
}

// ---------------------------------------------------------------------------
// Cochains

struct Bidegree {
  int level = 0;   // r
  int degree = 0;  // s

  std::string str() const { return "(" + std::to_string(level) + "," + std::to_string(degree) + ")"; }
  auto operator<=>(const Bidegree&) const = default;
};

inline void to_json(nlohmann::json& j, const Bidegree& b) { j = nlohmann::json::array({b.level, b.degree}); }

/// Element of the total complex: components of fixed total degree r + s.
class Cochain {
 public:
  explicit Cochain(int total_degree) : total_(total_degree) {}

  void set(FormEvaluator w) {
    if (w.level() + w.degree() != total_) {
      throw std::invalid_argument("component of bidegree " + Bidegree{w.level(), w.degree()}.str() +
                                  " does not have total degree " + std::to_string(total_));
    }
    const Bidegree key{w.level(), w.degree()};
    components_[key] = std::move(w);
  }

  int total_degree() const { return total_; }
  const std::map<Bidegree, FormEvaluator>& components() const { return components_; }
  const FormEvaluator& at(Bidegree b) const {
    auto it = components_.find(b);
    if (it == components_.end()) throw std::out_of_range("cochain has no component " + b.str());
    return it->second;
  }

  /// Copy with one component multiplied by `factor`.
  Cochain scaled(Bidegree b, double factor) const {
    Cochain out = *this;
    out.components_[b] = factor * at(b);
    return out;
  }

 private:
  int total_;
  std::map<Bidegree, FormEvaluator> components_;
};

// ---------------------------------------------------------------------------
// Sampled residual of D = d' + d''

enum class PointSampling { Haar, NearIdentity };

struct CocycleCheckOptions {
  int samples = 10;
  double tol = 1e-5;
  double step = tolerance::fd_step;
  double frame_scale = 1.0;  // frame entries ~ N(0, frame_scale^2)
  PointSampling sampling = PointSampling::Haar;
  double radius = 0.5;  // NearIdentity only
  std::uint64_t seed = 0;
  int workers = 1;
  bool sign_audit = false;
};

/// Residual of D c in one target bidegree.
struct TargetResidual {
  Bidegree target;
  std::vector<Bidegree> sources;       // components that map into `target`
  double max_residual = 0.0;           // with the cochain as given
  std::vector<double> max_term;        // per source, largest |contribution|
  std::vector<std::vector<double>> contributions;  // [sample][source]
};

struct CocycleReport {
  int dimension = 0;
  int total_degree = 0;
  std::vector<Bidegree> components;
  std::vector<TargetResidual> targets;
  int sample_count = 0;
  double tol = 0.0;
  double max_residual = 0.0;
  std::vector<int> sign_assignment;  // per component; all +1 unless the audit found better
  double audit_best_residual = 0.0;
  int audit_passing_assignments = 0;
  bool passed = false;

  nlohmann::json to_json() const {
    nlohmann::json per = nlohmann::json::array();
    for (const auto& t : targets) {
      nlohmann::json terms = nlohmann::json::array();
      for (std::size_t k = 0; k < t.sources.size(); ++k) {
        terms.push_back({{"source", t.sources[k]}, {"max_abs_term", t.max_term[k]}});
      }
      per.push_back({{"bidegree", t.target}, {"max_residual", t.max_residual}, {"terms", std::move(terms)}});
    }
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& b : components) comps.push_back(b);
    return {{"dimension", dimension},
            {"total_degree", total_degree},
            {"components", comps},
            {"max_residual", max_residual},
            {"sample_count", sample_count},
            {"tol", tol},
            {"sign_assignment", sign_assignment},
            {"audit_best_residual", audit_best_residual},
            {"audit_passing_assignments", audit_passing_assignments},
            {"per_bidegree", std::move(per)},
            {"passed", passed}};
  }
};

inline NervePoint sample_point(int level, int n, const CocycleCheckOptions& opt, Rng& rng) {
  std::vector<GroupPoint> comps;
  for (int k = 0; k < level; ++k) {
    comps.push_back(opt.sampling == PointSampling::Haar ? sample_haar(n, rng) : sample_near_identity(n, opt.radius, rng));
  }
  return NervePoint(std::move(comps));
}

inline TangentFrame sample_frame(int level, int n, double scale, Rng& rng) {
  std::vector<AlgebraVector> comps;
  for (int k = 0; k < level; ++k) comps.push_back(sample_algebra(n, rng, scale));
  return TangentFrame(std::move(comps));
}

namespace detail {

inline double residual_for_signs(const TargetResidual& t, const std::vector<Bidegree>& components,
                                 const std::vector<int>& signs) {
  double worst = 0.0;
  for (const auto& row : t.contributions) {
    double sum = 0.0;
    for (std::size_t k = 0; k < t.sources.size(); ++k) {
      const auto idx = std::find(components.begin(), components.end(), t.sources[k]) - components.begin();
      sum += signs[static_cast<std::size_t>(idx)] * row[k];
    }
    worst = std::max(worst, std::abs(sum));
  }
  return worst;
}

}  // namespace detail

/// Samples (D c)(P; V_0..V_s) in every bidegree adjacent to the support of c.
/// Each source contribution is stored separately so that sign flips of
/// components can be audited without re-evaluation.
inline CocycleReport verify_total_cocycle(const Cochain& c, int n, const CocycleCheckOptions& opt) {
  if (opt.samples < 1) throw std::invalid_argument("verify_total_cocycle: samples must be positive");
  CocycleReport report;
  report.dimension = n;
  report.total_degree = c.total_degree();
  report.tol = opt.tol;
  for (const auto& [b, w] : c.components()) report.components.push_back(b);

  // Targets: (r, s+1) from d'' and (r+1, s) from d'.
  std::map<Bidegree, std::vector<std::pair<Bidegree, FormEvaluator>>> sources;
  for (const auto& [b, w] : c.components()) {
    sources[{b.level, b.degree + 1}].emplace_back(b, d_second(w, opt.step));
    sources[{b.level + 1, b.degree}].emplace_back(b, d_prime(w));
  }

  std::uint64_t stream = 0;
  for (const auto& [target, terms] : sources) {
    TargetResidual tr;
    tr.target = target;
    for (const auto& t : terms) tr.sources.push_back(t.first);
    const std::uint64_t base = derive_seed(opt.seed, stream++);
    tr.contributions = parallel_map(opt.samples, opt.workers, [&](int i) {
      Rng rng(derive_seed(base, static_cast<std::uint64_t>(i)));
      const NervePoint p = sample_point(target.level, n, opt, rng);
      std::vector<TangentFrame> frames;
      for (int k = 0; k < target.degree; ++k) frames.push_back(sample_frame(target.level, n, opt.frame_scale, rng));
      std::vector<double> row;
      for (const auto& t : terms) row.push_back(t.second.call(p, frames));
      return row;
    });
    tr.max_term.assign(tr.sources.size(), 0.0);
    for (const auto& row : tr.contributions) {
      double sum = 0.0;
      for (std::size_t k = 0; k < row.size(); ++k) {
        sum += row[k];
        tr.max_term[k] = std::max(tr.max_term[k], std::abs(row[k]));
      }
      tr.max_residual = std::max(tr.max_residual, std::abs(sum));
    }
    report.max_residual = std::max(report.max_residual, tr.max_residual);
    report.targets.push_back(std::move(tr));
  }
  report.sample_count = opt.samples;
  report.sign_assignment.assign(report.components.size(), 1);
  report.audit_best_residual = report.max_residual;

  if (opt.sign_audit && report.components.size() > 1) {
    // First component fixed to +1; flipping every sign is the same cocycle.
    const std::size_t k = report.components.size();
    int passing = 0;
    for (std::uint64_t mask = 0; mask < (1ULL << (k - 1)); ++mask) {
      std::vector<int> signs(k, 1);
      for (std::size_t j = 1; j < k; ++j)
        if (mask & (1ULL << (j - 1))) signs[j] = -1;
      double worst = 0.0;
      for (const auto& t : report.targets) worst = std::max(worst, detail::residual_for_signs(t, report.components, signs));
      if (worst < opt.tol) ++passing;
      if (worst < report.audit_best_residual) {
        report.audit_best_residual = worst;
        report.sign_assignment = signs;
      }
    }
    report.audit_passing_assignments = passing;
  } else {
    report.audit_passing_assignments = report.max_residual < opt.tol ? 1 : 0;
  }
  report.passed = report.max_residual < opt.tol;
  return report;
}

}  // namespace nerve_euler
