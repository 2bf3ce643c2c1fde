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
 * @file euler.hpp
 * @brief Euler-class cochains on the nerve of SO(2p).
 *
 * Two independent code paths: generated cochains (edge, diagonal and the
 * general (p, q) component built from insertion patterns of
 * R_ij = (phi_i + ... + phi_{j-1})^2 between phi-letters) and hand-transcribed
 * cochains for SO(2), SO(4) and SO(6).
 *
 * The transcribed SO(4)/SO(6) cochains use h_1^{-1} dh_1, dh_2 h_2^{-1} and
 * h_2 dh_3 h_3^{-1} h_2^{-1}, which are the phi-letters conjugated by h_1^{-1};
 * the contraction is Ad-invariant, so both paths must agree pointwise.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "combinatorics.hpp"
#include "forms.hpp"
#include "nerve.hpp"
#include "simplex.hpp"

namespace nerve_euler {

/// sum_{tau in S_2p} sgn(tau) a_{tau(1)tau(2)} ... / (2^{2p} pi^p p!),
/// i.e. the standard Pfaffian divided by (2 pi)^p.
inline double pfaffian_paper(const AlgebraVector& a) {
  const int n = a.dim();
  if (n < 2 || n % 2) throw std::invalid_argument("pfaffian_paper: dimension must be even and positive, got " + std::to_string(n));
  const int p = n / 2;
  std::vector<Matrix> factors(static_cast<std::size_t>(p), a.matrix());
  const double norm = std::pow(2.0, 2 * p) * std::pow(M_PI, p) * factorial(p).convert_to<double>();
  return full_contract(factors) / norm;
}

namespace detail {

inline Rational sign_rational(int exponent) { return (exponent % 2) ? Rational(-1) : Rational(1); }

/// 1 / (2^{2p} p!)
inline Rational pfaffian_normalization(int p) { return Rational(1, BigInt(1) << (2 * p)) / Rational(factorial(p)); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Generated cochains

/// Edge cochain on NG(1): words (theta^2)^{k-1} theta (theta^2)^{p-k}.
inline std::vector<ContractedWord> mu_edge_words(int p) {
  if (p < 1) throw std::invalid_argument("mu_edge: p must be >= 1");
  const Rational coefficient = detail::sign_rational(p) * detail::pfaffian_normalization(p) /
                               (Rational(binomial(2 * p - 1, p - 1)) * p);
  const auto theta = MatrixGenerator::lmc(1);
  std::vector<ContractedWord> words;
  for (int k = 1; k <= p; ++k) {
    ContractedWord w;
    w.coefficient = {coefficient, p};
    for (int i = 1; i <= p; ++i) w.factors.push_back(i == k ? FormFactor::single(theta) : FormFactor::square(theta));
    words.push_back(std::move(w));
  }
  return words;
}

inline FormEvaluator mu_edge(int p) { return contracted_evaluator(1, mu_edge_words(p)); }

/// Diagonal cochain on NG(p): signed sum over sigma of phi_{sigma(1)} ... phi_{sigma(p)}.
inline std::vector<ContractedWord> mu_diag_words(int p) {
  if (p < 1) throw std::invalid_argument("mu_diag: p must be >= 1");
  const Rational coefficient = detail::sign_rational(p * (p + 1) / 2) * detail::pfaffian_normalization(p) /
                               Rational(factorial(p));
  std::vector<ContractedWord> words;
  for (const auto& sigma : all_permutations(p)) {
    ContractedWord w;
    w.coefficient = {coefficient * sigma.sign, p};
    for (int s : sigma.image) w.factors.push_back(FormFactor::single(MatrixGenerator::phi(s + 1)));
    words.push_back(std::move(w));
  }
  return words;
}

inline FormEvaluator mu_diag(int p) { return contracted_evaluator(p, mu_diag_words(p)); }

/// An R-label (i, j), 1 <= i < j <= level + 1, placed in a gap 0..level
/// (gap g sits after the g-th phi-letter).
struct Insertion {
  int gap = 0;
  int i = 1;
  int j = 2;
  auto operator<=>(const Insertion&) const = default;
};

/// Multisets of q insertions. Labels sharing a gap are kept in lexicographic
/// order: the R factors have even degree and commute, and reordering them
/// permutes tau-pairs as whole blocks, which is an even permutation.
inline std::vector<std::vector<Insertion>> insertion_patterns(int level, int q) {
  std::vector<Insertion> slots;
  for (int g = 0; g <= level; ++g)
    for (int i = 1; i <= level + 1; ++i)
      for (int j = i + 1; j <= level + 1; ++j) slots.push_back({g, i, j});
  std::vector<std::vector<Insertion>> out;
  std::vector<Insertion> cur;
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (static_cast<int>(cur.size()) == q) {
      out.push_back(cur);
      return;
    }
    for (std::size_t k = start; k < slots.size(); ++k) {
      cur.push_back(slots[k]);
      self(self, k);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

/// Simplex weight of a pattern: exponent of t_k is the number of labels with
/// i - 1 = k or j - 1 = k.
inline MonomialExponent pattern_exponent(int level, const std::vector<Insertion>& pattern) {
  MonomialExponent m{std::vector<int>(static_cast<std::size_t>(level + 1), 0)};
  for (const auto& ins : pattern) {
    ++m.exponents[ins.i - 1];
    ++m.exponents[ins.j - 1];
  }
  return m;
}

inline MatrixGenerator r_generator(int i, int j) {
  return (j == i + 1) ? MatrixGenerator::phi(i) : MatrixGenerator::sum_phi(i, j);
}

/// Component of bidegree (p - q, p + q) of the generated Euler cocycle.
inline std::vector<ContractedWord> general_component_words(int p, int q) {
  if (p < 1 || q < 0 || q > p - 1) throw std::invalid_argument("general_component: need 0 <= q <= p - 1");
  const int level = p - q;
  const Rational base = detail::sign_rational(p + level * (level - 1) / 2) * detail::pfaffian_normalization(p);
  const auto patterns = insertion_patterns(level, q);
  std::vector<ContractedWord> words;
  for (const auto& sigma : all_permutations(level)) {
    for (const auto& pattern : patterns) {
      ContractedWord w;
      w.coefficient = {base * sigma.sign * monomial_integral(pattern_exponent(level, pattern)), p};
      std::size_t next = 0;
      for (int gap = 0; gap <= level; ++gap) {
        while (next < pattern.size() && pattern[next].gap == gap) {
          w.factors.push_back(FormFactor::square(r_generator(pattern[next].i, pattern[next].j)));
          ++next;
        }
        if (gap < level) w.factors.push_back(FormFactor::single(MatrixGenerator::phi(sigma.image[gap] + 1)));
      }
      words.push_back(std::move(w));
    }
  }
  return words;
}

inline FormEvaluator general_component(int p, int q) { return contracted_evaluator(p - q, general_component_words(p, q)); }

// ---------------------------------------------------------------------------
// Cochain containers

struct EulerComponent {
  Bidegree bidegree;
  std::vector<ContractedWord> words;  // empty when `entry_words` carries the description
  std::vector<WordForm> entry_words;
  FormEvaluator form;
};

struct EulerCochain {
  int p = 0;
  std::string source;  // "builtin" or "generated"
  std::vector<EulerComponent> components;

  Cochain cochain() const {
    Cochain c(2 * p);
    for (const auto& comp : components) c.set(comp.form);
    return c;
  }

  const EulerComponent& component(Bidegree b) const {
    for (const auto& c : components)
      if (c.bidegree == b) return c;
    throw std::out_of_range("no component " + b.str());
  }

  nlohmann::json to_json() const {
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& c : components) {
      nlohmann::json terms = to_json_terms(c.words);
      for (const auto& w : c.entry_words) {
        nlohmann::json factors = nlohmann::json::array();
        for (const auto& f : w.factors) {
          factors.push_back({{"generator", f.factor.left.name()},
                             {"square", f.factor.right.has_value()},
                             {"entry", {f.row + 1, f.col + 1}}});
        }
        terms.push_back({{"coefficient", w.coefficient}, {"factors", std::move(factors)}});
      }
      comps.push_back({{"bidegree", c.bidegree}, {"terms", std::move(terms)}});
    }
    return {{"group", "SO(" + std::to_string(2 * p) + ")"}, {"source", source}, {"components", std::move(comps)}};
  }
};

inline EulerComponent make_component(int level, std::vector<ContractedWord> words) {
  EulerComponent c;
  c.bidegree = {level, words.front().degree()};
  c.form = contracted_evaluator(level, words);
  c.words = std::move(words);
  return c;
}

/// The generated cocycle: components q = p-1 down to 0.
inline EulerCochain generated_cocycle(int p) {
  EulerCochain e;
  e.p = p;
  e.source = "generated";
  for (int q = p - 1; q >= 0; --q) e.components.push_back(make_component(p - q, general_component_words(p, q)));
  return e;
}

// ---------------------------------------------------------------------------
// Transcribed cochains

namespace detail {

inline ContractedWord word(ScaledRational c, std::vector<FormFactor> factors) { return {std::move(factors), c}; }

inline EulerCochain builtin_so2() {
  const auto theta = FormFactor::single(MatrixGenerator::lmc(1));
  const double c = 1.0 / (4.0 * M_PI);
  EulerComponent e11;
  e11.bidegree = {1, 1};
  e11.entry_words = {WordForm{1, {{theta, 0, 1}}, -c}, WordForm{1, {{theta, 1, 0}}, c}};
  const auto words = e11.entry_words;
  e11.form = FormEvaluator(1, 1, [words](const NervePoint& p, std::span<const TangentFrame> v) {
    return evaluate_word(words[0], p, v) + evaluate_word(words[1], p, v);
  });
  return {1, "builtin", {e11}};
}

inline EulerCochain builtin_so4() {
  const auto l1 = MatrixGenerator::lmc(1);
  const auto r2 = MatrixGenerator::rmc(2);
  const auto theta = FormFactor::single(l1);
  const auto theta2 = FormFactor::square(l1);
  const ScaledRational c13{Rational(1, 192), 2};
  const ScaledRational c22{Rational(-1, 64), 2};
  std::vector<ContractedWord> e13{word(c13, {theta, theta2}), word(c13, {theta2, theta})};
  // The second term carries sgn of the transposition in S_2; with + the sum vanishes.
  std::vector<ContractedWord> e22{word(c22, {FormFactor::single(l1), FormFactor::single(r2)}),
                                  word(-c22, {FormFactor::single(r2), FormFactor::single(l1)})};
  return {2, "builtin", {make_component(1, std::move(e13)), make_component(2, std::move(e22))}};
}

inline EulerCochain builtin_so6() {
  const auto l1 = MatrixGenerator::lmc(1);
  const auto r2 = MatrixGenerator::rmc(2);
  const auto c3 = MatrixGenerator::conj(2, 3);
  const auto theta = FormFactor::single(l1);
  const auto theta2 = FormFactor::square(l1);

  // One square and two plain factors would have degree 4; the words
  // below carry two squares, the only placement with degree 5.
  const ScaledRational c15{Rational(-1, 64 * 180), 3};
  std::vector<ContractedWord> e15{word(c15, {theta2, theta2, theta}), word(c15, {theta2, theta, theta2}),
                                  word(c15, {theta, theta2, theta2})};

  // Bracket 2 L1^2 + 2 R2^2 + L1 R2 + R2 L1, expanded into its four products.
  const ScaledRational c24{Rational(1, 64 * 6 * 24), 3};
  const std::vector<std::pair<Rational, FormFactor>> bracket{{Rational(2), FormFactor::square(l1)},
                                                             {Rational(2), FormFactor::square(r2)},
                                                             {Rational(1), FormFactor::product(l1, r2)},
                                                             {Rational(1), FormFactor::product(r2, l1)}};
  const auto a = FormFactor::single(l1);
  const auto b = FormFactor::single(r2);
  std::vector<ContractedWord> e24;
  for (const auto& [weight, br] : bracket) {
    const auto c = c24 * weight;
    e24.push_back(word(c, {a, b, br}));
    e24.push_back(word(c, {a, br, b}));
    e24.push_back(word(c, {br, a, b}));
    e24.push_back(word(-c, {b, a, br}));
    e24.push_back(word(-c, {b, br, a}));
    e24.push_back(word(-c, {br, b, a}));
  }

  const ScaledRational c33{Rational(1, 64 * 36), 3};
  const auto x = FormFactor::single(l1);
  const auto y = FormFactor::single(r2);
  const auto z = FormFactor::single(c3);
  std::vector<ContractedWord> e33{word(c33, {x, y, z}),  word(-c33, {y, x, z}), word(-c33, {x, z, y}),
                                  word(c33, {z, x, y}),  word(c33, {y, z, x}),  word(-c33, {z, y, x})};

  return {3,
          "builtin",
          {make_component(1, std::move(e15)), make_component(2, std::move(e24)), make_component(3, std::move(e33))}};
}

}  // namespace detail

/// Hand-transcribed cochain for SO(n), n in {2, 4, 6}.
inline EulerCochain builtin_cocycle(int n) {
  switch (n) {
    case 2: return detail::builtin_so2();
    case 4: return detail::builtin_so4();
    case 6: return detail::builtin_so6();
    default: throw std::invalid_argument("builtin_cocycle: unsupported group SO(" + std::to_string(n) + "), expected n in {2,4,6}");
  }
}

/// The SO(4) level-2 component with a + sign on both terms.
/// Kept for the sign audit; it vanishes identically.
inline FormEvaluator so4_e22_plus_sign() {
  const ScaledRational c22{Rational(-1, 64), 2};
  const auto a = FormFactor::single(MatrixGenerator::lmc(1));
  const auto b = FormFactor::single(MatrixGenerator::rmc(2));
  return contracted_evaluator(2, {detail::word(c22, {a, b}), detail::word(c22, {b, a})});
}

// ---------------------------------------------------------------------------
// Euler numbers

/// Integral of the SO(2) cochain along theta -> R(2 pi k theta), theta in
/// [0, 1]; tangents are taken numerically from the loop itself.
inline double euler_number_clutching(int k, int steps = 256) {
  if (steps < 64) throw std::invalid_argument("euler_number_clutching: steps must be >= 64");
  const auto e11 = builtin_cocycle(2).components.front().form;
  auto loop = [k](double theta) {
    const double a = 2.0 * M_PI * k * theta;
    Matrix r(2, 2);
    r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    return r;
  };
  // Periodic trapezoid rule: spectrally accurate for smooth loops.
  double total = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double theta = static_cast<double>(i) / steps;
    const NervePoint p({GroupPoint::trusted(loop(theta))});
    const std::vector<TangentFrame> v{TangentFrame({curve_tangent(loop, theta)})};
    total += e11(p, v);
  }
  return total / steps;
}

/// Unit quaternion multiplication on R^4 = H as elements of so(4).
inline std::array<AlgebraVector, 3> quaternion_units() {
  Matrix li(4, 4), lj(4, 4), lk(4, 4);
  // left multiplication by i, j, k in the basis (1, i, j, k)
  li << 0, -1, 0, 0, 1, 0, 0, 0, 0, 0, 0, -1, 0, 0, 1, 0;
  lj << 0, 0, -1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, -1, 0, 0;
  lk << 0, 0, 0, -1, 0, 0, -1, 0, 0, 1, 0, 0, 1, 0, 0, 0;
  return {AlgebraVector::from_matrix(li), AlgebraVector::from_matrix(lj), AlgebraVector::from_matrix(lk)};
}

/// Integral of the SO(4) edge component over the unit quaternions S^3 in
/// SO(4). The form is left-invariant, so the integral is its value on the
/// orthonormal frame (Li, Lj, Lk) times vol(S^3) = 2 pi^2. This is the Euler
/// number of the quaternionic line bundle over S^4 clutched by S^3.
inline double hopf_euler_number(const FormEvaluator& e13) {
  const auto units = quaternion_units();
  const NervePoint p({GroupPoint::identity(4)});
  const std::vector<TangentFrame> v{TangentFrame({units[0]}), TangentFrame({units[1]}), TangentFrame({units[2]})};
  return 2.0 * M_PI * M_PI * e13(p, v);
}

// ---------------------------------------------------------------------------
// Pullback of phi_s along gamma

/// gamma(g_0, ..., g_q) = (g_0 g_1^{-1}, ..., g_{q-1} g_q^{-1}).
inline NervePoint gamma_point(const std::vector<GroupPoint>& g) {
  std::vector<GroupPoint> h;
  for (std::size_t m = 1; m < g.size(); ++m) h.push_back(g[m - 1] * g[m].inverse());
  return NervePoint(std::move(h));
}

/// Exact differential of gamma: slot m receives Ad(g_m)(xi_{m-1} - xi_m).
inline TangentFrame gamma_pushforward(const std::vector<GroupPoint>& g, const std::vector<AlgebraVector>& xi) {
  std::vector<AlgebraVector> out;
  for (std::size_t m = 1; m < g.size(); ++m) out.push_back(adjoint(g[m], xi[m - 1] - xi[m]));
  return TangentFrame(std::move(out));
}

struct GammaVariant {
  std::string name;
  double residual = 0.0;
};

struct GammaPullbackReport {
  int s = 0;
  int q = 0;
  double pushforward_fd_residual = 0.0;  // exact pushforward vs finite differences
  std::vector<GammaVariant> variants;
  std::string best;

  nlohmann::json to_json() const {
    nlohmann::json vs = nlohmann::json::array();
    for (const auto& v : variants) vs.push_back({{"conjugator", v.name}, {"max_residual", v.residual}});
    return {{"s", s}, {"q", q}, {"pushforward_fd_residual", pushforward_fd_residual}, {"variants", vs}, {"best", best}};
  }
  double best_residual() const {
    double r = variants.front().residual;
    for (const auto& v : variants) r = std::min(r, v.residual);
    return r;
  }
};

/// Compares phi_s(gamma_* V) with Ad(c)(xi_{s-1} - xi_s) for three candidate
/// conjugators c: the literal component g_1, the first component g_0, and
/// the partial product g_0 g_1 ... g_{s-1}.
inline GammaPullbackReport gamma_pullback_check(int s, int q, int samples, Rng& rng, int n = 4) {
  if (!(1 <= s && s <= q)) throw std::invalid_argument("gamma_pullback_check: need 1 <= s <= q");
  GammaPullbackReport report;
  report.s = s;
  report.q = q;
  report.variants = {{"g_1", 0.0}, {"g_0", 0.0}, {"g_0 g_1 ... g_{s-1}", 0.0}};
  for (int trial = 0; trial < samples; ++trial) {
    std::vector<GroupPoint> g;
    std::vector<AlgebraVector> xi;
    for (int m = 0; m <= q; ++m) {
      g.push_back(sample_haar(n, rng));
      xi.push_back(sample_algebra(n, rng));
    }
    const NervePoint h = gamma_point(g);
    const TangentFrame v = gamma_pushforward(g, xi);
    for (int m = 0; m < q; ++m) {
      auto curve = [&](double t) {
        std::vector<GroupPoint> moved;
        for (int k = 0; k <= q; ++k) moved.push_back(g[k] * exp_alg(t * xi[k]));
        return gamma_point(moved)[m].matrix();
      };
      const double fd = (curve_tangent(curve, 0.0).matrix() - v[m].matrix()).cwiseAbs().maxCoeff();
      report.pushforward_fd_residual = std::max(report.pushforward_fd_residual, fd);
    }
    const Matrix lhs = generator_value(MatrixGenerator::phi(s), h, v).matrix();
    const AlgebraVector diff = xi[s - 1] - xi[s];
    GroupPoint partial = g[0];
    for (int k = 1; k < s; ++k) partial = partial * g[k];
    const std::array<GroupPoint, 3> conjugators{g[1], g[0], partial};
    for (std::size_t c = 0; c < conjugators.size(); ++c) {
      const double r = (lhs - adjoint(conjugators[c], diff).matrix()).cwiseAbs().maxCoeff();
      report.variants[c].residual = std::max(report.variants[c].residual, r);
    }
  }
  report.best = std::min_element(report.variants.begin(), report.variants.end(),
                                 [](const auto& a, const auto& b) { return a.residual < b.residual; })
                    ->name;
  return report;
}

}  // namespace nerve_euler
