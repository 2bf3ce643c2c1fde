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
 * @file forms.hpp
 * @brief Differential forms on G^r evaluated pointwise on left-trivialized
 * tangent frames.
 *
 * Wedge convention: shuffle sums without factorial normalization, so for
 * 1-forms (a ^ b)(X, Y) = a(X) b(Y) - a(Y) b(X), and for a matrix-valued
 * 1-form (theta ^ theta)(X, Y) = [theta(X), theta(Y)]. The matching exterior
 * derivative is
 *   dw(V_0..V_s) = sum_i (-1)^i V_i(w(..^V_i..)) + sum_{i<j} (-1)^{i+j} w([V_i,V_j], ..),
 * which gives d theta = -theta ^ theta for theta = h^{-1} dh.
 */

#include <algorithm>
#include <cmath>
#include <compare>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

#include "combinatorics.hpp"
#include "matgroup.hpp"
#include "simplex.hpp"

namespace nerve_euler {

namespace tolerance {
inline constexpr double fd_step = 1e-4;
}

// ---------------------------------------------------------------------------
// Matrix-valued generators

enum class GeneratorKind {
  LeftMaurerCartan,   // h_k^{-1} dh_k
  RightMaurerCartan,  // dh_k h_k^{-1}
  Phi,                // h_1...h_{s-1} dh_s h_s^{-1} ... h_1^{-1}
  SumPhi,             // phi_i + ... + phi_{j-1}
  Conjugated,         // h_a...h_{s-1} dh_s h_s^{-1} ... h_a^{-1}
};

struct MatrixGenerator {
  GeneratorKind kind = GeneratorKind::LeftMaurerCartan;
  int first = 1;
  int second = 0;

  static MatrixGenerator lmc(int k) { return {GeneratorKind::LeftMaurerCartan, k, 0}; }
  static MatrixGenerator rmc(int k) { return {GeneratorKind::RightMaurerCartan, k, 0}; }
  static MatrixGenerator phi(int s) { return {GeneratorKind::Phi, s, 0}; }
  static MatrixGenerator sum_phi(int i, int j) {
    if (!(1 <= i && i < j)) throw std::invalid_argument("SUMPHI(i,j) needs 1 <= i < j");
    return {GeneratorKind::SumPhi, i, j};
  }
  static MatrixGenerator conj(int a, int s) {
    if (!(1 <= a && a <= s)) throw std::invalid_argument("CONJ(a,s) needs 1 <= a <= s");
    return {GeneratorKind::Conjugated, a, s};
  }

  /// Smallest nerve level on which the generator is defined.
  int required_level() const {
    switch (kind) {
      case GeneratorKind::SumPhi: return second - 1;
      case GeneratorKind::Conjugated: return second;
      default: return first;
    }
  }

  std::string name() const {
    switch (kind) {
      case GeneratorKind::LeftMaurerCartan: return "LMC(" + std::to_string(first) + ")";
      case GeneratorKind::RightMaurerCartan: return "RMC(" + std::to_string(first) + ")";
      case GeneratorKind::Phi: return "PHI(" + std::to_string(first) + ")";
      case GeneratorKind::SumPhi: return "SUMPHI(" + std::to_string(first) + "," + std::to_string(second) + ")";
      case GeneratorKind::Conjugated: return "CONJ(" + std::to_string(first) + "," + std::to_string(second) + ")";
    }
    return "?";
  }

  auto operator<=>(const MatrixGenerator&) const = default;
};

namespace detail {

/// Ad(h_a ... h_s) xi_s; indices are 1-based and inclusive.
inline Matrix conjugated_slot(const NervePoint& p, const TangentFrame& v, int a, int s) {
  Matrix g = p[a - 1].matrix();
  for (int k = a; k < s; ++k) g = g * p[k].matrix();
  return g * v[s - 1].matrix() * g.transpose();
}

}  // namespace detail

/// Raw matrix of the generator on one frame. No level checks.
inline Matrix generator_matrix(const MatrixGenerator& gen, const NervePoint& p, const TangentFrame& v) {
  switch (gen.kind) {
    case GeneratorKind::LeftMaurerCartan: return v[gen.first - 1].matrix();
    case GeneratorKind::RightMaurerCartan: return detail::conjugated_slot(p, v, gen.first, gen.first);
    case GeneratorKind::Phi: return detail::conjugated_slot(p, v, 1, gen.first);
    case GeneratorKind::Conjugated: return detail::conjugated_slot(p, v, gen.first, gen.second);
    case GeneratorKind::SumPhi: {
      Matrix sum = Matrix::Zero(p[0].dim(), p[0].dim());
      // phi_i + ... + phi_{j-1}, sharing the running prefix product
      Matrix prefix = Matrix::Identity(p[0].dim(), p[0].dim());
      for (int s = 1; s < gen.second; ++s) {
        prefix = prefix * p[s - 1].matrix();
        if (s >= gen.first) sum += prefix * v[s - 1].matrix() * prefix.transpose();
      }
      return sum;
    }
  }
  throw std::logic_error("unknown generator kind");
}

inline AlgebraVector generator_value(const MatrixGenerator& gen, const NervePoint& p, const TangentFrame& v) {
  if (gen.required_level() > p.level() || v.level() != p.level()) {
    throw std::invalid_argument("generator " + gen.name() + " is not defined at nerve level " +
                                std::to_string(p.level()));
  }
  return AlgebraVector::project(generator_matrix(gen, p, v));
}

/// A scalar-factor building block: a generator G (1-form) or the product
/// G ^ H of two generators (2-form); G ^ G is the square G^2.
struct FormFactor {
  MatrixGenerator left;
  std::optional<MatrixGenerator> right;

  static FormFactor single(MatrixGenerator g) { return {g, std::nullopt}; }
  static FormFactor square(MatrixGenerator g) { return {g, g}; }
  static FormFactor product(MatrixGenerator g, MatrixGenerator h) { return {g, h}; }

  int degree() const { return right ? 2 : 1; }
  int required_level() const { return std::max(left.required_level(), right ? right->required_level() : 0); }

  std::string name() const {
    if (!right) return left.name();
    if (*right == left) return left.name() + "^2";
    return left.name() + "*" + right->name();
  }

  bool operator==(const FormFactor&) const = default;
};

// ---------------------------------------------------------------------------
// Word forms: products of scalar entries of factors.

struct WordFactor {
  FormFactor factor;
  int row = 0;  // 0-based matrix entry
  int col = 0;
};

struct WordForm {
  int level = 1;
  std::vector<WordFactor> factors;
  double coefficient = 1.0;

  int degree() const {
    int d = 0;
    for (const auto& f : factors) d += f.factor.degree();
    return d;
  }
};

/// Entry (row, col) of the factor evaluated on the frames listed in `slots`.
inline double factor_entry(const FormFactor& f, int row, int col, const NervePoint& p,
                           std::span<const TangentFrame> frames, std::span<const int> slots) {
  if (!f.right) return generator_matrix(f.left, p, frames[slots[0]])(row, col);
  const Matrix gx = generator_matrix(f.left, p, frames[slots[0]]);
  const Matrix gy = generator_matrix(f.left, p, frames[slots[1]]);
  const Matrix hx = generator_matrix(*f.right, p, frames[slots[0]]);
  const Matrix hy = generator_matrix(*f.right, p, frames[slots[1]]);
  return gx.row(row).dot(hy.col(col)) - gy.row(row).dot(hx.col(col));
}

/// Shuffle-convention wedge of the scalar factors.
inline double evaluate_word(const WordForm& w, const NervePoint& p, std::span<const TangentFrame> frames) {
  if (static_cast<int>(frames.size()) != w.degree()) {
    throw std::invalid_argument("evaluate_word: expected " + std::to_string(w.degree()) + " frames, got " +
                                std::to_string(frames.size()));
  }
  std::vector<int> degrees;
  for (const auto& f : w.factors) degrees.push_back(f.factor.degree());
  double total = 0.0;
  for (const auto& sh : shuffle_table(degrees)) {
    double term = sh.sign;
    for (std::size_t k = 0; k < w.factors.size(); ++k) {
      const auto& f = w.factors[k];
      term *= factor_entry(f.factor, f.row, f.col, p, frames, sh.blocks[k]);
    }
    total += term;
  }
  return w.coefficient * total;
}

// ---------------------------------------------------------------------------
// Contracted words: sum_tau sgn(tau) prod_k (F_k)_{tau(2k-1) tau(2k)}.

/// rational * pi^{-inverse_pi_power}
struct ScaledRational {
  Rational rational{1};
  int inverse_pi_power = 0;

  double to_double() const {
    return boost::multiprecision::numerator(rational).convert_to<double>() /
           boost::multiprecision::denominator(rational).convert_to<double>() / std::pow(M_PI, inverse_pi_power);
  }
  ScaledRational operator*(const Rational& r) const { return {rational * r, inverse_pi_power}; }
  ScaledRational operator-() const { return {-rational, inverse_pi_power}; }
  bool operator==(const ScaledRational&) const = default;
};

struct ContractedWord {
  std::vector<FormFactor> factors;
  ScaledRational coefficient;

  int degree() const {
    int d = 0;
    for (const auto& f : factors) d += f.degree();
    return d;
  }
};

/// Expands a contracted word into its (2p)! entry-level words.
inline std::vector<WordForm> expand_contracted(const ContractedWord& cw, int level) {
  const int p = static_cast<int>(cw.factors.size());
  std::vector<WordForm> out;
  for (const auto& tau : all_permutations(2 * p)) {
    WordForm w;
    w.level = level;
    w.coefficient = tau.sign * cw.coefficient.to_double();
    for (int k = 0; k < p; ++k) w.factors.push_back({cw.factors[k], tau.image[2 * k], tau.image[2 * k + 1]});
    out.push_back(std::move(w));
  }
  return out;
}

inline nlohmann::json to_json_terms(const std::vector<ContractedWord>& words) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& w : words) {
    nlohmann::json factors = nlohmann::json::array();
    for (const auto& f : w.factors) {
      nlohmann::json jf{{"generator", f.left.name()}, {"square", f.right.has_value() && *f.right == f.left}};
      if (f.right && !(*f.right == f.left)) jf["right"] = f.right->name();
      factors.push_back(std::move(jf));
    }
    terms.push_back({{"coefficient", w.coefficient.to_double()},
                     {"coefficient_exact", w.coefficient.rational.str() + " / pi^" +
                                               std::to_string(w.coefficient.inverse_pi_power)},
                     {"contraction", "sum over tau in S_2p of sgn(tau), entries paired in word order"},
                     {"factors", std::move(factors)}});
  }
  return terms;
}

// ---------------------------------------------------------------------------
// Form evaluators

/// An element of Omega^degree(G^level) as an alternating multilinear map.
class FormEvaluator {
 public:
  using Function = std::function<double(const NervePoint&, std::span<const TangentFrame>)>;

  FormEvaluator() = default;
  FormEvaluator(int level, int degree, Function f) : level_(level), degree_(degree), f_(std::move(f)) {}

  int level() const { return level_; }
  int degree() const { return degree_; }
  explicit operator bool() const { return static_cast<bool>(f_); }

  double operator()(const NervePoint& p, std::span<const TangentFrame> frames) const {
    if (p.level() != level_) {
      throw std::invalid_argument("form of level " + std::to_string(level_) + " evaluated at level " +
                                  std::to_string(p.level()));
    }
    if (static_cast<int>(frames.size()) != degree_) {
      throw std::invalid_argument("form of degree " + std::to_string(degree_) + " given " +
                                  std::to_string(frames.size()) + " frames");
    }
    for (const auto& v : frames) {
      if (v.level() != level_) throw std::invalid_argument("tangent frame level does not match the form");
    }
    return f_(p, frames);
  }

  /// Evaluates without argument validation (inner loops).
  double call(const NervePoint& p, std::span<const TangentFrame> frames) const { return f_(p, frames); }

  friend FormEvaluator operator+(const FormEvaluator& a, const FormEvaluator& b) {
    check_compatible(a, b);
    return {a.level_, a.degree_, [a, b](const NervePoint& p, std::span<const TangentFrame> v) {
              return a.f_(p, v) + b.f_(p, v);
            }};
  }
  friend FormEvaluator operator-(const FormEvaluator& a, const FormEvaluator& b) { return a + (-1.0) * b; }
  friend FormEvaluator operator*(double c, const FormEvaluator& a) {
    return {a.level_, a.degree_, [c, a](const NervePoint& p, std::span<const TangentFrame> v) { return c * a.f_(p, v); }};
  }

 private:
  static void check_compatible(const FormEvaluator& a, const FormEvaluator& b) {
    if (a.level_ != b.level_ || a.degree_ != b.degree_) {
      throw std::invalid_argument("cannot add forms of different level or degree");
    }
  }

  int level_ = 0;
  int degree_ = 0;
  Function f_;
};

inline FormEvaluator zero_form(int level, int degree) {
  return {level, degree, [](const NervePoint&, std::span<const TangentFrame>) { return 0.0; }};
}

inline FormEvaluator word_evaluator(WordForm w) {
  const int level = w.level;
  const int degree = w.degree();
  return {level, degree, [w = std::move(w)](const NervePoint& p, std::span<const TangentFrame> v) {
            return evaluate_word(w, p, v);
          }};
}

namespace detail {

/// Precomputed layout of a sum of contracted words sharing level and degree.
class ContractedSum {
 public:
  ContractedSum(int level, std::vector<ContractedWord> words) : level_(level), words_(std::move(words)) {
    for (const auto& w : words_) {
      Term term;
      term.coefficient = w.coefficient.to_double();
      std::vector<int> degrees;
      for (const auto& f : w.factors) {
        if (f.required_level() > level_) {
          throw std::invalid_argument("factor " + f.name() + " is not defined at level " + std::to_string(level_));
        }
        term.left.push_back(intern(f.left));
        term.right.push_back(f.right ? intern(*f.right) : -1);
        degrees.push_back(f.degree());
      }
      term.shuffles = &shuffle_table(degrees);
      terms_.push_back(std::move(term));
    }
  }

  double operator()(const NervePoint& p, std::span<const TangentFrame> frames) const {
    const int s = static_cast<int>(frames.size());
    const int g = static_cast<int>(generators_.size());
    std::vector<Matrix> values(static_cast<std::size_t>(g * s));
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < s; ++j) values[i * s + j] = generator_matrix(generators_[i], p, frames[j]);

    std::vector<std::optional<Matrix>> products(static_cast<std::size_t>(g * g * s * s));
    auto product = [&](int l, int r, int a, int b) -> const Matrix& {
      auto& slot = products[((l * g + r) * s + a) * s + b];
      if (!slot) {
        Matrix m = values[l * s + a] * values[r * s + b] - values[l * s + b] * values[r * s + a];
        // The contraction sees only the skew part; squares are already skew.
        if (l != r) m = 0.5 * (m - m.transpose()).eval();
        slot = std::move(m);
      }
      return *slot;
    };

    double total = 0.0;
    std::vector<Matrix> mats;
    for (const auto& term : terms_) {
      double word = 0.0;
      for (const auto& sh : *term.shuffles) {
        mats.clear();
        for (std::size_t k = 0; k < term.left.size(); ++k) {
          const auto& slots = sh.blocks[k];
          if (term.right[k] < 0) {
            mats.push_back(values[term.left[k] * s + slots[0]]);
          } else {
            mats.push_back(product(term.left[k], term.right[k], slots[0], slots[1]));
          }
        }
        word += sh.sign * pair_contract(mats);
      }
      total += term.coefficient * word;
    }
    return total;
  }

  const std::vector<ContractedWord>& words() const { return words_; }

 private:
  struct Term {
    double coefficient = 0.0;
    std::vector<int> left;
    std::vector<int> right;
    const std::vector<Shuffle>* shuffles = nullptr;
  };

  int intern(const MatrixGenerator& gen) {
    for (std::size_t i = 0; i < generators_.size(); ++i)
      if (generators_[i] == gen) return static_cast<int>(i);
    generators_.push_back(gen);
    return static_cast<int>(generators_.size()) - 1;
  }

  int level_;
  std::vector<ContractedWord> words_;
  std::vector<MatrixGenerator> generators_;
  std::vector<Term> terms_;
};

}  // namespace detail

/// Sum of contracted words; all words must share one degree.
inline FormEvaluator contracted_evaluator(int level, std::vector<ContractedWord> words) {
  if (words.empty()) throw std::invalid_argument("contracted_evaluator: no words");
  const int degree = words.front().degree();
  for (const auto& w : words) {
    if (w.degree() != degree) throw std::invalid_argument("contracted_evaluator: words of mixed degree");
  }
  auto sum = std::make_shared<const detail::ContractedSum>(level, std::move(words));
  return {level, degree, [sum](const NervePoint& p, std::span<const TangentFrame> v) { return (*sum)(p, v); }};
}

// ---------------------------------------------------------------------------
// Calculus

/// Central difference with one Richardson level: (4 D(h/2) - D(h)) / 3.
inline double richardson_derivative(const std::function<double(double)>& f, double step) {
  const double coarse = (f(step) - f(-step)) / (2.0 * step);
  const double fine = (f(0.5 * step) - f(-0.5 * step)) / step;
  return (4.0 * fine - coarse) / 3.0;
}

/// Moves every component along its left-invariant direction: h_k exp(t xi_k).
inline NervePoint flow(const NervePoint& p, const TangentFrame& v, double t) {
  std::vector<GroupPoint> moved;
  moved.reserve(static_cast<std::size_t>(p.level()));
  for (int k = 0; k < p.level(); ++k) moved.push_back(p[k] * exp_alg(t * v[k]));
  return NervePoint(std::move(moved));
}

/// Left-trivialized velocity g(t0)^{-1} g'(t0) of a matrix curve, by
/// Richardson-extrapolated central differences, projected onto so(n).
inline AlgebraVector curve_tangent(const std::function<Matrix(double)>& curve, double t0, double step = tolerance::fd_step) {
  const Matrix g0 = curve(t0);
  const Matrix coarse = (curve(t0 + step) - curve(t0 - step)) / (2.0 * step);
  const Matrix fine = (curve(t0 + 0.5 * step) - curve(t0 - 0.5 * step)) / step;
  return AlgebraVector::project(g0.transpose() * ((4.0 * fine - coarse) / 3.0));
}

inline TangentFrame frame_bracket(const TangentFrame& a, const TangentFrame& b) {
  std::vector<AlgebraVector> out;
  for (int k = 0; k < a.level(); ++k) out.push_back(bracket(a[k], b[k]));
  return TangentFrame(std::move(out));
}

/// Cartan formula with left-invariant extensions of the frames; directional
/// derivatives by central differences of width `step` plus one Richardson level.
inline FormEvaluator exterior_derivative(const FormEvaluator& w, double step = tolerance::fd_step) {
  const int s = w.degree();
  return {w.level(), s + 1, [w, step, s](const NervePoint& p, std::span<const TangentFrame> v) {
            double total = 0.0;
            std::vector<TangentFrame> rest;
            for (int i = 0; i <= s; ++i) {
              rest.clear();
              for (int k = 0; k <= s; ++k)
                if (k != i) rest.push_back(v[k]);
              const double deriv =
                  richardson_derivative([&](double t) { return w.call(flow(p, v[i], t), rest); }, step);
              total += ((i % 2) ? -1.0 : 1.0) * deriv;
            }
            for (int i = 0; i <= s; ++i) {
              for (int j = i + 1; j <= s; ++j) {
                rest.clear();
                rest.push_back(frame_bracket(v[i], v[j]));
                for (int k = 0; k <= s; ++k)
                  if (k != i && k != j) rest.push_back(v[k]);
                total += (((i + j) % 2) ? -1.0 : 1.0) * w.call(p, rest);
              }
            }
            return total;
          }};
}

}  // namespace nerve_euler
