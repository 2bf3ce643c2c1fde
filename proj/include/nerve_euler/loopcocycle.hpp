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
 * @file loopcocycle.hpp
 * @brief Loop algebra of so(4) with period-1 trigonometric loops, the
 * Pfaffian pairing, the 2-cocycle
 *   alpha(x, y) = -1/(128 pi^2) int_0^1 ( <x', y> - <y', x> ) dtheta,
 * and the group-to-algebra map phi (antisymmetrized mixed partial at y = 0)
 * applied to the functionals a and b built from the level-1 and level-2
 * components of the SO(4) Euler cocycle.
 */

#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include <nlohmann/json.hpp>

#include "combinatorics.hpp"
#include "euler.hpp"
#include "matgroup.hpp"
#include "simplex.hpp"
#include "transgression.hpp"

namespace nerve_euler {

/// xi(theta) = c0 + sum_k a_k cos(2 pi k theta) + b_k sin(2 pi k theta).
class LoopAlgebraElement {
 public:
  explicit LoopAlgebraElement(int n = 4, int max_freq = 0)
      : c0_(n), a_(static_cast<std::size_t>(max_freq), AlgebraVector(n)), b_(static_cast<std::size_t>(max_freq), AlgebraVector(n)) {}

  LoopAlgebraElement(AlgebraVector c0, std::vector<AlgebraVector> a, std::vector<AlgebraVector> b)
      : c0_(std::move(c0)), a_(std::move(a)), b_(std::move(b)) {
    if (a_.size() != b_.size()) throw std::invalid_argument("loop: cosine and sine coefficient counts differ");
    for (const auto& m : a_) check(m);
    for (const auto& m : b_) check(m);
  }

  static LoopAlgebraElement constant(AlgebraVector x) { return {std::move(x), {}, {}}; }

  static LoopAlgebraElement random(int n, int max_freq, Rng& rng, double scale = 1.0) {
    LoopAlgebraElement out(n, max_freq);
    out.c0_ = sample_algebra(n, rng, scale);
    for (int k = 0; k < max_freq; ++k) {
      out.a_[k] = sample_algebra(n, rng, scale);
      out.b_[k] = sample_algebra(n, rng, scale);
    }
    return out;
  }

  int dim() const { return c0_.dim(); }
  int max_freq() const { return static_cast<int>(a_.size()); }
  const AlgebraVector& c0() const { return c0_; }
  const AlgebraVector& cos_coeff(int k) const { return a_.at(static_cast<std::size_t>(k - 1)); }
  const AlgebraVector& sin_coeff(int k) const { return b_.at(static_cast<std::size_t>(k - 1)); }

  Matrix value(double theta) const {
    Matrix v = c0_.matrix();
    for (int k = 1; k <= max_freq(); ++k) {
      const double w = 2.0 * M_PI * k * theta;
      v += std::cos(w) * cos_coeff(k).matrix() + std::sin(w) * sin_coeff(k).matrix();
    }
    return v;
  }

  Matrix derivative(double theta) const {
    Matrix v = Matrix::Zero(dim(), dim());
    for (int k = 1; k <= max_freq(); ++k) {
      const double w = 2.0 * M_PI * k * theta;
      v += (2.0 * M_PI * k) * (-std::sin(w) * cos_coeff(k).matrix() + std::cos(w) * sin_coeff(k).matrix());
    }
    return v;
  }

  /// Largest spectral norm over a fine grid; used for log-domain guards.
  double sup_norm(int nodes = 256) const {
    double best = 0.0;
    for (int j = 0; j < nodes; ++j) best = std::max(best, AlgebraVector::project(value(double(j) / nodes)).spectral_norm());
    return best;
  }

  LoopAlgebraElement& operator+=(const LoopAlgebraElement& o) {
    const int k = std::max(max_freq(), o.max_freq());
    a_.resize(static_cast<std::size_t>(k), AlgebraVector(dim()));
    b_.resize(static_cast<std::size_t>(k), AlgebraVector(dim()));
    c0_ += o.c0_;
    for (int i = 1; i <= o.max_freq(); ++i) {
      a_[i - 1] += o.cos_coeff(i);
      b_[i - 1] += o.sin_coeff(i);
    }
    return *this;
  }
  friend LoopAlgebraElement operator+(LoopAlgebraElement a, const LoopAlgebraElement& b) { return a += b; }
  friend LoopAlgebraElement operator*(double c, LoopAlgebraElement x) {
    x.c0_ *= c;
    for (auto& m : x.a_) m *= c;
    for (auto& m : x.b_) m *= c;
    return x;
  }

  /// Adds m * cos(2 pi k theta) (or sin), folding negative frequencies.
  void add_cos(int k, const AlgebraVector& m) {
    k = std::abs(k);
    if (k == 0) {
      c0_ += m;
      return;
    }
    grow(k);
    a_[k - 1] += m;
  }
  void add_sin(int k, const AlgebraVector& m) {
    if (k == 0) return;
    grow(std::abs(k));
    b_[std::abs(k) - 1] += (k > 0 ? 1.0 : -1.0) * m;
  }

  nlohmann::json to_json() const {
    nlohmann::json a = nlohmann::json::array(), b = nlohmann::json::array();
    for (const auto& m : a_) a.push_back(m);
    for (const auto& m : b_) b.push_back(m);
    return {{"K", max_freq()}, {"c0", c0_}, {"a", a}, {"b", b}};
  }

  static LoopAlgebraElement from_json(const nlohmann::json& j) {
    std::vector<AlgebraVector> a, b;
    for (const auto& m : j.at("a")) a.push_back(m.get<AlgebraVector>());
    for (const auto& m : j.at("b")) b.push_back(m.get<AlgebraVector>());
    if (j.at("K").get<int>() != static_cast<int>(a.size())) throw std::invalid_argument("loop JSON: K disagrees with coefficient count");
    return {j.at("c0").get<AlgebraVector>(), std::move(a), std::move(b)};
  }

 private:
  void check(const AlgebraVector& m) const {
    if (m.dim() != c0_.dim()) throw std::invalid_argument("loop: coefficient dimension mismatch");
  }
  void grow(int k) {
    if (k > max_freq()) {
      a_.resize(static_cast<std::size_t>(k), AlgebraVector(dim()));
      b_.resize(static_cast<std::size_t>(k), AlgebraVector(dim()));
    }
  }

  AlgebraVector c0_;
  std::vector<AlgebraVector> a_, b_;
};

/// Pointwise bracket, exact on Fourier coefficients.
inline LoopAlgebraElement bracket_loop(const LoopAlgebraElement& x, const LoopAlgebraElement& y) {
  if (x.dim() != y.dim()) throw std::invalid_argument("bracket_loop: dimension mismatch");
  struct Term {
    int k;
    bool is_sin;
    const AlgebraVector* m;
  };
  auto terms = [](const LoopAlgebraElement& l) {
    std::vector<Term> t{{0, false, &l.c0()}};
    for (int k = 1; k <= l.max_freq(); ++k) {
      t.push_back({k, false, &l.cos_coeff(k)});
      t.push_back({k, true, &l.sin_coeff(k)});
    }
    return t;
  };
  LoopAlgebraElement out(x.dim(), x.max_freq() + y.max_freq());
  for (const auto& u : terms(x)) {
    for (const auto& v : terms(y)) {
      const AlgebraVector half = 0.5 * bracket(*u.m, *v.m);
      const int s = u.k + v.k, d = u.k - v.k;
      if (!u.is_sin && !v.is_sin) {
        out.add_cos(s, half);
        out.add_cos(d, half);
      } else if (u.is_sin && v.is_sin) {
        out.add_cos(d, half);
        out.add_cos(s, -1.0 * half);
      } else if (!u.is_sin) {  // cos(k) sin(l)
        out.add_sin(s, half);
        out.add_sin(d, -1.0 * half);
      } else {  // sin(k) cos(l)
        out.add_sin(s, half);
        out.add_sin(d, half);
      }
    }
  }
  return out;
}

/// sum_{tau in S_4} sgn(tau) X_{tau1 tau2} Y_{tau3 tau4}.
inline double pf_pairing(const Matrix& x, const Matrix& y) {
  if (x.rows() != 4 || x.cols() != 4 || y.rows() != 4 || y.cols() != 4) throw std::invalid_argument("pf_pairing: expects 4x4 matrices");
  // Both orders agree mathematically; averaging makes the symmetry exact in floating point.
  const std::vector<Matrix> f{x, y}, g{y, x};
  return 0.5 * (full_contract(f) + full_contract(g));
}

inline double pf_pairing(const AlgebraVector& x, const AlgebraVector& y) { return pf_pairing(x.matrix(), y.matrix()); }

inline constexpr double loop_normalization = -1.0 / (128.0 * M_PI * M_PI);

inline int trapezoid_nodes(const LoopAlgebraElement& x, const LoopAlgebraElement& y) {
  return 4 * (x.max_freq() + y.max_freq()) + 8;
}

/// -1/(128 pi^2) int_0^1 <x', y> dtheta, the one-sided half of alpha.
inline double alpha_half(const LoopAlgebraElement& x, const LoopAlgebraElement& y, int nodes = 0) {
  if (nodes <= 0) nodes = trapezoid_nodes(x, y);
  double sum = 0.0;
  for (int j = 0; j < nodes; ++j) {
    const double theta = double(j) / nodes;
    sum += pf_pairing(x.derivative(theta), y.value(theta));
  }
  return loop_normalization * sum / nodes;
}

inline double alpha(const LoopAlgebraElement& x, const LoopAlgebraElement& y, int nodes = 0) {
  if (nodes <= 0) nodes = trapezoid_nodes(x, y);
  double sum = 0.0;
  for (int j = 0; j < nodes; ++j) {
    const double theta = double(j) / nodes;
    sum += pf_pairing(x.derivative(theta), y.value(theta)) - pf_pairing(y.derivative(theta), x.value(theta));
  }
  return loop_normalization * sum / nodes;
}

inline double cocycle_residual(const LoopAlgebraElement& x, const LoopAlgebraElement& y, const LoopAlgebraElement& z) {
  return alpha(bracket_loop(x, y), z) + alpha(bracket_loop(y, z), x) + alpha(bracket_loop(z, x), y);
}

// ---------------------------------------------------------------------------
// Group-level functionals on paths theta -> exp(y xi(theta))

/// c(exp(y1 xi1), exp(y2 xi2)) as a function of the scales and loops.
using PathFunctional = std::function<double(double, const LoopAlgebraElement&, double, const LoopAlgebraElement&)>;

struct LoopQuadrature {
  int theta_nodes = 64;
  int simplex_order = 8;
};

/// b = int_{S^1 x Delta^1} beta^* E_{2,2} with beta(theta; t) = (exp(y1 xi1), exp(t y2 xi2)),
/// oriented (d/dtheta, d/dt).
inline double b_functional(double y1, const LoopAlgebraElement& x1, double y2, const LoopAlgebraElement& x2,
                           const LoopQuadrature& quad = {}) {
  static const FormEvaluator e22 = builtin_cocycle(4).component({2, 2}).form;
  const QuadratureRule rule = quadrature_rule(1, quad.simplex_order);
  double total = 0.0;
  for (int j = 0; j < quad.theta_nodes; ++j) {
    const double theta = double(j) / quad.theta_nodes;
    const Matrix u1 = y1 * x1.value(theta), du1 = y1 * x1.derivative(theta);
    const Matrix v2 = y2 * x2.value(theta), dv2 = y2 * x2.derivative(theta);
    const GroupPoint g1 = exp_alg(AlgebraVector::project(u1));
    const AlgebraVector dtheta1 = AlgebraVector::project(dexp_left(u1, du1));
    for (const auto& node : rule.nodes) {
      const double t = node.collapsed[0];
      const NervePoint p({g1, exp_alg(AlgebraVector::project(t * v2))});
      const std::vector<TangentFrame> frames{
          TangentFrame({dtheta1, AlgebraVector::project(dexp_left(t * v2, t * dv2))}),
          TangentFrame({AlgebraVector(4), AlgebraVector::project(v2)})};
      total += node.weight * e22.call(p, frames);
    }
  }
  return total / quad.theta_nodes;
}

/// a = int_{S^1} int_{Delta^2} f_{1,2}^* E_{1,3} with fiber directions first.
/// Product uses exp((1 - t_0) y1 xi1) exp(t_2 y2 xi2) with analytic tangents;
/// Cone uses the cone contraction with finite-difference tangents.
inline double a_functional(double y1, const LoopAlgebraElement& x1, double y2, const LoopAlgebraElement& x2,
                           ContractionKind kind = ContractionKind::Product, const LoopQuadrature& quad = {}) {
  static const FormEvaluator e13 = builtin_cocycle(4).component({1, 3}).form;
  const QuadratureRule rule = quadrature_rule(2, quad.simplex_order);
  double total = 0.0;
  for (int j = 0; j < quad.theta_nodes; ++j) {
    const double theta = double(j) / quad.theta_nodes;
    const Matrix u1 = y1 * x1.value(theta), du1 = y1 * x1.derivative(theta);
    const Matrix v2 = y2 * x2.value(theta), dv2 = y2 * x2.derivative(theta);
    for (const auto& node : rule.nodes) {
      const double s1 = node.collapsed[0], s2 = node.collapsed[1];
      std::vector<TangentFrame> frames;
      NervePoint p;
      if (kind == ContractionKind::Product) {
        // A = exp(u), B = exp(w); left-trivialized d(AB) = Ad(B^-1) dexp(u)[du] + dexp(w)[dw]
        const Matrix u = s1 * u1, w = s1 * s2 * v2;
        const GroupPoint a = exp_alg(AlgebraVector::project(u));
        const GroupPoint b = exp_alg(AlgebraVector::project(w));
        const Matrix binv = b.matrix().transpose();
        auto tangent = [&](const Matrix& du, const Matrix& dw) {
          return TangentFrame({AlgebraVector::project(binv * dexp_left(u, du) * b.matrix() + dexp_left(w, dw))});
        };
        p = NervePoint({a * b});
        frames = {tangent(u1, s2 * v2), tangent(Matrix::Zero(4, 4), s1 * v2), tangent(s1 * du1, s1 * s2 * dv2)};
      } else {
        auto hs_at = [&](double th) {
          return std::vector<GroupPoint>{exp_alg(AlgebraVector::project(y1 * x1.value(th))),
                                         exp_alg(AlgebraVector::project(y2 * x2.value(th)))};
        };
        const auto hs = hs_at(theta);
        auto curve = [&](int slot) {
          return [&, slot](double e) {
            std::vector<double> s{s1, s2};
            if (slot < 2) {
              s[slot] += e;
              return sigma_collapsed(kind, s, hs).matrix();
            }
            return sigma_collapsed(kind, s, hs_at(theta + e)).matrix();
          };
        };
        p = NervePoint({sigma_collapsed(kind, std::vector<double>{s1, s2}, hs)});
        for (int slot = 0; slot < 3; ++slot) frames.push_back(TangentFrame({curve_tangent(curve(slot), 0.0)}));
      }
      total += node.weight / node.jacobian * e13.call(p, frames);
    }
  }
  return total / quad.theta_nodes;
}

/// Mixed partial d^2 F / dy1 dy2 at 0: 4-point stencil with one Richardson level.
inline double mixed_partial(const std::function<double(double, double)>& f, double step = 1e-3) {
  auto stencil = [&](double h) { return (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h); };
  return (4.0 * stencil(step / 2) - stencil(step)) / 3.0;
}

/// phi(c)(xi1, xi2) = d^2/dy1 dy2 [c(exp(y1 xi1), exp(y2 xi2)) - c(exp(y2 xi2), exp(y1 xi1))] at 0.
inline double brylinski_phi2(const PathFunctional& c, const LoopAlgebraElement& x1, const LoopAlgebraElement& x2, double step = 1e-3) {
  return mixed_partial([&](double y1, double y2) { return c(y1, x1, y2, x2) - c(y2, x2, y1, x1); }, step);
}

/// -1/(128 pi^2) sum sgn(tau) int (xi1')(xi2) dtheta: the expected value of the mixed partial of b.
inline double b_closed_form(const LoopAlgebraElement& x1, const LoopAlgebraElement& x2) { return alpha_half(x1, x2); }

// ---------------------------------------------------------------------------
// Report

struct LoopCocycleReport {
  int trials = 0;
  int max_freq = 0;
  double ad_invariance = 0.0;
  double symmetry = 0.0;
  double cocycle_residual = 0.0;
  double worked_example_error = 0.0;
  double trapezoid_drift = 0.0;
  double b_mixed = 0.0;
  double b_closed = 0.0;
  double b_error = 0.0;
  double phi_a = 0.0;
  double phi_a_cone = 0.0;
  double phi_ab = 0.0;
  double alpha_value = 0.0;
  double phi_ab_error = 0.0;
  double coboundary_error = 0.0;

  double b_ratio() const { return b_mixed / b_closed; }

  nlohmann::json to_json() const {
    return {{"trials", trials},
            {"max_freq", max_freq},
            {"ad_invariance", ad_invariance},
            {"symmetry", symmetry},
            {"cocycle_residual", cocycle_residual},
            {"worked_example_error", worked_example_error},
            {"trapezoid_drift", trapezoid_drift},
            {"b_mixed_partial", b_mixed},
            {"b_closed_form", b_closed},
            {"b_ratio", b_ratio()},
            {"b_error", b_error},
            {"phi_a", phi_a},
            {"phi_a_cone", phi_a_cone},
            {"phi_a_plus_b", phi_ab},
            {"alpha", alpha_value},
            {"phi_a_plus_b_error", phi_ab_error},
            {"coboundary_error", coboundary_error}};
  }
};

/// E_{12} + E_{34} as a skew matrix.
inline AlgebraVector loop_example_direction() {
  Matrix x = Matrix::Zero(4, 4);
  x(0, 1) = 1.0;
  x(1, 0) = -1.0;
  x(2, 3) = 1.0;
  x(3, 2) = -1.0;
  return AlgebraVector::from_matrix(x);
}

inline LoopAlgebraElement loop_example_cos() {
  LoopAlgebraElement l(4, 1);
  l.add_cos(1, loop_example_direction());
  return l;
}

inline LoopAlgebraElement loop_example_sin() {
  LoopAlgebraElement l(4, 1);
  l.add_sin(1, loop_example_direction());
  return l;
}

/// phi(delta c) against d(phi c) for the one-argument cochain c(h) = tr(M h):
/// both sides equal -tr(M [xi1, xi2]).
inline double coboundary_check(const Matrix& weight, const AlgebraVector& x1, const AlgebraVector& x2, double step = 1e-3) {
  auto c = [&](const GroupPoint& h) { return (weight * h.matrix()).trace(); };
  const PathFunctional delta_c = [&](double y1, const LoopAlgebraElement& l1, double y2, const LoopAlgebraElement& l2) {
    const GroupPoint g1 = exp_alg(AlgebraVector::project(y1 * l1.value(0.0)));
    const GroupPoint g2 = exp_alg(AlgebraVector::project(y2 * l2.value(0.0)));
    return c(g2) - c(g1 * g2) + c(g1);
  };
  const double lhs = brylinski_phi2(delta_c, LoopAlgebraElement::constant(x1), LoopAlgebraElement::constant(x2), step);
  const double rhs = -(weight * bracket(x1, x2).matrix()).trace();
  return std::abs(lhs - rhs);
}

struct LoopCheckOptions {
  int trials = 20;
  int max_freq = 3;
  std::uint64_t seed = 0;
  double step = 1e-3;
  double loop_scale = 0.5;
  bool include_cone = true;
  LoopQuadrature quad;
};

inline LoopCocycleReport loop_cocycle_check(const LoopCheckOptions& opt) {
  LoopCocycleReport r;
  r.trials = opt.trials;
  r.max_freq = opt.max_freq;
  Rng rng(derive_seed(opt.seed, 0));
  std::uniform_int_distribution<int> freq(0, opt.max_freq);
  for (int i = 0; i < opt.trials; ++i) {
    const auto z = sample_algebra(4, rng), x = sample_algebra(4, rng), y = sample_algebra(4, rng);
    r.ad_invariance = std::max(r.ad_invariance, std::abs(pf_pairing(bracket(z, x), y) + pf_pairing(x, bracket(z, y))));
    r.symmetry = std::max(r.symmetry, std::abs(pf_pairing(x, y) - pf_pairing(y, x)));

    const auto l1 = LoopAlgebraElement::random(4, freq(rng), rng);
    const auto l2 = LoopAlgebraElement::random(4, freq(rng), rng);
    const auto l3 = LoopAlgebraElement::random(4, freq(rng), rng);
    r.cocycle_residual = std::max(r.cocycle_residual, std::abs(cocycle_residual(l1, l2, l3)));
    const int base = trapezoid_nodes(l1, l2);
    r.trapezoid_drift = std::max(r.trapezoid_drift, std::abs(alpha(l1, l2, base) - alpha(l1, l2, 2 * base)));
  }
  r.worked_example_error = std::abs(alpha(loop_example_cos(), loop_example_sin()) - 1.0 / (8.0 * M_PI));

  Rng prng(derive_seed(opt.seed, 1));
  const auto x1 = LoopAlgebraElement::random(4, std::min(opt.max_freq, 2), prng, opt.loop_scale);
  const auto x2 = LoopAlgebraElement::random(4, std::min(opt.max_freq, 2), prng, opt.loop_scale);
  const LoopQuadrature quad = opt.quad;
  const PathFunctional b = [&](double y1, const LoopAlgebraElement& l1, double y2, const LoopAlgebraElement& l2) {
    return b_functional(y1, l1, y2, l2, quad);
  };
  const PathFunctional a = [&](double y1, const LoopAlgebraElement& l1, double y2, const LoopAlgebraElement& l2) {
    return a_functional(y1, l1, y2, l2, ContractionKind::Product, quad);
  };
  r.b_mixed = mixed_partial([&](double y1, double y2) { return b(y1, x1, y2, x2); }, opt.step);
  r.b_closed = b_closed_form(x1, x2);
  r.b_error = std::abs(r.b_mixed - r.b_closed);
  r.phi_a = brylinski_phi2(a, x1, x2, opt.step);
  if (opt.include_cone) {
    const PathFunctional a_cone = [&](double y1, const LoopAlgebraElement& l1, double y2, const LoopAlgebraElement& l2) {
      return a_functional(y1, l1, y2, l2, ContractionKind::Cone, quad);
    };
    r.phi_a_cone = brylinski_phi2(a_cone, x1, x2, opt.step);
  }
  r.phi_ab = r.phi_a + brylinski_phi2(b, x1, x2, opt.step);
  r.alpha_value = alpha(x1, x2);
  r.phi_ab_error = std::abs(r.phi_ab - r.alpha_value);

  Matrix weight(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) weight(i, j) = std::normal_distribution<double>(0.0, 1.0)(prng);
  r.coboundary_error = coboundary_check(weight, sample_algebra(4, prng), sample_algebra(4, prng), opt.step);
  return r;
}

}  // namespace nerve_euler
