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
 * @file simplex.hpp
 * @brief Integration over the standard simplex
 *   Delta^q = { (t_0, ..., t_q) : t_i >= 0, sum t_i = 1 },
 * parametrized by (t_1, ..., t_q) with t_0 = 1 - sum_{i>=1} t_i.
 *
 * Exact integrals of barycentric monomials use the Dirichlet formula
 *   int t_0^{a_0} ... t_q^{a_q} dt_1 ... dt_q = (prod a_i!) / (q + sum a_i)!.
 *
 * Numerical rules use collapsed (Duffy) coordinates s in [0,1]^q:
 *   t_0 = 1 - s_1,  (t_1, ..., t_q) = s_1 * w,  w = collapse(s_2, ..., s_q) in Delta^{q-1},
 * with Gauss-Jacobi points in each s_k absorbing the Jacobian s_1^{q-1} s_2^{q-2} ...
 * A rule of a given order integrates every polynomial of total degree
 * <= 2 order - 1 exactly. The radial coordinate s_1 = 1 - t_0 puts the vertex
 * t_0 = 1 at s_1 = 0, which keeps cone-type integrands smooth.
 */

#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <Eigen/Dense>

namespace nerve_euler {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Exponents (a_0, ..., a_q) of t_0^{a_0} ... t_q^{a_q}; q = size - 1.
struct MonomialExponent {
  std::vector<int> exponents;

  int dimension() const { return static_cast<int>(exponents.size()) - 1; }
  int total_degree() const { return std::accumulate(exponents.begin(), exponents.end(), 0); }

  double evaluate(std::span<const double> barycentric) const {
    double v = 1.0;
    for (std::size_t i = 0; i < exponents.size(); ++i) v *= std::pow(barycentric[i], exponents[i]);
    return v;
  }
};

inline BigInt factorial(int n) {
  BigInt f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

inline BigInt binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  return factorial(n) / (factorial(k) * factorial(n - k));
}

inline Rational monomial_integral(const MonomialExponent& m) {
  if (m.exponents.empty()) throw std::invalid_argument("monomial_integral: empty exponent vector");
  BigInt numerator = 1;
  for (int a : m.exponents) {
    if (a < 0) throw std::invalid_argument("monomial_integral: negative exponent");
    numerator *= factorial(a);
  }
  return Rational(numerator, factorial(m.dimension() + m.total_degree()));
}

/// One-dimensional rule on [0,1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Jacobi rule for the weight s^beta on [0,1] (Golub-Welsch).
/// beta = 0 gives Gauss-Legendre.
inline GaussRule gauss_jacobi(int points, double beta) {
  if (points < 1) throw std::invalid_argument("gauss_jacobi: need at least one point");
  const double alpha = 0.0;
  const double ab = alpha + beta;
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(points, points);
  for (int k = 0; k < points; ++k) {
    const double two_k = 2.0 * k + ab;
    jacobi(k, k) = (k == 0) ? (beta - alpha) / (ab + 2.0) : (beta * beta - alpha * alpha) / (two_k * (two_k + 2.0));
    if (k + 1 < points) {
      const double n = k + 1.0;
      const double t = 2.0 * n + ab;
      const double b = 4.0 * n * (n + alpha) * (n + beta) * (n + ab) / (t * t * (t + 1.0) * (t - 1.0));
      jacobi(k, k + 1) = jacobi(k + 1, k) = std::sqrt(b);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  const double mass = 1.0 / (beta + 1.0);  // int_0^1 s^beta ds
  GaussRule rule;
  for (int i = 0; i < points; ++i) {
    rule.nodes.push_back(0.5 * (1.0 + es.eigenvalues()(i)));
    const double v = es.eigenvectors()(0, i);
    rule.weights.push_back(mass * v * v);
  }
  return rule;
}

/// Barycentric point (t_0, ..., t_q) for collapsed coordinates (s_1, ..., s_q).
inline std::vector<double> collapsed_to_barycentric(std::span<const double> s) {
  if (s.empty()) return {1.0};
  const auto inner = collapsed_to_barycentric(s.subspan(1));
  std::vector<double> t{1.0 - s[0]};
  for (double w : inner) t.push_back(s[0] * w);
  return t;
}

/// det d(t_1..t_q)/d(s_1..s_q) = prod_k s_k^{q-k}; positive on the open cube.
inline double collapsed_jacobian(std::span<const double> s) {
  const int q = static_cast<int>(s.size());
  double j = 1.0;
  for (int k = 0; k < q; ++k) j *= std::pow(s[k], q - 1 - k);
  return j;
}

struct QuadratureNode {
  std::vector<double> barycentric;  // (t_0, ..., t_q)
  std::vector<double> collapsed;    // (s_1, ..., s_q)
  double weight = 0.0;              // includes the Jacobian
  double jacobian = 1.0;            // collapsed_jacobian(collapsed)
};

struct QuadratureRule {
  int dimension = 0;
  int order = 0;
  std::vector<QuadratureNode> nodes;

  /// sum_i w_i f(t_i) ~ int_{Delta^q} f dt_1 ... dt_q.
  double integrate(const std::function<double(std::span<const double>)>& f) const {
    double total = 0.0;
    for (const auto& node : nodes) total += node.weight * f(node.barycentric);
    return total;
  }

  double volume() const {
    double v = 0.0;
    for (const auto& node : nodes) v += node.weight;
    return v;
  }
};

inline QuadratureRule quadrature_rule(int q, int order) {
  if (q < 1) throw std::invalid_argument("quadrature_rule: dimension must be >= 1");
  if (order < 1) throw std::invalid_argument("quadrature_rule: order must be >= 1");
  std::vector<GaussRule> axes;
  for (int k = 0; k < q; ++k) axes.push_back(gauss_jacobi(order, static_cast<double>(q - 1 - k)));

  QuadratureRule rule;
  rule.dimension = q;
  rule.order = order;
  std::vector<int> index(static_cast<std::size_t>(q), 0);
  while (true) {
    QuadratureNode node;
    node.weight = 1.0;
    for (int k = 0; k < q; ++k) {
      node.collapsed.push_back(axes[k].nodes[index[k]]);
      node.weight *= axes[k].weights[index[k]];
    }
    node.barycentric = collapsed_to_barycentric(node.collapsed);
    node.jacobian = collapsed_jacobian(node.collapsed);
    rule.nodes.push_back(std::move(node));

    int k = q - 1;
    while (k >= 0 && ++index[k] == order) index[k--] = 0;
    if (k < 0) break;
  }
  return rule;
}

}  // namespace nerve_euler
