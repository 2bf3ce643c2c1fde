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

// Reference computations used only by the tests. None of them call into the
// library's numerical paths; they are slow and written for clarity.

#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace oracle {

using Matrix = Eigen::MatrixXd;

/// exp through the eigendecomposition of the Hermitian matrix i*x; only
/// valid for skew x.
inline Matrix exp_eigen(const Matrix& x) {
  const std::complex<double> i(0.0, 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(i * x.cast<std::complex<double>>());
  const Eigen::MatrixXcd& u = es.eigenvectors();
  Eigen::VectorXcd d(es.eigenvalues().size());
  for (Eigen::Index k = 0; k < d.size(); ++k) d(k) = std::exp(-i * es.eigenvalues()(k));
  return (u * d.asDiagonal() * u.adjoint()).real();
}

inline Matrix rotation2(double angle) {
  Matrix r(2, 2);
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

/// Pfaffian by expansion along the first row.
inline double pfaffian(const Matrix& a) {
  const Eigen::Index n = a.rows();
  if (n == 0) return 1.0;
  if (n % 2) return 0.0;
  double total = 0.0;
  for (Eigen::Index j = 1; j < n; ++j) {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 1; k < n; ++k)
      if (k != j) keep.push_back(k);
    Matrix minor(n - 2, n - 2);
    for (std::size_t r = 0; r < keep.size(); ++r)
      for (std::size_t c = 0; c < keep.size(); ++c) minor(r, c) = a(keep[r], keep[c]);
    const double sign = (j % 2) ? 1.0 : -1.0;
    total += sign * a(0, j) * pfaffian(minor);
  }
  return total;
}

/// sum_{tau in S_2p} sgn(tau) prod_k A_k(tau(2k-1), tau(2k)) by recursive
/// enumeration with an explicit inversion count.
inline double brute_contract(const std::vector<Matrix>& factors) {
  const int m = 2 * static_cast<int>(factors.size());
  std::vector<int> perm;
  std::vector<bool> used(m, false);
  double total = 0.0;
  std::function<void()> rec = [&] {
    if (static_cast<int>(perm.size()) == m) {
      int inversions = 0;
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) inversions += perm[i] > perm[j];
      double term = (inversions % 2) ? -1.0 : 1.0;
      for (std::size_t k = 0; k < factors.size(); ++k) term *= factors[k](perm[2 * k], perm[2 * k + 1]);
      total += term;
      return;
    }
    for (int v = 0; v < m; ++v) {
      if (used[v]) continue;
      used[v] = true;
      perm.push_back(v);
      rec();
      perm.pop_back();
      used[v] = false;
    }
  };
  rec();
  return total;
}

/// Dirichlet integral via iterated Beta functions (gamma functions, not factorials).
inline double dirichlet(const std::vector<int>& a) {
  // int over the simplex of prod t_i^{a_i} = prod Gamma(a_i+1) / Gamma(q + 1 + sum a_i)
  double log_num = 0.0;
  int sum = 0;
  for (int e : a) {
    log_num += std::lgamma(e + 1.0);
    sum += e;
  }
  const int q = static_cast<int>(a.size()) - 1;
  return std::exp(log_num - std::lgamma(q + 1.0 + sum));
}

/// Left-trivialized derivative g(0)^{-1} g'(0) of a matrix curve, plain
/// five-point stencil.
inline Matrix left_velocity(const std::function<Matrix(double)>& curve, double h = 1e-3) {
  const Matrix d = (-curve(2 * h) + 8.0 * curve(h) - 8.0 * curve(-h) + curve(-2 * h)) / (12.0 * h);
  return curve(0.0).transpose() * d;
}

/// Five-point derivative of a scalar function at 0.
inline double derivative(const std::function<double(double)>& f, double h = 1e-3) {
  return (-f(2 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2 * h)) / (12.0 * h);
}

}  // namespace oracle
