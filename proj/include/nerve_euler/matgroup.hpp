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
 * @file matgroup.hpp
 * @brief Numerics for SO(n) and so(n): exponential, principal logarithm,
 * adjoint action, bracket, and random sampling.
 *
 * Tangent vectors are left-trivialized throughout: an AlgebraVector xi
 * attached to a group element h stands for the tangent vector h * xi.
 */

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <nlohmann/json.hpp>

namespace nerve_euler {

using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

/// Raised when an input leaves the domain of a map (e.g. principal log near -1).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace tolerance {
inline constexpr double orthogonality = 1e-12;
inline constexpr double skew = 1e-12;
/// Rotation angles closer than this to +-pi are rejected by the logarithm.
inline constexpr double log_margin = 1e-6;
}  // namespace tolerance

/// Element of so(n): a skew-symmetric matrix.
class AlgebraVector {
 public:
  AlgebraVector() = default;
  explicit AlgebraVector(int n) : m_(Matrix::Zero(n, n)) {}

  /// Skew projection (m - m^T) / 2; always succeeds.
  static AlgebraVector project(const Matrix& m) {
    AlgebraVector v;
    v.m_ = 0.5 * (m - m.transpose());
    return v;
  }

  /// Validates skew symmetry; the error names the first offending entry.
  static AlgebraVector from_matrix(const Matrix& m, double tol = tolerance::skew) {
    if (m.rows() != m.cols()) {
      throw std::invalid_argument("algebra vector must be square, got " +
                                  std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = i; j < m.cols(); ++j) {
        if (std::abs(m(i, j) + m(j, i)) > tol) {
          std::ostringstream msg;
          msg << "matrix is not skew-symmetric: entry (" << i + 1 << "," << j + 1 << ") = " << m(i, j)
              << " but entry (" << j + 1 << "," << i + 1 << ") = " << m(j, i);
          throw std::invalid_argument(msg.str());
        }
      }
    }
    return project(m);
  }

  /// Basis element E_ij = e_i e_j^T - e_j e_i^T (1-based indices).
  static AlgebraVector unit(int n, int i, int j) {
    AlgebraVector v(n);
    v.m_(i - 1, j - 1) = 1.0;
    v.m_(j - 1, i - 1) = -1.0;
    return v;
  }

  const Matrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }

  /// Spectral norm, i.e. the largest rotation angle of exp(*this).
  double spectral_norm() const {
    if (m_.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(m_.transpose() * m_, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  }

  AlgebraVector& operator+=(const AlgebraVector& o) { m_ += o.m_; return *this; }
  AlgebraVector& operator-=(const AlgebraVector& o) { m_ -= o.m_; return *this; }
  AlgebraVector& operator*=(double c) { m_ *= c; return *this; }
  friend AlgebraVector operator+(AlgebraVector a, const AlgebraVector& b) { return a += b; }
  friend AlgebraVector operator-(AlgebraVector a, const AlgebraVector& b) { return a -= b; }
  friend AlgebraVector operator*(double c, AlgebraVector a) { return a *= c; }
  friend AlgebraVector operator*(AlgebraVector a, double c) { return a *= c; }
  friend AlgebraVector operator-(AlgebraVector a) { return a *= -1.0; }

 private:
  Matrix m_;
};

/// Element of SO(n).
class GroupPoint {
 public:
  GroupPoint() = default;

  static GroupPoint identity(int n) { return GroupPoint(Matrix::Identity(n, n)); }

  /// Validates g^T g = I and det g > 0.
  static GroupPoint from_matrix(const Matrix& g, double tol = tolerance::orthogonality) {
    if (g.rows() != g.cols()) {
      throw std::invalid_argument("group element must be square");
    }
    const Matrix defect = g.transpose() * g - Matrix::Identity(g.rows(), g.cols());
    Eigen::Index r = 0, c = 0;
    const double worst = g.size() ? defect.cwiseAbs().maxCoeff(&r, &c) : 0.0;
    if (worst >= tol) {
      std::ostringstream msg;
      msg << "matrix is not orthogonal: (g^T g - I) entry (" << r + 1 << "," << c + 1 << ") = " << defect(r, c);
      throw std::invalid_argument(msg.str());
    }
    if (g.size() && g.determinant() <= 0.0) {
      throw std::invalid_argument("matrix has negative determinant; not in SO(n)");
    }
    return GroupPoint(g);
  }

  /// Wraps a matrix known to be special orthogonal (products, exponentials).
  static GroupPoint trusted(Matrix g) { return GroupPoint(std::move(g)); }

  const Matrix& matrix() const { return g_; }
  int dim() const { return static_cast<int>(g_.rows()); }

  GroupPoint inverse() const { return GroupPoint(g_.transpose()); }

  friend GroupPoint operator*(const GroupPoint& a, const GroupPoint& b) { return GroupPoint(a.g_ * b.g_); }

 private:
  explicit GroupPoint(Matrix g) : g_(std::move(g)) {}
  Matrix g_;
};

/// A point (h_1, ..., h_r) of the nerve level NG(r); level 0 is the empty tuple.
class NervePoint {
 public:
  NervePoint() = default;
  explicit NervePoint(std::vector<GroupPoint> components) : c_(std::move(components)) {
    for (const auto& g : c_) {
      if (g.dim() != c_.front().dim()) {
        throw std::invalid_argument("nerve point components must share the matrix dimension");
      }
    }
  }

  int level() const { return static_cast<int>(c_.size()); }
  const GroupPoint& operator[](int k) const { return c_[k]; }
  const std::vector<GroupPoint>& components() const { return c_; }
  auto begin() const { return c_.begin(); }
  auto end() const { return c_.end(); }

 private:
  std::vector<GroupPoint> c_;
};

/// Left-trivialized tangent vector at a nerve point: component k stands for h_k * xi_k.
class TangentFrame {
 public:
  TangentFrame() = default;
  explicit TangentFrame(std::vector<AlgebraVector> components) : c_(std::move(components)) {}

  static TangentFrame zero(int level, int n) { return TangentFrame(std::vector<AlgebraVector>(level, AlgebraVector(n))); }

  int level() const { return static_cast<int>(c_.size()); }
  const AlgebraVector& operator[](int k) const { return c_[k]; }
  AlgebraVector& operator[](int k) { return c_[k]; }
  const std::vector<AlgebraVector>& components() const { return c_; }

  TangentFrame& operator*=(double c) {
    for (auto& v : c_) v *= c;
    return *this;
  }

 private:
  std::vector<AlgebraVector> c_;
};

// ---------------------------------------------------------------------------
// Core maps

inline Matrix bracket(const Matrix& x, const Matrix& y) { return x * y - y * x; }

inline AlgebraVector bracket(const AlgebraVector& x, const AlgebraVector& y) {
  if (x.dim() != y.dim()) throw std::invalid_argument("bracket: dimension mismatch");
  return AlgebraVector::project(bracket(x.matrix(), y.matrix()));
}

/// Ad(g) xi = g xi g^{-1}.
inline AlgebraVector adjoint(const GroupPoint& g, const AlgebraVector& xi) {
  if (g.dim() != xi.dim()) throw std::invalid_argument("adjoint: dimension mismatch");
  return AlgebraVector::project(g.matrix() * xi.matrix() * g.matrix().transpose());
}

inline GroupPoint exp_alg(const AlgebraVector& xi) {
  if (xi.dim() == 0) return GroupPoint::identity(0);
  return GroupPoint::trusted(xi.matrix().exp());
}

/// Principal logarithm through the real Schur form. Orthogonal matrices are
/// normal, so the Schur factor is block diagonal with 1x1 blocks (+-1) and
/// 2x2 rotation blocks; each block is logged in closed form.
inline AlgebraVector log_grp(const GroupPoint& g, double margin = tolerance::log_margin) {
  const int n = g.dim();
  if (n == 0) return AlgebraVector(0);
  Eigen::RealSchur<Matrix> schur(g.matrix());
  const Matrix& t = schur.matrixT();
  const Matrix& u = schur.matrixU();
  Matrix block_log = Matrix::Zero(n, n);
  const double limit = M_PI - margin;
  int i = 0;
  while (i < n) {
    const bool two_by_two = (i + 1 < n) && t(i + 1, i) != 0.0;
    if (!two_by_two) {
      if (t(i, i) < 0.0) {
        throw DomainError("log_grp: eigenvalue -1 (rotation angle pi) is outside the principal domain");
      }
      ++i;
      continue;
    }
    const double cosine = 0.5 * (t(i, i) + t(i + 1, i + 1));
    const double sine = 0.5 * (t(i + 1, i) - t(i, i + 1));
    const double angle = std::atan2(sine, cosine);
    if (std::abs(angle) > limit) {
      std::ostringstream msg;
      msg << "log_grp: rotation angle " << angle << " is within " << margin << " of +-pi";
      throw DomainError(msg.str());
    }
    block_log(i, i + 1) = -angle;
    block_log(i + 1, i) = angle;
    i += 2;
  }
  return AlgebraVector::project(u * block_log * u.transpose());
}

/// Left-trivialized differential of exp: exp(-x) * D exp(x)[y]
///   = sum_k (-1)^k / (k+1)! ad_x^k (y).
inline Matrix dexp_left(const Matrix& x, const Matrix& y) {
  Matrix term = y;
  Matrix sum = y;
  for (int k = 1; k < 60; ++k) {
    term = (x * term - term * x) * (-1.0 / static_cast<double>(k + 1));
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18 * (1.0 + sum.cwiseAbs().maxCoeff())) break;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Sampling

/// SplitMix64 step; used to derive independent child seeds from a run seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Skew matrix with independent N(0, scale^2) entries above the diagonal.
inline AlgebraVector sample_algebra(int n, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix m = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      m(i, j) = normal(rng);
      m(j, i) = -m(i, j);
    }
  }
  return AlgebraVector::project(m);
}

/// Haar-distributed element of SO(n): QR of a Gaussian matrix with the
/// sign of R's diagonal absorbed, then a fixed reflection when det = -1.
inline GroupPoint sample_haar(int n, Rng& rng) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("sample_haar: n must be even and >= 2");
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix a(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) a(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < n; ++k) {
    if (r(k, k) < 0.0) q.col(k) *= -1.0;
  }
  if (q.determinant() < 0.0) q.col(0) *= -1.0;
  return GroupPoint::trusted(q);
}

/// exp(xi) with a Gaussian direction rescaled so that ||xi||_2 <= radius.
inline GroupPoint sample_near_identity(int n, double radius, Rng& rng) {
  if (radius < 0.0 || radius >= M_PI) throw std::invalid_argument("sample_near_identity: radius must lie in [0, pi)");
  if (radius == 0.0) return GroupPoint::identity(n);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  AlgebraVector xi = sample_algebra(n, rng);
  const double norm = xi.spectral_norm();
  if (norm == 0.0) return GroupPoint::identity(n);
  xi *= radius * uniform(rng) / norm;
  return exp_alg(xi);
}

// ---------------------------------------------------------------------------
// JSON: matrices are arrays of row arrays.

inline nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("matrix JSON must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw std::invalid_argument("matrix JSON row " + std::to_string(i + 1) + " has the wrong length");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) {
        throw std::invalid_argument("matrix JSON entry (" + std::to_string(i + 1) + "," + std::to_string(c + 1) +
                                    ") is not a number");
      }
      m(i, c) = v.get<double>();
    }
  }
  return m;
}

inline void to_json(nlohmann::json& j, const AlgebraVector& v) { j = matrix_to_json(v.matrix()); }
inline void from_json(const nlohmann::json& j, AlgebraVector& v) { v = AlgebraVector::from_matrix(matrix_from_json(j)); }
inline void to_json(nlohmann::json& j, const GroupPoint& g) { j = matrix_to_json(g.matrix()); }
inline void from_json(const nlohmann::json& j, GroupPoint& g) { g = GroupPoint::from_matrix(matrix_from_json(j)); }

}  // namespace nerve_euler
