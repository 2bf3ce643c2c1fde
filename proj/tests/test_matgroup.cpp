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

#include <catch_amalgamated.hpp>

#include <nerve_euler/matgroup.hpp>

#include "oracles.hpp"

using namespace nerve_euler;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::ContainsSubstring;

namespace {

Matrix planar_j() {
  Matrix j(2, 2);
  j << 0, -1, 1, 0;
  return j;
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("exp of zero and of a half turn", "[matgroup]") {
  CHECK(max_abs(exp_alg(AlgebraVector(4)).matrix() - Matrix::Identity(4, 4)) == 0.0);
  const auto half_turn = exp_alg(AlgebraVector::from_matrix(M_PI * planar_j()));
  CHECK(max_abs(half_turn.matrix() + Matrix::Identity(2, 2)) < 1e-14);
}

TEST_CASE("exp agrees with the eigendecomposition oracle", "[matgroup]") {
  Rng rng(11);
  for (int n : {2, 4, 6}) {
    for (int trial = 0; trial < 20; ++trial) {
      AlgebraVector xi = sample_algebra(n, rng);
      xi *= 1.0 / std::max(1.0, xi.spectral_norm());
      const Matrix g = exp_alg(xi).matrix();
      CHECK(max_abs(g.transpose() * g - Matrix::Identity(n, n)) < 1e-12);
      CHECK(g.determinant() > 0.0);
      CHECK(max_abs(g - oracle::exp_eigen(xi.matrix())) < 1e-12);
    }
  }
}

TEST_CASE("log of identity and planar rotation", "[matgroup]") {
  CHECK(max_abs(log_grp(GroupPoint::identity(4)).matrix()) == 0.0);
  const auto rot = GroupPoint::from_matrix(oracle::rotation2(0.3));
  CHECK(max_abs(log_grp(rot).matrix() - 0.3 * planar_j()) < 1e-14);
}

TEST_CASE("log inverts exp inside the principal domain", "[matgroup]") {
  Rng rng(12);
  for (int n : {2, 4, 6}) {
    for (int trial = 0; trial < 20; ++trial) {
      AlgebraVector xi = sample_algebra(n, rng);
      xi *= (3.0 * trial / 20.0 + 0.05) / xi.spectral_norm();  // norms up to ~3.05 < pi - margin
      const AlgebraVector back = log_grp(exp_alg(xi));
      CHECK(max_abs(back.matrix() - xi.matrix()) < 1e-10);
      CHECK(max_abs(exp_alg(back).matrix() - exp_alg(xi).matrix()) < 1e-10);
    }
  }
}

TEST_CASE("log rejects rotations by pi", "[matgroup]") {
  Matrix g = Matrix::Identity(4, 4);
  g.topLeftCorner(2, 2) = oracle::rotation2(M_PI);
  CHECK_THROWS_AS(log_grp(GroupPoint::from_matrix(g)), DomainError);
  Matrix near = Matrix::Identity(4, 4);
  near.bottomRightCorner(2, 2) = oracle::rotation2(M_PI - 1e-8);
  CHECK_THROWS_AS(log_grp(GroupPoint::from_matrix(near)), DomainError);
}

TEST_CASE("validation names the offending entry", "[matgroup]") {
  Matrix m = Matrix::Zero(4, 4);
  m(1, 2) = 1.0;
  CHECK_THROWS_WITH(AlgebraVector::from_matrix(m), ContainsSubstring("(2,3)"));
  Matrix g = Matrix::Identity(3, 3);
  g(2, 0) = 0.5;
  CHECK_THROWS_WITH(GroupPoint::from_matrix(g), ContainsSubstring("not orthogonal"));
  Matrix reflection = Matrix::Identity(2, 2);
  reflection(0, 0) = -1.0;
  CHECK_THROWS_WITH(GroupPoint::from_matrix(reflection), ContainsSubstring("determinant"));
}

TEST_CASE("adjoint and bracket", "[matgroup]") {
  Rng rng(13);
  const int n = 6;
  const auto xi = sample_algebra(n, rng);
  const auto eta = sample_algebra(n, rng);
  const auto zeta = sample_algebra(n, rng);
  const auto g = sample_haar(n, rng);

  CHECK(max_abs(adjoint(GroupPoint::identity(n), xi).matrix() - xi.matrix()) == 0.0);
  CHECK(max_abs(adjoint(g, bracket(xi, eta)).matrix() - bracket(adjoint(g, xi), adjoint(g, eta)).matrix()) < 1e-12);
  CHECK_THAT(adjoint(g, xi).matrix().norm(), WithinAbs(xi.matrix().norm(), 1e-12));
  CHECK(max_abs(bracket(xi, xi).matrix()) == 0.0);

  const auto jacobi = bracket(xi, bracket(eta, zeta)) + bracket(eta, bracket(zeta, xi)) + bracket(zeta, bracket(xi, eta));
  CHECK(max_abs(jacobi.matrix()) < 1e-13);

  // [E12, E23] = E13
  CHECK(max_abs(bracket(AlgebraVector::unit(4, 1, 2), AlgebraVector::unit(4, 2, 3)).matrix() -
                AlgebraVector::unit(4, 1, 3).matrix()) == 0.0);

  Rng rng2(14);
  const auto g2 = sample_haar(2, rng2);
  const auto x2 = sample_algebra(2, rng2);
  CHECK(max_abs(adjoint(g2, x2).matrix() - x2.matrix()) < 1e-15);
}

TEST_CASE("left-trivialized dexp matches finite differences", "[matgroup]") {
  Rng rng(15);
  const auto x = sample_algebra(4, rng, 0.7);
  const auto y = sample_algebra(4, rng);
  const Matrix fd =
      oracle::left_velocity([&](double t) { return oracle::exp_eigen(x.matrix() + t * y.matrix()); });
  CHECK(max_abs(dexp_left(x.matrix(), y.matrix()) - fd) < 1e-9);
}

TEST_CASE("Haar sampling", "[matgroup]") {
  Rng a(99), b(99);
  for (int n : {2, 4, 6}) {
    const Matrix ga = sample_haar(n, a).matrix();
    const Matrix gb = sample_haar(n, b).matrix();
    CHECK(ga == gb);
    CHECK(max_abs(ga.transpose() * ga - Matrix::Identity(n, n)) < 1e-12);
    CHECK(ga.determinant() > 0.0);
  }
  CHECK_THROWS_AS(sample_haar(3, a), std::invalid_argument);

  Rng rng(derive_seed(7, 3));
  double trace_sum = 0.0;
  const int count = 10000;
  for (int i = 0; i < count; ++i) trace_sum += sample_haar(4, rng).matrix().trace();
  CHECK(std::abs(trace_sum / count) < 0.05);
}

TEST_CASE("near-identity samples stay in the log domain", "[matgroup]") {
  Rng rng(16);
  CHECK(max_abs(sample_near_identity(4, 0.0, rng).matrix() - Matrix::Identity(4, 4)) == 0.0);
  for (int i = 0; i < 50; ++i) {
    const auto a = sample_near_identity(6, 0.1, rng);
    const auto b = sample_near_identity(6, 0.1, rng);
    const auto c = sample_near_identity(6, 0.1, rng);
    CHECK(log_grp(a).spectral_norm() <= 0.1 + 1e-12);
    CHECK_NOTHROW(log_grp(a * b * c));
  }
}

TEST_CASE("seed derivation and JSON round trip", "[matgroup]") {
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));

  Rng rng(17);
  const auto g = sample_haar(4, rng);
  const nlohmann::json j = g;
  CHECK(max_abs(j.get<GroupPoint>().matrix() - g.matrix()) == 0.0);
  const nlohmann::json bad = nlohmann::json::array({nlohmann::json::array({0.0, 1.0}), nlohmann::json::array({1.0, 0.0})});
  CHECK_THROWS_WITH(bad.get<AlgebraVector>(), ContainsSubstring("(1,2)"));
  const nlohmann::json ragged = nlohmann::json::array({nlohmann::json::array({0.0, 1.0}), nlohmann::json::array({1.0})});
  CHECK_THROWS_WITH(matrix_from_json(ragged), ContainsSubstring("row 2"));
}
