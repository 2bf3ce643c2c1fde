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

#include <nerve_euler/forms.hpp>

#include "oracles.hpp"

using namespace nerve_euler;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

using G = MatrixGenerator;

NervePoint haar_point(int level, int n, Rng& rng) {
  std::vector<GroupPoint> c;
  for (int k = 0; k < level; ++k) c.push_back(sample_haar(n, rng));
  return NervePoint(std::move(c));
}

NervePoint near_point(int level, int n, double radius, Rng& rng) {
  std::vector<GroupPoint> c;
  for (int k = 0; k < level; ++k) c.push_back(sample_near_identity(n, radius, rng));
  return NervePoint(std::move(c));
}

std::vector<TangentFrame> frames(int count, int level, int n, Rng& rng) {
  std::vector<TangentFrame> out;
  for (int i = 0; i < count; ++i) {
    std::vector<AlgebraVector> c;
    for (int k = 0; k < level; ++k) c.push_back(sample_algebra(n, rng));
    out.emplace_back(std::move(c));
  }
  return out;
}

/// Random generator available at the given level.
G random_generator(int level, Rng& rng) {
  std::uniform_int_distribution<int> kind(0, 4);
  std::uniform_int_distribution<int> idx(1, level);
  switch (kind(rng)) {
    case 0: return G::lmc(idx(rng));
    case 1: return G::rmc(idx(rng));
    case 2: return G::phi(idx(rng));
    case 3: {
      const int j = std::uniform_int_distribution<int>(2, level + 1)(rng);
      return G::sum_phi(std::uniform_int_distribution<int>(1, j - 1)(rng), j);
    }
    default: {
      const int s = idx(rng);
      return G::conj(std::uniform_int_distribution<int>(1, s)(rng), s);
    }
  }
}

WordForm random_word(int level, int n, int degree, Rng& rng) {
  WordForm w;
  w.level = level;
  std::uniform_int_distribution<int> entry(0, n - 1);
  std::bernoulli_distribution two(0.5);
  int d = 0;
  while (d < degree) {
    const bool square = (degree - d >= 2) && two(rng);
    FormFactor f = square ? FormFactor::product(random_generator(level, rng), random_generator(level, rng))
                          : FormFactor::single(random_generator(level, rng));
    w.factors.push_back({f, entry(rng), entry(rng)});
    d += f.degree();
  }
  return w;
}

}  // namespace

TEST_CASE("generator values", "[forms]") {
  Rng rng(31);
  const int n = 4;
  const auto p = haar_point(2, n, rng);
  const auto v = frames(1, 2, n, rng)[0];

  CHECK((generator_value(G::lmc(1), p, v).matrix() - v[0].matrix()).cwiseAbs().maxCoeff() == 0.0);

  const NervePoint id({GroupPoint::identity(n), GroupPoint::identity(n)});
  CHECK((generator_value(G::rmc(2), id, v).matrix() - v[1].matrix()).cwiseAbs().maxCoeff() < 1e-15);

  // PHI(2) on (0, xi_2): chain rule through h_1 dh_2 h_2^{-1} h_1^{-1}.
  TangentFrame only2({AlgebraVector(n), v[1]});
  const Matrix h1 = p[0].matrix();
  const Matrix h2 = p[1].matrix();
  const Matrix dh2 = h2 * oracle::left_velocity([&](double t) { return Matrix(h2 * oracle::exp_eigen(t * v[1].matrix())); });
  const Matrix expected = h1 * dh2 * h2.transpose() * h1.transpose();
  CHECK((generator_value(G::phi(2), p, only2).matrix() - expected).cwiseAbs().maxCoeff() < 1e-9);

  // SUMPHI(1,3) = PHI(1) + PHI(2); CONJ(1,s) = PHI(s); CONJ(k,k) = RMC(k).
  const Matrix sum = generator_value(G::phi(1), p, v).matrix() + generator_value(G::phi(2), p, v).matrix();
  CHECK((generator_value(G::sum_phi(1, 3), p, v).matrix() - sum).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((generator_value(G::conj(1, 2), p, v).matrix() - generator_value(G::phi(2), p, v).matrix()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((generator_value(G::conj(2, 2), p, v).matrix() - generator_value(G::rmc(2), p, v).matrix()).cwiseAbs().maxCoeff() < 1e-14);

  CHECK_THROWS_AS(generator_value(G::lmc(3), p, v), std::invalid_argument);
  CHECK_THROWS_AS(G::sum_phi(2, 2), std::invalid_argument);
}

TEST_CASE("word evaluation basics", "[forms]") {
  Rng rng(32);
  const int n = 4;
  const auto p = haar_point(1, n, rng);
  const auto v = frames(2, 1, n, rng);

  WordForm single{1, {{FormFactor::single(G::lmc(1)), 0, 1}}, 1.0};
  CHECK(evaluate_word(single, p, std::span(v).first(1)) == v[0][0](0, 1));
  CHECK_THROWS_AS(evaluate_word(single, p, v), std::invalid_argument);

  // (theta^2)_{ab}(X, Y) = [X, Y]_{ab}
  WordForm sq{1, {{FormFactor::square(G::lmc(1)), 1, 2}}, 1.0};
  CHECK_THAT(evaluate_word(sq, p, v), WithinAbs(bracket(v[0][0], v[1][0])(1, 2), 1e-15));
}

TEST_CASE("the SO(2) Euler form on a rotation", "[forms]") {
  const auto p = NervePoint({GroupPoint::from_matrix(oracle::rotation2(0.7))});
  const double c = 1.9;
  Matrix j(2, 2);
  j << 0, -1, 1, 0;
  const std::vector<TangentFrame> v{TangentFrame({AlgebraVector::from_matrix(c * j)})};
  WordForm a{1, {{FormFactor::single(G::lmc(1)), 0, 1}}, -1.0 / (4 * M_PI)};
  WordForm b{1, {{FormFactor::single(G::lmc(1)), 1, 0}}, 1.0 / (4 * M_PI)};
  CHECK_THAT(evaluate_word(a, p, v) + evaluate_word(b, p, v), WithinAbs(c / (2 * M_PI), 1e-15));
}

TEST_CASE("words are exactly alternating and multilinear", "[forms]") {
  Rng rng(33);
  const int n = 6;
  for (int degree = 2; degree <= 5; ++degree) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto w = random_word(2, n, degree, rng);
      const auto p = haar_point(2, n, rng);
      auto v = frames(degree, 2, n, rng);
      const double base = evaluate_word(w, p, v);
      auto swapped = v;
      std::swap(swapped[0], swapped[degree - 1]);
      // Exact up to the reordering of the floating-point sum.
      CHECK_THAT(evaluate_word(w, p, swapped), WithinAbs(-base, 1e-14 * (1.0 + std::abs(base))));
      auto scaled = v;
      scaled[1] *= 2.0;  // powers of two keep the arithmetic exact
      CHECK(evaluate_word(w, p, scaled) == 2.0 * base);
    }
  }
}

TEST_CASE("contracted sums equal their entry-level expansion", "[forms]") {
  Rng rng(34);
  const int n = 4;
  const ContractedWord mixed{{FormFactor::product(G::lmc(1), G::rmc(2)), FormFactor::single(G::phi(2))},
                             {Rational(3, 7), 1}};
  const ContractedWord squares{{FormFactor::square(G::lmc(2)), FormFactor::single(G::lmc(1))}, {Rational(-1, 5), 0}};
  const auto fast = contracted_evaluator(2, {mixed, squares});
  REQUIRE(fast.degree() == 3);
  for (int trial = 0; trial < 5; ++trial) {
    const auto p = haar_point(2, n, rng);
    const auto v = frames(3, 2, n, rng);
    double slow = 0.0;
    for (const auto& cw : {mixed, squares})
      for (const auto& w : expand_contracted(cw, 2)) slow += evaluate_word(w, p, v);
    CHECK_THAT(fast(p, v), WithinAbs(slow, 1e-12));
  }
  CHECK_THROWS_AS(contracted_evaluator(1, {mixed}), std::invalid_argument);
}

TEST_CASE("exterior derivative of a constant vanishes", "[forms]") {
  Rng rng(35);
  const FormEvaluator c(1, 0, [](const NervePoint&, std::span<const TangentFrame>) { return 3.5; });
  const auto dc = exterior_derivative(c);
  const auto p = haar_point(1, 4, rng);
  const auto v = frames(1, 1, 4, rng);
  CHECK(std::abs(dc(p, v)) < 1e-10);
}

TEST_CASE("Maurer-Cartan structure equations", "[forms]") {
  Rng rng(36);
  const int n = 4;
  const auto p = haar_point(1, n, rng);
  const auto v = frames(2, 1, n, rng);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const auto left = word_evaluator({1, {{FormFactor::single(G::lmc(1)), a, b}}, 1.0});
      const auto left_sq = word_evaluator({1, {{FormFactor::square(G::lmc(1)), a, b}}, 1.0});
      CHECK(std::abs(exterior_derivative(left)(p, v) + left_sq(p, v)) < 1e-7);
      const auto right = word_evaluator({1, {{FormFactor::single(G::rmc(1)), a, b}}, 1.0});
      const auto right_sq = word_evaluator({1, {{FormFactor::square(G::rmc(1)), a, b}}, 1.0});
      CHECK(std::abs(exterior_derivative(right)(p, v) - right_sq(p, v)) < 1e-7);
    }
  }
}

TEST_CASE("d of d vanishes on random words", "[forms]") {
  Rng rng(37);
  const int n = 4;
  for (int degree = 1; degree <= 2; ++degree) {
    for (int trial = 0; trial < 3; ++trial) {
      const auto w = word_evaluator(random_word(2, n, degree, rng));
      const auto dd = exterior_derivative(exterior_derivative(w));
      const auto p = near_point(2, n, 0.5, rng);
      const auto v = frames(degree + 2, 2, n, rng);
      CHECK(std::abs(dd(p, v)) < 1e-5);
    }
  }
}

TEST_CASE("evaluator combinators and validation", "[forms]") {
  Rng rng(38);
  const auto w = word_evaluator({1, {{FormFactor::single(G::lmc(1)), 0, 1}}, 1.0});
  const auto p = haar_point(1, 4, rng);
  const auto v = frames(1, 1, 4, rng);
  CHECK_THAT((w + 2.0 * w)(p, v), WithinRel(3.0 * w(p, v), 1e-15));
  CHECK((w - w)(p, v) == 0.0);
  CHECK_THROWS_AS(w(haar_point(2, 4, rng), frames(1, 2, 4, rng)), std::invalid_argument);
  CHECK_THROWS_AS(w + zero_form(1, 2), std::invalid_argument);
}
