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

#include <nerve_euler/loopcocycle.hpp>

#include "oracles.hpp"

using namespace nerve_euler;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("Pfaffian pairing", "[loop]") {
  const auto x = loop_example_direction();
  CHECK(pf_pairing(x, x) == 8.0);
  Matrix e12 = Matrix::Zero(4, 4);
  e12(0, 1) = 1;
  e12(1, 0) = -1;
  CHECK(pf_pairing(e12, e12) == 0.0);
  CHECK_THROWS_AS(pf_pairing(Matrix::Zero(3, 3), Matrix::Zero(3, 3)), std::invalid_argument);

  Rng rng(71);
  for (int i = 0; i < 20; ++i) {
    const auto a = sample_algebra(4, rng), b = sample_algebra(4, rng), z = sample_algebra(4, rng);
    CHECK(pf_pairing(a, b) == pf_pairing(b, a));
    CHECK(std::abs(pf_pairing(bracket(z, a), b) + pf_pairing(a, bracket(z, b))) < 1e-12);
    // polarization of the Pfaffian: <A, A> = 8 Pf(A)
    CHECK_THAT(pf_pairing(a, a), WithinAbs(8.0 * oracle::pfaffian(a.matrix()), 1e-12));
  }
}

TEST_CASE("loops: values, derivatives, pointwise bracket", "[loop]") {
  Rng rng(72);
  const auto x = LoopAlgebraElement::random(4, 2, rng);
  const auto y = LoopAlgebraElement::random(4, 3, rng);
  const auto xy = bracket_loop(x, y);
  CHECK(xy.max_freq() == 5);
  for (double theta : {0.0, 0.13, 0.5, 0.77}) {
    CHECK((xy.value(theta) - bracket(x.value(theta), y.value(theta))).cwiseAbs().maxCoeff() < 1e-12);
    for (const auto& [i, j] : {std::pair{0, 1}, std::pair{2, 3}, std::pair{1, 3}}) {
      const double fd = oracle::derivative([&](double t) { return x.value(theta + t)(i, j); });
      CHECK_THAT(fd, WithinAbs(x.derivative(theta)(i, j), 1e-7));
    }
  }
  const auto back = LoopAlgebraElement::from_json(x.to_json());
  CHECK((back.value(0.3) - x.value(0.3)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(x.to_json()["K"] == 2);
}

TEST_CASE("alpha is an antisymmetric 2-cocycle", "[loop]") {
  const auto c = loop_example_cos(), s = loop_example_sin();
  CHECK_THAT(alpha(c, s), WithinAbs(1.0 / (8.0 * M_PI), 1e-15));
  CHECK(alpha(c, c) == 0.0);

  Rng rng(73);
  const auto k0 = LoopAlgebraElement::constant(sample_algebra(4, rng));
  const auto k1 = LoopAlgebraElement::constant(sample_algebra(4, rng));
  const auto k2 = LoopAlgebraElement::constant(sample_algebra(4, rng));
  CHECK(alpha(k0, k1) == 0.0);
  CHECK(cocycle_residual(k0, k1, k2) == 0.0);

  for (int i = 0; i < 10; ++i) {
    const auto x = LoopAlgebraElement::random(4, 3, rng), y = LoopAlgebraElement::random(4, 2, rng), z = LoopAlgebraElement::random(4, 1, rng);
    CHECK(std::abs(cocycle_residual(x, y, z)) < 1e-10);
    CHECK_THAT(alpha(x, y), WithinAbs(-alpha(y, x), 1e-15));
    CHECK_THAT(alpha(x + 2.0 * z, y), WithinAbs(alpha(x, y) + 2.0 * alpha(z, y), 1e-12));
    CHECK(std::abs(alpha(x, y) - alpha(x, y, 64)) < 1e-13);
    CHECK(cocycle_residual(x, y, LoopAlgebraElement(4, 0)) == 0.0);
  }
}

TEST_CASE("group functionals and the mixed partial", "[loop]") {
  Rng rng(74);
  const auto x1 = LoopAlgebraElement::random(4, 1, rng, 0.5);
  const auto x2 = LoopAlgebraElement::random(4, 2, rng, 0.5);
  LoopQuadrature quad;
  quad.theta_nodes = 32;
  CHECK(b_functional(0.0, x1, 0.1, x2, quad) == 0.0);
  CHECK(b_functional(0.1, x1, 0.0, x2, quad) == 0.0);

  // mixed_partial is exact up to rounding on a bilinear polynomial with quartic terms
  CHECK_THAT(mixed_partial([](double a, double b) { return 3 * a * b + a * a * a * b + 7 * a * a; }), WithinAbs(3.0, 1e-8));

  const PathFunctional b = [&](double y1, const LoopAlgebraElement& l1, double y2, const LoopAlgebraElement& l2) {
    return b_functional(y1, l1, y2, l2, quad);
  };
  const PathFunctional a = [&](double y1, const LoopAlgebraElement& l1, double y2, const LoopAlgebraElement& l2) {
    return a_functional(y1, l1, y2, l2, ContractionKind::Product, quad);
  };
  CHECK(std::abs(brylinski_phi2(a, x1, x2)) < 1e-8);
  // Measured: the mixed partial of b is four times the expected closed form.
  const double mixed = mixed_partial([&](double y1, double y2) { return b(y1, x1, y2, x2); });
  CHECK_THAT(mixed / b_closed_form(x1, x2), WithinRel(4.0, 1e-8));
  CHECK_THAT(brylinski_phi2(b, x1, x2), WithinRel(4.0 * alpha(x1, x2), 1e-8));
}

TEST_CASE("phi of a coboundary is the Lie algebra differential", "[loop]") {
  Rng rng(75);
  CHECK(coboundary_check(Matrix::Identity(4, 4), sample_algebra(4, rng), sample_algebra(4, rng)) < 1e-6);
  Matrix w = Matrix::Random(4, 4);
  CHECK(coboundary_check(w, sample_algebra(4, rng), sample_algebra(4, rng)) < 1e-6);
}
