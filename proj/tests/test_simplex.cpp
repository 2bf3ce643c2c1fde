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

#include <algorithm>

#include <nerve_euler/combinatorics.hpp>
#include <nerve_euler/simplex.hpp>

#include "oracles.hpp"

using namespace nerve_euler;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double to_double(const Rational& r) {
  return boost::multiprecision::numerator(r).convert_to<double>() /
         boost::multiprecision::denominator(r).convert_to<double>();
}

/// All exponent vectors of length q+1 with total degree <= d.
void exponents_up_to(int q, int d, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == q + 1) {
    out.push_back(cur);
    return;
  }
  const int used = std::accumulate(cur.begin(), cur.end(), 0);
  for (int a = 0; a + used <= d; ++a) {
    cur.push_back(a);
    exponents_up_to(q, d, cur, out);
    cur.pop_back();
  }
}

}  // namespace

TEST_CASE("monomial integrals", "[simplex]") {
  CHECK(monomial_integral({{1, 1}}) == Rational(1, 6));
  CHECK(monomial_integral({{2, 2}}) == Rational(1, 30));
  CHECK(monomial_integral({{2, 2}}) == Rational(1) / (binomial(5, 2) * 3));
  CHECK(monomial_integral({{0, 0, 0, 0}}) == Rational(1, 6));
  CHECK(monomial_integral({{0, 1, 1, 1}}) == Rational(1, 720));
  CHECK(monomial_integral({{0, 0, 0, 0, 0, 0, 0}}) == Rational(1, 720));
  CHECK_THROWS_AS(monomial_integral({{1, -1}}), std::invalid_argument);
  // Large exponents stay exact.
  const Rational big = monomial_integral({{30, 30, 30}});
  CHECK_THAT(to_double(big), WithinRel(oracle::dirichlet({30, 30, 30}), 1e-12));
}

TEST_CASE("monomial integrals agree with the gamma-function oracle and are symmetric", "[simplex]") {
  for (int q = 1; q <= 3; ++q) {
    std::vector<int> cur;
    std::vector<std::vector<int>> all;
    exponents_up_to(q, 6, cur, all);
    for (const auto& a : all) {
      const Rational exact = monomial_integral({a});
      CHECK_THAT(to_double(exact), WithinRel(oracle::dirichlet(a), 1e-13));
      auto rev = a;
      std::reverse(rev.begin(), rev.end());
      CHECK(monomial_integral({rev}) == exact);
    }
  }
}

TEST_CASE("Gauss-Jacobi rules integrate weighted polynomials exactly", "[simplex]") {
  for (double beta : {0.0, 1.0, 2.0}) {
    const auto rule = gauss_jacobi(5, beta);
    for (int k = 0; k <= 9; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * std::pow(rule.nodes[i], k);
      CHECK_THAT(s, WithinAbs(1.0 / (k + beta + 1.0), 1e-14));
    }
  }
}

TEST_CASE("quadrature rules reproduce the examples", "[simplex]") {
  const auto r1 = quadrature_rule(1, 1);
  CHECK_THAT(r1.integrate([](auto t) { return t[1]; }), WithinAbs(0.5, 1e-15));
  const auto r2 = quadrature_rule(2, 4);
  CHECK_THAT(r2.integrate([](auto t) { return t[0] * t[1]; }), WithinAbs(1.0 / 24.0, 1e-14));
  const auto r3 = quadrature_rule(3, 6);
  CHECK_THAT(r3.integrate([](auto t) { return t[1] * t[2] * t[3]; }), WithinAbs(1.0 / 720.0, 1e-13));
  for (int q = 1; q <= 3; ++q) CHECK_THAT(quadrature_rule(q, 8).volume(), WithinAbs(1.0 / to_double(Rational(factorial(q))), 1e-14));
  CHECK_THROWS_AS(quadrature_rule(0, 3), std::invalid_argument);
  CHECK_THROWS_AS(quadrature_rule(2, 0), std::invalid_argument);
}

TEST_CASE("quadrature is exact through degree 2 order - 1", "[simplex]") {
  for (int q = 1; q <= 3; ++q) {
    for (int order : {2, 4}) {
      const auto rule = quadrature_rule(q, order);
      std::vector<int> cur;
      std::vector<std::vector<int>> all;
      exponents_up_to(q, 2 * order - 1, cur, all);
      for (const auto& a : all) {
        const MonomialExponent m{a};
        const double num = rule.integrate([&](auto t) { return m.evaluate(t); });
        CHECK_THAT(num, WithinAbs(to_double(monomial_integral(m)), 1e-13));
      }
    }
  }
}

TEST_CASE("collapsed coordinates land on the simplex", "[simplex]") {
  const std::vector<double> s{0.3, 0.6, 0.2};
  const auto t = collapsed_to_barycentric(s);
  REQUIRE(t.size() == 4);
  CHECK_THAT(std::accumulate(t.begin(), t.end(), 0.0), WithinAbs(1.0, 1e-15));
  CHECK_THAT(t[0], WithinAbs(0.7, 1e-15));
  CHECK_THAT(collapsed_jacobian(s), WithinAbs(0.3 * 0.3 * 0.6, 1e-15));
}

TEST_CASE("contractions and shuffles", "[combinatorics]") {
  CHECK(all_permutations(4).size() == 24);
  int sign_sum = 0;
  for (const auto& p : all_permutations(5)) sign_sum += p.sign;
  CHECK(sign_sum == 0);
  CHECK(shuffles(std::vector<int>{2, 2, 1}).size() == 30);
  CHECK(shuffles(std::vector<int>{1, 1}).size() == 2);

  Rng rng(21);
  for (int p = 1; p <= 3; ++p) {
    std::vector<Matrix> fs;
    for (int k = 0; k < p; ++k) fs.push_back(sample_algebra(2 * p, rng).matrix());
    const double brute = oracle::brute_contract(fs);
    CHECK_THAT(full_contract(fs), WithinAbs(brute, 1e-11));
    CHECK_THAT(pair_contract(fs), WithinAbs(brute, 1e-11));
  }
}
