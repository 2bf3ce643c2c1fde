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
 * @file transgression.hpp
 * @brief Local transgression of the SO(4) Euler cocycle into the truncated
 * complex: contraction maps sigma_l : Delta^l x U^l -> U, the maps
 *   f_{m,q}(t; h_1..h_{m+q-1}) = (h_1, .., h_{m-1}, sigma_q(t; h_m, ..)),
 * fiber integrals beta_{m,q} = (-1)^m int_{Delta^q} f_{m,q}^* mu_m and
 * eta_0 = beta_{2,2} + beta_{1,3},  eta_1 = beta_{2,1} + beta_{1,2}.
 *
 * Fiber integration puts the simplex directions first:
 *   (int_{Delta^q} w)(V..) = int w(d/dt_1, .., d/dt_q, V..) dt_1 .. dt_q.
 *
 * The cone contraction written in collapsed coordinates (s_1 = 1 - t_0, rest
 * the collapsed coordinates of the rescaled face point) is
 *   sigma_l(s; h_1..h_l) = exp(s_1 log(h_1 sigma_{l-1}(s_2..; h_2..h_l))),
 * which is smooth in s, including the apex s_1 = 0.
 */

#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "euler.hpp"
#include "forms.hpp"
#include "nerve.hpp"
#include "simplex.hpp"

namespace nerve_euler {

enum class ContractionKind { Cone, Product };

inline std::string to_string(ContractionKind k) { return k == ContractionKind::Cone ? "cone" : "product"; }

/// sigma_l in collapsed coordinates s = (s_1..s_l).
inline GroupPoint sigma_collapsed(ContractionKind kind, std::span<const double> s, std::span<const GroupPoint> hs) {
  const int l = static_cast<int>(hs.size());
  if (static_cast<int>(s.size()) != l) throw std::invalid_argument("sigma: simplex and group arguments disagree in length");
  if (l == 0) throw std::invalid_argument("sigma: level 0 has no group dimension; use the identity");
  if (kind == ContractionKind::Product) {
    if (l == 1) return exp_alg(s[0] * log_grp(hs[0]));
    if (l == 2) {
      // t_0 = 1 - s_1, t_2 = s_1 s_2
      return exp_alg(s[0] * log_grp(hs[0])) * exp_alg(s[0] * s[1] * log_grp(hs[1]));
    }
    throw std::invalid_argument("sigma: the explicit contraction is only defined for l <= 2");
  }
  const GroupPoint inner = (l == 1) ? hs[0] : hs[0] * sigma_collapsed(kind, s.subspan(1), hs.subspan(1));
  return exp_alg(s[0] * log_grp(inner));
}

/// Barycentric coordinates (t_0..t_l) to collapsed coordinates; the apex
/// t_0 = 1 maps to s_1 = 0 with arbitrary (zero) remaining coordinates.
inline std::vector<double> barycentric_to_collapsed(std::span<const double> t) {
  std::vector<double> s;
  double mass = 1.0;  // 1 - t_0 - ... of the part already peeled off
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    const double rest = mass - t[k];
    s.push_back(mass > 0.0 ? rest / mass : 0.0);
    mass = rest;
  }
  return s;
}

/// sigma_l at a barycentric point (t_0..t_l); sigma_0 = identity(n).
inline GroupPoint sigma(ContractionKind kind, std::span<const double> t, std::span<const GroupPoint> hs, int n) {
  if (t.size() != hs.size() + 1) throw std::invalid_argument("sigma: expected l+1 barycentric coordinates");
  if (hs.empty()) return GroupPoint::identity(n);
  const auto s = barycentric_to_collapsed(t);
  return sigma_collapsed(kind, s, hs);
}

/// Coface map Delta^{l-1} -> Delta^l inserting 0 at position j.
inline std::vector<double> coface(int j, std::span<const double> t) {
  std::vector<double> out(t.begin(), t.end());
  out.insert(out.begin() + j, 0.0);
  return out;
}

/// f_{m,q} at collapsed simplex coordinates.
inline NervePoint f_map_collapsed(ContractionKind kind, int m, std::span<const double> s, std::span<const GroupPoint> hs) {
  const int q = static_cast<int>(s.size());
  if (m < 1 || static_cast<int>(hs.size()) != m + q - 1) throw std::invalid_argument("f_map: expected m + q - 1 group elements");
  std::vector<GroupPoint> out(hs.begin(), hs.begin() + (m - 1));
  out.push_back(sigma_collapsed(kind, s, hs.subspan(m - 1)));
  return NervePoint(std::move(out));
}

inline NervePoint f_map(ContractionKind kind, int m, std::span<const double> t, std::span<const GroupPoint> hs) {
  return f_map_collapsed(kind, m, barycentric_to_collapsed(t), hs);
}

struct TransgressionOptions {
  ContractionKind kind = ContractionKind::Cone;
  int quad_order = 8;
  double step = tolerance::fd_step;
};

/// beta_{m,q} for the SO(4) cocycle (mu_1 = level-1 component, mu_2 = level-2).
inline FormEvaluator beta_form(int m, int q, const TransgressionOptions& opt = {}) {
  if (m < 1 || m > 2 || q < 1 || m + q < 3 || m + q > 4) {
    throw std::invalid_argument("beta_form: (m,q) must be one of (1,2),(2,1),(1,3),(2,2)");
  }
  const auto so4 = builtin_cocycle(4);
  const FormEvaluator mu = so4.component({m, 4 - m}).form;
  const auto rule = std::make_shared<const QuadratureRule>(quadrature_rule(q, opt.quad_order));
  const int level = m + q - 1;
  const int degree = 4 - m - q;
  const double sign = (m % 2) ? -1.0 : 1.0;
  const ContractionKind kind = opt.kind;
  const double step = opt.step;
  return {level, degree, [=](const NervePoint& p, std::span<const TangentFrame> frames) {
            const int n = p[0].dim();
            const std::vector<GroupPoint>& hs = p.components();
            double total = 0.0;
            std::vector<TangentFrame> args;
            for (const auto& node : rule->nodes) {
              const auto& s = node.collapsed;
              const NervePoint fp = f_map_collapsed(kind, m, s, hs);
              args.clear();
              // simplex directions d/ds_k: only the sigma slot moves
              for (int k = 0; k < q; ++k) {
                TangentFrame t = TangentFrame::zero(m, n);
                t[m - 1] = curve_tangent(
                    [&](double e) {
                      std::vector<double> moved = s;
                      moved[k] += e;
                      return sigma_collapsed(kind, moved, std::span(hs).subspan(m - 1)).matrix();
                    },
                    0.0, step);
                args.push_back(std::move(t));
              }
              // group directions: the first m-1 slots pass through unchanged
              for (const auto& v : frames) {
                std::vector<AlgebraVector> comps(v.components().begin(), v.components().begin() + (m - 1));
                comps.push_back(curve_tangent(
                    [&](double e) {
                      std::vector<GroupPoint> moved;
                      for (std::size_t k = m - 1; k < hs.size(); ++k) moved.push_back(hs[k] * exp_alg(e * v[static_cast<int>(k)]));
                      return sigma_collapsed(kind, s, moved).matrix();
                    },
                    0.0, step));
                args.emplace_back(std::move(comps));
              }
              // d/ds pullback carries the Jacobian; the Jacobi weights already do
              total += node.weight / node.jacobian * mu.call(fp, args);
            }
            return sign * total;
          }};
}

struct EtaCochain {
  FormEvaluator beta22, beta13, beta21, beta12;
  FormEvaluator eta0() const { return beta22 + beta13; }
  FormEvaluator eta1() const { return beta21 + beta12; }
};

inline EtaCochain make_eta(const TransgressionOptions& opt = {}) {
  return {beta_form(2, 2, opt), beta_form(1, 3, opt), beta_form(2, 1, opt), beta_form(1, 2, opt)};
}

// ---------------------------------------------------------------------------
// Verification

struct SigmaPropertyReport {
  double identity_at_apex = 0.0;  // sigma_l at t_0 = 1
  double face_zero = 0.0;         // j = 0
  double face_higher = 0.0;       // j >= 1
};

/// Residuals of the two contraction properties on random near-identity inputs.
inline SigmaPropertyReport check_sigma_properties(ContractionKind kind, int max_level, int samples, double radius, Rng& rng,
                                                  int n = 4) {
  SigmaPropertyReport r;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto diff = [](const GroupPoint& a, const GroupPoint& b) { return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff(); };
  for (int trial = 0; trial < samples; ++trial) {
    for (int l = 1; l <= max_level; ++l) {
      std::vector<GroupPoint> hs;
      for (int k = 0; k < l; ++k) hs.push_back(sample_near_identity(n, radius, rng));
      // random point of Delta^{l-1}
      std::vector<double> cube;
      for (int k = 0; k < l - 1; ++k) cube.push_back(unit(rng));
      const auto t = collapsed_to_barycentric(cube);

      std::vector<double> apex(static_cast<std::size_t>(l + 1), 0.0);
      apex[0] = 1.0;
      r.identity_at_apex = std::max(r.identity_at_apex, diff(sigma(kind, apex, hs, n), GroupPoint::identity(n)));

      const std::span<const GroupPoint> tail(hs.data() + 1, hs.size() - 1);
      const GroupPoint expect0 = hs[0] * sigma(kind, t, tail, n);
      r.face_zero = std::max(r.face_zero, diff(sigma(kind, coface(0, t), hs, n), expect0));
      for (int j = 1; j <= l; ++j) {
        const NervePoint face = face_point(j, NervePoint(hs));
        const GroupPoint expect = sigma(kind, t, face.components(), n);
        r.face_higher = std::max(r.face_higher, diff(sigma(kind, coface(j, t), hs, n), expect));
      }
    }
  }
  return r;
}

struct TransgressionReport {
  int samples = 0;
  double radius = 0.0;
  int quad_order = 0;
  double eta0_residual = 0.0;   // d' eta_0 on U^4
  double eta1_residual = 0.0;   // d' eta_1 + d'' eta_0 on U^3
  double eta0_scale = 0.0;      // largest single face term of d' eta_0
  double eta1_scale = 0.0;      // largest of |d' eta_1|, |d'' eta_0|
  double quad_convergence = 0.0;  // max change of eta values when the order doubles
  double perturbed_eta1_residual = 0.0;  // with beta_{2,1} scaled by 1.01
  double identity_residual = 0.0;
  double tol = 0.0;
  bool passed = false;

  nlohmann::json to_json() const {
    return {{"samples", samples},
            {"radius", radius},
            {"quad_order", quad_order},
            {"eta0_residual", eta0_residual},
            {"eta1_residual", eta1_residual},
            {"eta0_scale", eta0_scale},
            {"eta1_scale", eta1_scale},
            {"quad_convergence", quad_convergence},
            {"perturbed_eta1_residual", perturbed_eta1_residual},
            {"identity_residual", identity_residual},
            {"tol", tol},
            {"passed", passed}};
  }
};

struct EtaCheckOptions {
  int samples = 10;
  double radius = 0.1;
  double tol = 1e-3;
  std::uint64_t seed = 0;
  int workers = 1;
  bool check_convergence = true;
  TransgressionOptions transgression;
};

/// Truncated-cocycle equations for eta = eta_0 + eta_1 at p = 2:
///   degree 0 on U^4:  d' eta_0 = 0
///   degree 1 on U^3:  d' eta_1 + d'' eta_0 = 0.
inline TransgressionReport eta_and_verify(const EtaCheckOptions& opt) {
  TransgressionReport report;
  report.samples = opt.samples;
  report.radius = opt.radius;
  report.quad_order = opt.transgression.quad_order;
  report.tol = opt.tol;

  const EtaCochain eta = make_eta(opt.transgression);
  const FormEvaluator eta0 = eta.eta0();
  const FormEvaluator eta1 = eta.eta1();
  const FormEvaluator dp_eta0 = d_prime(eta0);
  const FormEvaluator dp_eta1 = d_prime(eta1);
  const FormEvaluator ds_eta0 = d_second(eta0, opt.transgression.step);
  const FormEvaluator dp_eta1_perturbed = d_prime(1.01 * eta.beta21 + eta.beta12);

  TransgressionOptions doubled = opt.transgression;
  doubled.quad_order *= 2;
  const EtaCochain fine = opt.check_convergence ? make_eta(doubled) : eta;

  struct Row {
    double r0 = 0, s0 = 0, r1 = 0, s1 = 0, perturbed = 0, conv = 0;
  };
  const int n = 4;
  const auto rows = parallel_map(opt.samples, opt.workers, [&](int i) {
    Rng rng(derive_seed(opt.seed, static_cast<std::uint64_t>(i)));
    CocycleCheckOptions sampling;
    sampling.sampling = PointSampling::NearIdentity;
    sampling.radius = opt.radius;
    Row row;
    const NervePoint p4 = sample_point(4, n, sampling, rng);
    for (int j = 0; j <= 4; ++j) row.s0 = std::max(row.s0, std::abs(eta0(face_point(j, p4), {})));
    row.r0 = std::abs(dp_eta0(p4, {}));

    const NervePoint p3 = sample_point(3, n, sampling, rng);
    const std::vector<TangentFrame> v{sample_frame(3, n, 1.0, rng)};
    const double a = dp_eta1(p3, v);
    const double b = ds_eta0(p3, v);
    row.r1 = std::abs(a + b);
    row.s1 = std::max(std::abs(a), std::abs(b));
    row.perturbed = std::abs(dp_eta1_perturbed(p3, v) + b);

    if (opt.check_convergence) {
      const NervePoint p2 = sample_point(2, n, sampling, rng);
      const std::vector<TangentFrame> v2{sample_frame(2, n, 1.0, rng)};
      row.conv = std::max(std::abs(eta1(p2, v2) - fine.eta1()(p2, v2)), std::abs(eta0(p3, {}) - fine.eta0()(p3, {})));
    }
    return row;
  });
  for (const auto& r : rows) {
    report.eta0_residual = std::max(report.eta0_residual, r.r0);
    report.eta0_scale = std::max(report.eta0_scale, r.s0);
    report.eta1_residual = std::max(report.eta1_residual, r.r1);
    report.eta1_scale = std::max(report.eta1_scale, r.s1);
    report.perturbed_eta1_residual = std::max(report.perturbed_eta1_residual, r.perturbed);
    report.quad_convergence = std::max(report.quad_convergence, r.conv);
  }

  // All components at the identity: sigma is constant, every pullback vanishes.
  const NervePoint id4({GroupPoint::identity(n), GroupPoint::identity(n), GroupPoint::identity(n), GroupPoint::identity(n)});
  const NervePoint id3({GroupPoint::identity(n), GroupPoint::identity(n), GroupPoint::identity(n)});
  Rng rng(derive_seed(opt.seed, 1u << 20));
  const std::vector<TangentFrame> v{sample_frame(3, n, 1.0, rng)};
  report.identity_residual = std::max(std::abs(dp_eta0(id4, {})), std::abs(dp_eta1(id3, v) + ds_eta0(id3, v)));

  report.passed = report.eta0_residual < opt.tol && report.eta1_residual < opt.tol;
  return report;
}

}  // namespace nerve_euler
