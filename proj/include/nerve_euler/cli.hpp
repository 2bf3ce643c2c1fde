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
 * @file cli.hpp
 * @brief Command-line front end. Each subcommand runs one verification suite
 * and writes a JSON report; exit code 0 when every check passes, 1 when a
 * check fails, 2 on usage or domain errors.
 */

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "euler.hpp"
#include "loopcocycle.hpp"
#include "nerve.hpp"
#include "transgression.hpp"

namespace nerve_euler {

inline constexpr const char* version = "0.1.0";
inline constexpr int report_schema = 1;

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool below = true;  // pass when value < tolerance; otherwise when value >= tolerance
  bool pass() const { return below ? value < tolerance : value >= tolerance; }
};

inline void to_json(nlohmann::json& j, const Check& c) {
  j = {{"name", c.name}, {"max_residual", c.value}, {"tolerance", c.tolerance}, {"comparison", c.below ? "<" : ">="},
       {"pass", c.pass()}};
}

struct SuiteResult {
  std::vector<Check> checks;
  nlohmann::json details = nlohmann::json::object();
  std::vector<std::string> summary;  // human-readable lines
  bool passed() const {
    for (const auto& c : checks)
      if (!c.pass()) return false;
    return true;
  }
};

struct RunConfig {
  std::string subcommand;
  int n = 4;
  int p = 3;
  int samples = 0;  // 0: suite default
  int trials = 0;
  std::uint64_t seed = 0;
  double tol = 0.0;  // 0: suite default
  double radius = 0.1;
  int quad_order = 8;
  int winding = 1;
  int steps = 256;
  int max_freq = 3;
  int workers = 1;
  double frame_scale = 1.0;
  bool negative_control = false;
  std::string output;

  nlohmann::json to_json() const {
    return {{"subcommand", subcommand}, {"n", n},           {"p", p},           {"samples", samples},
            {"trials", trials},         {"seed", seed},     {"tol", tol},       {"radius", radius},
            {"quad_order", quad_order}, {"winding", winding}, {"steps", steps}, {"max_freq", max_freq},
            {"workers", workers},       {"frame_scale", frame_scale}, {"negative_control", negative_control}};
  }
};

namespace suites {

inline int or_default(int v, int d) { return v > 0 ? v : d; }
inline double or_default(double v, double d) { return v > 0 ? v : d; }

inline SuiteResult verify_euler(const RunConfig& cfg) {
  SuiteResult r;
  const auto cochain = builtin_cocycle(cfg.n);
  CocycleCheckOptions opt;
  opt.samples = or_default(cfg.samples, cfg.n == 6 ? 5 : 20);
  opt.tol = or_default(cfg.tol, cfg.n == 6 ? 1e-4 : 1e-5);
  opt.seed = cfg.seed;
  opt.workers = cfg.workers;
  opt.frame_scale = cfg.frame_scale;
  opt.sign_audit = true;
  const auto report = verify_total_cocycle(cochain.cochain(), cfg.n, opt);
  r.checks.push_back({"total_cocycle", report.max_residual, opt.tol});
  r.checks.push_back({"sign_audit_unique", std::abs(report.audit_passing_assignments - 1.0), 0.5});
  r.details["cocycle"] = report.to_json();
  r.details["sign_audit"] = {{"assignment", report.sign_assignment},
                             {"passing_assignments", report.audit_passing_assignments},
                             {"best_residual", report.audit_best_residual}};
  r.summary.push_back("SO(" + std::to_string(cfg.n) + ") max residual " + std::to_string(report.max_residual));
  if (cfg.negative_control) {
    opt.sign_audit = false;
    for (const auto& comp : cochain.components) {
      const auto bad = verify_total_cocycle(cochain.cochain().scaled(comp.bidegree, 1.01), cfg.n, opt);
      r.checks.push_back({"perturbed_" + comp.bidegree.str(), bad.max_residual, 10 * opt.tol, false});
    }
  }
  return r;
}

inline SuiteResult verify_generator(const RunConfig& cfg) {
  SuiteResult r;
  const int samples = or_default(cfg.samples, 10);
  const double tol = or_default(cfg.tol, 1e-10);
  Rng rng(derive_seed(cfg.seed, 0));
  nlohmann::json per = nlohmann::json::array();
  for (int p = 1; p <= cfg.p; ++p) {
    const auto builtin = builtin_cocycle(2 * p);
    for (int q = 0; q < p; ++q) {
      const auto generated = general_component(p, q);
      const auto reference = builtin.component({p - q, p + q}).form;
      double worst = 0.0;
      for (int i = 0; i < samples; ++i) {
        std::vector<GroupPoint> comps;
        for (int k = 0; k < p - q; ++k) comps.push_back(sample_haar(2 * p, rng));
        const NervePoint pt(std::move(comps));
        std::vector<TangentFrame> v;
        for (int k = 0; k < p + q; ++k) v.push_back(sample_frame(p - q, 2 * p, 1.0, rng));
        const double a = generated(pt, v), b = reference(pt, v);
        worst = std::max(worst, std::abs(a - b) / std::max(std::abs(b), 1e-300));
      }
      const std::string name = "E(" + std::to_string(p - q) + "," + std::to_string(p + q) + ") p=" + std::to_string(p);
      r.checks.push_back({name, worst, tol});
      per.push_back({{"p", p}, {"q", q}, {"max_relative_error", worst},
                     {"coefficient", to_json_terms({general_component_words(p, q).front()})[0]["coefficient_exact"]}});
    }
  }
  r.details["components"] = per;
  return r;
}

inline SuiteResult pfaffian(const RunConfig& cfg) {
  SuiteResult r;
  const int trials = or_default(cfg.trials, 100);
  const double tol = or_default(cfg.tol, 1e-9);
  Rng rng(derive_seed(cfg.seed, 0));
  const int p = cfg.n / 2;
  double det_err = 0.0, conj_err = 0.0;
  for (int i = 0; i < trials; ++i) {
    const auto a = sample_algebra(cfg.n, rng);
    const double pf = std::pow(2 * M_PI, p) * pfaffian_paper(a);
    const double det = a.matrix().determinant();
    det_err = std::max(det_err, std::abs(pf * pf - det) / std::abs(det));
    const auto g = sample_haar(cfg.n, rng);
    conj_err = std::max(conj_err, std::abs(pfaffian_paper(adjoint(g, a)) - pfaffian_paper(a)) / std::abs(pfaffian_paper(a)));
  }
  r.checks.push_back({"pf_squared_equals_det", det_err, tol});
  r.checks.push_back({"conjugation_invariance", conj_err, tol / 10});
  r.summary.push_back("Pf^2 = det relative residual " + std::to_string(det_err));
  return r;
}

inline SuiteResult euler_number(const RunConfig& cfg) {
  SuiteResult r;
  const double e = euler_number_clutching(cfg.winding, cfg.steps);
  const double hopf = hopf_euler_number(builtin_cocycle(4).component({1, 3}).form);
  const double tol = or_default(cfg.tol, 1e-10);
  r.checks.push_back({"clutching_winding", std::abs(e - cfg.winding), tol});
  r.checks.push_back({"quaternionic_hopf", std::abs(hopf - 1.0), tol});
  r.details["euler_number"] = e;
  r.details["hopf_euler_number"] = hopf;
  char line[64];
  std::snprintf(line, sizeof line, "%.9f", e);
  r.summary.emplace_back(line);
  return r;
}

inline SuiteResult transgress(const RunConfig& cfg) {
  SuiteResult r;
  EtaCheckOptions opt;
  opt.samples = or_default(cfg.samples, 10);
  opt.radius = cfg.radius;
  opt.tol = or_default(cfg.tol, 1e-3);
  opt.seed = cfg.seed;
  opt.workers = cfg.workers;
  opt.transgression.quad_order = cfg.quad_order;
  Rng rng(derive_seed(cfg.seed, 7));
  const auto sp = check_sigma_properties(ContractionKind::Cone, 3, opt.samples, cfg.radius, rng);
  const auto report = eta_and_verify(opt);
  r.checks.push_back({"sigma_apex", sp.identity_at_apex, 1e-10});
  r.checks.push_back({"sigma_face_zero", sp.face_zero, 1e-10});
  r.checks.push_back({"sigma_face_higher", sp.face_higher, 1e-10});
  r.checks.push_back({"eta0_residual", report.eta0_residual, opt.tol});
  r.checks.push_back({"eta1_residual", report.eta1_residual, opt.tol});
  r.checks.push_back({"quad_convergence", report.quad_convergence, 1e-6});
  r.checks.push_back({"perturbed_beta21", report.perturbed_eta1_residual, 10 * report.eta1_residual, false});
  r.details = report.to_json();
  r.details["sigma"] = {{"apex", sp.identity_at_apex}, {"face_zero", sp.face_zero}, {"face_higher", sp.face_higher}};
  return r;
}

inline SuiteResult loop_cocycle(const RunConfig& cfg) {
  SuiteResult r;
  LoopCheckOptions opt;
  opt.trials = or_default(cfg.trials, 20);
  opt.max_freq = cfg.max_freq;
  opt.seed = cfg.seed;
  const double tol = or_default(cfg.tol, 1e-4);
  const auto rep = loop_cocycle_check(opt);
  r.checks.push_back({"pairing_ad_invariance", rep.ad_invariance, 1e-12});
  r.checks.push_back({"cocycle_residual", rep.cocycle_residual, 1e-10});
  r.checks.push_back({"worked_example", rep.worked_example_error, 1e-12});
  r.checks.push_back({"b_mixed_partial_closed_form", rep.b_error, tol});
  r.checks.push_back({"phi_a", std::abs(rep.phi_a), tol});
  r.checks.push_back({"phi_a_plus_b_equals_alpha", rep.phi_ab_error, tol});
  r.checks.push_back({"phi_coboundary", rep.coboundary_error, 1e-5});
  r.details = rep.to_json();
  r.summary.push_back("mixed partial of b / closed form = " + std::to_string(rep.b_ratio()));
  return r;
}

/// Maurer-Cartan equations, d o d, simplicial identities and face pushforwards.
inline SuiteResult structure_tests(const RunConfig& cfg) {
  SuiteResult r;
  const int samples = or_default(cfg.samples, 5);
  const int n = cfg.n;
  Rng rng(derive_seed(cfg.seed, 0));
  auto haar_point = [&](int level) {
    std::vector<GroupPoint> c;
    for (int k = 0; k < level; ++k) c.push_back(sample_haar(n, rng));
    return NervePoint(std::move(c));
  };
  auto frames = [&](int count, int level) {
    std::vector<TangentFrame> out;
    for (int i = 0; i < count; ++i) out.push_back(sample_frame(level, n, 1.0, rng));
    return out;
  };
  using G = MatrixGenerator;
  double mc_left = 0, mc_right = 0, dd = 0, simplicial = 0, pushforward = 0;
  for (int s = 0; s < samples; ++s) {
    const auto p1 = haar_point(1);
    const auto v2 = frames(2, 1);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        const auto l = word_evaluator({1, {{FormFactor::single(G::lmc(1)), a, b}}, 1.0});
        const auto l2 = word_evaluator({1, {{FormFactor::square(G::lmc(1)), a, b}}, 1.0});
        mc_left = std::max(mc_left, std::abs(exterior_derivative(l)(p1, v2) + l2(p1, v2)));
        const auto rr = word_evaluator({1, {{FormFactor::single(G::rmc(1)), a, b}}, 1.0});
        const auto r2 = word_evaluator({1, {{FormFactor::square(G::rmc(1)), a, b}}, 1.0});
        mc_right = std::max(mc_right, std::abs(exterior_derivative(rr)(p1, v2) - r2(p1, v2)));
      }
    }
    std::vector<GroupPoint> near;
    for (int k = 0; k < 2; ++k) near.push_back(sample_near_identity(n, 0.5, rng));
    const auto w = word_evaluator({2, {{FormFactor::single(G::phi(2)), 0, 1}, {FormFactor::single(G::lmc(1)), 1, 2}}, 1.0});
    dd = std::max(dd, std::abs(exterior_derivative(exterior_derivative(w))(NervePoint(near), frames(4, 2))));

    for (int q = 2; q <= 4; ++q) {
      const auto pq = haar_point(q);
      const auto vq = sample_frame(q, n, 1.0, rng);
      for (int j = 1; j <= q; ++j) {
        for (int i = 0; i < j; ++i) {
          const auto lhs = face_point(i, face_point(j, pq)), rhs = face_point(j - 1, face_point(i, pq));
          const auto lv = face_pushforward(i, face_point(j, pq), face_pushforward(j, pq, vq));
          const auto rv = face_pushforward(j - 1, face_point(i, pq), face_pushforward(i, pq, vq));
          for (int k = 0; k < q - 2; ++k) {
            simplicial = std::max(simplicial, (lhs[k].matrix() - rhs[k].matrix()).cwiseAbs().maxCoeff());
            simplicial = std::max(simplicial, (lv[k].matrix() - rv[k].matrix()).cwiseAbs().maxCoeff());
          }
        }
      }
      for (int i = 0; i <= q; ++i) {
        const auto exact = face_pushforward(i, pq, vq);
        for (int slot = 0; slot < q - 1; ++slot) {
          const auto fd = curve_tangent([&](double t) { return face_point(i, flow(pq, vq, t))[slot].matrix(); }, 0.0);
          pushforward = std::max(pushforward, (fd.matrix() - exact[slot].matrix()).cwiseAbs().maxCoeff());
        }
      }
    }
  }
  r.checks.push_back({"maurer_cartan_left", mc_left, 1e-7});
  r.checks.push_back({"maurer_cartan_right", mc_right, 1e-7});
  r.checks.push_back({"d_squared", dd, 1e-5});
  r.checks.push_back({"simplicial_identities", simplicial, 1e-12});
  r.checks.push_back({"face_pushforward_fd", pushforward, 1e-8});
  return r;
}

}  // namespace suites

/// Parses argv, runs the suite, writes the report. Returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Numerical verification of Euler-class cocycles on the nerve of SO(2p)", "nerve-euler"};
  app.set_version_flag("--version", version);
  app.require_subcommand(1);

  RunConfig cfg;
  std::optional<std::uint64_t> seed;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "random seed (falls back to NERVE_EULER_SEED, then 0)");
    sub->add_option("--output,-o", cfg.output, "write the JSON report to this path instead of stdout");
    sub->add_option("--workers", cfg.workers, "worker threads")->check(CLI::PositiveNumber);
  };
  auto* euler = app.add_subcommand("verify-euler", "total-cocycle check of the SO(n) Euler cochain");
  euler->add_option("--n", cfg.n, "matrix size")->check(CLI::IsMember({2, 4, 6}));
  euler->add_option("--samples", cfg.samples, "evaluation points")->check(CLI::PositiveNumber);
  euler->add_option("--tol", cfg.tol, "residual tolerance")->check(CLI::PositiveNumber);
  euler->add_option("--frame-scale", cfg.frame_scale, "standard deviation of frame entries")->check(CLI::PositiveNumber);
  euler->add_flag("--negative-control", cfg.negative_control, "also perturb each component by 1%");
  common(euler);

  auto* gen = app.add_subcommand("verify-generator", "general (p,q) components against the transcribed ones");
  gen->add_option("--p", cfg.p, "largest p")->check(CLI::Range(1, 3));
  gen->add_option("--samples", cfg.samples, "evaluation points per component")->check(CLI::PositiveNumber);
  gen->add_option("--tol", cfg.tol, "relative tolerance")->check(CLI::PositiveNumber);
  common(gen);

  auto* pf = app.add_subcommand("pfaffian", "Pf^2 = det and conjugation invariance");
  pf->add_option("--n", cfg.n, "matrix size")->check(CLI::IsMember({2, 4, 6}));
  pf->add_option("--trials", cfg.trials, "random matrices")->check(CLI::PositiveNumber);
  pf->add_option("--tol", cfg.tol, "relative tolerance")->check(CLI::PositiveNumber);
  common(pf);

  auto* en = app.add_subcommand("euler-number", "Euler number of a clutching loop by integration");
  en->add_option("--winding", cfg.winding, "winding number of the clutching loop");
  en->add_option("--steps", cfg.steps, "trapezoid nodes")->check(CLI::Range(64, 1 << 20));
  en->add_option("--tol", cfg.tol, "absolute tolerance")->check(CLI::PositiveNumber);
  common(en);

  auto* tr = app.add_subcommand("transgress", "truncated-cocycle check of the transgressed SO(4) cochain");
  tr->add_option("--radius", cfg.radius, "neighborhood radius")->check(CLI::Range(1e-6, 1.0));
  tr->add_option("--quad-order", cfg.quad_order, "Gauss points per simplex dimension")->check(CLI::Range(1, 64));
  tr->add_option("--samples", cfg.samples, "evaluation points")->check(CLI::PositiveNumber);
  tr->add_option("--tol", cfg.tol, "residual tolerance")->check(CLI::PositiveNumber);
  common(tr);

  auto* lc = app.add_subcommand("loop-cocycle", "the loop algebra 2-cocycle and the group-to-algebra map");
  lc->add_option("--trials", cfg.trials, "random triples")->check(CLI::PositiveNumber);
  lc->add_option("--max-freq", cfg.max_freq, "largest loop frequency")->check(CLI::Range(0, 8));
  lc->add_option("--tol", cfg.tol, "tolerance of the mixed-partial checks")->check(CLI::PositiveNumber);
  common(lc);

  auto* st = app.add_subcommand("structure-tests", "Maurer-Cartan, d o d, simplicial identities");
  st->add_option("--n", cfg.n, "matrix size")->check(CLI::IsMember({2, 4, 6}));
  st->add_option("--samples", cfg.samples, "evaluation points")->check(CLI::PositiveNumber);
  common(st);

  if (argc <= 1) {
    err << app.help();
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << version << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  if (seed) {
    cfg.seed = *seed;
  } else if (const char* env = std::getenv("NERVE_EULER_SEED")) {
    try {
      cfg.seed = std::stoull(env);
    } catch (const std::exception&) {
      err << "error: NERVE_EULER_SEED is not an unsigned integer\n";
      return 2;
    }
  }
  for (auto* sub : app.get_subcommands()) cfg.subcommand = sub->get_name();

  const auto start = std::chrono::steady_clock::now();
  SuiteResult result;
  try {
    if (cfg.subcommand == "verify-euler") result = suites::verify_euler(cfg);
    else if (cfg.subcommand == "verify-generator") result = suites::verify_generator(cfg);
    else if (cfg.subcommand == "pfaffian") result = suites::pfaffian(cfg);
    else if (cfg.subcommand == "euler-number") result = suites::euler_number(cfg);
    else if (cfg.subcommand == "transgress") result = suites::transgress(cfg);
    else if (cfg.subcommand == "loop-cocycle") result = suites::loop_cocycle(cfg);
    else result = suites::structure_tests(cfg);
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  nlohmann::json report = {{"version", version},
                           {"schema", report_schema},
                           {"config", cfg.to_json()},
                           {"checks", result.checks},
                           {"details", result.details},
                           {"passed", result.passed()},
                           {"wall_time_s", wall}};
  std::ostream& human = cfg.output.empty() ? err : out;
  for (const auto& line : result.summary) human << line << "\n";
  for (const auto& c : result.checks) human << (c.pass() ? "PASS " : "FAIL ") << c.name << " " << c.value << "\n";
  if (cfg.output.empty()) {
    out << report.dump(2) << "\n";
  } else {
    std::ofstream file(cfg.output);
    if (!file) {
      err << "error: cannot write " << cfg.output << "\n";
      return 2;
    }
    file << report.dump(2) << "\n";
  }
  return result.passed() ? 0 : 1;
}

}  // namespace nerve_euler
