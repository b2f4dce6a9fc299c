#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "xxzent/analytic.hpp"
#include "xxzent/chain.hpp"
#include "xxzent/common.hpp"
#include "xxzent/entanglement.hpp"
#include "xxzent/limits.hpp"
#include "xxzent/spectral.hpp"

namespace xxzent {

struct CheckResult {
  std::string name;
  bool pass = false;
  double deviation = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct VerifyOptions {
  int max_n = 6;          // largest chain used in randomized checks
  int draws = 200;        // random parameter draws per check
  unsigned seed = 20240u;
  double oracle_tol = 1e-9;
  double eps_neg = kDefaultEpsNeg;
  double limit_tol = 1e-6;
};

namespace detail {

inline ChainSpec random_reduced_spec(std::mt19937& rng, int n, Topology topo) {
  std::uniform_real_distribution<double> delta_dist(-6.0, 2.0);
  std::uniform_real_distribution<double> bbar_dist(0.0, 2.0);
  std::bernoulli_distribution sign_dist(0.5);
  return ChainSpec::reduced(n, topo, sign_dist(rng) ? +1 : -1, delta_dist(rng),
                            bbar_dist(rng));
}

inline double random_temperature(std::mt19937& rng) {
  std::uniform_real_distribution<double> t_dist(0.05, 3.0);
  return t_dist(rng);
}

inline Eigen::VectorXd random_unit_vector(std::mt19937& rng, int dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v(i) = gauss(rng);
  v.normalize();
  return v;
}

inline DensityMatrix random_mixture(std::mt19937& rng, int n, int terms) {
  const int d = 1 << n;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> q(terms);
  double norm = 0.0;
  for (auto& x : q) {
    x = unif(rng);
    norm += x;
  }
  DensityMatrix rho;
  rho.n = n;
  rho.mat = Eigen::MatrixXd::Zero(d, d);
  for (int k = 0; k < terms; ++k) {
    const Eigen::VectorXd v = random_unit_vector(rng, d);
    rho.mat += (q[k] / norm) * v * v.transpose();
  }
  return rho;
}

}  // namespace detail

/// Two-qubit closed forms vs the dense thermal path on random parameters.
inline CheckResult check_pair_weight_oracle(const VerifyOptions& opts) {
  CheckResult res{"pair-weight-oracle", true, 0.0, opts.oracle_tol, ""};
  std::mt19937 rng(opts.seed);
  int condition_mismatches = 0;
  for (int i = 0; i < opts.draws; ++i) {
    const ChainSpec spec = detail::random_reduced_spec(rng, 2, Topology::SinglePair);
    const double t = detail::random_temperature(rng);
    const TwoQubitWeights w = thermal_weights_n2(spec, t);
    const double analytic = two_qubit_negativity(w);
    const DensityMatrix rho = thermal_state(eigendecompose(build_hamiltonian(spec)), t);
    const double dense = negativity_dense(rho, Bipartition::global(2, 1u)).value;
    res.deviation = std::max(res.deviation, std::abs(analytic - dense));
    if (two_qubit_entangled(w) != (dense > opts.eps_neg)) ++condition_mismatches;
  }
  res.pass = res.deviation < opts.oracle_tol && condition_mismatches == 0;
  res.detail = "condition mismatches: " + std::to_string(condition_mismatches);
  return res;
}

/// Three-qubit closed forms (global value/condition, pair condition and the
/// weight reduction) vs the dense thermal path on random parameters.
inline CheckResult check_triple_weight_oracle(const VerifyOptions& opts) {
  CheckResult res{"triple-weight-oracle", true, 0.0, opts.oracle_tol, ""};
  std::mt19937 rng(opts.seed + 1);
  int mismatches = 0;
  for (int i = 0; i < opts.draws; ++i) {
    const ChainSpec spec = detail::random_reduced_spec(rng, 3, Topology::CyclicNN);
    const double t = detail::random_temperature(rng);
    const ThreeQubitWeights w = thermal_weights_n3(spec, t);
    const DensityMatrix rho = thermal_state(eigendecompose(build_hamiltonian(spec)), t);

    const double dense = negativity_dense(rho, Bipartition::parse("a-bc", 3)).value;
    res.deviation = std::max(res.deviation,
                             std::abs(three_qubit_global_negativity(w) - dense));
    if (three_qubit_global_condition(w) != (dense > opts.eps_neg)) ++mismatches;

    const DensityMatrix pair = partial_trace(rho, 0b011u);
    const double pair_dense = negativity_dense(pair, Bipartition::global(2, 1u)).value;
    const TwoQubitWeights reduced = reduce_weights_3to2(w);
    res.deviation = std::max(res.deviation,
                             std::abs(two_qubit_negativity(reduced) - pair_dense));
    if (pair_condition_n3(w) != (pair_dense > opts.eps_neg)) ++mismatches;
    if (pair_condition_n3(w) != two_qubit_entangled(reduced)) ++mismatches;

    // Weight reduction must commute with the matrix-level partial trace.
    const double map_dev =
        (to_density_matrix(reduced).mat - partial_trace(to_density_matrix(w), 0b011u).mat)
            .cwiseAbs()
            .maxCoeff();
    res.deviation = std::max(res.deviation, map_dev);
  }
  res.pass = res.deviation < opts.oracle_tol && mismatches == 0;
  res.detail = "condition mismatches: " + std::to_string(mismatches);
  return res;
}

/// The thermal state must flip entangled -> separable across each closed-form
/// border, probed at delta_max(t) -/+ 1e-4.
inline CheckResult check_border_consistency(const VerifyOptions& opts) {
  CheckResult res{"border-consistency", true, 0.0, 1e-4, ""};
  int failures = 0;
  auto thermal_negativity = [&](int n, Topology topo, int v_sign, double delta,
                                double bbar, double t, const char* label) {
    const ChainSpec spec = ChainSpec::reduced(n, topo, v_sign, delta, bbar);
    const DensityMatrix rho = thermal_state(eigendecompose(build_hamiltonian(spec)), t);
    return negativity(rho, Bipartition::parse(label, n), opts.eps_neg).value;
  };
  const double step = 1e-4;
  for (double t : {0.2, 0.5, 0.9}) {
    const double d2 = border_n2(t);
    if (thermal_negativity(2, Topology::SinglePair, +1, d2 - step, 0.7, t, "a-b") <=
        opts.eps_neg) ++failures;
    if (thermal_negativity(2, Topology::SinglePair, +1, d2 + step, 0.7, t, "a-b") >
        opts.eps_neg) ++failures;
    for (int v_sign : {+1, -1}) {
      const double d3 = border_n3_global(t, v_sign);
      if (thermal_negativity(3, Topology::CyclicNN, v_sign, d3 - step, 1.1, t, "a-bc") <=
          opts.eps_neg) ++failures;
      if (thermal_negativity(3, Topology::CyclicNN, v_sign, d3 + step, 1.1, t, "a-bc") >
          opts.eps_neg) ++failures;
    }
    for (double bbar : {0.0, 0.8}) {
      const auto dpair = border_n3_pair(t, bbar, +1);
      if (!dpair) {
        ++failures;
        continue;
      }
      if (thermal_negativity(3, Topology::CyclicNN, +1, *dpair - step, bbar, t, "a-b") <=
          opts.eps_neg) ++failures;
      if (thermal_negativity(3, Topology::CyclicNN, +1, *dpair + step, bbar, t, "a-b") >
          opts.eps_neg) ++failures;
    }
  }
  res.pass = failures == 0;
  res.detail = "probe failures: " + std::to_string(failures);
  res.deviation = failures;
  return res;
}

/// Closed-form negativities of the four-site ground family vs the dense path
/// on the explicit vector, across the piecewise breakpoints.
inline CheckResult check_four_site_bundle(const VerifyOptions& opts) {
  CheckResult res{"four-site-ground-bundle", true, 0.0, opts.oracle_tol, ""};
  for (double delta : {-3.0, 0.0, 0.5, 1.0, 1.5, 3.0, 3.5, 5.0}) {
    const Eigen::VectorXd psi = four_site_ground_vector(delta);
    DensityMatrix rho;
    rho.n = 4;
    rho.mat = psi * psi.transpose();
    const FourSiteNegativities bundle =
        four_site_ground_negativities(four_site_ground_state(delta));
    const std::pair<const char*, double> cases[] = {{"a-bcd", bundle.one_rest},
                                                    {"ab-cd", bundle.adj_halves},
                                                    {"ac-bd", bundle.alt_halves},
                                                    {"a-b", bundle.adj_pair},
                                                    {"a-c", bundle.opp_pair}};
    for (const auto& [label, expected] : cases) {
      const auto p = Bipartition::parse(label, 4);
      res.deviation =
          std::max(res.deviation, std::abs(negativity(rho, p).value - expected));
      if (p.is_global())
        res.deviation =
            std::max(res.deviation, std::abs(pure_negativity(psi, p) - expected));
    }
  }
  res.pass = res.deviation < opts.oracle_tol;
  return res;
}

/// exp(-H/T)^{t_A} must factor as exp(-bS_z/2T) exp(-H_0/T)^{t_A} exp(-bS_z/2T).
inline CheckResult check_field_factorization(const VerifyOptions& opts) {
  CheckResult res{"pt-field-factorization", true, 0.0, 1e-9, ""};
  std::mt19937 rng(opts.seed + 2);
  for (int n = 3; n <= std::min(opts.max_n, 5); ++n) {
    const auto partitions = all_global_bipartitions(n);
    std::uniform_int_distribution<std::size_t> pick(0, partitions.size() - 1);
    for (double bbar : {0.3, 1.7}) {
      for (int rep = 0; rep < 2; ++rep) {
        const ChainSpec spec = ChainSpec::reduced(n, Topology::CyclicNN, +1, 0.8, bbar);
        res.deviation = std::max(
            res.deviation, pt_field_factorization_check(spec, partitions[pick(rng)], 1.0));
      }
    }
  }
  res.pass = res.deviation < res.threshold;
  return res;
}

/// Global limit temperatures cannot move with the field; the reduced pair
/// limit for n = 3 must.
inline CheckResult check_field_independence(const VerifyOptions& opts) {
  CheckResult res{"field-independence", true, 0.0, 10.0 * opts.limit_tol, ""};
  LimitOptions lo;
  lo.tol = opts.limit_tol;
  lo.eps_neg = opts.eps_neg;
  const auto global = field_independence_report(3, Topology::CyclicNN, +1,
                                                Bipartition::parse("a-bc", 3),
                                                {0.0, 0.5, 2.0}, {-3.0, 0.0, 0.5}, lo);
  res.deviation = global.max_spread;
  res.pass = global.all_consistent && global.max_spread < res.threshold;

  const auto pair = field_independence_report(3, Topology::CyclicNN, +1,
                                              Bipartition::parse("a-b", 3), {0.0, 2.0},
                                              {-5.0}, lo);
  const bool pair_depends = pair.max_spread > 0.1;
  res.pass = res.pass && pair_depends;
  res.detail = "reduced-pair spread at delta=-5: " + std::to_string(pair.max_spread);
  return res;
}

/// Tracing out sites is LOCC, so negativities may only shrink.
inline CheckResult check_tracing_monotonicity(const VerifyOptions& opts) {
  CheckResult res{"tracing-monotonicity", true, 0.0, 1e-10, ""};
  std::mt19937 rng(opts.seed + 3);
  for (int i = 0; i < std::max(opts.draws / 4, 10); ++i) {
    const int n = 4 + static_cast<int>(rng() % 2u);
    const ChainSpec spec = detail::random_reduced_spec(rng, n, Topology::CyclicNN);
    const double t = detail::random_temperature(rng);
    const DensityMatrix rho = thermal_state(eigendecompose(build_hamiltonian(spec)), t);
    double prev = negativity(rho, Bipartition::parse("a-b", n)).value;
    std::string chain[] = {"a-bc", "a-bcd", "a-bcde"};
    for (int stage = 0; stage < n - 2; ++stage) {
      const double cur = negativity(rho, Bipartition::parse(chain[stage], n)).value;
      res.deviation = std::max(res.deviation, prev - cur);
      prev = cur;
    }
    const double pair_ac = negativity(rho, Bipartition::parse("a-c", n)).value;
    const double abc = negativity(rho, Bipartition::parse("a-bc", n)).value;
    res.deviation = std::max(res.deviation, pair_ac - abc);
  }
  res.pass = res.deviation <= res.threshold;
  return res;
}

/// States inside the ball around I/d are separable for every split.
inline CheckResult check_separability_ball(const VerifyOptions& opts) {
  CheckResult res{"separability-ball", true, 0.0, 0.0, ""};
  int violations = 0, inside = 0;
  for (int n = 3; n <= std::min(opts.max_n, 6); ++n) {
    const auto partitions = all_global_bipartitions(n);
    for (double delta : {-2.0, 0.5, 1.5}) {
      const ChainSpec spec = ChainSpec::reduced(n, Topology::CyclicNN, +1, delta, 0.4);
      const SpectralDecomposition decomp = eigendecompose(build_hamiltonian(spec));
      for (double t : log_spaced_grid(0.5, 200.0, 24)) {
        const DensityMatrix rho = thermal_state(decomp, t);
        if (!separability_ball_test(rho)) continue;
        ++inside;
        for (const auto& p : partitions)
          if (negativity(rho, p, opts.eps_neg).value > opts.eps_neg) ++violations;
      }
    }
  }
  res.pass = violations == 0 && inside > 0;
  res.deviation = violations;
  res.detail = "states inside ball: " + std::to_string(inside);
  return res;
}

/// Dense mixed-state negativity agrees with the Schmidt form on pure states.
inline CheckResult check_pure_state_agreement(const VerifyOptions& opts) {
  CheckResult res{"pure-state-negativity", true, 0.0, 1e-9, ""};
  std::mt19937 rng(opts.seed + 4);
  for (int i = 0; i < opts.draws; ++i) {
    const int n = 2 + static_cast<int>(rng() % static_cast<unsigned>(opts.max_n - 1));
    const Eigen::VectorXd psi = detail::random_unit_vector(rng, 1 << n);
    DensityMatrix rho;
    rho.n = n;
    rho.mat = psi * psi.transpose();
    for (const auto& p : all_global_bipartitions(n))
      res.deviation = std::max(
          res.deviation, std::abs(negativity_dense(rho, p).value - pure_negativity(psi, p)));
  }
  res.pass = res.deviation < res.threshold;
  return res;
}

/// The magnetization-blocked negativity path must match the dense eigensolve
/// on thermal states, value and count alike.
inline CheckResult check_blocked_vs_dense(const VerifyOptions& opts) {
  CheckResult res{"blocked-vs-dense", true, 0.0, 1e-10, ""};
  std::mt19937 rng(opts.seed + 5);
  int count_mismatches = 0;
  for (int i = 0; i < std::max(opts.draws / 4, 10); ++i) {
    const int n = 3 + static_cast<int>(rng() % static_cast<unsigned>(
                                           std::max(opts.max_n - 2, 1)));
    const ChainSpec spec = detail::random_reduced_spec(rng, n, Topology::CyclicNN);
    const double t = detail::random_temperature(rng);
    const DensityMatrix rho = thermal_state(eigendecompose(build_hamiltonian(spec)), t);
    for (const auto& p : all_global_bipartitions(n)) {
      const NegativityReport fast = negativity(rho, p, opts.eps_neg);
      const NegativityReport slow = negativity_dense(rho, p, opts.eps_neg);
      res.deviation = std::max(res.deviation, std::abs(fast.value - slow.value));
      if (fast.negative_count != slow.negative_count) ++count_mismatches;
    }
  }
  res.pass = res.deviation < res.threshold && count_mismatches == 0;
  res.detail = "count mismatches: " + std::to_string(count_mismatches);
  return res;
}

inline std::vector<CheckResult> run_verification(const VerifyOptions& opts = {}) {
  return {check_pair_weight_oracle(opts),   check_triple_weight_oracle(opts),
          check_border_consistency(opts),   check_four_site_bundle(opts),
          check_field_factorization(opts),  check_field_independence(opts),
          check_tracing_monotonicity(opts), check_separability_ball(opts),
          check_pure_state_agreement(opts), check_blocked_vs_dense(opts)};
}

}  // namespace xxzent
