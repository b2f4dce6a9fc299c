#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <stdexcept>

#include "xxzent/chain.hpp"
#include "xxzent/common.hpp"
#include "xxzent/spectral.hpp"

namespace xxzent {

/// Weights p^S_M of a two-qubit mixture diagonal in the total-spin basis:
/// rho = sum p^S_M |S M><S M| over (1,1), (1,0), (1,-1), (0,0).
struct TwoQubitWeights {
  double p1_plus = 0.0;   // p^1_{+1}, aligned up
  double p1_zero = 0.0;   // p^1_0, triplet Bell state
  double p1_minus = 0.0;  // p^1_{-1}, aligned down
  double p0 = 0.0;        // p^0_0, singlet

  double sum() const { return p1_plus + p1_zero + p1_minus + p0; }
};

/// Weights p^S_M of a three-qubit mixture rho = sum p^S_M P^S_M, with P the
/// projector onto the (S, M) subspace. The S = 1/2 projectors are rank two,
/// so normalization reads sum(S=3/2) + 2 sum(S=1/2) = 1.
struct ThreeQubitWeights {
  double p32_plus3 = 0.0;   // p^{3/2}_{+3/2}
  double p32_plus1 = 0.0;   // p^{3/2}_{+1/2}
  double p32_minus1 = 0.0;  // p^{3/2}_{-1/2}
  double p32_minus3 = 0.0;  // p^{3/2}_{-3/2}
  double p12_plus = 0.0;    // p^{1/2}_{+1/2}
  double p12_minus = 0.0;   // p^{1/2}_{-1/2}

  double weight_sum() const {
    return p32_plus3 + p32_plus1 + p32_minus1 + p32_minus3 +
           2.0 * (p12_plus + p12_minus);
  }
};

/// Closed-form pair negativity of a total-spin-diagonal two-qubit mixture.
inline double two_qubit_negativity(const TwoQubitWeights& w) {
  const double root = std::sqrt((w.p1_zero - w.p0) * (w.p1_zero - w.p0) +
                                (w.p1_plus - w.p1_minus) * (w.p1_plus - w.p1_minus));
  return 0.5 * std::max(root - w.p1_plus - w.p1_minus, 0.0);
}

/// Entanglement condition |p^1_0 - p^0_0| > 2 sqrt(p^1_1 p^1_{-1}).
inline bool two_qubit_entangled(const TwoQubitWeights& w) {
  return std::abs(w.p1_zero - w.p0) > 2.0 * std::sqrt(w.p1_plus * w.p1_minus);
}

/// Field-independent two-qubit thermal border: the largest anisotropy with
/// pair entanglement at reduced temperature t, delta_max = 1 - 2t ln[2/(1 - e^{-1/t})].
inline double border_n2(double t) {
  if (!(t > 0.0)) throw std::domain_error("border_n2 requires t > 0");
  return 1.0 - 2.0 * t * std::log(2.0 / (1.0 - std::exp(-1.0 / t)));
}

/// Closed-form global negativity N_{a-bc} of a total-spin-diagonal
/// three-qubit mixture.
inline double three_qubit_global_negativity(const ThreeQubitWeights& w) {
  auto p32 = [&](int twice_m) {
    switch (twice_m) {
      case 3: return w.p32_plus3;
      case 1: return w.p32_plus1;
      case -1: return w.p32_minus1;
      default: return w.p32_minus3;
    }
  };
  auto p12 = [&](int twice_m) { return twice_m > 0 ? w.p12_plus : w.p12_minus; };

  double total = 0.0;
  for (int nu : {+1, -1}) {
    const double a = 3.0 * p32(-3 * nu);
    const double b = 2.0 * p32(nu);
    const double c = p12(nu);
    const double x = p32(-nu) - p12(-nu);
    const double root = std::sqrt((a - b - c) * (a - b - c) + 8.0 * x * x);
    total += std::max(root - a - b - c, 0.0);
  }
  return total / 6.0;
}

/// Condition for nonzero N_{a-bc}:
/// |p^{3/2}_{v/2} - p^{1/2}_{v/2}| > sqrt(3 p^{3/2}_{3v/2} (p^{3/2}_{-v/2} + p^{1/2}_{-v/2}/2))
/// for either sign v.
inline bool three_qubit_global_condition(const ThreeQubitWeights& w) {
  auto holds = [&](double p32_near, double p12_near, double p32_aligned,
                   double p32_far, double p12_far) {
    return std::abs(p32_near - p12_near) >
           std::sqrt(3.0 * p32_aligned * (p32_far + 0.5 * p12_far));
  };
  return holds(w.p32_plus1, w.p12_plus, w.p32_plus3, w.p32_minus1, w.p12_minus) ||
         holds(w.p32_minus1, w.p12_minus, w.p32_minus3, w.p32_plus1, w.p12_plus);
}

/// Weights of the reduced pair density Tr_c rho, again total-spin diagonal.
inline TwoQubitWeights reduce_weights_3to2(const ThreeQubitWeights& w) {
  TwoQubitWeights out;
  out.p1_plus = (3.0 * w.p32_plus3 + w.p32_plus1 + 2.0 * w.p12_plus) / 3.0;
  out.p1_minus = (3.0 * w.p32_minus3 + w.p32_minus1 + 2.0 * w.p12_minus) / 3.0;
  out.p0 = w.p12_plus + w.p12_minus;
  out.p1_zero = (2.0 * (w.p32_plus1 + w.p32_minus1) + out.p0) / 3.0;
  return out;
}

/// Pairwise entanglement condition of a three-qubit mixture, written directly
/// in the three-qubit weights:
/// |sum_v (p^{3/2}_{v/2} - p^{1/2}_{v/2})| > prod_v sqrt(3 p^{3/2}_{3v/2} + p^{3/2}_{v/2} + 2 p^{1/2}_{v/2}).
inline bool pair_condition_n3(const ThreeQubitWeights& w) {
  const double lhs =
      std::abs(w.p32_plus1 + w.p32_minus1 - w.p12_plus - w.p12_minus);
  const double rhs =
      std::sqrt(3.0 * w.p32_plus3 + w.p32_plus1 + 2.0 * w.p12_plus) *
      std::sqrt(3.0 * w.p32_minus3 + w.p32_minus1 + 2.0 * w.p12_minus);
  return lhs > rhs;
}

/// Field-independent three-qubit global border:
///   v > 0: delta_max = 1   - t ln[3(2 + a)/(2(1 - a)^2)]
///   v < 0: delta_max = 1/2 - t ln[3(1 + 2a)/(2(1 - a)^2)]
/// with a = e^{-3/(2t)}.
inline double border_n3_global(double t, int v_sign) {
  if (!(t > 0.0)) throw std::domain_error("border_n3_global requires t > 0");
  const double a = std::exp(-1.5 / t);
  const double denom = 2.0 * (1.0 - a) * (1.0 - a);
  if (v_sign > 0) return 1.0 - t * std::log(3.0 * (2.0 + a) / denom);
  return 0.5 - t * std::log(3.0 * (1.0 + 2.0 * a) / denom);
}

namespace detail {

// sqrt(g^2 (eta^2 - 1) + 2 (1 + eta)(1 - a)^2) - g eta with eta = cosh(bbar/t),
// evaluated in a cancellation-free form; positive iff a pairwise-entangled
// anisotropy window exists at this t.
inline double pair_border_denominator(double t, double bbar, double gamma) {
  const double a = std::exp(-1.5 / t);
  const double one_minus_a_sq = (1.0 - a) * (1.0 - a);
  const double x = bbar / t;
  if (x > 300.0) return one_minus_a_sq / gamma;  // corrections O(e^{-x})
  const double eta = std::cosh(x);
  const double num = 2.0 * (1.0 + eta) * one_minus_a_sq - gamma * gamma;
  const double s = gamma * gamma * (eta * eta - 1.0) + 2.0 * (1.0 + eta) * one_minus_a_sq;
  return num / (std::sqrt(s) + gamma * eta);
}

inline double pair_border_gamma(double t, int v_sign) {
  const double a = std::exp(-1.5 / t);
  return v_sign > 0 ? 1.0 + 2.0 * a : 2.0 + a;
}

}  // namespace detail

/// Field-dependent three-qubit pairwise border delta_max(t, bbar), or nothing
/// when no anisotropy supports pair entanglement at this temperature.
inline std::optional<double> border_n3_pair(double t, double bbar, int v_sign) {
  if (!(t > 0.0)) throw std::domain_error("border_n3_pair requires t > 0");
  const double denom = detail::pair_border_denominator(t, bbar, detail::pair_border_gamma(t, v_sign));
  if (denom <= 0.0) return std::nullopt;
  return 1.0 - t * std::log(3.0 / denom);
}

/// Temperature t_c(bbar) where the pairwise border collapses: the limit of
/// the pairwise limit temperature for delta -> -infinity. Increasing in
/// |bbar|; t_c(0) = 3/(4 ln 2) for v > 0. Throws when the border never
/// collapses from positive (v < 0 at zero field has no pairwise window).
inline double pair_saturation_temperature(double bbar, int v_sign = +1) {
  auto denom = [&](double t) {
    return detail::pair_border_denominator(t, bbar, detail::pair_border_gamma(t, v_sign));
  };
  // Bracket the sign change on a log grid.
  double lo = 1e-3, hi = 0.0;
  if (denom(lo) <= 0.0) throw RangeError("pairwise region empty at low temperature");
  for (double t = 2e-3; t <= 1e3; t *= 1.3) {
    if (denom(t) <= 0.0) {
      hi = t;
      break;
    }
    lo = t;
  }
  if (hi == 0.0) throw RangeError("pairwise border does not collapse below t = 1e3");
  return bisect_root(denom, lo, hi, 1e-12);
}

/// The M = 0 ground family of the four-site ring for delta < 1 (lowest M = 0
/// level for any delta): alpha on the two-up/two-down blocks, beta on the
/// alternating pair, with beta/alpha = (sqrt(8 + delta^2) - delta)/2 and
/// 4 alpha^2 + 2 beta^2 = 1. Its energy is -|v| beta/alpha.
struct FourSiteGroundState {
  double delta = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

/// Negativities of the four-site ground family across its five distinct
/// splits.
struct FourSiteNegativities {
  double one_rest = 0.0;     // a-bcd
  double adj_halves = 0.0;   // ab-cd
  double alt_halves = 0.0;   // ac-bd
  double adj_pair = 0.0;     // a-b after tracing cd
  double opp_pair = 0.0;     // a-c after tracing bd
};

inline FourSiteGroundState four_site_ground_state(double delta) {
  FourSiteGroundState g;
  g.delta = delta;
  const double ratio = 0.5 * (std::sqrt(8.0 + delta * delta) - delta);
  g.alpha = 1.0 / std::sqrt(4.0 + 2.0 * ratio * ratio);
  g.beta = ratio * g.alpha;
  return g;
}

inline FourSiteNegativities four_site_ground_negativities(const FourSiteGroundState& g) {
  FourSiteNegativities n;
  const double a = g.alpha, b = g.beta;
  n.one_rest = 0.5;
  n.alt_halves = b * (4.0 * a + b);
  n.adj_halves = g.delta < 1.0 ? n.alt_halves : 6.0 * a * a - b * b;
  n.adj_pair = std::max(a * (2.0 * b - a), 0.0);  // closes at delta = 7/2
  n.opp_pair = std::max(2.0 * a * a - b * b, 0.0);  // closes at delta = 0
  return n;
}

/// The family as an explicit 16-component vector in the computational basis.
inline Eigen::VectorXd four_site_ground_vector(double delta) {
  const FourSiteGroundState g = four_site_ground_state(delta);
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(16);
  // up-up-down-down and its ring translations (bit set = spin down)
  for (int idx : {0b1100, 0b1001, 0b0011, 0b0110}) psi(idx) = g.alpha;
  // up-down-up-down and its translation
  for (int idx : {0b1010, 0b0101}) psi(idx) = g.beta;
  return psi;
}

/// Thermal weights p^S_M = e^{-E^S_M/T} / Z for a two-site spec.
inline TwoQubitWeights thermal_weights_n2(const ChainSpec& spec, double temperature) {
  if (spec.n != 2) throw ValidationError("thermal_weights_n2 requires n = 2");
  if (!(temperature > 0.0)) throw std::domain_error("thermal weights require T > 0");
  const double e_min = std::min({total_spin_energy(spec, 2, 2), total_spin_energy(spec, 2, 0),
                                 total_spin_energy(spec, 2, -2), total_spin_energy(spec, 0, 0)});
  auto w = [&](int ts, int tm) {
    return std::exp(-(total_spin_energy(spec, ts, tm) - e_min) / temperature);
  };
  TwoQubitWeights out;
  out.p1_plus = w(2, 2);
  out.p1_zero = w(2, 0);
  out.p1_minus = w(2, -2);
  out.p0 = w(0, 0);
  const double z = out.sum();
  out.p1_plus /= z;
  out.p1_zero /= z;
  out.p1_minus /= z;
  out.p0 /= z;
  return out;
}

/// Thermal weights for a three-site spec; the two degenerate S = 1/2 levels
/// per M each carry the weight once, entering Z twice.
inline ThreeQubitWeights thermal_weights_n3(const ChainSpec& spec, double temperature) {
  if (spec.n != 3) throw ValidationError("thermal_weights_n3 requires n = 3");
  if (!(temperature > 0.0)) throw std::domain_error("thermal weights require T > 0");
  const double e_min =
      std::min({total_spin_energy(spec, 3, 3), total_spin_energy(spec, 3, 1),
                total_spin_energy(spec, 3, -1), total_spin_energy(spec, 3, -3),
                total_spin_energy(spec, 1, 1), total_spin_energy(spec, 1, -1)});
  auto w = [&](int ts, int tm) {
    return std::exp(-(total_spin_energy(spec, ts, tm) - e_min) / temperature);
  };
  ThreeQubitWeights out;
  out.p32_plus3 = w(3, 3);
  out.p32_plus1 = w(3, 1);
  out.p32_minus1 = w(3, -1);
  out.p32_minus3 = w(3, -3);
  out.p12_plus = w(1, 1);
  out.p12_minus = w(1, -1);
  const double z = out.weight_sum();
  out.p32_plus3 /= z;
  out.p32_plus1 /= z;
  out.p32_minus1 /= z;
  out.p32_minus3 /= z;
  out.p12_plus /= z;
  out.p12_minus /= z;
  return out;
}

/// Matrix form of a total-spin-diagonal two-qubit mixture.
inline DensityMatrix to_density_matrix(const TwoQubitWeights& w) {
  DensityMatrix rho;
  rho.n = 2;
  rho.sector_blocked = true;
  rho.mat = Eigen::MatrixXd::Zero(4, 4);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Eigen::VectorXd triplet0 = Eigen::VectorXd::Zero(4);
  triplet0(1) = inv_sqrt2;  // down-up
  triplet0(2) = inv_sqrt2;  // up-down
  Eigen::VectorXd singlet = Eigen::VectorXd::Zero(4);
  singlet(1) = -inv_sqrt2;
  singlet(2) = inv_sqrt2;
  rho.mat(0, 0) = w.p1_plus;   // up-up, M = +1
  rho.mat(3, 3) = w.p1_minus;  // down-down, M = -1
  rho.mat += w.p1_zero * triplet0 * triplet0.transpose();
  rho.mat += w.p0 * singlet * singlet.transpose();
  return rho;
}

/// Matrix form of a total-spin-diagonal three-qubit mixture, built from an
/// explicit orthonormal total-spin basis. The S = 1/2 weights multiply
/// rank-two projectors; any orthonormal basis of those subspaces gives the
/// same matrix.
inline DensityMatrix to_density_matrix(const ThreeQubitWeights& w) {
  auto basis_vec = [](std::initializer_list<std::pair<int, double>> terms) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(8);
    for (const auto& [idx, amp] : terms) v(idx) = amp;
    v.normalize();
    return v;
  };
  // bit set = spin down; site a is bit 0
  const Eigen::VectorXd s32_p3 = basis_vec({{0b000, 1.0}});
  const Eigen::VectorXd s32_p1 = basis_vec({{0b001, 1.0}, {0b010, 1.0}, {0b100, 1.0}});
  const Eigen::VectorXd s32_m1 = basis_vec({{0b110, 1.0}, {0b101, 1.0}, {0b011, 1.0}});
  const Eigen::VectorXd s32_m3 = basis_vec({{0b111, 1.0}});
  const Eigen::VectorXd s12_p_a = basis_vec({{0b001, 1.0}, {0b010, -1.0}});
  const Eigen::VectorXd s12_p_b = basis_vec({{0b001, 1.0}, {0b010, 1.0}, {0b100, -2.0}});
  const Eigen::VectorXd s12_m_a = basis_vec({{0b110, 1.0}, {0b101, -1.0}});
  const Eigen::VectorXd s12_m_b = basis_vec({{0b110, 1.0}, {0b101, 1.0}, {0b011, -2.0}});

  DensityMatrix rho;
  rho.n = 3;
  rho.sector_blocked = true;
  rho.mat = Eigen::MatrixXd::Zero(8, 8);
  auto add = [&](double p, const Eigen::VectorXd& v) { rho.mat += p * v * v.transpose(); };
  add(w.p32_plus3, s32_p3);
  add(w.p32_plus1, s32_p1);
  add(w.p32_minus1, s32_m1);
  add(w.p32_minus3, s32_m3);
  add(w.p12_plus, s12_p_a);
  add(w.p12_plus, s12_p_b);
  add(w.p12_minus, s12_m_a);
  add(w.p12_minus, s12_m_b);
  return rho;
}

}  // namespace xxzent
