#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xxzent/common.hpp"
#include "xxzent/spectral.hpp"

namespace xxzent {

namespace detail {

inline std::vector<int> mask_sites(std::uint32_t mask) {
  std::vector<int> sites;
  for (int i = 0; mask >> i; ++i)
    if ((mask >> i) & 1u) sites.push_back(i);
  return sites;
}

// Scatters the bits of `packed` into the positions listed in `sites`.
inline std::uint32_t scatter_bits(std::uint32_t packed, const std::vector<int>& sites) {
  std::uint32_t out = 0;
  for (std::size_t k = 0; k < sites.size(); ++k)
    if ((packed >> k) & 1u) out |= 1u << sites[k];
  return out;
}

inline std::string site_letters(std::uint32_t mask) {
  std::string s;
  for (int i = 0; i < 32; ++i)
    if ((mask >> i) & 1u) s.push_back(static_cast<char>('a' + i));
  return s;
}

}  // namespace detail

/// A split of (a subset of) the chain's sites into two groups. `keep` is the
/// set of retained sites: the full mask for a global split, a proper subset
/// for a split of a reduced system. `side_a` is the transposed/first group
/// and always contains the lowest kept site.
struct Bipartition {
  int n = 0;
  std::uint32_t keep = 0;
  std::uint32_t side_a = 0;

  bool is_global() const { return keep == full_mask(); }
  std::uint32_t full_mask() const { return (1u << n) - 1u; }
  std::uint32_t side_b() const { return keep & ~side_a; }
  int keep_count() const { return std::popcount(keep); }
  int a_count() const { return std::popcount(side_a); }

  /// Hard cap on the negativity across this split: (2^min(|A|,|B|) - 1)/2.
  double negativity_bound() const {
    const int m = std::min(a_count(), keep_count() - a_count());
    return 0.5 * ((1 << m) - 1);
  }

  std::string label() const {
    return detail::site_letters(side_a) + "-" + detail::site_letters(side_b());
  }

  static Bipartition global(int n, std::uint32_t a) {
    return make(n, (1u << n) - 1u, a);
  }

  static Bipartition make(int n, std::uint32_t keep, std::uint32_t a) {
    if (n < 1 || n > kMaxSites) throw ValidationError("bipartition: bad site count");
    const std::uint32_t full = (1u << n) - 1u;
    if ((keep & ~full) != 0 || std::popcount(keep) < 2)
      throw ValidationError("bipartition: keep mask must contain at least 2 sites");
    if ((a & ~keep) != 0 || a == 0 || a == keep)
      throw ValidationError("bipartition: side A must be a nonempty proper subset of keep");
    Bipartition p{n, keep, a};
    // Canonical orientation: A holds the lowest kept site.
    const std::uint32_t lowest = keep & (~keep + 1u);
    if (!(a & lowest)) p.side_a = keep & ~a;
    return p;
  }

  /// Parses labels like "a-bc" (global) or "a-b" on a larger chain (reduced):
  /// two disjoint groups of sorted site letters separated by '-'.
  static Bipartition parse(const std::string& label, int n) {
    const auto dash = label.find('-');
    if (dash == std::string::npos || dash == 0 || dash + 1 == label.size())
      throw ValidationError("bipartition '" + label + "': expected two groups split by '-'");
    auto group_mask = [&](const std::string& part) {
      std::uint32_t mask = 0;
      int prev = -1;
      for (char c : part) {
        const int site = c - 'a';
        if (c < 'a' || c > 'l' || site >= n)
          throw ValidationError("bipartition '" + label + "': site '" +
                                std::string(1, c) + "' out of range");
        if (site <= prev)
          throw ValidationError("bipartition '" + label + "': sites must be sorted and unique");
        prev = site;
        mask |= 1u << site;
      }
      return mask;
    };
    const std::uint32_t a = group_mask(label.substr(0, dash));
    const std::uint32_t b = group_mask(label.substr(dash + 1));
    if (a & b) throw ValidationError("bipartition '" + label + "': groups overlap");
    return make(n, a | b, a);
  }
};

inline bool operator==(const Bipartition& x, const Bipartition& y) {
  return x.n == y.n && x.keep == y.keep && x.side_a == y.side_a;
}

/// Reduced state on the sites of `keep_mask`, with their relative order kept.
inline DensityMatrix partial_trace(const DensityMatrix& rho, std::uint32_t keep_mask) {
  const std::uint32_t full = (1u << rho.n) - 1u;
  if (keep_mask == 0) throw ValidationError("partial_trace: empty keep mask");
  if (keep_mask & ~full) throw ValidationError("partial_trace: keep mask out of range");
  if (keep_mask == full) return rho;

  const auto kept = detail::mask_sites(keep_mask);
  const auto traced = detail::mask_sites(full & ~keep_mask);
  const int dk = 1 << kept.size();
  const int dt = 1 << traced.size();

  DensityMatrix out;
  out.n = static_cast<int>(kept.size());
  out.sector_blocked = rho.sector_blocked;  // tracing preserves [rho, S_z] = 0
  out.mat = Eigen::MatrixXd::Zero(dk, dk);

  std::vector<std::uint32_t> kept_expand(dk), traced_expand(dt);
  for (int r = 0; r < dk; ++r) kept_expand[r] = detail::scatter_bits(r, kept);
  for (int e = 0; e < dt; ++e) traced_expand[e] = detail::scatter_bits(e, traced);

  for (int r = 0; r < dk; ++r)
    for (int c = 0; c < dk; ++c) {
      double sum = 0.0;
      for (int e = 0; e < dt; ++e)
        sum += rho.mat(kept_expand[r] | traced_expand[e], kept_expand[c] | traced_expand[e]);
      out.mat(r, c) = sum;
    }
  return out;
}

/// Transpose of the indices belonging to `a_mask`:
/// <i_A i_B| M^{t_A} |j_A j_B> = <j_A i_B| M |i_A j_B>.
inline Eigen::MatrixXd partial_transpose(const Eigen::MatrixXd& mat, int n,
                                         std::uint32_t a_mask) {
  const std::uint32_t full = (1u << n) - 1u;
  if (mat.rows() != (1 << n) || mat.cols() != (1 << n))
    throw ValidationError("partial_transpose: dimension mismatch");
  if (a_mask == 0 || (a_mask & ~full))
    throw ValidationError("partial_transpose: bad subsystem mask");
  const std::uint32_t b_mask = full & ~a_mask;

  Eigen::MatrixXd out(mat.rows(), mat.cols());
  for (std::uint32_t i = 0; i <= full; ++i)
    for (std::uint32_t j = 0; j <= full; ++j)
      out(i, j) = mat((j & a_mask) | (i & b_mask), (i & a_mask) | (j & b_mask));
  return out;
}

inline Eigen::MatrixXd partial_transpose(const DensityMatrix& rho, const Bipartition& p) {
  if (!p.is_global() || p.n != rho.n)
    throw ValidationError("partial_transpose: bipartition does not match the state");
  return partial_transpose(rho.mat, rho.n, p.side_a);
}

struct NegativityReport {
  double value = 0.0;
  int negative_count = 0;
  Bipartition partition;

  // Filled in when the state under test is a thermal state of a known spec.
  struct ThermalPoint {
    double t = 0.0;      // reduced temperature T/|v_x|
    double delta = 0.0;  // v_z/|v_x|
    double bbar = 0.0;   // |b/v_x|
  };
  std::optional<ThermalPoint> thermal;
};

namespace detail {

inline void accumulate_negative_eigenvalues(const Eigen::VectorXd& evals, double eps_neg,
                                            double& value, int& count) {
  for (int k = 0; k < evals.size(); ++k) {
    if (evals(k) < 0.0) value -= evals(k);
    if (evals(k) < -eps_neg) ++count;
  }
}

// Negativity through the magnetization block structure of the partial
// transpose: when [rho, S_z] = 0, rho^{t_A} conserves q = M_B - M_A, so its
// spectrum splits over the q-groups and no full 2^n eigensolve is needed.
inline NegativityReport negativity_blocked(const DensityMatrix& rho, std::uint32_t a_mask,
                                           double eps_neg) {
  const int n = rho.n;
  const std::uint32_t full = (1u << n) - 1u;
  const std::uint32_t b_mask = full & ~a_mask;
  const int na = std::popcount(a_mask);
  const int nb = n - na;

  std::map<int, std::vector<std::uint32_t>> groups;
  for (std::uint32_t i = 0; i <= full; ++i) {
    const int twice_q = (nb - 2 * std::popcount(i & b_mask)) -
                        (na - 2 * std::popcount(i & a_mask));
    groups[twice_q].push_back(i);
  }

  NegativityReport report;
  for (const auto& [q, idx] : groups) {
    const int m = static_cast<int>(idx.size());
    Eigen::MatrixXd block(m, m);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) {
        const std::uint32_t i = idx[r], j = idx[c];
        block(r, c) = rho.mat((j & a_mask) | (i & b_mask), (i & a_mask) | (j & b_mask));
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block, Eigen::EigenvaluesOnly);
    accumulate_negative_eigenvalues(solver.eigenvalues(), eps_neg, report.value,
                                    report.negative_count);
  }
  return report;
}

inline DensityMatrix reduce_to_keep(const DensityMatrix& rho, const Bipartition& p,
                                    Bipartition& reduced_partition) {
  DensityMatrix red = partial_trace(rho, p.keep);
  const auto kept = mask_sites(p.keep);
  std::uint32_t a_new = 0;
  for (std::size_t k = 0; k < kept.size(); ++k)
    if ((p.side_a >> kept[k]) & 1u) a_new |= 1u << k;
  reduced_partition = Bipartition::make(red.n, (1u << red.n) - 1u, a_new);
  return red;
}

}  // namespace detail

/// Negativity via a full eigensolve of the partial transpose; reference path.
inline NegativityReport negativity_dense(const DensityMatrix& rho, const Bipartition& p,
                                         double eps_neg = kDefaultEpsNeg) {
  if (p.n != rho.n) throw ValidationError("negativity: bipartition/state mismatch");
  if (!p.is_global()) {
    Bipartition reduced;
    const DensityMatrix red = detail::reduce_to_keep(rho, p, reduced);
    NegativityReport report = negativity_dense(red, reduced, eps_neg);
    report.partition = p;
    return report;
  }
  Eigen::MatrixXd pt = partial_transpose(rho.mat, rho.n, p.side_a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(pt, Eigen::EigenvaluesOnly);
  NegativityReport report;
  report.partition = p;
  detail::accumulate_negative_eigenvalues(solver.eigenvalues(), eps_neg, report.value,
                                          report.negative_count);
  return report;
}

/// Negativity of `rho` across `p`: the absolute sum of the negative
/// eigenvalues of the partial transpose, plus their count above eps_neg.
/// Splits of a subsystem are evaluated on the partial trace. States flagged
/// as magnetization-blocked take the block-structured path.
inline NegativityReport negativity(const DensityMatrix& rho, const Bipartition& p,
                                   double eps_neg = kDefaultEpsNeg) {
  if (p.n != rho.n) throw ValidationError("negativity: bipartition/state mismatch");
  if (!p.is_global()) {
    Bipartition reduced;
    const DensityMatrix red = detail::reduce_to_keep(rho, p, reduced);
    NegativityReport report = negativity(red, reduced, eps_neg);
    report.partition = p;
    return report;
  }
  if (!rho.sector_blocked) return negativity_dense(rho, p, eps_neg);
  NegativityReport report = detail::negativity_blocked(rho, p.side_a, eps_neg);
  report.partition = p;
  return report;
}

/// Negativity of a pure state from its Schmidt spectrum lambda:
/// [ (sum_a sqrt(lambda_a))^2 - 1 ] / 2.
inline double negativity_from_schmidt(const Eigen::VectorXd& lambdas) {
  double s = 0.0;
  for (int k = 0; k < lambdas.size(); ++k) s += std::sqrt(std::max(lambdas(k), 0.0));
  return std::max(0.5 * (s * s - 1.0), 0.0);
}

/// Pure-state negativity across a global split, via the spectrum of the
/// reduced density on side A.
inline double pure_negativity(const Eigen::VectorXd& psi, const Bipartition& p) {
  if (!p.is_global()) throw ValidationError("pure_negativity: global splits only");
  if (psi.size() != (1 << p.n)) throw ValidationError("pure_negativity: dimension mismatch");
  if (std::abs(psi.norm() - 1.0) > 1e-10)
    throw ValidationError("pure_negativity: state not normalized");

  const auto a_sites = detail::mask_sites(p.side_a);
  const auto b_sites = detail::mask_sites(p.side_b());
  const int da = 1 << a_sites.size();
  const int db = 1 << b_sites.size();
  Eigen::MatrixXd coeff(da, db);
  for (int r = 0; r < da; ++r) {
    const std::uint32_t ra = detail::scatter_bits(r, a_sites);
    for (int c = 0; c < db; ++c)
      coeff(r, c) = psi(ra | detail::scatter_bits(c, b_sites));
  }
  Eigen::MatrixXd rho_a = coeff * coeff.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(rho_a, Eigen::EigenvaluesOnly);
  return negativity_from_schmidt(solver.eigenvalues());
}

/// Tr(sqrt(rho) - rho): a concave, non-additive entropy, zero exactly on pure
/// states. For a pure global state, N_A = [(S_f(rho_A) + 1)^2 - 1]/2.
inline double sf_entropy(const DensityMatrix& rho_reduced, double psd_tol = 1e-8) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(rho_reduced.mat,
                                                        Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (int k = 0; k < solver.eigenvalues().size(); ++k) {
    const double lam = solver.eigenvalues()(k);
    if (lam < -psd_tol) throw ValidationError("sf_entropy: state not positive semidefinite");
    const double clamped = std::max(lam, 0.0);
    s += std::sqrt(clamped) - clamped;
  }
  return s;
}

/// Tr(rho - I/d)^2 - 1/(d(d-1)); non-positive inside the ball of states that
/// are separable for every bipartition.
inline double separability_ball_margin(const DensityMatrix& rho) {
  const double d = rho.dimension();
  const double dist_sq = rho.mat.squaredNorm() - 2.0 * rho.mat.trace() / d + 1.0 / d;
  return dist_sq - 1.0 / (d * (d - 1.0));
}

inline bool separability_ball_test(const DensityMatrix& rho) {
  return separability_ball_margin(rho) <= 0.0;
}

/// Max deviation between the partial transpose of D(b) = exp(-H/T) and
/// exp(-b S_z / 2T) D(0)^{t_A} exp(-b S_z / 2T), both computed from the same
/// spec (with the field removed on the right-hand side). The field term only
/// rescales the partial transpose congruently, so it can never change the
/// sign pattern of the spectrum.
inline double pt_field_factorization_check(const ChainSpec& spec, const Bipartition& p,
                                           double temperature) {
  if (!p.is_global() || p.n != spec.n)
    throw ValidationError("factorization check needs a global bipartition");
  if (!(temperature > 0.0)) throw std::domain_error("factorization check requires T > 0");

  ChainSpec zero_field = spec;
  zero_field.b = 0.0;
  const SpectralDecomposition with_b = eigendecompose(build_hamiltonian(spec));
  const SpectralDecomposition no_b = eigendecompose(build_hamiltonian(zero_field));

  // One common shift keeps both exponentials representable and cancels in the
  // comparison.
  const double e_ref = with_b.min_energy();
  auto boltzmann = [&](const SpectralDecomposition& decomp) {
    const int d = decomp.dimension();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);
    for (const auto& s : decomp.sectors) {
      Eigen::VectorXd w = ((s.energies.array() - e_ref) / -temperature).exp();
      Eigen::MatrixXd block = s.vectors * w.asDiagonal() * s.vectors.transpose();
      for (int r = 0; r < static_cast<int>(s.basis.size()); ++r)
        for (int c = 0; c < static_cast<int>(s.basis.size()); ++c)
          out(s.basis[r], s.basis[c]) = block(r, c);
    }
    return out;
  };

  const Eigen::MatrixXd lhs = partial_transpose(boltzmann(with_b), spec.n, p.side_a);
  const Eigen::MatrixXd pt0 = partial_transpose(boltzmann(no_b), spec.n, p.side_a);

  const int d = 1 << spec.n;
  Eigen::VectorXd field_factor(d);
  for (int i = 0; i < d; ++i)
    field_factor(i) = std::exp(-spec.b * 0.5 * twice_magnetization(i, spec.n) /
                               (2.0 * temperature));
  const Eigen::MatrixXd rhs =
      field_factor.asDiagonal() * pt0 * field_factor.asDiagonal();
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

}  // namespace xxzent
