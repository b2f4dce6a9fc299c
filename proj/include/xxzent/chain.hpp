#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "xxzent/common.hpp"

namespace xxzent {

enum class Topology { CyclicNN, FullyConnected, SinglePair };

inline std::string to_string(Topology t) {
  switch (t) {
    case Topology::CyclicNN: return "cyclic-nn";
    case Topology::FullyConnected: return "fully-connected";
    case Topology::SinglePair: return "single-pair";
  }
  return "?";
}

inline Topology topology_from_string(const std::string& s) {
  if (s == "cyclic-nn") return Topology::CyclicNN;
  if (s == "fully-connected") return Topology::FullyConnected;
  if (s == "single-pair") return Topology::SinglePair;
  throw ValidationError("unknown topology '" + s + "'");
}

/// Physical model: n spin-1/2 sites coupled by an XX term v_x and a ZZ term
/// v_z over the topology's bond set, in a uniform longitudinal field b.
/// H = b S_z - sum_{bonds (i,j)} [ v_x (sx_i sx_j + sy_i sy_j) + v_z sz_i sz_j ].
struct ChainSpec {
  int n = 2;
  Topology topology = Topology::CyclicNN;
  double vx = 1.0;
  double vz = 0.0;
  double b = 0.0;

  /// Anisotropy delta = v_z / |v_x|.
  double delta() const {
    if (vx == 0.0) throw ValidationError("anisotropy undefined for v_x = 0");
    return vz / std::abs(vx);
  }

  /// Reduced field bbar = |b / v_x|.
  double reduced_field() const {
    if (vx == 0.0) throw ValidationError("reduced field undefined for v_x = 0");
    return std::abs(b / vx);
  }

  int v_sign() const { return vx >= 0.0 ? +1 : -1; }

  void validate() const {
    if (n < 2) throw ValidationError("chain needs at least 2 sites");
    if (n > kMaxSites)
      throw CapacityError("n = " + std::to_string(n) + " exceeds dense capacity (max " +
                          std::to_string(kMaxSites) + ")");
    if (topology == Topology::SinglePair && n != 2)
      throw ValidationError("single-pair topology requires n = 2");
  }

  /// Spec in reduced units: |v_x| = 1, v_z = delta, b = bbar.
  static ChainSpec reduced(int n, Topology topology, int v_sign, double delta,
                           double bbar = 0.0) {
    ChainSpec s;
    s.n = n;
    s.topology = topology;
    s.vx = v_sign >= 0 ? 1.0 : -1.0;
    s.vz = delta;
    s.b = bbar;
    s.validate();
    return s;
  }
};

// Basis convention: bit i of a computational index is site i (site a = bit 0);
// bit value 0 is spin up (m = +1/2), 1 is spin down (m = -1/2).
inline int twice_magnetization(std::uint32_t bits, int n) {
  return n - 2 * std::popcount(bits);
}

/// Basis indices grouped by the total S_z eigenvalue (stored as 2M).
struct SectorIndex {
  std::map<int, std::vector<int>> by_twice_m;

  int dimension() const {
    int d = 0;
    for (const auto& [m, idx] : by_twice_m) d += static_cast<int>(idx.size());
    return d;
  }
};

inline SectorIndex build_sector_index(int n) {
  SectorIndex index;
  for (int s = 0; s < (1 << n); ++s)
    index.by_twice_m[twice_magnetization(static_cast<std::uint32_t>(s), n)].push_back(s);
  return index;
}

// Bond list as unordered pairs i < j; the cyclic wrap bond (n-1, 0) coincides
// with (0, 1) for n = 2, so a two-site ring carries a single bond.
inline std::vector<std::pair<int, int>> bonds(const ChainSpec& spec) {
  std::vector<std::pair<int, int>> out;
  switch (spec.topology) {
    case Topology::SinglePair:
      out.emplace_back(0, 1);
      break;
    case Topology::CyclicNN:
      for (int i = 0; i < spec.n; ++i) {
        int a = i, b = (i + 1) % spec.n;
        if (a > b) std::swap(a, b);
        if (std::find(out.begin(), out.end(), std::make_pair(a, b)) == out.end())
          out.emplace_back(a, b);
      }
      break;
    case Topology::FullyConnected:
      for (int i = 0; i < spec.n; ++i)
        for (int j = i + 1; j < spec.n; ++j) out.emplace_back(i, j);
      break;
  }
  return out;
}

struct Hamiltonian {
  int n = 0;
  Eigen::MatrixXd mat;
  SectorIndex sectors;

  int dimension() const { return static_cast<int>(mat.rows()); }
};

/// Dense XXZ Hamiltonian in the computational basis. Commutes with S_z, so it
/// is block diagonal over the magnetization sectors.
inline Hamiltonian build_hamiltonian(const ChainSpec& spec) {
  spec.validate();
  const int n = spec.n;
  const int d = 1 << n;
  const auto edge_list = bonds(spec);

  Hamiltonian h;
  h.n = n;
  h.mat = Eigen::MatrixXd::Zero(d, d);
  h.sectors = build_sector_index(n);

  for (int s = 0; s < d; ++s) {
    const auto bits = static_cast<std::uint32_t>(s);
    double diag = spec.b * 0.5 * twice_magnetization(bits, n);
    for (const auto& [i, j] : edge_list) {
      const double mi = (bits >> i) & 1u ? -0.5 : 0.5;
      const double mj = (bits >> j) & 1u ? -0.5 : 0.5;
      diag -= spec.vz * mi * mj;
      // Hopping connects states with the pair (i, j) anti-aligned.
      if (((bits >> i) & 1u) != ((bits >> j) & 1u)) {
        const int flipped = s ^ ((1 << i) | (1 << j));
        h.mat(s, flipped) += -0.5 * spec.vx;
      }
    }
    h.mat(s, s) = diag;
  }
  return h;
}

/// Level degeneracy of total spin S in the 2^n-dimensional product space:
/// C(n, k) - C(n, k-1) with k = (n - 2S)/2.
inline int spin_multiplicity(int n, int twice_s) {
  if (twice_s < 0 || twice_s > n || (n - twice_s) % 2 != 0)
    throw ValidationError("invalid total spin for this n");
  const int k = (n - twice_s) / 2;
  auto binom = [](int nn, int kk) -> long long {
    if (kk < 0 || kk > nn) return 0;
    long long r = 1;
    for (int i = 1; i <= kk; ++i) r = r * (nn - kk + i) / i;
    return r;
  };
  return static_cast<int>(binom(n, k) - binom(n, k - 1));
}

/// Energy of a |S, M> level when H reduces to total-spin form:
/// E = b M - [v S(S+1) + M^2 (v_z - v)]/2 + n(2v + v_z)/8, v = v_x.
/// Valid for single-pair, cyclic chains with n <= 3, and the fully connected
/// coupling at any n.
inline double total_spin_energy(const ChainSpec& spec, int twice_s, int twice_m) {
  spec.validate();
  const bool collective = spec.topology == Topology::SinglePair ||
                          spec.topology == Topology::FullyConnected ||
                          (spec.topology == Topology::CyclicNN && spec.n <= 3);
  if (!collective)
    throw UnsupportedCaseError("total-spin energies require single-pair, cyclic n <= 3, "
                               "or fully connected coupling");
  if (twice_s < 0 || twice_s > spec.n || (spec.n - twice_s) % 2 != 0 ||
      std::abs(twice_m) > twice_s || (twice_s - twice_m) % 2 != 0)
    throw ValidationError("invalid (S, M) pair");

  const double v = spec.vx;
  const double s_sq = 0.25 * twice_s * (twice_s + 2);  // S(S+1)
  const double m = 0.5 * twice_m;
  const double e0 = spec.n * (2.0 * v + spec.vz) / 8.0;
  return spec.b * m - 0.5 * (v * s_sq + m * m * (spec.vz - v)) + e0;
}

/// Ground-state level-crossing anisotropy for the tabulated |M| -> |M|+1
/// transitions of the cyclic chain, as a function of bbar = |b/v|.
/// `twice_m_from` = 2|M| of the lower-|M| phase; the last transition
/// (twice_m_from = n-2) ends in the aligned state.
inline double transition_line(int n, Topology topology, int v_sign, int twice_m_from,
                              double bbar) {
  if (bbar < 0) throw ValidationError("bbar must be non-negative");
  const bool chainlike = topology == Topology::CyclicNN ||
                         (topology == Topology::SinglePair && n == 2);
  if (!chainlike)
    throw UnsupportedCaseError("transition lines tabulated for the cyclic chain only");

  const double sqrt5 = std::sqrt(5.0);
  if (twice_m_from == n - 2) {
    // Aligned-state border. For n = 2 the single bond halves the exchange
    // gain of the |1,0> state, shifting the crossing to 1 - 2 bbar.
    if (n == 2) return 1.0 - 2.0 * bbar;
    if (v_sign > 0 || n % 2 == 0) return 1.0 - bbar;
    if (n == 5) return 0.25 * (1.0 + sqrt5) - bbar;
    throw UnsupportedCaseError("aligned border untabulated for v < 0, odd n != 5");
  }
  if (n == 4 && twice_m_from == 0)
    return (1.0 - 2.0 * bbar - bbar * bbar) / (1.0 + bbar);
  if (n == 5 && twice_m_from == 1) {
    if (v_sign > 0) return (1.0 - bbar - bbar * bbar) / (1.0 + bbar);
    return -(bbar - 0.5) * (4.0 * bbar + 3.0 + sqrt5) / (4.0 * bbar + 1.0 + sqrt5);
  }
  throw UnsupportedCaseError("transition not tabulated; use a numerical crossing search");
}

struct GroundManifold {
  double energy = 0.0;
  Eigen::MatrixXd vectors;     // columns: orthonormal ground states, full basis
  std::vector<int> twice_m;    // magnetization of each column

  int degeneracy() const { return static_cast<int>(vectors.cols()); }
};

/// All eigenvectors within tol (relative to max(1, |E_min|)) of the lowest
/// eigenvalue, solved sector by sector.
inline GroundManifold ground_manifold(const ChainSpec& spec, double tol = 1e-10) {
  const Hamiltonian h = build_hamiltonian(spec);
  struct SectorEig {
    int twice_m;
    std::vector<int> basis;
    Eigen::VectorXd evals;
    Eigen::MatrixXd evecs;
  };
  std::vector<SectorEig> eigs;
  double e_min = std::numeric_limits<double>::infinity();
  for (const auto& [tm, basis] : h.sectors.by_twice_m) {
    Eigen::MatrixXd block = h.mat(basis, basis);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block);
    e_min = std::min(e_min, solver.eigenvalues()(0));
    eigs.push_back({tm, basis, solver.eigenvalues(), solver.eigenvectors()});
  }

  const double cutoff = e_min + tol * std::max(1.0, std::abs(e_min));
  GroundManifold gm;
  gm.energy = e_min;
  std::vector<std::pair<const SectorEig*, int>> hits;
  for (const auto& se : eigs)
    for (int k = 0; k < se.evals.size() && se.evals(k) <= cutoff; ++k)
      hits.emplace_back(&se, k);

  gm.vectors = Eigen::MatrixXd::Zero(h.dimension(), static_cast<int>(hits.size()));
  for (int c = 0; c < static_cast<int>(hits.size()); ++c) {
    const auto& [se, k] = hits[c];
    for (int r = 0; r < static_cast<int>(se->basis.size()); ++r)
      gm.vectors(se->basis[r], c) = se->evecs(r, k);
    gm.twice_m.push_back(se->twice_m);
  }
  return gm;
}

}  // namespace xxzent
