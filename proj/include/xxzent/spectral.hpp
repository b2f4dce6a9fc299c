#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

#include "xxzent/chain.hpp"
#include "xxzent/common.hpp"

namespace xxzent {

struct SectorDecomposition {
  int twice_m = 0;
  std::vector<int> basis;    // computational-basis indices of this sector
  Eigen::VectorXd energies;  // ascending
  Eigen::MatrixXd vectors;   // columns, expressed in the sector sub-basis
};

struct SpectralDecomposition {
  int n = 0;
  std::vector<SectorDecomposition> sectors;

  int dimension() const {
    int d = 0;
    for (const auto& s : sectors) d += static_cast<int>(s.basis.size());
    return d;
  }

  double min_energy() const {
    double e = std::numeric_limits<double>::infinity();
    for (const auto& s : sectors)
      if (s.energies.size() > 0) e = std::min(e, s.energies(0));
    return e;
  }
};

/// Sector-wise dense symmetric eigensolve. Rejects inputs that are not
/// symmetric or that couple different sectors (max offending element > 1e-9).
inline SpectralDecomposition eigendecompose(const Eigen::MatrixXd& mat,
                                            const SectorIndex& sectors, int n) {
  if (mat.rows() != mat.cols()) throw ValidationError("matrix not square");
  const double asym = (mat - mat.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9) throw ValidationError("matrix not symmetric");

  // Cross-sector elements would be silently dropped by the block solve.
  std::vector<int> sector_of(mat.rows(), -1);
  int tag = 0;
  for (const auto& [tm, basis] : sectors.by_twice_m) {
    for (int i : basis) sector_of[i] = tag;
    ++tag;
  }
  for (int i = 0; i < mat.rows(); ++i)
    for (int j = i + 1; j < mat.cols(); ++j)
      if (sector_of[i] != sector_of[j] && std::abs(mat(i, j)) > 1e-9)
        throw ValidationError("matrix couples different magnetization sectors");

  SpectralDecomposition out;
  out.n = n;
  for (const auto& [tm, basis] : sectors.by_twice_m) {
    SectorDecomposition sd;
    sd.twice_m = tm;
    sd.basis = basis;
    Eigen::MatrixXd block = mat(basis, basis);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block);
    sd.energies = solver.eigenvalues();
    sd.vectors = solver.eigenvectors();
    out.sectors.push_back(std::move(sd));
  }
  return out;
}

inline SpectralDecomposition eigendecompose(const Hamiltonian& h) {
  return eigendecompose(h.mat, h.sectors, h.n);
}

/// Same eigenvectors with energies shifted by delta_b * M per sector; valid
/// because the field term b S_z commutes with the rest of H.
inline SpectralDecomposition with_field_shift(SpectralDecomposition decomp,
                                              double delta_b) {
  for (auto& s : decomp.sectors)
    s.energies.array() += delta_b * 0.5 * s.twice_m;
  return decomp;
}

struct DensityMatrix {
  int n = 0;
  Eigen::MatrixXd mat;
  // Set when the state is known to commute with S_z; enables the
  // block-structured negativity path.
  bool sector_blocked = false;

  int dimension() const { return static_cast<int>(mat.rows()); }
};

/// Gibbs state at temperature T > 0 (k_B = 1). Populations are computed with
/// energies shifted by the ground energy, which leaves the state unchanged
/// but avoids overflow.
inline DensityMatrix thermal_state(const SpectralDecomposition& decomp, double temperature) {
  if (!(temperature > 0.0))
    throw std::domain_error("thermal_state requires T > 0; use zero_T_limit for T -> 0");
  const double e_min = decomp.min_energy();
  const int d = decomp.dimension();

  DensityMatrix rho;
  rho.n = decomp.n;
  rho.sector_blocked = true;
  rho.mat = Eigen::MatrixXd::Zero(d, d);

  double z = 0.0;
  for (const auto& s : decomp.sectors)
    for (int k = 0; k < s.energies.size(); ++k)
      z += std::exp(-(s.energies(k) - e_min) / temperature);

  for (const auto& s : decomp.sectors) {
    Eigen::VectorXd w = ((s.energies.array() - e_min) / -temperature).exp() / z;
    Eigen::MatrixXd block = s.vectors * w.asDiagonal() * s.vectors.transpose();
    for (int r = 0; r < static_cast<int>(s.basis.size()); ++r)
      for (int c = 0; c < static_cast<int>(s.basis.size()); ++c)
        rho.mat(s.basis[r], s.basis[c]) = block(r, c);
  }
  return rho;
}

/// Equal mixture over the (possibly degenerate) ground manifold: the T -> 0
/// limit of the Gibbs state.
inline DensityMatrix zero_T_limit(const SpectralDecomposition& decomp,
                                  double degeneracy_tol = 1e-10) {
  const double e_min = decomp.min_energy();
  const double cutoff = e_min + degeneracy_tol * std::max(1.0, std::abs(e_min));
  const int d = decomp.dimension();

  DensityMatrix rho;
  rho.n = decomp.n;
  rho.sector_blocked = true;
  rho.mat = Eigen::MatrixXd::Zero(d, d);

  int g = 0;
  for (const auto& s : decomp.sectors)
    for (int k = 0; k < s.energies.size() && s.energies(k) <= cutoff; ++k) ++g;

  for (const auto& s : decomp.sectors) {
    for (int k = 0; k < s.energies.size() && s.energies(k) <= cutoff; ++k) {
      Eigen::VectorXd v = s.vectors.col(k);
      for (int r = 0; r < static_cast<int>(s.basis.size()); ++r)
        for (int c = 0; c < static_cast<int>(s.basis.size()); ++c)
          rho.mat(s.basis[r], s.basis[c]) += v(r) * v(c) / g;
    }
  }
  return rho;
}

/// Partition function as scaled * exp(-shift / T), with the shift (the ground
/// energy) reported separately so Z stays representable at low T.
struct PartitionFunctionValue {
  double scaled = 0.0;
  double shift = 0.0;
  double temperature = 0.0;

  double log_value() const { return std::log(scaled) - shift / temperature; }
  double value() const { return scaled * std::exp(-shift / temperature); }
};

inline PartitionFunctionValue partition_function(const SpectralDecomposition& decomp,
                                                 double temperature) {
  if (!(temperature > 0.0)) throw std::domain_error("partition function requires T > 0");
  PartitionFunctionValue z;
  z.shift = decomp.min_energy();
  z.temperature = temperature;
  for (const auto& s : decomp.sectors)
    for (int k = 0; k < s.energies.size(); ++k)
      z.scaled += std::exp(-(s.energies(k) - z.shift) / temperature);
  return z;
}

}  // namespace xxzent
