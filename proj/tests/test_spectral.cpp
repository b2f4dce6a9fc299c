#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "test_util.hpp"
#include "xxzent/analytic.hpp"
#include "xxzent/spectral.hpp"

using namespace xxzent;
using namespace xxzent::test;
using Catch::Approx;

namespace {

SectorIndex single_sector(int dim) {
  SectorIndex index;
  for (int i = 0; i < dim; ++i) index.by_twice_m[0].push_back(i);
  return index;
}

Eigen::MatrixXd reconstruct(const SpectralDecomposition& decomp) {
  const int d = decomp.dimension();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);
  for (const auto& s : decomp.sectors) {
    Eigen::MatrixXd block = s.vectors * s.energies.asDiagonal() * s.vectors.transpose();
    for (int r = 0; r < static_cast<int>(s.basis.size()); ++r)
      for (int c = 0; c < static_cast<int>(s.basis.size()); ++c)
        out(s.basis[r], s.basis[c]) = block(r, c);
  }
  return out;
}

std::vector<double> all_energies(const SpectralDecomposition& decomp) {
  std::vector<double> out;
  for (const auto& s : decomp.sectors)
    for (int k = 0; k < s.energies.size(); ++k) out.push_back(s.energies(k));
  return out;
}

void require_valid_density(const DensityMatrix& rho) {
  REQUIRE(std::abs(rho.mat.trace() - 1.0) < 1e-10);
  REQUIRE((rho.mat - rho.mat.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(rho.mat, Eigen::EigenvaluesOnly);
  REQUIRE(solver.eigenvalues()(0) >= -1e-10);
}

}  // namespace

TEST_CASE("eigendecompose handles the zero operator", "[spectral]") {
  const Hamiltonian h = build_hamiltonian(ChainSpec{3, Topology::CyclicNN, 0, 0, 0});
  const SpectralDecomposition decomp = eigendecompose(h);
  for (const auto& s : decomp.sectors) {
    REQUIRE(s.energies.cwiseAbs().maxCoeff() == 0.0);
    REQUIRE((s.vectors.transpose() * s.vectors -
             Eigen::MatrixXd::Identity(s.vectors.cols(), s.vectors.cols()))
                .cwiseAbs()
                .maxCoeff() < 1e-12);
  }
}

TEST_CASE("two-site decomposition matches the total-spin levels", "[spectral]") {
  const ChainSpec spec = ChainSpec::reduced(2, Topology::SinglePair, -1, 0.7, 0.4);
  const auto decomp = eigendecompose(build_hamiltonian(spec));
  const std::vector<double> closed = {
      total_spin_energy(spec, 2, 2), total_spin_energy(spec, 2, 0),
      total_spin_energy(spec, 2, -2), total_spin_energy(spec, 0, 0)};
  REQUIRE(max_multiset_gap(all_energies(decomp), closed) < 1e-12);
}

TEST_CASE("random symmetric matrices reconstruct through the decomposition", "[spectral]") {
  std::mt19937 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd m(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) m(i, j) = gauss(rng);
  m = (0.5 * (m + m.transpose())).eval();

  const SpectralDecomposition decomp = eigendecompose(m, single_sector(8), 3);
  const double scale = m.cwiseAbs().maxCoeff();
  REQUIRE((reconstruct(decomp) - m).cwiseAbs().maxCoeff() < 1e-10 * scale);
  for (const auto& s : decomp.sectors) {
    REQUIRE((s.vectors.transpose() * s.vectors -
             Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-10);
    for (int k = 1; k < s.energies.size(); ++k)
      REQUIRE(s.energies(k) >= s.energies(k - 1));
  }
}

TEST_CASE("eigendecompose rejects bad inputs", "[spectral]") {
  Eigen::MatrixXd asym = Eigen::MatrixXd::Zero(4, 4);
  asym(0, 1) = 1e-6;
  REQUIRE_THROWS_AS(eigendecompose(asym, single_sector(4), 2), ValidationError);

  // An operator that couples different magnetization sectors.
  Eigen::MatrixXd mixing = Eigen::MatrixXd::Zero(4, 4);
  mixing(0, 1) = mixing(1, 0) = 0.5;  // |up up> <-> |down up|
  REQUIRE_THROWS_AS(eigendecompose(mixing, build_sector_index(2), 2), ValidationError);
}

TEST_CASE("thermal state approaches I/d at infinite temperature", "[spectral]") {
  const ChainSpec spec = ChainSpec::reduced(4, Topology::CyclicNN, +1, -1.0, 0.5);
  const DensityMatrix rho = thermal_state(eigendecompose(build_hamiltonian(spec)), 1e12);
  REQUIRE((rho.mat - Eigen::MatrixXd::Identity(16, 16) / 16.0).cwiseAbs().maxCoeff() <
          1e-10);
}

TEST_CASE("two-site thermal populations are the total-spin Boltzmann weights",
          "[spectral]") {
  const ChainSpec spec = ChainSpec::reduced(2, Topology::SinglePair, +1, -0.6, 0.8);
  const double t = 0.9;
  const DensityMatrix rho = thermal_state(eigendecompose(build_hamiltonian(spec)), t);
  const TwoQubitWeights w = thermal_weights_n2(spec, t);
  REQUIRE(max_multiset_gap(sorted_eigenvalues(rho.mat),
                           {w.p1_plus, w.p1_zero, w.p1_minus, w.p0}) < 1e-12);
}

TEST_CASE("thermal states satisfy the density-matrix contract", "[spectral]") {
  for (const ChainSpec spec :
       {ChainSpec::reduced(3, Topology::CyclicNN, +1, -2.0, 0.4),
        ChainSpec::reduced(5, Topology::CyclicNN, -1, 1.5, 1.0),
        ChainSpec::reduced(4, Topology::FullyConnected, +1, 0.3, 0.0)}) {
    const auto decomp = eigendecompose(build_hamiltonian(spec));
    for (double t : {0.05, 0.7, 10.0}) {
      const DensityMatrix rho = thermal_state(decomp, t);
      require_valid_density(rho);
      REQUIRE(rho.sector_blocked);
      // [rho, S_z] = 0: nothing between sectors.
      const auto index = build_sector_index(spec.n);
      std::vector<int> sector_of(rho.dimension());
      for (const auto& [tm, basis] : index.by_twice_m)
        for (int i : basis) sector_of[i] = tm;
      double cross = 0.0;
      for (int i = 0; i < rho.dimension(); ++i)
        for (int j = 0; j < rho.dimension(); ++j)
          if (sector_of[i] != sector_of[j]) cross = std::max(cross, std::abs(rho.mat(i, j)));
      REQUIRE(cross < 1e-12);
    }
  }
}

TEST_CASE("populations equal the softmax of -E/T", "[spectral]") {
  const ChainSpec spec = ChainSpec::reduced(3, Topology::CyclicNN, -1, 0.9, 0.2);
  const auto decomp = eigendecompose(build_hamiltonian(spec));
  const double t = 0.6;
  const DensityMatrix rho = thermal_state(decomp, t);
  std::vector<double> weights;
  double z = 0.0;
  for (double e : all_energies(decomp)) {
    weights.push_back(std::exp(-(e - decomp.min_energy()) / t));
    z += weights.back();
  }
  for (auto& w : weights) w /= z;
  REQUIRE(max_multiset_gap(sorted_eigenvalues(rho.mat), weights) < 1e-12);
}

TEST_CASE("mean energy decreases with temperature", "[spectral]") {
  const ChainSpec spec = ChainSpec::reduced(4, Topology::CyclicNN, +1, -0.5, 0.3);
  const Hamiltonian h = build_hamiltonian(spec);
  const auto decomp = eigendecompose(h);
  double prev = std::numeric_limits<double>::infinity();
  for (double t : {20.0, 5.0, 1.0, 0.3, 0.05}) {
    const double energy = (thermal_state(decomp, t).mat * h.mat).trace();
    REQUIRE(energy <= prev + 1e-12);
    prev = energy;
  }
}

TEST_CASE("thermal_state rejects non-positive temperatures", "[spectral]") {
  const auto decomp =
      eigendecompose(build_hamiltonian(ChainSpec::reduced(2, Topology::SinglePair, +1, 0.0)));
  REQUIRE_THROWS_AS(thermal_state(decomp, 0.0), std::domain_error);
  REQUIRE_THROWS_AS(thermal_state(decomp, -1.0), std::domain_error);
}

TEST_CASE("zero-temperature limits", "[spectral]") {
  // Unique ground state: a projector.
  {
    const auto decomp = eigendecompose(
        build_hamiltonian(ChainSpec::reduced(3, Topology::CyclicNN, +1, 0.2, 0.3)));
    const DensityMatrix rho = zero_T_limit(decomp);
    REQUIRE((rho.mat * rho.mat - rho.mat).cwiseAbs().maxCoeff() < 1e-12);
    require_valid_density(rho);
  }
  // v > 0, b = 0: equal mixture of the two symmetric |3/2, +-1/2> states.
  {
    const auto decomp = eigendecompose(
        build_hamiltonian(ChainSpec::reduced(3, Topology::CyclicNN, +1, 0.2, 0.0)));
    ThreeQubitWeights w;
    w.p32_plus1 = w.p32_minus1 = 0.5;
    REQUIRE((zero_T_limit(decomp).mat - to_density_matrix(w).mat).cwiseAbs().maxCoeff() <
            1e-12);
  }
  // v < 0, b = 0: quarter weight on each of the four S = 1/2 states.
  {
    const auto decomp = eigendecompose(
        build_hamiltonian(ChainSpec::reduced(3, Topology::CyclicNN, -1, 0.0, 0.0)));
    ThreeQubitWeights w;
    w.p12_plus = w.p12_minus = 0.25;
    REQUIRE((zero_T_limit(decomp).mat - to_density_matrix(w).mat).cwiseAbs().maxCoeff() <
            1e-12);
  }
}

TEST_CASE("zero_T_limit is the small-T limit of the Gibbs state", "[spectral]") {
  const ChainSpec spec = ChainSpec::reduced(3, Topology::CyclicNN, +1, -0.4, 0.35);
  const auto decomp = eigendecompose(build_hamiltonian(spec));
  auto energies = all_energies(decomp);
  std::sort(energies.begin(), energies.end());
  const double gap = energies[1] - energies[0];
  REQUIRE(gap > 1e-6);
  const double t_small = gap / 50.0;
  REQUIRE((thermal_state(decomp, t_small).mat - zero_T_limit(decomp).mat)
              .cwiseAbs()
              .maxCoeff() < 1e-8);
}

TEST_CASE("partition function", "[spectral]") {
  // H = 0: Z = d at any temperature.
  const auto zero = eigendecompose(build_hamiltonian(ChainSpec{3, Topology::CyclicNN, 0, 0, 0}));
  REQUIRE(partition_function(zero, 2.5).value() == Approx(8.0));

  // Two sites: direct total-spin summation.
  const ChainSpec spec = ChainSpec::reduced(2, Topology::SinglePair, +1, 0.5, 0.6);
  const double t = 0.8;
  const double direct = std::exp(-total_spin_energy(spec, 2, 2) / t) +
                        std::exp(-total_spin_energy(spec, 2, 0) / t) +
                        std::exp(-total_spin_energy(spec, 2, -2) / t) +
                        std::exp(-total_spin_energy(spec, 0, 0) / t);
  const auto decomp = eigendecompose(build_hamiltonian(spec));
  const auto z = partition_function(decomp, t);
  REQUIRE(z.value() == Approx(direct).epsilon(1e-12));
  REQUIRE(z.log_value() == Approx(std::log(direct)).epsilon(1e-12));

  // Ratio against brute-force summation at another temperature.
  const auto z2 = partition_function(decomp, 2.0 * t);
  double direct2 = 0.0;
  for (double e : all_energies(decomp)) direct2 += std::exp(-e / (2.0 * t));
  REQUIRE(z.value() / z2.value() == Approx(direct / direct2).epsilon(1e-12));
  REQUIRE_THROWS_AS(partition_function(decomp, 0.0), std::domain_error);
}

TEST_CASE("field shift reuses eigenvectors", "[spectral]") {
  const ChainSpec base = ChainSpec::reduced(4, Topology::CyclicNN, +1, -0.7, 0.0);
  ChainSpec shifted = base;
  shifted.b = 1.3;
  const auto direct = eigendecompose(build_hamiltonian(shifted));
  const auto via_shift = with_field_shift(eigendecompose(build_hamiltonian(base)), 1.3);
  REQUIRE(max_multiset_gap(all_energies(direct), all_energies(via_shift)) < 1e-10);
  const DensityMatrix a = thermal_state(direct, 0.7);
  const DensityMatrix b = thermal_state(via_shift, 0.7);
  REQUIRE((a.mat - b.mat).cwiseAbs().maxCoeff() < 1e-12);
}
