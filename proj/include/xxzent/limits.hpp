#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "xxzent/chain.hpp"
#include "xxzent/common.hpp"
#include "xxzent/entanglement.hpp"
#include "xxzent/spectral.hpp"

namespace xxzent {

// Temperatures in this module are reduced units t = T / |v_x|.

struct ProfileSample {
  double t = 0.0;
  double value = 0.0;
  int k = 0;  // negative partial-transpose eigenvalues
};

struct NegativityProfile {
  ChainSpec spec;
  Bipartition partition;
  std::vector<ProfileSample> samples;
};

inline std::vector<double> log_spaced_grid(double t_min, double t_max, int points) {
  if (!(t_min > 0.0) || !(t_max > t_min) || points < 2)
    throw ValidationError("log grid needs 0 < t_min < t_max and >= 2 points");
  std::vector<double> grid(points);
  const double l0 = std::log(t_min), l1 = std::log(t_max);
  for (int i = 0; i < points; ++i)
    grid[i] = std::exp(l0 + (l1 - l0) * i / (points - 1));
  return grid;
}

/// One eigendecomposition per spec, reused across every temperature and
/// bipartition evaluated on it.
class ThermalNegativityEngine {
 public:
  explicit ThermalNegativityEngine(const ChainSpec& spec)
      : spec_(spec), decomp_(eigendecompose(build_hamiltonian(spec))) {}

  ThermalNegativityEngine(const ChainSpec& spec, SpectralDecomposition decomp)
      : spec_(spec), decomp_(std::move(decomp)) {}

  /// Engine for the same couplings at a different field, reusing the
  /// eigenvectors (the field only shifts sector energies by b M).
  ThermalNegativityEngine with_field(double new_b) const {
    ChainSpec shifted = spec_;
    shifted.b = new_b;
    return {shifted, with_field_shift(decomp_, new_b - spec_.b)};
  }

  const ChainSpec& spec() const { return spec_; }
  const SpectralDecomposition& decomposition() const { return decomp_; }

  DensityMatrix state(double t) const {
    return thermal_state(decomp_, t * std::abs(spec_.vx));
  }

  NegativityReport eval(double t, const Bipartition& p,
                        double eps_neg = kDefaultEpsNeg) const {
    NegativityReport report = negativity(state(t), p, eps_neg);
    if (spec_.vx != 0.0) report.thermal = {t, spec_.delta(), spec_.reduced_field()};
    return report;
  }

 private:
  ChainSpec spec_;
  SpectralDecomposition decomp_;
};

/// Negativity of every partition at every grid temperature; the thermal state
/// is assembled once per grid point and shared across partitions.
inline std::vector<NegativityProfile> negativity_profiles(
    const ThermalNegativityEngine& engine, const std::vector<Bipartition>& partitions,
    const std::vector<double>& t_grid, double eps_neg = kDefaultEpsNeg) {
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]))
      throw ValidationError("temperature grid must be strictly increasing");
  if (!t_grid.empty() && !(t_grid.front() > 0.0))
    throw ValidationError("temperature grid must be positive");

  std::vector<NegativityProfile> profiles(partitions.size());
  for (std::size_t p = 0; p < partitions.size(); ++p) {
    profiles[p].spec = engine.spec();
    profiles[p].partition = partitions[p];
    profiles[p].samples.reserve(t_grid.size());
  }
  for (double t : t_grid) {
    const DensityMatrix rho = engine.state(t);
    for (std::size_t p = 0; p < partitions.size(); ++p) {
      const NegativityReport r = negativity(rho, partitions[p], eps_neg);
      profiles[p].samples.push_back({t, r.value, r.negative_count});
    }
  }
  return profiles;
}

inline NegativityProfile negativity_profile(const ChainSpec& spec, const Bipartition& p,
                                            const std::vector<double>& t_grid,
                                            double eps_neg = kDefaultEpsNeg) {
  const ThermalNegativityEngine engine(spec);
  return negativity_profiles(engine, {p}, t_grid, eps_neg).front();
}

struct LimitOptions {
  double t_min = 1e-3;
  double t_max = 50.0;
  int scan_points = 400;
  double tol = 1e-6;      // bisection width in t
  double eps_neg = kDefaultEpsNeg;
};

/// Limit temperature: the largest t at which the negativity exceeds eps_neg.
/// Positive windows below it that switch on only above some t > t_min are
/// reported as reentry intervals.
struct LimitTemperature {
  std::optional<double> t_limit;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double tol = 0.0;
  std::vector<std::pair<double, double>> reentry_intervals;
};

namespace detail {

// Bisects the on/off boundary inside (lo, hi); `lo_entangled` is the state at
// lo, and the two grid neighbours are known to disagree.
inline std::pair<double, double> refine_crossing(
    const std::function<bool(double)>& entangled, double lo, double hi, bool lo_entangled,
    double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (entangled(mid) == lo_entangled)
      lo = mid;
    else
      hi = mid;
  }
  return {lo, hi};
}

inline LimitTemperature limit_from_samples(const std::vector<ProfileSample>& samples,
                                           const std::function<bool(double)>& entangled,
                                           const LimitOptions& opts) {
  LimitTemperature out;
  out.tol = opts.tol;

  std::vector<bool> on(samples.size());
  bool any = false;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    on[i] = samples[i].value > opts.eps_neg;
    any = any || on[i];
  }
  if (!any) return out;  // identically separable on the scan
  if (on.back())
    throw RangeError("negativity still positive at the scan ceiling; widen the range");

  // Refine every on/off boundary, then stitch the positive windows together.
  struct Boundary {
    double t;
    bool rising;
    std::pair<double, double> bracket;
  };
  std::vector<Boundary> boundaries;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    if (on[i] == on[i + 1]) continue;
    const auto bracket =
        refine_crossing(entangled, samples[i].t, samples[i + 1].t, on[i], opts.tol);
    boundaries.push_back({0.5 * (bracket.first + bracket.second), !on[i], bracket});
  }

  std::vector<std::pair<double, double>> windows;
  std::vector<bool> opened_at_scan_start;
  double open_at = on.front() ? samples.front().t : 0.0;
  bool open_from_start = on.front();
  for (const auto& b : boundaries) {
    if (b.rising) {
      open_at = b.t;
      open_from_start = false;
    } else {
      windows.emplace_back(open_at, b.t);
      opened_at_scan_start.push_back(open_from_start);
      out.bracket_lo = b.bracket.first;
      out.bracket_hi = b.bracket.second;
    }
  }

  out.t_limit = windows.back().second;
  for (std::size_t w = 0; w < windows.size(); ++w)
    if (!opened_at_scan_start[w]) out.reentry_intervals.push_back(windows[w]);
  return out;
}

}  // namespace detail

/// Limit temperatures of several partitions of the same spec, sharing the
/// coarse scan. The last positive-to-zero crossing is refined by bisection.
inline std::vector<LimitTemperature> limit_temperatures(
    const ThermalNegativityEngine& engine, const std::vector<Bipartition>& partitions,
    const LimitOptions& opts = {}) {
  const auto grid = log_spaced_grid(opts.t_min, opts.t_max, opts.scan_points);
  const auto profiles = negativity_profiles(engine, partitions, grid, opts.eps_neg);

  std::vector<LimitTemperature> out;
  out.reserve(partitions.size());
  for (std::size_t p = 0; p < partitions.size(); ++p) {
    auto entangled = [&, p](double t) {
      return engine.eval(t, partitions[p], opts.eps_neg).value > opts.eps_neg;
    };
    out.push_back(detail::limit_from_samples(profiles[p].samples, entangled, opts));
  }
  return out;
}

inline LimitTemperature limit_temperature(const ThermalNegativityEngine& engine,
                                          const Bipartition& p,
                                          const LimitOptions& opts = {}) {
  return limit_temperatures(engine, {p}, opts).front();
}

inline LimitTemperature limit_temperature(const ChainSpec& spec, const Bipartition& p,
                                          const LimitOptions& opts = {}) {
  return limit_temperature(ThermalNegativityEngine(spec), p, opts);
}

namespace detail {

inline std::uint32_t rotate_mask(std::uint32_t mask, int shift, int n) {
  const std::uint32_t full = (1u << n) - 1u;
  shift %= n;
  return ((mask << shift) | (mask >> (n - shift))) & full;
}

inline std::uint32_t reflect_mask(std::uint32_t mask, int n) {
  std::uint32_t out = 0;
  for (int i = 0; i < n; ++i)
    if ((mask >> i) & 1u) out |= 1u << (n - 1 - i);
  return out;
}

// All images of a site mask under the dihedral group of the ring.
inline std::vector<std::uint32_t> dihedral_images(std::uint32_t mask, int n) {
  std::vector<std::uint32_t> images;
  images.reserve(2 * n);
  const std::uint32_t reflected = reflect_mask(mask, n);
  for (int s = 0; s < n; ++s) {
    images.push_back(rotate_mask(mask, s, n));
    images.push_back(rotate_mask(reflected, s, n));
  }
  return images;
}

}  // namespace detail

/// One representative per equivalence class of global bipartitions under ring
/// rotation, reflection, and exchanging A with its complement. Sorted by
/// |A| then by mask; the representative is the smallest mask containing site a.
inline std::vector<Bipartition> all_global_bipartitions(int n) {
  if (n < 2 || n > kMaxSites) throw ValidationError("bipartition enumeration: bad n");
  const std::uint32_t full = (1u << n) - 1u;

  std::set<std::uint32_t> seen_orbit_keys;
  std::vector<std::uint32_t> reps;
  for (std::uint32_t a = 1; a < full; ++a) {
    std::uint32_t orbit_key = full;
    std::uint32_t best_rep = 0;
    auto consider = [&](std::uint32_t m) {
      orbit_key = std::min(orbit_key, m);
      const bool valid = (m & 1u) && 2 * std::popcount(m) <= n;
      if (valid && (best_rep == 0 || m < best_rep)) best_rep = m;
    };
    for (std::uint32_t img : detail::dihedral_images(a, n)) {
      consider(img);
      consider(full & ~img);
    }
    if (seen_orbit_keys.insert(orbit_key).second) reps.push_back(best_rep);
  }

  std::sort(reps.begin(), reps.end(), [](std::uint32_t x, std::uint32_t y) {
    const int px = std::popcount(x), py = std::popcount(y);
    return px != py ? px < py : x < y;
  });
  std::vector<Bipartition> out;
  out.reserve(reps.size());
  for (std::uint32_t a : reps) out.push_back(Bipartition::global(n, a));
  return out;
}

/// One representative per class of reduced-system splits (keep a proper
/// subset of >= 2 sites, then bipartition it) under the ring symmetry and
/// A <-> B exchange.
inline std::vector<Bipartition> all_reduced_bipartitions(int n) {
  if (n < 3 || n > kMaxSites) throw ValidationError("reduced enumeration needs 3 <= n <= 12");
  const std::uint32_t full = (1u << n) - 1u;

  std::set<std::uint64_t> seen;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> reps;
  for (std::uint32_t keep = 1; keep < full; ++keep) {
    if (std::popcount(keep) < 2) continue;
    // Submasks of keep as side A (nonempty, proper).
    for (std::uint32_t a = (keep - 1) & keep; a != 0; a = (a - 1) & keep) {
      std::uint64_t orbit_key = ~0ull;
      std::pair<std::uint32_t, std::uint32_t> best{full + 1, 0};
      for (int s = 0; s < n; ++s) {
        for (bool mirror : {false, true}) {
          std::uint32_t k2 = keep, a2 = a;
          if (mirror) {
            k2 = detail::reflect_mask(k2, n);
            a2 = detail::reflect_mask(a2, n);
          }
          k2 = detail::rotate_mask(k2, s, n);
          a2 = detail::rotate_mask(a2, s, n);
          for (std::uint32_t side : {a2, k2 & ~a2}) {
            const std::uint64_t key = (static_cast<std::uint64_t>(k2) << 32) | side;
            orbit_key = std::min(orbit_key, key);
            if (std::make_pair(k2, side) < best) best = {k2, side};
          }
        }
      }
      if (seen.insert(orbit_key).second) reps.push_back(best);
    }
  }

  std::sort(reps.begin(), reps.end(), [](const auto& x, const auto& y) {
    const int pk = std::popcount(x.first), qk = std::popcount(y.first);
    if (pk != qk) return pk < qk;
    if (x.first != y.first) return x.first < y.first;
    const int pa = std::popcount(x.second), qa = std::popcount(y.second);
    if (pa != qa) return pa < qa;
    return x.second < y.second;
  });
  std::vector<Bipartition> out;
  out.reserve(reps.size());
  for (const auto& [keep, a] : reps) out.push_back(Bipartition::make(n, keep, a));
  return out;
}

struct BorderPoint {
  double delta = 0.0;
  LimitTemperature limit;
  int k_at_limit = 0;
  std::optional<std::string> error;
};

/// Limit temperatures over an anisotropy grid for several partitions at
/// fixed reduced field, one decomposition and coarse scan per grid point.
/// Anisotropies are independent and fan out over `workers` threads;
/// per-point failures are recorded rather than aborting the sweep. Returns
/// one curve per partition.
inline std::vector<std::vector<BorderPoint>> border_curves(
    int n, Topology topology, int v_sign, const std::vector<Bipartition>& partitions,
    const std::vector<double>& delta_grid, double bbar = 0.0,
    const LimitOptions& opts = {}, int workers = 1) {
  if (delta_grid.empty()) throw ValidationError("border curves: empty anisotropy grid");
  if (partitions.empty()) throw ValidationError("border curves: no partitions");
  std::vector<std::vector<BorderPoint>> out(
      partitions.size(), std::vector<BorderPoint>(delta_grid.size()));
  parallel_for(delta_grid.size(), workers, [&](std::size_t i) {
    for (auto& curve : out) curve[i].delta = delta_grid[i];
    try {
      const ChainSpec spec = ChainSpec::reduced(n, topology, v_sign, delta_grid[i], bbar);
      const ThermalNegativityEngine engine(spec);
      const auto limits = limit_temperatures(engine, partitions, opts);
      for (std::size_t p = 0; p < partitions.size(); ++p) {
        BorderPoint& point = out[p][i];
        point.limit = limits[p];
        if (point.limit.t_limit) {
          const double probe = std::max(*point.limit.t_limit - 10.0 * opts.tol, opts.t_min);
          point.k_at_limit = engine.eval(probe, partitions[p], opts.eps_neg).negative_count;
        }
      }
    } catch (const std::exception& e) {
      for (auto& curve : out) curve[i].error = e.what();
    }
  });
  return out;
}

inline std::vector<BorderPoint> border_curve(int n, Topology topology, int v_sign,
                                             const Bipartition& partition,
                                             const std::vector<double>& delta_grid,
                                             double bbar = 0.0, const LimitOptions& opts = {},
                                             int workers = 1) {
  return border_curves(n, topology, v_sign, {partition}, delta_grid, bbar, opts,
                       workers)
      .front();
}

struct FieldIndependenceRow {
  double delta = 0.0;
  std::vector<std::optional<double>> t_limits;  // one per bbar
  double spread = 0.0;                          // max |t(bbar) - t(bbar_0)|
  bool consistent = true;                       // same presence across bbar
};

struct FieldIndependenceReport {
  Bipartition partition;
  std::vector<double> bbars;
  std::vector<FieldIndependenceRow> rows;
  double max_spread = 0.0;
  bool all_consistent = true;
};

/// Spread of the limit temperature over a list of reduced fields, per
/// anisotropy. Eigenvectors are shared across fields: b only shifts sector
/// energies.
inline FieldIndependenceReport field_independence_report(
    int n, Topology topology, int v_sign, const Bipartition& partition,
    const std::vector<double>& bbars, const std::vector<double>& deltas,
    const LimitOptions& opts = {}) {
  if (bbars.empty() || deltas.empty())
    throw ValidationError("field independence report: empty grids");
  FieldIndependenceReport report;
  report.partition = partition;
  report.bbars = bbars;

  for (double delta : deltas) {
    const ThermalNegativityEngine base(
        ChainSpec::reduced(n, topology, v_sign, delta, bbars.front()));
    FieldIndependenceRow row;
    row.delta = delta;
    for (double bbar : bbars) {
      const ThermalNegativityEngine engine =
          bbar == bbars.front() ? base : base.with_field(bbar);
      row.t_limits.push_back(limit_temperature(engine, partition, opts).t_limit);
    }
    const auto& ref = row.t_limits.front();
    for (const auto& t : row.t_limits) {
      if (t.has_value() != ref.has_value()) row.consistent = false;
      if (t && ref) row.spread = std::max(row.spread, std::abs(*t - *ref));
    }
    report.max_spread = std::max(report.max_spread, row.spread);
    report.all_consistent = report.all_consistent && row.consistent;
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace xxzent
