#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "test_util.hpp"
#include "xxzent/analytic.hpp"
#include "xxzent/limits.hpp"

using namespace xxzent;
using namespace xxzent::test;
using Catch::Approx;

namespace {

std::set<std::string> labels_of(const std::vector<Bipartition>& list) {
  std::set<std::string> out;
  for (const auto& p : list) out.insert(p.label());
  return out;
}

}  // namespace

TEST_CASE("distinct global bipartitions of small rings", "[limits]") {
  REQUIRE(labels_of(all_global_bipartitions(3)) == std::set<std::string>{"a-bc"});
  REQUIRE(labels_of(all_global_bipartitions(4)) ==
          std::set<std::string>{"a-bcd", "ab-cd", "ac-bd"});
  REQUIRE(labels_of(all_global_bipartitions(5)) ==
          std::set<std::string>{"a-bcde", "ab-cde", "ac-bde"});

  const auto eight = all_global_bipartitions(8);
  REQUIRE(eight.size() == 17);
  int by_size[5] = {0, 0, 0, 0, 0};
  for (const auto& p : eight) ++by_size[p.a_count()];
  REQUIRE(by_size[1] == 1);
  REQUIRE(by_size[2] == 4);
  REQUIRE(by_size[3] == 5);
  REQUIRE(by_size[4] == 7);
  const auto names = labels_of(eight);
  for (const char* expected : {"a-bcdefgh", "ab-cdefgh", "ac-bdefgh", "ad-bcefgh",
                               "ae-bcdfgh", "abef-cdgh", "aceg-bdfh"})
    REQUIRE(names.count(expected) == 1);
}

TEST_CASE("distinct reduced bipartitions", "[limits]") {
  REQUIRE(labels_of(all_reduced_bipartitions(3)) == std::set<std::string>{"a-b"});
  REQUIRE(labels_of(all_reduced_bipartitions(4)) ==
          std::set<std::string>{"a-b", "a-c", "a-bc", "ac-b"});
}

TEST_CASE("negativity profiles", "[limits]") {
  // Reentry above the isotropic point: zero at low t, a positive window, zero again.
  {
    const ChainSpec spec = ChainSpec::reduced(4, Topology::CyclicNN, +1, 1.5, 0.0);
    const auto profile = negativity_profile(spec, Bipartition::parse("ab-cd", 4),
                                            log_spaced_grid(1e-3, 20.0, 160));
    REQUIRE(profile.samples.front().value <= kDefaultEpsNeg);
    REQUIRE(profile.samples.back().value <= kDefaultEpsNeg);
    double peak = 0.0;
    for (const auto& s : profile.samples) peak = std::max(peak, s.value);
    REQUIRE(peak > kDefaultEpsNeg);
  }
  // No two-site entanglement beyond the isotropic point, at any temperature.
  {
    const ChainSpec spec = ChainSpec::reduced(2, Topology::SinglePair, +1, 2.0, 0.0);
    const auto profile = negativity_profile(spec, Bipartition::parse("a-b", 2),
                                            log_spaced_grid(1e-3, 50.0, 120));
    for (const auto& s : profile.samples) REQUIRE(s.value <= kDefaultEpsNeg);
  }
  // The infinite-temperature end of any profile is separable.
  {
    const ChainSpec spec = ChainSpec::reduced(3, Topology::CyclicNN, +1, -1.0, 0.2);
    const auto profile = negativity_profile(spec, Bipartition::parse("a-bc", 3),
                                            {0.5, 1.0, 1e12});
    REQUIRE(profile.samples.back().value < kDefaultEpsNeg);
  }
  REQUIRE_THROWS_AS(negativity_profile(ChainSpec::reduced(2, Topology::SinglePair, +1, 0.0),
                                       Bipartition::parse("a-b", 2), {0.5, 0.4}),
                    ValidationError);
}

TEST_CASE("limit temperatures agree with the closed-form borders", "[limits]") {
  LimitOptions opts;

  // n = 2, delta = 0: the root of the pair border.
  {
    const double root = bisect_root([](double t) { return border_n2(t); }, 0.05, 5.0, 1e-12);
    const auto lt = limit_temperature(ChainSpec::reduced(2, Topology::SinglePair, +1, 0.0),
                                      Bipartition::parse("a-b", 2), opts);
    REQUIRE(lt.t_limit.has_value());
    REQUIRE(std::abs(*lt.t_limit - root) < 1e-5);
    REQUIRE(lt.reentry_intervals.empty());
    REQUIRE(lt.bracket_hi - lt.bracket_lo <= opts.tol);
  }
  // n = 3, v > 0, delta = 0: the root of the global border.
  {
    const double root =
        bisect_root([](double t) { return border_n3_global(t, +1); }, 0.05, 5.0, 1e-12);
    const auto lt = limit_temperature(ChainSpec::reduced(3, Topology::CyclicNN, +1, 0.0),
                                      Bipartition::parse("a-bc", 3), opts);
    REQUIRE(lt.t_limit.has_value());
    REQUIRE(std::abs(*lt.t_limit - root) < 1e-5);
  }
  // n = 3, v < 0, delta = 0: the root of the v < 0 border.
  {
    const double root =
        bisect_root([](double t) { return border_n3_global(t, -1); }, 0.05, 5.0, 1e-12);
    const auto lt = limit_temperature(ChainSpec::reduced(3, Topology::CyclicNN, -1, 0.0),
                                      Bipartition::parse("a-bc", 3), opts);
    REQUIRE(lt.t_limit.has_value());
    REQUIRE(std::abs(*lt.t_limit - root) < 1e-5);
  }
}

TEST_CASE("limit temperature edge behaviour", "[limits]") {
  // Separable family: no limit temperature at all.
  const auto none = limit_temperature(ChainSpec::reduced(2, Topology::SinglePair, +1, 2.0),
                                      Bipartition::parse("a-b", 2));
  REQUIRE_FALSE(none.t_limit.has_value());
  REQUIRE(none.reentry_intervals.empty());

  // Still entangled at the scan ceiling: the caller must widen the range.
  LimitOptions tight;
  tight.t_max = 0.3;
  tight.scan_points = 60;
  REQUIRE_THROWS_AS(limit_temperature(ChainSpec::reduced(2, Topology::SinglePair, +1, 0.0),
                                      Bipartition::parse("a-b", 2), tight),
                    RangeError);

  // The refined limit separates entangled from separable at +-10 tol.
  const ChainSpec spec = ChainSpec::reduced(3, Topology::CyclicNN, +1, -1.0, 0.4);
  const ThermalNegativityEngine engine(spec);
  const Bipartition p = Bipartition::parse("a-bc", 3);
  const auto lt = limit_temperature(engine, p);
  REQUIRE(lt.t_limit.has_value());
  REQUIRE(engine.eval(*lt.t_limit - 10 * lt.tol, p).value > kDefaultEpsNeg);
  REQUIRE(engine.eval(*lt.t_limit + 10 * lt.tol, p).value <= kDefaultEpsNeg);
}

TEST_CASE("reentry windows are reported", "[limits]") {
  const ChainSpec spec = ChainSpec::reduced(4, Topology::CyclicNN, +1, 1.5, 0.0);
  const auto lt = limit_temperature(spec, Bipartition::parse("ab-cd", 4));
  REQUIRE(lt.t_limit.has_value());
  REQUIRE(lt.reentry_intervals.size() == 1);
  const auto [on, off] = lt.reentry_intervals.front();
  REQUIRE(on > 1e-3);
  REQUIRE(off == Approx(*lt.t_limit));
  REQUIRE(on < off);

  // A plain decreasing profile carries no reentry marker.
  const auto plain = limit_temperature(ChainSpec::reduced(4, Topology::CyclicNN, +1, -0.5, 0.0),
                                       Bipartition::parse("ab-cd", 4));
  REQUIRE(plain.t_limit.has_value());
  REQUIRE(plain.reentry_intervals.empty());
}

TEST_CASE("three-site global limit grows without bound as delta drops", "[limits]") {
  const Bipartition p = Bipartition::parse("a-bc", 3);
  auto lt = [&](double delta) {
    return *limit_temperature(ChainSpec::reduced(3, Topology::CyclicNN, +1, delta),
                              p).t_limit;
  };
  const double at0 = lt(0.0), at10 = lt(-10.0), at30 = lt(-30.0);
  REQUIRE(at0 < at10);
  REQUIRE(at10 < at30);
  REQUIRE(at30 > 5.0);
}

TEST_CASE("limit temperatures inherit the tracing order", "[limits]") {
  // One qubit against the rest bounds every reduced split from above.
  for (double delta : {-2.0, 0.3}) {
    const ThermalNegativityEngine engine(
        ChainSpec::reduced(4, Topology::CyclicNN, +1, delta, 0.4));
    auto lt = [&](const char* label) {
      return limit_temperature(engine, Bipartition::parse(label, 4)).t_limit.value_or(0.0);
    };
    const double pair = lt("a-b"), triple = lt("a-bc"), global = lt("a-bcd");
    REQUIRE(pair <= triple + 1e-5);
    REQUIRE(triple <= global + 1e-5);
    REQUIRE(lt("a-c") <= triple + 1e-5);
    const NegativityReport report = engine.eval(0.2, Bipartition::parse("a-bcd", 4));
    REQUIRE(report.thermal.has_value());
    REQUIRE(report.thermal->delta == Approx(delta));
    REQUIRE(report.thermal->bbar == Approx(0.4));
  }
}

TEST_CASE("field independence of global limits, field dependence of pairs", "[limits]") {
  LimitOptions opts;
  const auto global = field_independence_report(3, Topology::CyclicNN, +1,
                                                Bipartition::parse("a-bc", 3),
                                                {0.0, 0.5, 2.0}, {-2.0, 0.0, 0.5}, opts);
  REQUIRE(global.all_consistent);
  REQUIRE(global.max_spread < 10 * opts.tol);

  const auto pair = field_independence_report(3, Topology::CyclicNN, +1,
                                              Bipartition::parse("a-b", 3), {0.0, 2.0},
                                              {-5.0}, opts);
  REQUIRE(pair.max_spread > 0.1);
}

TEST_CASE("halving the negativity threshold leaves limits in place", "[limits]") {
  for (double delta : {-3.0, 0.0, 0.5}) {
    const ChainSpec spec = ChainSpec::reduced(3, Topology::CyclicNN, +1, delta, 0.0);
    const ThermalNegativityEngine engine(spec);
    LimitOptions opts;
    const auto base = limit_temperature(engine, Bipartition::parse("a-bc", 3), opts);
    opts.eps_neg *= 0.5;
    const auto halved = limit_temperature(engine, Bipartition::parse("a-bc", 3), opts);
    REQUIRE(base.t_limit.has_value() == halved.t_limit.has_value());
    if (base.t_limit)
      REQUIRE(std::abs(*base.t_limit - *halved.t_limit) < 10 * opts.tol);
  }
}

TEST_CASE("four-site border structure across the isotropic point", "[limits]") {
  const Bipartition adj = Bipartition::parse("ab-cd", 4);
  const Bipartition alt = Bipartition::parse("ac-bd", 4);
  const Bipartition one = Bipartition::parse("a-bcd", 4);

  // delta = 1.5: adjacent halves and one-vs-rest revive, alternating does not.
  const ThermalNegativityEngine ring(ChainSpec::reduced(4, Topology::CyclicNN, +1, 1.5, 0.0));
  const auto limits = limit_temperatures(ring, {adj, alt, one});
  REQUIRE(limits[0].t_limit.has_value());
  REQUIRE_FALSE(limits[1].t_limit.has_value());
  REQUIRE(limits[2].t_limit.has_value());

  // The fully connected ring shows no such revival.
  const ThermalNegativityEngine complete(
      ChainSpec::reduced(4, Topology::FullyConnected, +1, 1.5, 0.0));
  for (const auto& lt : limit_temperatures(complete, {adj, alt, one}))
    REQUIRE_FALSE(lt.t_limit.has_value());
}

TEST_CASE("pairwise and few-site limits follow the reported shapes", "[limits]") {
  // Four-site ring, zero field: the adjacent-pair limit keeps growing as
  // delta drops, the non-adjacent pair loses its window below delta = 0.
  {
    auto lt4 = [](double delta, const char* label) {
      return limit_temperature(ChainSpec::reduced(4, Topology::CyclicNN, +1, delta, 0.0),
                               Bipartition::parse(label, 4))
          .t_limit;
    };
    REQUIRE(lt4(-2.0, "a-b").value_or(0.0) > lt4(-0.5, "a-b").value_or(0.0));
    REQUIRE(lt4(-10.0, "a-b").value_or(0.0) > lt4(-2.0, "a-b").value_or(0.0));
    REQUIRE_FALSE(lt4(-0.5, "a-c").has_value());
    REQUIRE(lt4(0.5, "a-c").has_value());
  }
  // Five-site ring, v > 0: the adjacent-pair limit saturates with an interior
  // maximum near delta = -5.6, while the three-site limit keeps growing; the
  // non-adjacent pair entangles only above a small positive delta.
  {
    auto lt5 = [](double delta, const char* label) {
      return limit_temperature(ChainSpec::reduced(5, Topology::CyclicNN, +1, delta, 0.0),
                               Bipartition::parse(label, 5))
          .t_limit;
    };
    const double near_peak = lt5(-5.6, "a-b").value_or(0.0);
    REQUIRE(near_peak > lt5(-2.0, "a-b").value_or(0.0));
    REQUIRE(near_peak > lt5(-20.0, "a-b").value_or(0.0));
    REQUIRE(lt5(-20.0, "a-bc").value_or(0.0) > lt5(-5.0, "a-bc").value_or(0.0));
    REQUIRE_FALSE(lt5(0.0, "a-c").has_value());
    REQUIRE(lt5(0.5, "a-c").has_value());
  }
  // Beyond the isotropic point the surviving thermal entanglement reaches
  // down to four-qubit subsystems but not to pairs or triples.
  {
    const ThermalNegativityEngine engine(
        ChainSpec::reduced(5, Topology::CyclicNN, +1, 1.5, 0.0));
    const auto grid = log_spaced_grid(1e-3, 10.0, 120);
    const auto profiles = negativity_profiles(
        engine,
        {Bipartition::parse("a-bcd", 5), Bipartition::parse("a-b", 5),
         Bipartition::parse("a-bc", 5)},
        grid);
    double four_site = 0.0, pair = 0.0, triple = 0.0;
    for (const auto& s : profiles[0].samples) four_site = std::max(four_site, s.value);
    for (const auto& s : profiles[1].samples) pair = std::max(pair, s.value);
    for (const auto& s : profiles[2].samples) triple = std::max(triple, s.value);
    REQUIRE(four_site > kDefaultEpsNeg);
    REQUIRE(pair <= kDefaultEpsNeg);
    REQUIRE(triple <= kDefaultEpsNeg);
  }
  // Five-site ring, v < 0, zero field: the four-fold degenerate ground
  // manifold kills non-contiguous pairwise entanglement at every delta,
  // while all global classes stay alive beyond the isotropic point.
  {
    for (double delta : {-3.0, 0.3})
      REQUIRE_FALSE(
          limit_temperature(ChainSpec::reduced(5, Topology::CyclicNN, -1, delta, 0.0),
                            Bipartition::parse("a-c", 5))
              .t_limit.has_value());
    const ThermalNegativityEngine engine(
        ChainSpec::reduced(5, Topology::CyclicNN, -1, 1.5, 0.0));
    for (const auto& lt : limit_temperatures(engine, all_global_bipartitions(5)))
      REQUIRE(lt.t_limit.has_value());
  }
}

TEST_CASE("border curves run in parallel deterministically", "[limits]") {
  const std::vector<double> deltas = {-1.0, -0.5, 0.0, 0.5, 0.8};
  const Bipartition p = Bipartition::parse("a-bc", 3);
  const auto serial = border_curve(3, Topology::CyclicNN, +1, p, deltas, 0.0, {}, 1);
  const auto parallel = border_curve(3, Topology::CyclicNN, +1, p, deltas, 0.0, {}, 4);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    REQUIRE(serial[i].delta == parallel[i].delta);
    REQUIRE(serial[i].limit.t_limit.has_value() == parallel[i].limit.t_limit.has_value());
    if (serial[i].limit.t_limit)
      REQUIRE(*serial[i].limit.t_limit == Approx(*parallel[i].limit.t_limit).margin(1e-12));
    REQUIRE(serial[i].k_at_limit == parallel[i].k_at_limit);
    REQUIRE_FALSE(serial[i].error.has_value());
  }
  REQUIRE_THROWS_AS(border_curve(3, Topology::CyclicNN, +1, p, {}, 0.0, {}, 1),
                    ValidationError);
}

TEST_CASE("one-vs-rest limit curves converge with chain length", "[limits][slow]") {
  // Adjacent chain sizes agree within 2% once n reaches 6.
  LimitOptions opts;
  opts.scan_points = 150;
  opts.tol = 1e-4;
  for (double delta : {-2.0, -1.0, 0.5, 1.5}) {
    double prev = -1.0;
    for (int n = 6; n <= 10; ++n) {
      const ChainSpec spec = ChainSpec::reduced(n, Topology::CyclicNN, +1, delta, 0.0);
      const Bipartition p = Bipartition::global(n, 0b1u);
      const auto lt = limit_temperature(ThermalNegativityEngine(spec), p, opts);
      REQUIRE(lt.t_limit.has_value());
      if (prev > 0.0) {
        INFO("delta=" << delta << " n=" << n);
        REQUIRE(std::abs(*lt.t_limit - prev) / prev < 0.02);
      }
      prev = *lt.t_limit;
    }
  }
}
