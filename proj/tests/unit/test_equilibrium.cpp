#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "offload_commons/equilibrium.hpp"
#include "offload_commons/scenario_config.hpp"
#include "support/builders.hpp"
#include "support/oracle.hpp"

using namespace offload;
using namespace offload::testing;

namespace {

MarketSpec anti_coordination() {
  MarketSpec s;
  s.shared_capacity = 160;
  s.bulk_floor = 0.25;
  s.premium_floor = 0.4;
  s.wifi_backhaul = 110;
  s.wifi_backhaul_cost = 0.1;
  s.cell_backhaul = 40;
  s.cell_backhaul_cost = 0.2;
  s.licensed_capacity = 120;
  s.licensed_cost = 1.0;
  s.wifi_price_bulk = 1.0;
  s.wifi_price_premium = 2.0;
  s.cell_price_bulk = 0.5;
  s.cell_price_premium = 3.0;
  s.wifi_bulk = 90;
  s.wifi_premium = 0;
  s.cell_bulk = 70;
  s.cell_premium = 50;
  s.resale_pool = 20;
  return s;
}

// Offload is cheaper and the band is large enough for every class floor.
MarketSpec offload_dominant() {
  MarketSpec s;
  s.shared_capacity = 1000;
  s.wifi_bulk = 30;
  s.wifi_premium = 10;
  s.cell_bulk = 40;
  s.cell_premium = 20;
  s.resale_pool = 0;
  return s;
}

MarketSpec scaled(MarketSpec s, double k) {
  s.shared_cost *= k;
  s.wifi_backhaul_cost *= k;
  s.cell_backhaul_cost *= k;
  s.licensed_cost *= k;
  s.wifi_price_bulk *= k;
  s.wifi_price_premium *= k;
  s.cell_price_bulk *= k;
  s.cell_price_premium *= k;
  return s;
}

oracle::Choice choice_at(const MarketSpec& s, const JointProfile& p) { return oracle::choice_of(s, p); }

Scenario scenario_file(const char* name) {
  return load_scenario(std::string(OC_SCENARIO_DIR) + "/" + name).market;
}

}  // namespace

TEST_CASE("bisection halves its bracket every iteration") {
  const auto r = bisect_decreasing([](double x) { return 0.3 - x; }, 0.0, 1.0);
  CHECK(r.converged);
  CHECK(r.root == doctest::Approx(0.3).epsilon(1e-6));
  double width = 1.0;
  for (double w : r.widths) {
    CHECK(w == doctest::Approx(width / 2));
    width = w;
  }
  CHECK(r.widths.back() <= kSolverTolerance);
  CHECK_THROWS_AS(bisect_decreasing([](double x) { return x; }, 0.0, 1.0), DomainError);
}

TEST_CASE("intra_provider_equilibrium examples") {
  MarketSpec spec;
  spec.cell_bulk = 80;
  const auto r = intra_provider_equilibrium(build(spec), 30);
  CHECK(r.placements.unlicensed_combined == doctest::Approx(50.0).epsilon(1e-7));
  CHECK(r.unlicensed_quality == doctest::Approx(0.2).epsilon(1e-7));
  CHECK(r.converged);
  CHECK_FALSE(r.clamped);
  CHECK(r.residual <= kSolverTolerance);

  MarketSpec tight = spec;
  tight.bulk_floor = 0.99;
  tight.premium_floor = 0.995;
  const auto r2 = intra_provider_equilibrium(build(tight), 0);
  CHECK(r2.placements.unlicensed_combined == doctest::Approx(1.0).epsilon(1e-6));

  MarketSpec short_bulk = spec;
  short_bulk.cell_bulk = 10;
  const auto r3 = intra_provider_equilibrium(build(short_bulk), 30);
  CHECK(r3.placements.unlicensed_combined == 10.0);
  CHECK(r3.clamped);
  CHECK(r3.converged);
}

TEST_CASE("intra_provider_equilibrium rejects floors outside (0,1)") {
  MarketSpec spec;
  spec.bulk_floor = 1.0;
  CHECK_THROWS_AS(intra_provider_equilibrium(build(spec), 10), DomainError);
  spec.bulk_floor = 0.0;
  CHECK_THROWS_AS(intra_provider_equilibrium(build(spec), 10), DomainError);
}

TEST_CASE("unclamped intra roots sit on the bulk floor and match the closed form") {
  Rng rng(31);
  int interior = 0;
  for (int n = 0; n < 500; ++n) {
    const MarketSpec spec = random_market(rng);
    const double opponent = rng.uniform(0.0, spec.shared_capacity);
    const auto r = intra_provider_equilibrium(build(spec), opponent);
    const double closed = (1.0 - spec.bulk_floor) * spec.shared_capacity - opponent;
    const double hi = std::min({spec.cell_bulk, spec.cell_backhaul, spec.shared_capacity - opponent});
    if (r.clamped) {
      CHECK((closed <= 0.0 || closed >= hi));
      continue;
    }
    ++interior;
    CHECK(std::abs(qos(opponent + r.placements.unlicensed_combined, spec.shared_capacity) -
                   spec.bulk_floor) <= 1e-6);
    CHECK(r.placements.unlicensed_combined == doctest::Approx(closed).epsilon(1e-6));
    if (r.converged) CHECK(r.residual <= kSolverTolerance);
  }
  CHECK(interior > 50);
}

TEST_CASE("inter_provider_equilibrium examples") {
  MarketSpec spec;
  spec.licensed_capacity = 80;
  spec.premium_floor = 0.5;
  spec.cell_premium = 60;
  spec.cell_bulk = 60;
  const auto r = inter_provider_equilibrium(build(spec));
  CHECK(r.applicable);
  CHECK(r.placements.licensed_combined == doctest::Approx(40.0).epsilon(1e-7));
  CHECK(r.placements.licensed_premium == doctest::Approx(40.0).epsilon(1e-7));

  spec.cell_premium = 15;
  const auto r2 = inter_provider_equilibrium(build(spec));
  CHECK(r2.placements.licensed_premium == 15.0);
  CHECK(r2.placements.licensed_bulk == doctest::Approx(25.0).epsilon(1e-7));
  CHECK(r2.placements.licensed_combined == doctest::Approx(40.0).epsilon(1e-7));

  MarketSpec sym;
  sym.shared_capacity = sym.licensed_capacity = 100;
  sym.bulk_floor = sym.premium_floor = 0.5;
  sym.wifi_bulk = 20;
  sym.cell_bulk = 200;
  sym.cell_premium = 30;
  sym.cell_backhaul = 200;
  const auto r3 = inter_provider_equilibrium(build(sym));
  CHECK(*r3.licensed_quality == doctest::Approx(r3.unlicensed_quality).epsilon(1e-6));
  CHECK(r3.unlicensed_quality == doctest::Approx(0.5).epsilon(1e-6));

  MarketSpec none;
  none.cell_premium = 0;
  none.resale_pool = 0;
  CHECK_FALSE(inter_provider_equilibrium(build(none)).applicable);
}

TEST_CASE("inter_provider_equilibrium respects both floors") {
  Rng rng(32);
  int both_interior = 0;
  for (int n = 0; n < 500; ++n) {
    MarketSpec spec = random_market(rng);
    spec.cell_premium = rng.uniform(1.0, 100.0);
    const auto r = inter_provider_equilibrium(build(spec));
    REQUIRE(r.applicable);
    CHECK(*r.licensed_quality >= spec.premium_floor - 1e-6);
    CHECK(r.placements.licensed_combined <= spec.licensed_capacity * (1 - spec.premium_floor) + 1e-6);
    if (!r.clamped && r.unlicensed_at_floor) {
      ++both_interior;
      CHECK(std::abs(r.unlicensed_quality - spec.bulk_floor) <= 1e-6);
    }
  }
  CHECK(both_interior > 10);
}

TEST_CASE("nash_oracle with zero prices returns every feasible profile") {
  MarketSpec spec;
  spec.wifi_premium = 10;
  spec.resale_pool = 10;
  spec.wifi_price_bulk = spec.wifi_price_premium = spec.cell_price_bulk = spec.cell_price_premium = 0;
  spec.shared_cost = spec.wifi_backhaul_cost = spec.cell_backhaul_cost = spec.licensed_cost = 0;
  const auto nash = nash_oracle(build(spec), 3);
  std::size_t feasible = 0;
  for (const auto& c : oracle::all_choices(3)) feasible += oracle::evaluate(spec, c).has_value();
  CHECK(nash.feasible_profiles == feasible);
  CHECK(nash.equilibria.size() == feasible);
}

TEST_CASE("nash_oracle when offload is strictly dominant") {
  const MarketSpec spec = offload_dominant();
  const Scenario sc = build(spec);
  const auto nash = nash_oracle(sc, 2);
  REQUIRE_FALSE(nash.equilibria.empty());
  for (const auto& p : nash.equilibria) {
    CHECK(p.combined.offload[0] == 1.0);
    CHECK(p.combined.offload[1] == 1.0);
  }
}

TEST_CASE("nash_oracle agrees with an independent unilateral-deviation check") {
  Rng rng(33);
  for (int n = 0; n < 25; ++n) {
    const MarketSpec spec = random_market(rng);
    const int g = rng.integer(2, 3);
    const auto nash = nash_oracle(build(spec), g);
    std::size_t expected = 0;
    for (const auto& c : oracle::all_choices(g)) {
      if (!oracle::is_nash(spec, c, g)) continue;
      // Resale shares collapse when there is no headroom; count each profile once.
      const double headroom = std::clamp(
          std::min(spec.resale_pool, spec.licensed_capacity - (1 - c.cell_bulk) * spec.cell_bulk -
                                         (1 - c.cell_premium) * spec.cell_premium),
          0.0, spec.resale_pool);
      if (headroom <= 0.0 && c.resale > 0.0) continue;
      ++expected;
    }
    CHECK(nash.equilibria.size() == expected);
    for (const auto& p : nash.equilibria) CHECK(oracle::is_nash(spec, choice_at(spec, p), g));
    for (std::size_t k = 1; k < nash.equilibria.size(); ++k) {
      CHECK_FALSE(selection_less(build(spec), nash.equilibria[k], nash.equilibria[k - 1]));
    }
  }
}

TEST_CASE("best_response_dynamics examples") {
  const MarketSpec spec = offload_dominant();
  const Scenario sc = build(spec);
  const auto out = best_response_dynamics(sc, baseline_profile(), 2, 50);
  const auto* fp = std::get_if<FixedPoint>(&out);
  REQUIRE(fp);
  CHECK(fp->profile.wifi_only.offload == std::array<double, 2>{1.0, 1.0});
  CHECK(fp->profile.combined.offload == std::array<double, 2>{1.0, 1.0});
  const auto nash = nash_oracle(sc, 2);
  CHECK(std::find(nash.equilibria.begin(), nash.equilibria.end(), fp->profile) != nash.equilibria.end());

  const auto again = best_response_dynamics(sc, fp->profile, 2, 50);
  REQUIRE(std::holds_alternative<FixedPoint>(again));
  CHECK(std::get<FixedPoint>(again).iterations <= 2);
}

TEST_CASE("starting at any Nash grid point reaches a fixed point within two iterations") {
  Rng rng(34);
  int checked = 0;
  for (int n = 0; n < 20; ++n) {
    const Scenario sc = build(random_market(rng));
    const auto nash = nash_oracle(sc, 2);
    for (const auto& p : nash.equilibria) {
      const auto out = best_response_dynamics(sc, p, 2, 50);
      REQUIRE(std::holds_alternative<FixedPoint>(out));
      CHECK(std::get<FixedPoint>(out).iterations <= 2);
      ++checked;
    }
  }
  CHECK(checked > 10);
}

TEST_CASE("anti-coordination payoffs cycle with period two") {
  const MarketSpec spec = anti_coordination();
  const Scenario sc = build(spec);
  const auto out = best_response_dynamics(sc, baseline_profile(), 2, 50);
  const auto* cycle = std::get_if<Cycle>(&out);
  REQUIRE(cycle);
  CHECK(cycle->period == 2);
  REQUIRE(cycle->profiles.size() == 2);
  // Each provider's move in the cycle is a best response to the other's.
  for (std::size_t k = 0; k < 2; ++k) {
    const JointProfile& prev = cycle->profiles[k];
    const JointProfile& next = cycle->profiles[(k + 1) % 2];
    oracle::Choice c = choice_at(spec, prev);
    c.wifi_bulk = next.wifi_only.offload[0];
    c.wifi_premium = next.wifi_only.offload[1];
    const auto o = oracle::evaluate(spec, c);
    REQUIRE(o);
    CHECK(o->profit_wifi >= *oracle::best_wifi(spec, c, 2) - 1e-9);
    const auto on = oracle::evaluate(spec, choice_at(spec, next));
    REQUIRE(on);
    CHECK(on->profit_cell >= *oracle::best_cell(spec, choice_at(spec, next), 2) - 1e-9);
  }
  CHECK(cycle->profiles[0] != cycle->profiles[1]);
  // No pure grid equilibrium exists, confirmed by enumeration.
  for (const auto& c : oracle::all_choices(2)) CHECK_FALSE(oracle::is_nash(spec, c, 2));
}

TEST_CASE("best_response_dynamics reports non-convergence without throwing") {
  const Scenario sc = build(anti_coordination());
  const auto out = best_response_dynamics(sc, baseline_profile(), 2, 1);
  CHECK(std::holds_alternative<NonConvergence>(out));
  CHECK_THROWS_AS(best_response_dynamics(sc, baseline_profile(), 2, 0), DomainError);
}

TEST_CASE("every fixed point is a Nash grid point") {
  Rng rng(35);
  int fixed = 0;
  for (int n = 0; n < 30; ++n) {
    const MarketSpec spec = random_market(rng);
    const Scenario sc = build(spec);
    const int g = rng.integer(2, 4);
    const auto out = best_response_dynamics(sc, baseline_profile(), g, 100);
    const auto* fp = std::get_if<FixedPoint>(&out);
    if (!fp) continue;
    ++fixed;
    const auto nash = nash_oracle(sc, g);
    CHECK(std::find(nash.equilibria.begin(), nash.equilibria.end(), fp->profile) != nash.equilibria.end());
    CHECK(oracle::is_nash(spec, choice_at(spec, fp->profile), g));
  }
  CHECK(fixed >= 20);
}

TEST_CASE("scarcity scenario: the dynamics fixed point is in the oracle set") {
  const auto cfg = load_scenario(std::string(OC_SCENARIO_DIR) + "/scarcity.json");
  const auto out = best_response_dynamics(cfg.market, baseline_profile(), cfg.grid_steps, 200);
  const auto* fp = std::get_if<FixedPoint>(&out);
  REQUIRE(fp);
  const auto nash = nash_oracle(cfg.market, cfg.grid_steps);
  CHECK(std::find(nash.equilibria.begin(), nash.equilibria.end(), fp->profile) != nash.equilibria.end());
}

TEST_CASE("commons_welfare_gap examples") {
  const auto abundance = commons_welfare_gap(scenario_file("abundance.json"), 4);
  CHECK(abundance.gap <= 1e-9);

  MarketSpec zero;
  zero.wifi_price_bulk = zero.wifi_price_premium = zero.cell_price_bulk = zero.cell_price_premium = 0;
  zero.shared_cost = zero.wifi_backhaul_cost = zero.cell_backhaul_cost = zero.licensed_cost = 0;
  const auto z = commons_welfare_gap(build(zero), 4);
  CHECK(z.gap == 0.0);
  CHECK(z.coordinated_welfare == 0.0);

  const auto scarcity = commons_welfare_gap(scenario_file("scarcity.json"), 4);
  CHECK(scarcity.gap > 0.0);
  CHECK(scarcity.gap == scarcity.coordinated_welfare - scarcity.equilibrium_welfare);
}

TEST_CASE("coordinated welfare is the grid maximum and bounds the equilibrium") {
  Rng rng(36);
  for (int n = 0; n < 20; ++n) {
    const MarketSpec spec = random_market(rng);
    const int g = rng.integer(2, 3);
    const auto w = commons_welfare_gap(build(spec), g);
    std::optional<double> best;
    for (const auto& c : oracle::all_choices(g)) {
      if (auto o = oracle::evaluate(spec, c)) {
        best = std::max(best.value_or(o->profit_wifi + o->profit_cell), o->profit_wifi + o->profit_cell);
      }
    }
    REQUIRE(best);
    CHECK(std::abs(w.coordinated_welfare - *best) <= 1e-9);
    CHECK(w.coordinated_welfare >= w.equilibrium_welfare - 1e-9);
    CHECK(w.gap == w.coordinated_welfare - w.equilibrium_welfare);
  }
}

TEST_CASE("scaling prices and costs scales welfare and keeps the equilibria") {
  Rng rng(37);
  for (int n = 0; n < 15; ++n) {
    const MarketSpec spec = random_market(rng);
    const int g = 2;
    const auto base_nash = nash_oracle(build(spec), g);
    const auto base_gap = commons_welfare_gap(build(spec), g);
    for (double k : {0.5, 2.0, 4.0}) {
      const MarketSpec s = scaled(spec, k);
      CHECK(nash_oracle(build(s), g).equilibria == base_nash.equilibria);
      const auto w = commons_welfare_gap(build(s), g);
      CHECK(w.coordinated_welfare == doctest::Approx(k * base_gap.coordinated_welfare));
      CHECK(w.equilibrium_welfare == doctest::Approx(k * base_gap.equilibrium_welfare));
    }
  }
}
