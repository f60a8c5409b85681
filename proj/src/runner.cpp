#include "offload_commons/runner.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include <fmt/format.h>

namespace offload {

using nlohmann::json;

const char* to_string(Command c) {
  switch (c) {
    case Command::Equilibrium: return "equilibrium";
    case Command::Simulate: return "simulate";
    case Command::Classify: return "classify";
    case Command::Sweep: return "sweep";
    case Command::Dominance: return "dominance";
  }
  return "unknown";
}

std::optional<Command> parse_command(std::string_view name) {
  for (Command c : {Command::Equilibrium, Command::Simulate, Command::Classify, Command::Sweep,
                    Command::Dominance}) {
    if (name == to_string(c)) return c;
  }
  return std::nullopt;
}

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json to_json(const EquilibriumReport& r) {
  const auto& p = r.placements;
  return {{"kind", to_string(r.kind)},
          {"applicable", r.applicable},
          {"placements",
           {{"unlicensed_combined", p.unlicensed_combined},
            {"licensed_combined", p.licensed_combined},
            {"unlicensed_wifi_only", p.unlicensed_wifi_only},
            {"licensed_premium", p.licensed_premium},
            {"licensed_bulk", p.licensed_bulk},
            {"premium_overflow", p.premium_overflow}}},
          {"unlicensed_quality", r.unlicensed_quality},
          {"licensed_quality", optional_number(r.licensed_quality)},
          {"residual", r.residual},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"clamped", r.clamped},
          {"unlicensed_at_floor", r.unlicensed_at_floor},
          {"note", r.note}};
}

json to_json(const WelfareGap& w) {
  return {{"equilibrium_welfare", w.equilibrium_welfare},
          {"coordinated_welfare", w.coordinated_welfare},
          {"gap", w.gap},
          {"relative_gap", w.relative_gap},
          {"equilibrium_profile", offload::to_json(w.equilibrium_profile)},
          {"coordinated_profile", offload::to_json(w.coordinated_profile)},
          {"from_fixed_point", w.from_fixed_point}};
}

json to_json(const Oscillation& o) {
  return {{"kind", to_string(o.kind)},
          {"period", o.period},
          {"amplitude", o.amplitude},
          {"direction", o.direction}};
}

json to_json(const MarketState& s) {
  json placements = json::array();
  for (const auto& p : s.placements) {
    placements.push_back({{"provider", to_string(p.provider)},
                          {"network", to_string(p.network)},
                          {"class", to_string(p.cls)},
                          {"load", p.load},
                          {"price", p.price},
                          {"unit_cost", p.unit_cost}});
  }
  return {{"round", s.round},
          {"q_unlicensed", s.qos.unlicensed},
          {"q_licensed", optional_number(s.qos.licensed)},
          {"profit_wifi_only", s.profit(ProviderId::WifiOnly)},
          {"profit_combined", s.profit(ProviderId::Combined)},
          {"placements", placements}};
}

json to_json(const DominanceReport& d) {
  return {{"condition_i", d.condition_i},
          {"condition_ii", d.condition_ii},
          {"condition_iii", d.condition_iii},
          {"any", d.any},
          {"delta_quality", d.delta_quality},
          {"step_class", d.step_class ? json(to_string(*d.step_class)) : json(nullptr)},
          {"step_volume", d.step_volume},
          {"resold_volume", d.resold_volume},
          {"step_feasible", d.step_feasible},
          {"revenue_yield", d.revenue_yield},
          {"capacity_yield", d.capacity_yield},
          {"unlicensed_reduction", d.unlicensed_reduction},
          {"note", d.note}};
}

json to_json(const DynamicsOutcome& outcome) {
  if (const auto* fp = std::get_if<FixedPoint>(&outcome)) {
    return {{"outcome", "fixed_point"},
            {"iterations", fp->iterations},
            {"profile", offload::to_json(fp->profile)}};
  }
  if (const auto* cy = std::get_if<Cycle>(&outcome)) {
    json profiles = json::array();
    for (const auto& p : cy->profiles) profiles.push_back(offload::to_json(p));
    return {{"outcome", "cycle"},
            {"iterations", cy->iterations},
            {"period", cy->period},
            {"profiles", profiles}};
  }
  const auto& nc = std::get<NonConvergence>(outcome);
  return {{"outcome", "non_convergence"},
          {"iterations", nc.iterations},
          {"last", offload::to_json(nc.last)}};
}

json error_json(const std::exception& e) {
  json err = {{"type", "domain"}, {"message", e.what()}};
  if (const auto* inf = dynamic_cast<const InfeasibleError*>(&e)) {
    err["type"] = "infeasible";
    err["constraint"] = to_string(inf->constraint());
  }
  return err;
}

std::string num(double v) { return fmt::format("{}", v); }

json equilibrium_report(const ScenarioConfig& cfg) {
  const auto& m = cfg.market;
  const MarketState initial = apply_strategy(m, cfg.initial);
  const double opponent = initial.load(ProviderId::WifiOnly, NetworkKind::UnlicensedAir);

  const DynamicsOutcome dyn = best_response_dynamics(m, cfg.initial, cfg.grid_steps, 200);
  const NashSet oracle = nash_oracle(m, cfg.grid_steps);
  json equilibria = json::array();
  for (const auto& p : oracle.equilibria) equilibria.push_back(offload::to_json(p));
  json nash = {{"grid_steps", cfg.grid_steps},
               {"dynamics", to_json(dyn)},
               {"feasible_profiles", oracle.feasible_profiles},
               {"oracle_size", oracle.equilibria.size()},
               {"equilibria", equilibria},
               {"selected", oracle.equilibria.empty() ? json(nullptr)
                                                      : offload::to_json(oracle.equilibria.front())}};
  if (const auto* fp = std::get_if<FixedPoint>(&dyn)) {
    nash["contains_fixed_point"] =
        std::find(oracle.equilibria.begin(), oracle.equilibria.end(), fp->profile) !=
        oracle.equilibria.end();
  } else {
    nash["contains_fixed_point"] = nullptr;
  }
  return {{"intra_provider", to_json(intra_provider_equilibrium(m, opponent))},
          {"inter_provider", to_json(inter_provider_equilibrium(m))},
          {"nash_grid", nash},
          {"welfare", to_json(commons_welfare_gap(m, cfg.grid_steps, cfg.initial))},
          {"capacity_regime", to_string(capacity_regime(m))}};
}

json simulate_summary(const ScenarioConfig& cfg, const Trajectory& traj) {
  const double floor = cfg.market.min_quality(TrafficClass::Bulk);
  double q_min = 1.0;
  double q_max = 0.0;
  int below_floor = 0;
  for (const auto& s : traj.states) {
    q_min = std::min(q_min, s.qos.unlicensed);
    q_max = std::max(q_max, s.qos.unlicensed);
    if (s.qos.unlicensed < floor - kTolerance) ++below_floor;
  }
  json events = json::array();
  for (const auto& e : traj.events) {
    events.push_back({{"round", e.round},
                      {"type", to_string(e.kind)},
                      {"target", to_string(e.target)},
                      {"requested", e.requested},
                      {"admitted", e.admitted}});
  }
  std::array<std::array<double, 2>, 2> moved{};  // [class][toward combined?]
  for (const auto& mr : traj.migration_log) {
    moved[index(mr.cls)][mr.to == Segment::CombinedCellular ? 1 : 0] += mr.volume;
  }
  json migration = json::object();
  for (TrafficClass c : kTrafficClasses) {
    migration[to_string(c)] = {{"to_wifi_only", moved[index(c)][0]},
                               {"to_combined", moved[index(c)][1]}};
  }
  return {{"rounds", static_cast<int>(traj.states.size()) - 1},
          {"policy", to_string(cfg.policy)},
          {"final_state", to_json(traj.states.back())},
          {"final_profile", offload::to_json(traj.profiles.back())},
          {"q_unlicensed_min", q_min},
          {"q_unlicensed_max", q_max},
          {"states_below_bulk_floor", below_floor},
          {"oscillation", traj.states.size() >= 4 ? to_json(detect_oscillation(traj))
                                                   : json(nullptr)},
          {"events", events},
          {"migration", migration}};
}

struct ClassifyResult {
  Trajectory trajectory;
  WelfareGap welfare;
  OutcomeLabel label;
};

ClassifyResult classify_pipeline(const ScenarioConfig& cfg) {
  ClassifyResult r;
  r.trajectory = simulate(cfg.market, cfg.initial, cfg.migration, cfg.simulation_options());
  r.welfare = commons_welfare_gap(cfg.market, cfg.grid_steps, cfg.initial);
  r.label = classify(r.trajectory, cfg.market, r.welfare, cfg.thresholds);
  return r;
}

json label_json(const OutcomeLabel& label) {
  const auto& ev = label.evidence;
  return {{"label", to_string(label.label)},
          {"evidence",
           {{"regime", to_string(ev.regime)},
            {"oscillation", to_json(ev.oscillation)},
            {"welfare", to_json(ev.welfare)},
            {"final_unlicensed_quality", ev.final_unlicensed_quality},
            {"final_licensed_quality", optional_number(ev.final_licensed_quality)},
            {"deadlock_quality", ev.deadlock_quality},
            {"within_floor_band", ev.within_floor_band},
            {"reason", ev.reason}}}};
}

json dominance_report(const ScenarioConfig& cfg) {
  const auto& m = cfg.market;
  const DominanceReport d = dominance_check(m, ProviderId::Combined, cfg.initial, cfg.grid_steps);
  const BestResponse br =
      best_response(m, ProviderId::Combined, cfg.initial.wifi_only, cfg.grid_steps);
  const double before = cfg.initial.combined.fraction(TrafficClass::Bulk);
  return {{"provider", to_string(ProviderId::Combined)},
          {"profile", offload::to_json(cfg.initial)},
          {"dominance", to_json(d)},
          {"best_response",
           {{"profile", offload::to_json(JointProfile{cfg.initial.wifi_only, br.profile})["combined"]},
            {"profit", br.profit},
            {"bulk_offload_before", before},
            {"bulk_offload_after", br.profile.fraction(TrafficClass::Bulk)},
            {"bulk_offload_increased", br.profile.fraction(TrafficClass::Bulk) > before + kTolerance}}}};
}

struct SweepRow {
  std::vector<double> values;
  json result;
  std::string csv;
};

SweepRow sweep_point(const ScenarioConfig& base, const std::vector<double>& values) {
  SweepRow row;
  row.values = values;
  std::string regime;
  std::string label;
  std::string error;
  std::string q_final;
  std::string q_min;
  std::string violations;
  std::string gap;
  std::string oscillation;
  try {
    ScenarioConfig cfg = base;
    for (std::size_t k = 0; k < values.size(); ++k) {
      cfg = with_parameter(cfg, base.sweep[k].pointer, values[k]);
    }
    cfg.sweep.clear();
    regime = to_string(capacity_regime(cfg.market));
    const ClassifyResult r = classify_pipeline(cfg);
    const json summary = simulate_summary(cfg, r.trajectory);
    label = to_string(r.label.label);
    q_final = num(r.label.evidence.final_unlicensed_quality);
    q_min = num(summary["q_unlicensed_min"].get<double>());
    violations = std::to_string(summary["states_below_bulk_floor"].get<int>());
    gap = num(r.welfare.relative_gap);
    oscillation = to_string(r.label.evidence.oscillation.kind);
    row.result = {{"regime", regime},
                  {"classification", label_json(r.label)},
                  {"q_unlicensed_min", summary["q_unlicensed_min"]},
                  {"states_below_bulk_floor", summary["states_below_bulk_floor"]}};
  } catch (const ConfigError& e) {
    json issues = json::array();
    for (const auto& i : e.issues()) issues.push_back({{"path", i.path}, {"message", i.message}});
    row.result = {{"error", {{"type", "config"}, {"issues", issues}}}};
    error = "config";
  } catch (const DomainError& e) {
    row.result = {{"error", error_json(e)}};
    error = "domain";
  } catch (const InfeasibleError& e) {
    row.result = {{"error", error_json(e)}};
    error = std::string("infeasible:") + to_string(e.constraint());
  }
  std::string line;
  for (double v : values) line += num(v) + ",";
  line += fmt::format("{},{},{},{},{},{},{},{}", regime, label, q_final, q_min, violations, gap,
                      oscillation, error);
  row.csv = std::move(line);
  return row;
}

std::vector<std::vector<double>> sweep_points(const ScenarioConfig& cfg) {
  std::vector<std::vector<double>> points{{}};
  for (const auto& sp : cfg.sweep) {
    std::vector<std::vector<double>> next;
    for (const auto& prefix : points) {
      for (double v : sp.values) {
        auto p = prefix;
        p.push_back(v);
        next.push_back(std::move(p));
      }
    }
    points = std::move(next);
  }
  return points;
}

Artifacts run_sweep(const ScenarioConfig& cfg) {
  const auto points = sweep_points(cfg);
  std::vector<SweepRow> rows(points.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t k = next++; k < points.size(); k = next++) rows[k] = sweep_point(cfg, points[k]);
  };
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(1, points.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  Artifacts out;
  std::string csv = "index,";
  json params = json::array();
  for (std::size_t k = 0; k < cfg.sweep.size(); ++k) {
    csv += fmt::format("param{},", k);
    params.push_back(cfg.sweep[k].pointer);
  }
  csv += "regime,label,q_unlicensed_final,q_unlicensed_min,states_below_bulk_floor,relative_gap,"
         "oscillation,error\n";
  json report_rows = json::array();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    csv += fmt::format("{},{}\n", k, rows[k].csv);
    report_rows.push_back({{"index", k}, {"values", rows[k].values}, {"result", rows[k].result}});
  }
  out.sweep_csv = std::move(csv);
  out.report = {{"parameters", params}, {"rows", report_rows}};
  return out;
}

}  // namespace

std::string trajectory_csv(const Trajectory& trajectory) {
  std::string out = std::string(kTrajectoryHeader) + "\n";
  for (const auto& s : trajectory.states) {
    const auto& bulk = s.pools[index(TrafficClass::Bulk)];
    const auto& premium = s.pools[index(TrafficClass::Premium)];
    out += fmt::format(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", s.round,
        num(s.load(ProviderId::WifiOnly, NetworkKind::UnlicensedAir)),
        num(s.load(ProviderId::Combined, NetworkKind::UnlicensedAir)),
        num(s.load(NetworkKind::UnlicensedAir)), num(s.load(NetworkKind::LicensedAir)),
        num(s.qos.unlicensed), s.qos.licensed ? num(*s.qos.licensed) : std::string(),
        num(s.profit(ProviderId::WifiOnly)), num(s.profit(ProviderId::Combined)),
        num(bulk[Segment::WifiOnlySubscribers]), num(bulk[Segment::CombinedCellular]),
        num(premium[Segment::WifiOnlySubscribers]), num(premium[Segment::CombinedCellular]),
        num(bulk[Segment::WifiOnlyVisitors] + bulk[Segment::CombinedVisitors]));
  }
  return out;
}

ScenarioConfig with_parameter(const ScenarioConfig& config, const std::string& pointer,
                              double value) {
  json doc = to_json(config);
  try {
    doc[json::json_pointer(pointer)] = value;
  } catch (const json::exception&) {
    throw ConfigError(std::vector<ConfigIssue>{{pointer, "not a valid scenario field"}});
  }
  return scenario_from_json(doc);
}

Artifacts run(Command command, const ScenarioConfig& cfg) {
  Artifacts out;
  try {
    switch (command) {
      case Command::Equilibrium:
        out.report = equilibrium_report(cfg);
        break;
      case Command::Simulate: {
        const Trajectory traj =
            simulate(cfg.market, cfg.initial, cfg.migration, cfg.simulation_options());
        out.trajectory_csv = trajectory_csv(traj);
        out.report = simulate_summary(cfg, traj);
        break;
      }
      case Command::Classify: {
        const ClassifyResult r = classify_pipeline(cfg);
        out.trajectory_csv = trajectory_csv(r.trajectory);
        out.report = label_json(r.label);
        out.report["simulation"] = simulate_summary(cfg, r.trajectory);
        break;
      }
      case Command::Sweep:
        out = run_sweep(cfg);
        break;
      case Command::Dominance:
        out.report = dominance_report(cfg);
        break;
    }
  } catch (const DomainError& e) {
    out = Artifacts{};
    out.report = {{"error", error_json(e)}};
    out.model_error = true;
  } catch (const InfeasibleError& e) {
    out = Artifacts{};
    out.report = {{"error", error_json(e)}};
    out.model_error = true;
  }
  out.report["command"] = to_string(command);
  out.report["loc"] = cfg.market.loc;
  out.report["t"] = cfg.market.t;
  return out;
}

}  // namespace offload
