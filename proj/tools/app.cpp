#include "app.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "isac/config.hpp"
#include "isac/selftest.hpp"

#ifndef ISAC_GIT_COMMIT
#define ISAC_GIT_COMMIT "unknown"
#endif

namespace isac::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CommonOpts {
    std::string scenario;
    std::string out;
    cfg::Overrides ov;
};

void add_common(CLI::App* sub, CommonOpts& o, bool needs_out = true) {
    sub->add_option("--scenario", o.scenario, "scenario file (flat key = value)");
    auto* out = sub->add_option("--out", o.out, "output directory");
    if (needs_out) out->required();
    sub->add_option("--seed", o.ov.seed, "override sim.seed");
    sub->add_option("--solver", o.ov.solver, "override solver.kind")
        ->check(CLI::IsMember({"heuristic", "greedy", "distance", "external"}));
    sub->add_option("--beams", o.ov.beams, "beam-exchange file for the external solver");
    sub->add_option("--horizon", o.ov.horizon, "override sim.horizon_slots");
    sub->add_option("--rate", o.ov.rate, "override traffic.arrival_rate_per_dir");
    sub->add_option("--antennas", o.ov.antennas, "override radio.n_t and radio.n_r");
    sub->add_option("--k", o.ov.k, "override sim.static_k");
}

double db10(double v) { return 10.0 * std::log10(std::max(v, 1e-30)); }

void write_manifest(const fs::path& dir, const std::string& command,
                    const CommonOpts& o, const cfg::LoadedConfig& lc) {
    json j;
    j["command"] = command;
    j["scenario_file"] = o.scenario;
    j["git_commit"] = ISAC_GIT_COMMIT;
    json ovj = json::object();
    if (o.ov.seed) ovj["seed"] = *o.ov.seed;
    if (o.ov.solver) ovj["solver"] = *o.ov.solver;
    if (o.ov.beams) ovj["beams"] = *o.ov.beams;
    if (o.ov.horizon) ovj["horizon"] = *o.ov.horizon;
    if (o.ov.antennas) ovj["antennas"] = *o.ov.antennas;
    if (o.ov.k) ovj["k"] = *o.ov.k;
    if (o.ov.rate) ovj["rate"] = *o.ov.rate;
    j["overrides"] = ovj;
    j["config"] = cfg::resolved_keys(lc);
    std::ofstream f(dir / "manifest.json");
    f << j.dump(2) << '\n';
    if (!f) throw Error("cannot write manifest.json");
}

void write_results_csv(const fs::path& dir, const std::vector<sim::SlotResult>& results,
                       const sim::Scenario& sc) {
    std::ofstream f(dir / "results.csv");
    f << "slot,vehicle,rsu,sinr_db,rate_bps_hz,rcrb_m,range_err_m,solver,seed\n";
    for (const auto& slot : results)
        for (const auto& rec : slot.served)
            f << slot.slot << ',' << rec.vehicle << ',' << (rec.rsu + 1) << ','
              << io::format_double(db10(rec.sinr)) << ','
              << io::format_double(rec.rate_bits) << ','
              << io::format_double(rec.rcrb_m) << ','
              << io::format_double(rec.range_err_m) << ',' << sc.solver << ','
              << sc.seed << '\n';
    if (!f) throw Error("cannot write results.csv");
}

constexpr const char* kAggregateHeader =
    "protocol,solver,k,antennas,rate,replications,mean_sum_rate_bps_hz,"
    "ci95_sum_rate,mean_per_vehicle_rate_bps_hz,ci95_per_vehicle_rate,"
    "mean_active,mean_rcrb_m\n";

struct Agg {
    double mean = 0.0, ci95 = 0.0;
};

Agg aggregate(const std::vector<double>& xs) {
    Agg a;
    if (xs.empty()) return a;
    for (double x : xs) a.mean += x;
    a.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double var = 0.0;
        for (double x : xs) var += (x - a.mean) * (x - a.mean);
        var /= static_cast<double>(xs.size() - 1);
        a.ci95 = 1.96 * std::sqrt(var / static_cast<double>(xs.size()));
    }
    return a;
}

void write_run_aggregate(const fs::path& dir, const std::vector<sim::SlotResult>& results,
                         const sim::Scenario& sc) {
    const int warmup_slots = static_cast<int>(sc.warmup_s / sc.slot_T);
    std::vector<double> rates, actives, rcrbs;
    for (const auto& r : results) {
        if (r.slot < warmup_slots) continue;
        rates.push_back(r.sum_rate_bits);
        actives.push_back(static_cast<double>(r.active.size()));
        for (const auto& rec : r.served) rcrbs.push_back(rec.rcrb_m);
    }
    const Agg rate = aggregate(rates);
    const Agg act = aggregate(actives);
    const Agg rcrb = aggregate(rcrbs);
    const double per_vehicle = act.mean > 0.0 ? rate.mean / act.mean : 0.0;
    std::ofstream f(dir / "aggregate.csv");
    f << kAggregateHeader;
    f << "run," << sc.solver << ",0," << sc.radio.n_t << ','
      << io::format_double(sc.arrival_rate) << ",1,"
      << io::format_double(rate.mean) << ',' << io::format_double(rate.ci95) << ','
      << io::format_double(per_vehicle) << ",0," << io::format_double(act.mean)
      << ',' << io::format_double(rcrb.mean) << '\n';
    if (!f) throw Error("cannot write aggregate.csv");
}

void write_sweep_outputs(const fs::path& dir, const sim::ExperimentTable& tab) {
    {
        std::ofstream f(dir / "cells.csv");
        f << "protocol,solver,k,antennas,rate,replication,seed,sum_rate_bps_hz,"
             "per_vehicle_rate_bps_hz,mean_active,stationary_rcrb_m\n";
        for (const auto& r : tab.rows)
            f << r.protocol << ',' << r.solver << ',' << r.k << ',' << r.antennas
              << ',' << io::format_double(r.rate) << ',' << r.replication << ','
              << r.seed << ',' << io::format_double(r.sum_rate_bits) << ','
              << io::format_double(r.per_vehicle_rate) << ','
              << io::format_double(r.mean_active) << ','
              << io::format_double(r.stationary_rcrb_m) << '\n';
        if (!f) throw Error("cannot write cells.csv");
    }
    // Group rows by (protocol, solver, k, antennas, rate).
    std::map<std::string, std::vector<const sim::ExperimentRow*>> groups;
    for (const auto& r : tab.rows) {
        const std::string key = r.protocol + "," + r.solver + "," +
                                std::to_string(r.k) + "," +
                                std::to_string(r.antennas) + "," +
                                io::format_double(r.rate);
        groups[key].push_back(&r);
    }
    std::ofstream f(dir / "aggregate.csv");
    f << kAggregateHeader;
    for (const auto& [key, rows] : groups) {
        std::vector<double> sums, per_v, actives, rcrbs;
        for (const auto* r : rows) {
            sums.push_back(r->sum_rate_bits);
            per_v.push_back(r->per_vehicle_rate);
            actives.push_back(r->mean_active);
            rcrbs.push_back(r->stationary_rcrb_m);
        }
        const Agg s = aggregate(sums);
        const Agg p = aggregate(per_v);
        f << key << ',' << rows.size() << ',' << io::format_double(s.mean) << ','
          << io::format_double(s.ci95) << ',' << io::format_double(p.mean) << ','
          << io::format_double(p.ci95) << ','
          << io::format_double(aggregate(actives).mean) << ','
          << io::format_double(aggregate(rcrbs).mean) << '\n';
    }
    if (!f) throw Error("cannot write aggregate.csv");
}

int cmd_run(const CommonOpts& o, const std::string& command) {
    cfg::Overrides ov = o.ov;
    if (command == "eval-external") {
        if (!ov.beams || ov.beams->empty())
            throw ConfigError("--beams: required for eval-external");
        ov.solver = "external";
    }
    cfg::LoadedConfig lc = cfg::load_config(o.scenario, ov);
    if (command == "eval-external" && lc.scenario.solver != "external")
        throw ConfigError("solver.kind: eval-external forces the external solver");
    fs::create_directories(o.out);
    const auto results = sim::run(lc.scenario);
    write_results_csv(o.out, results, lc.scenario);
    write_run_aggregate(o.out, results, lc.scenario);
    write_manifest(o.out, command, o, lc);
    return 0;
}

int cmd_sweep(const CommonOpts& o) {
    cfg::LoadedConfig lc = cfg::load_config(o.scenario, o.ov);
    fs::create_directories(o.out);
    const auto tab = sim::run_experiment(lc.scenario, lc.sweep);
    write_sweep_outputs(o.out, tab);
    write_manifest(o.out, "sweep", o, lc);
    return 0;
}

int cmd_export_dataset(const CommonOpts& o) {
    cfg::LoadedConfig lc = cfg::load_config(o.scenario, o.ov);
    if (lc.scenario.solver != "heuristic")
        throw ConfigError("solver.kind: dataset labels come from the heuristic solver");
    const fs::path out_dir(o.out);
    fs::create_directories(out_dir);
    std::vector<sim::DatasetRecord> records;
    sim::run(lc.scenario, &records);
    sim::export_dataset(std::move(records), lc.scenario.radio.n_r,
                        lc.scenario.radio.n_t,
                        (out_dir / "dataset.txt").string());
    write_manifest(out_dir, "export-dataset", o, lc);
    return 0;
}

int cmd_selftest() {
    bool all_ok = true;
    for (const auto& [name, ok] : selftest()) {
        std::cout << (ok ? "[ok]   " : "[FAIL] ") << name << '\n';
        all_ok = all_ok && ok;
    }
    return all_ok ? 0 : 2;
}

}  // namespace

int app_main(const std::vector<std::string>& args) {
    CLI::App app{"Two-RSU ISAC vehicular network simulator"};
    app.require_subcommand(1);

    CommonOpts run_o, sweep_o, export_o, eval_o;
    auto* run = app.add_subcommand("run", "closed-loop simulation, per-slot CSV");
    add_common(run, run_o);
    auto* sweep = app.add_subcommand("sweep", "experiment sweep over solvers/K/antennas");
    add_common(sweep, sweep_o);
    auto* exporter =
        app.add_subcommand("export-dataset", "emit the beam-predictor training set");
    add_common(exporter, export_o);
    auto* evaluate =
        app.add_subcommand("eval-external", "run with imported beam predictions");
    add_common(evaluate, eval_o);
    app.add_subcommand("selftest", "run the built-in invariant suite");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            std::cout << app.help() << std::flush;
            return 0;
        }
        std::cerr << e.what() << '\n' << app.help();
        return 1;
    }

    try {
        if (run->parsed()) return cmd_run(run_o, "run");
        if (sweep->parsed()) return cmd_sweep(sweep_o);
        if (exporter->parsed()) return cmd_export_dataset(export_o);
        if (evaluate->parsed()) return cmd_run(eval_o, "eval-external");
        return cmd_selftest();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace isac::cli
