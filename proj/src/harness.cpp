#include "isac/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace isac::sim {

namespace {

void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError(key + ": " + what);
}

kin::VehicleState true_polar(const World::Vehicle& v, const Vec2& rsu) {
    return kin::cartesian_to_state(v.pose, rsu);
}

track::TrackState bootstrap_track(const World& w, const World::Vehicle& v, int rsu,
                                  int slot) {
    const Scenario& sc = w.sc;
    kin::VehicleState fix = true_polar(v, sc.rsu_pos[rsu]);
    RandomStream rng(stream_seed(sc.seed, std::uint64_t(slot), std::uint64_t(v.id),
                                 100 + std::uint64_t(rsu)));
    const double ns = sc.noise_scale;
    fix.phi = std::clamp(fix.phi + ns * sc.bootstrap_std(0) * rng.gaussian(), -1.0, 1.0);
    fix.d = std::max(fix.d + ns * sc.bootstrap_std(1) * rng.gaussian(), 0.5);
    fix.vdot += ns * sc.bootstrap_std(2) * rng.gaussian();
    return track::make_initial_track(fix, sc.track_init_var.asDiagonal());
}

opt::SolveReport dispatch_solver(const opt::Instance& inst, const std::string& solver,
                                 const opt::FpOptions& fp) {
    if (solver == "heuristic") return opt::assign_heuristic(inst, fp);
    if (solver == "greedy") return opt::assign_greedy(inst, fp);
    if (solver == "distance") return opt::solve_distance(inst, fp);
    throw ConfigError("solver.kind: unknown solver '" + solver + "'");
}

opt::SolveReport fallback_solution(const opt::Instance& inst) {
    opt::SolveReport rep;
    rep.assignment = opt::assign_distance(inst.states);
    rep.beams = radio::BeamformingSet::matched(inst.states, inst.cfg);
    rep.sum_rate_bits = radio::sum_rate(inst.states, rep.beams, rep.assignment, inst.cfg);
    return rep;
}

double sanitize_sqrt(double v) { return std::sqrt(std::max(v, 0.0)); }

}  // namespace

void Scenario::validate() const {
    require(road_half_len > 0.0, "geometry.road_half_length_m", "must be > 0");
    require(road_width > 0.0, "geometry.road_width_m", "must be > 0");
    require(arrival_rate >= 0.0, "traffic.arrival_rate_per_dir", "must be >= 0");
    require(speed_mean > 0.0, "traffic.speed_mean_mps", "must be > 0");
    require(speed_std >= 0.0, "traffic.speed_std_mps", "must be >= 0");
    require(speed_min > 0.0, "traffic.speed_min_mps", "must be > 0");
    require(slot_T > 0.0, "sim.slot_s", "must be > 0");
    require(horizon >= 1, "sim.horizon_slots", "must be >= 1");
    require(warmup_s >= 0.0, "sim.warmup_s", "must be >= 0");
    require(noise_scale >= 0.0, "sim.noise_scale", "must be >= 0");
    require(static_k >= 0, "sim.static_k", "must be >= 0");
    require(radio.n_t >= 1, "radio.n_t", "must be >= 1");
    require(radio.n_r >= 1, "radio.n_r", "must be >= 1");
    require(radio.f_c > 0.0, "radio.f_c_hz", "must be > 0");
    require(radio.c > 0.0, "radio.light_speed_mps", "must be > 0");
    require(radio.alpha_ref > 0.0, "radio.alpha_ref_db", "linear gain must be > 0");
    require(radio.sigma_c2 > 0.0, "radio.sigma_c2_db", "variance must be > 0");
    require(radio.sigma_e2 > 0.0, "radio.sigma_e2_db", "variance must be > 0");
    require(radio.T_s > 0.0 && radio.T_s <= slot_T, "radio.ts_s",
            "must be in (0, sim.slot_s]");
    require(radio.G_mf > 0.0, "radio.matched_filter_gain", "must be > 0");
    require(radio.rho_r > 0.0, "radio.rho_r", "must be > 0");
    require(radio.rho_nu > 0.0, "radio.rho_nu", "must be > 0");
    require(radio.rho_mu > 0.0, "radio.rho_mu", "must be > 0");
    require(track_init_var.minCoeff() > 0.0, "track.init_*_var", "must be > 0");
    require(bootstrap_std.minCoeff() >= 0.0, "track.bootstrap_*_std", "must be >= 0");
    require(process_noise.sigma_phi2 >= 0.0 && process_noise.sigma_d2 >= 0.0 &&
                process_noise.sigma_vdot2 >= 0.0,
            "track.process_*_std", "must be >= 0");
    require(solver == "heuristic" || solver == "greedy" || solver == "distance" ||
                solver == "external",
            "solver.kind", "must be heuristic|greedy|distance|external");
    require(fp.max_outer >= 1, "solver.max_outer", "must be >= 1");
    require(fp.fq_rel_tol > 0.0, "solver.fq_rel_tol", "must be > 0");
    require(fp.pgd_max_steps >= 1, "solver.pgd_max_steps", "must be >= 1");
    require(fp.swap_budget_factor >= 1, "solver.swap_budget_factor", "must be >= 1");
}

std::vector<ArrivalEvent> generate_traffic(const Scenario& sc, RandomStream& rng) {
    std::vector<ArrivalEvent> events;
    const double segment = 2.0 * sc.road_half_len;
    for (int dir = 0; dir < 2; ++dir) {
        if (sc.arrival_rate <= 0.0) break;
        double t = 0.0;
        while (true) {
            t += rng.exponential(sc.arrival_rate);
            const int slot = static_cast<int>(std::floor(t / sc.slot_T));
            if (slot >= sc.horizon) break;
            ArrivalEvent ev;
            ev.slot = slot;
            ev.dir = dir;
            do {
                ev.speed = sc.speed_mean + sc.speed_std * rng.gaussian();
            } while (ev.speed <= sc.speed_min);
            ev.lane_y = (2.0 * rng.uniform() - 1.0) * sc.road_width / 2.0;
            ev.depart_slot =
                ev.slot + static_cast<int>(std::ceil(segment / ev.speed / sc.slot_T));
            events.push_back(ev);
        }
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const ArrivalEvent& a, const ArrivalEvent& b) {
                         return a.slot < b.slot;
                     });
    return events;
}

World make_world(const Scenario& sc) {
    sc.validate();
    World w;
    w.sc = sc;
    RandomStream rng(stream_seed(sc.seed, 0xA11));
    w.schedule = generate_traffic(sc, rng);
    if (sc.solver == "external") {
        if (sc.beams_path.empty())
            throw ConfigError("solver.beams_path: required for the external solver");
        for (auto& sec : io::read_beam_exchange(sc.beams_path)) {
            if (sec.n_t != sc.radio.n_t)
                throw FormatError(sc.beams_path + ": n_t mismatch with scenario");
            auto& rows = w.external[sec.slot];
            rows.insert(rows.end(), sec.rows.begin(), sec.rows.end());
        }
    }
    return w;
}

World make_preset_world(const Scenario& sc, const std::vector<PresetVehicle>& init) {
    Scenario s2 = sc;
    s2.arrival_rate = 0.0;
    World w = make_world(s2);
    for (const auto& pv : init) {
        World::Vehicle v;
        v.id = w.next_id++;
        v.dir = pv.dir;
        v.pose.position = Vec2(pv.x, pv.y);
        v.pose.speed = pv.speed;
        v.pose.heading = pv.dir == 0 ? Vec2(1.0, 0.0) : Vec2(-1.0, 0.0);
        v.arrival_slot = 0;
        for (int i = 0; i < radio::kNumRsu; ++i)
            v.trk[i] = bootstrap_track(w, v, i, 0);
        w.vehicles.push_back(std::move(v));
    }
    return w;
}

std::pair<int, int> step_traffic(World& w) {
    w.slot += 1;
    const int slot = w.slot;
    int departures = 0;
    for (auto& v : w.vehicles)
        if (v.arrival_slot < slot) v.pose = kin::advance_pose(v.pose, w.sc.slot_T);
    const auto out = std::remove_if(w.vehicles.begin(), w.vehicles.end(),
                                    [&](const World::Vehicle& v) {
                                        return std::abs(v.pose.position.x()) >
                                               w.sc.road_half_len;
                                    });
    departures = static_cast<int>(w.vehicles.end() - out);
    w.vehicles.erase(out, w.vehicles.end());

    int arrivals = 0;
    while (w.next_arrival < w.schedule.size() &&
           w.schedule[w.next_arrival].slot <= slot) {
        const ArrivalEvent& ev = w.schedule[w.next_arrival++];
        World::Vehicle v;
        v.id = w.next_id++;
        v.dir = ev.dir;
        v.pose.speed = ev.speed;
        v.pose.heading = ev.dir == 0 ? Vec2(1.0, 0.0) : Vec2(-1.0, 0.0);
        v.pose.position =
            Vec2(ev.dir == 0 ? -w.sc.road_half_len : w.sc.road_half_len, ev.lane_y);
        v.arrival_slot = slot;
        for (int i = 0; i < radio::kNumRsu; ++i)
            v.trk[i] = bootstrap_track(w, v, i, slot);
        w.vehicles.push_back(std::move(v));
        ++arrivals;
    }
    return {arrivals, departures};
}

SlotResult run_slot(World& w, std::vector<DatasetRecord>* dataset) {
    const Scenario& sc = w.sc;
    SlotResult res;
    auto [arrivals, departures] = step_traffic(w);
    res.slot = w.slot;
    res.arrivals = arrivals;
    res.departures = departures;
    const int V = static_cast<int>(w.vehicles.size());
    for (const auto& v : w.vehicles) res.active.push_back(v.id);
    if (V == 0) return res;

    // DT prediction for every (vehicle, RSU) track; fresh arrivals already
    // carry their bootstrap fix as this slot's prediction.
    for (auto& v : w.vehicles) {
        if (v.arrival_slot == w.slot) continue;
        for (int i = 0; i < radio::kNumRsu; ++i) {
            try {
                v.trk[i] = track::predict(v.trk[i], sc.slot_T, sc.process_noise);
            } catch (const DegenerateGeometry&) {
                v.trk[i] = bootstrap_track(w, v, i, w.slot);
                res.track_resets += 1;
            }
        }
    }

    radio::PolarStates pred;
    radio::PolarStates truth;
    MatX lambdas = MatX::Zero(V, radio::kNumRsu);
    for (int i = 0; i < radio::kNumRsu; ++i) {
        pred.s[i].resize(V);
        truth.s[i].resize(V);
        for (int k = 0; k < V; ++k) {
            pred.s[i][k] = w.vehicles[k].trk[i].x_pred;
            truth.s[i][k] = true_polar(w.vehicles[k], sc.rsu_pos[i]);
            try {
                lambdas(k, i) = track::lambda_threshold(
                    w.vehicles[k].trk[i], w.vehicles[k].trk[i].x_pred, sc.radio,
                    sc.pcrb_no_process_noise);
            } catch (const Error&) {
                lambdas(k, i) = 0.0;
            }
        }
    }

    opt::Instance inst{pred, sc.radio, std::move(lambdas)};
    opt::SolveReport rep;
    try {
        if (sc.solver == "external") {
            rep = fallback_solution(inst);
            const auto it = w.external.find(w.slot);
            for (int k = 0; k < V; ++k) {
                const io::BeamSection::Row* row = nullptr;
                if (it != w.external.end())
                    for (const auto& r : it->second)
                        if (r.vehicle == w.vehicles[k].id) {
                            row = &r;
                            break;
                        }
                if (!row) {
                    res.external_missing += 1;
                    continue;
                }
                CVec f = row->f;
                const double n2 = f.squaredNorm();
                if (n2 > 1.0 + 1e-6) f /= std::sqrt(n2);
                rep.assignment.rsu_of[k] = row->rsu;
                rep.beams.f[row->rsu].col(k) = f;
            }
            rep.sum_rate_bits =
                radio::sum_rate(inst.states, rep.beams, rep.assignment, inst.cfg);
        } else {
            rep = dispatch_solver(inst, sc.solver, sc.fp);
        }
    } catch (const Error&) {
        res.solver_failed = true;
        rep = fallback_solution(inst);
    }
    res.fp_iterations = rep.fp_iterations;
    res.swaps = rep.swaps;
    res.infeasible_sensing = rep.infeasible_sensing;

    // Sense with the chosen beams, correct the serving tracks, coast the rest.
    for (int k = 0; k < V; ++k) {
        auto& v = w.vehicles[k];
        const int i = rep.assignment.rsu_of[k];
        v.serving = i;
        const CVec f = rep.beams.f[i].col(k);
        const kin::VehicleState xt = truth.at(i, k);

        bool have_meas = false;
        bool corrected = false;
        sense::Measurement y;
        try {
            RandomStream ms(stream_seed(sc.seed, std::uint64_t(w.slot),
                                        std::uint64_t(v.id), 10 + std::uint64_t(i)));
            y = sense::synthesize_measurement(xt, f, sc.radio, ms, sc.noise_scale);
            have_meas = true;
        } catch (const BeamNull&) {
            res.beam_nulls += 1;
        }
        if (have_meas) {
            try {
                auto cr = track::correct(v.trk[i], y, f, sc.radio, sc.gain_mode);
                v.trk[i] = cr.track;
                if (cr.fallback_used) res.gain_fallbacks += 1;
                corrected = true;
            } catch (const Error&) {
                v.trk[i] = bootstrap_track(w, v, i, w.slot);
                res.track_resets += 1;
            }
        }
        for (int j = 0; j < radio::kNumRsu; ++j) {
            if (j == i && corrected) continue;
            v.trk[j].x_meas = v.trk[j].x_pred;
            v.trk[j].M_meas = v.trk[j].M_pred;
        }

        ServedRecord rec;
        rec.vehicle = v.id;
        rec.rsu = i;
        Mat3 P = v.trk[i].M_pred;
        try {
            const auto q = sense::noise_variances(v.trk[i].x_pred, f, sc.radio);
            const CMat j = sense::measurement_jacobian(v.trk[i].x_pred, f, sc.radio);
            const Mat3& prior = sc.pcrb_no_process_noise ? v.trk[i].M_pred_pure
                                                         : v.trk[i].M_pred;
            P = track::pcrb(track::fisher_info_with_prior(prior, j, q));
        } catch (const Error&) {
            // no echo information; the bound stays at the prior
        }
        rec.rcrb_m = sanitize_sqrt(P(1, 1));
        rec.rcrb_phi = sanitize_sqrt(P(0, 0));
        rec.sinr = radio::sinr(k, i, truth, rep.beams, rep.assignment, sc.radio);
        rec.rate_bits = std::log2(1.0 + rec.sinr);
        rec.range_err_m = std::abs(v.trk[i].x_meas.d - xt.d);
        res.sum_rate_bits += rec.rate_bits;
        res.served.push_back(rec);

        if (dataset) {
            if (have_meas && v.has_prev) {
                DatasetRecord dr;
                dr.slot = w.slot;
                dr.vehicle = v.id;
                dr.rsu = i;
                dr.r_prev = v.r_prev;
                dr.nu_prev = v.nu_prev;
                dr.mu_prev = v.mu_prev;
                dr.f_prev = v.f_prev;
                dr.f_label = f;
                dr.x_sort = v.pose.position.x();
                dataset->push_back(std::move(dr));
            }
            if (have_meas) {
                v.r_prev = y.r;
                v.nu_prev = y.nu;
                v.mu_prev = y.mu;
                v.f_prev = f;
                v.has_prev = true;
            } else {
                v.has_prev = false;
            }
        }
    }
    return res;
}

std::vector<SlotResult> run(const Scenario& sc, std::vector<DatasetRecord>* dataset) {
    World w = make_world(sc);
    std::vector<SlotResult> results;
    results.reserve(sc.horizon);
    for (int s = 0; s < sc.horizon; ++s) results.push_back(run_slot(w, dataset));
    return results;
}

void export_dataset(std::vector<DatasetRecord> records, int n_r, int n_t,
                    const std::string& path) {
    std::stable_sort(records.begin(), records.end(),
                     [](const DatasetRecord& a, const DatasetRecord& b) {
                         if (a.slot != b.slot) return a.slot < b.slot;
                         if (a.x_sort != b.x_sort) return a.x_sort < b.x_sort;
                         return a.vehicle < b.vehicle;
                     });
    std::ofstream out(path);
    if (!out) throw Error("export_dataset: cannot open " + path);
    out << n_r << ' ' << n_t << '\n';
    auto emit_cvec = [&](const CVec& v, int n) {
        for (int p = 0; p < n; ++p) out << ' ' << io::format_double(v(p).real());
        for (int p = 0; p < n; ++p) out << ' ' << io::format_double(v(p).imag());
    };
    for (const auto& r : records) {
        if (r.r_prev.size() != n_r || r.f_prev.size() != n_t ||
            r.f_label.size() != n_t)
            throw Error("export_dataset: record dimensions disagree with header");
        out << r.slot << ' ' << r.vehicle << ' ' << (r.rsu + 1);
        emit_cvec(r.r_prev, n_r);
        emit_cvec(r.f_prev, n_t);
        out << ' ' << io::format_double(r.nu_prev) << ' '
            << io::format_double(r.mu_prev);
        emit_cvec(r.f_label, n_t);
        out << '\n';
    }
    if (!out) throw Error("export_dataset: write failure on " + path);
}

std::vector<DatasetRecord> read_dataset(const std::string& path, int* n_r_out,
                                        int* n_t_out) {
    std::ifstream in(path);
    if (!in) throw FormatError(path + ": cannot open");
    int n_r = 0, n_t = 0;
    if (!(in >> n_r >> n_t) || n_r < 1 || n_t < 1)
        throw FormatError(path + ": bad dimension header");
    if (n_r_out) *n_r_out = n_r;
    if (n_t_out) *n_t_out = n_t;
    std::vector<DatasetRecord> records;
    auto read_cvec = [&](CVec& v, int n) {
        v.resize(n);
        std::vector<double> re(n), im(n);
        for (int p = 0; p < n; ++p)
            if (!(in >> re[p])) throw FormatError(path + ": truncated record");
        for (int p = 0; p < n; ++p)
            if (!(in >> im[p])) throw FormatError(path + ": truncated record");
        for (int p = 0; p < n; ++p) v(p) = Cplx(re[p], im[p]);
    };
    int prev_slot = -1;
    int within_slot = 0;
    while (true) {
        DatasetRecord r;
        int rsu1 = 0;
        if (!(in >> r.slot >> r.vehicle >> rsu1)) break;
        if (rsu1 < 1 || rsu1 > 2) throw FormatError(path + ": RSU field out of range");
        r.rsu = rsu1 - 1;
        read_cvec(r.r_prev, n_r);
        read_cvec(r.f_prev, n_t);
        if (!(in >> r.nu_prev >> r.mu_prev))
            throw FormatError(path + ": truncated record");
        read_cvec(r.f_label, n_t);
        // The file is position-sorted; keep that order on re-export.
        within_slot = r.slot == prev_slot ? within_slot + 1 : 0;
        prev_slot = r.slot;
        r.x_sort = static_cast<double>(within_slot);
        records.push_back(std::move(r));
    }
    return records;
}

opt::Instance snapshot_instance(const Scenario& sc, int K, std::uint64_t seed) {
    RandomStream rng(stream_seed(seed, 0x57A7));
    radio::PolarStates st;
    for (int i = 0; i < radio::kNumRsu; ++i) st.s[i].resize(K);
    for (int k = 0; k < K; ++k) {
        kin::CartesianPose pose;
        pose.position = Vec2((2.0 * rng.uniform() - 1.0) * sc.road_half_len,
                             (2.0 * rng.uniform() - 1.0) * sc.road_width / 2.0);
        const int dir = rng.uniform() < 0.5 ? 0 : 1;
        pose.heading = dir == 0 ? Vec2(1.0, 0.0) : Vec2(-1.0, 0.0);
        do {
            pose.speed = sc.speed_mean + sc.speed_std * rng.gaussian();
        } while (pose.speed <= sc.speed_min);
        for (int i = 0; i < radio::kNumRsu; ++i)
            st.s[i][k] = kin::cartesian_to_state(pose, sc.rsu_pos[i]);
    }
    return opt::Instance::make(std::move(st), sc.radio);
}

std::vector<PresetVehicle> rcrb_preset() {
    return {{-20.0, -2.5, 0, 25.0},
            {-15.0, 2.5, 0, 27.0},
            {15.0, -2.5, 1, 26.0},
            {20.0, 2.5, 1, 24.0}};
}

double mean_active_count(const std::vector<SlotResult>& results, const Scenario& sc) {
    const int warmup_slots = static_cast<int>(sc.warmup_s / sc.slot_T);
    double sum = 0.0;
    int n = 0;
    for (const auto& r : results) {
        if (r.slot < warmup_slots) continue;
        sum += static_cast<double>(r.active.size());
        ++n;
    }
    return n > 0 ? sum / n : 0.0;
}

ExperimentTable run_experiment(const Scenario& sc, const SweepSpec& sweep) {
    ExperimentTable tab;
    if (sweep.replications < 1)
        throw ConfigError("sweep.replications: must be >= 1");
    const int warmup_slots = static_cast<int>(sc.warmup_s / sc.slot_T);

    if (sweep.protocol == "static") {
        for (const auto& solver : sweep.solvers) {
            for (int K : sweep.k_values) {
                for (int ant : sweep.antennas) {
                    for (int rep = 0; rep < sweep.replications; ++rep) {
                        Scenario s2 = sc;
                        s2.radio.n_t = s2.radio.n_r = ant;
                        // Geometry seed shared across solvers.
                        const std::uint64_t cell_seed = stream_seed(
                            sc.seed, 0x5717 + std::uint64_t(K),
                            std::uint64_t(ant), std::uint64_t(rep));
                        const opt::Instance inst = snapshot_instance(s2, K, cell_seed);
                        const opt::SolveReport r = dispatch_solver(inst, solver, s2.fp);
                        ExperimentRow row;
                        row.protocol = sweep.protocol;
                        row.solver = solver;
                        row.k = K;
                        row.antennas = ant;
                        row.rate = 0.0;
                        row.replication = rep;
                        row.seed = cell_seed;
                        row.sum_rate_bits = r.sum_rate_bits;
                        row.per_vehicle_rate = r.sum_rate_bits / K;
                        tab.rows.push_back(std::move(row));
                    }
                }
            }
        }
        return tab;
    }

    if (sweep.protocol == "timeseries") {
        for (const auto& solver : sweep.solvers) {
            for (double rate : sweep.rates) {
                for (int ant : sweep.antennas) {
                    for (int rep = 0; rep < sweep.replications; ++rep) {
                        Scenario s2 = sc;
                        s2.solver = solver;
                        s2.arrival_rate = rate;
                        s2.radio.n_t = s2.radio.n_r = ant;
                        s2.seed = stream_seed(sc.seed, 0x71AE,
                                              std::uint64_t(rate * 1000.0) +
                                                  std::uint64_t(ant),
                                              std::uint64_t(rep));
                        const auto results = run(s2);
                        ExperimentRow row;
                        row.protocol = sweep.protocol;
                        row.solver = solver;
                        row.antennas = ant;
                        row.rate = rate;
                        row.replication = rep;
                        row.seed = s2.seed;
                        double sum = 0.0, act = 0.0;
                        int n = 0;
                        for (const auto& r : results) {
                            if (r.slot < warmup_slots) continue;
                            sum += r.sum_rate_bits;
                            act += static_cast<double>(r.active.size());
                            ++n;
                        }
                        row.sum_rate_bits = n ? sum / n : 0.0;
                        row.mean_active = n ? act / n : 0.0;
                        row.per_vehicle_rate =
                            row.mean_active > 0.0 ? row.sum_rate_bits / row.mean_active
                                                  : 0.0;
                        tab.rows.push_back(std::move(row));
                    }
                }
            }
        }
        return tab;
    }

    if (sweep.protocol == "rcrb") {
        for (int ant : sweep.antennas) {
            for (int rep = 0; rep < sweep.replications; ++rep) {
                Scenario s2 = sc;
                s2.radio.n_t = s2.radio.n_r = ant;
                s2.seed = stream_seed(sc.seed, 0xCB9, std::uint64_t(ant),
                                      std::uint64_t(rep));
                World w = make_preset_world(s2, rcrb_preset());
                std::vector<SlotResult> results;
                for (int s = 0; s < s2.horizon; ++s) results.push_back(run_slot(w));
                // Stationary value over the last quarter of the horizon.
                double sum = 0.0;
                int n = 0;
                for (const auto& r : results) {
                    if (r.slot < 3 * s2.horizon / 4) continue;
                    for (const auto& rec : r.served) {
                        sum += rec.rcrb_m;
                        ++n;
                    }
                }
                ExperimentRow row;
                row.protocol = sweep.protocol;
                row.solver = s2.solver;
                row.k = static_cast<int>(rcrb_preset().size());
                row.antennas = ant;
                row.replication = rep;
                row.seed = s2.seed;
                row.stationary_rcrb_m = n ? sum / n : 0.0;
                tab.rows.push_back(std::move(row));
            }
        }
        return tab;
    }

    throw ConfigError("sweep.protocol: must be static|timeseries|rcrb");
}

}  // namespace isac::sim
