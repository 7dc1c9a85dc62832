#pragma once
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "isac/beam_exchange.hpp"
#include "isac/optimizer.hpp"
#include "isac/tracking.hpp"

namespace isac::sim {

/// Full experiment configuration; defaults reproduce the reference
/// two-RSU highway setup.
struct Scenario {
    std::array<Vec2, radio::kNumRsu> rsu_pos{Vec2(0.0, 30.0), Vec2(0.0, -30.0)};
    double road_half_len = 30.0;  // segment x in [-30, 30]
    double road_width = 10.0;

    double arrival_rate = 5.0;  // vehicles/s per direction
    double speed_mean = 30.0;   // m/s
    double speed_std = 3.0;
    double speed_min = 5.0;  // truncation

    double slot_T = 0.02;
    int horizon = 2000;
    std::uint64_t seed = 1;
    double warmup_s = 5.0;
    double noise_scale = 1.0;
    int static_k = 0;  // snapshot protocols place this many vehicles

    std::string solver = "heuristic";  // heuristic | greedy | distance | external
    std::string beams_path;            // external solver input

    track::GainMode gain_mode = track::GainMode::Residual;
    bool pcrb_no_process_noise = false;
    Vec3 track_init_var{1e-2, 1.0, 1.0};  // M0 diagonal (phi, d, vdot)
    // Bootstrap-fix noise; the angle std must stay inside the beamwidth
    // (~2/n_t) or the first beam never locks onto the vehicle.
    Vec3 bootstrap_std{0.01, 0.5, 0.5};

    radio::RadioConfig radio;
    kin::ProcessNoise process_noise;
    opt::FpOptions fp;

    void validate() const;  // throws ConfigError naming the offending key
};

struct ArrivalEvent {
    int slot = 0;
    int dir = 0;  // 0: eastbound (+x), 1: westbound (-x)
    double speed = 0.0;
    double lane_y = 0.0;
    int depart_slot = 0;
};

/// Poisson arrivals per direction over the scenario horizon; each vehicle
/// carries a truncated-Gaussian speed and a uniform lane offset, and departs
/// when it leaves the segment.
std::vector<ArrivalEvent> generate_traffic(const Scenario& sc, RandomStream& rng);

struct ServedRecord {
    int vehicle = 0;
    int rsu = 0;  // 0-based
    double sinr = 0.0;
    double rate_bits = 0.0;
    double rcrb_m = 0.0;    // sqrt of the range-entry PCRB
    double rcrb_phi = 0.0;  // sqrt of the angle-entry PCRB
    double range_err_m = 0.0;
};

struct SlotResult {
    int slot = 0;
    std::vector<int> active;
    std::vector<ServedRecord> served;
    double sum_rate_bits = 0.0;
    int arrivals = 0;
    int departures = 0;
    int fp_iterations = 0;
    int swaps = 0;
    int gain_fallbacks = 0;
    int beam_nulls = 0;
    int track_resets = 0;
    int external_missing = 0;
    bool solver_failed = false;
    bool infeasible_sensing = false;
};

/// One dataset record: slot-(n-1) echo features, slot-n label beam.
struct DatasetRecord {
    int slot = 0;
    int vehicle = 0;
    int rsu = 0;  // serving RSU at the label slot, 0-based
    CVec r_prev;
    double nu_prev = 0.0;
    double mu_prev = 0.0;
    CVec f_prev;
    CVec f_label;
    double x_sort = 0.0;  // along-road coordinate for position sorting
};

struct World {
    Scenario sc;
    std::vector<ArrivalEvent> schedule;
    std::size_t next_arrival = 0;
    int slot = -1;  // last completed slot
    int next_id = 0;

    struct Vehicle {
        int id = 0;
        kin::CartesianPose pose;
        int dir = 0;
        int arrival_slot = 0;
        std::array<track::TrackState, radio::kNumRsu> trk;
        int serving = -1;
        bool has_prev = false;  // dataset feature memory
        CVec r_prev;
        double nu_prev = 0.0, mu_prev = 0.0;
        CVec f_prev;
    };
    std::vector<Vehicle> vehicles;

    std::map<int, std::vector<io::BeamSection::Row>> external;  // slot -> rows
};

World make_world(const Scenario& sc);

/// Preset-vehicle world (no arrivals); entries are (x, y, dir, speed).
struct PresetVehicle {
    double x = 0.0, y = 0.0;
    int dir = 0;
    double speed = 30.0;
};
World make_preset_world(const Scenario& sc, const std::vector<PresetVehicle>& init);

/// Traffic-only part of a slot: propagate poses, retire departures, admit
/// arrivals (with bootstrap tracks). Returns (arrivals, departures).
std::pair<int, int> step_traffic(World& w);

/// One closed-loop slot: ground truth -> predict -> solve -> sense ->
/// correct -> metrics. Solver failures fall back to distance matching with
/// matched beams and are flagged; the slot always completes.
SlotResult run_slot(World& w, std::vector<DatasetRecord>* dataset = nullptr);

std::vector<SlotResult> run(const Scenario& sc,
                            std::vector<DatasetRecord>* dataset = nullptr);

/// Position-sorted dataset export for the beam predictor; one-line header
/// carries the dimensions. Field order per record:
///   slot k rsu  Re r(n_r) Im r(n_r)  Re f_prev(n_t) Im f_prev(n_t)  nu mu
///   Re f(n_t) Im f(n_t)
void export_dataset(std::vector<DatasetRecord> records, int n_r, int n_t,
                    const std::string& path);
std::vector<DatasetRecord> read_dataset(const std::string& path, int* n_r = nullptr,
                                        int* n_t = nullptr);

struct SweepSpec {
    std::string protocol = "static";  // static | timeseries | rcrb
    std::vector<std::string> solvers{"heuristic", "distance"};
    std::vector<int> antennas{32};
    std::vector<int> k_values{20};
    std::vector<double> rates{5.0};
    int replications = 1;
};

struct ExperimentRow {
    std::string protocol;
    std::string solver;
    int k = 0;
    int antennas = 0;
    double rate = 0.0;
    int replication = 0;
    std::uint64_t seed = 0;
    double sum_rate_bits = 0.0;
    double per_vehicle_rate = 0.0;
    double mean_active = 0.0;
    double stationary_rcrb_m = 0.0;
};

struct ExperimentTable {
    std::vector<ExperimentRow> rows;
};

/// Uniformly placed snapshot instance (solver sees exact states, no
/// sensing thresholds); shared by the static protocol and its tests.
opt::Instance snapshot_instance(const Scenario& sc, int K, std::uint64_t seed);

/// Staggered four-vehicle closed-loop geometry used by the RCRB protocol.
std::vector<PresetVehicle> rcrb_preset();

ExperimentTable run_experiment(const Scenario& sc, const SweepSpec& sweep);

/// Mean active vehicle count over slots after the warmup period.
double mean_active_count(const std::vector<SlotResult>& results, const Scenario& sc);

}  // namespace isac::sim
