#include "isac/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "isac/beam_exchange.hpp"

namespace isac::cfg {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct KeyMap {
    std::map<std::string, std::string> kv;
    std::string source;

    bool take(const std::string& key, std::string& out) {
        auto it = kv.find(key);
        if (it == kv.end()) return false;
        out = it->second;
        kv.erase(it);
        return true;
    }

    template <typename T, typename Parse>
    void bind(const std::string& key, T& field, Parse parse) {
        std::string raw;
        if (!take(key, raw)) return;
        try {
            field = parse(raw);
        } catch (const ConfigError&) {
            throw;
        } catch (...) {
            throw ConfigError(key + ": cannot parse value '" + raw + "'");
        }
    }
};

double parse_double(const std::string& s) {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw ConfigError("trailing characters");
    return v;
}

long long parse_int(const std::string& s) {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw ConfigError("trailing characters");
    return v;
}

bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw ConfigError("expected true/false");
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

LoadedConfig apply(KeyMap& m, const Overrides& ov) {
    LoadedConfig lc;
    sim::Scenario& sc = lc.scenario;
    sim::SweepSpec& sw = lc.sweep;

    auto d = [&](const std::string& k, double& f) { m.bind(k, f, parse_double); };
    auto b = [&](const std::string& k, bool& f) { m.bind(k, f, parse_bool); };
    auto s = [&](const std::string& k, std::string& f) {
        m.bind(k, f, [](const std::string& v) { return v; });
    };

    d("geometry.rsu1_x", sc.rsu_pos[0].x());
    d("geometry.rsu1_y", sc.rsu_pos[0].y());
    d("geometry.rsu2_x", sc.rsu_pos[1].x());
    d("geometry.rsu2_y", sc.rsu_pos[1].y());
    d("geometry.road_half_length_m", sc.road_half_len);
    d("geometry.road_width_m", sc.road_width);

    d("traffic.arrival_rate_per_dir", sc.arrival_rate);
    d("traffic.speed_mean_mps", sc.speed_mean);
    d("traffic.speed_std_mps", sc.speed_std);
    d("traffic.speed_min_mps", sc.speed_min);

    d("sim.slot_s", sc.slot_T);
    m.bind("sim.horizon_slots", sc.horizon,
           [](const std::string& v) { return static_cast<int>(parse_int(v)); });
    m.bind("sim.seed", sc.seed, [](const std::string& v) {
        return static_cast<std::uint64_t>(parse_int(v));
    });
    d("sim.warmup_s", sc.warmup_s);
    d("sim.noise_scale", sc.noise_scale);
    m.bind("sim.static_k", sc.static_k,
           [](const std::string& v) { return static_cast<int>(parse_int(v)); });

    m.bind("radio.n_t", sc.radio.n_t,
           [](const std::string& v) { return static_cast<int>(parse_int(v)); });
    m.bind("radio.n_r", sc.radio.n_r,
           [](const std::string& v) { return static_cast<int>(parse_int(v)); });
    d("radio.f_c_hz", sc.radio.f_c);
    d("radio.light_speed_mps", sc.radio.c);
    m.bind("radio.alpha_ref_db", sc.radio.alpha_ref,
           [](const std::string& v) { return db_to_linear(parse_double(v)); });
    double vr = sc.radio.varrho.real(), vi = sc.radio.varrho.imag();
    d("radio.varrho_re", vr);
    d("radio.varrho_im", vi);
    sc.radio.varrho = Cplx(vr, vi);
    m.bind("radio.sigma_c2_db", sc.radio.sigma_c2,
           [](const std::string& v) { return db_to_linear(parse_double(v)); });
    m.bind("radio.sigma_e2_db", sc.radio.sigma_e2,
           [](const std::string& v) { return db_to_linear(parse_double(v)); });
    d("radio.ts_s", sc.radio.T_s);
    d("radio.matched_filter_gain", sc.radio.G_mf);
    d("radio.rho_r", sc.radio.rho_r);
    d("radio.rho_nu", sc.radio.rho_nu);
    d("radio.rho_mu", sc.radio.rho_mu);
    b("radio.exact_jacobian", sc.radio.exact_jacobian);

    std::string gain_mode = "residual";
    s("track.gain_mode", gain_mode);
    if (gain_mode == "standard")
        sc.gain_mode = track::GainMode::Standard;
    else if (gain_mode == "residual")
        sc.gain_mode = track::GainMode::Residual;
    else
        throw ConfigError("track.gain_mode: must be standard|residual");
    b("track.pcrb_no_process_noise", sc.pcrb_no_process_noise);
    d("track.init_phi_var", sc.track_init_var(0));
    d("track.init_d_var", sc.track_init_var(1));
    d("track.init_vdot_var", sc.track_init_var(2));
    d("track.bootstrap_phi_std", sc.bootstrap_std(0));
    d("track.bootstrap_d_std", sc.bootstrap_std(1));
    d("track.bootstrap_vdot_std", sc.bootstrap_std(2));
    double p_phi = std::sqrt(sc.process_noise.sigma_phi2);
    double p_d = std::sqrt(sc.process_noise.sigma_d2);
    double p_v = std::sqrt(sc.process_noise.sigma_vdot2);
    d("track.process_phi_std", p_phi);
    d("track.process_d_std", p_d);
    d("track.process_vdot_std", p_v);
    sc.process_noise = {p_phi * p_phi, p_d * p_d, p_v * p_v};

    s("solver.kind", sc.solver);
    s("solver.beams_path", sc.beams_path);
    m.bind("solver.max_outer", sc.fp.max_outer,
           [](const std::string& v) { return static_cast<int>(parse_int(v)); });
    d("solver.fq_rel_tol", sc.fp.fq_rel_tol);
    m.bind("solver.pgd_max_steps", sc.fp.pgd_max_steps,
           [](const std::string& v) { return static_cast<int>(parse_int(v)); });
    m.bind("solver.swap_budget_factor", sc.fp.swap_budget_factor,
           [](const std::string& v) { return static_cast<int>(parse_int(v)); });
    b("solver.printed_y_variant", sc.fp.printed_y_variant);

    s("sweep.protocol", sw.protocol);
    m.bind("sweep.solvers", sw.solvers,
           [](const std::string& v) { return split_list(v); });
    m.bind("sweep.antennas", sw.antennas, [](const std::string& v) {
        std::vector<int> out;
        for (auto& item : split_list(v)) out.push_back(static_cast<int>(parse_int(item)));
        return out;
    });
    m.bind("sweep.k_values", sw.k_values, [](const std::string& v) {
        std::vector<int> out;
        for (auto& item : split_list(v)) out.push_back(static_cast<int>(parse_int(item)));
        return out;
    });
    m.bind("sweep.rates", sw.rates, [](const std::string& v) {
        std::vector<double> out;
        for (auto& item : split_list(v)) out.push_back(parse_double(item));
        return out;
    });
    m.bind("sweep.replications", sw.replications,
           [](const std::string& v) { return static_cast<int>(parse_int(v)); });

    if (!m.kv.empty())
        throw ConfigError(m.source + ": unknown key '" + m.kv.begin()->first + "'");

    if (ov.seed) sc.seed = *ov.seed;
    if (ov.solver) sc.solver = *ov.solver;
    if (ov.beams) sc.beams_path = *ov.beams;
    if (ov.horizon) sc.horizon = *ov.horizon;
    if (ov.antennas) sc.radio.n_t = sc.radio.n_r = *ov.antennas;
    if (ov.k) sc.static_k = *ov.k;
    if (ov.rate) sc.arrival_rate = *ov.rate;

    sc.validate();
    return lc;
}

}  // namespace

LoadedConfig parse_config_text(const std::string& text, const std::string& name,
                               const Overrides& ov) {
    KeyMap m;
    m.source = name;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(name + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(name + ":" + std::to_string(lineno) + ": empty key");
        if (m.kv.count(key))
            throw ConfigError(name + ":" + std::to_string(lineno) +
                              ": duplicate key '" + key + "'");
        m.kv[key] = value;
    }
    return apply(m, ov);
}

LoadedConfig load_config(const std::string& path, const Overrides& ov) {
    if (path.empty()) {
        KeyMap empty;
        empty.source = "<defaults>";
        return apply(empty, ov);
    }
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open scenario file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path, ov);
}

std::map<std::string, std::string> resolved_keys(const LoadedConfig& lc) {
    const sim::Scenario& sc = lc.scenario;
    const sim::SweepSpec& sw = lc.sweep;
    std::map<std::string, std::string> out;
    auto fd = [](double v) { return io::format_double(v); };
    out["geometry.rsu1_x"] = fd(sc.rsu_pos[0].x());
    out["geometry.rsu1_y"] = fd(sc.rsu_pos[0].y());
    out["geometry.rsu2_x"] = fd(sc.rsu_pos[1].x());
    out["geometry.rsu2_y"] = fd(sc.rsu_pos[1].y());
    out["geometry.road_half_length_m"] = fd(sc.road_half_len);
    out["geometry.road_width_m"] = fd(sc.road_width);
    out["traffic.arrival_rate_per_dir"] = fd(sc.arrival_rate);
    out["traffic.speed_mean_mps"] = fd(sc.speed_mean);
    out["traffic.speed_std_mps"] = fd(sc.speed_std);
    out["traffic.speed_min_mps"] = fd(sc.speed_min);
    out["sim.slot_s"] = fd(sc.slot_T);
    out["sim.horizon_slots"] = std::to_string(sc.horizon);
    out["sim.seed"] = std::to_string(sc.seed);
    out["sim.warmup_s"] = fd(sc.warmup_s);
    out["sim.noise_scale"] = fd(sc.noise_scale);
    out["sim.static_k"] = std::to_string(sc.static_k);
    out["radio.n_t"] = std::to_string(sc.radio.n_t);
    out["radio.n_r"] = std::to_string(sc.radio.n_r);
    out["radio.f_c_hz"] = fd(sc.radio.f_c);
    out["radio.light_speed_mps"] = fd(sc.radio.c);
    out["radio.alpha_ref_db"] = fd(linear_to_db(sc.radio.alpha_ref));
    out["radio.varrho_re"] = fd(sc.radio.varrho.real());
    out["radio.varrho_im"] = fd(sc.radio.varrho.imag());
    out["radio.sigma_c2_db"] = fd(linear_to_db(sc.radio.sigma_c2));
    out["radio.sigma_e2_db"] = fd(linear_to_db(sc.radio.sigma_e2));
    out["radio.ts_s"] = fd(sc.radio.T_s);
    out["radio.matched_filter_gain"] = fd(sc.radio.G_mf);
    out["radio.rho_r"] = fd(sc.radio.rho_r);
    out["radio.rho_nu"] = fd(sc.radio.rho_nu);
    out["radio.rho_mu"] = fd(sc.radio.rho_mu);
    out["radio.exact_jacobian"] = sc.radio.exact_jacobian ? "true" : "false";
    out["track.gain_mode"] =
        sc.gain_mode == track::GainMode::Residual ? "residual" : "standard";
    out["track.pcrb_no_process_noise"] = sc.pcrb_no_process_noise ? "true" : "false";
    out["track.init_phi_var"] = fd(sc.track_init_var(0));
    out["track.init_d_var"] = fd(sc.track_init_var(1));
    out["track.init_vdot_var"] = fd(sc.track_init_var(2));
    out["track.bootstrap_phi_std"] = fd(sc.bootstrap_std(0));
    out["track.bootstrap_d_std"] = fd(sc.bootstrap_std(1));
    out["track.bootstrap_vdot_std"] = fd(sc.bootstrap_std(2));
    out["track.process_phi_std"] = fd(std::sqrt(sc.process_noise.sigma_phi2));
    out["track.process_d_std"] = fd(std::sqrt(sc.process_noise.sigma_d2));
    out["track.process_vdot_std"] = fd(std::sqrt(sc.process_noise.sigma_vdot2));
    out["solver.kind"] = sc.solver;
    out["solver.beams_path"] = sc.beams_path;
    out["solver.max_outer"] = std::to_string(sc.fp.max_outer);
    out["solver.fq_rel_tol"] = fd(sc.fp.fq_rel_tol);
    out["solver.pgd_max_steps"] = std::to_string(sc.fp.pgd_max_steps);
    out["solver.swap_budget_factor"] = std::to_string(sc.fp.swap_budget_factor);
    out["solver.printed_y_variant"] = sc.fp.printed_y_variant ? "true" : "false";
    out["sweep.protocol"] = sw.protocol;
    std::string solvers;
    for (const auto& s : sw.solvers) solvers += (solvers.empty() ? "" : ",") + s;
    out["sweep.solvers"] = solvers;
    auto join_int = [](const std::vector<int>& v) {
        std::string s;
        for (int x : v) s += (s.empty() ? "" : ",") + std::to_string(x);
        return s;
    };
    out["sweep.antennas"] = join_int(sw.antennas);
    out["sweep.k_values"] = join_int(sw.k_values);
    std::string rates;
    for (double r : sw.rates) rates += (rates.empty() ? "" : ",") + fd(r);
    out["sweep.rates"] = rates;
    out["sweep.replications"] = std::to_string(sw.replications);
    return out;
}

}  // namespace isac::cfg
