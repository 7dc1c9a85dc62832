#include "isac/selftest.hpp"

#include <cmath>

#include "isac/harness.hpp"

namespace isac {

namespace {

kin::VehicleState random_admissible(RandomStream& rng) {
    kin::VehicleState x;
    x.phi = (rng.uniform() < 0.5 ? -1.0 : 1.0) * (0.05 + 0.95 * rng.uniform());
    x.d = 5.0 + 195.0 * rng.uniform();
    x.vdot = (rng.uniform() < 0.5 ? -1.0 : 1.0) * (0.5 + 39.5 * rng.uniform());
    return x;
}

/// Propagates via the Cartesian picture: speed v/phi along the heading,
/// range and angle re-derived geometrically.
kin::VehicleState cartesian_step(const kin::VehicleState& x, double T) {
    const double speed = x.vdot / x.phi;
    kin::CartesianPose pose;
    pose.position = Vec2(0.0, 0.0);
    pose.heading = Vec2(1.0, 0.0);
    pose.speed = speed;
    // Place the RSU consistent with (phi, d).
    const Vec2 rsu(x.phi * x.d, std::sqrt(std::max(1.0 - x.phi * x.phi, 0.0)) * x.d);
    return kin::cartesian_to_state(kin::advance_pose(pose, T), rsu);
}

}  // namespace

std::vector<std::pair<std::string, bool>> selftest() {
    std::vector<std::pair<std::string, bool>> out;

    {
        RandomStream rng(11);
        bool ok = true;
        for (int t = 0; t < 100; ++t) {
            const double phi = 2.0 * rng.uniform() - 1.0;
            ok = ok && std::abs(radio::steer_tx(phi, 32).norm() - 1.0) < 1e-12;
        }
        out.emplace_back("steering norms", ok);
    }
    {
        RandomStream rng(12);
        bool ok = true;
        for (int t = 0; t < 200; ++t) {
            const auto x = random_admissible(rng);
            try {
                const auto a = kin::evolve_state(x, 0.02);
                const auto b = cartesian_step(x, 0.02);
                ok = ok && std::abs(a.d - b.d) <= 1e-9 * std::max(1.0, std::abs(b.d));
                ok = ok && std::abs(a.phi - b.phi) <= 1e-9;
            } catch (const DegenerateGeometry&) {
            }
        }
        out.emplace_back("state evolution vs Cartesian geometry", ok);
    }
    {
        RandomStream rng(13);
        bool ok = true;
        const double h = 1e-6;
        for (int t = 0; t < 20; ++t) {
            const auto x = random_admissible(rng);
            Mat3 j;
            try {
                j = kin::state_jacobian(x, 0.02);
            } catch (const DegenerateGeometry&) {
                continue;
            }
            for (int c = 0; c < 3; ++c) {
                auto xp = x, xm = x;
                double* fp[3] = {&xp.phi, &xp.d, &xp.vdot};
                double* fm[3] = {&xm.phi, &xm.d, &xm.vdot};
                *fp[c] += h;
                *fm[c] -= h;
                const auto yp = kin::evolve_state(xp, 0.02);
                const auto ym = kin::evolve_state(xm, 0.02);
                const Vec3 fd((yp.phi - ym.phi) / (2 * h), (yp.d - ym.d) / (2 * h),
                              (yp.vdot - ym.vdot) / (2 * h));
                ok = ok && (fd - j.col(c)).cwiseAbs().maxCoeff() < 1e-4;
            }
        }
        out.emplace_back("state Jacobian finite differences", ok);
    }
    {
        sim::Scenario sc;
        sc.radio.n_t = sc.radio.n_r = 8;
        const auto inst = sim::snapshot_instance(sc, 4, 99);
        auto xi = opt::assign_distance(inst.states);
        auto F = radio::BeamformingSet::matched(inst.states, inst.cfg);
        const MatX gamma = opt::update_gamma(inst, F, xi);
        const MatX y = opt::update_y(inst, F, xi, gamma);
        const double fq = opt::eval_fq(inst, F, xi, gamma, y);
        double nats = 0.0;
        for (int i = 0; i < radio::kNumRsu; ++i)
            for (int k = 0; k < 4; ++k)
                nats += std::log1p(radio::sinr(k, i, inst.states, F, xi, inst.cfg));
        out.emplace_back("quadratic-transform tightness", std::abs(fq - nats) < 1e-8);
    }
    {
        sim::Scenario sc;
        sc.horizon = 30;
        sc.arrival_rate = 2.0;
        sc.radio.n_t = sc.radio.n_r = 8;
        sc.solver = "distance";
        auto a = sim::run(sc);
        auto b = sim::run(sc);
        bool ok = a.size() == b.size();
        for (std::size_t s = 0; ok && s < a.size(); ++s)
            ok = a[s].sum_rate_bits == b[s].sum_rate_bits &&
                 a[s].active == b[s].active;
        out.emplace_back("seeded determinism", ok);
    }
    return out;
}

}  // namespace isac
