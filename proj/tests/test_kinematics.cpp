#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "isac/kinematics.hpp"
#include "test_util.hpp"

using namespace isac;
using kin::VehicleState;
using testutil::cartesian_oracle_step;
using testutil::random_admissible_state;

TEST_CASE("evolve_state collinear head-on approach") {
    const VehicleState x{1.0, 100.0, 30.0};
    const auto y = kin::evolve_state(x, 0.02);
    CHECK(y.phi == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(y.d == doctest::Approx(99.4).epsilon(1e-12));
    CHECK(y.vdot == doctest::Approx(30.0).epsilon(1e-12));
}

TEST_CASE("evolve_state matches the Cartesian oracle") {
    const VehicleState x{0.6, 50.0, 18.0};
    const auto got = kin::evolve_state(x, 0.02);
    const auto want = cartesian_oracle_step(x, 0.02);
    CHECK(std::abs(got.phi - want.phi) < 1e-9);
    CHECK(std::abs(got.d - want.d) < 1e-9 * want.d);
    CHECK(std::abs(got.vdot - want.vdot) < 1e-9 * std::abs(want.vdot));
}

TEST_CASE("evolve_state rejects degenerate inputs") {
    CHECK_THROWS_AS(kin::evolve_state({0.6, 50.0, 0.0}, 0.02), DegenerateGeometry);
    CHECK_THROWS_AS(kin::evolve_state({0.0, 50.0, 18.0}, 0.02), DegenerateGeometry);
    // Vehicle stepping exactly onto the RSU foot point.
    CHECK_THROWS_AS(kin::evolve_state({1.0, 0.6, 30.0}, 0.02), DegenerateGeometry);
}

TEST_CASE("evolve_state oracle equivalence over random admissible states") {
    RandomStream rng(2024);
    for (int t = 0; t < 1000; ++t) {
        const auto x = random_admissible_state(rng);
        const auto got = kin::evolve_state(x, 0.02);
        const auto want = cartesian_oracle_step(x, 0.02);
        CHECK(std::abs(got.phi - want.phi) <= 1e-9 * std::max(1.0, std::abs(want.phi)));
        CHECK(std::abs(got.d - want.d) <= 1e-9 * std::max(1.0, want.d));
        CHECK(std::abs(got.vdot - want.vdot) <=
              1e-9 * std::max(1.0, std::abs(want.vdot)));
        // Constant along-road speed across the slot.
        CHECK(std::abs(got.vdot / got.phi - x.vdot / x.phi) <=
              1e-9 * std::abs(x.vdot / x.phi));
    }
}

TEST_CASE("evolve_state is deterministic") {
    const VehicleState x{-0.44, 71.0, -12.5};
    const auto a = kin::evolve_state(x, 0.02);
    const auto b = kin::evolve_state(x, 0.02);
    CHECK(a.phi == b.phi);
    CHECK(a.d == b.d);
    CHECK(a.vdot == b.vdot);
}

TEST_CASE("evolve_state works for other scalar types") {
    kin::VehicleStateT<long double> x{0.6L, 50.0L, 18.0L};
    const auto y = kin::evolve_state(x, 0.02L);
    CHECK(static_cast<double>(y.d) == doctest::Approx(49.6428).epsilon(1e-4));
}

TEST_CASE("state_jacobian matches central finite differences") {
    const VehicleState x{0.6, 50.0, 18.0};
    const Mat3 j = kin::state_jacobian(x, 0.02);
    for (int c = 0; c < 3; ++c) {
        const Vec3 fd = testutil::evolve_fd_column(x, 0.02, c, 1e-6);
        CHECK((fd - j.col(c)).cwiseAbs().maxCoeff() < 1e-5);
    }
}

TEST_CASE("state_jacobian finite differences over random states") {
    RandomStream rng(7);
    for (int t = 0; t < 1000; ++t) {
        const auto x = random_admissible_state(rng);
        const Mat3 j = kin::state_jacobian(x, 0.02);
        for (int c = 0; c < 3; ++c) {
            const Vec3 fd = testutil::evolve_fd_column(x, 0.02, c, 1e-6);
            CHECK((fd - j.col(c)).cwiseAbs().maxCoeff() < 1e-5);
        }
    }
}

TEST_CASE("state_jacobian collinear entries") {
    const Mat3 j = kin::state_jacobian({1.0, 100.0, 30.0}, 0.02);
    CHECK(j(1, 1) == doctest::Approx(1.0).epsilon(1e-12));   // dd/dd
    CHECK(j(1, 2) == doctest::Approx(-0.02).epsilon(1e-12)); // dd/dvdot = -T
}

TEST_CASE("state_jacobian reflection symmetry of the law of cosines") {
    // The range update is even in phi (phi -> -phi with vdot fixed mirrors the
    // geometry across the vehicle-RSU line), so the d-row is even/odd
    // accordingly. The simultaneous flip (phi, vdot) -> (-phi, -vdot) reverses
    // the motion and does not preserve the d-row.
    const VehicleState x{0.6, 50.0, 18.0};
    const VehicleState xm{-0.6, 50.0, 18.0};
    const Mat3 j = kin::state_jacobian(x, 0.02);
    const Mat3 jm = kin::state_jacobian(xm, 0.02);
    CHECK(jm(1, 1) == doctest::Approx(j(1, 1)).epsilon(1e-12));
    CHECK(jm(1, 2) == doctest::Approx(j(1, 2)).epsilon(1e-12));
    CHECK(jm(1, 0) == doctest::Approx(-j(1, 0)).epsilon(1e-12));
    // And the evolved range itself is invariant.
    CHECK(kin::evolve_state(xm, 0.02).d ==
          doctest::Approx(kin::evolve_state(x, 0.02).d).epsilon(1e-14));
}

TEST_CASE("state_jacobian propagates degeneracy") {
    CHECK_THROWS_AS(kin::state_jacobian({0.0, 50.0, 18.0}, 0.02), DegenerateGeometry);
    CHECK_THROWS_AS(kin::state_jacobian({0.6, 50.0, 0.0}, 0.02), DegenerateGeometry);
}

TEST_CASE("cartesian_to_state perpendicular and oblique geometry") {
    kin::CartesianPose pose;
    pose.position = Vec2(0.0, 0.0);
    pose.heading = Vec2(1.0, 0.0);
    pose.speed = 30.0;
    const auto perp = kin::cartesian_to_state(pose, Vec2(0.0, 30.0));
    CHECK(perp.d == doctest::Approx(30.0));
    CHECK(perp.phi == doctest::Approx(0.0));
    CHECK(perp.vdot == doctest::Approx(0.0));

    pose.position = Vec2(-30.0, 0.0);
    const auto oblique = kin::cartesian_to_state(pose, Vec2(0.0, 30.0));
    CHECK(oblique.d == doctest::Approx(std::sqrt(1800.0)).epsilon(1e-12));
    CHECK(oblique.phi == doctest::Approx(std::cos(M_PI / 4)).epsilon(1e-12));
    CHECK(oblique.vdot == doctest::Approx(30.0 * std::cos(M_PI / 4)).epsilon(1e-12));
}

TEST_CASE("cartesian_to_state rejects zero range") {
    kin::CartesianPose pose;
    pose.position = Vec2(3.0, 4.0);
    CHECK_THROWS_AS(kin::cartesian_to_state(pose, Vec2(3.0, 4.0)), DegenerateGeometry);
}

TEST_CASE("evolve_state round-trips against pure Cartesian propagation") {
    kin::CartesianPose pose;
    pose.position = Vec2(-20.0, 3.0);
    pose.heading = Vec2(1.0, 0.0);
    pose.speed = 28.0;
    const Vec2 rsu(0.0, 30.0);
    auto polar = kin::cartesian_to_state(pose, rsu);
    for (int s = 0; s < 10; ++s) {
        polar = kin::evolve_state(polar, 0.02);
        pose = kin::advance_pose(pose, 0.02);
    }
    const auto truth = kin::cartesian_to_state(pose, rsu);
    CHECK(std::abs(polar.d - truth.d) < 1e-8);
    CHECK(std::abs(polar.phi - truth.phi) < 1e-9);
}

TEST_CASE("process noise covariance is the stated diagonal") {
    const kin::ProcessNoise e{1.0, 2.0, 3.0};
    const Mat3 cov = e.covariance();
    CHECK(cov(0, 0) == 1.0);
    CHECK(cov(1, 1) == 2.0);
    CHECK(cov(2, 2) == 3.0);
    CHECK(cov(0, 1) == 0.0);
}
