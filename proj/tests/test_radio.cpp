#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "isac/radio.hpp"
#include "test_util.hpp"

using namespace isac;
using namespace isac::radio;

namespace {

PolarStates two_rsu_states(const std::vector<kin::VehicleState>& per_vehicle) {
    PolarStates st;
    st.s[0] = per_vehicle;
    st.s[1] = per_vehicle;  // mirrored copies are fine for single-RSU checks
    return st;
}

}  // namespace

TEST_CASE("steering vector examples") {
    const CVec a0 = steer_tx(0.0, 4);
    for (int p = 0; p < 4; ++p) CHECK(std::abs(a0(p) - Cplx(0.5, 0.0)) < 1e-15);

    const CVec a1 = steer_tx(1.0, 4);
    for (int p = 0; p < 4; ++p) {
        const double want = p % 2 == 0 ? 0.5 : -0.5;
        CHECK(std::abs(a1(p) - Cplx(want, 0.0)) < 1e-12);
    }

    const CVec b = steer_rx(0.0, 2);
    CHECK(std::abs(b(0) - Cplx(1.0 / std::sqrt(2.0), 0.0)) < 1e-12);
    CHECK(std::abs(b(1) - Cplx(1.0 / std::sqrt(2.0), 0.0)) < 1e-12);
}

TEST_CASE("steering vectors are unit norm and tx == rx") {
    RandomStream rng(5);
    for (int t = 0; t < 100; ++t) {
        const double phi = 2.0 * rng.uniform() - 1.0;
        const CVec a = steer_tx(phi, 16);
        CHECK(std::abs(a.norm() - 1.0) < 1e-12);
        CHECK((steer_rx(phi, 16) - a).norm() < 1e-15);
    }
}

TEST_CASE("steering inner product equals the Dirichlet kernel value") {
    const CVec a = steer_tx(0.3, 64);
    const CVec b = steer_tx(0.9, 64);
    const double got = std::abs(Cplx(a.dot(b)));
    // Direct geometric-series evaluation.
    const double delta = 0.3 - 0.9;
    const double want =
        std::abs(std::sin(64.0 * M_PI * delta / 2.0) /
                 (64.0 * std::sin(M_PI * delta / 2.0)));
    CHECK(got == doctest::Approx(want).epsilon(1e-10));
    CHECK(got < 0.05);
}

TEST_CASE("asymptotic orthogonality improves with antenna count") {
    RandomStream rng(17);
    double prev = 1.0;
    for (int n : {8, 16, 32, 64}) {
        double acc = 0.0;
        for (int t = 0; t < 100; ++t) {
            double p1 = 2.0 * rng.uniform() - 1.0;
            double p2 = 2.0 * rng.uniform() - 1.0;
            if (std::abs(p1 - p2) < 0.1) p2 = p1 + (p2 >= p1 ? 0.1 : -0.1);
            acc += std::abs(Cplx(steer_tx(p1, n).dot(steer_tx(p2, n))));
        }
        const double mean = acc / 100.0;
        CHECK(mean < prev);
        prev = mean;
    }
}

TEST_CASE("path loss follows the inverse square law") {
    CHECK(path_loss(1.0, 1e-7) == doctest::Approx(1e-7).epsilon(1e-15));
    CHECK(path_loss(10.0, 1e-7) == doctest::Approx(1e-9).epsilon(1e-15));
    CHECK(path_loss(std::sqrt(2.0), 1e-7) == doctest::Approx(5e-8).epsilon(1e-12));
    CHECK_THROWS_AS(path_loss(0.0, 1e-7), DegenerateGeometry);
}

TEST_CASE("reflection coefficient") {
    const Cplx varrho(10.0, 10.0);
    CHECK(std::abs(reflection_coeff(5.0, varrho) - Cplx(1.0, 1.0)) < 1e-15);
    CHECK(std::abs(reflection_coeff(0.5, varrho) - varrho) < 1e-15);
    CHECK(std::abs(reflection_coeff(20.0, varrho)) ==
          doctest::Approx(std::abs(reflection_coeff(10.0, varrho)) / 2.0)
              .epsilon(1e-12));
    CHECK_THROWS_AS(reflection_coeff(0.0, varrho), DegenerateGeometry);
}

TEST_CASE("sinr matched single vehicle equals the closed form") {
    RadioConfig cfg;
    cfg.n_t = 16;
    cfg.n_r = 16;
    cfg.alpha_ref = 1e-7;
    cfg.sigma_c2 = 1e-7;
    PolarStates st = two_rsu_states({{0.4, 1.0, 10.0}});
    Assignment xi(1);
    xi.rsu_of[0] = 0;
    BeamformingSet F = BeamformingSet::matched(st, cfg);
    CHECK(sinr(0, 0, st, F, xi, cfg) == doctest::Approx(16.0).epsilon(1e-12));
    CHECK(sinr(0, 1, st, F, xi, cfg) == 0.0);  // unserved side
}

TEST_CASE("sinr two-vehicle case matches a scalar hand evaluation") {
    RadioConfig cfg;
    cfg.n_t = 8;
    cfg.n_r = 8;
    PolarStates st = two_rsu_states({{0.3, 40.0, 12.0}, {0.35, 55.0, -9.0}});
    Assignment xi(2);
    xi.rsu_of[0] = 0;
    xi.rsu_of[1] = 0;
    RandomStream rng(33);
    BeamformingSet F;
    F.f[0] = CMat(8, 2);
    F.f[1] = CMat(8, 2);
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) F.f[i].col(k) = testutil::random_unit_beam(8, rng);

    // Explicit evaluation of the SINR expression with its own inner products.
    auto hand = [&](int k) {
        const auto& x = st.at(0, k);
        const CVec a = steer_tx(x.phi, 8);
        const double alpha = cfg.alpha_ref / (x.d * x.d);
        Cplx own = 0.0, cross = 0.0;
        for (int p = 0; p < 8; ++p) {
            own += std::conj(a(p)) * F.f[0](p, k);
            cross += std::conj(a(p)) * F.f[0](p, 1 - k);
        }
        const double num = 8.0 * alpha * std::norm(own);
        const double den = 8.0 * alpha * std::norm(cross) + cfg.sigma_c2;
        return num / den;
    };
    CHECK(sinr(0, 0, st, F, xi, cfg) == doctest::Approx(hand(0)).epsilon(1e-12));
    CHECK(sinr(1, 0, st, F, xi, cfg) == doctest::Approx(hand(1)).epsilon(1e-12));
}

TEST_CASE("sinr rejects mismatched beam columns") {
    RadioConfig cfg;
    cfg.n_t = 8;
    PolarStates st = two_rsu_states({{0.3, 40.0, 12.0}, {0.35, 55.0, -9.0}});
    Assignment xi(2);
    xi.rsu_of[0] = 0;
    xi.rsu_of[1] = 1;
    BeamformingSet F;
    F.f[0] = CMat::Zero(8, 1);
    F.f[1] = CMat::Zero(8, 1);
    CHECK_THROWS_AS(sinr(0, 0, st, F, xi, cfg), DimensionMismatch);
}

TEST_CASE("sinr is invariant under a global beam phase rotation") {
    RadioConfig cfg;
    cfg.n_t = 16;
    PolarStates st = two_rsu_states({{0.2, 35.0, 8.0}, {0.25, 45.0, -7.0}});
    Assignment xi(2);
    xi.rsu_of[0] = 0;
    xi.rsu_of[1] = 0;
    RandomStream rng(4);
    BeamformingSet F = BeamformingSet::matched(st, cfg);
    F.f[0].col(1) = testutil::random_unit_beam(16, rng);
    const double before = sinr(0, 0, st, F, xi, cfg);
    F.f[0].col(1) *= std::polar(1.0, 1.234);
    CHECK(sinr(0, 0, st, F, xi, cfg) == doctest::Approx(before).epsilon(1e-12));
    F.f[0].col(0) *= std::polar(1.0, -2.1);
    CHECK(sinr(0, 0, st, F, xi, cfg) == doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("sum rate composes per-vehicle rates and handles edge cases") {
    RadioConfig cfg;
    cfg.n_t = 16;
    cfg.alpha_ref = 1e-7;
    // Engineered SINR of exactly 15: matched beam, d = 1, noise = 16e-7 / 15.
    cfg.sigma_c2 = 16.0e-7 / 15.0;
    PolarStates st1 = two_rsu_states({{0.5, 1.0, 5.0}});
    Assignment xi1(1);
    xi1.rsu_of[0] = 0;
    BeamformingSet F1 = BeamformingSet::matched(st1, cfg);
    CHECK(sum_rate(st1, F1, xi1, cfg) == doctest::Approx(4.0).epsilon(1e-12));

    Assignment unassigned(1);  // all xi = 0
    CHECK(sum_rate(st1, F1, unassigned, cfg) == 0.0);

    RadioConfig cfg3;
    cfg3.n_t = 8;
    PolarStates st3 = two_rsu_states(
        {{0.3, 40.0, 12.0}, {0.35, 55.0, -9.0}, {-0.2, 33.0, 6.0}});
    Assignment xi3(3);
    xi3.rsu_of = {0, 1, 0};
    BeamformingSet F3 = BeamformingSet::matched(st3, cfg3);
    double acc = 0.0;
    for (int i = 0; i < kNumRsu; ++i)
        for (int k = 0; k < 3; ++k)
            acc += std::log2(1.0 + sinr(k, i, st3, F3, xi3, cfg3));
    CHECK(sum_rate(st3, F3, xi3, cfg3) == doctest::Approx(acc).epsilon(1e-14));
}

TEST_CASE("sum rate is non-increasing in the communication noise") {
    RadioConfig cfg;
    cfg.n_t = 16;
    PolarStates st = two_rsu_states({{0.2, 35.0, 8.0}, {0.25, 45.0, -7.0}});
    Assignment xi(2);
    xi.rsu_of = {0, 1};
    BeamformingSet F = BeamformingSet::matched(st, cfg);
    double prev = std::numeric_limits<double>::infinity();
    for (double s : {1e-9, 1e-8, 1e-7, 1e-6, 1e-5}) {
        RadioConfig c2 = cfg;
        c2.sigma_c2 = s;
        const double r = sum_rate(st, F, xi, c2);
        CHECK(r <= prev + 1e-12);
        prev = r;
    }
}
