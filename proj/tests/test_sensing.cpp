#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "isac/sensing.hpp"
#include "test_util.hpp"

using namespace isac;
using namespace isac::sense;

namespace {

RadioConfig small_cfg() {
    RadioConfig cfg;
    cfg.n_t = 8;
    cfg.n_r = 8;
    return cfg;
}

}  // namespace

TEST_CASE("noise variance examples from the shipped constants") {
    RadioConfig cfg = small_cfg();  // rho_r = 1, sigma_e2 = 1e-7, G = 10
    const VehicleState x{0.4, 30.0, 11.0};
    const CVec f = radio::steer_tx(x.phi, cfg.n_t);
    const auto q = noise_variances(x, f, cfg);
    CHECK(q.sigma_r2 == doctest::Approx(1e-8).epsilon(1e-12));

    // Doubling the range halves |beta| and quadruples the delay variance.
    VehicleState x2 = x;
    x2.d = 60.0;
    const CVec f2 = radio::steer_tx(x2.phi, cfg.n_t);
    const auto q2 = noise_variances(x2, f2, cfg);
    CHECK(q2.sigma_nu2 == doctest::Approx(4.0 * q.sigma_nu2).epsilon(1e-12));
    CHECK(q2.sigma_mu2 == doctest::Approx(4.0 * q.sigma_mu2).epsilon(1e-12));
}

TEST_CASE("matched beam minimizes the delay variance over unit beams") {
    RadioConfig cfg = small_cfg();
    const VehicleState x{0.4, 30.0, 11.0};
    const double matched = noise_variances(x, radio::steer_tx(x.phi, cfg.n_t), cfg)
                               .sigma_nu2;
    RandomStream rng(9);
    for (int t = 0; t < 100; ++t) {
        const CVec f = testutil::random_unit_beam(cfg.n_t, rng);
        try {
            CHECK(noise_variances(x, f, cfg).sigma_nu2 >= matched - 1e-30);
        } catch (const BeamNull&) {
            // even more variance than any finite value
        }
    }
}

TEST_CASE("noise variances reject a null beam") {
    RadioConfig cfg = small_cfg();
    cfg.n_t = 2;
    const VehicleState x{0.0, 30.0, 11.0};
    CVec f(2);
    f << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);  // orthogonal to a(0)
    CHECK_THROWS_AS(noise_variances(x, f, cfg), BeamNull);
}

TEST_CASE("measurement means follow delay and Doppler physics") {
    RadioConfig cfg = small_cfg();  // c = 3e8, f_c = 30 GHz
    const VehicleState x{0.5, 150.0, 30.0};
    const CVec f = radio::steer_tx(x.phi, cfg.n_t);
    const auto m = expected_measurement(x, f, cfg);
    CHECK(m.nu == doctest::Approx(1e-6).epsilon(1e-12));
    CHECK(m.mu == doctest::Approx(6000.0).epsilon(1e-12));
}

TEST_CASE("zero-noise synthesis is the deterministic map") {
    RadioConfig cfg = small_cfg();
    const VehicleState x{0.3, 42.0, 17.0};
    const CVec f = radio::steer_tx(x.phi, cfg.n_t);
    RandomStream rng(3);
    const auto drawn = synthesize_measurement(x, f, cfg, rng, 0.0);
    const auto wanted = expected_measurement(x, f, cfg);
    CHECK((drawn.r - wanted.r).norm() == 0.0);
    CHECK(drawn.nu == wanted.nu);
    CHECK(drawn.mu == wanted.mu);

    // And the noiseless echo equals kappa beta G b a^H f termwise.
    const Cplx beta = radio::reflection_coeff(x.d, cfg.varrho);
    const CVec b = radio::steer_rx(x.phi, cfg.n_r);
    const Cplx eta = radio::steer_tx(x.phi, cfg.n_t).dot(f);
    const CVec direct = cfg.kappa() * cfg.G_mf * beta * eta * b;
    CHECK((wanted.r - direct).norm() < 1e-15);
}

TEST_CASE("beam phase rotates the echo and leaves delay/Doppler fixed") {
    RadioConfig cfg = small_cfg();
    const VehicleState x{0.3, 42.0, 17.0};
    const CVec f = radio::steer_tx(x.phi, cfg.n_t);
    const Cplx rot = std::polar(1.0, 0.77);
    const auto base = expected_measurement(x, f, cfg);
    const auto rotated = expected_measurement(x, CVec(rot * f), cfg);
    CHECK((rotated.r - rot * base.r).norm() < 1e-12);
    CHECK(rotated.nu == base.nu);
    CHECK(rotated.mu == base.mu);
}

TEST_CASE("measurement jacobian structural rows") {
    RadioConfig cfg = small_cfg();
    const VehicleState x{0.3, 42.0, 17.0};
    const CVec f = radio::steer_tx(x.phi, cfg.n_t);
    const CMat j = measurement_jacobian(x, f, cfg);
    CHECK(j.rows() == cfg.n_r + 2);
    CHECK(std::abs(j(cfg.n_r, 1) - 2.0 / 3e8) < 1e-24);
    CHECK(std::abs(j(cfg.n_r, 1) - 6.667e-9) < 1e-12);
    CHECK(std::abs(j(cfg.n_r + 1, 2) - 200.0) < 1e-12);
    CHECK(std::abs(j(cfg.n_r, 0)) == 0.0);
    CHECK(std::abs(j(cfg.n_r, 2)) == 0.0);
    // Baseline model zeroes the echo d-derivative.
    CHECK(j.col(1).head(cfg.n_r).norm() == 0.0);
    CHECK(j.col(2).head(cfg.n_r).norm() == 0.0);
}

TEST_CASE("exact-mode measurement jacobian matches finite differences") {
    RadioConfig cfg = small_cfg();
    cfg.exact_jacobian = true;
    RandomStream rng(21);
    for (int t = 0; t < 25; ++t) {
        const auto x = testutil::random_admissible_state(rng);
        const CVec f = testutil::random_unit_beam(cfg.n_t, rng);
        CMat j;
        try {
            j = measurement_jacobian(x, f, cfg);
        } catch (const BeamNull&) {
            continue;
        }
        CMat fd(cfg.n_r + 2, 3);
        const double h = 1e-6;
        for (int c = 0; c < 3; ++c) {
            VehicleState xp = x, xm = x;
            double* fp[3] = {&xp.phi, &xp.d, &xp.vdot};
            double* fm[3] = {&xm.phi, &xm.d, &xm.vdot};
            *fp[c] += h;
            *fm[c] -= h;
            const auto mp = expected_measurement(xp, f, cfg);
            const auto mm = expected_measurement(xm, f, cfg);
            fd.col(c).head(cfg.n_r) = (mp.r - mm.r) / (2 * h);
            fd(cfg.n_r, c) = (mp.nu - mm.nu) / (2 * h);
            fd(cfg.n_r + 1, c) = (mp.mu - mm.mu) / (2 * h);
        }
        CHECK(testutil::matrix_rel_err(fd, j) < 1e-4);
    }
}

TEST_CASE("measurements are unbiased with calibrated variances") {
    RadioConfig cfg;
    cfg.n_t = 4;
    cfg.n_r = 4;
    const VehicleState x{0.45, 38.0, 14.0};
    const CVec f = radio::steer_tx(x.phi, cfg.n_t);
    const auto q = noise_variances(x, f, cfg);
    const auto mean_true = expected_measurement(x, f, cfg);

    const int n = 100000;
    RandomStream rng(1234);
    double sum_nu = 0.0, sum_mu = 0.0, ss_nu = 0.0, ss_mu = 0.0;
    double ss_r0 = 0.0;
    for (int t = 0; t < n; ++t) {
        const auto m = synthesize_measurement(x, f, cfg, rng);
        sum_nu += m.nu - mean_true.nu;
        sum_mu += m.mu - mean_true.mu;
        ss_nu += (m.nu - mean_true.nu) * (m.nu - mean_true.nu);
        ss_mu += (m.mu - mean_true.mu) * (m.mu - mean_true.mu);
        ss_r0 += std::norm(m.r(0) - mean_true.r(0));
    }
    const double se_nu = std::sqrt(q.sigma_nu2 / n);
    const double se_mu = std::sqrt(q.sigma_mu2 / n);
    CHECK(std::abs(sum_nu / n) < 4.0 * se_nu);
    CHECK(std::abs(sum_mu / n) < 4.0 * se_mu);
    CHECK(ss_nu / n == doctest::Approx(q.sigma_nu2).epsilon(0.05));
    CHECK(ss_mu / n == doctest::Approx(q.sigma_mu2).epsilon(0.05));
    CHECK(ss_r0 / n == doctest::Approx(q.sigma_r2).epsilon(0.05));
}

TEST_CASE("assembled noise covariance is diagonal positive definite") {
    RadioConfig cfg = small_cfg();
    const VehicleState x{0.4, 30.0, 11.0};
    const auto q = noise_variances(x, radio::steer_tx(x.phi, cfg.n_t), cfg);
    const VecX qc = q.q_complex(cfg.n_r);
    const VecX qz = q.q_composite(cfg.n_r);
    CHECK(qc.size() == cfg.n_r + 2);
    CHECK(qz.size() == 2 * cfg.n_r + 2);
    CHECK(qc.minCoeff() > 0.0);
    CHECK(qz.minCoeff() > 0.0);
    CHECK(qz.head(2 * cfg.n_r).sum() == doctest::Approx(qc.head(cfg.n_r).sum()));
}
