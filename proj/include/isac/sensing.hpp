#pragma once
#include <cmath>

#include "isac/radio.hpp"

namespace isac::sense {

using kin::VehicleState;
using radio::RadioConfig;

/// Threshold on |a^H f| below which measurement variances diverge (the
/// served-vehicle regime assumes eta near 1).
constexpr double kBeamNullEta = 1e-6;

/// Post-matched-filter measurement y = [r~, nu~, mu~]: echo snapshot
/// (length n_r), delay estimate (s), Doppler estimate (Hz).
struct Measurement {
    CVec r;
    double nu = 0.0;
    double mu = 0.0;
};

struct MeasurementNoise {
    double sigma_r2 = 0.0;
    double sigma_nu2 = 0.0;
    double sigma_mu2 = 0.0;

    /// Complex-form covariance diagonal, diag(sigma_r^2 1_{n_r}, sigma_nu^2,
    /// sigma_mu^2); for reporting and the residual-gain PSD check.
    VecX q_complex(int n_r) const {
        VecX q(n_r + 2);
        q.head(n_r).setConstant(sigma_r2);
        q(n_r) = sigma_nu2;
        q(n_r + 1) = sigma_mu2;
        return q;
    }

    /// Real-composite covariance diagonal over [Re r; Im r; nu; mu]; circular
    /// complex noise splits sigma_r^2 evenly across the two components.
    VecX q_composite(int n_r) const {
        VecX q(2 * n_r + 2);
        q.head(2 * n_r).setConstant(sigma_r2 / 2.0);
        q(2 * n_r) = sigma_nu2;
        q(2 * n_r + 1) = sigma_mu2;
        return q;
    }
};

/// Measurement-noise variances for a served vehicle: sigma_r^2 from the
/// matched-filter gain alone, sigma_nu^2 and sigma_mu^2 inversely
/// proportional to the echo SNR kappa^2 |beta|^2 |eta|^2.
inline MeasurementNoise noise_variances(const VehicleState& x, const CVec& f,
                                        const RadioConfig& cfg) {
    const CVec a = radio::steer_tx(x.phi, cfg.n_t);
    const double eta = std::abs(Cplx(a.dot(f)));
    if (eta < kBeamNullEta)
        throw BeamNull("noise_variances: |a^H f| below threshold");
    const double beta2 = std::norm(radio::reflection_coeff(x.d, cfg.varrho));
    const double kappa2 = double(cfg.n_t) * double(cfg.n_r);
    const double denom = cfg.G_mf * kappa2 * beta2 * eta * eta;
    MeasurementNoise out;
    out.sigma_r2 = cfg.rho_r * cfg.rho_r * cfg.sigma_e2 / cfg.G_mf;
    out.sigma_nu2 = cfg.rho_nu * cfg.rho_nu * cfg.sigma_e2 / denom;
    out.sigma_mu2 = cfg.rho_mu * cfg.rho_mu * cfg.sigma_e2 / denom;
    return out;
}

/// Noiseless measurement map h(x): r~ = kappa beta G b a^H f, nu~ = 2d/c,
/// mu~ = 2 vdot f_c / c. Used for the EKF residual e = y - h(x_pred).
inline Measurement expected_measurement(const VehicleState& x, const CVec& f,
                                        const RadioConfig& cfg) {
    const CVec a = radio::steer_tx(x.phi, cfg.n_t);
    const CVec b = radio::steer_rx(x.phi, cfg.n_r);
    const Cplx eta = a.dot(f);
    if (std::abs(eta) < kBeamNullEta)
        throw BeamNull("expected_measurement: |a^H f| below threshold");
    const Cplx beta = radio::reflection_coeff(x.d, cfg.varrho);
    Measurement m;
    m.r = (cfg.kappa() * cfg.G_mf) * beta * eta * b;
    m.nu = 2.0 * x.d / cfg.c;
    m.mu = 2.0 * x.vdot * cfg.f_c / cfg.c;
    return m;
}

/// Draws y = h(x_true) + noise. noise_scale scales the standard deviations
/// (0 gives the deterministic limit).
inline Measurement synthesize_measurement(const VehicleState& x_true, const CVec& f,
                                          const RadioConfig& cfg, RandomStream& rng,
                                          double noise_scale = 1.0) {
    Measurement m = expected_measurement(x_true, f, cfg);
    const MeasurementNoise q = noise_variances(x_true, f, cfg);
    const double s2 = noise_scale * noise_scale;
    for (int p = 0; p < m.r.size(); ++p)
        m.r(p) += rng.circular_gaussian(q.sigma_r2 * s2);
    m.nu += noise_scale * std::sqrt(q.sigma_nu2) * rng.gaussian();
    m.mu += noise_scale * std::sqrt(q.sigma_mu2) * rng.gaussian();
    return m;
}

/// (n_r+2) x 3 Jacobian of h at x. Echo rows: d r~/d phi = kappa beta G Pi f;
/// the d-dependence through beta is zeroed in the baseline model and included
/// only when cfg.exact_jacobian is set. Delay row [0, 2/c, 0], Doppler row
/// [0, 0, 2 f_c / c].
inline CMat measurement_jacobian(const VehicleState& x, const CVec& f,
                                 const RadioConfig& cfg) {
    const CVec a = radio::steer_tx(x.phi, cfg.n_t);
    const Cplx eta = a.dot(f);
    if (std::abs(eta) < kBeamNullEta)
        throw BeamNull("measurement_jacobian: |a^H f| below threshold");
    const Cplx beta = radio::reflection_coeff(x.d, cfg.varrho);
    const CMat pi = radio::steering_derivative(x.phi, cfg.n_r, cfg.n_t);

    CMat j = CMat::Zero(cfg.n_r + 2, 3);
    j.col(0).head(cfg.n_r) = (cfg.kappa() * cfg.G_mf) * beta * (pi * f);
    if (cfg.exact_jacobian) {
        // beta = varrho/(2d)  =>  d beta/d d = -beta/d
        const CVec b = radio::steer_rx(x.phi, cfg.n_r);
        j.col(1).head(cfg.n_r) = (cfg.kappa() * cfg.G_mf) * (-beta / x.d) * eta * b;
    }
    j(cfg.n_r, 1) = 2.0 / cfg.c;
    j(cfg.n_r + 1, 2) = 2.0 * cfg.f_c / cfg.c;
    return j;
}

}  // namespace isac::sense
