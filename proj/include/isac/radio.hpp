#pragma once
#include <array>
#include <cmath>
#include <vector>

#include "isac/errors.hpp"
#include "isac/kinematics.hpp"
#include "isac/types.hpp"

namespace isac::radio {

constexpr int kNumRsu = 2;

/// Physical-layer constants. Linear units throughout; dB only at config
/// parsing and report emission.
struct RadioConfig {
    int n_t = 32;
    int n_r = 32;
    double f_c = 30.0e9;       // carrier, Hz
    double c = 3.0e8;          // light speed, m/s
    double alpha_ref = 1e-7;   // channel power gain at d0 = 1 m
    Cplx varrho{10.0, 10.0};   // complex fading coefficient
    double sigma_c2 = 1e-7;    // communication noise variance
    double sigma_e2 = 1e-7;    // sensing noise variance
    double T_s = 0.01;         // ISAC signal duration, s (<= slot)
    double G_mf = 10.0;        // matched-filter gain
    double rho_r = 1.0;
    double rho_nu = 6.7e-7;
    double rho_mu = 2.0e4;
    bool exact_jacobian = false;  // include d(beta)/dd in the echo Jacobian

    double kappa() const { return std::sqrt(double(n_t) * double(n_r)); }
    double kappa_tx() const { return std::sqrt(double(n_t)); }
};

/// Binary vehicle->RSU indicators with at most one serving RSU per vehicle.
/// rsu_of[k] in {0,1}, or -1 while a solver has not yet placed vehicle k.
struct Assignment {
    std::vector<int> rsu_of;

    explicit Assignment(int K = 0) : rsu_of(K, -1) {}
    int K() const { return static_cast<int>(rsu_of.size()); }
    int xi(int i, int k) const { return rsu_of[k] == i ? 1 : 0; }
    bool complete() const {
        for (int r : rsu_of)
            if (r < 0) return false;
        return true;
    }
};

/// Per-RSU polar states, indexed [rsu][vehicle].
struct PolarStates {
    std::array<std::vector<kin::VehicleState>, kNumRsu> s;

    int K() const { return static_cast<int>(s[0].size()); }
    const kin::VehicleState& at(int i, int k) const { return s[i][k]; }
};

/// Unit-norm transmit steering vector of an N-element ULA toward angle
/// cosine phi: entry p = e^{-j pi p phi} / sqrt(N).
inline CVec steer(double phi, int n) {
    CVec a(n);
    const double norm = 1.0 / std::sqrt(double(n));
    for (int p = 0; p < n; ++p)
        a(p) = std::polar(norm, -M_PI * p * phi);
    return a;
}
inline CVec steer_tx(double phi, int n_t) { return steer(phi, n_t); }
inline CVec steer_rx(double phi, int n_r) { return steer(phi, n_r); }

/// d/dphi of steer(phi, n).
inline CVec steer_deriv(double phi, int n) {
    CVec da(n);
    const double norm = 1.0 / std::sqrt(double(n));
    for (int p = 0; p < n; ++p)
        da(p) = Cplx(0.0, -M_PI * p) * std::polar(norm, -M_PI * p * phi);
    return da;
}

/// Pi = d/dphi [ b(phi) a(phi)^H ], the steering outer-product derivative
/// (n_r x n_t). Consumed by the echo Jacobian and the sensing constraint.
inline CMat steering_derivative(double phi, int n_r, int n_t) {
    const CVec a = steer(phi, n_t);
    const CVec b = steer(phi, n_r);
    const CVec da = steer_deriv(phi, n_t);
    const CVec db = steer_deriv(phi, n_r);
    return db * a.adjoint() + b * da.adjoint();
}

inline double path_loss(double d, double alpha_ref) {
    if (!(d > 0.0)) throw DegenerateGeometry("path_loss: non-positive range");
    return alpha_ref / (d * d);
}

inline Cplx reflection_coeff(double d, Cplx varrho) {
    if (!(d > 0.0)) throw DegenerateGeometry("reflection_coeff: non-positive range");
    return varrho / (2.0 * d);
}

/// Per-RSU N_t x K beamformer columns under a unit-norm budget.
struct BeamformingSet {
    std::array<CMat, kNumRsu> f;

    int K() const { return static_cast<int>(f[0].cols()); }
    int n_t() const { return static_cast<int>(f[0].rows()); }

    /// Columns matched to the (predicted) steering directions, f = a(phi).
    static BeamformingSet matched(const PolarStates& st, const RadioConfig& cfg) {
        BeamformingSet out;
        const int K = st.K();
        for (int i = 0; i < kNumRsu; ++i) {
            out.f[i].resize(cfg.n_t, K);
            for (int k = 0; k < K; ++k)
                out.f[i].col(k) = steer_tx(st.at(i, k).phi, cfg.n_t);
        }
        return out;
    }
};

/// Downlink SINR of vehicle k from RSU i; interference comes from the same
/// RSU's other served beams, attenuated by vehicle k's own path loss.
inline double sinr(int k, int i, const PolarStates& st, const BeamformingSet& F,
                   const Assignment& xi, const RadioConfig& cfg) {
    const int K = st.K();
    if (F.f[i].cols() != K || xi.K() != K)
        throw DimensionMismatch("sinr: beam/assignment column count != K");
    if (!xi.xi(i, k)) return 0.0;
    const kin::VehicleState& x = st.at(i, k);
    const CVec a = steer_tx(x.phi, cfg.n_t);
    const double kp2 = double(cfg.n_t);  // kappa'^2
    const double alpha = path_loss(x.d, cfg.alpha_ref);
    const double num = kp2 * alpha * std::norm(Cplx(a.dot(F.f[i].col(k))));
    double den = cfg.sigma_c2;
    for (int m = 0; m < K; ++m) {
        if (m == k || !xi.xi(i, m)) continue;
        den += kp2 * alpha * std::norm(Cplx(a.dot(F.f[i].col(m))));
    }
    return num / den;
}

/// Problem objective in bits/s/Hz: sum over RSUs and vehicles of
/// log2(1 + SINR).
inline double sum_rate(const PolarStates& st, const BeamformingSet& F,
                       const Assignment& xi, const RadioConfig& cfg) {
    double total = 0.0;
    for (int i = 0; i < kNumRsu; ++i)
        for (int k = 0; k < st.K(); ++k)
            total += std::log2(1.0 + sinr(k, i, st, F, xi, cfg));
    return total;
}

}  // namespace isac::radio
