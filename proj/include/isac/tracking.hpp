#pragma once
#include "isac/sensing.hpp"

namespace isac::track {

using kin::ProcessNoise;
using kin::VehicleState;
using radio::RadioConfig;
using sense::Measurement;
using sense::MeasurementNoise;

using FisherInfo = Mat3;

enum class GainMode { Standard, Residual };

/// Per-(vehicle, RSU) filter state: predicted and measured states with their
/// MSE matrices. M_pred_pure keeps G M_meas G^T without process noise for
/// the literal PCRB recursion variant.
struct TrackState {
    VehicleState x_pred{};
    VehicleState x_meas{};
    Mat3 M_pred = Mat3::Zero();
    Mat3 M_meas = Mat3::Zero();
    Mat3 M_pred_pure = Mat3::Zero();
    int slot = 0;
    int corrections = 0;
};

struct CorrectResult {
    TrackState track;
    bool fallback_used = false;
};

/// Complex-folded Kalman gain, applied as x~ = x^ + Re{K e}.
struct Gain {
    CMat k;
    bool fallback_used = false;
};

TrackState make_initial_track(const VehicleState& fix, const Mat3& M0);

/// x^ = g(x~), M^ = G M~ G^T + E.
TrackState predict(const TrackState& t, double T, const ProcessNoise& noise);

/// Standard EKF gain M^ J^T (Q + J M^ J^T)^-1, computed on the real
/// composite measurement and returned complex-folded, 3 x (n_r + 2).
CMat standard_gain(const TrackState& t, const CMat& J, const MeasurementNoise& Q);

/// Echo-residual gain: substitutes the single-sample empirical prior
/// H_L^-1 (e e^H - Q) H_L^-H into the standard template; falls back to
/// standard_gain when that estimate is unusable.
Gain residual_gain(const TrackState& t, const CMat& J, const MeasurementNoise& Q,
                   const CVec& e);

/// x~ = x^ + Re{K e}; M~ by the Riccati update (standard mode) or
/// K Q H_L^-H (residual mode). Covariances symmetrized and floored.
CorrectResult correct(const TrackState& t, const Measurement& y, const CVec& f,
                      const RadioConfig& cfg, GainMode mode);

/// Posterior Fisher information J^T Q^-1 J + M^-1 on the composite
/// measurement; prior defaults to M_pred.
FisherInfo fisher_info(const TrackState& t, const CMat& J, const MeasurementNoise& Q);
FisherInfo fisher_info_with_prior(const Mat3& prior, const CMat& J,
                                  const MeasurementNoise& Q);

Mat3 pcrb(const FisherInfo& fisher);

/// Minimum required ||Pi f||^2 so that the phi-entry of the PCRB does not
/// exceed the previous slot's value; 0 for a never-corrected track. Noise
/// variances are evaluated at beamforming gain eta = 1.
double lambda_threshold(const TrackState& t, const VehicleState& x_pred,
                        const RadioConfig& cfg, bool no_process_noise = false);

namespace detail {

/// [Re r; Im r; nu; mu] lift of a complex measurement-space vector.
VecX lift_vector(const CVec& v);

/// Real composite (2 n_r + 2) x 3 Jacobian from the complex (n_r + 2) x 3 one.
MatX lift_jacobian(const CMat& J);

/// Complex fold of a composite gain: Re{K_c e} == K_z lift(e).
CMat fold_gain(const MatX& kz);
MatX unfold_gain(const CMat& kc);

/// H_L^-1 (e e^T - Q) H_L^-T on the composite quantities; min_eig reports
/// the smallest eigenvalue of (e e^T - Q) for the fallback rule.
Mat3 residual_empirical_prior(const CMat& J, const MeasurementNoise& Q,
                              const CVec& e, double* min_eig = nullptr);

Mat3 sanitize_cov(Mat3 m);

}  // namespace detail

}  // namespace isac::track
