#pragma once
#include <algorithm>
#include <cmath>

#include "isac/errors.hpp"
#include "isac/types.hpp"

namespace isac::kin {

/// Polar kinematic state of one vehicle relative to one RSU.
///   phi  — cosine of the angle between the vehicle's heading and the
///          vehicle->RSU line (so vdot = speed * phi)
///   d    — range to the RSU, m
///   vdot — radial velocity toward the RSU, m/s (signed; >0 approaching)
template <typename Scalar = double>
struct VehicleStateT {
    Scalar phi{};
    Scalar d{};
    Scalar vdot{};
};
using VehicleState = VehicleStateT<double>;

/// Ground-truth representation: position on the road plane, scalar speed
/// along the (unit) heading.
struct CartesianPose {
    Vec2 position{0.0, 0.0};
    double speed = 0.0;
    Vec2 heading{1.0, 0.0};
};

/// Covariance of the per-slot state-prediction noise, E = diag(...).
struct ProcessNoise {
    double sigma_phi2 = 4e-6;   // (2e-3)^2
    double sigma_d2 = 2.5e-3;   // (0.05 m)^2
    double sigma_vdot2 = 0.25;  // (0.5 m/s)^2

    Mat3 covariance() const {
        return Vec3(sigma_phi2, sigma_d2, sigma_vdot2).asDiagonal();
    }
};

/// One slot of the polar state-evolution map. Exact for a vehicle moving at
/// constant speed along a straight road: the range update is the law of
/// cosines over the displacement vdot*T/phi, and vdot_n/phi_n = vdot/phi is
/// preserved. Deterministic; noise injection lives in the harness.
template <typename Scalar>
VehicleStateT<Scalar> evolve_state(const VehicleStateT<Scalar>& x, Scalar T) {
    if (x.phi == Scalar(0) || x.vdot == Scalar(0))
        throw DegenerateGeometry("evolve_state: phi or vdot is zero");
    const Scalar ell = x.vdot * T / x.phi;  // along-road displacement
    const Scalar rad = x.d * x.d + ell * ell - Scalar(2) * x.d * x.vdot * T;
    if (!(rad > Scalar(0)))
        throw DegenerateGeometry("evolve_state: non-positive range radicand");
    const Scalar dn = std::sqrt(rad);
    Scalar phin = (x.d * x.phi - ell) / dn;
    phin = std::clamp(phin, Scalar(-1), Scalar(1));
    return {phin, dn, (x.vdot / x.phi) * phin};
}

/// Analytic 3x3 Jacobian of evolve_state at x.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> state_jacobian(const VehicleStateT<Scalar>& x, Scalar T) {
    if (x.phi == Scalar(0) || x.vdot == Scalar(0))
        throw DegenerateGeometry("state_jacobian: phi or vdot is zero");
    const Scalar ell = x.vdot * T / x.phi;
    const Scalar rad = x.d * x.d + ell * ell - Scalar(2) * x.d * x.vdot * T;
    if (!(rad > Scalar(0)))
        throw DegenerateGeometry("state_jacobian: non-positive range radicand");
    const Scalar dn = std::sqrt(rad);
    const Scalar phin = (x.d * x.phi - ell) / dn;
    const Scalar s = x.vdot / x.phi;

    const Scalar dell_dphi = -ell / x.phi;
    const Scalar dell_dv = T / x.phi;

    const Scalar ddn_dphi = ell * dell_dphi / dn;
    const Scalar ddn_dd = (x.d - x.vdot * T) / dn;
    const Scalar ddn_dv = (ell * dell_dv - x.d * T) / dn;

    const Scalar dphin_dphi = (x.d - dell_dphi) / dn - phin * ddn_dphi / dn;
    const Scalar dphin_dd = x.phi / dn - phin * ddn_dd / dn;
    const Scalar dphin_dv = -dell_dv / dn - phin * ddn_dv / dn;

    Eigen::Matrix<Scalar, 3, 3> j;
    j(0, 0) = dphin_dphi;
    j(0, 1) = dphin_dd;
    j(0, 2) = dphin_dv;
    j(1, 0) = ddn_dphi;
    j(1, 1) = ddn_dd;
    j(1, 2) = ddn_dv;
    j(2, 0) = -(x.vdot / (x.phi * x.phi)) * phin + s * dphin_dphi;
    j(2, 1) = s * dphin_dd;
    j(2, 2) = phin / x.phi + s * dphin_dv;
    return j;
}

/// Polar state of a pose relative to an RSU position.
inline VehicleState cartesian_to_state(const CartesianPose& pose, const Vec2& rsu) {
    const Vec2 diff = rsu - pose.position;
    const double d = diff.norm();
    if (!(d > 0.0))
        throw DegenerateGeometry("cartesian_to_state: zero range");
    const double phi = std::clamp(pose.heading.dot(diff) / d, -1.0, 1.0);
    return {phi, d, pose.speed * phi};
}

/// Constant-speed straight-line motion over one slot.
inline CartesianPose advance_pose(const CartesianPose& pose, double T) {
    CartesianPose out = pose;
    out.position += pose.heading * (pose.speed * T);
    return out;
}

}  // namespace isac::kin
