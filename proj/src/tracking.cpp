#include "isac/tracking.hpp"

#include <Eigen/Eigenvalues>

namespace isac::track {

namespace detail {

VecX lift_vector(const CVec& v) {
    const int n = static_cast<int>(v.size()) - 2;
    VecX z(2 * n + 2);
    z.head(n) = v.head(n).real();
    z.segment(n, n) = v.head(n).imag();
    z(2 * n) = v(n).real();
    z(2 * n + 1) = v(n + 1).real();
    return z;
}

MatX lift_jacobian(const CMat& J) {
    const int n = static_cast<int>(J.rows()) - 2;
    MatX jz(2 * n + 2, 3);
    jz.topRows(n) = J.topRows(n).real();
    jz.middleRows(n, n) = J.topRows(n).imag();
    jz.bottomRows(2) = J.bottomRows(2).real();
    return jz;
}

CMat fold_gain(const MatX& kz) {
    const int n = (static_cast<int>(kz.cols()) - 2) / 2;
    CMat kc(3, n + 2);
    kc.leftCols(n) = kz.leftCols(n) - Cplx(0, 1) * kz.middleCols(n, n);
    kc.rightCols(2) = kz.rightCols(2).cast<Cplx>();
    return kc;
}

MatX unfold_gain(const CMat& kc) {
    const int n = static_cast<int>(kc.cols()) - 2;
    MatX kz(3, 2 * n + 2);
    kz.leftCols(n) = kc.leftCols(n).real();
    kz.middleCols(n, n) = -kc.leftCols(n).imag();
    kz.rightCols(2) = kc.rightCols(2).real();
    return kz;
}

Mat3 sanitize_cov(Mat3 m) {
    m = 0.5 * (m + m.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Mat3> es(m);
    if (es.eigenvalues().minCoeff() < 0.0) {
        // Clip slightly above zero so the reconstruction rounding cannot
        // reintroduce a negative eigenvalue.
        const double floor = 1e-14 * std::max(es.eigenvalues().maxCoeff(), 0.0);
        const Vec3 ev = es.eigenvalues().cwiseMax(floor);
        m = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
        m = 0.5 * (m + m.transpose()).eval();
    }
    for (int i = 0; i < 3; ++i) m(i, i) = std::max(m(i, i), 1e-12);
    return m;
}

Mat3 residual_empirical_prior(const CMat& J, const MeasurementNoise& Q,
                              const CVec& e, double* min_eig) {
    const int n = static_cast<int>(J.rows()) - 2;
    const MatX jz = lift_jacobian(J);
    const VecX ez = lift_vector(e);
    const VecX qz = Q.q_composite(n);

    MatX outer = ez * ez.transpose();
    outer.diagonal() -= qz;
    if (min_eig) {
        Eigen::SelfAdjointEigenSolver<MatX> es(outer, Eigen::EigenvaluesOnly);
        *min_eig = es.eigenvalues().minCoeff();
    }
    // Left inverse of the lifted Jacobian.
    const Mat3 gram = jz.transpose() * jz;
    Eigen::LDLT<Mat3> ldlt(gram);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw SingularInnovation("residual_gain: rank-deficient measurement Jacobian");
    const MatX hl_inv = ldlt.solve(jz.transpose());  // 3 x (2n+2)
    Mat3 m = hl_inv * outer * hl_inv.transpose();
    return 0.5 * (m + m.transpose());
}

namespace {

// K_z = prior J_z^T (Q_z + J_z prior J_z^T)^-1 via the noise-whitened
// innovation; the raw innovation matrix mixes units (s^2, Hz^2) and its
// condition number is meaningless.
MatX composite_gain(const Mat3& prior, const MatX& jz, const VecX& qz) {
    const VecX qinv_sqrt = qz.cwiseSqrt().cwiseInverse();
    const MatX w = qinv_sqrt.asDiagonal() * jz;  // whitened Jacobian
    MatX s_hat = w * prior * w.transpose();
    s_hat.diagonal().array() += 1.0;
    Eigen::SelfAdjointEigenSolver<MatX> es(s_hat);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    // The whitened innovation is I + (information); a large ratio means the
    // inversion itself loses precision, not merely a high-SNR update.
    if (!(lmin > 0.0) || !std::isfinite(lmax) || lmax / lmin > 1e15)
        throw SingularInnovation("gain: whitened innovation numerically singular");
    const MatX s_inv = es.eigenvectors() *
                       es.eigenvalues().cwiseInverse().asDiagonal() *
                       es.eigenvectors().transpose();
    return prior * w.transpose() * s_inv * qinv_sqrt.asDiagonal();
}

VehicleState apply_update(const VehicleState& x, const Vec3& dx) {
    VehicleState out = x;
    out.phi = std::clamp(x.phi + dx(0), -1.0, 1.0);
    out.d = std::max(x.d + dx(1), 1e-3);
    out.vdot = x.vdot + dx(2);
    return out;
}

}  // namespace

}  // namespace detail

TrackState make_initial_track(const VehicleState& fix, const Mat3& M0) {
    TrackState t;
    t.x_pred = fix;
    t.x_meas = fix;
    t.M_pred = detail::sanitize_cov(M0);
    t.M_meas = t.M_pred;
    t.M_pred_pure = t.M_pred;
    return t;
}

TrackState predict(const TrackState& t, double T, const ProcessNoise& noise) {
    TrackState out = t;
    out.x_pred = kin::evolve_state(t.x_meas, T);
    const Mat3 g = kin::state_jacobian(t.x_meas, T);
    out.M_pred_pure = detail::sanitize_cov(g * t.M_meas * g.transpose());
    out.M_pred = detail::sanitize_cov(out.M_pred_pure + noise.covariance());
    out.slot = t.slot + 1;
    return out;
}

CMat standard_gain(const TrackState& t, const CMat& J, const MeasurementNoise& Q) {
    const int n = static_cast<int>(J.rows()) - 2;
    const MatX kz = detail::composite_gain(t.M_pred, detail::lift_jacobian(J),
                                           Q.q_composite(n));
    return detail::fold_gain(kz);
}

Gain residual_gain(const TrackState& t, const CMat& J, const MeasurementNoise& Q,
                   const CVec& e) {
    const int n = static_cast<int>(J.rows()) - 2;
    const VecX qz = Q.q_composite(n);
    double min_eig = 0.0;
    Gain out;
    try {
        const Mat3 m_emp = detail::residual_empirical_prior(J, Q, e, &min_eig);
        if (min_eig < -1e-12 * qz.sum()) {
            out.fallback_used = true;
        } else {
            out.k = detail::fold_gain(
                detail::composite_gain(m_emp, detail::lift_jacobian(J), qz));
            return out;
        }
    } catch (const SingularInnovation&) {
        out.fallback_used = true;
    }
    out.k = standard_gain(t, J, Q);
    return out;
}

CorrectResult correct(const TrackState& t, const Measurement& y, const CVec& f,
                      const RadioConfig& cfg, GainMode mode) {
    const sense::Measurement h0 = sense::expected_measurement(t.x_pred, f, cfg);
    const MeasurementNoise q = sense::noise_variances(t.x_pred, f, cfg);
    const CMat j = sense::measurement_jacobian(t.x_pred, f, cfg);

    CVec e(cfg.n_r + 2);
    e.head(cfg.n_r) = y.r - h0.r;
    e(cfg.n_r) = y.nu - h0.nu;
    e(cfg.n_r + 1) = y.mu - h0.mu;

    const MatX jz = detail::lift_jacobian(j);
    const VecX ez = detail::lift_vector(e);
    const VecX qz = q.q_composite(cfg.n_r);

    CorrectResult res;
    res.track = t;
    MatX kz;
    bool residual_path = false;
    if (mode == GainMode::Residual) {
        const Gain g = residual_gain(t, j, q, e);
        res.fallback_used = g.fallback_used;
        kz = detail::unfold_gain(g.k);
        residual_path = !g.fallback_used;
    } else {
        kz = detail::composite_gain(t.M_pred, jz, qz);
    }

    res.track.x_meas = detail::apply_update(t.x_pred, kz * ez);
    if (residual_path) {
        // Eq.-form measurement MSE for the echo-residual gain.
        const Mat3 gram = jz.transpose() * jz;
        const MatX hl_inv = Eigen::LDLT<Mat3>(gram).solve(jz.transpose());
        res.track.M_meas =
            detail::sanitize_cov(kz * qz.asDiagonal() * hl_inv.transpose());
    } else {
        res.track.M_meas =
            detail::sanitize_cov((Mat3::Identity() - kz * jz) * t.M_pred);
    }
    res.track.corrections = t.corrections + 1;
    return res;
}

FisherInfo fisher_info_with_prior(const Mat3& prior, const CMat& J,
                                  const MeasurementNoise& Q) {
    Eigen::SelfAdjointEigenSolver<Mat3> es(prior);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    if (!(lmin > 0.0) || lmax / lmin > 1e12)
        throw SingularPrior("fisher_info: prior MSE matrix not invertible");
    const Mat3 prior_inv = es.eigenvectors() *
                           es.eigenvalues().cwiseInverse().asDiagonal() *
                           es.eigenvectors().transpose();
    const int n = static_cast<int>(J.rows()) - 2;
    const MatX jz = detail::lift_jacobian(J);
    const VecX qz = Q.q_composite(n);
    const Mat3 info = jz.transpose() * qz.cwiseInverse().asDiagonal() * jz;
    return 0.5 * ((info + prior_inv) + (info + prior_inv).transpose());
}

FisherInfo fisher_info(const TrackState& t, const CMat& J, const MeasurementNoise& Q) {
    return fisher_info_with_prior(t.M_pred, J, Q);
}

Mat3 pcrb(const FisherInfo& fisher) {
    Eigen::SelfAdjointEigenSolver<Mat3> es(fisher);
    return es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
           es.eigenvectors().transpose();
}

double lambda_threshold(const TrackState& t, const VehicleState& x_pred,
                        const RadioConfig& cfg, bool no_process_noise) {
    if (t.corrections == 0) return 0.0;
    const double m_prev = t.M_meas(0, 0);
    if (!(m_prev > 0.0) || !std::isfinite(m_prev)) return 0.0;

    const Mat3& prior = no_process_noise ? t.M_pred_pure : t.M_pred;
    Eigen::SelfAdjointEigenSolver<Mat3> es(prior);
    const double lmin = es.eigenvalues().minCoeff();
    if (!(lmin > 0.0) || es.eigenvalues().maxCoeff() / lmin > 1e12)
        throw SingularPrior("lambda_threshold: prior MSE matrix not invertible");

    const double kappa2 = double(cfg.n_t) * double(cfg.n_r);
    const double beta2 = std::norm(radio::reflection_coeff(x_pred.d, cfg.varrho));
    const double g2 = cfg.G_mf * cfg.G_mf;
    const double sigma_r2 = cfg.rho_r * cfg.rho_r * cfg.sigma_e2 / cfg.G_mf;
    // eta = 1 for a served vehicle (the constraint's standing assumption).
    const double denom = cfg.G_mf * kappa2 * beta2;
    const double sigma_nu2 = cfg.rho_nu * cfg.rho_nu * cfg.sigma_e2 / denom;
    const double sigma_mu2 = cfg.rho_mu * cfg.rho_mu * cfg.sigma_e2 / denom;

    Mat3 omega = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
                 es.eigenvectors().transpose();
    const double row_nu = 2.0 / cfg.c;
    const double row_mu = 2.0 * cfg.f_c / cfg.c;
    omega(1, 1) += row_nu * row_nu / sigma_nu2;
    omega(2, 2) += row_mu * row_mu / sigma_mu2;

    // Composite echo information per unit ||Pi f||^2.
    const double c_beam = 2.0 * kappa2 * beta2 * g2 / sigma_r2;

    const double c11 = omega(1, 1) * omega(2, 2) - omega(1, 2) * omega(2, 1);
    const double a12 = omega(1, 0) * omega(2, 2) - omega(1, 2) * omega(2, 0);
    const double a13 = omega(1, 0) * omega(2, 1) - omega(1, 1) * omega(2, 0);
    const double need =
        (c11 / m_prev + omega(0, 1) * a12 - omega(0, 2) * a13) / c11;
    return std::max(0.0, (need - omega(0, 0)) / c_beam);
}

}  // namespace isac::track
