#include "isac/optimizer.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "isac/beam_exchange.hpp"

namespace isac::opt {

namespace {

constexpr double kSwapImprovement = 1e-9;

/// Per-solve cache: steering vectors and path losses for every (rsu, vehicle)
/// pair, plus the sensing cone (Gram matrix and top singular pair of Pi) for
/// pairs with an active threshold.
struct Workspace {
    const Instance& inst;
    std::array<std::vector<CVec>, 2> a;
    std::array<std::vector<double>, 2> alpha;

    struct Cone {
        bool active = false;
        bool relaxed = false;
        double lambda_eff = 0.0;
        double sigma_max2 = 0.0;
        CMat pihpi;
        CVec v_top;
    };
    std::array<std::vector<Cone>, 2> cone;

    Workspace(const Instance& in, bool build_cones) : inst(in) {
        const int K = in.states.K();
        for (int i = 0; i < radio::kNumRsu; ++i) {
            a[i].resize(K);
            alpha[i].resize(K);
            cone[i].resize(K);
            for (int k = 0; k < K; ++k) {
                const auto& x = in.states.at(i, k);
                a[i][k] = radio::steer_tx(x.phi, in.cfg.n_t);
                alpha[i][k] = radio::path_loss(x.d, in.cfg.alpha_ref);
                const double lam = in.lambda_sensing(k, i);
                if (build_cones && lam > 0.0) {
                    Cone& c = cone[i][k];
                    c.active = true;
                    const CMat pi =
                        radio::steering_derivative(x.phi, in.cfg.n_r, in.cfg.n_t);
                    c.pihpi = pi.adjoint() * pi;
                    Eigen::SelfAdjointEigenSolver<CMat> es(c.pihpi);
                    const int last = static_cast<int>(es.eigenvalues().size()) - 1;
                    c.sigma_max2 = es.eigenvalues()(last);
                    c.v_top = es.eigenvectors().col(last);
                    if (lam > c.sigma_max2) {
                        c.relaxed = true;
                        c.lambda_eff = c.sigma_max2;
                    } else {
                        c.lambda_eff = lam;
                    }
                }
            }
        }
    }
};

/// Full received power at vehicle k from RSU i (own beam included) + noise.
double received_power(const Workspace& w, const BeamformingSet& F,
                      const Assignment& xi, int i, int k) {
    const double kp2 = double(w.inst.cfg.n_t);
    double p = w.inst.cfg.sigma_c2;
    for (int m = 0; m < w.inst.states.K(); ++m) {
        if (!xi.xi(i, m)) continue;
        p += kp2 * w.alpha[i][k] * std::norm(Cplx(w.a[i][k].dot(F.f[i].col(m))));
    }
    return p;
}

double sinr_w(const Workspace& w, const BeamformingSet& F, const Assignment& xi,
              int i, int k) {
    if (!xi.xi(i, k)) return 0.0;
    const double kp2 = double(w.inst.cfg.n_t);
    const double num =
        kp2 * w.alpha[i][k] * std::norm(Cplx(w.a[i][k].dot(F.f[i].col(k))));
    double den = w.inst.cfg.sigma_c2;
    for (int m = 0; m < w.inst.states.K(); ++m) {
        if (m == k || !xi.xi(i, m)) continue;
        den += kp2 * w.alpha[i][k] * std::norm(Cplx(w.a[i][k].dot(F.f[i].col(m))));
    }
    return num / den;
}

MatX update_gamma_w(const Workspace& w, const BeamformingSet& F, const Assignment& xi) {
    const int K = w.inst.states.K();
    MatX g = MatX::Zero(K, radio::kNumRsu);
    for (int i = 0; i < radio::kNumRsu; ++i)
        for (int k = 0; k < K; ++k)
            g(k, i) = sinr_w(w, F, xi, i, k);
    return g;
}

MatX update_y_w(const Workspace& w, const BeamformingSet& F, const Assignment& xi,
                const MatX& gamma, bool printed_variant) {
    const Instance& inst = w.inst;
    const int K = inst.states.K();
    const double kp = inst.cfg.kappa_tx();
    MatX y = MatX::Zero(K, radio::kNumRsu);
    for (int i = 0; i < radio::kNumRsu; ++i) {
        for (int k = 0; k < K; ++k) {
            if (!xi.xi(i, k)) continue;
            if (!printed_variant) {
                const double num = std::sqrt(1.0 + gamma(k, i)) * kp *
                                   std::sqrt(w.alpha[i][k]) *
                                   Cplx(w.a[i][k].dot(F.f[i].col(k))).real();
                y(k, i) = num / received_power(w, F, xi, i, k);
            } else {
                // Magnitude/beta form as printed in the source derivation;
                // kept for comparison only.
                const double kappa = inst.cfg.kappa();
                const double beta_k = std::abs(radio::reflection_coeff(
                    inst.states.at(i, k).d, inst.cfg.varrho));
                double den = inst.cfg.sigma_e2;
                for (int m = 0; m < K; ++m) {
                    if (m == k || !xi.xi(i, m)) continue;
                    const double beta_m = std::abs(radio::reflection_coeff(
                        inst.states.at(i, m).d, inst.cfg.varrho));
                    den += kappa * kappa * beta_m * beta_m *
                           std::norm(Cplx(w.a[i][k].dot(F.f[i].col(m))));
                }
                y(k, i) = kappa * beta_k *
                          std::abs(Cplx(w.a[i][k].dot(F.f[i].col(k)))) / den;
            }
        }
    }
    return y;
}

double fq_term(const Workspace& w, const BeamformingSet& F, const Assignment& xi,
               const MatX& gamma, const MatX& y, int i, int k) {
    const double g = gamma(k, i);
    const double yv = y(k, i);
    double term = std::log1p(g) - g;
    if (xi.xi(i, k)) {
        const double kp = w.inst.cfg.kappa_tx();
        term += 2.0 * yv * std::sqrt(1.0 + g) * kp * std::sqrt(w.alpha[i][k]) *
                Cplx(w.a[i][k].dot(F.f[i].col(k))).real();
    }
    term -= yv * yv * received_power(w, F, xi, i, k);
    return term;
}

double eval_fq_w(const Workspace& w, const BeamformingSet& F, const Assignment& xi,
                 const MatX& gamma, const MatX& y) {
    double fq = 0.0;
    for (int i = 0; i < radio::kNumRsu; ++i)
        for (int k = 0; k < w.inst.states.K(); ++k)
            fq += fq_term(w, F, xi, gamma, y, i, k);
    return fq;
}

void align_column(const CVec& a, CVec& f) {
    const Cplx z = a.dot(f);
    if (std::abs(z) > 1e-12) f *= std::conj(z) / std::abs(z);
}

/// Norm-ball projection, sensing-cone restoration along the top singular
/// direction of Pi, then the canonical phase gauge.
void project_column(const Workspace::Cone& cone, const CVec& a_own, double slack,
                    CVec& f) {
    const double n2 = f.squaredNorm();
    if (n2 > 1.0) f /= std::sqrt(n2);
    if (cone.active) {
        const double p0 = Cplx(f.dot(cone.pihpi * f)).real();
        if (p0 < cone.lambda_eff - slack) {
            const double s2 = cone.sigma_max2;
            const double b = 2.0 * s2 * Cplx(cone.v_top.dot(f)).real();
            const double c = p0 - cone.lambda_eff;
            const double disc = std::sqrt(std::max(b * b - 4.0 * s2 * c, 0.0));
            double t1 = (-b + disc) / (2.0 * s2);
            double t2 = (-b - disc) / (2.0 * s2);
            if (std::abs(t2) < std::abs(t1)) std::swap(t1, t2);
            bool restored = false;
            for (double t : {t1, t2}) {
                if ((f + t * cone.v_top).squaredNorm() <= 1.0 + 1e-12) {
                    f += t * cone.v_top;
                    restored = true;
                    break;
                }
            }
            if (!restored) f = cone.v_top;  // feasible for both constraints
        }
    }
    align_column(a_own, f);
}

/// Concave per-column subproblem max 2 c Re(a^H f) - f^H A f over the
/// feasible set; A is fixed within one PGD invocation.
void pgd_column(const CMat& A, double c_lin, const CVec& a_own,
                const Workspace::Cone& cone, const FpOptions& opts, CVec& f) {
    auto obj = [&](const CVec& v) {
        return 2.0 * c_lin * Cplx(a_own.dot(v)).real() - Cplx(v.dot(A * v)).real();
    };
    double val = obj(f);
    // The first search starts at the configured step; later searches warm
    // from the last accepted step (the useful step is ~1/curvature, and
    // restarting at 1.0 costs dozens of backtracks per iteration).
    double warm = opts.pgd_init_step;
    for (int it = 0; it < opts.pgd_max_steps; ++it) {
        const CVec grad = 2.0 * c_lin * a_own - 2.0 * (A * f);
        double step = warm;
        bool accepted = false;
        double gain = 0.0;
        while (step >= 1e-14) {
            CVec cand = f + step * grad;
            project_column(cone, a_own, opts.sensing_slack, cand);
            const double pred = Cplx(grad.dot(cand - f)).real();
            const double cand_val = obj(cand);
            gain = cand_val - val;
            if (pred > 0.0 && gain >= opts.armijo_c * pred) {
                f = cand;
                val = cand_val;
                accepted = true;
                break;
            }
            step *= opts.armijo_beta;
        }
        if (accepted)
            warm = std::min(opts.pgd_init_step, step / opts.armijo_beta);
        if (!accepted || gain <= 1e-10 * std::max(1.0, std::abs(val))) break;
    }
}

void note_relaxations(const Workspace& w, const Assignment& xi, SolveReport& rep) {
    rep.relaxed_pairs.clear();
    rep.infeasible_sensing = false;
    for (int i = 0; i < radio::kNumRsu; ++i)
        for (int k = 0; k < w.inst.states.K(); ++k)
            if (xi.xi(i, k) && w.cone[i][k].relaxed) {
                rep.relaxed_pairs.emplace_back(i, k);
                rep.infeasible_sensing = true;
            }
}

void pgd_beams_w(const Workspace& w, const Assignment& xi, const MatX& gamma,
                 const MatX& y, const FpOptions& opts, BeamformingSet& F) {
    const Instance& inst = w.inst;
    const int K = inst.states.K();
    const double kp2 = double(inst.cfg.n_t);
    for (int i = 0; i < radio::kNumRsu; ++i) {
        CMat A = CMat::Zero(inst.cfg.n_t, inst.cfg.n_t);
        for (int m = 0; m < K; ++m) {
            const double ym = y(m, i);
            if (ym == 0.0) continue;
            A += (ym * ym * kp2 * w.alpha[i][m]) * (w.a[i][m] * w.a[i][m].adjoint());
        }
        for (int m = 0; m < K; ++m) {
            if (!xi.xi(i, m)) continue;
            const double c_lin = y(m, i) * std::sqrt(1.0 + gamma(m, i)) *
                                 inst.cfg.kappa_tx() * std::sqrt(w.alpha[i][m]);
            CVec f = F.f[i].col(m);
            project_column(w.cone[i][m], w.a[i][m], opts.sensing_slack, f);
            pgd_column(A, c_lin, w.a[i][m], w.cone[i][m], opts, f);
            F.f[i].col(m) = f;
        }
    }
}

void align_phases_w(const Workspace& w, BeamformingSet& F) {
    for (int i = 0; i < radio::kNumRsu; ++i)
        for (int k = 0; k < w.inst.states.K(); ++k) {
            CVec col = F.f[i].col(k);
            align_column(w.a[i][k], col);
            F.f[i].col(k) = col;
        }
}

FpResult fp_polish_w(const Workspace& w, const Assignment& xi, BeamformingSet& F,
                     const FpOptions& opts) {
    FpResult res;
    align_phases_w(w, F);
    double prev = 0.0;
    for (int it = 0; it < opts.max_outer; ++it) {
        res.aux.gamma = update_gamma_w(w, F, xi);
        res.aux.y = update_y_w(w, F, xi, res.aux.gamma, opts.printed_y_variant);
        pgd_beams_w(w, xi, res.aux.gamma, res.aux.y, opts, F);
        const double fq = eval_fq_w(w, F, xi, res.aux.gamma, res.aux.y);
        res.trace.push_back(fq);
        res.iterations = it + 1;
        if (it >= 1 &&
            std::abs(fq - prev) <= opts.fq_rel_tol * std::max(1.0, std::abs(fq)))
            break;
        prev = fq;
    }
    // Refresh the auxiliaries so the reported f_q is tight at the exit F.
    res.aux.gamma = update_gamma_w(w, F, xi);
    res.aux.y = update_y_w(w, F, xi, res.aux.gamma, opts.printed_y_variant);
    res.aux.lambda = (1.0 + res.aux.gamma.array()).inverse();
    res.fq_final = eval_fq_w(w, F, xi, res.aux.gamma, res.aux.y);
    res.trace.push_back(res.fq_final);
    return res;
}

double counterfactual_zeta_w(const Workspace& w, const BeamformingSet& F,
                             const Assignment& xi, int i, int k) {
    const double kp2 = double(w.inst.cfg.n_t);
    const double alpha = w.alpha[i][k];
    const double own = xi.xi(i, k)
                           ? std::norm(Cplx(w.a[i][k].dot(F.f[i].col(k))))
                           : 1.0;  // matched beam for the hypothetical side
    double den = w.inst.cfg.sigma_c2;
    for (int m = 0; m < w.inst.states.K(); ++m) {
        if (m == k || !xi.xi(i, m)) continue;
        den += kp2 * alpha * std::norm(Cplx(w.a[i][k].dot(F.f[i].col(m))));
    }
    return std::log1p(kp2 * alpha * own / den);
}

int nearer_rsu(const PolarStates& st, int k) {
    return st.at(0, k).d <= st.at(1, k).d ? 0 : 1;
}

void finalize_report(const Workspace& w, SolveReport& rep, const FpOptions& opts) {
    const Instance& inst = w.inst;
    const int K = inst.states.K();
    rep.aux.gamma = update_gamma_w(w, rep.beams, rep.assignment);
    rep.aux.y = update_y_w(w, rep.beams, rep.assignment, rep.aux.gamma,
                           opts.printed_y_variant);
    rep.aux.lambda = (1.0 + rep.aux.gamma.array()).inverse();
    rep.fq_final = eval_fq_w(w, rep.beams, rep.assignment, rep.aux.gamma, rep.aux.y);
    rep.sum_rate_bits = radio::sum_rate(inst.states, rep.beams, rep.assignment, inst.cfg);
    rep.zeta.resize(K, radio::kNumRsu);
    for (int i = 0; i < radio::kNumRsu; ++i)
        for (int k = 0; k < K; ++k)
            rep.zeta(k, i) = counterfactual_zeta_w(w, rep.beams, rep.assignment, i, k);

    note_relaxations(w, rep.assignment, rep);
    rep.feasible = rep.assignment.complete();
    for (int i = 0; i < radio::kNumRsu && rep.feasible; ++i) {
        for (int k = 0; k < K; ++k) {
            if (rep.beams.f[i].col(k).squaredNorm() > 1.0 + 1e-9) rep.feasible = false;
            if (!rep.assignment.xi(i, k) || !w.cone[i][k].active) continue;
            const double p =
                Cplx(rep.beams.f[i].col(k).dot(w.cone[i][k].pihpi *
                                               rep.beams.f[i].col(k)))
                    .real();
            if (p < w.cone[i][k].lambda_eff - 2.0 * opts.sensing_slack)
                rep.feasible = false;
        }
    }
}

}  // namespace

MatX update_gamma(const Instance& inst, const BeamformingSet& F, const Assignment& xi) {
    return update_gamma_w(Workspace(inst, false), F, xi);
}

MatX update_y(const Instance& inst, const BeamformingSet& F, const Assignment& xi,
              const MatX& gamma, bool printed_variant) {
    return update_y_w(Workspace(inst, false), F, xi, gamma, printed_variant);
}

double eval_fq(const Instance& inst, const BeamformingSet& F, const Assignment& xi,
               const MatX& gamma, const MatX& y) {
    return eval_fq_w(Workspace(inst, false), F, xi, gamma, y);
}

double zeta(const Instance& inst, const BeamformingSet& F, const Assignment& xi,
            const MatX& gamma, const MatX& y, int i, int k) {
    return fq_term(Workspace(inst, false), F, xi, gamma, y, i, k);
}

CVec fq_beam_gradient(const Instance& inst, const BeamformingSet& F,
                      const Assignment& xi, const MatX& gamma, const MatX& y,
                      int i, int k) {
    const Workspace w(inst, false);
    if (!xi.xi(i, k)) return CVec::Zero(inst.cfg.n_t);
    const double kp2 = double(inst.cfg.n_t);
    CMat A = CMat::Zero(inst.cfg.n_t, inst.cfg.n_t);
    for (int m = 0; m < inst.states.K(); ++m) {
        const double ym = y(m, i);
        if (ym == 0.0) continue;
        A += (ym * ym * kp2 * w.alpha[i][m]) * (w.a[i][m] * w.a[i][m].adjoint());
    }
    const double c_lin = y(k, i) * std::sqrt(1.0 + gamma(k, i)) *
                         inst.cfg.kappa_tx() * std::sqrt(w.alpha[i][k]);
    return 2.0 * c_lin * w.a[i][k] - 2.0 * (A * F.f[i].col(k));
}

void align_phases(const Instance& inst, BeamformingSet& F) {
    const Workspace w(inst, false);
    align_phases_w(w, F);
}

BeamformingSet pgd_beams(const Instance& inst, const Assignment& xi,
                         const MatX& gamma, const MatX& y, const FpOptions& opts,
                         BeamformingSet F, SolveReport* diag) {
    const Workspace w(inst, true);
    pgd_beams_w(w, xi, gamma, y, opts, F);
    if (diag) note_relaxations(w, xi, *diag);
    return F;
}

FpResult fp_polish(const Instance& inst, const Assignment& xi, BeamformingSet& F,
                   const FpOptions& opts, SolveReport* diag) {
    const Workspace w(inst, true);
    FpResult res = fp_polish_w(w, xi, F, opts);
    if (diag) note_relaxations(w, xi, *diag);
    return res;
}

Assignment assign_distance(const PolarStates& st) {
    Assignment xi(st.K());
    for (int k = 0; k < st.K(); ++k) xi.rsu_of[k] = nearer_rsu(st, k);
    return xi;
}

double counterfactual_zeta(const Instance& inst, const BeamformingSet& F,
                           const Assignment& xi, int i, int k) {
    return counterfactual_zeta_w(Workspace(inst, false), F, xi, i, k);
}

SolveReport solve_distance(const Instance& inst, const FpOptions& opts) {
    const Workspace w(inst, true);
    SolveReport rep;
    rep.assignment = assign_distance(inst.states);
    rep.beams = BeamformingSet::matched(inst.states, inst.cfg);
    FpResult fp = fp_polish_w(w, rep.assignment, rep.beams, opts);
    rep.fq_traces.push_back(std::move(fp.trace));
    rep.fp_iterations = fp.iterations;
    finalize_report(w, rep, opts);
    return rep;
}

SolveReport assign_greedy(const Instance& inst, const FpOptions& opts) {
    const Workspace w(inst, true);
    const int K = inst.states.K();
    SolveReport rep;
    rep.assignment = Assignment(K);
    rep.beams = BeamformingSet::matched(inst.states, inst.cfg);

    std::vector<int> order(K);
    std::iota(order.begin(), order.end(), 0);
    auto key = [&](int k) {
        const double inv1 = 1.0 / inst.states.at(0, k).d;
        const double inv2 = 1.0 / inst.states.at(1, k).d;
        return (inv1 - inv2) * (inv1 - inv2);
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return key(a) > key(b); });

    rep.assignment.rsu_of[order[0]] = nearer_rsu(inst.states, order[0]);
    {
        FpResult fp = fp_polish_w(w, rep.assignment, rep.beams, opts);
        rep.fq_traces.push_back(std::move(fp.trace));
        rep.fp_iterations += fp.iterations;
    }

    for (int idx = 1; idx < K; ++idx) {
        const int k = order[idx];
        double best_zeta = -std::numeric_limits<double>::infinity();
        Assignment best_xi;
        BeamformingSet best_F;
        std::vector<double> best_trace;
        int best_iters = 0;
        for (int i = 0; i < radio::kNumRsu; ++i) {
            Assignment cand_xi = rep.assignment;
            cand_xi.rsu_of[k] = i;
            BeamformingSet cand_F = rep.beams;
            for (int j = 0; j < radio::kNumRsu; ++j)
                cand_F.f[j].col(k) = w.a[j][k];
            FpResult fp = fp_polish_w(w, cand_xi, cand_F, opts);
            const double z = fq_term(w, cand_F, cand_xi, fp.aux.gamma, fp.aux.y, i, k);
            if (z > best_zeta) {
                best_zeta = z;
                best_xi = std::move(cand_xi);
                best_F = std::move(cand_F);
                best_trace = std::move(fp.trace);
                best_iters = fp.iterations;
            }
        }
        rep.assignment = std::move(best_xi);
        rep.beams = std::move(best_F);
        rep.fq_traces.push_back(std::move(best_trace));
        rep.fp_iterations += best_iters;
    }
    finalize_report(w, rep, opts);
    return rep;
}

SolveReport assign_heuristic(const Instance& inst, const FpOptions& opts) {
    const Workspace w(inst, true);
    const int K = inst.states.K();
    SolveReport rep;
    rep.assignment = assign_distance(inst.states);
    rep.beams = BeamformingSet::matched(inst.states, inst.cfg);

    FpResult fp = fp_polish_w(w, rep.assignment, rep.beams, opts);
    rep.fq_traces.push_back(fp.trace);
    rep.fp_iterations += fp.iterations;
    double fq_cur = fp.fq_final;

    const double kp2 = double(inst.cfg.n_t);
    // Steering cross-gains |a_{i,m}^H a_{i,k}|^2 are assignment-independent.
    std::array<MatX, radio::kNumRsu> steer_gram;
    for (int i = 0; i < radio::kNumRsu; ++i) {
        steer_gram[i].resize(K, K);
        for (int m = 0; m < K; ++m)
            for (int k = 0; k < K; ++k)
                steer_gram[i](m, k) = std::norm(Cplx(w.a[i][m].dot(w.a[i][k])));
    }

    // A move flips one vehicle's RSU, or two (pair moves escape the
    // single-flip local optima that interference coupling creates).
    struct Move {
        int a = -1;
        int b = -1;  // -1: single flip
    };

    // Fixed-beam counterfactual gain of a move, summed over every affected
    // vehicle's rate; moved vehicles re-enter with a matched beam. Ranks
    // candidates only — acceptance is always verified by a repolish.
    auto move_gain = [&](const Move& mv) {
        auto flipped = [&](int k) { return k == mv.a || k == mv.b; };
        auto rsu_after = [&](int k) {
            return flipped(k) ? 1 - rep.assignment.rsu_of[k]
                              : rep.assignment.rsu_of[k];
        };
        // Power of vehicle m's beam received at vehicle k from RSU i.
        auto pw = [&](int i, int k, int m) {
            if (flipped(m))
                return kp2 * w.alpha[i][k] * steer_gram[i](k, m);
            return kp2 * w.alpha[i][k] *
                   std::norm(Cplx(w.a[i][k].dot(rep.beams.f[i].col(m))));
        };
        double delta = 0.0;
        for (int k = 0; k < K; ++k) {
            const int bi = rep.assignment.rsu_of[k];
            double bden = inst.cfg.sigma_c2;
            for (int m = 0; m < K; ++m)
                if (m != k && rep.assignment.rsu_of[m] == bi)
                    bden += kp2 * w.alpha[bi][k] *
                            std::norm(Cplx(w.a[bi][k].dot(rep.beams.f[bi].col(m))));
            const double bnum =
                kp2 * w.alpha[bi][k] *
                std::norm(Cplx(w.a[bi][k].dot(rep.beams.f[bi].col(k))));
            const int ai = rsu_after(k);
            double aden = inst.cfg.sigma_c2;
            for (int m = 0; m < K; ++m)
                if (m != k && rsu_after(m) == ai) aden += pw(ai, k, m);
            const double anum = flipped(k) ? kp2 * w.alpha[ai][k] : bnum;
            delta += std::log1p(anum / aden) - std::log1p(bnum / bden);
        }
        return delta;
    };

    auto apply_move = [&](const Move& mv, Assignment& xi, BeamformingSet& F) {
        for (int k : {mv.a, mv.b}) {
            if (k < 0) continue;
            xi.rsu_of[k] = 1 - xi.rsu_of[k];
            F.f[xi.rsu_of[k]].col(k) = w.a[xi.rsu_of[k]][k];
        }
    };

    const int budget = opts.swap_budget_factor * K;
    // Toy-scale solves verify the entire move set (exact best improvement);
    // larger instances trust the ranking beyond the window.
    const int rank_window = K <= 10 ? std::numeric_limits<int>::max() : 8;
    bool improved = true;
    while (improved && !rep.swap_budget_exhausted) {
        improved = false;
        if (rep.swaps >= budget) {
            rep.swap_budget_exhausted = true;
            break;
        }
        // Candidates: every single flip, plus pairs seeded by the top-ranked
        // singles (all pairs at toy scale).
        std::vector<std::pair<double, Move>> ranked;
        for (int k = 0; k < K; ++k)
            ranked.push_back({move_gain({k, -1}), {k, -1}});
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const auto& x, const auto& y) { return x.first > y.first; });
        const int seeds = std::min(K, 8);
        std::vector<Move> pair_moves;
        if (K <= 10) {
            for (int a = 0; a < K; ++a)
                for (int b = a + 1; b < K; ++b) pair_moves.push_back({a, b});
        } else {
            for (int s = 0; s < seeds; ++s)
                for (int b = 0; b < K; ++b)
                    if (b != ranked[s].second.a)
                        pair_moves.push_back({std::min(ranked[s].second.a, b),
                                              std::max(ranked[s].second.a, b)});
        }
        for (const Move& mv : pair_moves) ranked.push_back({move_gain(mv), mv});
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const auto& x, const auto& y) { return x.first > y.first; });
        ranked.erase(std::unique(ranked.begin(), ranked.end(),
                                 [](const auto& x, const auto& y) {
                                     return x.second.a == y.second.a &&
                                            x.second.b == y.second.b;
                                 }),
                     ranked.end());

        double best_fq = fq_cur + kSwapImprovement;
        Move best_mv;
        BeamformingSet best_F;
        FpResult best_fp;
        auto verify = [&](const Move& mv) {
            Assignment cand_xi = rep.assignment;
            BeamformingSet cand_F = rep.beams;
            apply_move(mv, cand_xi, cand_F);
            FpResult cand_fp = fp_polish_w(w, cand_xi, cand_F, opts);
            if (cand_fp.fq_final >= best_fq) {
                best_fq = cand_fp.fq_final;
                best_mv = mv;
                best_F = std::move(cand_F);
                best_fp = std::move(cand_fp);
            }
        };
        for (int idx = 0; idx < static_cast<int>(ranked.size()); ++idx) {
            if (idx >= rank_window && best_mv.a >= 0) break;
            verify(ranked[idx].second);
        }
        if (best_mv.a >= 0) {
            for (int k : {best_mv.a, best_mv.b})
                if (k >= 0) rep.assignment.rsu_of[k] = 1 - rep.assignment.rsu_of[k];
            rep.beams = std::move(best_F);
            rep.swaps += best_mv.b >= 0 ? 2 : 1;
            rep.fp_iterations += best_fp.iterations;
            rep.fq_traces.push_back(std::move(best_fp.trace));
            fq_cur = best_fp.fq_final;
            improved = true;
        }
    }

    // Deterministic restart: repolish the final assignment from matched
    // beams and keep the better iterate.
    {
        BeamformingSet cold = BeamformingSet::matched(inst.states, inst.cfg);
        FpResult cold_fp = fp_polish_w(w, rep.assignment, cold, opts);
        if (cold_fp.fq_final > fq_cur) {
            rep.beams = std::move(cold);
            rep.fp_iterations += cold_fp.iterations;
            rep.fq_traces.push_back(std::move(cold_fp.trace));
        }
    }
    finalize_report(w, rep, opts);
    return rep;
}

ExternalSolution load_external_beams(const std::string& path, int expected_K,
                                     int expected_n_t) {
    const std::vector<io::BeamSection> sections = io::read_beam_exchange(path);
    if (sections.empty()) throw FormatError(path + ": no beam sections");
    const io::BeamSection& sec = sections.front();
    if (expected_n_t >= 0 && sec.n_t != expected_n_t)
        throw FormatError(path + ": n_t mismatch");
    const int K = sec.declared_K;
    if (expected_K >= 0 && K != expected_K)
        throw FormatError(path + ": K mismatch");
    if (static_cast<int>(sec.rows.size()) != K)
        throw FormatError(path + ": row count does not match header K");

    ExternalSolution out;
    out.slot = sec.slot;
    out.assignment = Assignment(K);
    for (int i = 0; i < radio::kNumRsu; ++i)
        out.beams.f[i] = CMat::Zero(sec.n_t, K);
    for (const auto& row : sec.rows) {
        if (row.vehicle < 0 || row.vehicle >= K)
            throw FormatError(path + ": vehicle index out of range");
        if (out.assignment.rsu_of[row.vehicle] >= 0)
            throw FormatError(path + ": duplicate vehicle entry");
        out.assignment.rsu_of[row.vehicle] = row.rsu;
        CVec f = row.f;
        const double n2 = f.squaredNorm();
        if (n2 > 1.0 + 1e-6) {
            f /= std::sqrt(n2);
            out.warnings.push_back("column (rsu " + std::to_string(row.rsu + 1) +
                                   ", vehicle " + std::to_string(row.vehicle) +
                                   ") renormalized from ||f||^2 = " +
                                   std::to_string(n2));
        }
        out.beams.f[row.rsu].col(row.vehicle) = f;
    }
    if (!out.assignment.complete())
        throw FormatError(path + ": not every vehicle has a beam row");
    return out;
}

}  // namespace isac::opt
