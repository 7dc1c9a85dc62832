#pragma once
#include <string>
#include <utility>
#include <vector>

#include "isac/radio.hpp"

namespace isac::opt {

using radio::Assignment;
using radio::BeamformingSet;
using radio::PolarStates;
using radio::RadioConfig;

struct FpOptions {
    int max_outer = 50;          // FP outer iterations per polish
    double fq_rel_tol = 1e-6;    // |delta f_q| relative convergence
    int pgd_max_steps = 200;     // PGD steps per beam column
    double pgd_init_step = 1.0;
    double armijo_c = 1e-4;
    double armijo_beta = 0.5;
    double sensing_slack = 1e-6;   // tolerance on ||Pi f||^2 >= Lambda
    int swap_budget_factor = 4;    // heuristic swap budget = factor * K
    bool printed_y_variant = false;
};

/// Quadratic-transform auxiliaries, indexed (vehicle, rsu). lambda is the
/// dual 1/(1+gamma), reported but not iterated.
struct AuxiliaryState {
    MatX gamma;
    MatX y;
    MatX lambda;
};

/// One optimization problem: predicted per-RSU states, radio constants and
/// the per-pair sensing thresholds (0 = unconstrained).
struct Instance {
    PolarStates states;
    RadioConfig cfg;
    MatX lambda_sensing;  // K x 2

    static Instance make(PolarStates st, RadioConfig cfg) {
        Instance inst{std::move(st), cfg, {}};
        inst.lambda_sensing = MatX::Zero(inst.states.K(), radio::kNumRsu);
        return inst;
    }
};

struct SolveReport {
    Assignment assignment;
    BeamformingSet beams;
    AuxiliaryState aux;
    std::vector<std::vector<double>> fq_traces;  // one trace per inner FP loop
    MatX zeta;                                   // counterfactual utilities at exit
    double fq_final = 0.0;                       // nats
    double sum_rate_bits = 0.0;
    int fp_iterations = 0;
    int swaps = 0;
    bool swap_budget_exhausted = false;
    bool infeasible_sensing = false;
    std::vector<std::pair<int, int>> relaxed_pairs;  // (rsu, vehicle)
    bool feasible = true;
};

/// gamma* = SINR at the current (F, xi).
MatX update_gamma(const Instance& inst, const BeamformingSet& F, const Assignment& xi);

/// Stationary y of f_q for fixed gamma (derivative-consistent form); the
/// printed magnitude/beta variant is available for comparison.
MatX update_y(const Instance& inst, const BeamformingSet& F, const Assignment& xi,
              const MatX& gamma, bool printed_variant = false);

/// Quadratic-transform surrogate objective, natural log.
double eval_fq(const Instance& inst, const BeamformingSet& F, const Assignment& xi,
               const MatX& gamma, const MatX& y);

/// Per-(rsu, vehicle) term of f_q.
double zeta(const Instance& inst, const BeamformingSet& F, const Assignment& xi,
            const MatX& gamma, const MatX& y, int i, int k);

/// Gradient of f_q with respect to column (i, k), in the complex
/// identification of the (Re f, Im f) gradient pair.
CVec fq_beam_gradient(const Instance& inst, const BeamformingSet& F,
                      const Assignment& xi, const MatX& gamma, const MatX& y,
                      int i, int k);

/// Rotates every column into the canonical gauge a_{i,k}^H f_{i,k} in R+.
/// All |.|^2 quantities, norms and ||Pi f|| are phase-invariant, and the
/// rotation never decreases f_q.
void align_phases(const Instance& inst, BeamformingSet& F);

/// Projected gradient ascent on f_q over the served beam columns under
/// ||f||^2 <= 1 and ||Pi f||^2 >= Lambda. Thresholds above the top singular
/// value of Pi are relaxed to it and reported.
BeamformingSet pgd_beams(const Instance& inst, const Assignment& xi,
                         const MatX& gamma, const MatX& y, const FpOptions& opts,
                         BeamformingSet F, SolveReport* diag = nullptr);

struct FpResult {
    std::vector<double> trace;  // f_q after each outer iteration
    AuxiliaryState aux;
    double fq_final = 0.0;
    int iterations = 0;
};

/// Alternating gamma / y / PGD loop to convergence; F updated in place.
FpResult fp_polish(const Instance& inst, const Assignment& xi, BeamformingSet& F,
                   const FpOptions& opts, SolveReport* diag = nullptr);

/// Nearest-RSU matching; ties to RSU 0.
Assignment assign_distance(const PolarStates& st);

/// Distance matching with the same FP beam polish the other solvers use.
SolveReport solve_distance(const Instance& inst, const FpOptions& opts);

/// Sequential allocation sorted by |1/d1 - 1/d2|^2, each vehicle committed
/// to the RSU with the larger converged zeta.
SolveReport assign_greedy(const Instance& inst, const FpOptions& opts);

/// Distance init plus swap loop on e_k = sum_i zeta_{i,k} (1 - 2 xi_{i,k});
/// swaps must improve f_q by 1e-9 or are reverted.
SolveReport assign_heuristic(const Instance& inst, const FpOptions& opts);

/// ln(1 + SINR) vehicle k would see from RSU i, own beam matched when not
/// currently served there; the stationary value of Eq. zeta for that choice.
double counterfactual_zeta(const Instance& inst, const BeamformingSet& F,
                           const Assignment& xi, int i, int k);

/// Beams plus the assignment encoded by a beam-exchange section.
struct ExternalSolution {
    int slot = 0;
    BeamformingSet beams;
    Assignment assignment;
    std::vector<std::string> warnings;  // renormalized columns
};

/// Reads a single-section beam-exchange file; columns violating the unit
/// budget by more than 1e-6 are renormalized and reported.
ExternalSolution load_external_beams(const std::string& path, int expected_K = -1,
                                     int expected_n_t = -1);

}  // namespace isac::opt
