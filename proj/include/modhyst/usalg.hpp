#pragma once

#include <span>
#include <utility>
#include <vector>

#include "modhyst/recovery.hpp"

namespace modhyst {

/// Unlimited-sampling baseline: N-th difference, modulo annihilation with
/// threshold lambda_eff, then N rounds of cumulative summation. Each round is
/// anchored at zero initial conditions (first sample assumed unfolded) and
/// re-centered onto the 2*lambda_eff grid using its leading values. Output
/// has length K - N, aligned to the start of the input grid.
std::vector<double> usalg(std::span<const double> y, double lambda_eff, int N);

struct ThresholdSearch {
    double lambda_usalg = 0.0;  // grid minimizer of MSE(gamma, usalg(y, ., N))
    double err = 0.0;           // Err in percent at the minimizer
    std::vector<std::pair<double, double>> curve;  // (lambda, err%) per grid point
};

/// Line search over a uniform lambda grid; requires ground truth in the trace.
ThresholdSearch effective_threshold_search(const EncodedTrace& trace, int N, double grid_lo,
                                           double grid_hi, long grid_count);

/// Report wrapper around usalg for the experiment pipeline.
RecoveryReport recover_usalg(const EncodedTrace& trace, const ModuloParams& params, int N,
                             double lambda_eff, std::optional<double> omega = std::nullopt);

}  // namespace modhyst
