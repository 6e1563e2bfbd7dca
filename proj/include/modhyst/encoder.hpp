#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "modhyst/signal.hpp"

namespace modhyst {

/// Encoder parameter triple [lambda, h, alpha]. lambda_h is always derived,
/// never stored, so it cannot go stale.
struct ModuloParams {
    double lambda = 1.0;  // folding threshold, > 0
    double h = 0.0;       // hysteresis, in [0, 2*lambda)
    double alpha = 0.0;   // transient duration in s, >= 0

    double lambda_h() const { return lambda - 0.5 * h; }
    double h_star() const { return h < 2.0 * lambda - h ? h : 2.0 * lambda - h; }

    void validate() const;
};

/// One asynchronous reset event.
struct FoldEvent {
    double tau = 0.0;  // fold time in s
    int s = +1;        // fold direction, -1 or +1
};

/// Centered modulo map with threshold lambda: result in [-lambda, lambda),
/// x - result an integer multiple of 2*lambda.
double ideal_modulo(double x, double lambda);

/// Transient step: 0 for t < 0, linear ramp to 2*lambda_h over [0, alpha),
/// 2*lambda_h for t >= alpha. alpha == 0 degenerates to a step at 0.
double epsilon0(double t, const ModuloParams& params);

/// Residual sum of signed transient steps for a sorted fold sequence.
double residual(double t, std::span<const FoldEvent> folds, const ModuloParams& params);

struct FoldScan {
    std::vector<FoldEvent> events;   // sorted strictly increasing in tau
    bool overlap_warning = false;    // some tau_{p+1} - tau_p <= alpha
};

/// Locates the reset times of the continuous input on [t_lo, t_hi].
///
/// The recursion is run in amplitude terms: from the level of the last fold,
/// the next event fires when g has moved by 2*lambda - h in the same
/// direction or by h in the opposite one; the very first event is the first
/// crossing of an odd multiple of lambda. Crossings are bracketed on the
/// scan grid (with 4x subdivision) and refined by bisection to |tau error|
/// <= tol. scan_step/tol <= 0 select defaults (pi/omega)/64 and 1e-12
/// relative to the window scale.
FoldScan find_folds(const BandlimitedSignal& g, const ModuloParams& params, double t_lo,
                    double t_hi, double scan_step = 0.0, double tol = 0.0);

struct NoiseSpec {
    double eta_inf = 0.0;       // uniform noise bound, >= 0
    std::uint64_t seed = 0;
};

/// Uniform samples of the encoder output. Fold times in ground_truth are
/// stored relative to t0, so sample k lives at time k*T.
struct EncodedTrace {
    double T = 1.0;
    std::vector<double> y;
    double eta_inf = 0.0;

    struct GroundTruth {
        std::vector<double> gamma;     // clean input samples g(t0 + k T)
        std::vector<FoldEvent> folds;  // tau relative to t0
        ModuloParams params;
    };
    std::optional<GroundTruth> ground_truth;
    std::vector<std::string> warnings;
};

/// y[k] = g(t0 + kT) - eps_g(t0 + kT) + eta[k] for k = 0..K-1, eta i.i.d.
/// uniform on [-eta_inf, eta_inf]. T < alpha is permitted but flagged, since
/// the recovery guarantees assume at most one sample per transient.
EncodedTrace encode_and_sample(const BandlimitedSignal& g, const ModuloParams& params, double T,
                               long K, double t0, const NoiseSpec& noise = {});

/// Lemma-level guarantee floor(h*/(T omega g_inf)) on the discrete fold
/// separation n_{p+1} - n_p.
long min_fold_separation_bound(const ModuloParams& params, double omega, double g_inf, double T);

/// First sample index at or after tau: smallest n with n*T >= tau, snapped
/// so that tau within 1e-9*T of a grid point counts as exactly on it.
long discrete_fold_index(double tau, double T);

}  // namespace modhyst
