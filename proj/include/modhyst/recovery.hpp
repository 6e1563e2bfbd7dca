#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "modhyst/encoder.hpp"

namespace modhyst {

/// N-th order difference filter. Entry i of the result corresponds to filter
/// index k = i + 1 and holds sum_j (-1)^(N-j) C(N,j) y[i+j]. Under this
/// alignment a residual step arriving at sample n is supported on filter
/// indices {n-N+1, ..., n+1}.
std::vector<double> filter_samples(std::span<const double> y, int N);

/// Transient step as used when rebuilding the residual from estimated fold
/// times. Identical to epsilon0 except that the alpha == 0 step is open at
/// zero: an estimated time tau = n T means the step lands between samples n
/// and n+1, never on n itself.
double recovery_epsilon0(double t, const ModuloParams& params);

/// lambda_h / (2N).
double detection_threshold(const ModuloParams& params, int N);

/// One above-threshold run attributed to a single fold. k indices are filter
/// indices (1-based, see filter_samples).
struct Cluster {
    long k_m = 0;
    long k_M = 0;
};

/// Sequential left-to-right scan: k_m is the first above-threshold index
/// after the previous cluster, k_M the last above-threshold index in
/// [k_m, k_m + N].
std::vector<Cluster> detect_fold_clusters(const std::vector<double>& filtered, double threshold,
                                          int N);

enum class FoldCase {
    MidTransient,  // cluster width N: a sample lies mid-transient, beta estimated
    EdgeOrPast,    // cluster width N-1: sample at the transient edge or past it
};

struct FoldEstimate {
    long n = 0;                  // estimated discrete fold index
    int s = +1;                  // estimated fold direction
    double tau = 0.0;            // estimated fold time (grid-relative)
    std::optional<double> beta;  // fractional transient position, MidTransient only
    FoldCase kase = FoldCase::EdgeOrPast;
    bool degenerate_width = false;  // cluster width was neither N nor N-1
    bool crowded = false;           // closer than N+1 samples to a neighbor estimate
};

/// Theorem-style estimation from one cluster. Throws DegenerateClusterError
/// when filtered[k_m] == 0.
FoldEstimate estimate_fold(const Cluster& cluster, const std::vector<double>& filtered,
                           const ModuloParams& params, int N, double T);

struct ConditionCheck {
    bool th1 = false;  // (T omega e)^N g_inf + 2^N eta_inf <= lambda_h/(2N)
    bool th2 = false;  // (N+1) T omega g_inf <= h*
};

ConditionCheck check_conditions(const ModuloParams& params, double T, double omega, double g_inf,
                                double eta_inf, int N);

/// Largest filter order with a recovery guarantee, or nullopt when no order
/// qualifies. Noisy traces additionally require eta_inf <= lambda_h/8.
std::optional<int> max_order(const ModuloParams& params, double T, double omega, double g_inf,
                             double eta_inf);

/// Everything a recovery run reports: reconstruction, fold estimates,
/// condition diagnostics, and (when ground truth is available) empirical
/// errors next to the theoretical bounds they must not exceed.
struct RecoveryReport {
    std::string method;  // "threshold", "lowrate", "usalg"
    std::vector<double> gamma_tilde;
    std::vector<FoldEstimate> folds;
    long fold_count = 0;

    struct Diagnostics {
        std::optional<bool> th1;
        std::optional<bool> th2;
        std::vector<std::string> warnings;
    } diagnostics;

    // vs. ground truth, when the trace carries it
    std::optional<double> mse;
    std::optional<double> err_percent;
    std::optional<double> rmse_tau;  // only when fold counts match

    struct Bounds {
        std::optional<double> prop1;            // (lambda_h^2/N^2)(P/K), P = true fold count
        std::optional<double> prop1_unknown_p;  // (lambda_h^2/N^2)(2 T omega g_inf / h*)
        std::optional<double> thm2;             // C T^3 when the regime guards hold
        std::optional<double> thm3;             // max{C T^3, C_eta T} when guards hold
    } bounds;

    std::optional<double> lambda_eff;  // usalg only
};

/// Full threshold pipeline: filter, detect clusters, estimate folds, rebuild
/// the residual, gamma_tilde = y + residual. Degenerate clusters become
/// warnings, not failures. The reconstruction is anchored at an unfolded
/// first sample. g_inf enables TH1/TH2 diagnostics; when absent it is taken
/// from the ground-truth samples if the trace has them.
RecoveryReport reconstruct(const EncodedTrace& trace, const ModuloParams& params, int N,
                           double omega, std::optional<double> g_inf = std::nullopt);

/// Shared post-processing: fills metrics and bounds against ground truth.
/// omega/g_inf gate the condition diagnostics and the omega-dependent bounds.
void finalize_report(RecoveryReport& report, const EncodedTrace& trace, const ModuloParams& params,
                     int N, std::optional<double> omega, std::optional<double> g_inf);

std::string report_to_json(const RecoveryReport& report);

}  // namespace modhyst
