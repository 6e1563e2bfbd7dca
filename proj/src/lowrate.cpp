#include "modhyst/lowrate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "modhyst/errors.hpp"

namespace modhyst {

namespace {

// Difference-of-delta kernel attached to sample m: taps at filter indices
// m-N+1 .. m with values (-1)^j C(N-1, N-1-j). Tap 0 (the lead) is +1, so a
// kernel whose lead reads v is removed by subtracting v * d_m.
struct KernelOps {
    int N;
    long k_hi;
    std::vector<double> taps;

    KernelOps(int order, long hi) : N(order), k_hi(hi), taps(order) {
        double binom = 1.0;  // C(N-1, N-1-j) built up from j = 0
        for (int j = 0; j < N; ++j) {
            taps[j] = (j % 2 ? -binom : binom);
            binom = binom * (N - 1 - j) / (j + 1);
        }
    }

    void subtract(std::vector<double>& F, long m, double lead) const {
        for (int j = 0; j < N; ++j) {
            const long k = m - N + 1 + j;
            if (k >= 1 && k <= k_hi) F[k - 1] -= lead * taps[j];
        }
    }
};

struct SweepFold {
    long n = 0;
    int s = +1;
    std::optional<double> beta;
    FoldCase kase = FoldCase::EdgeOrPast;
    bool split_contradiction = false;
};

struct SweepResult {
    std::vector<SweepFold> folds;
    std::vector<std::string> warnings;
    std::vector<std::pair<long, double>> subtractions;
};

int sgn(double v) { return v > 0.0 ? +1 : (v < 0.0 ? -1 : 0); }

// One directional pass. F is consumed (kernels are subtracted in place).
// Sweep index k examines the lead position of the kernel attached to sample
// m = k + N - 1.
SweepResult sweep(std::vector<double>& F, long k_start, const ModuloParams& params, int N,
                  double T, double theta_beta) {
    const long k_hi = static_cast<long>(F.size());
    const double two_lh = 2.0 * params.lambda_h();
    const double theta_base = params.lambda_h() / (2.0 * N);
    KernelOps kernel(N, k_hi);
    SweepResult out;

    auto value = [&](long k) { return (k >= 1 && k <= k_hi) ? F[k - 1] : 0.0; };
    auto remove = [&](long m, double lead) {
        kernel.subtract(F, m, lead);
        out.subtractions.emplace_back(m, lead);
    };

    long last_detect = k_start - 10;
    long k = k_start;
    while (k <= k_hi) {
        double theta = theta_base;
        if (k == last_detect + 1)
            theta = 2.0 * params.lambda_h() / N;
        else if (k == last_detect + 2)
            theta = params.lambda_h() / N;

        const double ybar = value(k);
        const double mag = std::abs(ybar);
        const long m = k + N - 1;

        if (mag > two_lh - theta) {
            // Complete fold: the sample at m sits at or past the transient end.
            const int s = -sgn(ybar);
            remove(m, static_cast<double>(sgn(ybar)) * two_lh);
            SweepFold f;
            f.n = m - 1;
            f.s = s;
            f.kase = FoldCase::EdgeOrPast;
            out.folds.push_back(f);
            last_detect = k;
            k += 1;
        } else if (mag >= theta) {
            // Transient sample: the coefficient pair is either (m, m+1) or
            // (m-1, m). Probe hypothesis A first, as in the sequential pass.
            remove(m, ybar);
            const double ybar2 = value(k + 1);
            const double mismatch_a = std::abs(ybar + ybar2 - two_lh * sgn(ybar));

            bool use_a = mismatch_a <= theta_beta;
            bool contradiction = false;
            double v_prev = 0.0, ycorr = 0.0, mismatch_b = 0.0;
            const bool b_possible = (k - 1 >= 1);

            if (!use_a && b_possible) {
                // Undo A's subtraction, then evaluate the retroactive split.
                kernel.subtract(F, m, -ybar);
                out.subtractions.pop_back();
                v_prev = value(k - 1);
                remove(m - 1, v_prev);
                ycorr = value(k);
                remove(m, ycorr);
                const int sc = sgn(ycorr) != 0 ? sgn(ycorr) : -sgn(v_prev);
                mismatch_b = std::abs(v_prev + ycorr - two_lh * sc);
                if (mismatch_b > theta_beta) {
                    contradiction = true;
                    if (mismatch_a < mismatch_b) {
                        // Roll back B and fall through to A as the nearer split.
                        kernel.subtract(F, m, -ycorr);
                        out.subtractions.pop_back();
                        kernel.subtract(F, m - 1, -v_prev);
                        out.subtractions.pop_back();
                        remove(m, ybar);
                        use_a = true;
                    }
                }
            } else if (!use_a) {
                use_a = true;  // no left neighbor to split against
                contradiction = true;
            }

            if (use_a) {
                const double y2 = value(k + 1);
                remove(m + 1, y2);
                SweepFold f;
                f.n = m;
                f.s = -sgn(ybar);
                f.beta = std::clamp(mag / two_lh, 0.0, 1.0);
                f.kase = FoldCase::MidTransient;
                f.split_contradiction = contradiction;
                out.folds.push_back(f);
                last_detect = k;
                k += 2;
            } else {
                SweepFold f;
                f.n = m - 1;
                f.s = sgn(ycorr) != 0 ? -sgn(ycorr) : sgn(v_prev);
                f.beta = std::clamp(1.0 - std::abs(ycorr) / two_lh, 0.0, 1.0);
                f.kase = FoldCase::MidTransient;
                f.split_contradiction = contradiction;
                out.folds.push_back(f);
                last_detect = k;
                k += 1;
            }
            if (contradiction)
                out.warnings.push_back("transient split contradiction near filter index " +
                                       std::to_string(k));
        } else {
            k += 1;
        }
    }
    return out;
}

}  // namespace

std::optional<long> find_anchor(const std::vector<double>& filtered, double threshold, int N) {
    if (N < 1) throw std::invalid_argument("find_anchor: N must be >= 1");
    const long k_hi = static_cast<long>(filtered.size());
    int run = 0;
    for (long k = 1; k <= k_hi; ++k) {
        if (std::abs(filtered[k - 1]) < threshold) {
            if (++run == N) return k - N + 1;
        } else {
            run = 0;
        }
    }
    return std::nullopt;
}

RecoveryReport reconstruct_lowrate(const EncodedTrace& trace, const ModuloParams& params, int N,
                                   double theta_beta, std::optional<double> omega,
                                   LowrateDetails* details) {
    params.validate();
    if (N < 1) throw std::invalid_argument("reconstruct_lowrate: N must be >= 1");
    if (!(theta_beta > 0.0))
        throw std::invalid_argument("reconstruct_lowrate: theta_beta must be > 0");
    const long K = static_cast<long>(trace.y.size());
    if (K < N + 2) throw std::invalid_argument("reconstruct_lowrate: trace shorter than N + 2");

    const double T = trace.T;
    std::vector<double> filtered = filter_samples(trace.y, N);
    const long k_hi = static_cast<long>(filtered.size());
    const double theta = detection_threshold(params, N);

    std::optional<long> k0 = find_anchor(filtered, theta, N);
    if (!k0)
        throw RecoveryError(
            "reconstruct_lowrate: no anchor (no run of N quiet filtered samples)");

    RecoveryReport rep;
    rep.method = "lowrate";
    rep.diagnostics.warnings = trace.warnings;

    struct Mapped {
        double tau;
        long n;
        int s;
        std::optional<double> beta;
        FoldCase kase;
    };
    std::vector<Mapped> all;

    // Forward pass from the anchor.
    {
        std::vector<double> F = filtered;
        SweepResult fwd = sweep(F, *k0, params, N, T, theta_beta);
        for (const SweepFold& f : fwd.folds) {
            Mapped m;
            m.n = f.n;
            m.s = f.s;
            m.beta = f.beta;
            m.kase = f.kase;
            m.tau = f.beta ? f.n * T - params.alpha * *f.beta : f.n * T;
            all.push_back(m);
        }
        for (auto& w : fwd.warnings) rep.diagnostics.warnings.push_back(w);
        if (details) {
            details->forward_only = (*k0 == 1);
            details->corrected = F;
            details->subtractions = fwd.subtractions;
        }
    }

    // Backward pass: same sweep on the index-reversed samples, estimates
    // mapped through tau -> (K-1)T - tau - alpha with flipped signs.
    if (*k0 > 1) {
        std::vector<double> y_rev(trace.y.rbegin(), trace.y.rend());
        std::vector<double> F = filter_samples(y_rev, N);
        const long rev_start = k_hi - *k0 - N + 2;
        SweepResult bwd = sweep(F, std::max<long>(1, rev_start), params, N, T, theta_beta);
        const double t_end = (K - 1) * T;
        for (const SweepFold& f : bwd.folds) {
            const double tau_rev = f.beta ? f.n * T - params.alpha * *f.beta : f.n * T;
            Mapped m;
            m.tau = t_end - tau_rev - params.alpha;
            m.s = -f.s;
            m.n = discrete_fold_index(m.tau, T);
            if (f.beta && params.alpha > 0.0) {
                m.beta = std::clamp((m.n * T - m.tau) / params.alpha, 0.0, 1.0);
                m.kase = FoldCase::MidTransient;
            } else {
                m.kase = FoldCase::EdgeOrPast;
            }
            all.push_back(m);
        }
        for (auto& w : bwd.warnings) rep.diagnostics.warnings.push_back(w);
    }

    std::sort(all.begin(), all.end(), [](const Mapped& a, const Mapped& b) { return a.tau < b.tau; });
    for (const Mapped& m : all) {
        FoldEstimate e;
        e.n = m.n;
        e.s = m.s;
        e.tau = m.tau;
        e.beta = m.beta;
        e.kase = m.kase;
        rep.folds.push_back(e);
    }
    rep.fold_count = static_cast<long>(rep.folds.size());

    rep.gamma_tilde = trace.y;
    for (long k = 0; k < K; ++k) {
        double eps = 0.0;
        for (const FoldEstimate& e : rep.folds)
            eps += e.s * recovery_epsilon0(k * T - e.tau, params);
        rep.gamma_tilde[k] += eps;
    }

    // Regime diagnostic: the sweep assumes one sample between folds.
    if (trace.ground_truth) {
        const auto& folds = trace.ground_truth->folds;
        for (std::size_t i = 0; i + 1 < folds.size(); ++i) {
            if (T >= folds[i + 1].tau - folds[i].tau - params.alpha) {
                rep.diagnostics.warnings.push_back(
                    "low-rate regime violated: T >= min fold gap - alpha");
                break;
            }
        }
    }

    finalize_report(rep, trace, params, N, omega, std::nullopt);
    return rep;
}

}  // namespace modhyst
