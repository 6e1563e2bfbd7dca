#include "modhyst/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "modhyst/errors.hpp"
#include "modhyst/metrics.hpp"
#include <json.hpp>

namespace modhyst {

namespace {
constexpr double kE = 2.71828182845904523536;
}

std::vector<double> filter_samples(std::span<const double> y, int N) {
    if (N < 1) throw std::invalid_argument("filter_samples: N must be >= 1");
    if (N > 60) throw std::invalid_argument("filter_samples: N too large");
    const long K = static_cast<long>(y.size());
    if (K < N + 2) throw std::invalid_argument("filter_samples: sequence too short");

    // Iterated first differences. Equal neighbors cancel exactly, so the
    // filtered residual is bit-zero wherever the underlying samples are
    // locally constant.
    std::vector<double> w(y.begin(), y.end());
    for (int r = 0; r < N; ++r) {
        const std::size_t len = w.size() - 1;
        for (std::size_t i = 0; i < len; ++i) w[i] = w[i + 1] - w[i];
        w.resize(len);
    }
    return w;  // w[i] == filtered value at filter index k = i + 1
}

double recovery_epsilon0(double t, const ModuloParams& params) {
    if (params.alpha <= 0.0) return t > 0.0 ? 2.0 * params.lambda_h() : 0.0;
    return epsilon0(t, params);
}

double detection_threshold(const ModuloParams& params, int N) {
    params.validate();
    if (N < 1) throw std::invalid_argument("detection_threshold: N must be >= 1");
    return params.lambda_h() / (2.0 * N);
}

std::vector<Cluster> detect_fold_clusters(const std::vector<double>& filtered, double threshold,
                                          int N) {
    if (!(threshold > 0.0))
        throw std::invalid_argument("detect_fold_clusters: threshold must be > 0");
    if (N < 1) throw std::invalid_argument("detect_fold_clusters: N must be >= 1");
    const long k_hi = static_cast<long>(filtered.size());
    std::vector<Cluster> out;
    long k = 1;
    while (k <= k_hi) {
        if (std::abs(filtered[k - 1]) >= threshold) {
            Cluster c;
            c.k_m = k;
            c.k_M = k;
            const long lim = std::min(c.k_m + N, k_hi);
            for (long j = c.k_m + 1; j <= lim; ++j)
                if (std::abs(filtered[j - 1]) >= threshold) c.k_M = j;
            out.push_back(c);
            k = c.k_M + 1;
        } else {
            ++k;
        }
    }
    return out;
}

FoldEstimate estimate_fold(const Cluster& cluster, const std::vector<double>& filtered,
                           const ModuloParams& params, int N, double T) {
    params.validate();
    const long k_hi = static_cast<long>(filtered.size());
    if (cluster.k_m < 1 || cluster.k_M > k_hi || cluster.k_m > cluster.k_M)
        throw std::invalid_argument("estimate_fold: cluster indices out of range");

    const double v_km = filtered[cluster.k_m - 1];
    if (v_km == 0.0)
        throw DegenerateClusterError("estimate_fold: filtered[k_m] == 0, sign undefined");

    FoldEstimate est;
    est.s = v_km < 0.0 ? +1 : -1;
    est.n = cluster.k_M - 1;

    const long width = cluster.k_M - cluster.k_m;
    const double two_lh = 2.0 * params.lambda_h();
    if (width == N && est.n >= 1) {
        est.kase = FoldCase::MidTransient;
        const double fn = filtered[est.n - 1];
        double beta = (fn + two_lh * est.s * (N - 1)) / (two_lh * est.s * N);
        beta = std::clamp(beta, 0.0, 1.0);
        est.beta = beta;
        est.tau = est.n * T - params.alpha * beta;
    } else {
        est.kase = FoldCase::EdgeOrPast;
        est.degenerate_width = (width != N - 1);
        est.tau = est.n * T;
    }
    return est;
}

ConditionCheck check_conditions(const ModuloParams& params, double T, double omega, double g_inf,
                                double eta_inf, int N) {
    params.validate();
    if (N < 1 || !(T > 0.0) || !(omega > 0.0) || !(g_inf > 0.0) || eta_inf < 0.0)
        throw std::invalid_argument("check_conditions: invalid arguments");
    ConditionCheck cc;
    cc.th1 = std::pow(T * omega * kE, N) * g_inf + std::pow(2.0, N) * eta_inf <=
             params.lambda_h() / (2.0 * N);
    cc.th2 = (N + 1) * T * omega * g_inf <= params.h_star();
    return cc;
}

std::optional<int> max_order(const ModuloParams& params, double T, double omega, double g_inf,
                             double eta_inf) {
    params.validate();
    if (!(T > 0.0 && omega > 0.0 && g_inf > 0.0) || eta_inf < 0.0)
        throw std::invalid_argument("max_order: invalid arguments");
    const double hs = params.h_star();
    const double lh = params.lambda_h();
    if (eta_inf == 0.0) {
        const double x = hs / (4.0 * kE * T * omega * g_inf) - 1.0;
        const long n = static_cast<long>(std::floor(x + 1e-12));
        if (n >= 1) return static_cast<int>(std::min<long>(n, 1 << 20));
        return std::nullopt;
    }
    if (eta_inf > lh / 8.0) return std::nullopt;
    const double x = hs / (8.0 * kE * T * omega * g_inf) - 1.0;
    const long n1 = static_cast<long>(std::floor(x + 1e-12));
    const long n2 = lemma4_f_inverse(lh / eta_inf);
    const long n = std::min(n1, n2);
    if (n >= 1) return static_cast<int>(n);
    return std::nullopt;
}

RecoveryReport reconstruct(const EncodedTrace& trace, const ModuloParams& params, int N,
                           double omega, std::optional<double> g_inf) {
    params.validate();
    if (N < 1) throw std::invalid_argument("reconstruct: N must be >= 1");
    const long K = static_cast<long>(trace.y.size());
    if (K < N + 2) throw std::invalid_argument("reconstruct: trace shorter than N + 2");

    RecoveryReport rep;
    rep.method = "threshold";
    rep.diagnostics.warnings = trace.warnings;

    const std::vector<double> filtered = filter_samples(trace.y, N);
    const long k_hi = static_cast<long>(filtered.size());
    const double theta = detection_threshold(params, N);
    const std::vector<Cluster> clusters = detect_fold_clusters(filtered, theta, N);

    for (const Cluster& c : clusters) {
        if (c.k_m <= 1 || c.k_m + N > k_hi) {
            rep.diagnostics.warnings.push_back("dropped boundary cluster at k_m=" +
                                               std::to_string(c.k_m));
            continue;
        }
        try {
            FoldEstimate est = estimate_fold(c, filtered, params, N, trace.T);
            if (est.degenerate_width)
                rep.diagnostics.warnings.push_back("cluster width outside {N-1, N} at k_m=" +
                                                   std::to_string(c.k_m));
            rep.folds.push_back(est);
        } catch (const DegenerateClusterError& e) {
            rep.diagnostics.warnings.push_back(e.what());
        }
    }

    // Estimates closer than N+1 samples violate the disjoint-support
    // hypothesis; their per-fold guarantees are void.
    for (std::size_t i = 0; i + 1 < rep.folds.size(); ++i) {
        if (rep.folds[i + 1].n - rep.folds[i].n <= N) {
            rep.folds[i].crowded = true;
            rep.folds[i + 1].crowded = true;
        }
    }
    for (const FoldEstimate& e : rep.folds)
        if (e.crowded) {
            rep.diagnostics.warnings.push_back("crowded fold estimates: separation <= N");
            break;
        }

    rep.fold_count = static_cast<long>(rep.folds.size());
    rep.gamma_tilde = trace.y;
    for (long k = 0; k < K; ++k) {
        double eps = 0.0;
        for (const FoldEstimate& e : rep.folds)
            eps += e.s * recovery_epsilon0(k * trace.T - e.tau, params);
        rep.gamma_tilde[k] += eps;
    }

    finalize_report(rep, trace, params, N, omega, g_inf);
    return rep;
}

void finalize_report(RecoveryReport& rep, const EncodedTrace& trace, const ModuloParams& params,
                     int N, std::optional<double> omega, std::optional<double> g_inf) {
    const long K = static_cast<long>(trace.y.size());

    if (!g_inf && trace.ground_truth) {
        double m = 0.0;
        for (double v : trace.ground_truth->gamma) m = std::max(m, std::abs(v));
        if (m > 0.0) g_inf = m;
    }
    if (omega && g_inf && N >= 1) {
        ConditionCheck cc = check_conditions(params, trace.T, *omega, *g_inf, trace.eta_inf, N);
        rep.diagnostics.th1 = cc.th1;
        rep.diagnostics.th2 = cc.th2;
    }

    if (!trace.ground_truth) return;
    const auto& gt = *trace.ground_truth;

    const std::size_t M = std::min(rep.gamma_tilde.size(), gt.gamma.size());
    if (M > 0) {
        std::span<const double> a(rep.gamma_tilde.data(), M);
        std::span<const double> b(gt.gamma.data(), M);
        rep.mse = mse(a, b);
        double energy = 0.0;
        for (double v : b) energy += v * v;
        if (energy > 0.0) rep.err_percent = err_percent(a, b);
    }

    if (!rep.folds.empty() && rep.folds.size() == gt.folds.size()) {
        std::vector<double> est_tau, true_tau;
        for (const FoldEstimate& e : rep.folds) est_tau.push_back(e.tau);
        for (const FoldEvent& e : gt.folds) true_tau.push_back(e.tau);
        rep.rmse_tau = rmse_fold_times(est_tau, true_tau);
    }

    if (N >= 1) {
        rep.bounds.prop1 = prop1_bound(params, N, static_cast<long>(gt.folds.size()), K);
        if (omega && g_inf) {
            const double hs = params.h_star();
            const double tg = trace.T * *omega * *g_inf;
            if (hs <= K * tg)
                rep.bounds.prop1_unknown_p =
                    prop1_bound_unknown_p(params, N, trace.T, *omega, *g_inf, K);
            if (8.0 * kE * tg <= hs && hs <= K * tg && trace.T >= 2.0 * params.alpha)
                rep.bounds.thm2 = thm2_bound(params, trace.T, *omega, *g_inf);
            if (16.0 * kE * tg <= hs && hs <= K * tg && trace.T >= 2.0 * params.alpha &&
                trace.eta_inf > 0.0 && trace.eta_inf <= params.lambda_h() / 8.0)
                rep.bounds.thm3 = thm3_bound(params, trace.T, *omega, *g_inf, trace.eta_inf);
        }
    }
}

std::string report_to_json(const RecoveryReport& rep) {
    nlohmann::json j;
    j["method"] = rep.method;
    j["gamma_tilde"] = rep.gamma_tilde;
    j["P"] = rep.fold_count;
    nlohmann::json folds = nlohmann::json::array();
    for (const FoldEstimate& e : rep.folds) {
        nlohmann::json f;
        f["n"] = e.n;
        f["s"] = e.s;
        f["tau"] = e.tau;
        if (e.beta)
            f["beta"] = *e.beta;
        else
            f["beta"] = nullptr;
        f["case"] = e.kase == FoldCase::MidTransient ? "mid_transient" : "edge_or_past";
        if (e.degenerate_width) f["degenerate_width"] = true;
        if (e.crowded) f["crowded"] = true;
        folds.push_back(std::move(f));
    }
    j["folds"] = std::move(folds);
    j["diagnostics"]["TH1"] = rep.diagnostics.th1 ? nlohmann::json(*rep.diagnostics.th1)
                                                  : nlohmann::json(nullptr);
    j["diagnostics"]["TH2"] = rep.diagnostics.th2 ? nlohmann::json(*rep.diagnostics.th2)
                                                  : nlohmann::json(nullptr);
    j["diagnostics"]["warnings"] = rep.diagnostics.warnings;
    auto put_opt = [&](const char* key, const std::optional<double>& v) {
        j[key] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    put_opt("mse", rep.mse);
    put_opt("err_percent", rep.err_percent);
    put_opt("rmse_tau", rep.rmse_tau);
    j["bounds"]["prop1"] = rep.bounds.prop1 ? nlohmann::json(*rep.bounds.prop1)
                                            : nlohmann::json(nullptr);
    j["bounds"]["prop1_unknown_p"] = rep.bounds.prop1_unknown_p
                                         ? nlohmann::json(*rep.bounds.prop1_unknown_p)
                                         : nlohmann::json(nullptr);
    j["bounds"]["thm2"] =
        rep.bounds.thm2 ? nlohmann::json(*rep.bounds.thm2) : nlohmann::json(nullptr);
    j["bounds"]["thm3"] =
        rep.bounds.thm3 ? nlohmann::json(*rep.bounds.thm3) : nlohmann::json(nullptr);
    if (rep.lambda_eff) j["lambda_eff"] = *rep.lambda_eff;
    return j.dump(2);
}

}  // namespace modhyst
