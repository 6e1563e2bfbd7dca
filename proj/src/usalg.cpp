#include "modhyst/usalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "modhyst/metrics.hpp"

namespace modhyst {

std::vector<double> usalg(std::span<const double> y, double lambda_eff, int N) {
    if (N < 1) throw std::invalid_argument("usalg: N must be >= 1");
    if (!(lambda_eff > 0.0)) throw std::invalid_argument("usalg: lambda_eff must be > 0");
    const long K = static_cast<long>(y.size());
    if (K < N + 1) throw std::invalid_argument("usalg: sequence too short");

    // Residual differences: M(Delta^N y) - Delta^N y lies on the 2*lambda_eff
    // grid by construction and equals Delta^N eps_gamma when the annihilation
    // identity holds.
    std::vector<double> w(y.begin(), y.end());
    for (int r = 0; r < N; ++r) {
        const std::size_t len = w.size() - 1;
        for (std::size_t i = 0; i < len; ++i) w[i] = w[i + 1] - w[i];
        w.resize(len);
    }
    for (double& v : w) v = ideal_modulo(v, lambda_eff) - v;

    const double grid = 2.0 * lambda_eff;
    for (int r = 0; r < N; ++r) {
        std::vector<double> acc(w.size() + 1);
        acc[0] = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) acc[i + 1] = acc[i] + w[i];
        // Re-center onto the residual grid, offset taken from the leading values.
        double head[4];
        std::size_t m = std::min<std::size_t>(4, acc.size());
        for (std::size_t i = 0; i < m; ++i) head[i] = acc[i];
        std::sort(head, head + m);
        double med = m % 2 ? head[m / 2] : 0.5 * (head[m / 2 - 1] + head[m / 2]);
        double offset = grid * std::round(med / grid);
        if (offset != 0.0)
            for (double& v : acc) v -= offset;
        w = std::move(acc);
    }

    std::vector<double> out(K - N);
    for (long k = 0; k < K - N; ++k) out[k] = y[k] + w[k];
    return out;
}

ThresholdSearch effective_threshold_search(const EncodedTrace& trace, int N, double grid_lo,
                                           double grid_hi, long grid_count) {
    if (!trace.ground_truth)
        throw std::invalid_argument("effective_threshold_search: trace has no ground truth");
    if (grid_count < 2)
        throw std::invalid_argument("effective_threshold_search: grid_count must be >= 2");
    if (!(grid_lo > 0.0) || grid_hi < grid_lo)
        throw std::invalid_argument("effective_threshold_search: bad grid");

    const auto& gamma = trace.ground_truth->gamma;
    const long K = static_cast<long>(trace.y.size());
    const long M = K - N;
    if (M < 1) throw std::invalid_argument("effective_threshold_search: trace too short");
    std::span<const double> ref(gamma.data(), M);

    double ref_energy = 0.0;
    for (double v : ref) ref_energy += v * v;
    ref_energy /= static_cast<double>(M);
    if (!(ref_energy > 0.0))
        throw std::invalid_argument("effective_threshold_search: zero-energy reference");

    ThresholdSearch result;
    result.curve.reserve(grid_count);
    double best_mse = 0.0;
    for (long i = 0; i < grid_count; ++i) {
        const double lam =
            grid_lo + (grid_hi - grid_lo) * static_cast<double>(i) / (grid_count - 1);
        std::vector<double> rec = usalg(trace.y, lam, N);
        const double m = mse(std::span<const double>(rec.data(), M), ref);
        result.curve.emplace_back(lam, 100.0 * m / ref_energy);
        if (i == 0 || m < best_mse) {
            best_mse = m;
            result.lambda_usalg = lam;
        }
    }
    result.err = 100.0 * best_mse / ref_energy;
    return result;
}

RecoveryReport recover_usalg(const EncodedTrace& trace, const ModuloParams& params, int N,
                             double lambda_eff, std::optional<double> omega) {
    RecoveryReport rep;
    rep.method = "usalg";
    rep.lambda_eff = lambda_eff;
    rep.diagnostics.warnings = trace.warnings;
    rep.gamma_tilde = usalg(trace.y, lambda_eff, N);
    finalize_report(rep, trace, params, N, omega, std::nullopt);
    return rep;
}

}  // namespace modhyst
