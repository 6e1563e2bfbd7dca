#include "modhyst/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace modhyst {

namespace {
constexpr double kE = 2.71828182845904523536;
}

double mse(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("mse: sequences must have equal length >= 1");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.size());
}

double err_percent(std::span<const double> gamma_tilde, std::span<const double> gamma) {
    double ref = 0.0;
    for (double v : gamma) ref += v * v;
    if (!(ref > 0.0)) throw std::invalid_argument("err_percent: zero-energy reference");
    ref /= static_cast<double>(gamma.size());
    return 100.0 * mse(gamma_tilde, gamma) / ref;
}

double rmse_fold_times(std::span<const double> tau_tilde, std::span<const double> tau) {
    if (tau_tilde.size() != tau.size() || tau.empty())
        throw std::invalid_argument("rmse_fold_times: fold count mismatch");
    return std::sqrt(mse(tau_tilde, tau));
}

double prop1_bound(const ModuloParams& params, int N, long P, long K) {
    params.validate();
    if (N < 1) throw std::invalid_argument("prop1_bound: N must be >= 1");
    if (K < 1) throw std::invalid_argument("prop1_bound: K must be >= 1");
    if (P < 0) throw std::invalid_argument("prop1_bound: P must be >= 0");
    const double lh = params.lambda_h();
    return (lh * lh) / (static_cast<double>(N) * N) * (static_cast<double>(P) / K);
}

double prop1_bound_unknown_p(const ModuloParams& params, int N, double T, double omega,
                             double g_inf, long K) {
    params.validate();
    if (N < 1) throw std::invalid_argument("prop1_bound_unknown_p: N must be >= 1");
    const double hs = params.h_star();
    if (!(hs <= K * T * omega * g_inf))
        throw std::invalid_argument("prop1_bound_unknown_p: requires h* <= K T omega g_inf");
    const double lh = params.lambda_h();
    return (lh * lh) / (static_cast<double>(N) * N) * (2.0 * T * omega * g_inf / hs);
}

double thm2_bound(const ModuloParams& params, double T, double omega, double g_inf) {
    params.validate();
    const double lh = params.lambda_h();
    const double r = omega * g_inf / params.h_star();
    const double c = 2.0 * (16.0 * kE * lh) * (16.0 * kE * lh) * r * r * r;
    return c * T * T * T;
}

double thm3_bound(const ModuloParams& params, double T, double omega, double g_inf,
                  double eta_inf) {
    params.validate();
    const double lh = params.lambda_h();
    if (!(eta_inf > 0.0 && eta_inf <= lh / 8.0))
        throw std::invalid_argument("thm3_bound: requires 0 < eta_inf <= lambda_h/8");
    const double r = omega * g_inf / params.h_star();
    const double c = 2.0 * (32.0 * kE * lh) * (32.0 * kE * lh) * r * r * r;
    const double finv = static_cast<double>(lemma4_f_inverse(lh / eta_inf));
    const double c_eta = 8.0 * lh * lh / (finv * finv) * r;
    return std::max(c * T * T * T, c_eta * T);
}

double lemma4_f(double x) { return x * std::pow(2.0, x + 2.0); }

long lemma4_f_inverse(double target) {
    if (!(target >= lemma4_f(1.0))) return 0;
    long n = 1;
    while (n < 4000 && lemma4_f(static_cast<double>(n + 1)) <= target) ++n;
    return n;
}

}  // namespace modhyst
