#pragma once

#include <optional>
#include <span>

#include "modhyst/encoder.hpp"

namespace modhyst {

double mse(std::span<const double> a, std::span<const double> b);

/// 100 * MSE(gamma_tilde, gamma) / MSE(gamma, 0), in percent.
double err_percent(std::span<const double> gamma_tilde, std::span<const double> gamma);

double rmse_fold_times(std::span<const double> tau_tilde, std::span<const double> tau);

/// MSE bound (lambda_h^2/N^2) * (P/K) for a known fold count.
double prop1_bound(const ModuloParams& params, int N, long P, long K);

/// Unknown-P variant (lambda_h^2/N^2) * (2 T omega g_inf / h*); requires
/// h* <= K T omega g_inf.
double prop1_bound_unknown_p(const ModuloParams& params, int N, double T, double omega,
                             double g_inf, long K);

/// Noiseless cubic bound C T^3 with C = 2 (16 e lambda_h)^2 (omega g_inf / h*)^3.
double thm2_bound(const ModuloParams& params, double T, double omega, double g_inf);

/// Noisy bound max{C T^3, C_eta T}; requires eta_inf <= lambda_h/8.
double thm3_bound(const ModuloParams& params, double T, double omega, double g_inf,
                  double eta_inf);

/// f(x) = x 2^(x+2), strictly increasing on the positive axis.
double lemma4_f(double x);

/// Largest integer n >= 1 with f(n) <= target, or 0 when even f(1) exceeds it.
long lemma4_f_inverse(double target);

}  // namespace modhyst
