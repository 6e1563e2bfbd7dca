#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace modhyst {

enum class SignalKind { SincSum, Sinusoid };

/// Bandlimited test input: either a finite sum of sinc atoms or a single
/// sinusoid, both bandlimited to `omega` rad/s. Plain value type, safe to
/// evaluate concurrently.
///
/// Sinc convention: sinc(u) = sin(pi u)/(pi u), atoms evaluated as
/// sinc(omega (t - c_i) / pi) so the stated bandwidth is exact.
struct BandlimitedSignal {
    SignalKind kind = SignalKind::SincSum;
    double omega = 1.0;            // rad/s, > 0
    std::vector<double> centers;   // SincSum only
    std::vector<double> coeffs;    // SincSum only, same length as centers
    double amp = 0.0;              // Sinusoid only
    double phase = 0.0;            // Sinusoid only, rad

    static BandlimitedSignal sinc_sum(double omega, std::vector<double> centers,
                                      std::vector<double> coeffs);
    static BandlimitedSignal sinusoid(double omega, double amp, double phase = 0.0);

    double eval(double t) const;

    /// Returns a copy with all amplitudes multiplied by `factor`.
    BandlimitedSignal scaled(double factor) const;

    /// Throws std::invalid_argument on a malformed description.
    void validate() const;
};

/// Sinc atoms at `t_start + i*spacing`, i = 0..n_centers-1, with coefficients
/// drawn i.i.d. uniform on [-amp_bound, amp_bound]. The generator is a fixed
/// 64-bit Mersenne stream with an explicit bit-to-double mapping, so the same
/// seed yields the same signal on every platform.
BandlimitedSignal generate_random_sinc(double omega, int n_centers, double t_start,
                                       double spacing, double amp_bound, std::uint64_t seed);

/// max |g(t)| over a uniform grid on [t_lo, t_hi], refined by local golden
/// section search around the grid maximizer. grid_step <= 0 selects the
/// default (pi/omega)/64.
double sup_norm(const BandlimitedSignal& signal, double t_lo, double t_hi,
                double grid_step = 0.0);

/// Bernstein bound on |g'|: omega * g_inf.
double derivative_sup_bound(double g_inf, double omega);

/// JSON description, e.g. {"kind":"sinc_sum","omega":...,"centers":[...],"coeffs":[...]}.
std::string signal_to_json(const BandlimitedSignal& signal);
BandlimitedSignal signal_from_json(const std::string& text);
BandlimitedSignal load_signal(const std::string& path);
void save_signal(const BandlimitedSignal& signal, const std::string& path);

}  // namespace modhyst
