#include "modhyst/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace modhyst {

namespace {

constexpr double kPi = 3.14159265358979323846;

double unit_double(std::uint64_t word) {
    return static_cast<double>(word >> 11) * 0x1.0p-53;
}

struct Crossing {
    double tau;     // refined event time
    double resume;  // point strictly on the exit side, resume scanning here
    double level;   // level that was hit
    int direction;  // +1 if g crossed upward
};

// Bisection on f(t) = g(t) - level over a bracket [a, b] where the sign of f
// changes (f(b) == 0 counts as a crossing at b).
Crossing refine_crossing(const BandlimitedSignal& g, double level, double a, double fa, double b,
                         double fb, double tol) {
    int dir = fa < 0.0 ? +1 : -1;
    double lo = a, hi = b;
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        double fm = g.eval(mid) - level;
        bool same_side = (fm > 0.0 && fa > 0.0) || (fm < 0.0 && fa < 0.0);
        if (same_side)
            lo = mid;
        else
            hi = mid;
    }
    (void)fb;
    return Crossing{0.5 * (lo + hi), hi, level, dir};
}

bool bracketed(double fa, double fb) {
    return (fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0) || fb == 0.0;
}

}  // namespace

void ModuloParams::validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("ModuloParams: lambda must be > 0");
    if (!(h >= 0.0 && h < 2.0 * lambda))
        throw std::invalid_argument("ModuloParams: h must lie in [0, 2*lambda)");
    if (!(alpha >= 0.0)) throw std::invalid_argument("ModuloParams: alpha must be >= 0");
}

double ideal_modulo(double x, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("ideal_modulo: lambda must be > 0");
    double u = x / (2.0 * lambda) + 0.5;
    double frac = u - std::floor(u);
    return 2.0 * lambda * (frac - 0.5);
}

double epsilon0(double t, const ModuloParams& params) {
    const double step = 2.0 * params.lambda_h();
    if (t < 0.0) return 0.0;
    if (params.alpha <= 0.0 || t >= params.alpha) return step;
    return step * (t / params.alpha);
}

double residual(double t, std::span<const FoldEvent> folds, const ModuloParams& params) {
    double acc = 0.0;
    for (const FoldEvent& e : folds) {
        if (t < e.tau) break;  // folds sorted, later ones contribute 0
        acc += e.s * epsilon0(t - e.tau, params);
    }
    return acc;
}

FoldScan find_folds(const BandlimitedSignal& g, const ModuloParams& params, double t_lo,
                    double t_hi, double scan_step, double tol) {
    g.validate();
    params.validate();
    if (!(t_lo < t_hi)) throw std::invalid_argument("find_folds: empty window");

    const double nyq = kPi / g.omega;
    if (scan_step <= 0.0) scan_step = nyq / 64.0;
    if (scan_step > nyq / 8.0 * (1.0 + 1e-12))
        throw std::invalid_argument("find_folds: scan_step must be <= (pi/omega)/8");
    if (tol <= 0.0) tol = 1e-12 * std::max({1.0, std::abs(t_lo), std::abs(t_hi)});

    const double lambda = params.lambda;
    const double h = params.h;
    const double sub = scan_step / 4.0;

    FoldScan out;
    bool have_fold = false;
    double level = 0.0;  // g at the last fold, exact target value
    int s_last = +1;
    const double g_start = g.eval(t_lo);

    double t = t_lo;
    double g_t = g_start;
    long iter_guard = 0;
    const long max_iters = static_cast<long>((t_hi - t_lo) / sub) + 4'000'000;

    while (t < t_hi) {
        if (++iter_guard > max_iters) throw std::runtime_error("find_folds: scan did not terminate");
        const double t2 = std::min(t + sub, t_hi);
        const double g_t2 = g.eval(t2);

        // Candidate target levels for this cell.
        double cand_level[8];
        int cand_sign[8];  // fold sign if this level fires; 0 = derive from data
        int n_cand = 0;
        if (!have_fold) {
            // Any odd multiple of lambda between the endpoint values.
            double vmin = std::min(g_t, g_t2), vmax = std::max(g_t, g_t2);
            long m_lo = static_cast<long>(std::ceil((vmin / lambda - 1.0) / 2.0));
            long m_hi = static_cast<long>(std::floor((vmax / lambda - 1.0) / 2.0));
            for (long m = m_lo; m <= m_hi && n_cand < 8; ++m) {
                cand_level[n_cand] = (2.0 * m + 1.0) * lambda;
                cand_sign[n_cand] = 0;
                ++n_cand;
            }
        } else {
            cand_level[0] = level + s_last * (2.0 * lambda - h);
            cand_sign[0] = s_last;
            cand_level[1] = level - s_last * h;
            cand_sign[1] = -s_last;
            n_cand = 2;
        }

        // Earliest bracketed crossing wins.
        bool found = false;
        Crossing best{};
        int best_sign = 0;
        for (int i = 0; i < n_cand; ++i) {
            double fa = g_t - cand_level[i];
            double fb = g_t2 - cand_level[i];
            if (fa == 0.0) continue;  // sitting exactly on the level, wait for departure
            if (!bracketed(fa, fb)) continue;
            Crossing c = refine_crossing(g, cand_level[i], t, fa, t2, fb, tol);
            if (!found || c.tau < best.tau) {
                found = true;
                best = c;
                best_sign = cand_sign[i];
            }
        }

        if (!found) {
            t = t2;
            g_t = g_t2;
            continue;
        }

        int s;
        if (best_sign != 0) {
            s = best_sign;
        } else {
            double diff = best.level - g_start;  // sign(g(tau_1) - g(tau_0))
            s = diff > 0.0 ? +1 : (diff < 0.0 ? -1 : best.direction);
        }
        if (!out.events.empty() && best.tau - out.events.back().tau <= params.alpha)
            out.overlap_warning = true;
        out.events.push_back(FoldEvent{best.tau, s});
        have_fold = true;
        level = best.level;
        s_last = s;
        t = best.resume;
        g_t = g.eval(t);
    }
    return out;
}

EncodedTrace encode_and_sample(const BandlimitedSignal& g, const ModuloParams& params, double T,
                               long K, double t0, const NoiseSpec& noise) {
    g.validate();
    params.validate();
    if (!(T > 0.0)) throw std::invalid_argument("encode_and_sample: T must be > 0");
    if (K < 1) throw std::invalid_argument("encode_and_sample: K must be >= 1");
    if (!(noise.eta_inf >= 0.0))
        throw std::invalid_argument("encode_and_sample: eta_inf must be >= 0");

    EncodedTrace tr;
    tr.T = T;
    tr.eta_inf = noise.eta_inf;

    FoldScan scan;
    if (K > 1) scan = find_folds(g, params, t0, t0 + (K - 1) * T);
    if (scan.overlap_warning)
        tr.warnings.push_back("overlapping transients: tau_{p+1} - tau_p <= alpha");
    if (T < params.alpha)
        tr.warnings.push_back("T < alpha: multiple samples may land on one transient");

    EncodedTrace::GroundTruth gt;
    gt.params = params;
    gt.folds.reserve(scan.events.size());
    for (const FoldEvent& e : scan.events) gt.folds.push_back(FoldEvent{e.tau - t0, e.s});

    gt.gamma.resize(K);
    tr.y.resize(K);
    std::mt19937_64 gen(noise.seed);
    for (long k = 0; k < K; ++k) {
        gt.gamma[k] = g.eval(t0 + k * T);
        double eps = residual(k * T, gt.folds, params);
        double eta = noise.eta_inf > 0.0 ? (2.0 * unit_double(gen()) - 1.0) * noise.eta_inf : 0.0;
        tr.y[k] = gt.gamma[k] - eps + eta;
    }
    tr.ground_truth = std::move(gt);
    return tr;
}

long min_fold_separation_bound(const ModuloParams& params, double omega, double g_inf, double T) {
    params.validate();
    if (!(T > 0.0 && omega > 0.0 && g_inf > 0.0))
        throw std::invalid_argument("min_fold_separation_bound: T, omega, g_inf must be > 0");
    return static_cast<long>(std::floor(params.h_star() / (T * omega * g_inf)));
}

long discrete_fold_index(double tau, double T) {
    return static_cast<long>(std::ceil(tau / T - 1e-9));
}

}  // namespace modhyst
