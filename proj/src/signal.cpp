#include "modhyst/signal.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "modhyst/errors.hpp"
#include <json.hpp>

namespace modhyst {

namespace {

// sin(x)/x with the removable singularity filled in. The series branch keeps
// full precision for |x| below the switchover.
double sinc_rad(double x) {
    if (std::abs(x) < 1e-8) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

// Map a 64-bit word to [0,1) using the top 53 bits. Avoids
// uniform_real_distribution, whose output is implementation-defined.
double unit_double(std::uint64_t word) {
    return static_cast<double>(word >> 11) * 0x1.0p-53;
}

}  // namespace

BandlimitedSignal BandlimitedSignal::sinc_sum(double omega, std::vector<double> centers,
                                              std::vector<double> coeffs) {
    BandlimitedSignal s;
    s.kind = SignalKind::SincSum;
    s.omega = omega;
    s.centers = std::move(centers);
    s.coeffs = std::move(coeffs);
    s.validate();
    return s;
}

BandlimitedSignal BandlimitedSignal::sinusoid(double omega, double amp, double phase) {
    BandlimitedSignal s;
    s.kind = SignalKind::Sinusoid;
    s.omega = omega;
    s.amp = amp;
    s.phase = phase;
    s.validate();
    return s;
}

void BandlimitedSignal::validate() const {
    if (!(omega > 0.0)) throw std::invalid_argument("signal: omega must be > 0");
    if (kind == SignalKind::SincSum) {
        if (centers.empty() || centers.size() != coeffs.size())
            throw std::invalid_argument("signal: centers and coeffs must have equal length >= 1");
    }
}

double BandlimitedSignal::eval(double t) const {
    if (kind == SignalKind::Sinusoid) return amp * std::sin(omega * t + phase);
    double acc = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i)
        acc += coeffs[i] * sinc_rad(omega * (t - centers[i]));
    return acc;
}

BandlimitedSignal BandlimitedSignal::scaled(double factor) const {
    BandlimitedSignal s = *this;
    if (s.kind == SignalKind::Sinusoid) {
        s.amp *= factor;
    } else {
        for (double& c : s.coeffs) c *= factor;
    }
    return s;
}

BandlimitedSignal generate_random_sinc(double omega, int n_centers, double t_start,
                                       double spacing, double amp_bound, std::uint64_t seed) {
    if (!(omega > 0.0)) throw std::invalid_argument("generate_random_sinc: omega must be > 0");
    if (n_centers < 1) throw std::invalid_argument("generate_random_sinc: n_centers must be >= 1");
    if (!(amp_bound >= 0.0))
        throw std::invalid_argument("generate_random_sinc: amp_bound must be >= 0");

    std::vector<double> centers(n_centers), coeffs(n_centers);
    std::mt19937_64 gen(seed);
    for (int i = 0; i < n_centers; ++i) {
        centers[i] = t_start + i * spacing;
        coeffs[i] = (2.0 * unit_double(gen()) - 1.0) * amp_bound;
    }
    return BandlimitedSignal::sinc_sum(omega, std::move(centers), std::move(coeffs));
}

double sup_norm(const BandlimitedSignal& signal, double t_lo, double t_hi, double grid_step) {
    signal.validate();
    if (!(t_lo < t_hi)) throw std::invalid_argument("sup_norm: empty window");
    const double pi = 3.14159265358979323846;
    double step = grid_step > 0.0 ? grid_step : (pi / signal.omega) / 64.0;

    auto mag = [&](double t) { return std::abs(signal.eval(t)); };

    long n = static_cast<long>(std::ceil((t_hi - t_lo) / step));
    double best_t = t_lo, best = mag(t_lo);
    for (long i = 1; i <= n; ++i) {
        double t = (i == n) ? t_hi : t_lo + i * step;
        double v = mag(t);
        if (v > best) {
            best = v;
            best_t = t;
        }
    }

    // Golden-section refinement one grid cell around the grid maximizer.
    const double gr = 0.6180339887498949;
    double a = std::max(t_lo, best_t - step);
    double b = std::min(t_hi, best_t + step);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = mag(x1), f2 = mag(x2);
    for (int it = 0; it < 90 && (b - a) > 1e-15 * std::max(1.0, std::abs(b)); ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = mag(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = mag(x1);
        }
    }
    return std::max(best, std::max(f1, f2));
}

double derivative_sup_bound(double g_inf, double omega) {
    if (g_inf < 0.0) throw std::invalid_argument("derivative_sup_bound: g_inf must be >= 0");
    if (!(omega > 0.0)) throw std::invalid_argument("derivative_sup_bound: omega must be > 0");
    return omega * g_inf;
}

std::string signal_to_json(const BandlimitedSignal& signal) {
    nlohmann::json j;
    j["omega"] = signal.omega;
    if (signal.kind == SignalKind::SincSum) {
        j["kind"] = "sinc_sum";
        j["centers"] = signal.centers;
        j["coeffs"] = signal.coeffs;
    } else {
        j["kind"] = "sinusoid";
        j["amp"] = signal.amp;
        j["phase"] = signal.phase;
    }
    return j.dump(2);
}

BandlimitedSignal signal_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("signal JSON: ") + e.what());
    }
    const std::string kind = j.value("kind", "");
    if (kind == "sinc_sum") {
        return BandlimitedSignal::sinc_sum(j.at("omega").get<double>(),
                                           j.at("centers").get<std::vector<double>>(),
                                           j.at("coeffs").get<std::vector<double>>());
    }
    if (kind == "sinusoid") {
        return BandlimitedSignal::sinusoid(j.at("omega").get<double>(), j.at("amp").get<double>(),
                                           j.value("phase", 0.0));
    }
    throw ParseError("signal JSON: unknown kind '" + kind + "'");
}

BandlimitedSignal load_signal(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open signal file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return signal_from_json(ss.str());
}

void save_signal(const BandlimitedSignal& signal, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write signal file: " + path);
    out << signal_to_json(signal) << "\n";
}

}  // namespace modhyst
