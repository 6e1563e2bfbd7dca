#pragma once

#include <optional>
#include <span>
#include <string>

#include "modhyst/encoder.hpp"

namespace modhyst {

/// Trace CSV: header `k,t,y[,gamma]`, LF line endings, '.' decimal point,
/// 17 significant digits (doubles round-trip exactly). t = k*T.
void save_trace_csv(const EncodedTrace& trace, const std::string& path);

/// Metadata sidecar: {T, lambda, h, alpha, eta_inf, omega, folds:[{tau,s}]}.
void save_trace_meta(const EncodedTrace& trace, std::optional<double> omega,
                     const std::string& path);

struct IngestResult {
    EncodedTrace trace;  // no ground truth
    ModuloParams params;
    bool params_estimated = false;  // true when estimated from the samples
    std::optional<double> omega;    // from the sidecar, when given
};

/// Reads a trace CSV (either the trace format above or a bare two-column
/// `t,y`). Parameters come from the sidecar when `meta_path` is given,
/// otherwise they are estimated from the samples. T is taken from the
/// sidecar, the time column, or `T_hint`, in that order of preference.
IngestResult ingest_trace(const std::string& csv_path, const std::string& meta_path = "",
                          double T_hint = 0.0);

/// Closed-form parameter estimators: lambda from the sample range, lambda_h
/// from the median inter-sample jump, alpha from the ramp rate of jump
/// events holding at least two interior samples. Needs >= 2 jump events.
ModuloParams estimate_params(std::span<const double> y, double T);

}  // namespace modhyst
