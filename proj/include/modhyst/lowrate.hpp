#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "modhyst/recovery.hpp"

namespace modhyst {

/// Start of the first run of N consecutive filter indices with
/// |filtered[k]| < threshold, or nullopt when no such run exists.
std::optional<long> find_anchor(const std::vector<double>& filtered, double threshold, int N);

/// Test hook: the forward sweep's final corrected filtered sequence and the
/// kernel subtractions it applied, recorded when the anchor sits at the
/// start (forward_only).
struct LowrateDetails {
    bool forward_only = false;
    std::vector<double> corrected;
    std::vector<std::pair<long, double>> subtractions;  // (kernel position m, lead value removed)
};

/// Low sampling rate recovery: a single left-to-right pass over the filtered
/// sequence that classifies each corrected value as quiet, transient sample,
/// or full fold, subtracting each detected kernel as it goes. Needs one run
/// of N unfolded samples as an anchor; when the anchor is interior the part
/// left of it is handled by the same sweep on the index-reversed trace.
/// Requires only one sample between consecutive folds rather than N.
///
/// Throws RecoveryError when no anchor exists.
RecoveryReport reconstruct_lowrate(const EncodedTrace& trace, const ModuloParams& params, int N,
                                   double theta_beta, std::optional<double> omega = std::nullopt,
                                   LowrateDetails* details = nullptr);

}  // namespace modhyst
