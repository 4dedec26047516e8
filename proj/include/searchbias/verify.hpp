#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "searchbias/errors.hpp"

namespace searchbias {

/// Knobs for the verification harness. Checks derive their generator state
/// from (seed, check-name hash), so reports are reproducible per seed and do
/// not depend on worker count or execution order.
struct VerifyConfig {
    std::uint64_t seed = 1;

    int enum_n = 10;         ///< exhaustive sweeps cover space sizes up to this (<= 12)
    long mc_samples = 20000; ///< draws per Monte Carlo check
    int trials = 10000;      ///< concentration-experiment trials
    int random_reps = 1000;  ///< random instances per grid point
    int ensembles = 200;     ///< random ensembles per ensemble-style check

    /// Run only checks whose name matches one of these (substring, or glob
    /// with '*'/'?'). Empty runs everything.
    std::vector<std::string> only;

    /// 0 = one worker per hardware thread; 1 = serial.
    int workers = 0;

    void validate() const;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    double observed = 0.0;
    double bound_or_expected = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct VerificationReport {
    std::vector<CheckResult> checks;  // sorted by name
    std::uint64_t seed = 0;
    std::int64_t elapsed_ms = 0;

    bool all_passed() const;
};

/// Names the default configuration reports, sorted.
std::vector<std::string> all_check_names();

/// Runs every (selected) check and assembles the report.
VerificationReport verify_all(const VerifyConfig& config);

std::string report_to_json(const VerificationReport& report);
std::string report_to_csv(const VerificationReport& report);

}  // namespace searchbias
