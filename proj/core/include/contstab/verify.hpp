#pragma once

#include <limits>
#include <string>
#include <vector>

namespace contstab {

struct CheckResult {
    std::string name;
    bool pass;
    std::string detail;
};

struct VerifyOptions {
    int nodes = 256;              // Nystrom resolution for spectrum checks
    double sum_scan_alpha = 2.0;  // switchover-sum harness rates
    double sum_scan_beta = 1.0;
    // When set (not NaN), overrides the closed-form slope target of the
    // annulus sweep check; exists as a negative control so a tampered
    // target demonstrably fails the suite.
    double forced_slope_target = std::numeric_limits<double>::quiet_NaN();
    int threads = 1;
};

/// Runs every module invariant at the shipped default configuration and
/// returns one result per named check.
std::vector<CheckResult> run_verification(const VerifyOptions& opt);

} // namespace contstab
