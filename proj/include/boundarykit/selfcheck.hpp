#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bk {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail; // worst-case errors, counts
};

/// Runs the embedded verification suite: forward-warp oracle, gradient and
/// adjointness checks, identity compositions, erosion and paste contracts,
/// frozen loss values, metric arithmetic and the distance-transform oracle.
/// Deterministic; finishes in well under a minute.
std::vector<CheckResult> run_selfcheck();

bool all_passed(const std::vector<CheckResult>& results);

struct GradcheckSummary {
    double worst_rel_features = 0.0;
    double worst_rel_disp = 0.0;
    double worst_adjoint = 0.0;
    int instances = 0;
    bool passed = false;
};

/// Compares analytic warp gradients against central finite differences of
/// the double-precision scalar loss, on seeded random instances whose sample
/// coordinates keep clear of the integer lattice (where the bilinear kernel
/// has kinks). Relative error is |a-f| / max(1, |a|, |f|).
GradcheckSummary run_warp_gradcheck(std::uint64_t seed, double eps, double tol,
                                    int instances = 5);

} // namespace bk
