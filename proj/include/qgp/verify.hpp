#pragma once

#include <string>
#include <vector>

namespace qgp {

struct CheckResult {
    std::string id;
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Runs the acceptance fixture suite.  `filter` keeps checks whose id or name
/// contains the substring; `tol_scale` multiplies every tolerance.
std::vector<CheckResult> run_acceptance(const std::string& filter = "", double tol_scale = 1.0,
                                        int threads = 0);

}  // namespace qgp
