// SPDX-License-Identifier: Apache-2.0
//
// Fast self-checks of the numerical core, run by `mra validate`.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mra {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

std::vector<CheckResult> run_self_checks();

/// Prints one PASS/FAIL line per check; returns 0 if all pass, 3 otherwise.
int cmd_validate(std::ostream& out);

}  // namespace mra
