#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace antsel {

// One verification check: an independent oracle or invariant evaluated
// against the library, with a wall-clock budget.
struct CriterionResult {
    int id = 0;
    bool pass = false;
    std::string detail; // worst deviation and where it occurred
    double seconds = 0.0;
    double budget_seconds = 0.0;
};

// Run the numbered verification checks (1..9). Empty selection runs all of
// them. Progress lines go to `log` (nullptr silences). `workers` sizes the
// Monte Carlo thread pools; 0 picks the hardware count.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& which,
                                            std::FILE* log, int workers = 0);

} // namespace antsel
