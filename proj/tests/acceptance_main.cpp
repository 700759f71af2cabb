#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "antsel/acceptance.hpp"

// Runs the numbered verification checks and prints one pass/fail line per
// check. Exit code 3 when any selected check fails.
//   --criterion N   run check N only (repeatable; default: all)
//   --workers W     Monte Carlo worker threads (0: hardware count)
//   --quiet         suppress progress lines
int main(int argc, char** argv) {
    std::vector<int> which;
    int workers = 0;
    bool quiet = false;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--criterion" && i + 1 < argc) {
            int n = std::atoi(argv[++i]);
            if (n < 1 || n > 9) {
                std::fprintf(stderr, "check number must be 1..9, got %s\n",
                             argv[i]);
                return 1;
            }
            which.push_back(n);
        } else if (arg == "--workers" && i + 1 < argc) {
            workers = std::atoi(argv[++i]);
        } else if (arg == "--quiet") {
            quiet = true;
        } else {
            std::fprintf(stderr,
                         "usage: %s [--criterion N]... [--workers W] [--quiet]\n",
                         argv[0]);
            return 1;
        }
    }

    std::vector<antsel::CriterionResult> results =
        antsel::run_acceptance(which, quiet ? nullptr : stderr, workers);

    bool ok = true;
    for (const antsel::CriterionResult& r : results) {
        std::printf("criterion %d: %s  %s  (%.1fs / %.0fs)\n", r.id,
                    r.pass ? "PASS" : "FAIL", r.detail.c_str(), r.seconds,
                    r.budget_seconds);
        ok = ok && r.pass;
    }
    std::fflush(stdout);
    return ok ? 0 : 3;
}
