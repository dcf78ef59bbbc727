// Prints one PASS/FAIL line per acceptance criterion; exits nonzero on any failure.
#include <cstdio>

#include "qsl/acceptance.hpp"

int main() {
    bool all = true;
    qsl::acceptance::run_suite(0, [&](const qsl::acceptance::CriterionResult& r) {
        all = all && r.ok();
        std::printf("%s criterion %d: %s (%.3f s%s)\n", r.ok() ? "PASS" : "FAIL", r.id, r.title.c_str(), r.seconds,
                    r.within_time ? "" : ", over time limit");
        std::printf("    %s\n", r.metrics.dump().c_str());
        std::fflush(stdout);
    });
    return all ? 0 : 1;
}
