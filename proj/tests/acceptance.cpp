#include <cstdio>
#include <cstdlib>
#include <string>

#include "kinklab/acceptance.hpp"

// usage: acceptance [id ...]; no ids runs all thirteen
int main(int argc, char** argv) {
    using namespace kinklab;
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
    if (ids.empty())
        for (int id = 1; id <= criterion_count; ++id) ids.push_back(id);
    int failed = 0;
    for (int id : ids) {
        Criterion c;
        try {
            c = run_criterion(id);
        } catch (const std::exception& e) {
            std::printf("criterion %2d: FAIL  error: %s\n", id, e.what());
            ++failed;
            continue;
        }
        if (c.pass()) {
            std::printf("criterion %2d: PASS  %s (%.1f s)\n", id, c.title.c_str(), c.seconds);
        } else {
            ++failed;
            std::printf("criterion %2d: FAIL  %s (%.1f s) [%s]\n", id, c.title.c_str(), c.seconds, c.failures().c_str());
        }
        for (const auto& l : c.checks)
            std::printf("    %-4s %-45s measured %.10g  target %.10g  tol %.3g\n", l.pass ? "ok" : "FAIL",
                        l.name.c_str(), l.measured, l.target, l.tol);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, ids.size());
    return failed == 0 ? 0 : 1;
}
