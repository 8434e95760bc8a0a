#pragma once

#include <string>
#include <vector>

#include "kinklab/dynamics.hpp"

namespace kinklab {

struct CheckLine {
    std::string name;
    double measured = 0.0;
    double target = 0.0;
    double tol = 0.0;
    bool pass = false;
};

struct Criterion {
    int id = 0;
    std::string title;
    std::vector<CheckLine> checks;
    double seconds = 0.0;
    bool pass() const;
    // names of failing checks, comma separated
    std::string failures() const;
};

struct AcceptanceOptions {
    int audit_samples = 100000;
    double shoot_eps = 1e-3;
    unsigned threads = 0;
};

inline constexpr int criterion_count = 13;

// runs one criterion (1..13); throws std::out_of_range for other ids
Criterion run_criterion(int id, const AcceptanceOptions& opt = {});
std::vector<Criterion> run_acceptance(const AcceptanceOptions& opt = {});

// criterion 12 graded on an existing shooting result
Criterion shooting_criterion(const ShootResult& r, const SimConfig& cfg);

}  // namespace kinklab
