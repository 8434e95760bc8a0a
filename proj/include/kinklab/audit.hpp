#pragma once

#include <string>
#include <vector>

#include "kinklab/darboux.hpp"
#include "kinklab/profiles.hpp"

namespace kinklab {

struct AuditReport {
    std::string name;
    std::string variable;  // "s" or "x"
    std::string claim;     // positive, below(-c), sandwiched, ...
    double lo = 0.0, hi = 0.0;
    int samples = 0;
    bool pass = false;
    bool informational = false;  // reported, not part of the verdict
    double worst_value = 0.0;
    double worst_location = 0.0;
    double margin = 0.0;
    double fitted = 0.0;  // fitted constant where the claim has one, else 0
    std::string note;
};

struct AuditOptions {
    int samples = 1000;
    double audit_tol = 1e-6;
    double shrink = 1e-6;
    double s_max = 50.0;
    double m_const = 0.808;  // lower bound for mu0 in the (g) functions; negative control hook
    double A = 20.0;
    std::vector<double> B = {10.0, 100.0, 1000.0};
    double x_cap = 50.0;  // upper end for checks on the h0 grid
};

struct AuditInputs {
    double mu0_sq = 0.0;
    RootTable roots;
    RiccatiSolution h0;  // from_ode route on a half-line grid
};

// sorted by name
std::vector<AuditReport> audit_all(const AuditInputs& in, const AuditOptions& opt = {});

bool audit_passed(const std::vector<AuditReport>& reports);

}  // namespace kinklab
