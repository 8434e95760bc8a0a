#pragma once

#include <string>

#include "kinklab/grid.hpp"

namespace kinklab {

// Dirichlet stencil of -d^2/dx^2 + potential on interior nodes 1..n-2
struct OperatorStencil {
    Grid grid;
    Vec diag;
    double offdiag = 0.0;

    std::size_t size() const { return diag.size(); }
    // applies to a full-grid field; boundary values are treated as zero and left zero
    Vec apply(const Vec& u) const;
};

OperatorStencil assemble_l(const Grid& g);
OperatorStencil assemble_with_potential(const Grid& g, const Vec& potential);

// number of stencil eigenvalues strictly below sigma
std::size_t count_below(const OperatorStencil& st, double sigma);
// k-th smallest eigenvalue (k = 0 lowest) by Sturm bisection
double eigenvalue(const OperatorStencil& st, std::size_t k);

struct SpectralOptions {
    double eig_res_tol = 1e-6;
    double negative_cut = -1e-3;
};

struct EigenPair {
    Grid grid;
    double mu0_sq = 0.0;
    double mu0 = 0.0;
    Vec phi0;
    double residual = 0.0;
    std::size_t negative_count = 0;
};

EigenPair ground_state(const Grid& g, const SpectralOptions& opt = {});
EigenPair ground_state(const OperatorStencil& st, const SpectralOptions& opt = {});

struct TestFunctionCoefficients {
    double a4 = -0.0574167;
    double a2 = 0.115416;
    double a0 = -0.761391;
};
double test_function_c0(const TestFunctionCoefficients& c = {});
double test_function(double x, const TestFunctionCoefficients& c = {});

// quadrature of (f'^2 + V f^2) / quadrature of f^2, gradient on cell midpoints
double rayleigh_quotient(const Vec& f, const OperatorStencil& st);

struct DecayReport {
    double fitted_c0 = 0.0, fitted_c1 = 0.0, fitted_c2 = 0.0;
    double rate = 0.0;       // (sqrt 2 / 2) mu0
    double log_slope = 0.0;  // least-squares slope of log phi0 on [10, 30]
    double worst_derivative = 0.0;  // max phi0' over (0, x_max - 5)
    double worst_location = 0.0;
    bool monotone = false;
    bool bound_holds = false;
    bool pass = false;
    std::string detail;
};

DecayReport decay_audit(const EigenPair& pair);

}  // namespace kinklab
