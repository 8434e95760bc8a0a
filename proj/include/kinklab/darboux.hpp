#pragma once

#include <string>
#include <vector>

#include "kinklab/grid.hpp"
#include "kinklab/profiles.hpp"
#include "kinklab/spectral.hpp"

namespace kinklab {

// grid step for the Darboux stage; the phi0 route carries an O(h^2) eigenvector error
inline constexpr double darboux_default_h = 0.01;

enum class RiccatiSource { from_phi0, from_ode };

// h0 = phi0'/phi0 on a half-line grid starting at 0
struct RiccatiSolution {
    Grid grid;
    Vec h0;
    Vec h0_prime;
    RiccatiSource source = RiccatiSource::from_ode;
    double mu0_sq = 0.0;
};

// centered differences of phi0; the Dirichlet end node is dropped
RiccatiSolution h0_from_phi0(const EigenPair& pair);

// RK4 on h' = mu0^2 + V - h^2, integrated from x_max down to 0 starting on the
// decaying branch h = -sqrt(mu0^2 + V); h(0) is then a consistency diagnostic
RiccatiSolution h0_riccati(double mu0_sq, const Grid& half);

// literal forward initial value problem h(0) = 0; unstable, diagnostics only.
// Integration stops with an error once |h| exceeds blowup.
RiccatiSolution h0_riccati_forward(double mu0_sq, const Grid& half, double blowup = 1e6);

// five-point derivative at interior nodes with x <= x_hi
double riccati_residual(const RiccatiSolution& sol, double x_hi);

// h0 extended oddly to the symmetric grid [-L, L]; a dropped end node is padded with its neighbour.
// The center node is set to 0, so the from_ode route carries a kink of size |h(0)| there.
Vec h0_full(const RiccatiSolution& sol, const Grid& full);

struct TransformedPotential {
    Grid grid;  // symmetric
    Vec v0;
    Vec v0_prime;
};

TransformedPotential transformed_potential(const RiccatiSolution& sol);

Vec u_apply(const Vec& u, const Grid& g, const Vec& h0);
Vec u_star_apply(const Vec& u, const Grid& g, const Vec& h0);

struct BoundCheck {
    std::string name;
    double lo = 0.0, hi = 0.0;
    double worst_margin = 0.0;
    double worst_location = 0.0;
    bool pass = false;
};

struct BoundAuditOptions {
    double audit_tol = 1e-6;
    double h0_shift = 0.0;  // negative controls
    bool informational = true;
};

// the five h0 inequalities plus convexity on (0, x0); informational extras follow
std::vector<BoundCheck> h0_bound_audit(const RiccatiSolution& sol, const RootTable& roots,
                                       const BoundAuditOptions& opt = {});

double mu_tilde(double mu0_sq);

// x -> -phi0(x)^-2 int_x^inf V' phi0^2, trapezoid on the eigenpair grid
double h0_prime_integral(const EigenPair& pair, double x);

}  // namespace kinklab
