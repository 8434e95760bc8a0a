#pragma once

#include <cstdint>

#include "kinklab/grid.hpp"
#include "kinklab/profiles.hpp"
#include "kinklab/spectral.hpp"

namespace kinklab {

// beta(x) = 3x + 2 alpha^-1(x), odd
double beta(double x);
// second zero-energy solution (3x + 2 alpha^-1(x)) H~(x) - 4, even
double h_hat(double x);

// -u'' - (2/3) Q~^3 u at interior nodes; end values are 0
Vec l_tilde_apply(const Vec& u, const Grid& g);

struct ResonanceOptions {
    double claim_tol = 1e-4;
    double wronskian_factor = 10.0;  // drift tolerance in units of h^2
};

struct ResonanceBundle {
    Grid grid;
    Vec h_hat;
    Vec phi1;
    Vec g;                              // int_0^|x| phi0 Hhat
    double inner_phi1_phi0 = 0.0;       // direct quadrature
    double inner_phi1_phi0_alt = 0.0;   // (4/3) int_0^inf phi0 H~ g
    double half_line_integral = 0.0;
    double tail_correction = 0.0;       // added to int_x^inf phi0 H~ at x_max
    double wronskian_dev = 0.0;
    double residual = 0.0;              // max |L~ phi1 - phi0| on |x| <= x_max - 10
    double phi1_at_0 = 0.0;             // unit-norm phi0
    double phi1_at_0_peak = 0.0;        // phi0 scaled to phi0(0) = 1
    double g_max = 0.0;                 // max of g over x > 0
    double g_sign_change = 0.0;         // first x > 0 with g >= 0, NaN if none
    double phi1_far = 0.0;              // phi1 at x_max - 10
};

// throws std::runtime_error when the Wronskian drifts past wronskian_factor * h^2
ResonanceBundle build_phi1(const EigenPair& pair, const ResonanceOptions& opt = {});

struct QuadraticFormSurvey {
    int samples = 0;
    double min_ratio = 0.0;  // min <L~u,u> / |u|^2_{H0}
    double max_projection = 0.0;
};

// random localized fields projected off phi0, and off Q~^2 H~^3 when coercive is set
QuadraticFormSurvey quadratic_form_survey(const EigenPair& pair, int samples, std::uint64_t seed, bool coercive);

// |u|^2_{H0} = int u'^2 + int Q~^2 u^2
double h0_norm_sq(const Grid& g, const Vec& u);

}  // namespace kinklab
