#pragma once

#include "kinklab/grid.hpp"

namespace kinklab {

// smooth even plateau: 1 on |x| <= 1, 0 on |x| >= 2, logistic in between
double chi(double x);
double chi_prime(double x);
double chi_second(double x);

// zeta_A^2 = exp(-|alpha^-1(x)| (1 - chi(x)) / A)
double zeta_sq(double x, double A);
// zeta''/zeta - (zeta'/zeta)^2, closed form
double zeta_log_second(double x, double A);
double sigma_weight(double x, double A);
// chi(alpha^-1(x) / scale)
double chi_tilde(double x, double scale);

// phi_A(x) = int_0^x Q~ zeta_A^2 = int_0^{alpha^-1(x)} zeta_A^2(alpha(u)) du at each of the
// given alpha^-1 values (nondecreasing, >= 0); Gauss-Legendre on every gap
Vec phi_weight_cumulative(const Vec& s_sorted, double A);

struct VirialWeights {
    Grid grid;
    Vec zeta_a, phi_a, phi_a_prime, sigma_a, psi_ab, psi_ab_prime, chi_a, chi_b;
};

VirialWeights virial_weights(const Grid& g, double A, double B);

}  // namespace kinklab
