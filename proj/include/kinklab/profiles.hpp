#pragma once

#include "kinklab/grid.hpp"

namespace kinklab {

struct ProfileTolerances {
    double root_tol = 1e-12;
    double parity_tol = 1e-10;
};

// s-variable soliton and kink
double q_of_s(double s);
double h_of_s(double s);
// 1 - H(s) without cancellation
double one_minus_h_of_s(double s);

double alpha(double y);
double alpha_prime(double y);
double alpha_inv(double x, double root_tol = 1e-12);

double q_tilde(double x);
double h_tilde(double x);

// V, V', V'' written in terms of (Q~, H~)
double v_of_qh(double q);
double v1_of_qh(double q, double h);
double v2_of_qh(double q);

double potential_v(double x);
double potential_v1(double x);
double potential_v2(double x);

// nonnegative x with Q~(x) = c, 0 < c < 3/2
double q_level(double c);

struct RootTable {
    double x0;   // V = 0
    double x1;   // V' = 0
    double x21;  // first zero of V''
    double x22;  // second zero of V''
    double xbar; // Q~ = 6/5
};

RootTable roots();

// all profile quantities at once, sharing one inversion
struct ProfilePoint {
    double x, s, q, h;
};
ProfilePoint profile_at(double x);

struct ProfileSample {
    Grid grid;
    Vec s, q, h, v, v1, v2;
};
ProfileSample sample_profiles(const Grid& g);

}  // namespace kinklab
