#include "kinklab/profiles.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kinklab {

double q_of_s(double s) {
    double c = std::cosh(0.5 * s);
    return 1.5 / (c * c);
}

double h_of_s(double s) { return std::tanh(0.5 * s); }

double one_minus_h_of_s(double s) {
    if (s < 0) return 1.0 - h_of_s(s);
    return 2.0 / (std::exp(s) + 1.0);
}

double alpha(double y) {
    double r = (std::sinh(y) + y) / 3.0;
    if (!std::isfinite(r)) throw std::range_error("alpha: sinh overflow");
    return r;
}

double alpha_prime(double y) { return (std::cosh(y) + 1.0) / 3.0; }

namespace {

// large x: solve log(sinh y + y) = log(3x) in log form, y ~ log(6x)
double alpha_inv_log(double x, double tol) {
    double target = std::log(3.0 * x);
    double y = std::log(6.0 * x);
    for (int it = 0; it < 60; ++it) {
        double e = std::exp(-y);
        // log(sinh y + y) = y - log 2 + log1p(2y e^-y - e^-2y)
        double g = y - std::log(2.0) + std::log1p(2.0 * y * e - e * e) - target;
        double dg = 1.0 + (2.0 * e - 2.0 * y * e + 2.0 * e * e) / (1.0 + 2.0 * y * e - e * e);
        double step = g / dg;
        y -= step;
        if (std::abs(step) <= tol * y) return y;
    }
    throw std::runtime_error("alpha_inv: log-form iteration did not converge after 60 iterations");
}

}  // namespace

double alpha_inv(double x, double root_tol) {
    if (!std::isfinite(x)) throw std::domain_error("alpha_inv: non-finite argument");
    if (x == 0.0) return 0.0;
    double ax = std::abs(x);
    double sgn = x < 0 ? -1.0 : 1.0;
    if (ax > 1e100) return sgn * alpha_inv_log(ax, root_tol);

    // sinh y <= sinh y + y <= 2 sinh y on y >= 0 brackets the root
    double lo = std::asinh(1.5 * ax);
    double hi = std::min(std::asinh(3.0 * ax), 1.5 * ax);
    double y = ax > 1.0 ? std::asinh(3.0 * ax) : (2.0 / 3.0) * ax;
    if (y < lo || y > hi) y = 0.5 * (lo + hi);
    double scale = std::max(1.0, ax);
    for (int it = 0; it < 200; ++it) {
        double r = (std::sinh(y) + y) / 3.0 - ax;
        if (std::abs(r) <= root_tol * scale) return sgn * y;
        if (r > 0) hi = y; else lo = y;
        double yn = y - r / alpha_prime(y);
        if (!(yn > lo && yn < hi)) yn = 0.5 * (lo + hi);
        if (hi - lo <= 4e-16 * hi) return sgn * yn;
        y = yn;
    }
    throw std::runtime_error("alpha_inv: no convergence after 200 iterations at x = " + std::to_string(x));
}

double q_tilde(double x) { return q_of_s(alpha_inv(x)); }
double h_tilde(double x) { return h_of_s(alpha_inv(x)); }

double v_of_qh(double q) { return 2.0 * q * q * (1.0 - q); }
double v1_of_qh(double q, double h) { return -2.0 * q * q * q * h * (2.0 - 3.0 * q); }
double v2_of_qh(double q) {
    double q2 = q * q;
    return 2.0 * q2 * q2 * (6.0 - (50.0 / 3.0) * q + 9.0 * q2);
}

double potential_v(double x) { return v_of_qh(q_tilde(x)); }

double potential_v1(double x) {
    double s = alpha_inv(x);
    return v1_of_qh(q_of_s(s), h_of_s(s));
}

double potential_v2(double x) { return v2_of_qh(q_tilde(x)); }

double q_level(double c) {
    if (!(c > 0.0 && c < 1.5)) throw std::domain_error("q_level: level must lie in (0, 3/2)");
    return alpha(2.0 * std::acosh(std::sqrt(1.5 / c)));
}

RootTable roots() {
    double r = std::sqrt(139.0);
    double m_plus = (25.0 + r) / 27.0;
    double m_minus = (25.0 - r) / 27.0;
    return RootTable{q_level(1.0), q_level(2.0 / 3.0), q_level(m_plus), q_level(m_minus), q_level(1.2)};
}

ProfilePoint profile_at(double x) {
    double s = alpha_inv(x);
    return {x, s, q_of_s(s), h_of_s(s)};
}

ProfileSample sample_profiles(const Grid& g) {
    ProfileSample p{g, Vec(g.n), Vec(g.n), Vec(g.n), Vec(g.n), Vec(g.n), Vec(g.n)};
    for (std::size_t i = 0; i < g.n; ++i) {
        auto pt = profile_at(g.x(i));
        p.s[i] = pt.s;
        p.q[i] = pt.q;
        p.h[i] = pt.h;
        p.v[i] = v_of_qh(pt.q);
        p.v1[i] = v1_of_qh(pt.q, pt.h);
        p.v2[i] = v2_of_qh(pt.q);
    }
    return p;
}

}  // namespace kinklab
