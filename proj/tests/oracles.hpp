#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

// independent reference computations used only by tests

namespace oracle {

// plain bisection on sinh y + y = 3x, x >= 0
inline double alpha_inv_bisect(double x) {
    double lo = 0.0, hi = 1.0;
    while ((std::sinh(hi) + hi) / 3.0 < x) hi *= 2.0;
    for (int i = 0; i < 400; ++i) {
        double mid = 0.5 * (lo + hi);
        if ((std::sinh(mid) + mid) / 3.0 < x) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Q~(x) - c = 0 by bisection in x, for c in (0, 3/2)
inline double q_level_bisect(double c) {
    auto q = [](double x) {
        double s = alpha_inv_bisect(x);
        double ch = std::cosh(0.5 * s);
        return 1.5 / (ch * ch);
    };
    double lo = 0.0, hi = 1.0;
    while (q(hi) > c) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (q(mid) > c) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// integral of sech^{2k}(u) over the real line: 2 * (2k-2)!! / (2k-1)!!
inline double sech_even_moment(int k) {
    double r = 2.0;
    for (int j = 1; j < k; ++j) r *= (2.0 * j) / (2.0 * j + 1.0);
    return r;
}

// tridiagonal solve, a sub, b diag, c super (a[0], c[n-1] unused)
inline std::vector<double> thomas(std::vector<double> a, std::vector<double> b, std::vector<double> c,
                                  std::vector<double> d) {
    std::size_t n = b.size();
    for (std::size_t i = 1; i < n; ++i) {
        double m = a[i] / b[i - 1];
        b[i] -= m * c[i - 1];
        d[i] -= m * d[i - 1];
    }
    std::vector<double> x(n);
    x[n - 1] = d[n - 1] / b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (d[i] - c[i] * x[i + 1]) / b[i];
    return x;
}

struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed * 0x9E3779B97F4A7C15ULL + 1) {}
    std::uint64_t next() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return state;
    }
    double uniform() { return (next() >> 11) * (1.0 / 9007199254740992.0); }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
};

}  // namespace oracle
