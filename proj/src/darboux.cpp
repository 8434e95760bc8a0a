#include "kinklab/darboux.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kinklab {

double mu_tilde(double mu0_sq) { return std::sqrt(mu0_sq + 8.0 / 27.0); }

RiccatiSolution h0_from_phi0(const EigenPair& pair) {
    const Grid& g = pair.grid;
    std::size_t c = g.center();
    std::size_t last = g.n - 2;
    for (std::size_t i = 1; i <= last; ++i)
        if (!(pair.phi0[i] > 0.0)) throw std::domain_error("h0_from_phi0: phi0 not positive at interior node");
    double h = g.h();
    Grid half(0.0, g.x(last), last - c + 1);
    RiccatiSolution sol{half, Vec(half.n), Vec(half.n), RiccatiSource::from_phi0, pair.mu0_sq};
    for (std::size_t k = 0; k < half.n; ++k) {
        std::size_t i = c + k;
        sol.h0[k] = (pair.phi0[i + 1] - pair.phi0[i - 1]) / (2 * h) / pair.phi0[i];
    }
    sol.h0[0] = 0.0;
    sol.h0_prime = diff1(half, sol.h0);
    return sol;
}

namespace {

// V at nodes and midpoints of a half-line grid: index 2k is node k, 2k+1 the midpoint
Vec potential_half_steps(const Grid& half) {
    std::size_t m = 2 * half.n - 1;
    Vec v(m);
    double h = half.h();
    for (std::size_t j = 0; j < m; ++j) v[j] = potential_v(half.x_min + 0.5 * h * static_cast<double>(j));
    return v;
}

}  // namespace

RiccatiSolution h0_riccati(double mu0_sq, const Grid& half) {
    if (half.x_min != 0.0) throw std::invalid_argument("h0_riccati: grid must start at 0");
    Vec v = potential_half_steps(half);
    double h = half.h();
    RiccatiSolution sol{half, Vec(half.n), Vec(half.n), RiccatiSource::from_ode, mu0_sq};
    auto f = [&](std::size_t j, double y) { return mu0_sq + v[j] - y * y; };
    std::size_t n = half.n;
    // decaying branch with its first adiabatic correction
    double s0 = std::sqrt(mu0_sq + v[2 * (n - 1)]);
    double y = -s0 - potential_v1(half.x_max) / (4 * s0 * s0);
    sol.h0[n - 1] = y;
    double dt = -h;
    for (std::size_t k = n - 1; k > 0; --k) {
        std::size_t j = 2 * k;
        double k1 = f(j, y);
        double k2 = f(j - 1, y + 0.5 * dt * k1);
        double k3 = f(j - 1, y + 0.5 * dt * k2);
        double k4 = f(j - 2, y + dt * k3);
        y += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
        if (!std::isfinite(y)) throw std::runtime_error("h0_riccati: integration blew up");
        sol.h0[k - 1] = y;
    }
    for (std::size_t k = 0; k < n; ++k) sol.h0_prime[k] = f(2 * k, sol.h0[k]);
    return sol;
}

RiccatiSolution h0_riccati_forward(double mu0_sq, const Grid& half, double blowup) {
    if (half.x_min != 0.0) throw std::invalid_argument("h0_riccati_forward: grid must start at 0");
    Vec v = potential_half_steps(half);
    double h = half.h();
    RiccatiSolution sol{half, Vec(half.n), Vec(half.n), RiccatiSource::from_ode, mu0_sq};
    auto f = [&](std::size_t j, double y) { return mu0_sq + v[j] - y * y; };
    double y = 0.0;
    for (std::size_t k = 0; k + 1 < half.n; ++k) {
        std::size_t j = 2 * k;
        double k1 = f(j, y);
        double k2 = f(j + 1, y + 0.5 * h * k1);
        double k3 = f(j + 1, y + 0.5 * h * k2);
        double k4 = f(j + 2, y + h * k3);
        y += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
        if (!std::isfinite(y) || std::abs(y) > blowup)
            throw std::runtime_error("h0_riccati_forward: blow-up at x = " + std::to_string(half.x(k + 1)));
        sol.h0[k + 1] = y;
    }
    for (std::size_t k = 0; k < half.n; ++k) sol.h0_prime[k] = f(2 * k, sol.h0[k]);
    return sol;
}

double riccati_residual(const RiccatiSolution& sol, double x_hi) {
    const Grid& g = sol.grid;
    const Vec& y = sol.h0;
    double h = g.h();
    double worst = 0.0;
    for (std::size_t k = 2; k + 2 < g.n; ++k) {
        double x = g.x(k);
        if (x > x_hi) break;
        double d = (-y[k + 2] + 8 * y[k + 1] - 8 * y[k - 1] + y[k - 2]) / (12 * h);
        worst = std::max(worst, std::abs(d + y[k] * y[k] - sol.mu0_sq - potential_v(x)));
    }
    return worst;
}

Vec h0_full(const RiccatiSolution& sol, const Grid& full) {
    if (!full.is_symmetric() || sol.grid.n > full.center() + 1 || sol.grid.n < full.center() ||
        std::abs(full.h() - sol.grid.h()) > 1e-12 * full.h())
        throw std::invalid_argument("h0_full: grid mismatch");
    Vec half = sol.h0;
    half.resize(full.center() + 1, sol.h0.back());
    return reflect(full, half, Parity::odd);
}

TransformedPotential transformed_potential(const RiccatiSolution& sol) {
    const Grid& half = sol.grid;
    Grid full(-half.x_max, half.x_max, 2 * half.n - 1);
    Vec v0(half.n), v0p(half.n);
    for (std::size_t k = 0; k < half.n; ++k) {
        auto p = profile_at(half.x(k));
        double h = sol.h0[k];
        v0[k] = 2.0 * (h * h - sol.mu0_sq) - v_of_qh(p.q);
        v0p[k] = 4.0 * h * sol.h0_prime[k] - v1_of_qh(p.q, p.h);
    }
    return {full, reflect(full, v0, Parity::even), reflect(full, v0p, Parity::odd)};
}

Vec u_apply(const Vec& u, const Grid& g, const Vec& h0) {
    if (u.size() != g.n || h0.size() != g.n) throw std::invalid_argument("u_apply: grid mismatch");
    Vec d = diff1(g, u);
    for (std::size_t i = 0; i < g.n; ++i) d[i] -= h0[i] * u[i];
    return d;
}

Vec u_star_apply(const Vec& u, const Grid& g, const Vec& h0) {
    if (u.size() != g.n || h0.size() != g.n) throw std::invalid_argument("u_star_apply: grid mismatch");
    Vec d = diff1(g, u);
    for (std::size_t i = 0; i < g.n; ++i) d[i] = -d[i] - h0[i] * u[i];
    return d;
}

namespace {

struct Tracker {
    BoundCheck c;
    explicit Tracker(std::string name, double lo, double hi) {
        c.name = std::move(name);
        c.lo = lo;
        c.hi = hi;
        c.worst_margin = std::numeric_limits<double>::infinity();
    }
    void see(double x, double margin) {
        if (x < c.lo || x > c.hi) return;
        if (margin < c.worst_margin) {
            c.worst_margin = margin;
            c.worst_location = x;
        }
    }
    BoundCheck done(double tol) {
        c.pass = c.worst_margin >= -tol;
        return c;
    }
};

}  // namespace

std::vector<BoundCheck> h0_bound_audit(const RiccatiSolution& sol, const RootTable& r,
                                       const BoundAuditOptions& opt) {
    const Grid& g = sol.grid;
    double mu2 = sol.mu0_sq, mu = std::sqrt(mu2), mt = mu_tilde(mu2);
    double L = g.x_max;
    double tol = opt.audit_tol + g.h() * g.h();
    Tracker t1("lower_mu_tilde", 0.0, L), t2("upper_minus_mu0", r.x0, L), t3("lower_R", 0.0, r.x0),
        t4("lower_H_near_0", 0.0, r.x21), t5("sandwich_x21_x0", r.x21, r.x0), t6("convex_0_x0", 0.0, r.x0),
        i1("lower_R_full_line", 0.0, L), i2("sandwich_0_5", 0.0, 5.0), i3("nonpositive", 0.0, L);
    Vec h0 = sol.h0;
    for (double& v : h0) v += opt.h0_shift;
    double h2 = g.h() * g.h();
    for (std::size_t k = 0; k < g.n; ++k) {
        double x = g.x(k);
        auto p = profile_at(x);
        double h = h0[k];
        double R = 2 * std::log(1.5) - 2 * std::log(p.q) + 2 * p.q * p.h + 0.5 * (mu2 - mt * mt) * x * x;
        t1.see(x, h + mt);
        t2.see(x, -mu - h);
        if (x > 0) t3.see(x, h - (mu2 * x - R));
        t4.see(x, h - (4.0 / 3.0) * (mu2 - 2.25) * p.h);
        t5.see(x, std::min(h - ((mu2 - mt * mt) * (x - r.x0) - mt), -(mu / r.x0) * x - h));
        if (k > 0 && k + 1 < g.n && x < r.x0) t6.see(x, (h0[k + 1] - 2 * h + h0[k - 1]) / h2);
        if (x > 0) i1.see(x, h - (mu2 * x - R));
        double qh = 2 * p.q * p.h;
        i2.see(x, std::min(h - ((mu2 - mt * mt) * x - qh), mu2 * x - qh - h));
        i3.see(x, -h);
    }
    std::vector<BoundCheck> out = {t1.done(tol), t2.done(tol), t3.done(tol), t4.done(tol), t5.done(tol), t6.done(tol)};
    if (opt.informational) {
        out.push_back(i1.done(tol));
        out.push_back(i2.done(tol));
        out.push_back(i3.done(tol));
    }
    return out;
}

double h0_prime_integral(const EigenPair& pair, double x) {
    const Grid& g = pair.grid;
    auto k = static_cast<std::size_t>(std::llround((x - g.x_min) / g.h()));
    double s = 0.0;
    double prev = potential_v1(g.x(k)) * pair.phi0[k] * pair.phi0[k];
    for (std::size_t i = k + 1; i < g.n; ++i) {
        double cur = potential_v1(g.x(i)) * pair.phi0[i] * pair.phi0[i];
        s += 0.5 * g.h() * (prev + cur);
        prev = cur;
    }
    return -s / (pair.phi0[k] * pair.phi0[k]);
}

}  // namespace kinklab
