#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "kinklab/darboux.hpp"
#include "oracles.hpp"

using namespace kinklab;

namespace {
struct Fixture {
    EigenPair pair = ground_state(Grid::symmetric(60.0, darboux_default_h));
    RiccatiSolution ode = h0_riccati(pair.mu0_sq, Grid::half_line(60.0, darboux_default_h));
    RiccatiSolution ratio = h0_from_phi0(pair);
    RootTable r = roots();
};
const Fixture& fx() {
    static Fixture f;
    return f;
}
}  // namespace

TEST_CASE("h0 from phi0") {
    const auto& f = fx();
    double h = f.pair.grid.h();
    CHECK(std::abs(f.ratio.h0[0]) <= h * h);
    std::size_t k = static_cast<std::size_t>(std::llround(50.0 / h));
    double x = f.ratio.grid.x(k);
    CHECK(std::abs(f.ratio.h0[k] + f.pair.mu0) <= 2 * std::abs(potential_v(x)) / f.pair.mu0);
    CHECK(f.ratio.h0_prime[0] == doctest::Approx(f.pair.mu0_sq - 2.25).epsilon(1e-3));
    CHECK(f.ratio.h0_prime[0] == doctest::Approx(-1.59).epsilon(0.02 / 1.59));
    CHECK(riccati_residual(f.ratio, 50.0) <= 10 * h * h);
    CHECK_THROWS_AS(h0_from_phi0(EigenPair{f.pair.grid, 1.0, 1.0, Vec(f.pair.grid.n, -1.0), 0.0, 1}),
                    std::domain_error);
}

TEST_CASE("two routes to h0 agree") {
    const auto& f = fx();
    double worst = 0.0;
    for (std::size_t k = 0; k < f.ratio.grid.n; ++k) {
        if (f.ratio.grid.x(k) > 40.0) break;
        worst = std::max(worst, std::abs(f.ratio.h0[k] - f.ode.h0[k]));
    }
    CHECK(worst <= 1e-4);
    CHECK(std::abs(f.ode.h0[0]) <= 1e-4);
    CHECK(riccati_residual(f.ode, 50.0) <= 1e-4);
}

TEST_CASE("forward integration exposes a perturbed eigenvalue") {
    const auto& f = fx();
    Grid half = Grid::half_line(10.0, darboux_default_h);
    bool failed = false;
    try {
        auto bad = h0_riccati_forward(f.pair.mu0_sq + 0.05, half);
        for (std::size_t k = 0; k < half.n; ++k)
            if (half.x(k) >= f.r.x0 && bad.h0[k] > -f.pair.mu0) failed = true;
    } catch (const std::runtime_error&) {
        failed = true;
    }
    CHECK(failed);
    // the unperturbed forward solution tracks the stable route near the origin
    auto good = h0_riccati_forward(f.pair.mu0_sq, half);
    for (std::size_t k = 0; k < half.n; ++k)
        if (half.x(k) <= 2.0) CHECK(std::abs(good.h0[k] - f.ode.h0[k]) < 1e-3);
}

TEST_CASE("h0 sandwich on [0, 5]") {
    const auto& f = fx();
    double mu2 = f.pair.mu0_sq, mt = mu_tilde(mu2);
    double tol = 1e-6 + darboux_default_h * darboux_default_h;
    for (std::size_t k = 0; k < f.ode.grid.n; ++k) {
        double x = f.ode.grid.x(k);
        if (x > 5.0) break;
        double qh = 2 * q_tilde(x) * h_tilde(x);
        CHECK(f.ode.h0[k] >= (mu2 - mt * mt) * x - qh - tol);
        CHECK(f.ode.h0[k] <= mu2 * x - qh + tol);
    }
}

TEST_CASE("h0 bound audit") {
    const auto& f = fx();
    auto checks = h0_bound_audit(f.ode, f.r);
    REQUIRE(checks.size() == 9);
    for (std::size_t i = 0; i < 6; ++i) {
        INFO(checks[i].name);
        CHECK(checks[i].pass);
    }
    CHECK(checks[6].name == "lower_R_full_line");
    CHECK_FALSE(checks[6].pass);
    CHECK(checks[6].worst_location > 1.7);
    CHECK(checks[7].pass);
    CHECK(checks[8].pass);

    BoundAuditOptions shifted;
    shifted.h0_shift = 0.1;
    auto bad = h0_bound_audit(f.ode, f.r, shifted);
    CHECK(bad[1].name == "upper_minus_mu0");
    CHECK_FALSE(bad[1].pass);
}

TEST_CASE("transformed potential signs") {
    const auto& f = fx();
    auto tp = transformed_potential(f.ode);
    const Grid& g = tp.grid;
    CHECK(tp.v0[g.center()] == doctest::Approx(2.25 - 2 * f.pair.mu0_sq).epsilon(1e-4));
    for (std::size_t i = 0; i < g.n; ++i) {
        double x = g.x(i);
        CHECK(tp.v0[i] >= -1e-6);
        if (x > 0) CHECK(tp.v0_prime[i] <= 1e-6);
        if (x >= f.r.x22 && x <= 50.0) {
            double v1 = potential_v1(x);
            CHECK(tp.v0_prime[i] >= 3 * v1 - 1e-6);
            CHECK(tp.v0_prime[i] <= 0.5 * v1 + 1e-6);
        }
    }
    SampledField e{g, tp.v0, Parity::even}, o{g, tp.v0_prime, Parity::odd};
    CHECK(e.parity_defect() == 0.0);
    CHECK(o.parity_defect() == 0.0);
}

namespace {
double loglog_slope(const Grid& g, const Vec& y, double lo, double hi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < g.n; ++i) {
        double x = g.x(i);
        if (x < lo || x > hi) continue;
        double lx = std::log(x), ly = std::log(std::abs(y[i]));
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++n;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}
}  // namespace

TEST_CASE("V0 tail") {
    const auto& f = fx();
    auto sol = h0_riccati(f.pair.mu0_sq, Grid::half_line(200.0, 0.05));
    auto tp = transformed_potential(sol);
    // V0 = V - 2 h0' and h0' = O(V'), so V0 follows V ~ 2 Q~^2 ~ 2/x^2 while V0' follows V' ~ x^-3
    CHECK(loglog_slope(tp.grid, tp.v0, 50.0, 190.0) == doctest::Approx(-2.0).epsilon(0.1));
    CHECK(loglog_slope(tp.grid, tp.v0_prime, 50.0, 190.0) == doctest::Approx(-3.0).epsilon(0.1));
    std::size_t i = tp.grid.n - 1 - static_cast<std::size_t>(std::llround(50.0 / 0.05));
    CHECK(tp.v0[i] / potential_v(tp.grid.x(i)) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("factorization and intertwining") {
    const auto& f = fx();
    Grid g = f.pair.grid;
    Vec h0 = h0_full(f.ratio, g);
    Vec uphi = u_apply(f.pair.phi0, g, h0);
    double h2 = g.h() * g.h();
    for (std::size_t i = 1; i + 1 < g.n; ++i)
        if (std::abs(g.x(i)) < 40) CHECK(std::abs(uphi[i]) <= 10 * h2 * f.pair.phi0[g.center()]);

    Vec u = sample(g, [](double x) { return std::exp(-0.3 * x * x) * (1 + 0.5 * x); });
    auto st = assemble_l(g);
    Vec lu = st.apply(u);
    Vec usu = u_star_apply(u_apply(u, g, h0), g, h0);
    Vec v0(g.n);
    for (std::size_t i = 0; i < g.n; ++i) v0[i] = 2 * (h0[i] * h0[i] - f.pair.mu0_sq) - potential_v(g.x(i));
    auto st0 = assemble_with_potential(g, v0);
    Vec left = u_apply(lu, g, h0);
    Vec right = st0.apply(u_apply(u, g, h0));
    double w1 = 0, w2 = 0;
    for (std::size_t i = 2; i + 2 < g.n; ++i) {
        if (std::abs(g.x(i)) > 30) continue;
        w1 = std::max(w1, std::abs(usu[i] - f.pair.mu0_sq * u[i] - lu[i]));
        w2 = std::max(w2, std::abs(left[i] - right[i]));
    }
    CHECK(w1 <= 20 * h2);
    CHECK(w2 <= 50 * h2);
    CHECK_THROWS_AS(u_apply(Vec(5, 0.0), g, h0), std::invalid_argument);
}

TEST_CASE("partner operator has no negative eigenvalue") {
    const auto& f = fx();
    auto tp = transformed_potential(f.ode);
    auto st0 = assemble_with_potential(tp.grid, tp.v0);
    CHECK(count_below(st0, -1e-3) == 0);
}

TEST_CASE("integral formula for h0'") {
    const auto& f = fx();
    for (int j = 0; j < 20; ++j) {
        double x = 0.25 + 0.5 * j;
        auto k = static_cast<std::size_t>(std::llround(x / f.ode.grid.h()));
        CHECK(h0_prime_integral(f.pair, x) == doctest::Approx(f.ode.h0_prime[k]).epsilon(1e-3).scale(1));
    }
}
