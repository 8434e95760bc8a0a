#include "kinklab/resonance.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace kinklab {

double beta(double x) { return 3.0 * x + 2.0 * std::copysign(alpha_inv(std::abs(x)), x); }

double h_hat(double x) { return beta(x) * h_tilde(x) - 4.0; }

Vec l_tilde_apply(const Vec& u, const Grid& g) {
    if (u.size() != g.n) throw std::invalid_argument("l_tilde_apply: grid mismatch");
    double ih2 = 1.0 / (g.h() * g.h());
    Vec out(g.n, 0.0);
    for (std::size_t i = 1; i + 1 < g.n; ++i) {
        double q = q_tilde(g.x(i));
        out[i] = -(u[i + 1] - 2 * u[i] + u[i - 1]) * ih2 - (2.0 / 3.0) * q * q * q * u[i];
    }
    return out;
}

ResonanceBundle build_phi1(const EigenPair& pair, const ResonanceOptions& opt) {
    const Grid& g = pair.grid;
    if (!g.is_symmetric()) throw std::invalid_argument("build_phi1: grid must be symmetric");
    std::size_t c = g.center();
    double h = g.h();
    Grid half(0.0, g.x_max, c + 1);
    Vec phi(half.n), ht(half.n), hh(half.n);
    for (std::size_t k = 0; k < half.n; ++k) {
        double x = half.x(k);
        phi[k] = pair.phi0[c + k];
        ht[k] = h_tilde(x);
        hh[k] = h_hat(x);
    }
    Vec a(half.n), b(half.n);
    for (std::size_t k = 0; k < half.n; ++k) {
        a[k] = phi[k] * ht[k];
        b[k] = phi[k] * hh[k];
    }
    // exponential tail fitted on [x_max - 10, x_max - 5]
    std::size_t k1 = half.n - 1 - static_cast<std::size_t>(std::llround(10.0 / h));
    std::size_t k2 = half.n - 1 - static_cast<std::size_t>(std::llround(5.0 / h));
    double kappa = std::log(phi[k1] / phi[k2]) / (half.x(k2) - half.x(k1));
    std::size_t last = half.n - 2;
    double tail = kappa > 0 ? phi[last] * ht[last] / kappa : 0.0;

    Vec right = cumtrapz_right(half, a);
    for (double& v : right) v += tail;
    Vec left = cumtrapz(half, b);

    ResonanceBundle rb;
    rb.grid = g;
    rb.tail_correction = tail;
    rb.half_line_integral = left.back();
    Vec p1(half.n);
    for (std::size_t k = 0; k < half.n; ++k) p1[k] = (hh[k] * right[k] + ht[k] * left[k]) / 3.0;
    rb.phi1 = reflect(g, p1, Parity::even);
    rb.h_hat = reflect(g, hh, Parity::even);
    rb.g = reflect(g, left, Parity::even);
    rb.phi1_at_0 = p1[0];
    rb.phi1_at_0_peak = p1[0] / phi[0];
    rb.phi1_far = p1[half.n - 1 - static_cast<std::size_t>(std::llround(10.0 / h))];
    rb.inner_phi1_phi0 = trapz(g, rb.phi1, pair.phi0);
    Vec ag(half.n);
    for (std::size_t k = 0; k < half.n; ++k) ag[k] = a[k] * left[k];
    rb.inner_phi1_phi0_alt = (4.0 / 3.0) * trapz(half, ag);
    rb.g_max = -std::numeric_limits<double>::infinity();
    rb.g_sign_change = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 1; k < half.n; ++k) {
        rb.g_max = std::max(rb.g_max, left[k]);
        if (std::isnan(rb.g_sign_change) && left[k] >= 0.0) rb.g_sign_change = half.x(k);
    }

    Vec dht = diff1(half, ht), dhh = diff1(half, hh);
    for (std::size_t k = 1; k + 1 < half.n; ++k)
        rb.wronskian_dev = std::max(rb.wronskian_dev, std::abs(ht[k] * dhh[k] - hh[k] * dht[k] - 3.0));
    if (rb.wronskian_dev > opt.wronskian_factor * h * h)
        throw std::runtime_error("build_phi1: Wronskian drift " + std::to_string(rb.wronskian_dev));

    Vec lp = l_tilde_apply(rb.phi1, g);
    for (std::size_t i = 1; i + 1 < g.n; ++i)
        if (std::abs(g.x(i)) <= g.x_max - 10.0) rb.residual = std::max(rb.residual, std::abs(lp[i] - pair.phi0[i]));
    return rb;
}

double h0_norm_sq(const Grid& g, const Vec& u) {
    double s = 0.0, h = g.h();
    for (std::size_t i = 0; i + 1 < g.n; ++i) {
        double d = (u[i + 1] - u[i]) / h;
        s += h * d * d;
    }
    Vec q2u2(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        double q = q_tilde(g.x(i));
        q2u2[i] = q * q * u[i] * u[i];
    }
    return s + trapz(g, q2u2);
}

QuadraticFormSurvey quadratic_form_survey(const EigenPair& pair, int samples, std::uint64_t seed, bool coercive) {
    const Grid& g = pair.grid;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> centre(-8.0, 8.0), width(0.5, 3.0), amp(-1.0, 1.0);
    Vec q3(g.n), r(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        double q = q_tilde(g.x(i)), ht = h_tilde(g.x(i));
        q3[i] = q * q * q;
        r[i] = q * q * ht * ht * ht;
    }
    double rr = trapz(g, r, r), pp = trapz(g, pair.phi0, pair.phi0);
    QuadraticFormSurvey out;
    out.samples = samples;
    out.min_ratio = std::numeric_limits<double>::infinity();
    double h = g.h();
    for (int s = 0; s < samples; ++s) {
        Vec u(g.n, 0.0);
        for (int j = 0; j < 4; ++j) {
            double x0 = centre(rng), w = width(rng), a = amp(rng);
            for (std::size_t i = 0; i < g.n; ++i) {
                double z = (g.x(i) - x0) / w;
                u[i] += a * std::exp(-0.5 * z * z);
            }
        }
        u.front() = u.back() = 0.0;
        double c0 = trapz(g, u, pair.phi0) / pp;
        for (std::size_t i = 0; i < g.n; ++i) u[i] -= c0 * pair.phi0[i];
        if (coercive) {
            double c1 = trapz(g, u, r) / rr;
            for (std::size_t i = 0; i < g.n; ++i) u[i] -= c1 * r[i];
        }
        out.max_projection = std::max(out.max_projection, std::abs(trapz(g, u, pair.phi0)));
        if (coercive) out.max_projection = std::max(out.max_projection, std::abs(trapz(g, u, r)));
        double grad = 0.0;
        for (std::size_t i = 0; i + 1 < g.n; ++i) {
            double d = (u[i + 1] - u[i]) / h;
            grad += h * d * d;
        }
        Vec pot(g.n);
        for (std::size_t i = 0; i < g.n; ++i) pot[i] = q3[i] * u[i] * u[i];
        double form = grad - (2.0 / 3.0) * trapz(g, pot);
        out.min_ratio = std::min(out.min_ratio, form / h0_norm_sq(g, u));
    }
    return out;
}

}  // namespace kinklab
