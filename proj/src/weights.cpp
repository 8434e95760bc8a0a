#include "kinklab/weights.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "kinklab/profiles.hpp"

namespace kinklab {

namespace {

struct Logistic {
    double s = 0, st = 0, stt = 0;  // S and its t-derivatives
};

// S(t) = 1 / (1 + e^u), u = 1/t - 1/(1-t)
Logistic logistic(double t) {
    Logistic r;
    double u = 1.0 / t - 1.0 / (1.0 - t);
    double s = u > 0 ? std::exp(-u) / (1.0 + std::exp(-u)) : 1.0 / (1.0 + std::exp(u));
    double u1 = -1.0 / (t * t) - 1.0 / ((1.0 - t) * (1.0 - t));
    double u2 = 2.0 / (t * t * t) - 2.0 / ((1.0 - t) * (1.0 - t) * (1.0 - t));
    double p = s * (1.0 - s);
    r.s = s;
    r.st = -p * u1;
    r.stt = p * (1.0 - 2.0 * s) * u1 * u1 - p * u2;
    return r;
}

}  // namespace

double chi(double x) {
    double t = std::abs(x) - 1.0;
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    return 1.0 - logistic(t).s;
}

double chi_prime(double x) {
    double t = std::abs(x) - 1.0;
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return -std::copysign(logistic(t).st, x);
}

double chi_second(double x) {
    double t = std::abs(x) - 1.0;
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return -logistic(t).stt;
}

double zeta_sq(double x, double A) {
    double s = alpha_inv(std::abs(x));
    return std::exp(-s * (1.0 - chi(x)) / A);
}

double zeta_log_second(double x, double A) {
    double ax = std::abs(x);
    double s = alpha_inv(ax);
    double q = q_tilde(ax), h = h_tilde(ax);
    double sg = x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0);
    return (chi_second(x) * s + 2.0 * chi_prime(x) * q * sg + (1.0 - chi(x)) * q * q * h * sg * sg) / (2.0 * A);
}

double sigma_weight(double x, double A) { return 1.0 / std::cosh(alpha_inv(std::abs(x)) / A); }

double chi_tilde(double x, double scale) { return chi(alpha_inv(std::abs(x)) / scale); }

Vec phi_weight_cumulative(const Vec& s_sorted, double A) {
    static constexpr std::array<double, 4> node = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                                   0.8611363115940526};
    static constexpr std::array<double, 4> weight = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                                     0.3478548451374538};
    auto f = [A](double u) { return std::exp(-u * (1.0 - chi(alpha(u))) / A); };
    Vec out(s_sorted.size());
    double acc = 0.0, prev = 0.0;
    for (std::size_t i = 0; i < s_sorted.size(); ++i) {
        double b = s_sorted[i];
        if (b < prev) throw std::invalid_argument("phi_weight_cumulative: values must be nondecreasing");
        int panels = std::max(1, static_cast<int>(std::ceil((b - prev) / 0.05)));
        double w = (b - prev) / panels;
        for (int p = 0; p < panels; ++p) {
            double c = prev + (p + 0.5) * w;
            for (std::size_t k = 0; k < 4; ++k) acc += 0.5 * w * weight[k] * f(c + 0.5 * w * node[k]);
        }
        out[i] = acc;
        prev = b;
    }
    return out;
}

VirialWeights virial_weights(const Grid& g, double A, double B) {
    if (!g.is_symmetric()) throw std::invalid_argument("virial_weights: grid must be symmetric");
    if (A <= 2.0 || B <= 2.0) throw std::invalid_argument("virial_weights: A, B must exceed 2");
    std::size_t c = g.center();
    Vec s(c + 1);
    for (std::size_t k = 0; k <= c; ++k) s[k] = alpha_inv(g.x(c + k));
    Vec pa = phi_weight_cumulative(s, A), pb = phi_weight_cumulative(s, B);
    Vec za(c + 1), pap(c + 1), sa(c + 1), ca(c + 1), cb(c + 1), psi(c + 1), psip(c + 1);
    for (std::size_t k = 0; k <= c; ++k) {
        double x = g.x(c + k), q = q_tilde(x);
        double z2a = zeta_sq(x, A), z2b = zeta_sq(x, B);
        za[k] = std::sqrt(z2a);
        pap[k] = q * z2a;
        sa[k] = 1.0 / std::cosh(s[k] / A);
        ca[k] = chi(s[k] / A);
        cb[k] = chi(s[k] / (B * B));
        psi[k] = ca[k] * ca[k] * pb[k];
        // d/dx chi(s/A) = chi'(s/A) Q~ / A
        double dca = chi_prime(s[k] / A) * q / A;
        psip[k] = 2.0 * ca[k] * dca * pb[k] + ca[k] * ca[k] * q * z2b;
    }
    VirialWeights w;
    w.grid = g;
    w.zeta_a = reflect(g, za, Parity::even);
    w.phi_a = reflect(g, pa, Parity::odd);
    w.phi_a_prime = reflect(g, pap, Parity::even);
    w.sigma_a = reflect(g, sa, Parity::even);
    w.psi_ab = reflect(g, psi, Parity::odd);
    w.psi_ab_prime = reflect(g, psip, Parity::even);
    w.chi_a = reflect(g, ca, Parity::even);
    w.chi_b = reflect(g, cb, Parity::even);
    return w;
}

}  // namespace kinklab
