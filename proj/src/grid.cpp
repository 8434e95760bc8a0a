#include "kinklab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kinklab {

Grid::Grid(double lo, double hi, std::size_t n_points) : x_min(lo), x_max(hi), n(n_points) {
    if (n_points < 3) throw std::invalid_argument("grid needs at least 3 points");
    if (!(lo < hi)) throw std::invalid_argument("grid needs x_min < x_max");
}

Grid Grid::symmetric(double L, double h) {
    if (!(L > 0) || !(h > 0)) throw std::invalid_argument("symmetric grid needs L > 0, h > 0");
    auto half = static_cast<std::size_t>(std::ceil(L / h - 1e-9));
    return Grid(-L, L, 2 * half + 1);
}

Grid Grid::half_line(double L, double h) {
    if (!(L > 0) || !(h > 0)) throw std::invalid_argument("half-line grid needs L > 0, h > 0");
    auto m = static_cast<std::size_t>(std::ceil(L / h - 1e-9));
    return Grid(0.0, L, m + 1);
}

bool Grid::is_symmetric() const {
    return n % 2 == 1 && std::abs(x_min + x_max) <= 1e-12 * std::max(1.0, x_max);
}

Vec Grid::nodes() const {
    Vec v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = x(i);
    return v;
}

bool Grid::same_as(const Grid& o) const {
    return n == o.n && x_min == o.x_min && x_max == o.x_max;
}

double SampledField::parity_defect() const {
    if (parity == Parity::none || !grid.is_symmetric()) return 0.0;
    double s = parity == Parity::even ? -1.0 : 1.0;
    double worst = 0.0;
    for (std::size_t i = 0, j = grid.n - 1; i < j; ++i, --j)
        worst = std::max(worst, std::abs(values[i] + s * values[j]));
    if (parity == Parity::odd) worst = std::max(worst, std::abs(values[grid.center()]));
    return worst;
}

double trapz(const Grid& g, const Vec& f) {
    double s = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < g.n; ++i) s += f[i];
    return s * g.h();
}

double trapz(const Grid& g, const Vec& f, const Vec& w) {
    double s = 0.5 * (f.front() * w.front() + f.back() * w.back());
    for (std::size_t i = 1; i + 1 < g.n; ++i) s += f[i] * w[i];
    return s * g.h();
}

double trapz_window(const Grid& g, const Vec& f, double lo, double hi) {
    double s = 0.0;
    double h = g.h();
    for (std::size_t i = 0; i + 1 < g.n; ++i) {
        double a = g.x(i), b = g.x(i + 1);
        if (a >= lo - 1e-12 && b <= hi + 1e-12) s += 0.5 * h * (f[i] + f[i + 1]);
    }
    return s;
}

Vec diff1(const Grid& g, const Vec& f) {
    std::size_t n = g.n;
    double h = g.h();
    Vec d(n);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2 * h);
    d[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h);
    d[n - 1] = (3 * f[n - 1] - 4 * f[n - 2] + f[n - 3]) / (2 * h);
    return d;
}

Vec diff2(const Grid& g, const Vec& f) {
    std::size_t n = g.n;
    double h2 = g.h() * g.h();
    Vec d(n);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - 2 * f[i] + f[i - 1]) / h2;
    d[0] = d[1];
    d[n - 1] = d[n - 2];
    return d;
}

Vec cumtrapz(const Grid& g, const Vec& f) {
    Vec c(g.n, 0.0);
    double h = g.h();
    for (std::size_t i = 1; i < g.n; ++i) c[i] = c[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
    return c;
}

Vec cumtrapz_right(const Grid& g, const Vec& f) {
    Vec c(g.n, 0.0);
    double h = g.h();
    for (std::size_t i = g.n - 1; i-- > 0;) c[i] = c[i + 1] + 0.5 * h * (f[i] + f[i + 1]);
    return c;
}

double max_abs(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

Vec reflect(const Grid& full, const Vec& half, Parity p) {
    std::size_t c = full.center();
    if (half.size() != c + 1) throw std::invalid_argument("half-line sample does not match grid");
    Vec out(full.n);
    double s = p == Parity::odd ? -1.0 : 1.0;
    for (std::size_t k = 0; k <= c; ++k) {
        out[c + k] = half[k];
        out[c - k] = s * half[k];
    }
    if (p == Parity::odd) out[c] = 0.0;
    return out;
}

}  // namespace kinklab
