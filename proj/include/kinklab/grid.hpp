#pragma once

#include <cstddef>
#include <vector>

namespace kinklab {

using Vec = std::vector<double>;

struct Grid {
    double x_min = -1.0;
    double x_max = 1.0;
    std::size_t n = 3;

    Grid() = default;
    Grid(double lo, double hi, std::size_t n_points);

    // x_min = -L, odd point count, spacing as close to h as possible without exceeding it
    static Grid symmetric(double L, double h);
    // [0, L] with spacing h
    static Grid half_line(double L, double h);

    double h() const { return (x_max - x_min) / static_cast<double>(n - 1); }
    double x(std::size_t i) const { return x_min + static_cast<double>(i) * h(); }
    bool is_symmetric() const;
    std::size_t center() const { return (n - 1) / 2; }
    Vec nodes() const;
    bool same_as(const Grid& o) const;
};

enum class Parity { even, odd, none };

struct SampledField {
    Grid grid;
    Vec values;
    Parity parity = Parity::none;

    // max parity defect over mirrored node pairs; 0 for parity none
    double parity_defect() const;
};

template <class F>
Vec sample(const Grid& g, F&& f) {
    Vec v(g.n);
    for (std::size_t i = 0; i < g.n; ++i) v[i] = f(g.x(i));
    return v;
}

double trapz(const Grid& g, const Vec& f);
double trapz(const Grid& g, const Vec& f, const Vec& w);
double trapz_window(const Grid& g, const Vec& f, double lo, double hi);

// centered first derivative, second-order one-sided at the ends
Vec diff1(const Grid& g, const Vec& f);
// three-point second derivative, ends copied from neighbours
Vec diff2(const Grid& g, const Vec& f);

// cumulative trapezoid from the left (starting at 0) and from the right
Vec cumtrapz(const Grid& g, const Vec& f);
Vec cumtrapz_right(const Grid& g, const Vec& f);

double max_abs(const Vec& v);

// mirror a half-line sample onto a symmetric grid with the given parity
Vec reflect(const Grid& full, const Vec& half, Parity p);

}  // namespace kinklab
