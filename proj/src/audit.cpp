#include "kinklab/audit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "kinklab/weights.hpp"

namespace kinklab {

namespace {

struct Pt {
    double s, x, q, h, v, v1, v2;
};

Pt at_s(double s) {
    Pt p;
    p.s = s;
    p.x = alpha(s);
    p.q = q_of_s(s);
    p.h = h_of_s(s);
    p.v = v_of_qh(p.q);
    p.v1 = v1_of_qh(p.q, p.h);
    p.v2 = v2_of_qh(p.q);
    return p;
}

// 2 ln(3/2) - 2 ln Q + 2 Q H - (4/27) x^2
double r_bound(const Pt& p) {
    return 2 * std::log(1.5) - 2 * std::log(p.q) + 2 * p.q * p.h - (4.0 / 27.0) * p.x * p.x;
}

Vec s_samples(double lo, double hi, const AuditOptions& o) {
    int n = std::max(o.samples, 2);
    Vec s(n);
    double a = lo + o.shrink, b = hi - o.shrink;
    for (int i = 0; i < n; ++i) s[i] = a + (b - a) * i / (n - 1);
    return s;
}

AuditReport base(std::string name, std::string var, std::string claim, double lo, double hi) {
    AuditReport r;
    r.name = std::move(name);
    r.variable = std::move(var);
    r.claim = std::move(claim);
    r.lo = lo;
    r.hi = hi;
    return r;
}

void finite_or_throw(const std::string& name, double v) {
    if (!std::isfinite(v)) throw std::runtime_error("audit transcription error in " + name);
}

// value must stay >= 0; margin is the minimum
AuditReport positive_s(std::string name, double lo, double hi, const AuditOptions& o,
                       const std::function<double(const Pt&)>& f, bool informational = false) {
    AuditReport r = base(name, "s", "positive", lo, hi);
    r.informational = informational;
    Vec ss = s_samples(lo, hi, o);
    r.samples = static_cast<int>(ss.size());
    r.worst_value = std::numeric_limits<double>::infinity();
    for (double s : ss) {
        double v = f(at_s(s));
        finite_or_throw(r.name, v);
        if (v < r.worst_value) {
            r.worst_value = v;
            r.worst_location = s;
        }
    }
    r.margin = r.worst_value;
    r.pass = r.margin >= -o.audit_tol;
    return r;
}

double bisect(const std::function<double(double)>& f, double a, double b) {
    double fa = f(a);
    for (int i = 0; i < 200; ++i) {
        double m = 0.5 * (a + b), fm = f(m);
        if ((fm > 0) == (fa > 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

struct XNodes {
    Vec x, s, q, h, h0, h0p, v0p;
};

XNodes x_nodes(const AuditInputs& in, double x_cap) {
    const RiccatiSolution& sol = in.h0;
    auto tp = transformed_potential(sol);
    std::size_t c = tp.grid.center();
    XNodes n;
    for (std::size_t k = 0; k < sol.grid.n; ++k) {
        double x = sol.grid.x(k);
        if (x > x_cap) break;
        auto p = profile_at(x);
        n.x.push_back(x);
        n.s.push_back(p.s);
        n.q.push_back(p.q);
        n.h.push_back(p.h);
        n.h0.push_back(sol.h0[k]);
        n.h0p.push_back(sol.h0_prime[k]);
        n.v0p.push_back(tp.v0_prime[c + k]);
    }
    return n;
}

AuditReport positive_x(std::string name, double lo, double hi, const XNodes& n, const AuditOptions& o,
                       const std::function<double(std::size_t)>& f, bool informational = false) {
    AuditReport r = base(name, "x", "positive", lo, hi);
    r.informational = informational;
    r.worst_value = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n.x.size(); ++k) {
        double x = n.x[k];
        if (x <= lo || x >= hi) continue;
        double v = f(k);
        finite_or_throw(r.name, v);
        ++r.samples;
        if (v < r.worst_value) {
            r.worst_value = v;
            r.worst_location = x;
        }
    }
    r.margin = r.worst_value;
    r.pass = r.samples > 0 && r.margin >= -o.audit_tol;
    return r;
}

}  // namespace

std::vector<AuditReport> audit_all(const AuditInputs& in, const AuditOptions& o) {
    if (o.samples < 1000) throw std::invalid_argument("audit_all: at least 1000 samples per check");
    const RootTable& rt = in.roots;
    double a21 = alpha_inv(rt.x21), a0 = alpha_inv(rt.x0), a1 = alpha_inv(rt.x1), a22 = alpha_inv(rt.x22);
    double smax = o.s_max;
    double mu2 = in.mu0_sq;
    std::vector<AuditReport> out;

    // (a)
    out.push_back(positive_s("a_R_tail", 4.0, smax, o, [](const Pt& p) { return -0.15 - (1.0 - 1.2 * p.h); }));
    out.back().claim = "below(-0.15)";

    // (b) combination / Q^3 <= -C on s >= max(alpha^-1(x1*), 4), x1*: Q~ = 1/3
    {
        double s_star = 2.0 * std::acosh(std::sqrt(4.5));
        double lo = std::max(s_star, 4.0);
        Vec ss = s_samples(lo, smax, o);
        Vec phi = phi_weight_cumulative(ss, o.A);
        AuditReport r = base("b_virial_tail", "s", "below(-C Q^3)", lo, smax);
        r.samples = static_cast<int>(ss.size());
        r.worst_value = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < ss.size(); ++i) {
            Pt p = at_s(ss[i]);
            double z2 = std::exp(-p.s * (1.0 - chi(p.x)) / o.A);
            double comb = (0.5 - (5.0 / 12.0) * p.q + p.h * p.h / 72.0) * z2 - (2.0 - 3.0 * p.q) * phi[i] * p.h +
                          (4.0 / 9.0) * std::abs(phi[i] * p.h) * p.h * p.h;
            finite_or_throw(r.name, comb);
            if (-comb < r.worst_value) {
                r.worst_value = -comb;
                r.worst_location = ss[i];
            }
        }
        r.fitted = r.worst_value;
        r.margin = r.worst_value;
        r.pass = r.fitted > 0.0;
        r.note = "A = " + std::to_string(o.A);
        out.push_back(r);
    }

    // (c) roots of k and its sign
    {
        auto k = [](double s) {
            double q = q_of_s(s), h = h_of_s(s);
            return 0.8 * s * h - 0.5 + (5.0 / 12.0 - 1.2 * s * h) * q;
        };
        double r1 = bisect(k, 0.1, 1.0), r2 = bisect(k, 1.0, 3.0);
        AuditReport r = positive_s("c_k_sign", 2.3, smax, o, [&](const Pt& p) { return k(p.s); });
        bool roots_ok = std::abs(r1 - 0.47) <= 0.02 && std::abs(r2 - 2.21) <= 0.02 && k(1.0) < 0.0;
        r.pass = r.pass && roots_ok;
        r.note = "roots " + std::to_string(r1) + ", " + std::to_string(r2) + "; k(1) = " + std::to_string(k(1.0));
        out.push_back(r);
    }

    XNodes xn = x_nodes(in, o.x_cap);

    // (d), (e) on the h0 grid; (d) needs B >= B0, so per-B reports are informational and
    // d_VBI records the smallest passing B
    AuditReport dsum = base("d_VBI", "x", "some B in the list passes", 0.0, o.x_cap);
    dsum.fitted = std::numeric_limits<double>::quiet_NaN();
    for (double B : o.B) {
        Vec phib = phi_weight_cumulative(xn.s, B);
        std::string tag = std::to_string(static_cast<long long>(B));
        auto vbi = [&](std::size_t k) {
            double x = xn.x[k];
            double ratio = phib[k] / zeta_sq(x, B);
            return 0.5 * xn.q[k] * zeta_log_second(x, B) - 0.1 * ratio * xn.v0p[k];
        };
        auto vbii = [&](std::size_t k) {
            double q = xn.q[k];
            double ratio = phib[k] / zeta_sq(xn.x[k], B);
            return 0.5 * q * q * q * (5.0 * q / 6.0 - 1.0) - 0.4 * ratio * xn.v0p[k];
        };
        AuditReport d = positive_x("d_VBI_B" + tag, -1.0, o.x_cap + 1.0, xn, o, vbi);
        d.lo = 0.0;
        d.hi = o.x_cap;
        double c = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < xn.x.size(); ++k)
            if (xn.x[k] >= 1.0) c = std::min(c, vbi(k) / std::pow(xn.q[k], 3));
        d.fitted = c;
        d.claim = "positive, >= c Q^3 on |x| >= 1";
        d.pass = d.pass && c > 0.0;
        d.informational = true;
        if (d.pass && !dsum.pass) {
            dsum = d;
            dsum.name = "d_VBI";
            dsum.informational = false;
            dsum.note = "smallest passing B = " + tag;
        }
        out.push_back(d);
        AuditReport e = positive_x("e_VBII_B" + tag, -1.0, o.x_cap + 1.0, xn, o, vbii);
        e.lo = 0.0;
        e.hi = o.x_cap;
        double ce = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < xn.x.size(); ++k) ce = std::min(ce, vbii(k) / std::pow(xn.q[k], 3));
        e.fitted = ce;
        e.claim = ">= c Q^3";
        e.pass = ce > 0.0;
        out.push_back(e);
    }

    if (!dsum.pass) dsum.note = "no listed B passes";
    out.push_back(dsum);

    // (f)
    out.push_back(positive_s("f_G_bound", 0.0, a21, o, [](const Pt& p) {
        double r = r_bound(p);
        double g = std::pow(0.883, 4) * p.x * p.x + ((4.0 / 9.0) * p.q * p.q - 2 * p.x * r - 1.0) * 0.808 * 0.808;
        return p.v + p.q * p.q - r * r - g;
    }));

    // (g) with the dominance h0'' >= j on the h0 grid
    double m = o.m_const;
    auto j1 = [m](const Pt& p) {
        double pp = m * m * p.x - r_bound(p);
        return p.v1 - 2 * pp * (-8.0 / 27.0 + p.v);
    };
    auto j2 = [m](const Pt& p) {
        double c = (4 * m * m - 9) / 3;
        return p.v1 - 2 * c * (m * m + p.v - c * c * p.h * p.h) * p.h;
    };
    auto h0pp = [&](std::size_t k) { return potential_v1(xn.x[k]) - 2 * xn.h0[k] * xn.h0p[k]; };
    out.push_back(positive_s("g_j1", a21, a0, o, j1));
    out.push_back(positive_s("g_j2", 0.0, a21, o, j2));
    out.push_back(positive_x("g_j1_dominance", rt.x21, rt.x0, xn, o,
                             [&](std::size_t k) { return h0pp(k) - j1(at_s(xn.s[k])); }));
    out.push_back(positive_x("g_j2_dominance", 0.0, rt.x21, xn, o,
                             [&](std::size_t k) { return h0pp(k) - j2(at_s(xn.s[k])); }));

    // (h)
    out.push_back(positive_s("h_k1", a21, a0, o, [](const Pt& p) {
        double pp = 0.808 * 0.808 * p.x - r_bound(p);
        return -2 * pp + 2 * pp * p.q - 2 * p.h * p.q + 3 * p.h * p.q * p.q;
    }));
    out.push_back(positive_s("h_k1_as_printed", a21, a0, o,
                             [](const Pt& p) {
                                 double pp = 0.808 * 0.808 * p.x - r_bound(p);
                                 return 2 * pp - 2 * (pp + p.h) * p.q + 3 * p.h * p.q * p.q;
                             },
                             true));
    out.push_back(positive_s("h_k2", 0.0, a21, o, [](const Pt& p) {
        return (4 * 0.808 * 0.808 - 9) / 3 + (1 - (4.0 / 3.0) * 0.883 * 0.883) * p.q + 1.5 * p.q * p.q;
    }));

    // (i), (j), (k)
    out.push_back(positive_s("i_i1", a22, smax, o, [](const Pt& p) {
        return (-1.038 * p.v2 + (2 * 0.808 * 0.808 + p.v) * std::abs(p.v1)) / (2 * p.q * p.q * p.q);
    }));
    out.push_back(positive_s("i_i1_expanded", a22, smax, o,
                             [](const Pt& p) {
                                 double q = p.q, h = p.h;
                                 return 2.611 - 6 * (1.038 + 0.652 * h) * q + ((50.0 / 3.0) * 1.038 + 4 * h) * q * q -
                                        (9.342 + 20 * h) * q * q * q + 6 * q * q * q * q * h;
                             },
                             true));
    out.push_back(positive_s("j_i2", a1, a22, o, [](const Pt& p) {
        double q = p.q, h = p.h, mm = 0.808;
        return 4 * mm * mm * h - 6 * mm * (1 + mm * h) * q + ((50.0 / 3.0) * mm + 4 * h) * q * q -
               (10 * h + 9 * mm) * q * q * q + 6 * h * q * q * q * q;
    }));
    out.back().note = "named hk in the prose, i2 in the display";
    out.push_back(positive_s("k_i3", a0, a1, o, [](const Pt& p) {
        return (0.808 * std::abs(p.v2) - p.v1 * (1.959 + p.v)) / (2 * p.q * p.q * p.q);
    }));
    out.push_back(positive_s("k_i3_expanded", a0, a1, o,
                             [](const Pt& p) {
                                 double q = p.q, h = p.h;
                                 return 3.842 * h - 3 * (1.959 + 1.616 * h) * q + ((50.0 / 3.0) * 0.808 + 4 * h) * q * q -
                                        (7.272 + 10 * h) * q * q * q + 6 * h * q * q * q * q;
                             },
                             true));

    // (l), (m)
    double x0 = rt.x0;
    out.push_back(positive_s("l_m", a21, a0, o, [x0](const Pt& p) {
        double q = p.q, a = p.x;
        double w = (8.0 / 27.0) * (a - x0) + 0.974;
        return -2 * (0.808 / x0) * a * std::pow(q, 4) * (6 - 50 * q / 3 + 9 * q * q) +
               2 * (2 - 3 * q) * q * q * q * p.h * (w * w + 0.652 + 2 * q * q * (1 - q));
    }));
    out.push_back(positive_s("m_mhat", 0.0, a21, o, [](const Pt& p) {
        double q = p.q, a = p.x, c = 0.652 - 2.25;
        return 2 * c * a * std::pow(q, 4) * (6 - 50 * q / 3 + 9 * q * q) +
               2 * q * q * q * p.h * (2 - 3 * q) * (c * c * a * a + 0.652 + 2 * q * q * (1 - q));
    }));

    // (n)
    out.push_back(positive_s("n_J_lower", a22, smax, o, [](const Pt& p) { return -3 * p.v2 - (1.3 + 3 * p.v) * p.v1; }));
    out.back().note = "constant 1.3 as printed";
    out.push_back(positive_s("n_J_lower_exact_constant", a22, smax, o,
                             [mu2](const Pt& p) { return -3 * p.v2 - (2 * mu2 - 8.0 / 27.0 + 3 * p.v) * p.v1; }, true));
    out.back().note = "3 mu0^2 - mu~0^2 = 2 mu0^2 - 8/27 = " + std::to_string(2 * mu2 - 8.0 / 27.0);
    out.push_back(positive_x("n_J_measured", rt.x22, o.x_cap + 1.0, xn, o,
                             [&](std::size_t k) {
                                 double x = xn.x[k], h = xn.h0[k];
                                 double v = potential_v(x);
                                 return 3 * potential_v2(x) * h - potential_v1(x) * (3 * mu2 - h * h + 3 * v);
                             },
                             true));

    // (o)
    {
        AuditReport r = positive_s("o_extra_term_identity", 0.0, 10.0, o, [](const Pt& p) {
            // nonuniform second difference in x on nodes alpha(s - d), alpha(s), alpha(s + d)
            double d = 1e-3;
            double sm = std::abs(p.s - d), sp = p.s + d;
            double xm = p.s - d < 0 ? -alpha(sm) : alpha(sm), xp = alpha(sp);
            double hm = p.x - xm, hp = xp - p.x;
            double fd = 2 * (hm * q_of_s(sp) - (hm + hp) * p.q + hp * q_of_s(sm)) / (hm * hp * (hm + hp));
            double rhs = 0.5 * p.q * p.q * p.q * (5.0 * p.q / 6.0 - 1.0);
            return 1e-5 - std::abs(-0.25 * fd - rhs);
        });
        r.claim = "|-(1/4) Q~'' - (1/2) Q~^3 ((5/6) Q~ - 1)| <= 1e-5";
        out.push_back(r);
        double sb = alpha_inv(rt.xbar);
        AuditReport sgn = positive_s("o_extra_term_sign", 0.0, smax, o, [sb](const Pt& p) {
            double f = 0.5 * p.q * p.q * p.q * (5.0 * p.q / 6.0 - 1.0);
            return p.s < sb ? f : -f;
        });
        double zero = bisect([](double s) { return q_of_s(s) - 1.2; }, 0.0, 5.0);
        sgn.note = "sign change at x = " + std::to_string(alpha(zero)) + " (paper: 0.576)";
        sgn.fitted = alpha(zero);
        sgn.pass = sgn.pass && std::abs(alpha(zero) - rt.xbar) < 1e-9;
        out.push_back(sgn);
    }

    std::sort(out.begin(), out.end(), [](const AuditReport& a, const AuditReport& b) { return a.name < b.name; });
    return out;
}

bool audit_passed(const std::vector<AuditReport>& reports) {
    for (const auto& r : reports)
        if (!r.informational && !r.pass) return false;
    return true;
}

}  // namespace kinklab
