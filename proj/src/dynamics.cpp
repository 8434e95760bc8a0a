#include "kinklab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <limits>
#include <string>
#include <thread>

#include "kinklab/darboux.hpp"
#include "kinklab/profiles.hpp"

namespace kinklab {

void SimConfig::validate() const {
    if (!(x_max > 0) || !(h > 0) || !(dt > 0) || !(t_max >= 0))
        throw std::invalid_argument("sim config: x_max, h, dt must be positive and t_max nonnegative");
    if (dt > 0.5 * h + 1e-15) throw std::invalid_argument("sim config: dt must not exceed 0.5 h");
    if (sponge_strength < 0) throw std::invalid_argument("sim config: sponge_strength must be >= 0");
    if (sponge_strength > 0 && sponge_width < 10.0) throw std::invalid_argument("sim config: sponge_width must be >= 10");
    if (sponge_strength > 0 && sponge_width >= x_max) throw std::invalid_argument("sim config: sponge wider than domain");
    if (record_every < 1) throw std::invalid_argument("sim config: record_every must be >= 1");
    if (!(gamma > 0)) throw std::invalid_argument("sim config: gamma must be positive");
    if (!(A > 2) || !(B > 2)) throw std::invalid_argument("sim config: A and B must exceed 2");
    if (!(window > 0) || window >= x_max) throw std::invalid_argument("sim config: window must lie inside the domain");
}

BlowUp::BlowUp(double t_, double x_)
    : std::runtime_error("blow-up at t = " + std::to_string(t_) + ", x = " + std::to_string(x_)), t(t_), x(x_) {}

Dynamics::Dynamics(const SimConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    grid_ = cfg_.grid();
    std::size_t n = grid_.n;
    q_.resize(n);
    hk_.resize(n);
    v_.resize(n);
    q2_.resize(n);
    q2h_.resize(n);
    sigma_.assign(n, 0.0);
    damp_.assign(n, 1.0);
    double edge = cfg_.x_max - cfg_.sponge_width;
    for (std::size_t i = 0; i < n; ++i) {
        auto p = profile_at(grid_.x(i));
        q_[i] = p.q;
        hk_[i] = p.h;
        v_[i] = v_of_qh(p.q);
        q2_[i] = p.q * p.q;
        q2h_[i] = p.q * p.q * p.h;
        double ax = std::abs(grid_.x(i));
        if (cfg_.sponge_strength > 0 && ax > edge) {
            double r = (ax - edge) / cfg_.sponge_width;
            sigma_[i] = cfg_.sponge_strength * r * r * r;
            damp_[i] = std::exp(-0.5 * sigma_[i] * cfg_.dt);
        }
    }
    pair_ = ground_state(grid_);
    auto sol = h0_riccati(pair_.mu0_sq, Grid::half_line(cfg_.x_max, grid_.h()));
    h0_ = h0_full(sol, grid_);
    weights_ = virial_weights(grid_, cfg_.A, cfg_.B);
    zeta_b_.resize(n);
    for (std::size_t i = 0; i < n; ++i) zeta_b_[i] = std::sqrt(zeta_sq(grid_.x(i), cfg_.B));
    kink_energy_ = kinklab::kink_energy(grid_);
}

FieldState Dynamics::zero_state() const { return {grid_, Vec(grid_.n, 0.0), Vec(grid_.n, 0.0), 0.0}; }

Vec Dynamics::force(const Vec& w) const {
    std::size_t n = grid_.n;
    double ih2 = 1.0 / (grid_.h() * grid_.h());
    Vec f(n, 0.0);
    if (cfg_.linear) {
        for (std::size_t i = 1; i + 1 < n; ++i) f[i] = (w[i + 1] - 2 * w[i] + w[i - 1]) * ih2 - v_[i] * w[i];
    } else {
        for (std::size_t i = 1; i + 1 < n; ++i) {
            double u = w[i];
            f[i] = (w[i + 1] - 2 * u + w[i - 1]) * ih2 - v_[i] * u - u * u * (3 * q2h_[i] + q2_[i] * u);
        }
    }
    return f;
}

void Dynamics::step(FieldState& s) const {
    Vec f = force(s.w1);
    step(s, f);
}

void Dynamics::step(FieldState& s, Vec& f) const {
    std::size_t n = grid_.n;
    double dt = cfg_.dt, half = 0.5 * dt;
    bool sponge = cfg_.sponge_strength > 0;
    if (sponge)
        for (std::size_t i = 0; i < n; ++i) s.w2[i] *= damp_[i];
    for (std::size_t i = 1; i + 1 < n; ++i) s.w2[i] += half * f[i];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        s.w1[i] += dt * s.w2[i];
        if (!std::isfinite(s.w1[i])) throw BlowUp(s.t + dt, grid_.x(i));
    }
    f = force(s.w1);
    for (std::size_t i = 1; i + 1 < n; ++i) s.w2[i] += half * f[i];
    if (sponge)
        for (std::size_t i = 0; i < n; ++i) s.w2[i] *= damp_[i];
    s.t += dt;
}

double kink_energy(const Grid& g) {
    Vec e = sample(g, [](double x) {
        double q = q_tilde(x);
        return q * q * q * q / 6.0;
    });
    return trapz(g, e);
}

namespace {

double gradient_sq(const Grid& g, const Vec& w) {
    double s = 0.0, h = g.h();
    for (std::size_t i = 0; i + 1 < g.n; ++i) {
        double d = (w[i + 1] - w[i]) / h;
        s += d * d;
    }
    return s * h;
}

double perturbation_energy(const FieldState& s, const Dynamics& d) {
    const Grid& g = s.grid;
    const Vec &q = d.q(), &hk = d.hk(), &v = d.v();
    Vec dens(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        double w = s.w1[i], q2 = q[i] * q[i];
        dens[i] = 0.5 * s.w2[i] * s.w2[i] + 0.5 * v[i] * w * w + q2 * hk[i] * w * w * w + 0.25 * q2 * w * w * w * w;
    }
    return trapz(g, dens) + 0.5 * gradient_sq(g, s.w1);
}

}  // namespace

double energy(const FieldState& s, const Dynamics& d) { return d.kink_energy() + perturbation_energy(s, d); }

double energy_direct(const FieldState& s) {
    const Grid& g = s.grid;
    Vec dw = diff1(g, s.w1);
    Vec dens(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        auto p = profile_at(g.x(i));
        double phi = p.h + s.w1[i];
        double dphi = p.q * p.q / 3.0 + dw[i];
        double m = 1.0 - phi * phi;
        dens[i] = 0.5 * s.w2[i] * s.w2[i] + 0.5 * dphi * dphi + 0.25 * p.q * p.q * m * m;
    }
    return trapz(g, dens);
}

double h0_norm(const FieldState& s, const Dynamics& d) {
    const Vec& q = d.q();
    Vec dens(s.grid.n);
    for (std::size_t i = 0; i < s.grid.n; ++i) dens[i] = q[i] * q[i] * s.w1[i] * s.w1[i] + s.w2[i] * s.w2[i];
    return std::sqrt(gradient_sq(s.grid, s.w1) + trapz(s.grid, dens));
}

double local_energy(const FieldState& s, const Dynamics& d, double window) {
    const Vec& q = d.q();
    Vec dw = diff1(s.grid, s.w1);
    Vec dens(s.grid.n);
    for (std::size_t i = 0; i < s.grid.n; ++i)
        dens[i] = s.w2[i] * s.w2[i] + dw[i] * dw[i] + q[i] * q[i] * s.w1[i] * s.w1[i];
    return 0.5 * trapz_window(s.grid, dens, -window, window);
}

namespace {

ModalSample decompose_with(const FieldState& s, const EigenPair& pair, const Vec& q, const Vec& hk) {
    if (!s.grid.same_as(pair.grid)) throw std::invalid_argument("decompose: eigenpair grid differs from state grid");
    const Grid& g = s.grid;
    const Vec& p = pair.phi0;
    double nn = trapz(g, p, p);
    ModalSample m;
    m.a1 = trapz(g, s.w1, p) / nn;
    m.a2 = trapz(g, s.w2, p) / (pair.mu0 * nn);
    m.b_plus = 0.5 * (m.a1 + m.a2);
    m.b_minus = 0.5 * (m.a1 - m.a2);
    m.u1.resize(g.n);
    m.u2.resize(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        m.u1[i] = s.w1[i] - m.a1 * p[i];
        m.u2[i] = s.w2[i] - pair.mu0 * m.a2 * p[i];
    }
    m.orth1 = trapz(g, m.u1, p);
    m.orth2 = trapz(g, m.u2, p);
    Vec wres(g.n), hw(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        wres[i] = q[i] * q[i] * hk[i] * hk[i] * hk[i];
        hw[i] = hk[i] * wres[i];
    }
    m.a_res = trapz(g, m.u1, wres) / trapz(g, hw);
    return m;
}

void profile_arrays(const Grid& g, Vec& q, Vec& hk) {
    q.resize(g.n);
    hk.resize(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        auto p = profile_at(g.x(i));
        q[i] = p.q;
        hk[i] = p.h;
    }
}

}  // namespace

ModalSample decompose(const FieldState& s, const EigenPair& pair) {
    Vec q, hk;
    profile_arrays(s.grid, q, hk);
    return decompose_with(s, pair, q, hk);
}

ModalSample decompose(const FieldState& s, const Dynamics& d) { return decompose_with(s, d.pair(), d.q(), d.hk()); }

FieldState compose(const Grid& g, const EigenPair& pair, double a1, double a2, const Vec& u1, const Vec& u2) {
    FieldState s{g, Vec(g.n), Vec(g.n), 0.0};
    for (std::size_t i = 0; i < g.n; ++i) {
        s.w1[i] = a1 * pair.phi0[i] + u1[i];
        s.w2[i] = pair.mu0 * a2 * pair.phi0[i] + u2[i];
    }
    return s;
}

NonlinearTerm nonlinear_term(const FieldState& s, const EigenPair& pair) {
    const Grid& g = s.grid;
    auto m = decompose(s, pair);
    NonlinearTerm nt;
    nt.n.resize(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        auto p = profile_at(g.x(i));
        double w = m.a1 * pair.phi0[i] + m.u1[i];
        nt.n[i] = p.q * p.q * (3 * p.h * w * w + w * w * w);
    }
    double nn = trapz(g, pair.phi0, pair.phi0);
    nt.n0 = trapz(g, nt.n, pair.phi0) / nn;
    nt.nperp.resize(g.n);
    for (std::size_t i = 0; i < g.n; ++i) nt.nperp[i] = nt.n[i] - nt.n0 * pair.phi0[i];
    return nt;
}

Vec x_gamma_solve(const Grid& g, const Vec& f, double gamma) {
    if (!(gamma > 0)) throw std::invalid_argument("x_gamma_solve: gamma must be positive");
    if (f.size() != g.n) throw std::invalid_argument("x_gamma_solve: grid mismatch");
    std::size_t n = g.n;
    double k = gamma / (g.h() * g.h());
    double diag = 1.0 + 2.0 * k;
    Vec c(n, 0.0), d(n, 0.0), out(n, 0.0);
    double b = diag;
    c[1] = -k / b;
    d[1] = f[1] / b;
    for (std::size_t i = 2; i + 1 < n; ++i) {
        b = diag + k * c[i - 1];
        if (!(std::abs(b) > 0)) throw std::logic_error("x_gamma_solve: singular pivot");
        c[i] = -k / b;
        d[i] = (f[i] + k * d[i - 1]) / b;
    }
    out[n - 2] = d[n - 2];
    for (std::size_t i = n - 2; i-- > 1;) out[i] = d[i] - c[i] * out[i + 1];
    return out;
}

Vec x_gamma_inverse(const Grid& g, const Vec& f, double gamma) {
    double k = gamma / (g.h() * g.h());
    Vec out(g.n, 0.0);
    for (std::size_t i = 1; i + 1 < g.n; ++i) out[i] = f[i] - k * (f[i + 1] - 2 * f[i] + f[i - 1]);
    return out;
}

double functional_i(const ModalSample& m, const Dynamics& d) {
    const Grid& g = d.grid();
    const auto& w = d.weights();
    Vec du = diff1(g, m.u1);
    Vec dens(g.n);
    for (std::size_t i = 0; i < g.n; ++i) dens[i] = (w.phi_a[i] * du[i] + 0.5 * w.phi_a_prime[i] * m.u1[i]) * m.u2[i];
    return trapz(g, dens);
}

Transformed transformed_variables(const ModalSample& m, const Dynamics& d) {
    const Grid& g = d.grid();
    const auto& w = d.weights();
    Vec c1(g.n), c2(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        c1[i] = w.chi_b[i] * m.u1[i];
        c2[i] = w.chi_b[i] * m.u2[i];
    }
    Transformed t;
    t.v1 = x_gamma_solve(g, u_apply(c1, g, d.h0()), d.config().gamma);
    t.v2 = x_gamma_solve(g, u_apply(c2, g, d.h0()), d.config().gamma);
    t.z.resize(g.n);
    for (std::size_t i = 0; i < g.n; ++i) t.z[i] = w.chi_a[i] * d.zeta_b()[i] * t.v1[i];
    return t;
}

double functional_j(const ModalSample& m, const Dynamics& d) {
    const Grid& g = d.grid();
    const auto& w = d.weights();
    auto t = transformed_variables(m, d);
    Vec dv = diff1(g, t.v1);
    Vec dens(g.n);
    for (std::size_t i = 0; i < g.n; ++i)
        dens[i] = (w.psi_ab[i] * dv[i] + 0.5 * w.psi_ab_prime[i] * t.v1[i]) * t.v2[i];
    return trapz(g, dens);
}

void ModalTrack::append(const ModalTrack& o) {
    auto cat = [](std::vector<double>& a, const std::vector<double>& b) { a.insert(a.end(), b.begin(), b.end()); };
    cat(t, o.t);
    cat(a1, o.a1);
    cat(a2, o.a2);
    cat(b_plus, o.b_plus);
    cat(b_minus, o.b_minus);
    cat(a_res, o.a_res);
    cat(energy, o.energy);
    cat(h0_norm, o.h0_norm);
    cat(local_energy, o.local_energy);
    cat(i_virial, o.i_virial);
    cat(j_virial, o.j_virial);
    cat(q3_w1_sq, o.q3_w1_sq);
    cat(q_weighted, o.q_weighted);
}

namespace {

void record(ModalTrack& tr, const FieldState& s, const Dynamics& d, bool virials) {
    auto m = decompose(s, d);
    tr.t.push_back(s.t);
    tr.a1.push_back(m.a1);
    tr.a2.push_back(m.a2);
    tr.b_plus.push_back(m.b_plus);
    tr.b_minus.push_back(m.b_minus);
    tr.a_res.push_back(m.a_res);
    tr.energy.push_back(energy(s, d));
    tr.h0_norm.push_back(h0_norm(s, d));
    tr.local_energy.push_back(local_energy(s, d, d.config().window));
    tr.i_virial.push_back(virials ? functional_i(m, d) : 0.0);
    tr.j_virial.push_back(virials ? functional_j(m, d) : 0.0);
    const Vec& q = d.q();
    Vec dw = diff1(s.grid, s.w1);
    Vec a(s.grid.n), b(s.grid.n);
    for (std::size_t i = 0; i < s.grid.n; ++i) {
        double w = s.w1[i], q2 = q[i] * q[i];
        a[i] = q2 * q[i] * w * w;
        b[i] = q[i] * (dw[i] * dw[i] + q2 * w * w);
    }
    tr.q3_w1_sq.push_back(trapz(s.grid, a));
    tr.q_weighted.push_back(trapz(s.grid, b));
}

}  // namespace

RunResult run(FieldState s, const Dynamics& d, const RunOptions& opt) {
    if (!s.grid.same_as(d.grid())) throw std::invalid_argument("run: state grid differs from configuration grid");
    if (opt.record_every < 1) throw std::invalid_argument("run: record_every must be >= 1");
    RunResult r;
    double dt = d.config().dt;
    double t0 = s.t;
    auto steps = static_cast<long>(std::llround((opt.t_end - t0) / dt));
    Vec f = d.force(s.w1);
    record(r.track, s, d, opt.virials);
    r.max_norm = r.track.h0_norm.back();
    try {
        for (long k = 1; k <= steps; ++k) {
            d.step(s, f);
            s.t = t0 + static_cast<double>(k) * dt;
            bool rec = k % opt.record_every == 0 || k == steps;
            double nrm = 0.0;
            if (opt.exit_threshold > 0 || rec) {
                nrm = h0_norm(s, d);
                r.max_norm = std::max(r.max_norm, nrm);
            }
            if (opt.exit_threshold > 0 && nrm > opt.exit_threshold) {
                record(r.track, s, d, opt.virials);
                r.exited = true;
                r.exit_time = s.t;
                r.exit_b_plus = r.track.b_plus.back();
                break;
            }
            if (rec) record(r.track, s, d, opt.virials);
        }
    } catch (const BlowUp& e) {
        r.blowup = e;
    }
    r.state = std::move(s);
    return r;
}

double leapfrog_stable_rate(double mu0, double dt) { return -mu0 * std::sqrt(1.0 + 0.25 * mu0 * mu0 * dt * dt); }
double leapfrog_unstable_rate(double mu0, double dt) { return mu0 * std::sqrt(1.0 + 0.25 * mu0 * mu0 * dt * dt); }

FieldState mode_state(const Dynamics& d, double amp, double rate) {
    FieldState s = d.zero_state();
    const Vec& p = d.pair().phi0;
    for (std::size_t i = 1; i + 1 < s.grid.n; ++i) {
        s.w1[i] = amp * p[i];
        s.w2[i] = amp * rate * p[i];
    }
    return s;
}

double fit_exponent(const std::vector<double>& t, const std::vector<double>& y, double t0, double t1) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < t.size() && i < y.size(); ++i) {
        if (t[i] < t0 || t[i] > t1 || y[i] == 0.0) continue;
        double ly = std::log(std::abs(y[i]));
        sx += t[i];
        sy += ly;
        sxx += t[i] * t[i];
        sxy += t[i] * ly;
        ++n;
    }
    if (n < 2) throw std::invalid_argument("fit_exponent: fewer than two usable samples");
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

unsigned worker_count(unsigned requested) {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (requested > 0) return requested;
    if (const char* env = std::getenv("KINKLAB_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return std::min(hw, static_cast<unsigned>(v));
    }
    return hw;
}

namespace {

struct Probe {
    double exit_time;
    int side;
    bool exited;
};

FieldState shifted(const FieldState& base, const FieldState& dir, double c) {
    FieldState s = base;
    for (std::size_t i = 0; i < s.grid.n; ++i) {
        s.w1[i] += c * dir.w1[i];
        s.w2[i] += c * dir.w2[i];
    }
    return s;
}

Probe probe(const FieldState& base, const FieldState& dir, double c, const Dynamics& d, double t_end, double thr) {
    RunOptions o;
    o.t_end = t_end;
    o.record_every = 1 << 30;
    o.exit_threshold = thr;
    auto r = run(shifted(base, dir, c), d, o);
    if (r.blowup) return {r.blowup->t, r.track.b_plus.back() >= 0 ? 1 : -1, true};
    if (r.exited) return {r.exit_time, r.exit_b_plus >= 0 ? 1 : -1, true};
    return {t_end, r.track.b_plus.back() >= 0 ? 1 : -1, false};
}

struct Bracket {
    double lo, hi;
    Probe p_lo, p_hi;
    int rounds = 0;
    std::vector<ShootSample> samples;
};

Bracket k_section(const FieldState& base, const FieldState& dir, double lo, double hi, const Dynamics& d,
                  double t_end, double thr, double width, unsigned k, unsigned threads) {
    auto eval = [&](const std::vector<double>& cs) {
        std::vector<Probe> out(cs.size());
        for (std::size_t start = 0; start < cs.size(); start += threads) {
            std::size_t stop = std::min(cs.size(), start + threads);
            if (stop - start == 1) {
                out[start] = probe(base, dir, cs[start], d, t_end, thr);
                continue;
            }
            std::vector<std::future<Probe>> fut;
            for (std::size_t j = start; j < stop; ++j)
                fut.push_back(std::async(std::launch::async, probe, std::cref(base), std::cref(dir), cs[j],
                                         std::cref(d), t_end, thr));
            for (std::size_t j = start; j < stop; ++j) out[j] = fut[j - start].get();
        }
        return out;
    };
    Bracket b{lo, hi, {}, {}, 0, {}};
    auto ends = eval({lo, hi});
    b.p_lo = ends[0];
    b.p_hi = ends[1];
    b.samples.push_back({lo, ends[0].exit_time, ends[0].side, ends[0].exited});
    b.samples.push_back({hi, ends[1].exit_time, ends[1].side, ends[1].exited});
    if (ends[0].side == ends[1].side)
        throw std::runtime_error("shoot: both bracket endpoints leave on the same side; increase K");
    int s_lo = ends[0].side;
    while (b.hi - b.lo >= width) {
        std::vector<double> cs(k);
        for (unsigned j = 0; j < k; ++j) cs[j] = b.lo + (b.hi - b.lo) * (j + 1) / (k + 1);
        auto ps = eval(cs);
        double nlo = cs[k - 1], nhi = b.hi;
        for (unsigned j = 0; j < k; ++j)
            b.samples.push_back({cs[j], ps[j].exit_time, ps[j].side, ps[j].exited});
        for (unsigned j = 0; j < k; ++j)
            if (ps[j].side != s_lo) {
                nhi = cs[j];
                nlo = j == 0 ? b.lo : cs[j - 1];
                break;
            }
        if (nlo == b.lo && nhi == b.hi) break;
        b.lo = nlo;
        b.hi = nhi;
        ++b.rounds;
    }
    return b;
}

double trapz_track(const std::vector<double>& t, const std::vector<double>& y, double t0, double t1) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i)
        if (t[i] >= t0 - 1e-12 && t[i + 1] <= t1 + 1e-12) s += 0.5 * (t[i + 1] - t[i]) * (y[i] + y[i + 1]);
    return s;
}

}  // namespace

ShootResult shoot_manifold(const Dynamics& d, const ShootConfig& sc) {
    if (!(sc.eps > 0) || sc.eps > 1e-2) throw std::invalid_argument("shoot: eps must lie in (0, 1e-2]");
    if (!(sc.K > 0) || sc.points_per_round < 1) throw std::invalid_argument("shoot: K and points_per_round must be positive");
    const SimConfig& cfg = d.config();
    double mu = d.pair().mu0, dt = cfg.dt, eps = sc.eps;
    unsigned threads = std::min(worker_count(sc.threads), sc.points_per_round);

    FieldState base = mode_state(d, eps, leapfrog_stable_rate(mu, dt));
    if (sc.u_amplitude != 0.0) {
        for (std::size_t i = 1; i + 1 < base.grid.n; ++i) {
            double x = base.grid.x(i);
            base.w1[i] += sc.u_amplitude * eps * x * std::exp(-0.25 * x * x);
        }
    }
    FieldState dir = mode_state(d, 1.0, leapfrog_unstable_rate(mu, dt));

    ShootResult res;
    res.eps = eps;
    res.delta_exit = sc.exit_factor * eps;
    double c_max = sc.K * eps * eps, width = sc.width_factor * eps * eps;
    auto b0 = k_section(base, dir, -c_max, c_max, d, cfg.t_max, res.delta_exit, width, sc.points_per_round, threads);
    res.exit_time_lo = b0.p_lo.exit_time;
    res.exit_time_hi = b0.p_hi.exit_time;
    res.side_lo = b0.p_lo.side;
    res.side_hi = b0.p_hi.side;
    res.bracket_lo = b0.lo;
    res.bracket_hi = b0.hi;
    res.width = b0.hi - b0.lo;
    res.rounds = b0.rounds;
    res.b_plus_star = 0.5 * (b0.lo + b0.hi);
    res.samples = b0.samples;

    // exit times grow toward the bracket interior on both sides
    auto sorted = res.samples;
    std::sort(sorted.begin(), sorted.end(), [](const ShootSample& a, const ShootSample& b) { return a.b_plus0 < b.b_plus0; });
    res.monotone = true;
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        const auto &a = sorted[i], &b = sorted[i + 1];
        double tol = 2 * dt;
        if (b.b_plus0 <= res.b_plus_star && b.exit_time + tol < a.exit_time) res.monotone = false;
        if (a.b_plus0 >= res.b_plus_star && a.exit_time + tol < b.exit_time) res.monotone = false;
    }
    res.exit_law_prediction = std::log(res.delta_exit / c_max) / mu;
    res.exit_law_error = std::max(std::abs(res.exit_time_lo - res.exit_law_prediction),
                                  std::abs(res.exit_time_hi - res.exit_law_prediction)) /
                         res.exit_law_prediction;

    // stagger-and-step: advance one restart interval, then re-bisect a Y+ correction
    FieldState s = shifted(base, dir, res.b_plus_star);
    RunOptions seg;
    seg.record_every = cfg.record_every;
    seg.exit_threshold = res.delta_exit;
    seg.virials = true;
    res.survived = true;
    double t = 0.0;
    bool first = true;
    while (t < cfg.t_max - 0.5 * dt) {
        double t_next = std::min(cfg.t_max, t + sc.restart_every);
        if (!first) {
            double horizon = t + sc.lookahead;
            double lo = -c_max, hi = c_max;
            Bracket bk;
            for (int tries = 0;; ++tries) {
                try {
                    bk = k_section(s, dir, lo, hi, d, horizon, res.delta_exit, width, sc.points_per_round, threads);
                    break;
                } catch (const std::runtime_error&) {
                    if (tries == 3) throw;
                    lo *= 10;
                    hi *= 10;
                }
            }
            double c = 0.5 * (bk.lo + bk.hi);
            res.corrections.emplace_back(t, c);
            s = shifted(s, dir, c);
        }
        seg.t_end = t_next;
        auto r = run(s, d, seg);
        if (!first) {
            ModalTrack tail = r.track;
            for (auto* v : {&tail.t, &tail.a1, &tail.a2, &tail.b_plus, &tail.b_minus, &tail.a_res, &tail.energy,
                            &tail.h0_norm, &tail.local_energy, &tail.i_virial, &tail.j_virial, &tail.q3_w1_sq,
                            &tail.q_weighted})
                v->erase(v->begin());
            res.track.append(tail);
        } else {
            res.track = r.track;
        }
        res.max_norm = std::max(res.max_norm, r.max_norm);
        if (r.exited || r.blowup) {
            res.survived = false;
            break;
        }
        s = r.state;
        t = t_next;
        first = false;
    }
    const auto& tr = res.track;
    res.local_energy_ratio = tr.local_energy.back() / tr.local_energy.front();
    double total = trapz_track(tr.t, tr.q_weighted, 0.0, tr.t.back());
    double tail = trapz_track(tr.t, tr.q_weighted, 0.5 * tr.t.back(), tr.t.back());
    res.tail_fraction = total > 0 ? tail / total : 0.0;
    return res;
}

DichotomyReport dichotomy_track(const ModalTrack& tr, double mu0) {
    std::size_t n = tr.size();
    if (n < 20) throw std::invalid_argument("dichotomy_track: track has fewer than 20 samples");
    DichotomyReport rep;
    rep.samples = n;
    auto deriv = [&](const std::vector<double>& y, std::size_t k) {
        double dt = (tr.t[k + 2] - tr.t[k - 2]) / 4.0;
        return (-y[k + 2] + 8 * y[k + 1] - 8 * y[k - 1] + y[k - 2]) / (12 * dt);
    };
    std::vector<double> dp(n), dm(n), den(n);
    for (std::size_t k = 2; k + 2 < n; ++k) {
        double bp = tr.b_plus[k], bm = tr.b_minus[k];
        dp[k] = deriv(tr.b_plus, k);
        dm[k] = deriv(tr.b_minus, k);
        den[k] = bp * bp + bm * bm + tr.q3_w1_sq[k];
        if (den[k] <= 0) continue;
        rep.c_plus = std::max(rep.c_plus, std::abs(dp[k] - mu0 * bp) / den[k]);
        rep.c_minus = std::max(rep.c_minus, std::abs(dm[k] + mu0 * bm) / den[k]);
    }
    rep.c_fit = std::max(rep.c_plus, rep.c_minus);
    std::size_t up = 0;
    for (std::size_t k = 2; k + 2 < n; ++k) {
        double bp = tr.b_plus[k], bm = tr.b_minus[k];
        double quad = 2 * mu0 * (bp * bp + bm * bm);
        double rem = 2 * rep.c_fit * den[k] * (std::abs(bp) + std::abs(bm));
        if (quad < 2 * rem) continue;
        ++rep.dominated;
        if (2 * bp * dp[k] - 2 * bm * dm[k] > 0) ++up;
    }
    rep.b_increase_fraction = rep.dominated ? static_cast<double>(up) / rep.dominated : 0.0;
    return rep;
}

}  // namespace kinklab
