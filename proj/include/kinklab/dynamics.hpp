#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kinklab/grid.hpp"
#include "kinklab/spectral.hpp"
#include "kinklab/weights.hpp"

namespace kinklab {

struct SimConfig {
    double x_max = 100.0;
    double h = 0.05;
    double dt = 0.02;
    double t_max = 50.0;
    double sponge_width = 20.0;
    double sponge_strength = 2.0;  // 0 disables the sponge (reflecting Dirichlet walls)
    int record_every = 5;
    double gamma = 0.1;
    double A = 20.0;
    double B = 5.0;
    double window = 10.0;  // local energy on [-window, window]
    bool linear = false;   // drop the quadratic and cubic terms

    Grid grid() const { return Grid::symmetric(x_max, h); }
    // throws std::invalid_argument
    void validate() const;
};

// w1 = phi1 - H~, w2 = d_t phi1; end nodes are Dirichlet
struct FieldState {
    Grid grid;
    Vec w1, w2;
    double t = 0.0;
};

struct BlowUp : std::runtime_error {
    double t, x;
    BlowUp(double t_, double x_);
};

// per-grid coefficients and the objects the diagnostics project on
class Dynamics {
public:
    explicit Dynamics(const SimConfig& cfg);

    const SimConfig& config() const { return cfg_; }
    const Grid& grid() const { return grid_; }
    const EigenPair& pair() const { return pair_; }
    const VirialWeights& weights() const { return weights_; }
    const Vec& h0() const { return h0_; }
    const Vec& sponge() const { return sigma_; }

    FieldState zero_state() const;
    // -dV/dw at every node; zero at the end nodes
    Vec force(const Vec& w1) const;
    // one kick-drift-kick step, sponge split symmetrically around it
    void step(FieldState& s) const;
    void step(FieldState& s, Vec& cached_force) const;

    const Vec& q() const { return q_; }
    const Vec& hk() const { return hk_; }
    const Vec& v() const { return v_; }
    const Vec& zeta_b() const { return zeta_b_; }
    double kink_energy() const { return kink_energy_; }

private:
    SimConfig cfg_;
    Grid grid_;
    Vec q_, hk_, v_, q2_, q2h_, damp_, sigma_, h0_, zeta_b_;
    double kink_energy_ = 0.0;
    EigenPair pair_;
    VirialWeights weights_;
};

// E[H~ + w1, w2] = kink energy + discrete expansion in w
double kink_energy(const Grid& g);
double energy(const FieldState& s, const Dynamics& d);
// literal trapezoid of 1/2 phi2^2 + 1/2 (phi1')^2 + 1/4 Q~^2 (1 - phi1^2)^2
double energy_direct(const FieldState& s);
double h0_norm(const FieldState& s, const Dynamics& d);
double local_energy(const FieldState& s, const Dynamics& d, double window);

struct ModalSample {
    double a1 = 0, a2 = 0, b_plus = 0, b_minus = 0, a_res = 0;
    Vec u1, u2;
    double orth1 = 0, orth2 = 0;
};

ModalSample decompose(const FieldState& s, const EigenPair& pair);
// same, with cached profiles
ModalSample decompose(const FieldState& s, const Dynamics& d);
// inverse of decompose
FieldState compose(const Grid& g, const EigenPair& pair, double a1, double a2, const Vec& u1, const Vec& u2);

struct NonlinearTerm {
    Vec n, nperp;
    double n0 = 0.0;
};

NonlinearTerm nonlinear_term(const FieldState& s, const EigenPair& pair);

// (1 - gamma d^2)^-1 f with g = 0 at both ends
Vec x_gamma_solve(const Grid& g, const Vec& f, double gamma);
// 1 - gamma d^2 applied with the same stencil; ends 0
Vec x_gamma_inverse(const Grid& g, const Vec& f, double gamma);

double functional_i(const ModalSample& m, const Dynamics& d);
double functional_j(const ModalSample& m, const Dynamics& d);
// v1, v2 and z = chi~_A zeta_B v1
struct Transformed {
    Vec v1, v2, z;
};
Transformed transformed_variables(const ModalSample& m, const Dynamics& d);

struct ModalTrack {
    std::vector<double> t, a1, a2, b_plus, b_minus, a_res, energy, h0_norm, local_energy, i_virial, j_virial;
    std::vector<double> q3_w1_sq;      // int Q~^3 w1^2
    std::vector<double> q_weighted;    // int Q~ [(w1')^2 + Q~^2 w1^2]
    std::size_t size() const { return t.size(); }
    void append(const ModalTrack& o);
};

struct RunOptions {
    double t_end = 0.0;
    int record_every = 1;
    double exit_threshold = 0.0;  // H0 x L2 norm; 0 disables
    bool virials = false;
};

struct RunResult {
    FieldState state;
    ModalTrack track;
    bool exited = false;
    double exit_time = 0.0;
    double exit_b_plus = 0.0;
    double max_norm = 0.0;
    std::optional<BlowUp> blowup;
};

RunResult run(FieldState s, const Dynamics& d, const RunOptions& opt);

// discrete-time modes of the leapfrog map on span(phi0): w2 = rate * w1
double leapfrog_stable_rate(double mu0, double dt);
double leapfrog_unstable_rate(double mu0, double dt);
// (phi0, rate phi0) scaled by amp; ends 0
FieldState mode_state(const Dynamics& d, double amp, double rate);

// least-squares slope of log|y| over t in [t0, t1]
double fit_exponent(const std::vector<double>& t, const std::vector<double>& y, double t0, double t1);

struct ShootConfig {
    double eps = 1e-3;
    double K = 10.0;
    double exit_factor = 10.0;     // delta_exit = exit_factor * eps
    double width_factor = 1e-10;   // stop once the bracket is below width_factor * eps^2
    double u_amplitude = 0.0;      // optional odd u-component, in units of eps
    double restart_every = 5.0;
    double lookahead = 25.0;
    unsigned points_per_round = 3; // fixed k-section, independent of thread count
    unsigned threads = 0;          // 0: KINKLAB_THREADS or hardware
};

struct ShootSample {
    double b_plus0, exit_time;
    int side;
    bool exited;
};

struct ShootResult {
    double eps = 0.0, delta_exit = 0.0;
    double bracket_lo = 0.0, bracket_hi = 0.0;
    double exit_time_lo = 0.0, exit_time_hi = 0.0;  // endpoints -K eps^2 and +K eps^2
    int side_lo = 0, side_hi = 0;
    double b_plus_star = 0.0;
    double width = 0.0;
    int rounds = 0;
    std::vector<ShootSample> samples;
    std::vector<std::pair<double, double>> corrections;  // (restart time, Y+ correction)
    bool monotone = false;
    double exit_law_prediction = 0.0;
    double exit_law_error = 0.0;  // worst relative error over both endpoints
    double max_norm = 0.0;
    double local_energy_ratio = 0.0;
    double tail_fraction = 0.0;
    bool survived = false;
    ModalTrack track;
};

// throws std::runtime_error (bracket error) when both endpoints leave on the same side
ShootResult shoot_manifold(const Dynamics& d, const ShootConfig& sc);

struct DichotomyReport {
    std::size_t samples = 0;
    double c_plus = 0.0, c_minus = 0.0, c_fit = 0.0;
    double b_increase_fraction = 0.0;  // share of dominated samples where b+^2 - b-^2 grows
    std::size_t dominated = 0;
};

// throws std::invalid_argument for fewer than 20 samples
DichotomyReport dichotomy_track(const ModalTrack& track, double mu0);

unsigned worker_count(unsigned requested = 0);

}  // namespace kinklab
