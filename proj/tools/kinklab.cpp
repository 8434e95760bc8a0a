#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>

#include "CLI11.hpp"
#include "artifacts.hpp"
#include "kinklab/acceptance.hpp"
#include "kinklab/audit.hpp"
#include "kinklab/darboux.hpp"
#include "kinklab/dynamics.hpp"
#include "kinklab/profiles.hpp"
#include "kinklab/resonance.hpp"
#include "kinklab/spectral.hpp"

using namespace kinklab;
using namespace kinklab::cli;
using nlohmann::json;

namespace {

constexpr double xbar_paper = 0.576;

json roots_json() {
    auto r = roots();
    return {{"x0", r.x0}, {"x1", r.x1}, {"x21", r.x21}, {"x22", r.x22}, {"xbar", r.xbar}, {"xbar_paper", xbar_paper}};
}

// ---- profiles

struct ProfilesArgs {
    std::string grid = "60,6001";
    std::string out = "profiles.csv";
};

Grid parse_grid(const std::string& spec) {
    auto comma = spec.find(',');
    if (comma == std::string::npos) throw UsageError("--grid expects L,N");
    double L = 0;
    long n = 0;
    try {
        L = std::stod(spec.substr(0, comma));
        n = std::stol(spec.substr(comma + 1));
    } catch (const std::exception&) {
        throw UsageError("--grid expects L,N");
    }
    if (!(L > 0) || n < 3) throw UsageError("--grid needs L > 0 and N >= 3");
    return Grid(-L, L, static_cast<std::size_t>(n));
}

void emit_profiles(const Grid& g, const std::string& out) {
    auto p = sample_profiles(g);
    Vec x = g.nodes();
    write_csv(out, {"x", "alpha_inv", "Qt", "Ht", "V", "V1", "V2"}, {&x, &p.s, &p.q, &p.h, &p.v, &p.v1, &p.v2});
}

int cmd_profiles(const ProfilesArgs& a) {
    Grid g = parse_grid(a.grid);
    Manifest m("profiles", {{"grid", a.grid}});
    emit_profiles(g, a.out);
    m.add_output(a.out);
    m.write(sibling(a.out, ".manifest.json"));
    return 0;
}

// ---- roots

int cmd_roots(const std::string& out) {
    json j = roots_json();
    if (out.empty()) {
        std::cout << j.dump(2) << '\n';
        return 0;
    }
    Manifest m("roots", {});
    write_json(out, j);
    m.add_output(out);
    m.write(sibling(out, ".manifest.json"));
    return 0;
}

// ---- spectrum

struct SpectrumArgs {
    double xmax = 60.0;
    double h = 0.02;
    std::string out = "eig.json";
};

json emit_spectrum(const Grid& g, const std::string& out, std::vector<std::string>& written) {
    auto p = ground_state(g);
    std::string csv = sibling(out, "_phi0.csv");
    Vec x = g.nodes();
    write_csv(csv, {"x", "phi0"}, {&x, &p.phi0});
    json j = {{"mu0", p.mu0},
              {"mu0_sq", p.mu0_sq},
              {"residual", p.residual},
              {"negative_count", p.negative_count},
              {"phi0_csv_path", std::filesystem::path(csv).filename().string()},
              {"grid", {{"x_max", g.x_max}, {"h", g.h()}, {"n", g.n}}}};
    write_json(out, j);
    written.push_back(csv);
    written.push_back(out);
    return j;
}

int cmd_spectrum(const SpectrumArgs& a) {
    if (!(a.xmax > 0) || !(a.h > 0) || a.h >= a.xmax) throw UsageError("spectrum needs 0 < h < xmax");
    Manifest m("spectrum", {{"xmax", fmt17(a.xmax)}, {"h", fmt17(a.h)}});
    std::vector<std::string> w;
    emit_spectrum(Grid::symmetric(a.xmax, a.h), a.out, w);
    for (auto& f : w) m.add_output(f);
    m.write(sibling(a.out, ".manifest.json"));
    return 0;
}

// ---- darboux

struct DarbouxArgs {
    double xmax = 60.0;
    double h = darboux_default_h;
    std::string spectrum;
    std::string out = "v0.csv";
    bool xmax_set = false, h_set = false;
};

struct DarbouxOutcome {
    json report;
    bool pass = true;
};

DarbouxOutcome emit_darboux(double xmax, double h, const std::string& out, std::vector<std::string>& written,
                            const json* spectrum = nullptr) {
    Grid full = Grid::symmetric(xmax, h);
    auto pair = ground_state(full);
    double mu0_sq = spectrum ? spectrum->at("mu0_sq").get<double>() : pair.mu0_sq;
    auto ode = h0_riccati(mu0_sq, Grid::half_line(xmax, h));
    auto tp = transformed_potential(ode);
    auto checks = h0_bound_audit(ode, roots());

    std::size_t c = tp.grid.center();
    Vec x = ode.grid.nodes(), v0(ode.grid.n), v0p(ode.grid.n);
    for (std::size_t k = 0; k < ode.grid.n; ++k) {
        v0[k] = tp.v0[c + k];
        v0p[k] = tp.v0_prime[c + k];
    }
    write_csv(out, {"x", "h0", "h0_prime", "V0", "V0_prime"}, {&x, &ode.h0, &ode.h0_prime, &v0, &v0p});

    DarbouxOutcome o;
    json list = json::array();
    for (std::size_t i = 0; i < checks.size(); ++i) {
        bool core = i < 6;
        list.push_back({{"check_name", checks[i].name},
                        {"interval", {checks[i].lo, checks[i].hi}},
                        {"worst_margin", checks[i].worst_margin},
                        {"worst_location", checks[i].worst_location},
                        {"pass", checks[i].pass},
                        {"informational", !core}});
        if (core && !checks[i].pass) o.pass = false;
    }
    auto from_phi0 = h0_from_phi0(pair);
    double gap = 0.0;
    for (std::size_t k = 0; k < from_phi0.grid.n && from_phi0.grid.x(k) <= 40.0; ++k)
        gap = std::max(gap, std::abs(from_phi0.h0[k] - ode.h0[k]));
    o.report = {{"checks", list},
                {"mu0_sq", mu0_sq},
                {"cross_route_gap_0_40", gap},
                {"h0_at_0", ode.h0.front()},
                {"riccati_residual_0_40", riccati_residual(ode, 40.0)},
                {"grid", {{"x_max", xmax}, {"h", h}}},
                {"pass", o.pass}};
    std::string rep = sibling(out, "_audit.json");
    write_json(rep, o.report);
    written.push_back(out);
    written.push_back(rep);
    return o;
}

int cmd_darboux(DarbouxArgs a) {
    json spec;
    if (!a.spectrum.empty()) {
        spec = read_json(a.spectrum);
        if (!spec.contains("grid") || !spec.contains("mu0_sq")) throw UsageError(a.spectrum + ": not a spectrum report");
        double sx = spec["grid"]["x_max"].get<double>(), sh = spec["grid"]["h"].get<double>();
        if (a.xmax_set && std::abs(sx - a.xmax) > 1e-12 * sx)
            throw UsageError("grid mismatch: spectrum x_max " + fmt17(sx) + " vs darboux " + fmt17(a.xmax));
        if (a.h_set && std::abs(sh - a.h) > 1e-9 * sh)
            throw UsageError("grid mismatch: spectrum h " + fmt17(sh) + " vs darboux " + fmt17(a.h));
        a.xmax = sx;
        a.h = sh;
    }
    if (!(a.xmax > 0) || !(a.h > 0) || a.h >= a.xmax) throw UsageError("darboux needs 0 < h < xmax");
    Manifest m("darboux", {{"xmax", fmt17(a.xmax)}, {"h", fmt17(a.h)}, {"spectrum", a.spectrum}});
    std::vector<std::string> w;
    auto o = emit_darboux(a.xmax, a.h, a.out, w, a.spectrum.empty() ? nullptr : &spec);
    for (auto& f : w) m.add_output(f);
    m.write(sibling(a.out, ".manifest.json"));
    if (!o.pass) std::cerr << "darboux: bound audit failed\n";
    return o.pass ? 0 : 1;
}

// ---- resonance

struct ResonanceArgs {
    double xmax = 60.0;
    double h = 0.02;
    std::string out = "phi1.csv";
};

json emit_resonance(double xmax, double h, const std::string& out, std::vector<std::string>& written) {
    auto pair = ground_state(Grid::symmetric(xmax, h));
    auto b = build_phi1(pair);
    Vec x = b.grid.nodes();
    write_csv(out, {"x", "Hhat", "phi1"}, {&x, &b.h_hat, &b.phi1});
    json j = {{"wronskian_dev", b.wronskian_dev},
              {"half_line_integral", b.half_line_integral},
              {"inner_phi1_phi0", b.inner_phi1_phi0},
              {"inner_phi1_phi0_alt", b.inner_phi1_phi0_alt},
              {"phi1_at_0", b.phi1_at_0},
              {"phi1_at_0_peak_normalized", b.phi1_at_0_peak},
              {"residual", b.residual},
              {"tail_correction", b.tail_correction},
              {"g_max", b.g_max},
              {"grid", {{"x_max", xmax}, {"h", h}}}};
    if (std::isfinite(b.g_sign_change)) j["g_sign_change"] = b.g_sign_change;
    else j["g_sign_change"] = nullptr;
    std::string rep = sibling(out, "_report.json");
    write_json(rep, j);
    written.push_back(out);
    written.push_back(rep);
    return j;
}

int cmd_resonance(const ResonanceArgs& a) {
    if (!(a.xmax > 10) || !(a.h > 0) || a.h >= a.xmax) throw UsageError("resonance needs xmax > 10 and 0 < h < xmax");
    Manifest m("resonance", {{"xmax", fmt17(a.xmax)}, {"h", fmt17(a.h)}});
    std::vector<std::string> w;
    emit_resonance(a.xmax, a.h, a.out, w);
    for (auto& f : w) m.add_output(f);
    m.write(sibling(a.out, ".manifest.json"));
    return 0;
}

// ---- audit

struct AuditArgs {
    int samples = 100000;
    double m_const = AuditOptions{}.m_const;
    std::string out = "audit.json";
};

json audit_json(const std::vector<AuditReport>& reps, bool& pass) {
    json list = json::array();
    for (const auto& r : reps) {
        list.push_back({{"name", r.name},
                        {"variable", r.variable},
                        {"claim", r.claim},
                        {"interval", {r.lo, r.hi}},
                        {"samples", r.samples},
                        {"pass", r.pass},
                        {"informational", r.informational},
                        {"worst_value", r.worst_value},
                        {"worst_location", r.worst_location},
                        {"margin", r.margin},
                        {"fitted", r.fitted},
                        {"note", r.note}});
    }
    pass = audit_passed(reps);
    json failed = json::array();
    for (const auto& r : reps)
        if (!r.informational && !r.pass) failed.push_back(r.name);
    return {{"checks", list}, {"failed", failed}, {"pass", pass}};
}

bool emit_audit(int samples, double m_const, const std::string& out, std::vector<std::string>& written,
                std::vector<std::string>& failed_names) {
    AuditInputs in;
    in.mu0_sq = ground_state(Grid::symmetric(60.0, darboux_default_h)).mu0_sq;
    in.roots = roots();
    in.h0 = h0_riccati(in.mu0_sq, Grid::half_line(60.0, darboux_default_h));
    AuditOptions ao;
    ao.samples = samples;
    ao.m_const = m_const;
    bool pass = false;
    json j = audit_json(audit_all(in, ao), pass);
    j["samples"] = samples;
    j["m_const"] = m_const;
    j["xbar"] = in.roots.xbar;
    j["xbar_paper"] = xbar_paper;
    for (const auto& n : j["failed"]) failed_names.push_back(n.get<std::string>());
    write_json(out, j);
    written.push_back(out);
    return pass;
}

int cmd_audit(const AuditArgs& a) {
    if (a.samples < 2) throw UsageError("--samples must be at least 2");
    Manifest m("audit", {{"samples", std::to_string(a.samples)}, {"m_const", fmt17(a.m_const)}});
    std::vector<std::string> w, failed;
    bool pass = emit_audit(a.samples, a.m_const, a.out, w, failed);
    for (auto& f : w) m.add_output(f);
    m.write(sibling(a.out, ".manifest.json"));
    for (auto& f : failed) std::cerr << "audit: check failed: " << f << '\n';
    return pass ? 0 : 1;
}

// ---- simulate

struct SimulateArgs {
    std::string config;
    std::string out = "track.csv";
    std::string init = "stable";
    double amp = 1e-3;
    std::map<std::string, std::string> flags;  // set on the command line
};

void write_track(const std::string& path, const ModalTrack& t) {
    write_csv(path, {"t", "a1", "a2", "b_plus", "b_minus", "a_res", "E", "H0norm", "localE", "I", "J"},
              {&t.t, &t.a1, &t.a2, &t.b_plus, &t.b_minus, &t.a_res, &t.energy, &t.h0_norm, &t.local_energy,
               &t.i_virial, &t.j_virial});
}

SimConfig resolve_sim(const SimulateArgs& a) {
    SimConfig c;
    if (!a.config.empty())
        for (const auto& [k, v] : read_key_values(a.config)) apply_sim_value(c, k, v);
    for (const auto& [k, v] : a.flags) apply_sim_value(c, k, v);
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return c;
}

FieldState initial_state(const Dynamics& d, const std::string& init, double amp) {
    double mu = d.pair().mu0, dt = d.config().dt;
    if (init == "stable") return mode_state(d, amp, leapfrog_stable_rate(mu, dt));
    if (init == "unstable") return mode_state(d, amp, leapfrog_unstable_rate(mu, dt));
    FieldState s = d.zero_state();
    for (std::size_t i = 1; i + 1 < s.grid.n; ++i) {
        double x = s.grid.x(i);
        s.w1[i] = amp * x * std::exp(-x * x / 4);
    }
    return s;
}

int cmd_simulate(const SimulateArgs& a) {
    SimConfig c = resolve_sim(a);
    ConfigMap cm = describe(c);
    cm["init"] = a.init;
    cm["amp"] = fmt17(a.amp);
    Manifest m("simulate", cm);
    Dynamics d(c);
    RunOptions o;
    o.t_end = c.t_max;
    o.record_every = c.record_every;
    o.virials = true;
    auto r = run(initial_state(d, a.init, a.amp), d, o);
    write_track(a.out, r.track);
    m.add_output(a.out);
    m.write(sibling(a.out, ".manifest.json"));
    if (r.blowup) {
        std::cerr << "simulate: blow-up at t = " << fmt17(r.blowup->t) << ", x = " << fmt17(r.blowup->x) << '\n';
        return 1;
    }
    return 0;
}

// ---- shoot

struct ShootArgs {
    double eps = 1e-3;
    double tmax = 50.0;
    double K = 10.0;
    unsigned threads = 0;
    std::string out = "shoot.json";
};

json shoot_json(const ShootResult& r, const ShootConfig& sc) {
    json samples = json::array(), corr = json::array();
    for (const auto& s : r.samples)
        samples.push_back({{"b_plus0", s.b_plus0}, {"exit_time", s.exit_time}, {"side", s.side}, {"exited", s.exited}});
    for (const auto& [t, c] : r.corrections) corr.push_back({{"t", t}, {"correction", c}});
    return {{"eps", r.eps},
            {"K", sc.K},
            {"delta_exit", r.delta_exit},
            {"bracket", {r.bracket_lo, r.bracket_hi}},
            {"width", r.width},
            {"width_over_eps_sq", r.width / (r.eps * r.eps)},
            {"b_plus_star", r.b_plus_star},
            {"rounds", r.rounds},
            {"exit_time_lo", r.exit_time_lo},
            {"exit_time_hi", r.exit_time_hi},
            {"side_lo", r.side_lo},
            {"side_hi", r.side_hi},
            {"exit_law_prediction", r.exit_law_prediction},
            {"exit_law_error", r.exit_law_error},
            {"monotone", r.monotone},
            {"survived", r.survived},
            {"max_norm", r.max_norm},
            {"max_norm_over_eps", r.max_norm / r.eps},
            {"local_energy_ratio", r.local_energy_ratio},
            {"tail_fraction", r.tail_fraction},
            {"samples", samples},
            {"corrections", corr}};
}

ShootResult emit_shoot(const SimConfig& c, const ShootConfig& sc, const std::string& out,
                       std::vector<std::string>& written) {
    Dynamics d(c);
    auto r = shoot_manifold(d, sc);
    json j = shoot_json(r, sc);
    std::string track = sibling(out, "_track.csv");
    j["track_csv_path"] = std::filesystem::path(track).filename().string();
    write_track(track, r.track);
    write_json(out, j);
    written.push_back(track);
    written.push_back(out);
    return r;
}

int cmd_shoot(const ShootArgs& a) {
    if (!(a.eps > 0) || !(a.K > 0)) throw UsageError("--eps and --K must be positive");
    SimConfig c;
    c.t_max = a.tmax;
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    ShootConfig sc;
    sc.eps = a.eps;
    sc.K = a.K;
    sc.threads = a.threads;
    ConfigMap cm = describe(c);
    cm["eps"] = fmt17(a.eps);
    cm["K"] = fmt17(a.K);
    Manifest m("shoot", cm);
    std::vector<std::string> w;
    auto r = emit_shoot(c, sc, a.out, w);
    for (auto& f : w) m.add_output(f);
    m.write(sibling(a.out, ".manifest.json"));
    auto crit = shooting_criterion(r, c);
    if (!crit.pass()) {
        std::cerr << "shoot: failed: " << crit.failures() << '\n';
        return 1;
    }
    return 0;
}

// ---- all

struct AllArgs {
    std::string outdir = "kinklab_run";
    int samples = 100000;
    double eps = 1e-3;
    unsigned threads = 0;
};

json criterion_json(const Criterion& c) {
    json checks = json::array();
    for (const auto& l : c.checks)
        checks.push_back({{"name", l.name}, {"measured", l.measured}, {"target", l.target}, {"tol", l.tol}, {"pass", l.pass}});
    return {{"id", c.id}, {"title", c.title}, {"pass", c.pass()}, {"checks", checks}};
}

int cmd_all(const AllArgs& a) {
    if (a.samples < 2) throw UsageError("--samples must be at least 2");
    if (!(a.eps > 0)) throw UsageError("--eps must be positive");
    namespace fs = std::filesystem;
    fs::create_directories(a.outdir);
    auto at = [&](const std::string& f) { return (fs::path(a.outdir) / f).string(); };
    Manifest m("all", {{"samples", std::to_string(a.samples)}, {"eps", fmt17(a.eps)}});
    std::vector<std::string> w;

    std::cout << "profiles\n";
    emit_profiles(Grid(-60.0, 60.0, 6001), at("profiles.csv"));
    w.push_back(at("profiles.csv"));
    write_json(at("roots.json"), roots_json());
    w.push_back(at("roots.json"));
    std::cout << "spectrum\n";
    emit_spectrum(Grid::symmetric(60.0, 0.02), at("eig.json"), w);
    std::cout << "darboux\n";
    emit_darboux(60.0, darboux_default_h, at("v0.csv"), w);
    std::cout << "resonance\n";
    emit_resonance(60.0, 0.02, at("phi1.csv"), w);
    std::cout << "audit\n";
    std::vector<std::string> audit_failed;
    emit_audit(a.samples, AuditOptions{}.m_const, at("audit.json"), w, audit_failed);
    std::cout << "shoot\n";
    SimConfig sim;
    ShootConfig sc;
    sc.eps = a.eps;
    sc.threads = a.threads;
    auto shot = emit_shoot(sim, sc, at("shoot.json"), w);

    AcceptanceOptions ao;
    ao.audit_samples = a.samples;
    ao.shoot_eps = a.eps;
    ao.threads = a.threads;
    json crit = json::array(), failures = json::array();
    for (int id = 1; id <= criterion_count; ++id) {
        Criterion c = id == 12 ? shooting_criterion(shot, sim) : run_criterion(id, ao);
        crit.push_back(criterion_json(c));
        std::printf("criterion %2d: %s  %s%s%s\n", id, c.pass() ? "PASS" : "FAIL", c.title.c_str(),
                    c.pass() ? "" : "  failed: ", c.failures().c_str());
        for (const auto& l : c.checks)
            if (!l.pass) failures.push_back("criterion " + std::to_string(id) + ": " + l.name);
    }
    json summary = {{"criteria", crit}, {"failures", failures}, {"pass", failures.empty()}};
    write_json(at("summary.json"), summary);
    w.push_back(at("summary.json"));
    for (auto& f : w) m.add_output(f);
    m.write(at("manifest.json"));
    std::printf("%zu failing checks\n", failures.size());
    return failures.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kinklab: kink stability numerics"};
    app.set_help_flag("--help", "print this help and exit");
    app.set_version_flag("--version", tool_version());
    app.require_subcommand(1);
    std::function<int()> action;

    ProfilesArgs pa;
    auto* sp = app.add_subcommand("profiles", "sample alpha^-1, Q~, H~, V, V', V'' on a grid");
    sp->add_option("--grid", pa.grid, "L,N: N nodes on [-L, L]")->capture_default_str();
    sp->add_option("--out", pa.out, "CSV output")->capture_default_str();
    sp->callback([&] { action = [&] { return cmd_profiles(pa); }; });

    std::string roots_out;
    auto* sr = app.add_subcommand("roots", "roots of V, V', V'' and the level Q~ = 6/5");
    sr->add_option("--out", roots_out, "JSON output (stdout when omitted)");
    sr->callback([&] { action = [&] { return cmd_roots(roots_out); }; });

    SpectrumArgs sa;
    auto* ss = app.add_subcommand("spectrum", "negative eigenpair of the linearized operator");
    ss->add_option("--xmax", sa.xmax)->capture_default_str();
    ss->add_option("--h", sa.h)->capture_default_str();
    ss->add_option("--out", sa.out, "JSON report; phi0 goes to <stem>_phi0.csv")->capture_default_str();
    ss->callback([&] { action = [&] { return cmd_spectrum(sa); }; });

    DarbouxArgs da;
    auto* sd = app.add_subcommand("darboux", "h0, transformed potential V0 and the h0 bound audit");
    auto* dx = sd->add_option("--xmax", da.xmax)->capture_default_str();
    auto* dh = sd->add_option("--h", da.h)->capture_default_str();
    sd->add_option("--spectrum", da.spectrum, "spectrum JSON to take mu0^2 and the grid from");
    sd->add_option("--out", da.out, "CSV output; audit goes to <stem>_audit.json")->capture_default_str();
    sd->callback([&] {
        da.xmax_set = dx->count() > 0;
        da.h_set = dh->count() > 0;
        action = [&] { return cmd_darboux(da); };
    });

    ResonanceArgs ra;
    auto* sres = app.add_subcommand("resonance", "generalized eigenfunction phi1 and zero-energy resonance");
    sres->add_option("--xmax", ra.xmax)->capture_default_str();
    sres->add_option("--h", ra.h)->capture_default_str();
    sres->add_option("--out", ra.out, "CSV output; report goes to <stem>_report.json")->capture_default_str();
    sres->callback([&] { action = [&] { return cmd_resonance(ra); }; });

    AuditArgs aa;
    auto* sau = app.add_subcommand("audit", "sampled audit of the sign lemmas");
    sau->add_option("--samples", aa.samples)->capture_default_str();
    sau->add_option("--m-const", aa.m_const, "lower bound used for mu0 in the (g) functions")->capture_default_str();
    sau->add_option("--out", aa.out)->capture_default_str();
    sau->callback([&] { action = [&] { return cmd_audit(aa); }; });

    SimulateArgs sia;
    auto* ssim = app.add_subcommand("simulate", "evolve the perturbation and record the modal track");
    ssim->add_option("--config", sia.config, "flat key = value file with SimConfig keys");
    ssim->add_option("--out", sia.out)->capture_default_str();
    ssim->add_option("--init", sia.init, "initial data")
        ->check(CLI::IsMember({"stable", "unstable", "bump"}))
        ->capture_default_str();
    ssim->add_option("--amp", sia.amp, "initial amplitude")->capture_default_str();
    std::map<std::string, std::string> sim_flag_values;
    std::vector<std::pair<std::string, CLI::Option*>> sim_flags;
    for (const auto& k : sim_keys())
        sim_flags.emplace_back(k, ssim->add_option("--" + k, sim_flag_values[k], "overrides the config file"));
    ssim->callback([&] {
        for (auto& [k, opt] : sim_flags)
            if (opt->count() > 0) sia.flags[k] = sim_flag_values[k];
        action = [&] { return cmd_simulate(sia); };
    });

    ShootArgs sha;
    auto* ssh = app.add_subcommand("shoot", "bisect onto the stable manifold");
    ssh->add_option("--eps", sha.eps)->capture_default_str();
    ssh->add_option("--tmax", sha.tmax)->capture_default_str();
    ssh->add_option("--K", sha.K, "initial bracket half-width in units of eps^2")->capture_default_str();
    ssh->add_option("--threads", sha.threads, "0: KINKLAB_THREADS or hardware")->capture_default_str();
    ssh->add_option("--out", sha.out, "JSON report; track goes to <stem>_track.csv")->capture_default_str();
    ssh->callback([&] { action = [&] { return cmd_shoot(sha); }; });

    AllArgs ala;
    auto* sall = app.add_subcommand("all", "full pipeline and acceptance summary");
    sall->add_option("--outdir", ala.outdir)->capture_default_str();
    sall->add_option("--samples", ala.samples)->capture_default_str();
    sall->add_option("--eps", ala.eps)->capture_default_str();
    sall->add_option("--threads", ala.threads)->capture_default_str();
    sall->callback([&] { action = [&] { return cmd_all(ala); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        return action();
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
