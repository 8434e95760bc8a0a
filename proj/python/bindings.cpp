#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kinklab/acceptance.hpp"
#include "kinklab/audit.hpp"
#include "kinklab/darboux.hpp"
#include "kinklab/dynamics.hpp"
#include "kinklab/profiles.hpp"
#include "kinklab/resonance.hpp"
#include "kinklab/spectral.hpp"

namespace py = pybind11;
using namespace kinklab;

namespace {

py::array_t<double> arr(const Vec& v) { return py::array_t<double>(v.size(), v.data()); }

py::dict track_dict(const ModalTrack& t) {
    py::dict d;
    d["t"] = arr(t.t);
    d["a1"] = arr(t.a1);
    d["a2"] = arr(t.a2);
    d["b_plus"] = arr(t.b_plus);
    d["b_minus"] = arr(t.b_minus);
    d["a_res"] = arr(t.a_res);
    d["E"] = arr(t.energy);
    d["H0norm"] = arr(t.h0_norm);
    d["localE"] = arr(t.local_energy);
    d["I"] = arr(t.i_virial);
    d["J"] = arr(t.j_virial);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "kink stability numerics";

    m.def("q_tilde", py::vectorize(q_tilde), py::arg("x"));
    m.def("h_tilde", py::vectorize(h_tilde), py::arg("x"));
    m.def("alpha_inv", py::vectorize([](double x) { return alpha_inv(x); }), py::arg("x"));
    m.def("potential_v", py::vectorize(potential_v), py::arg("x"));

    m.def("roots", [] {
        auto r = roots();
        py::dict d;
        d["x0"] = r.x0;
        d["x1"] = r.x1;
        d["x21"] = r.x21;
        d["x22"] = r.x22;
        d["xbar"] = r.xbar;
        return d;
    });

    m.def(
        "ground_state",
        [](double x_max, double h) {
            auto p = ground_state(Grid::symmetric(x_max, h));
            py::dict d;
            d["mu0"] = p.mu0;
            d["mu0_sq"] = p.mu0_sq;
            d["residual"] = p.residual;
            d["negative_count"] = p.negative_count;
            d["x"] = arr(p.grid.nodes());
            d["phi0"] = arr(p.phi0);
            return d;
        },
        py::arg("x_max") = 60.0, py::arg("h") = 0.02);

    m.def(
        "h0",
        [](double mu0_sq, double x_max, double h) {
            auto s = h0_riccati(mu0_sq, Grid::half_line(x_max, h));
            auto tp = transformed_potential(s);
            py::dict d;
            d["x"] = arr(s.grid.nodes());
            d["h0"] = arr(s.h0);
            d["h0_prime"] = arr(s.h0_prime);
            d["V0"] = arr(Vec(tp.v0.begin() + static_cast<long>(tp.grid.center()), tp.v0.end()));
            py::list checks;
            for (const auto& c : h0_bound_audit(s, roots()))
                checks.append(py::dict(py::arg("name") = c.name, py::arg("worst_margin") = c.worst_margin,
                                       py::arg("pass") = c.pass));
            d["checks"] = checks;
            return d;
        },
        py::arg("mu0_sq"), py::arg("x_max") = 60.0, py::arg("h") = darboux_default_h);

    m.def(
        "resonance",
        [](double x_max, double h) {
            auto b = build_phi1(ground_state(Grid::symmetric(x_max, h)));
            py::dict d;
            d["x"] = arr(b.grid.nodes());
            d["Hhat"] = arr(b.h_hat);
            d["phi1"] = arr(b.phi1);
            d["wronskian_dev"] = b.wronskian_dev;
            d["half_line_integral"] = b.half_line_integral;
            d["inner_phi1_phi0"] = b.inner_phi1_phi0;
            d["phi1_at_0"] = b.phi1_at_0;
            return d;
        },
        py::arg("x_max") = 60.0, py::arg("h") = 0.02);

    m.def(
        "audit",
        [](int samples, double m_const) {
            AuditInputs in;
            in.mu0_sq = ground_state(Grid::symmetric(60.0, darboux_default_h)).mu0_sq;
            in.roots = roots();
            in.h0 = h0_riccati(in.mu0_sq, Grid::half_line(60.0, darboux_default_h));
            AuditOptions o;
            o.samples = samples;
            o.m_const = m_const;
            py::list out;
            for (const auto& r : audit_all(in, o))
                out.append(py::dict(py::arg("name") = r.name, py::arg("pass") = r.pass,
                                    py::arg("informational") = r.informational, py::arg("margin") = r.margin,
                                    py::arg("worst_location") = r.worst_location));
            return out;
        },
        py::arg("samples") = 1000, py::arg("m_const") = AuditOptions{}.m_const);

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("x_max", &SimConfig::x_max)
        .def_readwrite("h", &SimConfig::h)
        .def_readwrite("dt", &SimConfig::dt)
        .def_readwrite("t_max", &SimConfig::t_max)
        .def_readwrite("sponge_width", &SimConfig::sponge_width)
        .def_readwrite("sponge_strength", &SimConfig::sponge_strength)
        .def_readwrite("record_every", &SimConfig::record_every)
        .def_readwrite("gamma", &SimConfig::gamma)
        .def_readwrite("A", &SimConfig::A)
        .def_readwrite("B", &SimConfig::B)
        .def_readwrite("window", &SimConfig::window)
        .def_readwrite("linear", &SimConfig::linear)
        .def("validate", &SimConfig::validate);

    m.def(
        "simulate",
        [](const SimConfig& c, const std::string& init, double amp) {
            Dynamics d(c);
            double mu = d.pair().mu0;
            FieldState s;
            if (init == "stable") s = mode_state(d, amp, leapfrog_stable_rate(mu, c.dt));
            else if (init == "unstable") s = mode_state(d, amp, leapfrog_unstable_rate(mu, c.dt));
            else throw std::invalid_argument("init must be 'stable' or 'unstable'");
            RunOptions o;
            o.t_end = c.t_max;
            o.record_every = c.record_every;
            o.virials = true;
            RunResult r;
            {
                py::gil_scoped_release nogil;
                r = run(s, d, o);
            }
            py::dict out = track_dict(r.track);
            out["mu0"] = mu;
            out["blowup"] = r.blowup.has_value();
            return out;
        },
        py::arg("config") = SimConfig{}, py::arg("init") = "stable", py::arg("amp") = 1e-3);

    m.def(
        "shoot",
        [](double eps, double t_max, unsigned threads) {
            SimConfig c;
            c.t_max = t_max;
            Dynamics d(c);
            ShootConfig sc;
            sc.eps = eps;
            sc.threads = threads;
            ShootResult r;
            {
                py::gil_scoped_release nogil;
                r = shoot_manifold(d, sc);
            }
            py::dict out;
            out["b_plus_star"] = r.b_plus_star;
            out["width"] = r.width;
            out["exit_time_lo"] = r.exit_time_lo;
            out["exit_time_hi"] = r.exit_time_hi;
            out["exit_law_prediction"] = r.exit_law_prediction;
            out["survived"] = r.survived;
            out["max_norm"] = r.max_norm;
            out["local_energy_ratio"] = r.local_energy_ratio;
            out["track"] = track_dict(r.track);
            return out;
        },
        py::arg("eps") = 1e-3, py::arg("t_max") = 50.0, py::arg("threads") = 0u);

    m.def(
        "run_criterion",
        [](int id, int audit_samples) {
            AcceptanceOptions o;
            o.audit_samples = audit_samples;
            Criterion c;
            {
                py::gil_scoped_release nogil;
                c = run_criterion(id, o);
            }
            py::list checks;
            for (const auto& l : c.checks)
                checks.append(py::dict(py::arg("name") = l.name, py::arg("measured") = l.measured,
                                       py::arg("target") = l.target, py::arg("tol") = l.tol, py::arg("pass") = l.pass));
            return py::dict(py::arg("id") = c.id, py::arg("title") = c.title, py::arg("pass") = c.pass(),
                            py::arg("checks") = checks);
        },
        py::arg("id"), py::arg("audit_samples") = 100000);
    m.attr("criterion_count") = criterion_count;
}
