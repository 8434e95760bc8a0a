import math

import numpy as np
import pytest

kinklab = pytest.importorskip("kinklab")


def test_roots():
    r = kinklab.roots()
    assert r["x0"] == pytest.approx(1.01634, abs=1e-3)
    assert r["x21"] < r["x0"] < r["x1"] < r["x22"]
    assert kinklab.q_tilde(r["xbar"]) == pytest.approx(1.2, abs=1e-10)


def test_profiles_vectorized():
    x = np.linspace(-20.0, 20.0, 41)
    q, h = kinklab.q_tilde(x), kinklab.h_tilde(x)
    assert q.shape == x.shape
    np.testing.assert_allclose(h * h + 2.0 * q / 3.0, 1.0, atol=1e-12)
    np.testing.assert_allclose(kinklab.alpha_inv(-x), -kinklab.alpha_inv(x), atol=1e-12)


def test_ground_state():
    g = kinklab.ground_state(30.0, 0.05)
    assert g["negative_count"] == 1
    assert g["mu0"] == pytest.approx(0.811, abs=0.01)
    phi = g["phi0"]
    np.testing.assert_allclose(phi, phi[::-1], atol=1e-10)


def test_h0_and_resonance():
    g = kinklab.ground_state(40.0, 0.02)
    d = kinklab.h0(g["mu0_sq"], 40.0, 0.02)
    assert d["x"][0] == 0.0
    assert all(c["pass"] for c in d["checks"][:6])
    r = kinklab.resonance(40.0, 0.02)
    assert r["inner_phi1_phi0"] < 0.0


def test_audit_negative_control():
    names = lambda reps: {r["name"] for r in reps if not r["pass"] and not r["informational"]}
    base = names(kinklab.audit(1000))
    perturbed = names(kinklab.audit(1000, m_const=0.9))
    assert "g_j2_dominance" not in base
    assert "g_j2_dominance" in perturbed


def test_simulate_stable_mode_decays():
    c = kinklab.SimConfig()
    c.x_max, c.t_max, c.record_every = 40.0, 4.0, 50
    t = kinklab.simulate(c, "stable", 1e-4)
    assert not t["blowup"]
    assert len(t["t"]) == 5
    rate = math.log(abs(t["a1"][-1] / t["a1"][0])) / t["t"][-1]
    assert rate == pytest.approx(-t["mu0"], rel=0.05)
    assert np.ptp(t["E"]) < 1e-9


def test_bad_config_raises():
    c = kinklab.SimConfig()
    c.dt = 1.0
    with pytest.raises(ValueError):
        c.validate()


def test_criterion_lookup():
    assert kinklab.criterion_count == 13
    c = kinklab.run_criterion(3)
    assert c["pass"]
    with pytest.raises(IndexError):
        kinklab.run_criterion(14)
