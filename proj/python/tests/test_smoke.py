import math

import numpy as np
import pytest

import dirac6c as d


def test_catalog_and_counts():
    names = d.catalog_names()
    assert "S6c" in names and "S2" in names
    assert d.op_count("S6c") == (4, 5)
    assert d.op_count("S2") == (1, 2)
    steps = d.scheme_steps("S2")
    assert [s[0] for s in steps] == ["W", "T", "W"]
    assert sum(c for k, c, _ in steps if k == "T") == pytest.approx(1.0)


def test_propagate_conserves_mass_and_converges():
    p = d.desk_rational_1d(1.0)
    p.M = 128
    p.t_final = 0.5
    phi0 = p.initial()
    assert phi0.shape == (128, 2)
    m0 = d.mass(p, phi0)
    # closed form of the Gaussian mass: two components, each sqrt(pi)
    assert m0 == pytest.approx(2.0 * math.sqrt(math.pi), rel=1e-12)

    ref, _ = d.propagate(p, "S6c", 1.0 / 256)
    errs = []
    for tau in (0.1, 0.05):
        phi, wall = d.propagate(p, "S2", tau)
        assert wall >= 0.0
        assert d.mass(p, phi) == pytest.approx(m0, rel=1e-13)
        errs.append(d.error_metrics(p, phi, ref)["e_phi"])
    assert math.log2(errs[0] / errs[1]) == pytest.approx(2.0, abs=0.1)


def test_error_metrics_are_phase_blind_for_density():
    p = d.desk_rational_1d()
    p.M = 64
    phi = p.initial()
    e = d.error_metrics(p, phi * np.exp(0.7j), phi)
    assert e["e_rho"] < 1e-14
    assert e["e_J"] < 1e-14
    assert e["e_phi"] > 0.1
    with pytest.raises(ValueError):
        d.error_metrics(p, phi[:32], phi)


def test_mass_series_and_fit():
    p = d.desk_rational_1d()
    p.M = 64
    drift = d.mass_series("S4", p, 0.05, 20)
    assert len(drift) == 20 and max(drift) < 1e-13
    taus = [0.4, 0.2, 0.1, 0.05]
    assert d.fit_order(taus, [t**4 for t in taus], 0.0) == pytest.approx(4.0)
    assert d.fit_order(taus, [1e-20] * 4, 1e-10) is None


def test_temporal_convergence_records():
    p = d.desk_rational_1d()
    p.M = 128
    p.t_final = 0.5
    s = d.temporal_convergence("S2", [0.1, 0.05, 0.025], p, "S6c", 1e-3)
    assert [r["tau"] for r in s["records"]] == [0.1, 0.05, 0.025]
    assert s["order_phi"] == pytest.approx(2.0, abs=0.1)


def test_coefficients_solve_the_order_conditions():
    table = [d.constant(f"S6c.c{i}") for i in range(5)]
    assert max(abs(r) for r in d.residuals(table)) <= 1e-13
    seed = [float(f"{c:.3g}") for c in table]
    rep = d.newton_solve(seed)
    assert rep["converged"]
    assert max(abs(a - b) for a, b in zip(rep["solution"], table)) <= 1e-13


def test_lie_checks_pass():
    checks = d.lie_checks()
    assert checks
    assert all(ok for _, ok, _ in checks)


def test_config_and_cli():
    h = d.config_hash("[model]\nM = 64\n")
    assert h == d.config_hash(d.config_echo("[model]\nM = 64\n"))
    with pytest.raises(d.ConfigError, match="line 2: model.M"):
        d.config_hash("[model]\nM = 63\n")
    assert "model.M" in d.config_schema()
    code, out, err = d.run_cli(["opcount", "S6c"])
    assert (code, out) == (d.EXIT_OK, "T=4 W=5\n")
    assert d.run_cli(["opcount", "nope"])[0] == d.EXIT_VALIDATION
