import numpy as np
import pytest

from photondelay.ode import (
    IntegrationError, IntegratorSettings, QuantumState, _Generator, evolve, initial_state, rhs,
)
from photondelay.params import SystemConfig, coupling_matrix
from photondelay.trace import AmplitudeTrace, read_csv, read_modes

SMALL = SystemConfig(mode_half_width=64)


def test_initial_state():
    s = initial_state(SMALL)
    assert s.c1 == 1 + 0j and s.c2 == 0 and s.c3 == 0 and s.t == 0
    assert not np.any(s.b)
    assert s.norm2 == 1.0


def test_state_vector_roundtrip():
    s = QuantumState(0.1j, 0.2, -0.3, np.arange(5) * 1j, 0.25)
    back = QuantumState.from_vector(s.to_vector(), 0.25)
    assert np.array_equal(back.to_vector(), s.to_vector())


def test_rhs_at_initial_state():
    d = rhs(SMALL, initial_state(SMALL))
    assert d.c1 == 0 and d.c2 == 0 and d.c3 == 0
    assert np.allclose(d.b, -1j * coupling_matrix(SMALL)[0])


def test_rhs_of_zero_is_zero():
    zero = QuantumState(0j, 0j, 0j, np.zeros(129, complex))
    assert rhs(SMALL, zero).norm2 == 0


def test_generator_is_anti_hermitian():
    rng = np.random.default_rng(1)
    y = rng.normal(size=132) + 1j * rng.normal(size=132)
    cfg = SMALL.replace(delta=3.0)
    dy = _Generator(cfg)(0.0, y)
    assert abs(np.vdot(y, dy).real) < 1e-10 * np.linalg.norm(y) * np.linalg.norm(dy)
    H = _Generator(cfg).hamiltonian()
    assert np.allclose(H, H.conj().T)


def test_free_decay_of_isolated_source():
    cfg = SystemConfig(gamma2=0, gamma3=0, mode_half_width=1024)
    t = np.linspace(0, 0.49, 50)
    tr = evolve(cfg, IntegratorSettings(t_end=0.5), t)
    assert np.max(np.abs(tr.probabilities[0] - np.exp(-4 * t))) < 1e-2
    assert np.max(np.abs(tr.c[1:])) == 0


def test_finite_causality_fronts():
    cfg = SystemConfig(mode_half_width=1024)
    t = np.linspace(0, 0.74, 297)
    tr = evolve(cfg, IntegratorSettings(t_end=0.74), t)
    c2, c3 = np.abs(tr.c[1]), np.abs(tr.c[2])
    assert np.max(c2[t < 0.25]) <= 1e-2 * np.max(c2)
    assert np.max(c3[t < 0.5]) <= 1e-2 * np.max(c3)


def test_norm_drift_and_energy(fig3_ode):
    assert fig3_ode.norm_drift <= 1e-8
    assert fig3_ode.norm_drift <= 100 * 1e-10
    assert fig3_ode.info == {"method": "DOP853", "M": 2048}


def test_energy_conserved():
    cfg = SystemConfig(mode_half_width=128, delta=20.0)
    t = np.linspace(0, 1, 11)
    tr = evolve(cfg, IntegratorSettings(), t)
    H = _Generator(cfg).hamiltonian()
    Y = np.concatenate([tr.c, tr.b.T])
    energy = np.einsum("in,ij,jn->n", Y.conj(), H, Y).real
    assert np.max(np.abs(energy - energy[0])) < 1e-7 * np.linalg.norm(H, 2)


def test_solvers_agree():
    cfg = SystemConfig(mode_half_width=64, delta=10.0)
    t = np.linspace(0, 0.5, 11)
    ref = evolve(cfg, IntegratorSettings(method="eigh", t_end=0.5), t)
    for method, kw in (("DOP853", {}), ("RK45", {}), ("RK4", {"rk4_step": 0.5 / 4000})):
        tr = evolve(cfg, IntegratorSettings(method=method, t_end=0.5, **kw), t)
        assert np.max(np.abs(tr.c - ref.c)) < 1e-6, method


def test_rk4_requires_grid_times():
    with pytest.raises(ValueError, match="step grid"):
        evolve(SMALL, IntegratorSettings(method="RK4", rk4_step=0.1, t_end=1.0), [0.0, 0.15])


def test_mode_truncation_convergence():
    t = np.linspace(0, 0.75, 76)
    runs = {M: evolve(SystemConfig(mode_half_width=M), IntegratorSettings(t_end=0.75), t)
            for M in (256, 512, 1024, 2048)}
    diffs = [np.max(np.abs(runs[M].c - runs[2 * M].c)) for M in (256, 512, 1024)]
    assert diffs[0] > diffs[1] > diffs[2]


def test_arbitrary_positions_supported():
    cfg = SystemConfig(mode_half_width=128, z1=0.1, z2=0.35, z3=0.9)
    tr = evolve(cfg, IntegratorSettings(t_end=0.5), np.linspace(0, 0.5, 6))
    assert tr.norm_drift < 1e-8


@pytest.mark.parametrize("kwargs", [dict(rel_tol=0), dict(abs_tol=-1), dict(t_end=0), dict(method="Euler")])
def test_settings_validation(kwargs):
    with pytest.raises(ValueError):
        IntegratorSettings(**kwargs)


def test_sample_time_validation():
    s = IntegratorSettings(t_end=0.5)
    for bad in ([], [0.3, 0.2], [0.0, 0.6], [-0.1, 0.1]):
        with pytest.raises(ValueError):
            evolve(SMALL, s, bad)


def test_integration_error_reports_time():
    err = IntegrationError("step size collapsed", 0.3125)
    assert err.t_reached == 0.3125 and "0.3125" in str(err)


def test_trace_files_roundtrip(tmp_path):
    tr = evolve(SMALL, IntegratorSettings(t_end=0.3), np.linspace(0, 0.3, 4))
    text = tr.to_csv(tmp_path / "a.csv", header="M = 64")
    assert text.startswith("# M = 64\nt,re_c1")
    back = read_csv(tmp_path / "a.csv")
    assert np.array_equal(back.c, tr.c) and np.array_equal(back.times, tr.times)
    tr.write_modes(tmp_path / "b.bin")
    assert np.array_equal(read_modes(tmp_path / "b.bin"), tr.b)
    raw = np.fromfile(tmp_path / "b.bin", dtype="<f8")
    assert raw[0] == 64 and raw[1] == 4


def test_trace_validation():
    with pytest.raises(ValueError):
        AmplitudeTrace([0.0, 0.1], np.zeros((3, 3)))
    with pytest.raises(ValueError):
        AmplitudeTrace([0.1, 0.0], np.zeros((3, 2)))
    with pytest.raises(ValueError):
        AmplitudeTrace([0.0], np.zeros((3, 1))).write_modes("unused")
