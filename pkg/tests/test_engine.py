import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_density
from hybridsqueeze.engine import (
    IntegratorConfig, Method, compile_model, evolve, kernel_rhs, lindblad_rhs, max_stable_dt,
    steady_check,
)
from hybridsqueeze.errors import LayoutError, MaxStepsError, PreconditionError, TraceDriftError
from hybridsqueeze.model import (
    DissipatorKind, DissipatorSpec, HTerm, TimeDependentHamiltonian, build_dissipators,
    build_hybrid_squeezed, build_mm_jc, build_mm_squeezed,
)
from hybridsqueeze.operators import (
    Boson, Op, SpaceLayout, State, TwoLevel, basis_state, bipartite_layout, fock_dm, mode_op,
    thermal_dm, tripartite_layout, two_level_ops,
)
from hybridsqueeze.params import TWO_PI, frame_params, table1_device


def single(n):
    return SpaceLayout((Boson(n, "phonon"),))


def number(layout, label):
    a = mode_op(layout, label)
    return Op(layout, a.matrix.conj().T @ a.matrix, hermitian=True)


def empty(layout):
    return TimeDependentHamiltonian(layout, [])


def thermal(layout, label, rate, nbar):
    return DissipatorSpec(DissipatorKind.THERMAL, mode_op(layout, label), rate, nbar)


@pytest.mark.parametrize("case", ["default", "strict", "svr", "hybrid"])
def test_kernel_matches_dense(case, fp25, fig3fp):
    if case == "hybrid":
        lay = tripartite_layout(3, 3)
        H = build_hybrid_squeezed(fig3fp, lay)
        D = build_dissipators(fig3fp, lay, dephasing=TWO_PI * 1e3)
    else:
        lay = bipartite_layout(4, 3)
        H = build_mm_squeezed(fp25, lay)
        kw = {"default": {}, "strict": {"strict": True}, "svr": {"svr": (1.7, 2.2)}}[case]
        D = build_dissipators(fp25, lay, **kw)
    cm = compile_model(H, D)
    for seed, t in ((1, 0.0), (2, 3.3e-10), (3, 1.234e-7)):
        rho = random_density(lay.total_dim, seed)
        ref = lindblad_rhs(rho, t, H, D)
        got = kernel_rhs(rho, t, cm)
        assert np.abs(got - ref).max() <= 1e-12 * np.abs(ref).max()


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**31), t=st.floats(0, 1e-6))
def test_rhs_trace_free_and_hermitian(seed, t):
    fp = frame_params(table1_device().with_Q(1e4), r_p=1.1)
    lay = bipartite_layout(3, 3)
    H = build_mm_squeezed(fp, lay)
    D = build_dissipators(fp, lay, svr=(0.6, 1.0))
    rho = random_density(9, seed)
    out = lindblad_rhs(rho, t, H, D)
    scale = np.abs(out).max()
    assert abs(np.trace(out)) <= 1e-12 * scale * 9
    assert np.abs(out - out.conj().T).max() <= 1e-12 * scale


def test_decay_rate_of_fock_one():
    lay = single(4)
    D = [thermal(lay, "phonon", 2.0, 0.0)]
    rho = fock_dm(4, 1)
    drho = lindblad_rhs(rho, 0.0, empty(lay), D)
    assert np.trace(number(lay, "phonon").matrix @ drho).real == pytest.approx(-2.0)


def test_thermal_fixed_point():
    lay = single(30)
    D = [thermal(lay, "phonon", 1.0, 2.5)]
    assert steady_check(thermal_dm(30, 2.5), empty(lay), D) < 1e-10


def test_vacuum_fixed_point_and_displaced_witness():
    lay = single(12)
    D = [thermal(lay, "phonon", 1.0, 0.0)]
    assert steady_check(fock_dm(12, 0), empty(lay), D) < 1e-12
    n = np.arange(12)
    alpha = 0.8
    from math import factorial
    psi = np.array([np.exp(-alpha**2 / 2) * alpha**k / math.sqrt(factorial(k)) for k in n])
    psi /= np.linalg.norm(psi)
    assert steady_check(np.outer(psi, psi.conj()), empty(lay), D) > 0.1


def test_dephasing_coherence_rate():
    # gamma L_{sigma_z} acting on the 2x2 coherence gives -2 gamma rho_01
    lay = SpaceLayout((TwoLevel(),))
    gz = 0.7
    D = [DissipatorSpec(DissipatorKind.DEPHASING, two_level_ops()[2], gz)]
    rho = np.array([[0.6, 0.3 - 0.1j], [0.3 + 0.1j, 0.4]])
    drho = lindblad_rhs(rho, 0.0, empty(lay), D)
    assert drho[0, 0] == 0 and drho[1, 1] == 0
    assert drho[0, 1] == pytest.approx(-2 * gz * rho[0, 1])
    ts = evolve(rho, empty(lay), D, IntegratorConfig(t_end=2.0, method="rk45", n_samples=10),
                {"c": Op(lay, [[0, 0], [1, 0]])})
    assert ts["c"] == pytest.approx(0.3 * np.exp(-2 * gz * ts.times), rel=1e-6)


def test_layout_mismatch():
    with pytest.raises(LayoutError):
        lindblad_rhs(np.eye(3) / 3, 0.0, empty(single(4)), [])


def test_closed_jc_rabi(fp25):
    lay = bipartite_layout(3, 3)
    H = build_mm_jc(fp25, lay)
    half = math.pi / fp25.g_r
    cfg = IntegratorConfig(t_end=2 * half, method="rk4", dt=half / 2000, n_samples=20)
    obs = {"nm": number(lay, "magnon"), "N": Op(lay, number(lay, "magnon").matrix + number(lay, "phonon").matrix, True)}
    ts = evolve(basis_state(lay, (1, 0)), H, [], cfg, obs)
    assert len(ts.times) == 21
    np.testing.assert_allclose(ts["nm"], np.sin(fp25.g_r * ts.times) ** 2, atol=1e-4)
    assert np.abs(ts["N"] - 1).max() < 1e-8
    assert ts.trace_drift < 1e-8 and ts.hermiticity < 1e-9 and ts.min_eigenvalue > -1e-6


def test_decay_only_exponential():
    lay = single(6)
    D = [thermal(lay, "phonon", 1.5, 0.0)]
    rho0 = State(lay, fock_dm(6, 3))
    ts = evolve(rho0, empty(lay), D, IntegratorConfig(t_end=2.0, dt=1e-3, n_samples=40),
                {"n": number(lay, "phonon")})
    np.testing.assert_allclose(ts["n"], 3 * np.exp(-1.5 * ts.times), rtol=1e-6)


def test_dt_bound_enforced(fp25):
    lay = bipartite_layout(2, 2)
    H = build_mm_squeezed(fp25, lay)
    limit = max_stable_dt(H.nu_max)
    assert limit == pytest.approx(2 * math.pi / (40 * 2 * fp25.omega_p))
    with pytest.raises(PreconditionError):
        evolve(basis_state(lay, (0, 0)), H, [], IntegratorConfig(t_end=1e-9, dt=2 * limit), {})


def test_max_steps(fp25):
    lay = bipartite_layout(2, 2)
    H = build_mm_squeezed(fp25, lay)
    with pytest.raises(MaxStepsError):
        evolve(basis_state(lay, (0, 0)), H, [], IntegratorConfig(t_end=1e-6, max_steps=100), {})


def test_trace_drift_abort():
    lay = single(3)
    a = mode_op(lay, "phonon")
    H = TimeDependentHamiltonian(lay, [HTerm(a, 5.0j, nu=1e-3)])  # non-Hermitian on purpose
    with pytest.raises(TraceDriftError):
        evolve(basis_state(lay, (1,)), H, [], IntegratorConfig(t_end=1.0, dt=1e-3), {})


def test_rk45_warns_on_fast_terms(fp25, caplog):
    lay = bipartite_layout(2, 2)
    H = build_mm_squeezed(fp25, lay)
    with caplog.at_level(logging.WARNING, logger="hybridsqueeze.engine"):
        evolve(basis_state(lay, (0, 0)), H, [], IntegratorConfig(t_end=1e-11, method="rk45", n_samples=2), {})
    assert "oscillating" in caplog.text


def test_rk4_step_halving_order(fp25):
    """Observable error ratio ~16 when halving dt (order 4), Fig. 2d model over 0.1 us."""
    lay = bipartite_layout(5, 5)
    H = build_mm_squeezed(fp25, lay)
    D = build_dissipators(fp25, lay)
    cm = compile_model(H, D)
    obs = {"nm": number(lay, "magnon")}
    t_end, n_samples = 0.1e-6, 50
    steps = math.ceil(t_end / max_stable_dt(H.nu_max) / n_samples) * n_samples
    res = []
    # start one halving below the stability bound; at the bound itself the
    # fifth-order term still shows (ratio ~21)
    for k in (1, 2, 3):
        cfg = IntegratorConfig(t_end=t_end, dt=t_end / (steps * 2**k), n_samples=n_samples)
        res.append(evolve(basis_state(lay, (1, 0)), H, D, cfg, obs, model=cm)["nm"])
    e1 = np.abs(res[0] - res[1]).max()
    e2 = np.abs(res[1] - res[2]).max()
    assert e1 / e2 == pytest.approx(16, rel=0.3)
