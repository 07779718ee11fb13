import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_density
from hybridsqueeze.engine import lindblad_rhs
from hybridsqueeze.errors import BathError, LayoutError, NumericError, PreconditionError
from hybridsqueeze.model import (
    DissipatorKind, DissipatorSpec, HTerm, TimeDependentHamiltonian, build_dissipators,
    build_hybrid_squeezed, build_mm_jc, build_mm_rotating, build_mm_squeezed,
    build_ms_effective, frame_oracle,
)
from hybridsqueeze.operators import (
    Op, bipartite_layout, embed, expm_array, mode_op, spin_magnon_layout, tripartite_layout,
    two_level_ops,
)
from hybridsqueeze.params import (
    TWO_PI, DeviceParams, EffectiveMSParams, amplified_occupation, effective_ms_params,
    frame_params,
)

MHz = TWO_PI * 1e6
GHz = TWO_PI * 1e9


def num(layout, label):
    a = mode_op(layout, label).matrix
    return a.conj().T @ a


def test_rotating_free_limit():
    d = DeviceParams(g_override=0.0)
    fp = frame_params(d, omega_p=2.0 * GHz, Omega_p=0.0)
    lay = bipartite_layout(3, 4)
    H = build_mm_rotating(fp, lay)
    expected = fp.Delta_x * num(lay, "phonon") + fp.Delta_K * num(lay, "magnon")
    np.testing.assert_allclose(H.assemble(0.37e-9), expected, atol=1e-6)
    assert np.count_nonzero(H.assemble(1e-9) - np.diag(np.diag(H.assemble(1e-9)))) == 0


def test_term_structure(fp25):
    lay = bipartite_layout(3, 3)
    rot = build_mm_rotating(fp25, lay)
    assert len(rot.terms) == 5
    assert sum(t.plus_hc for t in rot.terms) == 3
    assert sorted({t.nu for t in rot.terms}) == [0.0, 2 * fp25.omega_p]
    sq = build_mm_squeezed(fp25, lay)
    assert sum(t.plus_hc for t in sq.terms) == 4
    assert sum(not t.plus_hc for t in sq.terms) == 2
    assert not sq.rwa_dropped


def test_squeezed_coefficients(fp25):
    sq = build_mm_squeezed(fp25, bipartite_layout(3, 3))
    amps = [t.amplitude.real for t in sq.terms if t.plus_hc]
    assert min(amps) == pytest.approx(-fp25.g * math.sinh(2.5))
    assert max(amps) ** 2 - min(amps) ** 2 == pytest.approx(fp25.g**2, rel=1e-9)


def test_r0_squeezed_equals_rotating():
    fp = frame_params(DeviceParams(), omega_p=2.0 * GHz, Omega_p=0.0)
    lay = bipartite_layout(4, 3)
    rot, sq = build_mm_rotating(fp, lay), build_mm_squeezed(fp, lay)
    for t in (0.0, 0.11e-9, 3.7e-9):
        np.testing.assert_allclose(sq.assemble(t), rot.assemble(t), atol=1e-9)


def test_layout_mismatch(fp25):
    with pytest.raises(LayoutError):
        build_mm_squeezed(fp25, tripartite_layout(3, 3))
    with pytest.raises(LayoutError):
        build_hybrid_squeezed(fp25, bipartite_layout(3, 3))


@settings(max_examples=25, deadline=None)
@given(t=st.floats(0, 1e-6), r=st.floats(0.0, 2.5))
def test_assembled_hermitian(t, r):
    fp = frame_params(DeviceParams(), r_p=r) if r > 0.05 else frame_params(DeviceParams(), omega_p=2 * GHz, Omega_p=0.0)
    for H in (build_mm_rotating(fp, bipartite_layout(4, 3)), build_mm_squeezed(fp, bipartite_layout(4, 3)),
              build_hybrid_squeezed(fp, tripartite_layout(3, 3))):
        m = H.assemble(t)
        assert np.abs(m - m.conj().T).max() <= 1e-12 * np.abs(m).max()


def test_static_term_must_be_hermitian():
    lay = bipartite_layout(2, 2)
    with pytest.raises(NumericError):
        HTerm(mode_op(lay, "phonon"), 1.0)


def test_jc_conserves_excitations(fp25):
    lay = bipartite_layout(5, 5)
    H = build_mm_jc(fp25, lay).static()
    N = np.rint(np.diag(num(lay, "phonon") + num(lay, "magnon")).real)
    # exact: no matrix element links different excitation numbers
    assert np.all(H[N[:, None] != N[None, :]] == 0)
    comm = H @ np.diag(N) - np.diag(N) @ H
    assert np.abs(comm).max() <= 1e-15 * np.abs(H).max()


def test_jc_precondition(device):
    fp = frame_params(device, omega_p=2.0 * GHz, Omega_p=1.0 * GHz)
    with pytest.raises(PreconditionError):
        build_mm_jc(fp, bipartite_layout(3, 3))


def test_jc_rabi_period(fp25):
    lay = bipartite_layout(3, 3)
    H = build_mm_jc(fp25, lay).static()
    psi0 = np.zeros(9, complex)
    psi0[1 * 3 + 0] = 1.0  # phonon 1, magnon 0
    nm = np.diag(num(lay, "magnon")).real
    half = math.pi / fp25.g_r
    assert half == pytest.approx(118e-9, rel=0.01)
    for t in np.linspace(0, 2 * half, 9):
        psi = expm_array(-1j * H * t) @ psi0
        assert np.sum(nm * abs(psi) ** 2) == pytest.approx(math.sin(fp25.g_r * t) ** 2, abs=1e-9)


def test_hybrid_reduces_without_spin_coupling(device):
    d = DeviceParams(lam_override=0.0, spin=device.spin)
    fp = frame_params(d, r_p=1.2)
    lay3 = tripartite_layout(3, 3)
    lay2 = bipartite_layout(3, 3)
    H3 = build_hybrid_squeezed(fp, lay3)
    H2 = build_mm_squeezed(fp, lay2)
    sz = two_level_ops()[2].matrix
    for t in (0.0, 0.3 / fp.omega_p, 1.7 / fp.omega_p):
        expected = np.kron(np.eye(2), H2.assemble(t)) + 0.5 * fp.Delta_NV * np.kron(sz, np.eye(9))
        np.testing.assert_allclose(H3.assemble(t), expected, atol=1e-6)


def test_hybrid_rwa_drops_fast(fig3fp):
    H = build_hybrid_squeezed(fig3fp, tripartite_layout(3, 3), rwa=True)
    assert H.rwa_dropped and H.nu_max == 0.0
    assert build_hybrid_squeezed(fig3fp, tripartite_layout(3, 3)).nu_max == pytest.approx(2 * fig3fp.omega_p)


def test_fig3_dressed_gap(fig3fp):
    lay = tripartite_layout(4, 4)
    H = build_hybrid_squeezed(fig3fp, lay).static()
    ev, V = np.linalg.eigh(H)
    spin_idx = (1 * 4 + 0) * 4 + 0
    mag_idx = (0 * 4 + 0) * 4 + 1
    w = abs(V[spin_idx]) ** 2 + abs(V[mag_idx]) ** 2
    a, b = np.argsort(w)[-2:]
    gap = abs(ev[a] - ev[b])
    assert gap == pytest.approx(fig3fp.g_r / 5, rel=0.10)


def test_ms_effective(fig3fp):
    lay = spin_magnon_layout(3)
    H0 = build_ms_effective(EffectiveMSParams(1.0, 2.0, 0.0), lay).static()
    assert np.count_nonzero(H0 - np.diag(np.diag(H0))) == 0
    ep = EffectiveMSParams(0.3, 0.3, 0.05)
    H = build_ms_effective(ep, lay).static()
    psi0 = np.zeros(6, complex)
    psi0[1 * 3 + 0] = 1.0  # spin excited, magnon vacuum
    p_spin = np.diag(np.kron(np.diag([0, 1]), np.eye(3))).real
    for t in np.linspace(0, 2 * math.pi / 0.05, 7):
        psi = expm_array(-1j * H * t) @ psi0
        assert np.sum(p_spin * abs(psi) ** 2) == pytest.approx(math.cos(0.05 * t) ** 2, abs=1e-9)
    g_ms = effective_ms_params(fig3fp).g_ms
    assert math.pi / (2 * g_ms) == pytest.approx(1.49e-6, rel=0.01)


def test_dissipators_default(fp25):
    lay = bipartite_layout(3, 3)
    D = build_dissipators(fp25, lay)
    assert [d.kind for d in D] == [DissipatorKind.THERMAL] * 2
    assert D[0].occupation == amplified_occupation(fp25.n_x, 2.5)
    assert D[0].occupation == pytest.approx(4068.8, abs=0.5)
    assert not any(d.anomalous for d in D)


def test_dissipators_unsqueezed():
    fp = frame_params(DeviceParams(), omega_p=2 * GHz, Omega_p=0.0)
    D = build_dissipators(fp, bipartite_layout(3, 3))
    assert D[0].occupation == fp.n_x


def test_dissipators_svr_matched(fp25):
    D = build_dissipators(fp25, bipartite_layout(3, 3), svr=(2.5, math.pi))
    assert D[0].kind is DissipatorKind.THERMAL
    assert D[0].occupation == fp25.n_x
    assert not any(d.anomalous for d in D)


def test_dissipators_svr_mismatched_has_anomalous(fp25):
    D = build_dissipators(fp25, bipartite_layout(3, 3), svr=(2.0, 3.0))
    assert D[0].kind is DissipatorKind.SQUEEZED and D[0].anomalous


def test_dephasing_channel(fig3fp):
    D = build_dissipators(fig3fp, tripartite_layout(3, 3), dephasing=TWO_PI * 1e3)
    assert D[-1].kind is DissipatorKind.DEPHASING and D[-1].rate == TWO_PI * 1e3


def test_bath_physicality():
    op = mode_op(bipartite_layout(2, 2), "phonon")
    with pytest.raises(BathError):
        DissipatorSpec(DissipatorKind.SQUEEZED, op, 1.0, 1.0, 2.0)
    with pytest.raises(BathError):
        DissipatorSpec(DissipatorKind.THERMAL, op, -1.0, 0.0)
    with pytest.raises(BathError):
        DissipatorSpec(DissipatorKind.THERMAL, op, 1.0, 1.0, 0.5)


@pytest.mark.parametrize("r", [0.3, 0.8])
def test_strict_bath_equals_thermal_bath_on_unsqueezed_mode(r):
    """A thermal bath on b = cosh(r) b_s - sinh(r) b_s^dag, rewritten on b_s."""
    fp = frame_params(DeviceParams(), r_p=r)
    n_ph = 40
    lay = bipartite_layout(n_ph, 2)
    D = build_dissipators(fp, lay, strict=True)
    D = [D[0]]
    bs = mode_op(lay, "phonon").matrix
    b = math.cosh(r) * bs - math.sinh(r) * bs.conj().T
    ref = []
    for w, o in ((fp.gamma_x * (fp.n_x + 1), b), (fp.gamma_x * fp.n_x, b.conj().T)):
        ref.append(w * (o @ RHO @ o.conj().T - 0.5 * (o.conj().T @ o @ RHO + RHO @ o.conj().T @ o)))
    H0 = TimeDependentHamiltonian(lay, [])
    got = lindblad_rhs(RHO, 0.0, H0, D)
    keep = np.arange(lay.total_dim) // 2 < 6
    diff = np.abs((got - sum(ref))[np.ix_(keep, keep)]).max()
    assert diff < 1e-9 * fp.gamma_x * fp.n_x


def _low_state(n_ph):
    rho = np.zeros((n_ph * 2, n_ph * 2), complex)
    small = random_density(8, 5)
    idx = [(k // 2) * 2 + (k % 2) for k in range(8)]  # phonon < 4, both magnon levels
    rho[np.ix_(idx, idx)] = small
    return rho


RHO = _low_state(40)


def test_frame_oracle_zero_squeezing():
    fp = frame_params(DeviceParams(), omega_p=2 * GHz, Omega_p=0.0)
    assert frame_oracle(fp, 20, 10).deviation < 1e-6


def test_frame_oracle_r1_converged(device):
    rep = frame_oracle(frame_params(device, r_p=1.0), 240, 10)
    assert rep.relative < 1e-6


def test_frame_oracle_monotone(device):
    fp = frame_params(device, r_p=1.0)
    devs = [frame_oracle(fp, n, 6).deviation for n in (40, 80, 160)]
    assert devs[0] > devs[1] > devs[2]


def test_frame_oracle_r1_spec_truncation(device):
    # squeezed Fock states up to n = 9 at r = 1 extend well past level 40
    rep = frame_oracle(frame_params(device, r_p=1.0), 40, 10)
    assert rep.relative < 1e-6


def test_frame_oracle_r25_spec_truncation(device):
    rep = frame_oracle(frame_params(device, r_p=2.5), 120, 6)
    assert rep.relative < 1e-4
