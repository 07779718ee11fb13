"""
Hamiltonians as time-periodic term lists, and the dissipators acting on them.

A term contributes ``amplitude * exp(i nu t) * op`` and, when ``plus_hc`` is
set, its conjugate transpose as well. Builders never assemble H at a fixed
time; the integrator asks for the Fourier components instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .errors import BathError, LayoutError, NumericError, PreconditionError
from .operators import (
    Boson, Op, SpaceLayout, TwoLevel, bipartite_layout, boson_annihilation, embed,
    expm_array, identity, mode_op, two_level_ops,
)
from .params import EffectiveMSParams, FrameParams, squeezed_bath_coefficients

HERM_TOL = 1e-12


@dataclass(frozen=True)
class HTerm:
    op: Op
    amplitude: complex
    nu: float = 0.0
    plus_hc: bool = False

    def __post_init__(self):
        object.__setattr__(self, "amplitude", complex(self.amplitude))
        if self.nu == 0 and not self.plus_hc:
            m = self.amplitude * self.op.matrix
            scale = max(1.0, np.abs(m).max(initial=0.0))
            if np.abs(m - m.conj().T).max(initial=0.0) >= HERM_TOL * scale:
                raise NumericError("static term without plus_hc must be Hermitian")

    def components(self):
        """(nu, matrix) pairs; the h.c. part oscillates at -nu."""
        m = self.amplitude * self.op.matrix
        out = [(self.nu, m)]
        if self.plus_hc:
            out.append((-self.nu, m.conj().T))
        return out


@dataclass(frozen=True)
class TimeDependentHamiltonian:
    layout: SpaceLayout
    terms: tuple
    rwa_dropped: bool = False

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        for t in self.terms:
            if t.op.layout != self.layout:
                raise LayoutError("term operator lives on a different layout")

    def fourier(self) -> dict:
        """Map nu -> matrix with H(t) = sum_nu M_nu exp(i nu t)."""
        n = self.layout.total_dim
        out = {}
        for term in self.terms:
            for nu, m in term.components():
                out.setdefault(nu, np.zeros((n, n), dtype=complex))
                out[nu] = out[nu] + m
        return out

    def assemble(self, t: float) -> np.ndarray:
        n = self.layout.total_dim
        H = np.zeros((n, n), dtype=complex)
        for nu, m in self.fourier().items():
            H += m if nu == 0 else m * np.exp(1j * nu * t)
        return H

    def static(self) -> np.ndarray:
        return self.fourier().get(0.0, np.zeros((self.layout.total_dim,) * 2, dtype=complex))

    @property
    def nu_max(self) -> float:
        return max((abs(t.nu) for t in self.terms), default=0.0)

    def drop_fast(self) -> "TimeDependentHamiltonian":
        return TimeDependentHamiltonian(self.layout, [t for t in self.terms if t.nu == 0], True)


class DissipatorKind(str, Enum):
    THERMAL = "thermal"
    DEPHASING = "dephasing"
    SQUEEZED = "squeezed_reservoir"


@dataclass(frozen=True)
class DissipatorSpec:
    """One reservoir channel.

    THERMAL:   rate [(n+1) L_o + n L_{o^dag}]
    DEPHASING: rate L_o with o = sigma_z
    SQUEEZED:  rate [(N+1) L_o + N L_{o^dag}] - rate (M A_o + M^* A_{o^dag})

    with L_o rho = o rho o^dag - {o^dag o, rho}/2 and the anomalous
    A_o rho = o rho o - {o o, rho}/2. For a squeezed reservoir ``correlation``
    holds M as it enters that expression.
    """

    kind: DissipatorKind
    op: Op
    rate: float
    occupation: float = 0.0
    correlation: complex = 0.0

    def __post_init__(self):
        if self.rate < 0:
            raise BathError(f"negative rate {self.rate}")
        if self.occupation < 0:
            raise BathError(f"negative occupation {self.occupation}")
        N, M = self.occupation, complex(self.correlation)
        object.__setattr__(self, "correlation", M)
        if abs(M) > math.sqrt(N * (N + 1)) + 1e-9 * max(1.0, N + 1):
            raise BathError(f"|M| = {abs(M):.6g} exceeds sqrt(N(N+1)) for N = {N:.6g}")
        if self.kind is not DissipatorKind.SQUEEZED and M != 0:
            raise BathError("only a squeezed reservoir carries a two-phonon correlation")

    @property
    def anomalous(self) -> bool:
        return self.kind is DissipatorKind.SQUEEZED and self.correlation != 0

    def jumps(self):
        """(rate, jump matrix) pairs entering as rate * L_jump."""
        o = self.op.matrix
        if self.kind is DissipatorKind.DEPHASING:
            return [(self.rate, o)]
        return [(self.rate * (self.occupation + 1), o), (self.rate * self.occupation, o.conj().T)]

    def anomalous_terms(self):
        """(coefficient, operator) pairs entering as coefficient * A_op."""
        if not self.anomalous:
            return []
        o = self.op.matrix
        M = self.correlation
        return [(-self.rate * M, o), (-self.rate * np.conj(M), o.conj().T)]


def _require(layout: SpaceLayout, kinds):
    got = tuple((type(f), f.label) for f in layout.factors)
    want = tuple(kinds)
    if got != want:
        raise LayoutError(f"layout {layout.labels} does not match the expected factors {[k[1] for k in want]}")


_BIPARTITE = ((Boson, "phonon"), (Boson, "magnon"))
_TRIPARTITE = ((TwoLevel, "spin"), (Boson, "phonon"), (Boson, "magnon"))
_SPIN_MAGNON = ((TwoLevel, "spin"), (Boson, "magnon"))


def _num(op: Op) -> Op:
    return Op(op.layout, op.matrix.conj().T @ op.matrix, hermitian=True)


def _mm_terms(fp: FrameParams, b: Op, s: Op):
    """Squeezed-frame phonon/magnon terms shared by the bipartite and tripartite models."""
    w2 = 2.0 * fp.omega_p
    bs_dag = b @ s.dag()
    bd_sd = b.dag() @ s.dag()
    return [
        HTerm(_num(b), fp.Delta_s),
        HTerm(_num(s), fp.Delta_K),
        HTerm(bs_dag, fp.g_r, 0.0, True),
        HTerm(bd_sd, fp.g_r, w2, True),
        HTerm(bd_sd, -fp.g_c, 0.0, True),
        HTerm(bs_dag, -fp.g_c, w2, True),
    ]


def build_mm_rotating(fp: FrameParams, layout: SpaceLayout) -> TimeDependentHamiltonian:
    """Phonon/magnon in the frame rotating at the pump frequency, before squeezing."""
    _require(layout, _BIPARTITE)
    b, s = mode_op(layout, "phonon"), mode_op(layout, "magnon")
    terms = [
        HTerm(_num(b), fp.Delta_x),
        HTerm(_num(s), fp.Delta_K),
        HTerm(b @ b, fp.two_phonon_amplitude, 0.0, True),
        HTerm(b @ s.dag(), fp.g, 0.0, True),
        HTerm(b.dag() @ s.dag(), fp.g, 2.0 * fp.omega_p, True),
    ]
    return TimeDependentHamiltonian(layout, terms)


def build_mm_squeezed(fp: FrameParams, layout: SpaceLayout) -> TimeDependentHamiltonian:
    _require(layout, _BIPARTITE)
    b, s = mode_op(layout, "phonon"), mode_op(layout, "magnon")
    return TimeDependentHamiltonian(layout, _mm_terms(fp, b, s))


def build_mm_jc(fp: FrameParams, layout: SpaceLayout, rtol: float = 1e-6) -> TimeDependentHamiltonian:
    """Resonant beam-splitter model left after the rotating-wave approximation."""
    _require(layout, _BIPARTITE)
    if abs(fp.Delta_s - fp.Delta_K) > rtol * max(abs(fp.Delta_s), abs(fp.Delta_K), fp.g_r):
        raise PreconditionError(
            f"JC reduction needs Delta_s = Delta_K; off by {abs(fp.Delta_s - fp.Delta_K):.3e} rad/s")
    b, s = mode_op(layout, "phonon"), mode_op(layout, "magnon")
    terms = [HTerm(_num(b), fp.Delta_s), HTerm(_num(s), fp.Delta_K), HTerm(b @ s.dag(), fp.g_r, 0.0, True)]
    return TimeDependentHamiltonian(layout, terms)


def build_hybrid_squeezed(fp: FrameParams, layout: SpaceLayout, rwa: bool = False) -> TimeDependentHamiltonian:
    """Spin + squeezed phonon + magnon; ``rwa`` drops every oscillating term."""
    _require(layout, _TRIPARTITE)
    b, s = mode_op(layout, "phonon"), mode_op(layout, "magnon")
    sp, _, sz = (embed(o, layout, 0) for o in two_level_ops())
    w2 = 2.0 * fp.omega_p
    terms = _mm_terms(fp, b, s) + [
        HTerm(sz, 0.5 * fp.Delta_NV),
        HTerm(b @ sp, fp.lam_r, 0.0, True),
        HTerm(b.dag() @ sp, fp.lam_r, w2, True),
        HTerm(b.dag() @ sp, -fp.lam_c, 0.0, True),
        HTerm(b @ sp, -fp.lam_c, w2, True),
    ]
    H = TimeDependentHamiltonian(layout, terms)
    return H.drop_fast() if rwa else H


def build_ms_effective(ep: EffectiveMSParams, layout: SpaceLayout) -> TimeDependentHamiltonian:
    """Magnon-spin exchange after the squeezed phonon is eliminated."""
    _require(layout, _SPIN_MAGNON)
    s = mode_op(layout, "magnon")
    sp, sm, _ = (embed(o, layout, 0) for o in two_level_ops())
    terms = [HTerm(_num(s), ep.Delta_k), HTerm(Op(layout, (sp @ sm).matrix, True), ep.Delta_n),
             HTerm(s.dag() @ sm, ep.g_ms, 0.0, True)]
    return TimeDependentHamiltonian(layout, terms)


def build_dissipators(fp: FrameParams, layout: SpaceLayout, svr=None, dephasing: Optional[float] = None,
                      strict: bool = False):
    """Reservoir channels for the squeezed-frame models.

    svr: optional (r_e, theta_e) of an auxiliary squeezed-vacuum reservoir.
    strict: keep the two-phonon correlations of the unsqueezed bath that the
    weak-damping approximation normally drops.
    """
    s = mode_op(layout, "magnon")
    b = mode_op(layout, "phonon") if "phonon" in layout.labels else None
    out = []
    if b is None:
        pass  # phonon already eliminated (effective magnon-spin model)
    elif svr is not None:
        r_e, theta_e = svr
        if r_e == fp.r_p and math.cos(theta_e) == -1.0:
            # matched reservoir: amplified noise cancels exactly
            out.append(DissipatorSpec(DissipatorKind.THERMAL, b, fp.gamma_x, fp.n_x))
        else:
            N, M = squeezed_bath_coefficients(fp.n_x, fp.r_p, r_e, theta_e)
            out.append(_squeezed(b, fp.gamma_x, N, M))
    elif strict and fp.r_p != 0:
        N, M = squeezed_bath_coefficients(fp.n_x, fp.r_p, 0.0, 0.0)
        out.append(_squeezed(b, fp.gamma_x, N, M))
    else:
        out.append(DissipatorSpec(DissipatorKind.THERMAL, b, fp.gamma_x, fp.n_xs))
    out.append(DissipatorSpec(DissipatorKind.THERMAL, s, fp.gamma_s, fp.n_s))
    if dephasing:
        k = layout.slot("spin")
        out.append(DissipatorSpec(DissipatorKind.DEPHASING, embed(two_level_ops()[2], layout, k), dephasing))
    return out


def _squeezed(b: Op, rate: float, N: float, M_s: complex) -> DissipatorSpec:
    # M_s from the reservoir coefficients enters with the opposite sign to
    # the -rate*M*A_b convention: transforming a thermal bath on
    # b = cosh(r) b_s - sinh(r) b_s^dag gives M = +(2n+1) sinh(2r)/2.
    return DissipatorSpec(DissipatorKind.SQUEEZED, b, rate, N, -M_s)


@dataclass(frozen=True)
class OracleReport:
    deviation: float
    scale: float
    interior: int
    truncation: int

    @property
    def relative(self) -> float:
        return self.deviation / self.scale if self.scale else self.deviation


def squeeze_unitary(truncation: int, r_p: float) -> np.ndarray:
    """exp[r (a^2 - a^dag^2) / 2] on a single truncated mode."""
    a = boson_annihilation(truncation).matrix
    return expm_array(0.5 * r_p * (a @ a - a.conj().T @ a.conj().T))


def frame_oracle(fp: FrameParams, truncation: int, interior: int, magnon_truncation: int = 2,
                 H_rot: Optional[TimeDependentHamiltonian] = None) -> OracleReport:
    """Conjugate the static rotating-frame Hamiltonian by the squeeze operator.

    Compares against the static squeezed-frame Hamiltonian (plus the constant
    (Delta_s - Delta_x)/2 produced by normal ordering) on the block with
    phonon level < ``interior``.
    """
    layout = bipartite_layout(truncation, magnon_truncation)
    if H_rot is None:
        H_rot = build_mm_rotating(fp, layout)
    elif H_rot.layout != layout:
        raise LayoutError("H_rot must live on bipartite_layout(truncation, magnon_truncation)")
    U = np.kron(squeeze_unitary(truncation, fp.r_p), np.eye(magnon_truncation))
    conj = U.conj().T @ H_rot.static() @ U
    ref = build_mm_squeezed(fp, layout).static() + 0.5 * (fp.Delta_s - fp.Delta_x) * np.eye(layout.total_dim)
    keep = np.arange(layout.total_dim)
    keep = keep[keep // magnon_truncation < interior]
    dev = np.abs((conj - ref)[np.ix_(keep, keep)]).max()
    return OracleReport(float(dev), abs(fp.Delta_x), interior, truncation)
