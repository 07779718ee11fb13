"""
Operator algebra on truncated tensor-product Hilbert spaces.

Everything is stored as dense complex matrices; the largest space used by
the scenarios is (spin, phonon, magnon) = 2 x 7 x 7 = 98.

Factor order conventions used throughout the package:

- bipartite mechanics/magnon layout: (phonon, magnon)
- tripartite layout: (spin, phonon, magnon)
- reduced magnon/spin layout: (spin, magnon)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .errors import DimensionError, LayoutError, NumericError

HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class Boson:
    truncation: int
    label: str = "boson"

    def __post_init__(self):
        if int(self.truncation) != self.truncation or self.truncation < 2:
            raise DimensionError(f"boson truncation must be an integer >= 2, got {self.truncation}")

    @property
    def dim(self) -> int:
        return int(self.truncation)


@dataclass(frozen=True)
class TwoLevel:
    label: str = "spin"

    @property
    def dim(self) -> int:
        return 2


@dataclass(frozen=True)
class SpaceLayout:
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise LayoutError("a layout needs at least one factor")

    @property
    def dims(self) -> tuple:
        return tuple(f.dim for f in self.factors)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    def slot(self, label: str) -> int:
        for k, f in enumerate(self.factors):
            if f.label == label:
                return k
        raise LayoutError(f"no factor labelled {label!r} in {self.labels}")

    @property
    def labels(self) -> tuple:
        return tuple(f.label for f in self.factors)


def bipartite_layout(n_phonon: int, n_magnon: int) -> SpaceLayout:
    return SpaceLayout((Boson(n_phonon, "phonon"), Boson(n_magnon, "magnon")))


def tripartite_layout(n_phonon: int, n_magnon: int) -> SpaceLayout:
    return SpaceLayout((TwoLevel("spin"), Boson(n_phonon, "phonon"), Boson(n_magnon, "magnon")))


def spin_magnon_layout(n_magnon: int) -> SpaceLayout:
    return SpaceLayout((TwoLevel("spin"), Boson(n_magnon, "magnon")))


@dataclass(frozen=True, eq=False)
class Op:
    """A dense operator bound to a layout.

    ``hermitian`` is a tag set by builders; tagged matrices are checked on
    construction.
    """

    layout: SpaceLayout
    matrix: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        n = self.layout.total_dim
        if m.shape != (n, n):
            raise DimensionError(f"matrix shape {m.shape} does not match layout dimension {n}")
        if self.hermitian and np.max(np.abs(m - m.conj().T), initial=0.0) >= HERMITIAN_TOL * max(1.0, np.abs(m).max()):
            raise NumericError("operator tagged Hermitian is not Hermitian")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.layout.total_dim

    def dag(self) -> "Op":
        return Op(self.layout, self.matrix.conj().T, self.hermitian)

    def _check(self, other: "Op"):
        if other.layout != self.layout:
            raise LayoutError("operators live on different layouts")

    def __matmul__(self, other: "Op") -> "Op":
        self._check(other)
        return Op(self.layout, self.matrix @ other.matrix)

    def __add__(self, other: "Op") -> "Op":
        self._check(other)
        return Op(self.layout, self.matrix + other.matrix, self.hermitian and other.hermitian)

    def __sub__(self, other: "Op") -> "Op":
        self._check(other)
        return Op(self.layout, self.matrix - other.matrix, self.hermitian and other.hermitian)

    def __mul__(self, scalar) -> "Op":
        scalar = complex(scalar)
        return Op(self.layout, scalar * self.matrix, self.hermitian and scalar.imag == 0)

    __rmul__ = __mul__

    def __neg__(self) -> "Op":
        return Op(self.layout, -self.matrix, self.hermitian)


@dataclass(frozen=True, eq=False)
class State:
    layout: SpaceLayout
    rho: np.ndarray = field(repr=False)

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex)
        n = self.layout.total_dim
        if rho.shape != (n, n):
            raise DimensionError(f"density matrix shape {rho.shape} does not match layout dimension {n}")
        if abs(np.trace(rho) - 1) >= 1e-9:
            raise NumericError(f"trace {np.trace(rho).real:.3e} differs from 1")
        if np.max(np.abs(rho - rho.conj().T)) >= 1e-12:
            raise NumericError("density matrix is not Hermitian")
        if np.linalg.eigvalsh(rho).min() <= -1e-9:
            raise NumericError("density matrix has a negative eigenvalue")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)


def identity(layout: SpaceLayout) -> Op:
    return Op(layout, np.eye(layout.total_dim), hermitian=True)


def boson_annihilation(truncation: int) -> Op:
    """Ladder operator with <n-1|a|n> = sqrt(n) on a single boson factor."""
    if int(truncation) != truncation or truncation < 2:
        raise DimensionError(f"truncation must be an integer >= 2, got {truncation}")
    layout = SpaceLayout((Boson(truncation),))
    return Op(layout, np.diag(np.sqrt(np.arange(1, truncation)), 1))


def number_operator(truncation: int) -> Op:
    a = boson_annihilation(truncation)
    return Op(a.layout, a.matrix.conj().T @ a.matrix, hermitian=True)


def two_level_ops():
    """Return (sigma_plus, sigma_minus, sigma_z) in the basis (|0>, |-1>).

    sigma_plus = |-1><0| raises the NV spin into its excited state |-1>.
    """
    layout = SpaceLayout((TwoLevel(),))
    sp = np.zeros((2, 2), dtype=complex)
    sp[1, 0] = 1.0
    sm = sp.conj().T
    sz = sp @ sm - sm @ sp
    return Op(layout, sp), Op(layout, sm), Op(layout, sz, hermitian=True)


def embed(op: Op, layout: SpaceLayout, slot: int) -> Op:
    """Place a single-factor operator into ``slot`` of ``layout``."""
    if not 0 <= slot < len(layout.factors):
        raise LayoutError(f"slot {slot} out of range for {len(layout.factors)} factors")
    if op.dim != layout.factors[slot].dim:
        raise LayoutError(f"operator dimension {op.dim} does not fit factor {layout.factors[slot]}")
    mats = [np.eye(f.dim) for f in layout.factors]
    mats[slot] = op.matrix
    return Op(layout, reduce(np.kron, mats), op.hermitian)


def mode_op(layout: SpaceLayout, label: str) -> Op:
    """Annihilation operator (or sigma_minus for a two-level factor) by label."""
    k = layout.slot(label)
    f = layout.factors[k]
    if isinstance(f, TwoLevel):
        return embed(two_level_ops()[1], layout, k)
    return embed(boson_annihilation(f.dim), layout, k)


# Pade coefficients and theta thresholds for exp, degrees 3..13.
_PADE = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0),
    13: (64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
         1187353796428800.0, 129060195264000.0, 10559470521600.0,
         670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
         960960.0, 16380.0, 182.0, 1.0),
}
_THETA = {3: 1.495585217958292e-2, 5: 2.539398330063230e-1,
          7: 9.504178996162932e-1, 9: 2.097847961257068e0, 13: 5.371920351148152e0}


def _pade_uv(A, m):
    b = _PADE[m]
    n = A.shape[0]
    eye = np.eye(n, dtype=A.dtype)
    if m < 13:
        powers = [eye, A @ A]
        for _ in range(2, m // 2 + 1):
            powers.append(powers[-1] @ powers[1])
        U = sum(b[2 * k + 1] * powers[k] for k in range(m // 2 + 1))
        V = sum(b[2 * k] * powers[k] for k in range(m // 2 + 1))
        return A @ U, V
    A2 = A @ A
    A4 = A2 @ A2
    A6 = A4 @ A2
    U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
             + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * eye)
    V = (A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
         + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * eye)
    return U, V


def expm_array(A: np.ndarray) -> np.ndarray:
    """Scaling-and-squaring matrix exponential with a diagonal Pade kernel."""
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError("matrix_exponential needs a square matrix")
    if not np.all(np.isfinite(A)):
        raise NumericError("matrix has non-finite entries")
    norm = np.linalg.norm(A, 1)
    for m in (3, 5, 7, 9):
        if norm <= _THETA[m]:
            U, V = _pade_uv(A, m)
            return np.linalg.solve(V - U, V + U)
    s = max(0, int(np.ceil(np.log2(norm / _THETA[13])))) if norm > 0 else 0
    U, V = _pade_uv(A / 2.0**s, 13)
    X = np.linalg.solve(V - U, V + U)
    for _ in range(s):
        X = X @ X
    return X


def matrix_exponential(A: Op) -> Op:
    return Op(A.layout, expm_array(A.matrix))


def expectation(state: State, op: Op) -> complex:
    """Tr(rho op). Hermitian-tagged observables must come out real to 1e-9."""
    if state.layout != op.layout:
        raise LayoutError("state and operator live on different layouts")
    val = complex(np.einsum("ij,ji->", state.rho, op.matrix))
    if op.hermitian and abs(val.imag) >= 1e-9:
        raise NumericError(f"expectation of a Hermitian operator has imaginary part {val.imag:.2e}")
    return val


def fock_dm(truncation: int, n: int) -> np.ndarray:
    if not 0 <= n < truncation:
        raise DimensionError(f"Fock level {n} outside truncation {truncation}")
    rho = np.zeros((truncation, truncation), dtype=complex)
    rho[n, n] = 1.0
    return rho


def thermal_dm(truncation: int, nbar: float) -> np.ndarray:
    """Bose-Einstein populations p_k ~ (nbar/(nbar+1))**k, renormalised on the truncation."""
    if nbar < 0:
        raise NumericError("thermal occupation must be non-negative")
    if nbar == 0:
        return fock_dm(truncation, 0)
    k = np.arange(truncation)
    logp = k * (np.log(nbar) - np.log1p(nbar))
    p = np.exp(logp - logp.max())
    return np.diag(p / p.sum()).astype(complex)


def product_state(layout: SpaceLayout, factor_dms) -> State:
    """Tensor product of per-factor density matrices, in layout order."""
    factor_dms = list(factor_dms)
    if len(factor_dms) != len(layout.factors):
        raise LayoutError("one density matrix per factor is required")
    for f, rho in zip(layout.factors, factor_dms):
        if np.shape(rho) != (f.dim, f.dim):
            raise LayoutError(f"factor {f.label} expects a {f.dim}x{f.dim} density matrix")
    return State(layout, reduce(np.kron, factor_dms))


def basis_state(layout: SpaceLayout, levels) -> State:
    """|levels> as a product of Fock projectors (spin level 1 is |-1>)."""
    return product_state(layout, [fock_dm(f.dim, n) for f, n in zip(layout.factors, levels)])
