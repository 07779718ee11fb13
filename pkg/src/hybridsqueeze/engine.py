"""
Lindblad time evolution.

The master equation is written as drho/dt = Y + Y^dag with

    Y = -i G(t) rho + 1/2 sum_j w_j o_j rho o_j^dag + 1/2 sum_k c_k o_k rho o_k
    G(t) = H(t) - (i/2) sum_j w_j o_j^dag o_j - (i/2) sum_k c_k o_k o_k

which halves the matrix products and keeps rho Hermitian by construction.
The inner loop runs in numba on sparse (row, col, value) lists; operators in
these models are ladder products with O(dim) non-zeros. ``lindblad_rhs`` is
the plain dense reference and is what the tests compare the kernel against.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
from numba import njit
from scipy.integrate import solve_ivp

from .errors import (
    IntegrationError, LayoutError, MaxStepsError, PreconditionError, StepUnderflowError,
    TraceDriftError,
)
from .model import DissipatorSpec, TimeDependentHamiltonian
from .operators import Op, State

log = logging.getLogger(__name__)

TRACE_ABORT = 1e-6
NEG_EIG_WARN = -1e-6


class Method(str, Enum):
    RK4 = "rk4"
    RK45 = "rk45"


@dataclass(frozen=True)
class IntegratorConfig:
    t_end: float
    method: Method = Method.RK4
    dt: Optional[float] = None
    rtol: float = 1e-8
    atol: float = 1e-10
    n_samples: int = 400
    max_steps: int = 10_000_000
    eig_every: int = 10
    first_step: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if not self.t_end > 0:
            raise PreconditionError("t_end must be positive")
        if self.dt is not None and not self.dt > 0:
            raise PreconditionError("dt must be positive")
        if self.n_samples < 1:
            raise PreconditionError("n_samples must be >= 1")


def max_stable_dt(nu_max: float) -> float:
    """Largest fixed step allowed for a Hamiltonian oscillating at nu_max."""
    return math.inf if nu_max == 0 else 2 * math.pi / (40.0 * nu_max)


def default_dt(H: TimeDependentHamiltonian, t_rabi: float) -> float:
    return min(max_stable_dt(H.nu_max), t_rabi / 2000.0)


@dataclass
class TimeSeries:
    times: np.ndarray
    values: dict
    trace_drift: float
    min_eigenvalue: float
    hermiticity: float
    steps: int
    final: Optional[np.ndarray] = field(default=None, repr=False)

    def __getitem__(self, key):
        return self.values[key]


# --- dense reference -------------------------------------------------------------

def _as_matrix(rho, layout):
    if isinstance(rho, State):
        if rho.layout != layout:
            raise LayoutError("state and Hamiltonian live on different layouts")
        return rho.rho
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (layout.total_dim,) * 2:
        raise LayoutError("density matrix does not match the Hamiltonian layout")
    return rho


def _lindblad(o, rho):
    od = o.conj().T
    return o @ rho @ od - 0.5 * (od @ o @ rho + rho @ od @ o)


def _anomalous(o, rho):
    return o @ rho @ o - 0.5 * (o @ o @ rho + rho @ o @ o)


def lindblad_rhs(rho, t: float, H: TimeDependentHamiltonian, D) -> np.ndarray:
    """Dense drho/dt, term by term."""
    r = _as_matrix(rho, H.layout)
    Ht = H.assemble(t)
    out = -1j * (Ht @ r - r @ Ht)
    for d in D:
        if d.op.layout != H.layout:
            raise LayoutError("dissipator and Hamiltonian live on different layouts")
        for w, o in d.jumps():
            if w:
                out += w * _lindblad(o, r)
        for c, o in d.anomalous_terms():
            out += c * _anomalous(o, r)
    return out


def steady_check(rho, H: TimeDependentHamiltonian, D, t: float = 0.0) -> float:
    """max |drho/dt|; zero at a fixed point."""
    return float(np.abs(lindblad_rhs(rho, t, H, D)).max())


# --- compiled kernel -----------------------------------------------------------------

def _coo(mats, tol=0.0):
    ptr, rows, cols, vals = [0], [], [], []
    for m in mats:
        i, j = np.nonzero(np.abs(m) > tol)
        rows.append(i)
        cols.append(j)
        vals.append(m[i, j])
        ptr.append(ptr[-1] + len(i))
    cat = lambda xs, dt: np.concatenate(xs).astype(dt) if xs else np.zeros(0, dt)
    return (np.asarray(ptr, np.int64), cat(rows, np.int64), cat(cols, np.int64),
            cat(vals, np.complex128))


def _union(mats):
    """Shared sparsity pattern: (unused ptr, rows, cols, values[component, nz])."""
    mask = np.zeros(mats[0].shape, dtype=bool)
    for m in mats:
        mask |= m != 0
    i, j = np.nonzero(mask)
    vals = np.array([m[i, j] for m in mats], dtype=np.complex128).reshape(len(mats), len(i))
    return (np.zeros(1, np.int64), i.astype(np.int64), j.astype(np.int64), vals)


@dataclass(frozen=True)
class CompiledModel:
    """Sparse arrays consumed by the numba kernel."""

    dim: int
    nus: np.ndarray
    g: tuple
    sandwich: tuple
    sandwich_w: np.ndarray
    anomalous: tuple
    anomalous_c: np.ndarray
    nu_max: float


def compile_model(H: TimeDependentHamiltonian, D) -> CompiledModel:
    n = H.layout.total_dim
    comps = H.fourier()
    comps.setdefault(0.0, np.zeros((n, n), dtype=complex))
    sw_ops, sw_w, an_ops, an_c = [], [], [], []
    G0 = comps[0.0].copy()
    for d in D:
        if d.op.layout != H.layout:
            raise LayoutError("dissipator and Hamiltonian live on different layouts")
        for w, o in d.jumps():
            if w:
                G0 -= 0.5j * w * (o.conj().T @ o)
                sw_ops.append(o)
                sw_w.append(w)
        for c, o in d.anomalous_terms():
            if c:
                G0 -= 0.5j * c * (o @ o)
                an_ops.append(o)
                an_c.append(c)
    comps[0.0] = G0
    nus = sorted(comps)
    return CompiledModel(
        dim=n,
        nus=np.asarray(nus, dtype=np.float64),
        g=_union([comps[nu] for nu in nus]),
        sandwich=_coo(sw_ops),
        sandwich_w=np.asarray(sw_w, dtype=np.complex128),
        anomalous=_coo(an_ops),
        anomalous_c=np.asarray(an_c, dtype=np.complex128),
        nu_max=max((abs(x) for x in nus), default=0.0),
    )


@njit(cache=True, fastmath=True, nogil=True)
def _rhs_into(out, Y, r, rho, t, nus, gp, gr, gc, gv, sp, sr, sc, sv, sw, ap, ar, ac, av, acoef):
    n = rho.shape[0]
    for i in range(n):
        for j in range(n):
            r[i, j] = 0.5 * (rho[i, j] + np.conj(rho[j, i]))
            Y[i, j] = 0.0
    ph = np.empty(nus.shape[0], dtype=np.complex128)
    for c in range(nus.shape[0]):
        ph[c] = -1j * np.exp(1j * nus[c] * t)
    for p in range(gr.shape[0]):
        i = gr[p]
        k = gc[p]
        v = 0j
        for c in range(nus.shape[0]):
            v += ph[c] * gv[c, p]
        for j in range(n):
            Y[i, j] += v * r[k, j]
    for c in range(sw.shape[0]):
        w = 0.5 * sw[c]
        for a in range(sp[c], sp[c + 1]):
            i = sr[a]
            k = sc[a]
            va = w * sv[a]
            for b in range(sp[c], sp[c + 1]):
                Y[i, sr[b]] += va * r[k, sc[b]] * np.conj(sv[b])
    for c in range(acoef.shape[0]):
        w = 0.5 * acoef[c]
        for a in range(ap[c], ap[c + 1]):
            i = ar[a]
            k = ac[a]
            va = w * av[a]
            for b in range(ap[c], ap[c + 1]):
                Y[i, ac[b]] += va * r[k, ar[b]] * av[b]
    for i in range(n):
        for j in range(n):
            out[i, j] = Y[i, j] + np.conj(Y[j, i])


@njit(cache=True, nogil=True)
def _rhs_kernel(rho, t, nus, gp, gr, gc, gv, sp, sr, sc, sv, sw, ap, ar, ac, av, acoef):
    out = np.empty_like(rho)
    _rhs_into(out, np.empty_like(rho), np.empty_like(rho), rho, t,
              nus, gp, gr, gc, gv, sp, sr, sc, sv, sw, ap, ar, ac, av, acoef)
    return out


@njit(cache=True, fastmath=True, nogil=True)
def _rk4_chunk(rho, k0, nsteps, dt, nus, gp, gr, gc, gv, sp, sr, sc, sv, sw, ap, ar, ac, av, acoef):
    n = rho.shape[0]
    x = rho.copy()
    tmp = np.empty_like(rho)
    acc = np.empty_like(rho)
    k = np.empty_like(rho)
    Y = np.empty_like(rho)
    r = np.empty_like(rho)
    h = 0.5 * dt
    for s in range(nsteps):
        t = (k0 + s) * dt
        _rhs_into(k, Y, r, x, t, nus, gp, gr, gc, gv, sp, sr, sc, sv, sw, ap, ar, ac, av, acoef)
        for i in range(n):
            for j in range(n):
                acc[i, j] = k[i, j]
                tmp[i, j] = x[i, j] + h * k[i, j]
        _rhs_into(k, Y, r, tmp, t + h, nus, gp, gr, gc, gv, sp, sr, sc, sv, sw, ap, ar, ac, av, acoef)
        for i in range(n):
            for j in range(n):
                acc[i, j] += 2.0 * k[i, j]
                tmp[i, j] = x[i, j] + h * k[i, j]
        _rhs_into(k, Y, r, tmp, t + h, nus, gp, gr, gc, gv, sp, sr, sc, sv, sw, ap, ar, ac, av, acoef)
        for i in range(n):
            for j in range(n):
                acc[i, j] += 2.0 * k[i, j]
                tmp[i, j] = x[i, j] + dt * k[i, j]
        _rhs_into(k, Y, r, tmp, t + dt, nus, gp, gr, gc, gv, sp, sr, sc, sv, sw, ap, ar, ac, av, acoef)
        for i in range(n):
            for j in range(n):
                x[i, j] += (dt / 6.0) * (acc[i, j] + k[i, j])
    return x


def _kernel_args(cm: CompiledModel):
    return (cm.nus, *cm.g, *cm.sandwich, cm.sandwich_w, *cm.anomalous, cm.anomalous_c)


def kernel_rhs(rho, t: float, cm: CompiledModel) -> np.ndarray:
    return _rhs_kernel(np.ascontiguousarray(rho, dtype=np.complex128), float(t), *_kernel_args(cm))


# --- driver ---------------------------------------------------------------------------

class _Monitor:
    def __init__(self, obs, names, eig_every):
        self.obs = obs
        self.names = names
        self.eig_every = eig_every
        self.rows, self.times = [], []
        self.drift = 0.0
        self.herm = 0.0
        self.min_eig = math.inf

    def sample(self, t, rho):
        drift = abs(np.trace(rho) - 1.0)
        self.drift = max(self.drift, drift)
        self.herm = max(self.herm, float(np.abs(rho - rho.conj().T).max()))
        if drift > TRACE_ABORT:
            raise TraceDriftError(f"trace drift {drift:.3e} at t = {t:.6e} s exceeds {TRACE_ABORT:g}")
        if len(self.times) % self.eig_every == 0:
            self.min_eig = min(self.min_eig, float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]))
        self.rows.append(np.einsum("mij,ji->m", self.obs, rho).real)
        self.times.append(t)

    def finish(self, steps, rho):
        if self.min_eig < NEG_EIG_WARN:
            log.warning("density matrix eigenvalue %.3e below %.0e; reduce dt or raise the truncation",
                        self.min_eig, NEG_EIG_WARN)
        vals = np.array(self.rows).reshape(len(self.rows), len(self.names))
        return TimeSeries(np.array(self.times), {k: vals[:, i] for i, k in enumerate(self.names)},
                          self.drift, self.min_eig, self.herm, steps, rho)


def _observables(observables, layout):
    if isinstance(observables, dict):
        names, ops = list(observables), list(observables.values())
    else:
        ops = list(observables)
        names = [f"obs{i}" for i in range(len(ops))]
    for o in ops:
        if o.layout != layout:
            raise LayoutError("observable lives on a different layout")
    n = layout.total_dim
    stack = np.array([o.matrix for o in ops]) if ops else np.zeros((0, n, n), complex)
    return names, stack


def evolve(rho0, H: TimeDependentHamiltonian, D, cfg: IntegratorConfig, observables,
           model: Optional[CompiledModel] = None) -> TimeSeries:
    """Integrate from t = 0 to cfg.t_end, sampling ``observables`` (dict name -> Op)."""
    rho = np.array(_as_matrix(rho0, H.layout), dtype=np.complex128)
    if not isinstance(rho0, State):
        State(H.layout, rho)  # validates trace, Hermiticity, positivity
    cm = compile_model(H, D) if model is None else model
    names, obs = _observables(observables, H.layout)
    mon = _Monitor(obs, names, max(1, cfg.eig_every))
    if cfg.method is Method.RK4:
        return _evolve_rk4(rho, cm, cfg, mon)
    return _evolve_rk45(rho, cm, cfg, mon)


def _evolve_rk4(rho, cm, cfg, mon):
    limit = max_stable_dt(cm.nu_max)
    dt = cfg.dt if cfg.dt is not None else min(limit, cfg.t_end / 2000.0)
    if dt > limit * (1 + 1e-12):
        raise PreconditionError(f"dt = {dt:.3e} s exceeds 2 pi/(40 nu_max) = {limit:.3e} s")
    # round the step count up to a multiple of n_samples so samples land on
    # linspace(0, t_end, n_samples + 1)
    stride = max(1, math.ceil(cfg.t_end / dt / cfg.n_samples - 1e-9))
    nsteps = stride * cfg.n_samples
    if nsteps > cfg.max_steps:
        raise MaxStepsError(f"{nsteps} steps needed, max_steps = {cfg.max_steps}")
    dt = cfg.t_end / nsteps
    args = _kernel_args(cm)
    mon.sample(0.0, rho)
    k = 0
    while k < nsteps:
        m = min(stride, nsteps - k)
        rho = _rk4_chunk(rho, k, m, dt, *args)
        k += m
        if not np.all(np.isfinite(rho)):
            raise IntegrationError(f"non-finite state at step {k}; dt = {dt:.3e} s is unstable")
        mon.sample(k * dt, rho)
    return mon.finish(nsteps, rho)


def _evolve_rk45(rho, cm, cfg, mon):
    if cm.nu_max:
        log.warning("adaptive integration of a Hamiltonian with oscillating terms (nu_max = %.3e rad/s)",
                    cm.nu_max)
    n = cm.dim
    args = _kernel_args(cm)
    budget = [0]

    def f(t, y):
        budget[0] += 1
        if budget[0] > 6 * cfg.max_steps:
            raise MaxStepsError(f"adaptive solver exceeded max_steps = {cfg.max_steps}")
        return _rhs_kernel(y.reshape(n, n), t, *args).ravel()

    t_eval = np.linspace(0.0, cfg.t_end, cfg.n_samples + 1)
    sol = solve_ivp(f, (0.0, cfg.t_end), rho.ravel(), method="RK45", t_eval=t_eval,
                    rtol=cfg.rtol, atol=cfg.atol, first_step=cfg.first_step)
    if sol.status != 0:
        raise StepUnderflowError(f"adaptive solver failed: {sol.message}")
    for i, t in enumerate(sol.t):
        rho = sol.y[:, i].reshape(n, n)
        mon.sample(float(t), rho)
    return mon.finish(budget[0] // 6, rho)
