"""
Device parameters, squeezed-frame quantities and coupling-regime diagnostics.

All angular frequencies are in rad/s, masses in kg, lengths in m, fields in T.
Dynamics always use the canonical (tabulated) coupling rates; the
first-principles formulas are evaluated alongside so their ratio to the
canonical values can be reported.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

import numpy as np
from scipy import constants as sc

from .errors import DegenerateError, DomainError, InstabilityError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Constants:
    hbar: float = sc.hbar
    k_B: float = sc.k
    mu_B: float = sc.physical_constants["Bohr magneton"][0]
    g_e: float = 2.0
    mu_0: float = sc.mu_0

    @property
    def gamma(self) -> float:
        """|gamma| = g_e mu_B / hbar in rad s^-1 T^-1."""
        return self.g_e * self.mu_B / self.hbar


CONST = Constants()


def _positive(**values):
    for name, v in values.items():
        if not (v > 0 and math.isfinite(v)):
            raise DomainError(f"{name} must be positive and finite, got {v!r}")


@dataclass(frozen=True)
class CantileverParams:
    length: float = 4e-6
    width: float = 0.1e-6
    thickness: float = 0.02e-6
    young_modulus: float = 1.22e12
    density: float = 3.52e3
    Q_x: float = 1e8
    magnet_mass: float = 2.17e-18
    tip_mass: float = 2.24e-18

    def __post_init__(self):
        _positive(length=self.length, width=self.width, thickness=self.thickness,
                  young_modulus=self.young_modulus, density=self.density, Q_x=self.Q_x)
        if self.magnet_mass < 0 or self.tip_mass < 0:
            raise DomainError("attached masses must be non-negative")

    @property
    def mass(self) -> float:
        """Effective cantilever mass rho*l*w*t/4."""
        return self.density * self.length * self.width * self.thickness / 4.0

    @property
    def effective_mass(self) -> float:
        return self.mass + self.magnet_mass + self.tip_mass


@dataclass(frozen=True)
class MagnonParams:
    radius: float = 100e-9
    mu0_Ms: float = 0.74
    B_z: float = 0.084
    B_z_offset: float = 0.0
    b0: float = 1e7
    gamma_s: float = TWO_PI * 1.0e6

    def __post_init__(self):
        _positive(radius=self.radius, mu0_Ms=self.mu0_Ms, B_z=self.B_z)
        if self.b0 < 0 or self.gamma_s < 0:
            raise DomainError("b0 and gamma_s must be non-negative")
        if not 10e-9 * (1 - 1e-9) <= self.radius <= 100e-9 * (1 + 1e-9):
            warnings.warn(f"nanosphere radius {self.radius:.3g} m is outside 10-100 nm; "
                          "the Kittel-mode approximations may not hold", stacklevel=3)

    @property
    def volume(self) -> float:
        return 4.0 / 3.0 * math.pi * self.radius**3

    @property
    def M_s(self) -> float:
        """Saturation magnetisation in A/m."""
        return self.mu0_Ms / CONST.mu_0


@dataclass(frozen=True)
class SpinParams:
    D: float = TWO_PI * 2.87e9
    b1: float = 4.5e7
    gamma_z: float = TWO_PI * 1.0e3
    omega_nv: Optional[float] = None

    def __post_init__(self):
        if self.gamma_z < 0:
            raise DomainError("gamma_z must be non-negative")
        if self.b1 < 0:
            raise DomainError("b1 must be non-negative")


@dataclass(frozen=True)
class DeviceParams:
    """Physical device plus the canonical values used by every dynamics run.

    ``*_override`` fields pin a quantity to its tabulated value; ``None``
    falls back to the first-principles formula.
    """

    cantilever: CantileverParams = field(default_factory=CantileverParams)
    magnon: MagnonParams = field(default_factory=MagnonParams)
    spin: SpinParams = field(default_factory=SpinParams)
    temperature: float = 0.01
    omega_x_override: Optional[float] = TWO_PI * 3.8e6
    omega_K_override: Optional[float] = TWO_PI * 2.35e9
    g_override: Optional[float] = TWO_PI * 0.69e6
    lam_override: Optional[float] = TWO_PI * 0.69e6

    def __post_init__(self):
        if self.temperature < 0:
            raise DomainError("temperature must be non-negative")

    @property
    def omega_x(self) -> float:
        if self.omega_x_override is not None:
            return self.omega_x_override
        return cantilever_frequency(self.cantilever)

    @property
    def omega_K(self) -> float:
        if self.omega_K_override is not None:
            return self.omega_K_override
        return kittel_frequency(self.magnon.B_z - self.magnon.B_z_offset)

    @property
    def omega_nv(self) -> float:
        if self.spin.omega_nv is not None:
            return self.spin.omega_nv
        return nv_frequency(self.magnon.B_z, self.spin.D)

    @property
    def x_zpf(self) -> float:
        return zero_point_motion(self.cantilever.effective_mass, self.omega_x)

    @property
    def M_K(self) -> float:
        return kittel_zero_point_magnetization(self.magnon.M_s, self.magnon.volume)

    @property
    def g(self) -> float:
        return magnon_mechanical_coupling(self.magnon.b0, self.x_zpf, self.M_K,
                                          self.magnon.volume, self.g_override)

    @property
    def lam(self) -> float:
        return spin_mechanical_coupling(self.spin.b1, self.x_zpf, self.lam_override)

    @property
    def gamma_x(self) -> float:
        return self.omega_x / self.cantilever.Q_x

    @property
    def gamma_s(self) -> float:
        return self.magnon.gamma_s

    @property
    def gamma_z(self) -> float:
        return self.spin.gamma_z

    def with_radius(self, radius: float) -> "DeviceParams":
        """Resize the nanosphere; the canonical g scales as sqrt(V)."""
        scale = (radius / self.magnon.radius) ** 1.5
        g = None if self.g_override is None else self.g_override * scale
        return replace(self, magnon=replace(self.magnon, radius=radius), g_override=g)

    def with_Q(self, Q_x: float) -> "DeviceParams":
        return replace(self, cantilever=replace(self.cantilever, Q_x=Q_x))

    def with_gamma_s(self, gamma_s: float) -> "DeviceParams":
        return replace(self, magnon=replace(self.magnon, gamma_s=gamma_s))


def table1_device() -> DeviceParams:
    """The tabulated device (R = 100 nm YIG sphere, diamond cantilever, 10 mK)."""
    return DeviceParams(spin=SpinParams(omega_nv=TWO_PI * 2.35e9))


# --- single-formula quantities -------------------------------------------------

def cantilever_frequency(c: CantileverParams) -> float:
    """Fundamental flexural mode, 3.516 (t/l^2) sqrt(E/(12 rho))."""
    _positive(thickness=c.thickness, length=c.length, young_modulus=c.young_modulus, density=c.density)
    return 3.516 * c.thickness / c.length**2 * math.sqrt(c.young_modulus / (12.0 * c.density))


def zero_point_motion(M_eff: float, omega_x: float) -> float:
    _positive(M_eff=M_eff, omega_x=omega_x)
    return math.sqrt(CONST.hbar / (2.0 * M_eff * omega_x))


def kittel_frequency(B_z: float) -> float:
    _positive(B_z=B_z)
    return CONST.gamma * B_z


def kittel_zero_point_magnetization(M_s: float, V: float) -> float:
    _positive(M_s=M_s, V=V)
    return math.sqrt(CONST.hbar * CONST.gamma * M_s / (2.0 * V))


def magnon_mechanical_coupling(b0, x_zpf, M_K, V, canonical_override=None) -> float:
    """b0 x_zpf M_K V / (2 hbar), or the override when one is supplied."""
    if canonical_override is not None:
        return float(canonical_override)
    if b0 == 0:
        return 0.0
    _positive(b0=b0, x_zpf=x_zpf, M_K=M_K, V=V)
    return b0 * x_zpf * M_K * V / (2.0 * CONST.hbar)


def spin_mechanical_coupling(b1, x_zpf, canonical_override=None) -> float:
    """Magnitude mu_B g_e b1 x_zpf / hbar (the sign is a phase convention)."""
    if canonical_override is not None:
        return float(canonical_override)
    if b1 == 0:
        return 0.0
    _positive(b1=b1, x_zpf=x_zpf)
    return CONST.mu_B * CONST.g_e * b1 * x_zpf / CONST.hbar


def nv_frequency(B_z: float, D: float = TWO_PI * 2.87e9) -> float:
    """|0> <-> |-1> splitting D - g_e mu_B B_z / hbar."""
    if B_z < 0:
        raise DomainError("B_z must be non-negative")
    w = D - CONST.gamma * B_z
    if w <= 0:
        raise DomainError(f"B_z = {B_z} T drives |-1> through |0> (level crossing)")
    return w


def thermal_occupation(omega: float, T: float) -> float:
    if not omega > 0:
        raise DomainError("omega must be positive")
    if T < 0:
        raise DomainError("temperature must be non-negative")
    if T == 0:
        return 0.0
    return 1.0 / math.expm1(CONST.hbar * omega / (CONST.k_B * T))


def amplified_occupation(n_x: float, r_p: float) -> float:
    """Thermal occupation seen by the squeezed mode, n cosh(2r) + sinh^2(r)."""
    return n_x * math.cosh(2 * r_p) + math.sinh(r_p) ** 2


def squeezing_parameter(Omega_p: float, Delta_x: float) -> float:
    """r_p = artanh(|Omega_p / Delta_x|) / 2; the pump phase absorbs the sign."""
    if Delta_x == 0:
        raise InstabilityError("Delta_x = 0: pump on mechanical resonance")
    ratio = abs(Omega_p / Delta_x)
    if ratio >= 1:
        raise InstabilityError(f"|Omega_p/Delta_x| = {ratio:.6g} >= 1: above parametric threshold")
    return 0.5 * math.atanh(ratio)


def resonance_pump(omega_x: float, omega_K: float, r_p: float):
    """Pump (omega_p, Omega_p) that puts the squeezed phonon on the Kittel mode.

    Solves 2 sinh^2(r) omega_p = cosh(2r) omega_K - omega_x.
    """
    if r_p <= 0:
        raise DegenerateError("resonance solve needs r_p > 0")
    if not omega_K > omega_x:
        raise DomainError("resonance solve needs omega_K > omega_x")
    two_sh2 = 2.0 * math.sinh(r_p) ** 2
    omega_p = (math.cosh(2 * r_p) * omega_K - omega_x) / two_sh2
    Omega_p = abs(omega_x - omega_p) * math.tanh(2 * r_p)
    return omega_p, Omega_p


def cooperativity(g_r: float, gamma_x: float, gamma_s: float, occupation: float) -> float:
    """4 g^2 / (gamma_x gamma_s (1 + n)); pass n_x^s for C_r or n_x for C_r'."""
    if not (gamma_x > 0 and gamma_s > 0):
        raise DomainError("cooperativity needs positive damping rates")
    return 4.0 * g_r**2 / (gamma_x * gamma_s * (1.0 + occupation))


def squeezed_bath_coefficients(n_x: float, r_p: float, r_e: float, theta_e: float):
    """Noise N_s and two-phonon correlation M_s seen by the squeezed phonon.

    Literal transcription of the squeezed-reservoir coefficients; at
    r_e = r_p, theta_e = pi they reduce to (n_x, 0).
    """
    if r_e < 0:
        raise DomainError("r_e must be non-negative")
    ch2p, sh2p = math.cosh(2 * r_p), math.sinh(2 * r_p)
    ch2e, sh2e = math.cosh(2 * r_e), math.sinh(2 * r_e)
    N_s = ((n_x * ch2e + math.sinh(r_e) ** 2) * ch2p + math.sinh(r_p) ** 2
           + (n_x + 0.5) * sh2e * sh2p * math.cos(theta_e))
    phase = np.exp(1j * theta_e)
    M_s = -(2 * n_x + 1) * (0.5 * sh2p * ch2e
                            + 0.5 * sh2e * (phase * math.cosh(r_p) ** 2
                                            + np.conj(phase) * math.sinh(r_p) ** 2))
    return N_s, complex(M_s)


# --- frames ---------------------------------------------------------------------

@dataclass(frozen=True)
class FrameParams:
    """Everything a dynamics builder needs, in the frame rotating at omega_p."""

    omega_x: float
    omega_K: float
    omega_NV: float
    omega_p: float
    Omega_p: float
    r_p: float
    g: float
    lam: float
    T: float
    gamma_x: float
    gamma_s: float
    gamma_z: float = 0.0
    # derived; filled in __post_init__
    Delta_x: float = field(init=False)
    Delta_K: float = field(init=False)
    Delta_NV: float = field(init=False)
    Delta_s: float = field(init=False)
    g_r: float = field(init=False)
    g_c: float = field(init=False)
    lam_r: float = field(init=False)
    lam_c: float = field(init=False)
    n_x: float = field(init=False)
    n_s: float = field(init=False)
    n_xs: float = field(init=False)

    def __post_init__(self):
        if self.r_p < 0:
            raise DomainError("r_p must be non-negative")
        ch, sh = math.cosh(self.r_p), math.sinh(self.r_p)
        Delta_x = self.omega_x - self.omega_p
        derived = dict(
            Delta_x=Delta_x,
            Delta_K=self.omega_K - self.omega_p,
            Delta_NV=self.omega_NV - self.omega_p,
            Delta_s=Delta_x / math.cosh(2 * self.r_p),
            g_r=self.g * ch, g_c=self.g * sh,
            lam_r=self.lam * ch, lam_c=self.lam * sh,
            n_x=thermal_occupation(self.omega_x, self.T),
            n_s=thermal_occupation(self.omega_K, self.T) if self.omega_K > 0 else 0.0,
        )
        derived["n_xs"] = amplified_occupation(derived["n_x"], self.r_p)
        for k, v in derived.items():
            object.__setattr__(self, k, v)

    @property
    def two_phonon_amplitude(self) -> float:
        """Coefficient of (b^2 + b^dag^2) in the rotating frame.

        Written -Omega_p/2 with the pump phase chosen so that r_p >= 0, which
        makes it sign(Delta_x) |Omega_p| / 2.
        """
        return math.copysign(self.Omega_p, self.Delta_x) / 2.0

    @property
    def gamma_x_eff(self) -> float:
        """Damping of the squeezed mode, gamma_x cosh(2 r_p)."""
        return self.gamma_x * math.cosh(2 * self.r_p)


def frame_params(device: DeviceParams, omega_p=None, Omega_p=None, r_p=None) -> FrameParams:
    """Build a frame from an explicit pump (omega_p, Omega_p) or from r_p.

    With only ``r_p`` the pump is solved for squeezed-phonon/Kittel resonance.
    """
    omega_x, omega_K = device.omega_x, device.omega_K
    if omega_p is None:
        if r_p is None:
            raise DomainError("give either (omega_p, Omega_p) or r_p")
        omega_p, Omega_p = resonance_pump(omega_x, omega_K, r_p)
    else:
        if Omega_p is None:
            raise DomainError("Omega_p is required with omega_p")
        r = squeezing_parameter(Omega_p, omega_x - omega_p) if Omega_p != 0 else 0.0
        if r_p is not None and not math.isclose(r, r_p, rel_tol=1e-9, abs_tol=1e-12):
            raise DomainError(f"pump gives r_p = {r:.12g}, inconsistent with requested {r_p}")
        r_p = r
    return FrameParams(omega_x=omega_x, omega_K=omega_K, omega_NV=device.omega_nv,
                       omega_p=omega_p, Omega_p=abs(Omega_p), r_p=r_p,
                       g=device.g, lam=device.lam, T=device.temperature,
                       gamma_x=device.gamma_x, gamma_s=device.gamma_s, gamma_z=device.gamma_z)


def frame_from_detunings(device: DeviceParams, r_p: float, Delta_s_over_gr: float,
                         Delta_K_over_gr: float, Delta_NV_over_gr=None,
                         lam_r_over_gr=None) -> FrameParams:
    """Frame fixed by detunings in units of g_r (dispersive scenarios).

    The pump follows from Delta_x = Delta_s cosh(2 r_p) and
    Omega_p = |Delta_x| tanh(2 r_p); the magnon and NV frequencies follow
    from their detunings.
    """
    if r_p < 0:
        raise DomainError("r_p must be non-negative")
    g = device.g
    g_r = g * math.cosh(r_p)
    Delta_s = Delta_s_over_gr * g_r
    Delta_x = Delta_s * math.cosh(2 * r_p)
    omega_p = device.omega_x - Delta_x
    Omega_p = abs(Delta_x) * math.tanh(2 * r_p)
    if Delta_NV_over_gr is None:
        Delta_NV_over_gr = Delta_K_over_gr
    lam = device.lam if lam_r_over_gr is None else lam_r_over_gr * g
    return FrameParams(omega_x=device.omega_x, omega_K=omega_p + Delta_K_over_gr * g_r,
                       omega_NV=omega_p + Delta_NV_over_gr * g_r, omega_p=omega_p,
                       Omega_p=Omega_p, r_p=r_p, g=g, lam=lam, T=device.temperature,
                       gamma_x=device.gamma_x, gamma_s=device.gamma_s, gamma_z=device.gamma_z)


# --- diagnostics ------------------------------------------------------------------

class Regime(str, Enum):
    WCR = "WCR"
    SCR = "SCR"
    UCR = "UCR"


@dataclass(frozen=True)
class RegimeReport:
    g_over_gamma_s: float
    g_over_Delta_s: float
    regime: Regime
    scr: bool
    ucr: bool
    C_r: float
    C_r_prime: float


def regime_classify(fp: FrameParams, gamma_s: Optional[float] = None) -> RegimeReport:
    """SCR iff g_r/gamma_s > 1; UCR iff also g_r/|Delta_s| > 0.1 (strict)."""
    gamma_s = fp.gamma_s if gamma_s is None else gamma_s
    g_over_gs = fp.g_r / gamma_s
    g_over_ds = fp.g_r / abs(fp.Delta_s) if fp.Delta_s != 0 else math.inf
    scr = g_over_gs > 1.0
    ucr = scr and g_over_ds > 0.1
    regime = Regime.UCR if ucr else Regime.SCR if scr else Regime.WCR
    C_r = cooperativity(fp.g_r, fp.gamma_x, gamma_s, fp.n_xs)
    C_rp = cooperativity(fp.g_r, fp.gamma_x, gamma_s, fp.n_x)
    return RegimeReport(g_over_gs, g_over_ds, regime, scr, ucr, C_r, C_rp)


@dataclass(frozen=True)
class RwaRatios:
    ratio_2ds: float
    ratio_wp_ds: float
    ratio_2wp: float

    @property
    def minimum(self) -> float:
        return min(self.ratio_2ds, self.ratio_wp_ds, self.ratio_2wp)


def rwa_ratios(fp: FrameParams) -> RwaRatios:
    """Counter-rotating frequencies over g_max = max(g_r, g_c) on resonance."""
    g_max = max(fp.g_r, abs(fp.g_c))
    if g_max == 0:
        return RwaRatios(math.inf, math.inf, math.inf)
    return RwaRatios(2 * abs(fp.Delta_s) / g_max,
                     2 * (fp.omega_p + fp.Delta_s) / g_max,
                     2 * fp.omega_p / g_max)


@dataclass(frozen=True)
class DispersiveReport:
    ratios: dict
    passed: dict
    slow_factor: float
    pump_factor: float

    @property
    def ok(self) -> bool:
        return all(self.passed.values())


def _safe_ratio(num, den):
    return math.inf if den == 0 else abs(num) / abs(den)


def dispersive_validity(fp: FrameParams, slow_factor: float = 5.0,
                        pump_factor: float = 50.0) -> DispersiveReport:
    """Large-detuning chains for adiabatic elimination of the squeezed phonon.

    For each partner X in (K, NV) with coupling c_X:
      |Delta_s - Delta_X| / c_X                    >= slow_factor
      |Delta_s + Delta_X| / |Delta_s - Delta_X|    >= slow_factor
      |Delta_s + Delta_X + 2 w_p| / |Delta_s - Delta_X|  >= pump_factor
      |Delta_s - Delta_X - 2 w_p| / |Delta_s - Delta_X|  >= pump_factor
    """
    ratios, passed = {}, {}
    two_wp = 2 * fp.omega_p
    for name, D, c in (("K", fp.Delta_K, fp.g_r), ("NV", fp.Delta_NV, fp.lam_r)):
        if c == 0:
            continue
        gap = fp.Delta_s - D
        entries = {
            f"gap_{name}": (_safe_ratio(gap, c), slow_factor),
            f"sum_{name}": (_safe_ratio(fp.Delta_s + D, gap), slow_factor),
            f"pump_plus_{name}": (_safe_ratio(fp.Delta_s + D + two_wp, gap), pump_factor),
            f"pump_minus_{name}": (_safe_ratio(fp.Delta_s - D - two_wp, gap), pump_factor),
        }
        for key, (val, thr) in entries.items():
            ratios[key] = val
            passed[key] = val >= thr
    return DispersiveReport(ratios, passed, slow_factor, pump_factor)


@dataclass(frozen=True)
class EffectiveMSParams:
    Delta_k: float
    Delta_n: float
    g_ms: float


def effective_ms_params(fp: FrameParams) -> EffectiveMSParams:
    """Phonon-mediated magnon-spin rates after eliminating the squeezed phonon."""
    dK = fp.Delta_K - fp.Delta_s
    dN = fp.Delta_NV - fp.Delta_s
    if dK == 0:
        raise DegenerateError("Delta_K = Delta_s: squeezed phonon resonant with the magnon")
    Delta_k = fp.g_r**2 / dK
    if fp.lam_r == 0:
        return EffectiveMSParams(Delta_k, 0.0, 0.0)
    if dN == 0:
        raise DegenerateError("Delta_NV = Delta_s: squeezed phonon resonant with the spin")
    Delta_n = fp.lam_r**2 / dN
    g_ms = 0.5 * fp.g_r * fp.lam_r * (1.0 / dK + 1.0 / dN)
    return EffectiveMSParams(Delta_k, Delta_n, g_ms)


# --- tabulated comparison -----------------------------------------------------------

@dataclass(frozen=True)
class TableRow:
    symbol: str
    derived_value: float
    paper_value: float
    rel_tol: Optional[float]
    note: str = ""

    @property
    def ratio(self) -> float:
        return self.derived_value / self.paper_value

    @property
    def status(self) -> str:
        if self.rel_tol is None:
            return "documented discrepancy"
        return "match" if abs(self.ratio - 1) <= self.rel_tol else "mismatch"


TABLE1 = {
    "omega_x": TWO_PI * 3.8e6,
    "gamma_x": TWO_PI * 0.038,
    "n_x": 55.0,
    "M": 7.0e-18,
    "x_zpf": 2.69e-13,
    "omega_p": TWO_PI * 2.382e9,
    "Omega_p": TWO_PI * 2.378e9,
    "omega_K": TWO_PI * 2.35e9,
    "n_s": 1.3e-5,
    "V": 4.2e-21,
    "omega_NV": TWO_PI * 2.35e9,
    "g": TWO_PI * 0.69e6,
    "lambda": TWO_PI * 0.69e6,
}


def derive_table1(device: Optional[DeviceParams] = None, r_p: float = 2.5) -> list:
    """Re-derive every tabulated quantity that follows from the physical inputs."""
    device = table1_device() if device is None else device
    c, m, s = device.cantilever, device.magnon, device.spin
    T = device.temperature
    omega_p, Omega_p = resonance_pump(device.omega_x, device.omega_K, r_p)
    x_zpf = zero_point_motion(c.effective_mass, cantilever_frequency(c))
    M_K = kittel_zero_point_magnetization(m.M_s, m.volume)
    rows = [
        TableRow("omega_x_rad_per_s", cantilever_frequency(c), TABLE1["omega_x"], 0.02),
        TableRow("gamma_x_rad_per_s", device.omega_x / c.Q_x, TABLE1["gamma_x"], 0.01),
        TableRow("n_x", thermal_occupation(device.omega_x, T), TABLE1["n_x"], 1.0 / 55.0),
        TableRow("M_kg", c.mass, TABLE1["M"], 0.02),
        TableRow("x_zpf_m", x_zpf, TABLE1["x_zpf"], None,
                 "M_eff = M + M_m + M_t with the formula frequency"),
        TableRow("omega_p_rad_per_s", omega_p, TABLE1["omega_p"], 1e-3),
        TableRow("Omega_p_rad_per_s", Omega_p, TABLE1["Omega_p"], 1e-3),
        TableRow("omega_K_rad_per_s", kittel_frequency(m.B_z - m.B_z_offset), TABLE1["omega_K"], 0.01),
        TableRow("n_s", thermal_occupation(device.omega_K, T), TABLE1["n_s"], 0.1),
        TableRow("V_m3", m.volume, TABLE1["V"], 0.01),
        TableRow("omega_NV_rad_per_s", nv_frequency(m.B_z, s.D), TABLE1["omega_NV"], None,
                 "D - g_e mu_B B_z / hbar at the tabulated B_z"),
        TableRow("g_rad_per_s", magnon_mechanical_coupling(m.b0, x_zpf, M_K, m.volume),
                 TABLE1["g"], None, "b0 x_zpf M_K V / (2 hbar) with M_K in A/m"),
        TableRow("lambda_rad_per_s", spin_mechanical_coupling(s.b1, x_zpf), TABLE1["lambda"], None,
                 "mu_B g_e b1 x_zpf / hbar"),
    ]
    return rows
