"""Physical parameter set of the loop-coupled optomechanical system.

One optical cavity (decay rate ``kappa``) is coupled to two mechanical
resonators of identical frequency ``omega_m``: a lossy one (rate ``gamma1 >
0``) through ``g1`` and an amplified one (``gamma2 < 0``) through ``g2``,
while the two resonators are also coupled directly through ``mu``.  All
three couplings carry an independent phase, closing the interaction loop;
only the loop phase ``-g1_phase + g2_phase + mu_phase`` is observable.

All rates and frequencies are stored as angular quantities (rad/s).  The
flat config-file interface uses experiment-friendly normalized keys (see
:data:`CONFIG_KEYS`) and converts on ingest.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, fields, replace

from scipy.constants import c as _C_LIGHT
from scipy.constants import hbar as _HBAR

from .errors import ConfigError

TWO_PI = 2.0 * math.pi

#: Canonical flat-config keys, in serialization order.
CONFIG_KEYS = (
    "omega_m_hz",
    "kappa_over_omega_m",
    "gamma1_over_omega_m",
    "gamma2_over_omega_m",
    "g1_mag_hz",
    "g1_phase_rad",
    "g2_mag_over_g1",
    "g2_phase_rad",
    "mu_mag_over_gamma_span",
    "mu_phase_rad",
    "delta_over_omega_m",
    "eta",
    "pump_power_w",
    "probe_power_w",
    "pump_wavelength_m",
)

# Angular-unit alternates accepted on ingest for the two dimensional keys.
_RAD_S_ALTERNATES = {
    "omega_m_rad_s": "omega_m_hz",
    "g1_mag_rad_s": "g1_mag_hz",
}


def _wrap_phase(phi: float) -> float:
    """Map a phase onto [0, 2*pi)."""
    phi = math.fmod(phi, TWO_PI)
    if phi < 0.0:
        phi += TWO_PI
    return phi if phi < TWO_PI else 0.0


@dataclass(frozen=True)
class DerivedDrive:
    """Pump and probe drive amplitudes, in s^(-1/2)."""

    eps_l: float
    eps_p: float


@dataclass(frozen=True)
class SystemParams:
    """Immutable parameter set; the single source of truth for a scenario.

    Attributes
    ----------
    omega_m : float
        Mechanical angular frequency [rad/s], > 0.
    kappa : float
        Total cavity decay rate [rad/s], > 0.
    gamma1, gamma2 : float
        Mechanical loss rates [rad/s]; negative means gain.
    g1_mag, g1_phase : float
        Cavity coupling to resonator 1: magnitude [rad/s] and phase [rad].
    g2_mag, g2_phase : float
        Cavity coupling to resonator 2.
    mu_mag, mu_phase : float
        Direct resonator-resonator coupling.
    delta : float
        Pump-cavity detuning (cavity minus pump frequency) [rad/s].
    eta : float
        Input coupling ratio, in (0, 1].
    pump_power, probe_power : float
        Laser powers [W], >= 0.
    pump_wavelength : float
        Pump wavelength [m], > 0.
    """

    omega_m: float
    kappa: float
    gamma1: float
    gamma2: float
    g1_mag: float
    g1_phase: float
    g2_mag: float
    g2_phase: float
    mu_mag: float
    mu_phase: float
    delta: float
    eta: float
    pump_power: float
    probe_power: float
    pump_wavelength: float

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise ConfigError(f"{f.name} must be a real number, got {v!r}")
            if not math.isfinite(v):
                raise ConfigError(f"{f.name} must be finite, got {v!r}")
            object.__setattr__(self, f.name, float(v))
        if self.omega_m <= 0.0:
            raise ConfigError(f"omega_m must be > 0, got {self.omega_m}")
        if self.kappa <= 0.0:
            raise ConfigError(f"kappa must be > 0, got {self.kappa}")
        if not 0.0 < self.eta <= 1.0:
            raise ConfigError(f"eta must lie in (0, 1], got {self.eta}")
        for name in ("g1_mag", "g2_mag", "mu_mag"):
            if getattr(self, name) < 0.0:
                raise ConfigError(f"{name} must be >= 0, got {getattr(self, name)}")
        for name in ("pump_power", "probe_power"):
            if getattr(self, name) < 0.0:
                raise ConfigError(f"{name} must be >= 0, got {getattr(self, name)}")
        if self.pump_wavelength <= 0.0:
            raise ConfigError(
                f"pump_wavelength must be > 0, got {self.pump_wavelength}"
            )
        for name in ("g1_phase", "g2_phase", "mu_phase"):
            object.__setattr__(self, name, _wrap_phase(getattr(self, name)))

    # -- derived complex couplings -------------------------------------

    @property
    def g1(self) -> complex:
        return self.g1_mag * cmath.exp(1j * self.g1_phase)

    @property
    def g2(self) -> complex:
        return self.g2_mag * cmath.exp(1j * self.g2_phase)

    @property
    def mu(self) -> complex:
        return self.mu_mag * cmath.exp(1j * self.mu_phase)

    @property
    def gamma_span(self) -> float:
        """Loss-gain span gamma1 - gamma2; the natural scale for mu."""
        return self.gamma1 - self.gamma2

    @property
    def loop_phase(self) -> float:
        """Observable phase of the closed coupling loop, in [0, 2*pi)."""
        return _wrap_phase(-self.g1_phase + self.g2_phase + self.mu_phase)

    def replace(self, **changes) -> "SystemParams":
        """Return a copy with the given fields changed (re-validated)."""
        return replace(self, **changes)

    def drives(self) -> DerivedDrive:
        """Pump and probe amplitudes from the configured powers."""
        return DerivedDrive(
            eps_l=drive_amplitude(self.pump_power, self.pump_wavelength),
            eps_p=drive_amplitude(self.probe_power, self.pump_wavelength),
        )


def fingerprint(params: SystemParams) -> str:
    """Short stable hash of the exact parameter values (provenance tag)."""
    import hashlib

    payload = ",".join(
        f"{f.name}={getattr(params, f.name).hex()}" for f in fields(params)
    )
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def drive_amplitude(power: float, wavelength: float) -> float:
    """Drive amplitude eps = sqrt(P / (hbar * omega_laser)), in s^(-1/2).

    ``omega_laser = 2*pi*c / wavelength``; eps**2 is a photon flux in 1/s.
    """
    if wavelength <= 0.0:
        raise ConfigError(f"wavelength must be > 0, got {wavelength}")
    if power < 0.0:
        raise ConfigError(f"power must be >= 0, got {power}")
    omega_laser = TWO_PI * _C_LIGHT / wavelength
    return math.sqrt(power / (_HBAR * omega_laser))


def photon_energy(wavelength: float) -> float:
    """hbar * omega_laser for the given wavelength [J]."""
    if wavelength <= 0.0:
        raise ConfigError(f"wavelength must be > 0, got {wavelength}")
    return _HBAR * TWO_PI * _C_LIGHT / wavelength


def default_params() -> SystemParams:
    """Baseline operating point used throughout the studies.

    Sideband-resolved cavity (kappa = 0.1 omega_m) at 3.68 GHz mechanical
    frequency, balanced loss/gain pair at 0.5e-2 omega_m, red-detuned pump
    (delta = omega_m) of 50 uW at 1537 nm, g1 of 2*pi MHz with |g2| = 2|g1|,
    resonator-resonator coupling at half the loss-gain span, all coupling
    phases zero, input coupling ratio 1/2.
    """
    omega_m = TWO_PI * 3.68e9
    gamma1 = 0.5e-2 * omega_m
    gamma2 = -gamma1
    g1_mag = TWO_PI * 1.0e6
    return SystemParams(
        omega_m=omega_m,
        kappa=0.1 * omega_m,
        gamma1=gamma1,
        gamma2=gamma2,
        g1_mag=g1_mag,
        g1_phase=0.0,
        g2_mag=2.0 * g1_mag,
        g2_phase=0.0,
        mu_mag=0.5 * (gamma1 - gamma2),
        mu_phase=0.0,
        delta=omega_m,
        eta=0.5,
        pump_power=50e-6,
        probe_power=0.5e-6,
        pump_wavelength=1537e-9,
    )


def from_config(raw) -> SystemParams:
    """Build a validated :class:`SystemParams` from a flat config mapping.

    Keys are the normalized :data:`CONFIG_KEYS`; ``omega_m_rad_s`` and
    ``g1_mag_rad_s`` are accepted in place of the ``*_hz`` variants (the
    ``*_hz`` values are multiplied by 2*pi on ingest).  Omitted keys fall
    back to :func:`default_params`.  Unknown keys are rejected.
    """
    if not hasattr(raw, "keys"):
        raise ConfigError(f"config must be a mapping, got {type(raw).__name__}")
    doc = dict(raw)

    unknown = sorted(set(doc) - set(CONFIG_KEYS) - set(_RAD_S_ALTERNATES))
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    for alt, canonical in _RAD_S_ALTERNATES.items():
        if alt in doc and canonical in doc:
            raise ConfigError(f"give either {alt} or {canonical}, not both")

    base = default_params()
    defaults = to_config(base)

    def get(key):
        v = doc.get(key, defaults[key])
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise ConfigError(f"{key} must be a number, got {v!r}")
        return float(v)

    def get_raw(key):
        v = doc[key]
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise ConfigError(f"{key} must be a number, got {v!r}")
        return float(v)

    if "omega_m_rad_s" in doc:
        omega_m = get_raw("omega_m_rad_s")
    else:
        omega_m = TWO_PI * get("omega_m_hz")
    if "g1_mag_rad_s" in doc:
        g1_mag = get_raw("g1_mag_rad_s")
    else:
        g1_mag = TWO_PI * get("g1_mag_hz")

    gamma1 = get("gamma1_over_omega_m") * omega_m
    gamma2 = get("gamma2_over_omega_m") * omega_m
    gamma_span = gamma1 - gamma2
    return SystemParams(
        omega_m=omega_m,
        kappa=get("kappa_over_omega_m") * omega_m,
        gamma1=gamma1,
        gamma2=gamma2,
        g1_mag=g1_mag,
        g1_phase=get("g1_phase_rad"),
        g2_mag=get("g2_mag_over_g1") * g1_mag,
        g2_phase=get("g2_phase_rad"),
        mu_mag=get("mu_mag_over_gamma_span") * gamma_span,
        mu_phase=get("mu_phase_rad"),
        delta=get("delta_over_omega_m") * omega_m,
        eta=get("eta"),
        pump_power=get("pump_power_w"),
        probe_power=get("probe_power_w"),
        pump_wavelength=get("pump_wavelength_m"),
    )


def to_config(params: SystemParams) -> dict:
    """Serialize to the canonical flat-config mapping (round-trip inverse
    of :func:`from_config`)."""
    if params.g1_mag == 0.0 and params.g2_mag != 0.0:
        raise ConfigError("cannot serialize g2_mag_over_g1 with g1_mag == 0")
    span = params.gamma_span
    if span == 0.0 and params.mu_mag != 0.0:
        raise ConfigError(
            "cannot serialize mu_mag_over_gamma_span with gamma1 == gamma2"
        )
    return {
        "omega_m_hz": params.omega_m / TWO_PI,
        "kappa_over_omega_m": params.kappa / params.omega_m,
        "gamma1_over_omega_m": params.gamma1 / params.omega_m,
        "gamma2_over_omega_m": params.gamma2 / params.omega_m,
        "g1_mag_hz": params.g1_mag / TWO_PI,
        "g1_phase_rad": params.g1_phase,
        "g2_mag_over_g1": (
            params.g2_mag / params.g1_mag if params.g1_mag != 0.0 else 0.0
        ),
        "g2_phase_rad": params.g2_phase,
        "mu_mag_over_gamma_span": (params.mu_mag / span if span != 0.0 else 0.0),
        "mu_phase_rad": params.mu_phase,
        "delta_over_omega_m": params.delta / params.omega_m,
        "eta": params.eta,
        "pump_power_w": params.pump_power,
        "probe_power_w": params.probe_power,
        "pump_wavelength_m": params.pump_wavelength,
    }
