"""Gaussian Schell-model pump: coherence parameters and characterization.

The pump is described by its wavelength, the 1/e^2 intensity radius w0 at the
crystal, and the transverse correlation length l_c.  Two derived quantities
are used throughout:

    1/delta^2 = 1/l_c^2 + 1/(4 w0^2)        effective coherence width
    A         = delta / (2 w0)               degree of spatial coherence

A runs from 0 (incoherent) to 1 (coherent).  The momentum-basis
cross-spectral density of the pump is a Gaussian kernel

    W(q, q') = A_c exp(-b1 |q|^2 - b1 |q'|^2 + 2 b2 q.q')

with coefficients

    b0 = 1 + (l_c / 2 w0)^2
    b1 = (l_c + 2 w0)^2 / (4 b0)
    b2 = w0^2 / (2 b0)

The double-slit characterization of an incoherent spot of radius a_s imaged
by a lens of focal length f obeys the Bessel visibility law

    V(nu) = |2 J1(nu) / nu|,   nu = k d12 a_s / f

whose first zero at nu = 3.832 sets the transverse correlation length
l_c = 3.832 f / (k a_s).
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import j1 as _bessel_j1

__all__ = [
    "PumpParams",
    "CoherenceParams",
    "GsmCsdCoefficients",
    "CharacterizationSetup",
    "coherence_from",
    "correlation_length_for",
    "csd_coefficients",
    "bessel_visibility",
    "pump_visibility",
    "correlation_length",
    "propagate_to_crystal",
]

# l_c / w0 ratio standing in for a fully coherent pump (error in A below 1e-6)
COHERENT_LC_RATIO = 1e3

# first zero of the J1 Bessel function
J1_FIRST_ZERO = 3.832


def _require_positive(**kwargs):
    for name, value in kwargs.items():
        if not np.isfinite(value) or value <= 0:
            raise ValueError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class PumpParams:
    """Pump beam at the crystal plane.  All lengths in meters."""

    lambda_p: float     # wavelength
    w0: float           # 1/e^2 intensity beam radius
    l_c: float          # transverse correlation length

    def __post_init__(self):
        _require_positive(lambda_p=self.lambda_p, w0=self.w0, l_c=self.l_c)

    @property
    def k_p(self) -> float:
        return 2.0 * np.pi / self.lambda_p

    @classmethod
    def from_coherence(cls, lambda_p: float, w0: float, A: float) -> "PumpParams":
        """Build pump parameters from a target degree of coherence A in (0, 1]."""
        _require_positive(lambda_p=lambda_p, w0=w0, A=A)
        if A > 1.0:
            raise ValueError(f"A must be <= 1, got {A}")
        l_c = correlation_length_for(A, w0)
        return cls(lambda_p, w0, l_c)


def correlation_length_for(A: float, w0: float) -> float:
    """Invert A = delta/(2 w0) for l_c; A = 1 maps to the coherent stand-in."""
    if A >= 1.0:
        return COHERENT_LC_RATIO * w0
    return 2.0 * w0 * A / np.sqrt(1.0 - A * A)


@dataclass(frozen=True)
class CoherenceParams:
    delta: float    # effective coherence width (m)
    A: float        # degree of spatial coherence, 0 < A <= 1


def coherence_from(pump: PumpParams) -> CoherenceParams:
    """Effective coherence width delta and degree of coherence A of the pump."""
    delta = 1.0 / np.sqrt(1.0 / pump.l_c**2 + 1.0 / (4.0 * pump.w0**2))
    return CoherenceParams(delta=delta, A=delta / (2.0 * pump.w0))


@dataclass(frozen=True)
class GsmCsdCoefficients:
    """Gaussian exponent coefficients of the momentum-basis pump CSD (m^2)."""

    b0: float
    b1: float
    b2: float
    A_c: float

    @property
    def diag_width(self) -> float:
        """1/e half-width (rad/m) of the diagonal W(q, q) = A_c exp(-2(b1-b2)|q|^2)."""
        return 1.0 / np.sqrt(2.0 * (self.b1 - self.b2))

    def kernel(self, q, qp):
        """Evaluate W(q, q') for points with components stacked on the last axis."""
        q = np.asarray(q, dtype=float)
        qp = np.asarray(qp, dtype=float)
        q2 = np.sum(q * q, axis=-1)
        qp2 = np.sum(qp * qp, axis=-1)
        dot = np.sum(q * qp, axis=-1)
        return self.A_c * np.exp(-self.b1 * q2 - self.b1 * qp2 + 2.0 * self.b2 * dot)

    def diagonal(self, q):
        """W(q, q) for points with components on the last axis."""
        q2 = np.sum(np.asarray(q, dtype=float) ** 2, axis=-1)
        return self.A_c * np.exp(-2.0 * (self.b1 - self.b2) * q2)


def csd_coefficients(pump: PumpParams) -> GsmCsdCoefficients:
    """Coefficients of the momentum-basis pump CSD.

    The amplitude normalization uses a unit proportionality constant; all
    intensities downstream are reported in arbitrary units and re-normalized
    per scan.
    """
    ratio = pump.l_c / (2.0 * pump.w0)
    b0 = 1.0 + ratio * ratio
    b1 = (pump.l_c + 2.0 * pump.w0) ** 2 / (4.0 * b0)
    b2 = pump.w0**2 / (2.0 * b0)
    A_c = (pump.w0 / (2.0 * np.pi)) ** 2
    return GsmCsdCoefficients(b0=b0, b1=b1, b2=b2, A_c=A_c)


def bessel_visibility(nu):
    """Fringe visibility |2 J1(nu) / nu| for nu >= 0; equals 1 at nu = 0.

    Below nu = 1e-4 the 0/0 form is replaced by the 4-term Taylor series
    1 - nu^2/8 + nu^4/192 - nu^6/9216.
    """
    nu = np.asarray(nu, dtype=float)
    if np.any(nu < 0):
        raise ValueError("nu must be >= 0")
    small = nu < 1e-4
    safe = np.where(small, 1.0, nu)
    vis = np.abs(2.0 * _bessel_j1(safe) / safe)
    nu2 = nu * nu
    taylor = 1.0 - nu2 / 8.0 + nu2 * nu2 / 192.0 - nu2 * nu2 * nu2 / 9216.0
    out = np.where(small, taylor, vis)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class CharacterizationSetup:
    """Geometry of the pump-coherence measurement.

    a_s: beam radius at the diffuser surface (m); f: collimating lens focal
    length (m); d12: separation of the two probed points (m); demag:
    downstream demagnification onto the crystal (dimensionless).
    """

    a_s: float
    f: float
    d12: float
    demag: float = 8.0

    def __post_init__(self):
        _require_positive(a_s=self.a_s, f=self.f, demag=self.demag)
        if self.d12 < 0:
            raise ValueError("d12 must be >= 0")


def pump_visibility(setup: CharacterizationSetup, lambda_p: float) -> float:
    """Double-slit visibility of the characterized pump at separation d12."""
    _require_positive(lambda_p=lambda_p)
    k_p = 2.0 * np.pi / lambda_p
    nu = k_p * setup.d12 * setup.a_s / setup.f
    return float(bessel_visibility(nu))


def correlation_length(a_s: float, f: float, lambda_p: float) -> float:
    """Transverse correlation length l_c = 3.832 f / (k a_s) of the output beam."""
    _require_positive(a_s=a_s, f=f, lambda_p=lambda_p)
    k_p = 2.0 * np.pi / lambda_p
    return J1_FIRST_ZERO * f / (k_p * a_s)


def propagate_to_crystal(l_c_at_lens: float, w_at_lens: float, demag: float,
                         lambda_p: float) -> PumpParams:
    """Scale beam size and correlation length through the demagnifying telescope.

    Both transverse scales shrink by the same factor, so the degree of
    coherence A is invariant.
    """
    _require_positive(l_c_at_lens=l_c_at_lens, w_at_lens=w_at_lens,
                      demag=demag, lambda_p=lambda_p)
    return PumpParams(lambda_p=lambda_p, w0=w_at_lens / demag, l_c=l_c_at_lens / demag)
