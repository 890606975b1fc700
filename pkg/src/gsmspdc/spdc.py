"""Biphoton momentum kernel: phase matching and joint detection rate.

Transverse momenta are in rad/m throughout this module.  Operation is
degenerate: lambda_s = lambda_i = 2 lambda_p, k_s = k_p / 2.

The collinear phase-matching amplitude is sinc(dq L / 2) with
dq = |q_s - q_i|^2 / (2 k_p); its Gaussian approximation is
exp(-alpha L |q_s - q_i|^2 / (4 k_p)) with alpha = 0.455.

For the non-collinear geometry the longitudinal mismatch is modeled as

    dk_z = |q_s - q_i|^2 / (2 k_p) - k_p theta_nc^2 / 2
           + rho_p (q_sx + q_ix) + rho_i q_ix

which reduces to the collinear form when theta_nc = rho_p = rho_i = 0,
produces an emission ring of radius k_s theta_nc, and skews the ring along x
under pump/idler walk-off.  This is a minimal quadratic-paraxial model, not a
dispersion calculation.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .pump import PumpParams, csd_coefficients

__all__ = [
    "CrystalParams",
    "MomentumPoint",
    "phase_match_sinc",
    "phase_match_gaussian",
    "noncollinear_mismatch",
    "joint_momentum_rate",
]

DEFAULT_ALPHA = 0.455


class MomentumPoint(NamedTuple):
    """Transverse wavevector components (rad/m).  Components may be arrays."""

    qx: float
    qy: float


@dataclass(frozen=True)
class CrystalParams:
    """Nonlinear crystal and emission geometry.

    L: crystal length (m); kind: "I" or "II"; alpha: Gaussian phase-matching
    constant; theta_nc: non-collinear opening half-angle (rad); rho_p / rho_i:
    pump / idler walk-off angles (rad).  rho_i must be 0 for type I.
    """

    L: float
    kind: str = "II"
    alpha: float = DEFAULT_ALPHA
    theta_nc: float = 0.0
    rho_p: float = 0.0
    rho_i: float = 0.0

    def __post_init__(self):
        if self.L <= 0 or self.alpha <= 0:
            raise ValueError("L and alpha must be positive")
        if self.kind not in ("I", "II"):
            raise ValueError(f"kind must be 'I' or 'II', got {self.kind!r}")
        if self.theta_nc < 0:
            raise ValueError("theta_nc must be >= 0")
        if self.kind == "I" and self.rho_i != 0.0:
            raise ValueError("rho_i must be 0 for type-I phase matching")


def _sinc(x):
    # sin(x)/x with sinc(0) = 1; np.sinc uses the normalized convention
    return np.sinc(np.asarray(x, dtype=float) / np.pi)


def _components(q):
    if isinstance(q, MomentumPoint) or (isinstance(q, tuple) and len(q) == 2):
        return np.asarray(q[0], dtype=float), np.asarray(q[1], dtype=float)
    q = np.asarray(q, dtype=float)
    return q[..., 0], q[..., 1]


def phase_match_sinc(q_s, q_i, crystal: CrystalParams, k_p: float):
    """Collinear phase-matching amplitude sinc(dq L / 2)."""
    if k_p <= 0:
        raise ValueError("k_p must be positive")
    sx, sy = _components(q_s)
    ix, iy = _components(q_i)
    dq = ((sx - ix) ** 2 + (sy - iy) ** 2) / (2.0 * k_p)
    return _sinc(dq * crystal.L / 2.0)


def phase_match_gaussian(q_s, q_i, crystal: CrystalParams, k_p: float):
    """Gaussian approximation exp(-alpha L |q_s - q_i|^2 / (4 k_p))."""
    if k_p <= 0:
        raise ValueError("k_p must be positive")
    sx, sy = _components(q_s)
    ix, iy = _components(q_i)
    d2 = (sx - ix) ** 2 + (sy - iy) ** 2
    return np.exp(-crystal.alpha * crystal.L * d2 / (4.0 * k_p))


def noncollinear_mismatch(q_s, q_i, crystal: CrystalParams, k_p: float):
    """Longitudinal mismatch dk_z (rad/m) in the non-collinear geometry."""
    if k_p <= 0:
        raise ValueError("k_p must be positive")
    sx, sy = _components(q_s)
    ix, iy = _components(q_i)
    d2 = (sx - ix) ** 2 + (sy - iy) ** 2
    return (d2 / (2.0 * k_p)
            - k_p * crystal.theta_nc**2 / 2.0
            + crystal.rho_p * (sx + ix)
            + crystal.rho_i * ix)


def joint_momentum_rate(q_s, q_i, pump: PumpParams, crystal: CrystalParams,
                        use_sinc: bool = True):
    """Joint detection rate (arb. units) for a signal/idler momentum pair.

    Product of the pump CSD diagonal at the pair-sum momentum and the squared
    non-collinear phase-matching amplitude.  With ``use_sinc=False`` the sinc
    is replaced by the Gaussian stand-in exp(-alpha L |dk_z| / 2), which
    coincides with the collinear Gaussian approximation where dk_z >= 0.
    """
    coeffs = csd_coefficients(pump)
    sx, sy = _components(q_s)
    ix, iy = _components(q_i)
    sum2 = (sx + ix) ** 2 + (sy + iy) ** 2
    envelope = coeffs.A_c * np.exp(-2.0 * (coeffs.b1 - coeffs.b2) * sum2)
    dkz = noncollinear_mismatch(q_s, q_i, crystal, pump.k_p)
    if use_sinc:
        amp2 = _sinc(crystal.L * dkz / 2.0) ** 2
    else:
        amp2 = np.exp(-crystal.alpha * crystal.L * np.abs(dkz))
    return envelope * amp2
