"""Far-field transverse profiles of the down-converted light.

singles_profile integrates the joint momentum rate over the undetected
photon.  The pump CSD diagonal confines the pair-sum momentum u = q_s + q_i
to a Gaussian of 1/e half-width ~1/(2 sqrt(b1 - b2)), so the inner integral
runs over a +-6 sigma box in u with tensor Gauss-Legendre quadrature (or
importance-sampled Monte Carlo drawn exactly from that Gaussian).

Momenta are in rad/m.  A camera at the focal plane of a collimating lens maps
position X to transverse momentum q = k X / f (helpers below).
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import ConvergenceError
from .pump import PumpParams, coherence_from, csd_coefficients
from .records import Profile2D, Scan1D
from .spdc import CrystalParams, joint_momentum_rate

__all__ = [
    "ring_radius",
    "overlap_point",
    "position_to_momentum",
    "momentum_to_position",
    "singles_profile",
    "conditional_scan",
    "ring_radial_profile",
]

QUADRATURE_TOL = 1e-4
DEFAULT_INNER_ORDER = 32
INNER_BOX_SIGMAS = 6.0


def ring_radius(crystal: CrystalParams, k_p: float) -> float:
    """Far-field ring radius k_s theta_nc of the degenerate emission cone."""
    return 0.5 * k_p * crystal.theta_nc


def overlap_point(crystal: CrystalParams, k_p: float):
    """Signal momentum (q_sx, 0) on the pair ring along +x.

    Solves dk_z(q_s, -q_s) = 0 for q_s = (q, 0): the point where the
    anti-correlated pair is exactly phase matched; with walk-off the root
    shifts along +x.  The two such points (+-x) are where the type-II rings
    overlap.
    """
    # 2 q^2 / k_p - rho_i q - k_p theta^2 / 2 = 0
    aa = 2.0 / k_p
    bb = -crystal.rho_i
    cc = -k_p * crystal.theta_nc**2 / 2.0
    q = (-bb + np.sqrt(bb * bb - 4.0 * aa * cc)) / (2.0 * aa)
    return (float(q), 0.0)


def position_to_momentum(x, focal_length: float, wavelength: float):
    """Camera-plane position -> transverse momentum behind a collimating lens."""
    return (2.0 * np.pi / wavelength) * np.asarray(x, dtype=float) / focal_length


def momentum_to_position(q, focal_length: float, wavelength: float):
    return np.asarray(q, dtype=float) * focal_length / (2.0 * np.pi / wavelength)


def _sum_box(pump: PumpParams):
    coeffs = csd_coefficients(pump)
    sigma = 1.0 / (2.0 * np.sqrt(coeffs.b1 - coeffs.b2))
    return sigma


def _singles_quadrature(qx, qy, pump, crystal, order, center_shift=(0.0, 0.0),
                        idler_ring=False, threads=1):
    """Integrate the joint rate over the pair-sum momentum at each (qx, qy).

    center_shift displaces the ring center; idler_ring applies the idler
    walk-off to the detected photon instead of the undetected one.
    """
    sigma = _sum_box(pump)
    xg, wg = np.polynomial.legendre.leggauss(order)
    u = INNER_BOX_SIGMAS * sigma * xg
    wu = INNER_BOX_SIGMAS * sigma * wg
    UX, UY = np.meshgrid(u, u, indexing="ij")
    ux, uy = UX.ravel(), UY.ravel()
    wts = np.outer(wu, wu).ravel()

    cx, cy = center_shift
    qxf = qx.ravel() - cx
    qyf = qy.ravel() - cy
    out = np.empty(qxf.size)

    if idler_ring:
        # detected photon plays the idler role: swap labels in the kernel
        def rate(det_x, det_y, other_x, other_y):
            return joint_momentum_rate((other_x, other_y), (det_x, det_y),
                                       pump, crystal)
    else:
        def rate(det_x, det_y, other_x, other_y):
            return joint_momentum_rate((det_x, det_y), (other_x, other_y),
                                       pump, crystal)

    def run(lo, hi):
        block = slice(lo, hi)
        r = rate(qxf[block, None], qyf[block, None],
                 ux[None, :] - qxf[block, None], uy[None, :] - qyf[block, None])
        out[block] = r @ wts

    # keep per-chunk temporaries around a few MB regardless of inner order
    chunk = max(64, 2_000_000 // ux.size)
    spans = [(i, min(i + chunk, qxf.size)) for i in range(0, qxf.size, chunk)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(lambda s: run(*s), spans))
    else:
        for s in spans:
            run(*s)
    return out.reshape(qx.shape)


def _singles_montecarlo(qx, qy, pump, crystal, n_samples, seed,
                        center_shift=(0.0, 0.0), idler_ring=False):
    """Monte-Carlo estimate of the same integral with per-point standard errors.

    The pair-sum momentum is drawn exactly from the Gaussian CSD diagonal
    (common draws across grid points), leaving the bounded phase-matching
    factor as the integrand.
    """
    coeffs = csd_coefficients(pump)
    sigma2 = 1.0 / (4.0 * (coeffs.b1 - coeffs.b2))
    norm = coeffs.A_c * np.pi / (2.0 * (coeffs.b1 - coeffs.b2))
    rng = np.random.default_rng(seed)
    u = rng.normal(scale=np.sqrt(sigma2), size=(n_samples, 2))

    cx, cy = center_shift
    qxf = qx.ravel() - cx
    qyf = qy.ravel() - cy
    mean = np.empty(qxf.size)
    stderr = np.empty(qxf.size)
    chunk = 512
    from .spdc import noncollinear_mismatch, _sinc

    for i in range(0, qxf.size, chunk):
        block = slice(i, min(i + chunk, qxf.size))
        det = (qxf[block, None], qyf[block, None])
        oth = (u[None, :, 0] - qxf[block, None], u[None, :, 1] - qyf[block, None])
        if idler_ring:
            dkz = noncollinear_mismatch(oth, det, crystal, pump.k_p)
        else:
            dkz = noncollinear_mismatch(det, oth, crystal, pump.k_p)
        f = _sinc(crystal.L * dkz / 2.0) ** 2
        mean[block] = norm * f.mean(axis=1)
        stderr[block] = norm * f.std(axis=1, ddof=1) / np.sqrt(n_samples)
    return mean.reshape(qx.shape), stderr.reshape(qx.shape)


def singles_profile(pump: PumpParams, crystal: CrystalParams, which: str = "both",
                    extent: float | None = None, samples: int = 256,
                    order: int = DEFAULT_INNER_ORDER, q_offset: float | None = None,
                    method: str = "quadrature", mc_samples: int = 4000,
                    seed: int = 0, threads: int = 1,
                    check_convergence: bool = True) -> Profile2D:
    """Far-field intensity map of the down-converted photons, unit maximum.

    which : "signal", "idler", or "both".  For type-II crystals the signal
        and idler rings are displaced by +-q_offset along y (default: half
        the ring radius, which makes them overlap at two points on the x
        axis) and the idler walk-off applies only to the idler ring.  Type-I
        has a single ring at the origin.
    extent : full grid span in rad/m; must cover the ring (>= 2 k_s theta_nc).
    method : "quadrature" (tensor Gauss-Legendre, order^2 inner nodes) or
        "montecarlo" (mc_samples importance draws, deterministic seed).
    """
    radius = ring_radius(crystal, pump.k_p)
    if extent is None:
        extent = 3.2 * radius if radius > 0 else 12.0 * _sum_box(pump)
    if radius > 0 and extent < 2.0 * radius:
        raise ValueError("grid extent must cover the ring (>= 2 k_s theta_nc)")
    axis = np.linspace(-extent / 2.0, extent / 2.0, samples)
    QX, QY = np.meshgrid(axis, axis, indexing="xy")

    if crystal.kind == "II":
        if q_offset is None:
            q_offset = 0.5 * radius
        rings = {"signal": ((0.0, +q_offset), False),
                 "idler": ((0.0, -q_offset), True)}
    else:
        q_offset = 0.0
        rings = {"signal": ((0.0, 0.0), False)}
    if which == "both":
        selected = list(rings.values())
    elif which in rings:
        selected = [rings[which]]
    else:
        raise ValueError(f"unknown ring selector {which!r} for type-{crystal.kind}")

    mc_err = None
    if method == "quadrature":
        total = np.zeros_like(QX)
        for shift, idler in selected:
            total += _singles_quadrature(QX, QY, pump, crystal, order,
                                         center_shift=shift, idler_ring=idler,
                                         threads=threads)
        if check_convergence:
            ref = np.zeros_like(QX)
            for shift, idler in selected:
                ref += _singles_quadrature(QX, QY, pump, crystal, 2 * order,
                                           center_shift=shift, idler_ring=idler,
                                           threads=threads)
            worst = float(np.max(np.abs(total / total.max() - ref / ref.max())))
            if worst > QUADRATURE_TOL:
                raise ConvergenceError(
                    f"inner quadrature not converged: order doubling moved a "
                    f"sample by {worst:.2e}")
    elif method == "montecarlo":
        total = np.zeros_like(QX)
        var = np.zeros_like(QX)
        for shift, idler in selected:
            m, se = _singles_montecarlo(QX, QY, pump, crystal, mc_samples, seed,
                                        center_shift=shift, idler_ring=idler)
            total += m
            var += se**2
        mc_err = np.sqrt(var)
    else:
        raise ValueError(f"unknown method {method!r}")

    peak = float(total.max())
    if peak <= 0:
        raise ConvergenceError("profile vanished everywhere")
    grid = total / peak
    pitch = axis[1] - axis[0]
    meta = {
        "lambda_p_m": pump.lambda_p, "w0_m": pump.w0, "l_c_m": pump.l_c,
        "A": coherence_from(pump).A,
        "crystal_L_m": crystal.L, "kind": crystal.kind,
        "theta_nc_rad": crystal.theta_nc,
        "rho_p_rad": crystal.rho_p, "rho_i_rad": crystal.rho_i,
        "which": which, "q_offset_radpm": q_offset,
        "extent_radpm": extent, "samples": samples,
        "method": method, "order": order, "seed": seed,
        "mc_samples": mc_samples if method == "montecarlo" else 0,
        "normalization": peak,
    }
    prof = Profile2D(grid=grid, pitch_x=pitch, pitch_y=pitch, meta=meta)
    if mc_err is not None:
        prof.meta["mc_stderr"] = mc_err / peak
    return prof


def conditional_scan(pump: PumpParams, crystal: CrystalParams, q_s,
                     q_iy: float | None = None, span_sigmas: float = 10.0,
                     samples: int = 801) -> Scan1D:
    """Conditional rate R(q_ix | q_s) along the idler x axis, unit area.

    q_s is the fixed signal momentum (pick an overlap point for type-II);
    q_iy defaults to the anti-correlated value -q_sy.
    """
    qsx, qsy = float(q_s[0]), float(q_s[1])
    if q_iy is None:
        q_iy = -qsy
    sigma = _sum_box(pump)
    center = -qsx
    qix = np.linspace(center - span_sigmas * sigma, center + span_sigmas * sigma,
                      samples)
    rate = joint_momentum_rate((qsx, qsy), (qix, np.full_like(qix, q_iy)),
                               pump, crystal)
    area = np.trapezoid(rate, qix)
    if area <= 0:
        raise ConvergenceError("conditional rate vanished along the scan")
    meta = {
        "q_sx_radpm": qsx, "q_sy_radpm": qsy, "q_iy_radpm": q_iy,
        "A": coherence_from(pump).A, "lambda_p_m": pump.lambda_p,
        "w0_m": pump.w0, "l_c_m": pump.l_c,
        "theta_nc_rad": crystal.theta_nc, "rho_p_rad": crystal.rho_p,
        "rho_i_rad": crystal.rho_i, "crystal_L_m": crystal.L,
    }
    return Scan1D(xs=qix, values=rate / area, meta=meta)


def ring_radial_profile(pump: PumpParams, crystal: CrystalParams,
                        angles, radii, order: int = DEFAULT_INNER_ORDER) -> Scan1D:
    """Azimuthally averaged radial intensity over the given angles (type-I ring).

    Evaluates the singles rate on a polar grid by direct quadrature; used to
    measure ring width on a chosen side (e.g. angles around 0 for +x,
    around pi for -x).
    """
    angles = np.asarray(angles, dtype=float)
    radii = np.asarray(radii, dtype=float)
    QX = radii[:, None] * np.cos(angles)[None, :]
    QY = radii[:, None] * np.sin(angles)[None, :]
    vals = _singles_quadrature(QX, QY, pump, crystal, order)
    mean = vals.mean(axis=1)
    meta = {"angles_rad": angles.tolist(), "A": coherence_from(pump).A}
    return Scan1D(xs=radii, values=mean, meta=meta)
