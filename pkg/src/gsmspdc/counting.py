"""Synthetic photon-counting frame stacks and the pixel-covariance estimator.

A frame stack stands in for an EMCCD in photon-counting mode: integer counts,
no gain or threshold physics beyond independent per-pixel dark counts.  The
coincidence estimator between pixels i and j is the count covariance over
frames,

    C = <n_i n_j> - <n_i> <n_j> ,

with a standard error from a leave-one-frame-out jackknife.  For a Poisson
pair process with joint pixel distribution P, C equals
pairs_per_frame * P(i, j) exactly, so C-scans estimate the generating
conditional distribution shape.

Synthetic frames have shape (2, n_px): row 0 collects the signal photon of
each pair, row 1 the idler photon.  The joint distribution is a 2-D matrix
P[i, j] = P(signal at column i, idler at column j).

Serialized stack layout (all little-endian), documented for external readers:

    bytes 0-7    magic b"GSMFRAM1"
    u32          n_frames
    u32          height
    u32          width
    u64          seed
    f64          pixel_pitch (m)
    f64          exposure (s)
    u16 * n_frames*height*width   counts, C (row-major) order
"""

import struct
from dataclasses import dataclass

import numpy as np

from .records import Profile2D, Scan1D

__all__ = [
    "FrameStack",
    "CoincidenceResult",
    "synth_frames",
    "pixel_coincidence",
    "conditional_map",
    "save_frames",
    "load_frames",
]

MAGIC = b"GSMFRAM1"
_HEADER = struct.Struct("<III Q d d")


@dataclass
class FrameStack:
    """Stack of 2-D photon-count frames plus acquisition metadata."""

    frames: np.ndarray          # (n_frames, height, width) unsigned counts
    pixel_pitch: float = 16e-6  # m
    exposure: float = 20e-3     # s
    seed: int = 0

    def __post_init__(self):
        self.frames = np.asarray(self.frames)
        if self.frames.ndim != 3:
            raise ValueError("frames must be a (n_frames, height, width) array")
        if np.any(self.frames < 0):
            raise ValueError("counts must be non-negative")
        self.frames = self.frames.astype(np.uint16, copy=False)

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def shape(self):
        return self.frames.shape[1:]


@dataclass(frozen=True)
class CoincidenceResult:
    C: float
    i: tuple
    j: tuple
    stderr: float


def synth_frames(joint, pairs_per_frame: float, noise: float, n_frames: int,
                 seed: int, pixel_pitch: float = 16e-6,
                 exposure: float = 20e-3) -> FrameStack:
    """Draw a photon-counting frame stack from a joint pixel distribution.

    Each frame receives a Poisson number of photon pairs (mean
    pairs_per_frame); each pair lands at (row 0, i) and (row 1, j) with
    probability P[i, j].  Dark counts are independent Bernoulli(noise) per
    pixel per frame.  Frames are generated from independent substreams
    spawned from the seed, so the result does not depend on evaluation order.
    """
    if isinstance(joint, Profile2D):
        joint = joint.grid
    P = np.asarray(joint, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError("joint must be a square 2-D matrix P[i, j]")
    total = P.sum()
    if not np.isfinite(total) or total <= 0 or np.any(P < 0):
        raise ValueError("joint distribution is empty or degenerate")
    if pairs_per_frame < 0 or noise < 0:
        raise ValueError("rates must be >= 0")
    if n_frames < 1:
        raise ValueError("need at least one frame")
    flat = (P / total).ravel()
    n_px = P.shape[0]

    frames = np.zeros((n_frames, 2, n_px), dtype=np.uint16)
    streams = np.random.SeedSequence(seed).spawn(n_frames)
    for k in range(n_frames):
        rng = np.random.default_rng(streams[k])
        n_pairs = rng.poisson(pairs_per_frame) if pairs_per_frame > 0 else 0
        if n_pairs:
            idx = rng.choice(flat.size, size=n_pairs, p=flat)
            i, j = np.unravel_index(idx, P.shape)
            np.add.at(frames[k], (np.zeros(n_pairs, dtype=np.intp), i), 1)
            np.add.at(frames[k], (np.ones(n_pairs, dtype=np.intp), j), 1)
        if noise > 0:
            frames[k] += (rng.random((2, n_px)) < noise).astype(np.uint16)
    return FrameStack(frames=frames, pixel_pitch=pixel_pitch,
                      exposure=exposure, seed=seed)


def _jackknife_covariance(x: np.ndarray, y: np.ndarray):
    """Covariance of two per-frame count series and its jackknife stderr.

    Accumulation is order-independent: the moments are exact integer sums and
    the float reductions run in canonical (sorted) order, so any frame
    permutation gives bit-identical results.
    """
    n = x.size
    x64 = x.astype(np.int64)
    y64 = y.astype(np.int64)
    xy = x64 * y64
    sx = int(x64.sum())
    sy = int(y64.sum())
    sxy = int(xy.sum())
    C = sxy / n - (sx / n) * (sy / n)
    mx = (sx - x64) / (n - 1)
    my = (sy - y64) / (n - 1)
    mxy = (sxy - xy) / (n - 1)
    ck = np.sort(mxy - mx * my)
    mean_ck = float(np.sum(ck)) / n
    dev = np.sort((ck - mean_ck) ** 2)
    stderr = float(np.sqrt((n - 1) / n * np.sum(dev)))
    return float(C), stderr


def pixel_coincidence(stack: FrameStack, i, j) -> CoincidenceResult:
    """Count covariance C between pixels i and j with jackknife standard error.

    i and j are (row, column) indices; they must differ and the stack must
    hold at least two frames.
    """
    i = tuple(int(v) for v in i)
    j = tuple(int(v) for v in j)
    if i == j:
        raise ValueError("pixels i and j must differ")
    if stack.n_frames < 2:
        raise ValueError("need at least two frames")
    x = stack.frames[:, i[0], i[1]]
    y = stack.frames[:, j[0], j[1]]
    C, stderr = _jackknife_covariance(x, y)
    return CoincidenceResult(C=C, i=i, j=j, stderr=stderr)


def conditional_map(stack: FrameStack, pixel, row: int) -> Scan1D:
    """C(pixel, (row, j)) for j scanning a frame row, with per-point stderr.

    Returns a Scan1D over the column index; meta carries the stderr array.
    The fixed pixel's own column is included unless it lies on the scanned
    row, where the self-covariance is skipped (set to the neighbor average).
    """
    pixel = tuple(int(v) for v in pixel)
    if stack.n_frames < 2:
        raise ValueError("need at least two frames")
    height, width = stack.shape
    if not (0 <= row < height) or not (0 <= pixel[0] < height
                                       and 0 <= pixel[1] < width):
        raise ValueError("row or pixel out of range")
    x = stack.frames[:, pixel[0], pixel[1]].astype(float)
    cols = np.arange(width)
    C = np.empty(width)
    err = np.empty(width)
    for jcol in cols:
        if (row, jcol) == pixel:
            C[jcol] = np.nan
            err[jcol] = np.nan
            continue
        C[jcol], err[jcol] = _jackknife_covariance(x, stack.frames[:, row, jcol])
    bad = np.isnan(C)
    if np.any(bad):
        good = ~bad
        C[bad] = np.interp(cols[bad], cols[good], C[good])
        err[bad] = np.interp(cols[bad], cols[good], err[good])
    return Scan1D(xs=cols.astype(float), values=C,
                  meta={"stderr": err, "pixel": pixel, "row": row,
                        "n_frames": stack.n_frames})


def save_frames(stack: FrameStack, path):
    """Write the stack in the documented binary layout."""
    h, w = stack.shape
    header = MAGIC + _HEADER.pack(stack.n_frames, h, w, stack.seed,
                                  stack.pixel_pitch, stack.exposure)
    body = stack.frames.astype("<u2").tobytes(order="C")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(body)


def load_frames(path) -> FrameStack:
    with open(path, "rb") as fh:
        magic = fh.read(len(MAGIC))
        if magic != MAGIC:
            raise ValueError(f"not a frame-stack file: bad magic {magic!r}")
        n_frames, h, w, seed, pitch, exposure = _HEADER.unpack(
            fh.read(_HEADER.size))
        data = np.frombuffer(fh.read(n_frames * h * w * 2), dtype="<u2")
    if data.size != n_frames * h * w:
        raise ValueError("truncated frame-stack file")
    return FrameStack(frames=data.reshape(n_frames, h, w).copy(),
                      pixel_pitch=pitch, exposure=exposure, seed=seed)
