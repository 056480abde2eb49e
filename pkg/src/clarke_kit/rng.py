"""Counter-based random numbers.

Every variate is a pure function of ``(seed, stream, index, lane)``, so a
sample never depends on how many were drawn before it or on which worker
drew it. The mixer is the SplitMix64 finaliser applied to a keyed counter.
"""

from __future__ import annotations

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_LANE = np.uint64(0xD1B54A32D192ED03)
_STREAM = np.uint64(0xABC98388FB8FAC03)


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def _key(seed: int, stream: int) -> np.uint64:
    s = np.array([seed & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64)
    t = np.array([stream & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _mix(_mix(s * _GAMMA + _GAMMA) ^ (t * _STREAM))[0]


def random_bits(seed: int, stream: int, index: np.ndarray, lanes: int) -> np.ndarray:
    """uint64 array of shape ``(len(index), lanes)``."""
    idx = np.asarray(index, dtype=np.uint64).reshape(-1, 1)
    lane = np.arange(lanes, dtype=np.uint64).reshape(1, -1)
    key = _key(seed, stream)
    with np.errstate(over="ignore"):
        ctr = (idx * _GAMMA) ^ (lane * _LANE)
        return _mix(_mix(ctr ^ key) + key)


def uniforms(seed: int, stream: int, index: np.ndarray, lanes: int) -> np.ndarray:
    """Uniform doubles strictly inside (0, 1)."""
    bits = random_bits(seed, stream, index, lanes)
    return ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def normals(seed: int, stream: int, index: np.ndarray, dim: int, lane_offset: int = 0) -> np.ndarray:
    """Standard normal vectors via Box-Muller, ``dim`` per index."""
    pairs = (dim + 1) // 2
    u = uniforms(seed, stream, index, lane_offset + 2 * pairs)[:, lane_offset:]
    r = np.sqrt(-2.0 * np.log(u[:, 0::2]))
    ang = 2.0 * np.pi * u[:, 1::2]
    z = np.empty((u.shape[0], 2 * pairs))
    z[:, 0::2] = r * np.cos(ang)
    z[:, 1::2] = r * np.sin(ang)
    return z[:, :dim]


def ball_points(center, radius: float, index: np.ndarray, seed: int, stream: int = 0) -> np.ndarray:
    """Uniform points in the open ball ``B_radius(center)``, one per counter in ``index``."""
    center = np.asarray(center, dtype=float)
    dim = center.size
    direction = normals(seed, stream, index, dim, lane_offset=1)
    nrm = np.linalg.norm(direction, axis=1, keepdims=True)
    # Box-Muller never yields an exact zero vector, but stay safe
    nrm[nrm == 0.0] = 1.0
    u = uniforms(seed, stream, index, 1)[:, 0]
    rad = radius * u ** (1.0 / dim)
    return center + direction / nrm * rad[:, None]
