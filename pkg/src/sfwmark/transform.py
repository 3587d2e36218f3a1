"""Reversible 5/3 lifting transform on 16x16 integer blocks, plus QIM bit coding.

Lifting convention (must match between embedder and authenticator):
  forward  d[n] = x[2n+1] - floor((x[2n] + x[2n+2]) / 2)
           s[n] = x[2n]   + floor((d[n-1] + d[n] + 2) / 4)
  boundaries x[N] := x[N-2], d[-1] := d[0]; rows first, then columns.
All divisions floor toward minus infinity so negative coefficients stay exact.
"""

from dataclasses import dataclass

import numpy as np

HALF = 8  # subband edge of a 16x16 block


@dataclass(frozen=True, eq=False)
class BlockSubbands:
    """One-level subbands of a 16x16 block; ll is the approximation band.

    Naming is (vertical, horizontal) filtering: lh = vertical low / horizontal
    high, hl = the transpose, hh = detail in both directions.
    """

    ll: np.ndarray
    lh: np.ndarray
    hl: np.ndarray
    hh: np.ndarray


def _forward_1d(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    even = x[..., 0::2]
    odd = x[..., 1::2]
    even_next = np.concatenate([even[..., 1:], even[..., -1:]], axis=-1)
    d = odd - (even + even_next) // 2
    d_prev = np.concatenate([d[..., :1], d[..., :-1]], axis=-1)
    s = even + (d_prev + d + 2) // 4
    return s, d


def _inverse_1d(s: np.ndarray, d: np.ndarray) -> np.ndarray:
    d_prev = np.concatenate([d[..., :1], d[..., :-1]], axis=-1)
    even = s - (d_prev + d + 2) // 4
    even_next = np.concatenate([even[..., 1:], even[..., -1:]], axis=-1)
    odd = d + (even + even_next) // 2
    out = np.empty(s.shape[:-1] + (2 * s.shape[-1],), dtype=s.dtype)
    out[..., 0::2] = even
    out[..., 1::2] = odd
    return out


def forward_packed(blocks: np.ndarray) -> np.ndarray:
    """Transform (..., 16, 16) integer blocks into packed subband layout:
    [[ll, lh], [hl, hh]] quadrants of the same (..., 16, 16) shape."""
    b = np.asarray(blocks).astype(np.int64, copy=False)
    s, d = _forward_1d(b)
    rows = np.concatenate([s, d], axis=-1)
    s2, d2 = _forward_1d(np.swapaxes(rows, -1, -2))
    cols = np.concatenate([s2, d2], axis=-1)
    return np.swapaxes(cols, -1, -2)


def inverse_packed(packed: np.ndarray) -> np.ndarray:
    """Exact inverse of forward_packed (columns undone first, then rows)."""
    p = np.asarray(packed).astype(np.int64, copy=False)
    pc = np.swapaxes(p, -1, -2)
    rows = np.swapaxes(_inverse_1d(pc[..., :HALF], pc[..., HALF:]), -1, -2)
    return _inverse_1d(rows[..., :HALF], rows[..., HALF:])


def iwt_forward_block(block: np.ndarray) -> BlockSubbands:
    """One-level transform of a single 16x16 integer block."""
    b = np.asarray(block)
    if b.shape != (16, 16):
        raise ValueError("block must be 16x16")
    p = forward_packed(b)
    return BlockSubbands(
        ll=p[:HALF, :HALF].copy(),
        lh=p[:HALF, HALF:].copy(),
        hl=p[HALF:, :HALF].copy(),
        hh=p[HALF:, HALF:].copy(),
    )


def iwt_inverse_block(sb: BlockSubbands) -> np.ndarray:
    """Reassemble the 16x16 block; output may exceed [0, 255] after
    coefficient modification (clamping is the embedder's concern)."""
    p = np.empty((16, 16), dtype=np.int64)
    p[:HALF, :HALF] = sb.ll
    p[:HALF, HALF:] = sb.lh
    p[HALF:, :HALF] = sb.hl
    p[HALF:, HALF:] = sb.hh
    return inverse_packed(p)


def qim_embed(c, w, step: int):
    """Snap coefficient c onto the lattice of parity w (step s lattices offset
    by s, spacing 2s); ties go to the lower point."""
    if step < 2:
        raise ValueError("quantization step must be >= 2")
    c_ = np.asarray(c, dtype=np.int64)
    w_ = np.asarray(w, dtype=np.int64)
    base = 2 * step * np.floor_divide(c_, 2 * step)
    v1 = base + np.where(w_ != 0, step, 0)
    v2 = v1 + 2 * step
    out = np.where(np.abs(c_ - v1) <= np.abs(c_ - v2), v1, v2)
    if np.isscalar(c) or getattr(c, "ndim", 1) == 0:
        return int(out)
    return out


def qim_extract(c, step: int):
    """Bit = parity of round(c / step), rounding halves up."""
    if step < 2:
        raise ValueError("quantization step must be >= 2")
    c_ = np.asarray(c, dtype=np.int64)
    k = np.floor_divide(2 * c_ + step, 2 * step)
    out = (k & 1).astype(np.uint8)
    if np.isscalar(c) or getattr(c, "ndim", 1) == 0:
        return int(out)
    return out
