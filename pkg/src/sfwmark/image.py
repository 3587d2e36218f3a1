"""8-bit grayscale raster type, binary PGM file I/O, and quality metrics."""

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.signal import fftconvolve

BLOCK = 16  # localization unit: everything downstream works on 16x16 blocks


class PgmError(ValueError):
    """Malformed or unsupported PGM input."""


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Single-channel 8-bit image; pixels is a (height, width) uint8 array."""

    pixels: np.ndarray

    def __post_init__(self):
        p = self.pixels
        if not isinstance(p, np.ndarray) or p.ndim != 2 or p.size == 0:
            raise ValueError("pixels must be a non-empty 2-D array")
        if p.dtype != np.uint8:
            raise ValueError("pixels must be uint8")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @classmethod
    def from_array(cls, arr) -> "GrayImage":
        """Build from any integer-valued array after range checking."""
        a = np.asarray(arr)
        if a.dtype != np.uint8:
            if np.any((a < 0) | (a > 255)):
                raise ValueError("gray levels out of [0, 255]")
            a = a.astype(np.uint8)
        return cls(np.ascontiguousarray(a))


@dataclass(frozen=True, eq=False)
class BlockMask:
    """Boolean flag per 16x16 block; flags is a (blocks_h, blocks_w) bool array."""

    flags: np.ndarray

    def __post_init__(self):
        f = self.flags
        if not isinstance(f, np.ndarray) or f.ndim != 2 or f.dtype != np.bool_:
            raise ValueError("flags must be a 2-D bool array")

    @property
    def blocks_w(self) -> int:
        return self.flags.shape[1]

    @property
    def blocks_h(self) -> int:
        return self.flags.shape[0]

    def count(self) -> int:
        return int(self.flags.sum())

    def to_pixels(self) -> np.ndarray:
        """Expand to a per-pixel bool array (each flag covers a 16x16 block)."""
        return np.kron(self.flags, np.ones((BLOCK, BLOCK), dtype=bool))


def _tokens(data: bytes, start: int):
    """Yield (token, end_offset) over whitespace-separated header fields.

    '#' starts a comment running to end of line, allowed between fields.
    """
    i = start
    n = len(data)
    while i < n:
        c = data[i]
        if c in b" \t\r\n":
            i += 1
        elif c == ord("#"):
            j = data.find(b"\n", i)
            i = n if j < 0 else j + 1
        else:
            j = i
            while j < n and data[j] not in b" \t\r\n":
                j += 1
            yield data[i:j], j
            i = j


def load_pgm(path) -> GrayImage:
    """Read a binary (P5) PGM with maxval 255."""
    data = Path(path).read_bytes()
    if len(data) < 2 or data[:2] != b"P5":
        magic = data[:2].decode("latin-1", "replace") if data else "<empty>"
        raise PgmError(f"unsupported magic {magic!r}, need binary P5")
    fields = []
    end = 2
    for tok, end in _tokens(data, 2):
        fields.append(tok)
        if len(fields) == 3:
            break
    if len(fields) < 3:
        raise PgmError("truncated PGM header")
    try:
        width, height, maxval = (int(f) for f in fields)
    except ValueError as exc:
        raise PgmError(f"bad PGM header field: {exc}") from None
    if width <= 0 or height <= 0:
        raise PgmError("non-positive PGM dimensions")
    if maxval != 255:
        raise PgmError(f"unsupported maxval {maxval}, need 255")
    # exactly one whitespace byte separates the header from the raster
    if end >= len(data) or data[end] not in b" \t\r\n":
        raise PgmError("missing separator before pixel data")
    raster = data[end + 1 : end + 1 + width * height]
    if len(raster) != width * height:
        raise PgmError("truncated PGM pixel data")
    pixels = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return GrayImage(pixels.copy())


def save_pgm(img: GrayImage, path) -> None:
    """Write binary P5 with maxval 255 (no comments, bit-exact round trip)."""
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + img.pixels.tobytes())


def _check_same_size(a: GrayImage, b: GrayImage):
    if a.pixels.shape != b.pixels.shape:
        raise ValueError(
            f"dimension mismatch: {a.width}x{a.height} vs {b.width}x{b.height}"
        )


def psnr(a: GrayImage, b: GrayImage) -> float:
    """Peak signal-to-noise ratio in dB; the peak is the max squared sample
    of the reference image `a`. Returns inf when the images are identical."""
    _check_same_size(a, b)
    af = a.pixels.astype(np.float64)
    diff = af - b.pixels.astype(np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return math.inf
    peak = float(af.max()) ** 2
    if peak == 0.0:
        return -math.inf
    return 10.0 * math.log10(peak / mse)


def region_psnr(a: GrayImage, b: GrayImage, mask: BlockMask) -> float:
    """PSNR restricted to the pixels of flagged blocks (peak and MSE alike)."""
    _check_same_size(a, b)
    if mask.blocks_h * BLOCK != a.height or mask.blocks_w * BLOCK != a.width:
        raise ValueError("mask grid does not match image dimensions")
    if mask.count() == 0:
        raise ValueError("empty mask")
    sel = mask.to_pixels()
    af = a.pixels[sel].astype(np.float64)
    bf = b.pixels[sel].astype(np.float64)
    mse = float(np.mean((af - bf) ** 2))
    if mse == 0.0:
        return math.inf
    peak = float(af.max()) ** 2
    if peak == 0.0:
        return -math.inf
    return 10.0 * math.log10(peak / mse)


_SSIM_WIN = 11
_SSIM_SIGMA = 1.5
_SSIM_C1 = (0.01 * 255.0) ** 2
_SSIM_C2 = (0.03 * 255.0) ** 2


def _gaussian_window():
    r = _SSIM_WIN // 2
    x = np.arange(-r, r + 1, dtype=np.float64)
    g = np.exp(-(x * x) / (2.0 * _SSIM_SIGMA**2))
    k = np.outer(g, g)
    return k / k.sum()


def ssim(a: GrayImage, b: GrayImage) -> float:
    """Mean structural similarity over all fully valid 11x11 window positions
    (Gaussian weights, sigma 1.5, standard stabilizer constants)."""
    _check_same_size(a, b)
    if a.height < _SSIM_WIN or a.width < _SSIM_WIN:
        raise ValueError(f"image smaller than the {_SSIM_WIN}x{_SSIM_WIN} window")
    win = _gaussian_window()
    x = a.pixels.astype(np.float64)
    y = b.pixels.astype(np.float64)

    def f(img):
        return fftconvolve(img, win, mode="valid")

    mu_x = f(x)
    mu_y = f(y)
    var_x = f(x * x) - mu_x * mu_x
    var_y = f(y * y) - mu_y * mu_y
    cov = f(x * y) - mu_x * mu_y
    num = (2.0 * mu_x * mu_y + _SSIM_C1) * (2.0 * cov + _SSIM_C2)
    den = (mu_x * mu_x + mu_y * mu_y + _SSIM_C1) * (var_x + var_y + _SSIM_C2)
    return float(np.mean(num / den))


def fr_fa(pred: BlockMask, truth: BlockMask) -> tuple[float, float]:
    """Block-level false rejection and false acceptance rates.

    FR = tampered blocks marked healthful / tampered blocks,
    FA = untampered blocks marked tampered / untampered blocks.
    """
    if pred.flags.shape != truth.flags.shape:
        raise ValueError("mask grid mismatch")
    n_tampered = truth.count()
    n_clean = truth.flags.size - n_tampered
    if n_tampered == 0 or n_clean == 0:
        raise ValueError("degenerate ground truth: needs tampered and clean blocks")
    fr = float(np.sum(truth.flags & ~pred.flags)) / n_tampered
    fa = float(np.sum(~truth.flags & pred.flags)) / n_clean
    return fr, fa
