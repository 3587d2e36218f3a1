"""Block texture categorization, sub-block averaging, and the 5-bit digest code."""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .image import BLOCK, GrayImage


class BlockType(Enum):
    """Texture class with its 2-bit wire code; 0b00 is invalid on the wire."""

    SMOOTH = 0b01
    NORMAL = 0b10
    ROUGH = 0b11

    @property
    def code(self) -> int:
        return self.value

    @classmethod
    def from_code(cls, code: int) -> "BlockType":
        if code == 0:
            raise ValueError("wire code 00 is invalid")
        return cls(code)


# 3x3 partition boundaries of a 16-pixel edge: fixed 5,5,6 split so the
# embedder and the recovery stage agree on sub-block geometry.
SPLIT3 = (0, 5, 10, 16)

SUBBLOCK_COUNT = {BlockType.SMOOTH: 1, BlockType.NORMAL: 4, BlockType.ROUGH: 9}


@dataclass(frozen=True)
class BlockGrid:
    """Shape of the 16x16 block tiling of an image."""

    blocks_w: int
    blocks_h: int

    @classmethod
    def for_image(cls, img: GrayImage) -> "BlockGrid":
        if img.width % BLOCK or img.height % BLOCK:
            raise ValueError("image dimensions must be multiples of 16")
        return cls(img.width // BLOCK, img.height // BLOCK)

    @property
    def n_blocks(self) -> int:
        return self.blocks_w * self.blocks_h


@dataclass(frozen=True, eq=False)
class TextureMap:
    """Per-block texture statistics: raw std, normalized std, and type codes."""

    raw_std: np.ndarray  # (blocks_h, blocks_w) float64
    norm_std: np.ndarray  # (blocks_h, blocks_w) float64 in [0, 1]
    types: np.ndarray  # (blocks_h, blocks_w) uint8 wire codes

    def type_counts(self) -> dict[str, int]:
        return {
            t.name.lower(): int(np.sum(self.types == t.code)) for t in BlockType
        }


def block_view(img: GrayImage) -> np.ndarray:
    """(blocks_h, blocks_w, 16, 16) view of the image."""
    grid = BlockGrid.for_image(img)
    return (
        img.pixels.reshape(grid.blocks_h, BLOCK, grid.blocks_w, BLOCK)
        .transpose(0, 2, 1, 3)
    )


def block_std(img: GrayImage, grid: BlockGrid) -> np.ndarray:
    """Population standard deviation of each block's gray levels."""
    if BlockGrid.for_image(img) != grid:
        raise ValueError("grid does not match image dimensions")
    blocks = block_view(img).astype(np.float64)
    return blocks.std(axis=(2, 3))


def normalize(values) -> np.ndarray:
    """Map values affinely onto [0, 1]; an all-equal input maps to all zeros."""
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise ValueError("empty input")
    vmin = v.min()
    vmax = v.max()
    if vmax == vmin:
        return np.zeros_like(v)
    return (v - vmin) / (vmax - vmin)


def categorize(norm: float, th1: float, th2: float) -> BlockType:
    """Left-closed interval thresholds: [0,th1) smooth, [th1,th2) normal, [th2,1] rough."""
    if not (0.0 < th1 < th2 <= 1.0):
        raise ValueError("thresholds must satisfy 0 < th1 < th2 <= 1")
    if norm < th1:
        return BlockType.SMOOTH
    if norm < th2:
        return BlockType.NORMAL
    return BlockType.ROUGH


def categorize_all(norm: np.ndarray, th1: float, th2: float) -> np.ndarray:
    if not (0.0 < th1 < th2 <= 1.0):
        raise ValueError("thresholds must satisfy 0 < th1 < th2 <= 1")
    codes = np.full(norm.shape, BlockType.ROUGH.code, dtype=np.uint8)
    codes[norm < th2] = BlockType.NORMAL.code
    codes[norm < th1] = BlockType.SMOOTH.code
    return codes


def analyze(img: GrayImage, th1: float, th2: float) -> TextureMap:
    """Full texture pass: per-block std, normalization, categorization."""
    grid = BlockGrid.for_image(img)
    raw = block_std(img, grid)
    norm = normalize(raw)
    return TextureMap(raw, norm, categorize_all(norm, th1, th2))


def _round_half_up_mean(total: int, count: int) -> int:
    return (int(total) + count // 2) // count


def block_average(img: GrayImage, bx: int, by: int) -> int:
    """Half-up rounded mean gray level of one 16x16 block."""
    blk = block_view(img)[by, bx]
    return _round_half_up_mean(int(blk.sum(dtype=np.int64)), BLOCK * BLOCK)


def block_averages(img: GrayImage) -> np.ndarray:
    """(blocks_h, blocks_w) half-up rounded block means."""
    sums = block_view(img).sum(axis=(2, 3), dtype=np.int64)
    return (sums + (BLOCK * BLOCK) // 2) // (BLOCK * BLOCK)


def subblock_averages(img: GrayImage, bx: int, by: int, btype: BlockType) -> list[int]:
    """Half-up rounded mean per sub-block, row-major.

    Smooth: the whole block (1 value). Normal: 8x8 quadrants (4 values).
    Rough: the 5,5,6 3x3 partition (9 values).
    """
    blk = block_view(img)[by, bx].astype(np.int64)
    if btype is BlockType.SMOOTH:
        return [_round_half_up_mean(blk.sum(), BLOCK * BLOCK)]
    if btype is BlockType.NORMAL:
        out = []
        for r in (slice(0, 8), slice(8, 16)):
            for c in (slice(0, 8), slice(8, 16)):
                out.append(_round_half_up_mean(blk[r, c].sum(), 64))
        return out
    out = []
    for i in range(3):
        for j in range(3):
            r = slice(SPLIT3[i], SPLIT3[i + 1])
            c = slice(SPLIT3[j], SPLIT3[j + 1])
            region = blk[r, c]
            out.append(_round_half_up_mean(region.sum(), region.size))
    return out


def thirds_averages(img: GrayImage) -> np.ndarray:
    """(3*blocks_h, 3*blocks_w) half-up rounded means over every block's
    3x3 partition regions (the rough-block geometry, applied to all blocks)."""
    grid = BlockGrid.for_image(img)
    blocks = block_view(img).astype(np.int64)
    out = np.zeros((3 * grid.blocks_h, 3 * grid.blocks_w), dtype=np.int64)
    for i in range(3):
        for j in range(3):
            region = blocks[:, :, SPLIT3[i] : SPLIT3[i + 1], SPLIT3[j] : SPLIT3[j + 1]]
            area = region.shape[2] * region.shape[3]
            sums = region.sum(axis=(2, 3))
            out[i::3, j::3] = (sums + area // 2) // area
    return out


def msb5_encode(avg: int) -> int:
    """Top 5 bits of an 8-bit gray value, as an integer in [0, 31]."""
    if not 0 <= avg <= 255:
        raise ValueError(f"gray value {avg} out of [0, 255]")
    return int(avg) >> 3


def msb5_decode(code: int) -> int:
    """Reconstruct gray value from a 5-bit digest by appending binary 100."""
    if not 0 <= code <= 31:
        raise ValueError(f"5-bit code {code} out of [0, 31]")
    return int(code) * 8 + 4
