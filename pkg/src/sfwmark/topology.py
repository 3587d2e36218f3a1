"""Key-derived structure shared by embedder and authenticator.

Everything random in the scheme flows from one 64-bit key through the
SplitMix64 keystream below, so both sides rebuild identical chains, pairs,
and coefficient slots. The block grid splits into four areas A..D, each with
four sub-areas 1..4; sub-area k of every area lives in image quadrant k
(1=top-left, 2=top-right, 3=bottom-left, 4=bottom-right), so the dependent
blocks of any block sit in different quadrants. That gives every dependency
both a minimum and a maximum spatial distance, and an aligned quarter-image
tamper removes at most one of the four copies of any chain's data.
"""

from dataclasses import dataclass

import numpy as np

from .texture import BlockGrid, BlockType

MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15

# domain separation constants for the keyed sub-streams
PURPOSE_CHAINS = 0x636861696E730001
PURPOSE_PAIRS = 0x7061697273000002
PURPOSE_COEFFS = 0x636F656666730003

AREA_NAMES = "ABCD"


class Keystream:
    """SplitMix64 word generator; fully deterministic for a given seed."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + _GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)


def derive_stream(key: int, purpose: int, index: int = 0) -> Keystream:
    """Independent sub-stream for (key, purpose, index); two mixing rounds so
    nearby indices do not produce correlated streams."""
    a = Keystream((key ^ purpose) & MASK64).next()
    b = Keystream((a ^ index) & MASK64).next()
    return Keystream(b)


def keyed_shuffle(items, ks: Keystream) -> list:
    """Fisher-Yates driven by the keystream (64-bit draws, modulo reduced)."""
    out = list(items)
    for i in range(len(out) - 1, 0, -1):
        j = ks.next() % (i + 1)
        out[i], out[j] = out[j], out[i]
    return out


def build_areas(grid: BlockGrid) -> tuple[np.ndarray, np.ndarray]:
    """Per-block (area, sub_area) assignment, flat row-major arrays.

    area is 0..3 for A..D, sub_area is 1..4. Block (0,0) lands in (A,1) and
    the bottom-right block in (D,4).
    """
    bw, bh = grid.blocks_w, grid.blocks_h
    if bw % 4 or bh % 4:
        raise ValueError("block grid dimensions must be multiples of 4")
    bx, by = np.meshgrid(np.arange(bw), np.arange(bh))
    half_w, half_h = bw // 2, bh // 2
    quarter_w, quarter_h = bw // 4, bh // 4
    sub = 1 + 2 * (by >= half_h) + (bx >= half_w)
    lx = bx % half_w
    ly = by % half_h
    area = 2 * (ly >= quarter_h) + (lx >= quarter_w)
    return area.ravel().astype(np.int64), sub.ravel().astype(np.int64)


def build_chains(
    key: int, area: np.ndarray, sub: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Two-sided circular dependency: one keyed permutation per sub-area links
    chain k as sub-area 1 -> 2 -> 3 -> 4 -> 1 within each area.

    Returns (next_map, prev_map, cycles) where cycles is (n_chains, 4) with
    members listed in sub-area order 1..4.
    """
    n = area.size
    nxt = np.full(n, -1, dtype=np.int64)
    prv = np.full(n, -1, dtype=np.int64)
    cycles = []
    for a in range(4):
        perms = []
        for s in range(1, 5):
            members = np.flatnonzero((area == a) & (sub == s))
            ks = derive_stream(key, PURPOSE_CHAINS, a * 4 + (s - 1))
            perms.append(keyed_shuffle(members.tolist(), ks))
        for k in range(len(perms[0])):
            m = [perms[0][k], perms[1][k], perms[2][k], perms[3][k]]
            cycles.append(m)
            for i in range(4):
                nxt[m[i]] = m[(i + 1) % 4]
                prv[m[(i + 1) % 4]] = m[i]
    return nxt, prv, np.asarray(cycles, dtype=np.int64)


def coeff_positions(key: int, block_index: int) -> list[int]:
    """63 distinct slots into the 64-cell approximation band of one block."""
    ks = derive_stream(key, PURPOSE_COEFFS, block_index)
    return keyed_shuffle(range(64), ks)[:63]


def positions_matrix(key: int, n_blocks: int) -> np.ndarray:
    """(n_blocks, 63) slot table for a whole image."""
    return np.asarray(
        [coeff_positions(key, b) for b in range(n_blocks)], dtype=np.int64
    )


def build_pairs(key: int, type_codes: np.ndarray, grid: BlockGrid) -> np.ndarray:
    """Greedy far-pair matching over normal blocks and over rough blocks.

    Blocks are visited in keyed random order; each unpaired visit grabs the
    unpaired same-type block at maximal center distance (ties: smallest
    row-major index). An odd leftover pairs with itself. Smooth blocks get -1.
    """
    flat = np.asarray(type_codes).ravel()
    pair = np.full(flat.size, -1, dtype=np.int64)
    bw = grid.blocks_w
    for btype in (BlockType.NORMAL, BlockType.ROUGH):
        members = np.flatnonzero(flat == btype.code)
        if members.size == 0:
            continue
        order = keyed_shuffle(
            members.tolist(), derive_stream(key, PURPOSE_PAIRS, btype.code)
        )
        mx = members % bw
        my = members // bw
        slot = {b: i for i, b in enumerate(members.tolist())}
        free = np.ones(members.size, dtype=bool)
        for b in order:
            i = slot[b]
            if not free[i]:
                continue
            free[i] = False
            cand = np.flatnonzero(free)
            if cand.size == 0:
                pair[b] = b
                continue
            d2 = (mx[cand] - mx[i]) ** 2 + (my[cand] - my[i]) ** 2
            j = int(cand[np.argmax(d2)])
            free[j] = False
            other = int(members[j])
            pair[b] = other
            pair[other] = b
    return pair


@dataclass(frozen=True, eq=False)
class Topology:
    """Immutable key-derived structure for one block grid.

    pair is None until a type map is available (the authenticator rebuilds it
    from voted types).
    """

    grid: BlockGrid
    area: np.ndarray
    sub: np.ndarray
    nxt: np.ndarray
    prv: np.ndarray
    cycles: np.ndarray
    positions: np.ndarray
    pair: np.ndarray | None = None

    @classmethod
    def build_keyed(cls, key: int, grid: BlockGrid) -> "Topology":
        """Type-independent part: areas, chains, coefficient slots."""
        area, sub = build_areas(grid)
        nxt, prv, cycles = build_chains(key, area, sub)
        positions = positions_matrix(key, grid.n_blocks)
        return cls(grid, area, sub, nxt, prv, cycles, positions)

    def with_pairs(self, key: int, type_codes: np.ndarray) -> "Topology":
        pair = build_pairs(key, type_codes, self.grid)
        return Topology(
            self.grid, self.area, self.sub, self.nxt, self.prv,
            self.cycles, self.positions, pair,
        )

    @classmethod
    def build(cls, key: int, grid: BlockGrid, type_codes: np.ndarray) -> "Topology":
        return cls.build_keyed(key, grid).with_pairs(key, type_codes)

    def to_dict(self) -> dict:
        """JSON-friendly dump for the inspect command."""
        out = {
            "blocks_w": self.grid.blocks_w,
            "blocks_h": self.grid.blocks_h,
            "area": [AREA_NAMES[a] for a in self.area.tolist()],
            "sub_area": self.sub.tolist(),
            "next": self.nxt.tolist(),
            "prev": self.prv.tolist(),
            "coeff_positions": self.positions.tolist(),
        }
        if self.pair is not None:
            out["pair"] = self.pair.tolist()
        return out
