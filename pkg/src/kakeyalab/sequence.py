"""The driving sequence of dyadic values, organised in levelled blocks.

Level ``l`` contributes the finite run

    X_l = ( (-1)**l * (i * 2**-l - l)  for i = 0 .. 2**l * (2l + 1) - 1 )

and the full sequence x_0, x_1, ... is X_0, X_1, X_2, ... concatenated.
Even levels sweep upward from -l, odd levels downward from +l; each block
moves in steps of 2**-l, so later steps are never larger than earlier ones.
"""

from __future__ import annotations

from dataclasses import dataclass

from .numeric import Dyadic

__all__ = [
    "Block",
    "SeqIndex",
    "block",
    "block_offset",
    "block_size",
    "level_of_index",
    "x_at",
    "step",
    "index_of",
    "check_obs1",
]


@dataclass(frozen=True)
class Block:
    level: int
    start: int          # index of the block's first element in the sequence
    values: tuple[Dyadic, ...]


@dataclass(frozen=True)
class SeqIndex:
    k: int
    level: int
    pos: int            # offset within block `level`, so k == block_offset(level) + pos


def block_size(level: int) -> int:
    if level < 0:
        raise ValueError("level must be >= 0")
    return (1 << level) * (2 * level + 1)


def block_offset(m: int) -> int:
    """Index of the first element of block m: sum of earlier block sizes."""
    if m < 0:
        raise ValueError("m must be >= 0")
    # Closed form of sum_{l<m} 2**l (2l+1); equals 0 at m=0.
    return (2 * m - 3) * (1 << m) + 3


def _value(level: int, i: int) -> Dyadic:
    # (-1)**level * (i * 2**-level - level)
    sign = -1 if level % 2 else 1
    return Dyadic.make(sign * (i - (level << level)), level)


def block(level: int, max_size: int | None = None) -> Block:
    """Materialise block `level`; refuse if it exceeds max_size elements."""
    n = block_size(level)
    if max_size is not None and n > max_size:
        raise ValueError(f"block {level} has {n} elements, over cap {max_size}")
    start = block_offset(level)
    return Block(level, start, tuple(_value(level, i) for i in range(n)))


def level_of_index(k: int) -> int:
    if k < 0:
        raise ValueError("k must be >= 0")
    level = 0
    while block_offset(level + 1) <= k:
        level += 1
    return level


def x_at(k: int) -> Dyadic:
    level = level_of_index(k)
    return _value(level, k - block_offset(level))


def step(n: int) -> Dyadic:
    """x_{n-1} - x_n, the n-th increment of the sequence (n >= 1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return x_at(n - 1) - x_at(n)


def index_of(m: int, xhat: Dyadic) -> SeqIndex:
    """The unique k with x_k == xhat inside block m.

    Requires xhat to be m-dyadic with |xhat| <= m (every such value occurs
    in block m; the block extends slightly beyond on one side).
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    if xhat.exponent > m:
        raise ValueError(f"{xhat} is not {m}-dyadic")
    r = xhat.to_rat()
    if r < -m or r > m:
        raise ValueError(f"{xhat} outside [{-m}, {m}]")
    scaled = xhat.mantissa << (m - xhat.exponent)
    pos = (scaled + (m << m)) if m % 2 == 0 else ((m << m) - scaled)
    if not 0 <= pos < block_size(m):
        raise ValueError(f"{xhat} not in block {m}")
    return SeqIndex(block_offset(m) + pos, m, pos)


@dataclass(frozen=True)
class Obs1Row:
    m: int
    max_index: int
    bound: int
    ok: bool


def check_obs1(m_lo: int, m_hi: int) -> list[Obs1Row]:
    """Check that every element of block m has index <= 4**m (holds for m >= 4)."""
    rows = []
    for m in range(m_lo, m_hi + 1):
        max_index = block_offset(m + 1) - 1
        bound = 1 << (2 * m)
        rows.append(Obs1Row(m, max_index, bound, max_index <= bound))
    return rows
