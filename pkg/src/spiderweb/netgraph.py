"""Spider-web crossbar graphs G(b, k, l): vertices, paths and symmetry maps.

A vertex is a (rank, label) pair where the label is a tuple of ``k`` digits
``a_1 ... a_k`` over ``{0, ..., b-1}``.  Stage ``m`` (edges from rank ``m-1``
into rank ``m``) may only change label position ``((m - 1) % k) + 1``.

Paths are carried as a digit string ``t`` of length ``k + l``.  The first
``k`` digits are the input label and ``t[k + m - 1]`` is the digit written
into the varying position by stage ``m``.  The rank-``m`` label is therefore
the window ``t[m : m + k]`` read cyclically: label position ``j`` holds the
window digit whose absolute index is congruent to ``j`` modulo ``k``.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from typing import Iterator, Sequence

DEFAULT_PATH_CAP = 2**20


def enumeration_cap() -> int:
    """Enumeration cap, overridable through ``SPIDERWEB_ENUM_CAP``."""
    return int(os.environ.get("SPIDERWEB_ENUM_CAP", DEFAULT_PATH_CAP))


class CapExceeded(ValueError):
    """An oracle enumeration would exceed the configured size cap."""


@dataclass(frozen=True)
class NetworkParams:
    b: int
    k: int
    l: int

    def __post_init__(self) -> None:
        if self.b < 2:
            raise ValueError(f"base b must be >= 2, got {self.b}")
        if self.k < 0 or self.l < 0:
            raise ValueError(f"scale and depth must be >= 0, got k={self.k}, l={self.l}")

    @property
    def rank_size(self) -> int:
        return self.b**self.k

    def stage_position(self, m: int) -> int:
        """1-based label position varied by stage ``m``."""
        return (m - 1) % self.k + 1


@dataclass(frozen=True)
class VertexId:
    rank: int
    label: tuple[int, ...]

    @classmethod
    def of(cls, rank: int, label: str | Sequence[int]) -> "VertexId":
        if isinstance(label, str):
            label = [int(ch) for ch in label]
        return cls(rank, tuple(label))

    def __str__(self) -> str:
        return f"({self.rank},{''.join(map(str, self.label))})"


def check_vertex(params: NetworkParams, v: VertexId) -> None:
    if not 0 <= v.rank <= params.l:
        raise ValueError(f"rank {v.rank} outside [0, {params.l}]")
    if len(v.label) != params.k or any(not 0 <= a < params.b for a in v.label):
        raise ValueError(f"label {v.label} is not a length-{params.k} base-{params.b} string")


def label_index(label: Sequence[int], b: int) -> int:
    """Integer index of a label, ``a_1`` most significant."""
    idx = 0
    for a in label:
        idx = idx * b + a
    return idx


def index_label(idx: int, b: int, k: int) -> tuple[int, ...]:
    digits = [0] * k
    for pos in range(k - 1, -1, -1):
        idx, digits[pos] = divmod(idx, b)
    return tuple(digits)


def vertices(params: NetworkParams, rank: int) -> Iterator[VertexId]:
    for label in itertools.product(range(params.b), repeat=params.k):
        yield VertexId(rank, label)


def neighbors(params: NetworkParams, v: VertexId, forward: bool = True) -> list[VertexId]:
    """The ``b`` vertices joined to ``v`` by one crossbar in the adjacent rank."""
    check_vertex(params, v)
    if forward:
        if v.rank >= params.l:
            raise ValueError("output vertices have no forward neighbors")
        stage, rank = v.rank + 1, v.rank + 1
    else:
        if v.rank <= 0:
            raise ValueError("input vertices have no backward neighbors")
        stage, rank = v.rank, v.rank - 1
    if params.k == 0:
        return [VertexId(rank, ())]
    j = params.stage_position(stage) - 1
    out = []
    for d in range(params.b):
        label = list(v.label)
        label[j] = d
        out.append(VertexId(rank, tuple(label)))
    return out


def is_edge(params: NetworkParams, v: VertexId, w: VertexId) -> bool:
    if w.rank != v.rank + 1 or not 0 <= v.rank < params.l:
        return False
    if params.k == 0:
        return True
    j = params.stage_position(w.rank) - 1
    return all(a == c for i, (a, c) in enumerate(zip(v.label, w.label)) if i != j)


def edges(params: NetworkParams, stage: int) -> Iterator[tuple[VertexId, VertexId]]:
    for v in vertices(params, stage - 1):
        for w in neighbors(params, v, forward=True):
            yield v, w


# -- paths -------------------------------------------------------------------


@dataclass(frozen=True)
class PathDigits:
    digits: tuple[int, ...]

    @classmethod
    def of(cls, digits: str | Sequence[int]) -> "PathDigits":
        if isinstance(digits, str):
            digits = [int(ch) for ch in digits]
        return cls(tuple(digits))

    def __str__(self) -> str:
        return "".join(map(str, self.digits))


def path_vertex(p: PathDigits, params: NetworkParams, m: int) -> VertexId:
    """Rank-``m`` vertex of the path (cyclic window read-out)."""
    k = params.k
    label = [0] * k
    for i in range(m, m + k):
        label[i % k] = p.digits[i]
    return VertexId(m, tuple(label))


def path_vertices(p: PathDigits, params: NetworkParams) -> list[VertexId]:
    if len(p.digits) != params.k + params.l:
        raise ValueError(f"path has {len(p.digits)} digits, expected {params.k + params.l}")
    return [path_vertex(p, params, m) for m in range(params.l + 1)]


def path_links(p: PathDigits, params: NetworkParams) -> list[VertexId]:
    """Intermediate vertices (ranks 1 .. l-1) whose idleness decides the path."""
    return path_vertices(p, params)[1:-1]


def enumerate_paths(
    params: NetworkParams, v: VertexId, w: VertexId, cap: int | None = None
) -> list[PathDigits]:
    """All paths from input ``v`` to output ``w``.

    Stage ``m`` is the last stage touching its position iff ``m > l - k``;
    those stages are forced to write ``w``'s digit, the others are free.
    """
    check_vertex(params, v)
    check_vertex(params, w)
    b, k, l = params.b, params.k, params.l
    if v.rank != 0 or w.rank != l:
        raise ValueError("paths run from rank 0 to rank l")
    n_free = max(l - k, 0)
    cap = enumeration_cap() if cap is None else cap
    if b**n_free > cap:
        raise CapExceeded(f"{b}^{n_free} paths exceed cap {cap}")
    if l < k and v.label[l:] != w.label[l:]:
        return []
    forced = [w.label[params.stage_position(m) - 1] for m in range(n_free + 1, l + 1)]
    return [
        PathDigits(tuple(v.label) + free + tuple(forced))
        for free in itertools.product(range(b), repeat=n_free)
    ]


def is_path(p: PathDigits, params: NetworkParams) -> bool:
    vs = path_vertices(p, params)
    return all(is_edge(params, x, y) for x, y in zip(vs, vs[1:]))


# -- automorphisms -----------------------------------------------------------


@dataclass(frozen=True)
class Automorphism:
    """Rank-wise digit shifts; rank ``m`` labels are shifted by ``shifts[m]`` mod b."""

    shifts: tuple[tuple[int, ...], ...]

    def is_valid(self, params: NetworkParams) -> bool:
        if len(self.shifts) != params.l + 1:
            return False
        if params.k == 0:
            return True
        for m in range(1, params.l + 1):
            j = params.stage_position(m) - 1
            prev, cur = self.shifts[m - 1], self.shifts[m]
            if any(a != c for i, (a, c) in enumerate(zip(prev, cur)) if i != j):
                return False
        return True


def identity_automorphism(params: NetworkParams) -> Automorphism:
    return Automorphism(tuple((0,) * params.k for _ in range(params.l + 1)))


def apply_automorphism(a: Automorphism, v: VertexId, params: NetworkParams) -> VertexId:
    shift = a.shifts[v.rank]
    return VertexId(v.rank, tuple((x + s) % params.b for x, s in zip(v.label, shift)))


def canonical_automorphism(p: PathDigits, params: NetworkParams) -> Automorphism:
    """Automorphism sending path ``p`` onto the all-zeros path."""
    b = params.b
    return Automorphism(
        tuple(tuple((-x) % b for x in v.label) for v in path_vertices(p, params))
    )


# -- isomorphisms ------------------------------------------------------------


def dual_map(params: NetworkParams, v: VertexId) -> VertexId:
    """Isomorphism onto the reversed graph; an involution.

    Rank ``m`` goes to rank ``l - m`` and new position ``i`` takes old
    position ``j`` with ``j = l + 1 - i (mod k)``.
    """
    check_vertex(params, v)
    k, l = params.k, params.l
    label = tuple(v.label[(l - 1 - i) % k] for i in range(k)) if k else ()
    return VertexId(l - v.rank, label)


def window_iso(params: NetworkParams, m: int, n: int, v: VertexId) -> VertexId:
    """Embed vertex ``v`` of G(b, k, n-m) into ranks m..n of G(b, k, l).

    Rank ``h`` goes to rank ``m + h``; new position ``i`` takes old position
    ``j`` with ``j = i - m (mod k)`` so that stage ``h`` lands on stage ``m + h``.
    """
    if not 0 <= m <= n <= params.l:
        raise ValueError(f"window [{m}, {n}] not inside [0, {params.l}]")
    small = NetworkParams(params.b, params.k, n - m)
    check_vertex(small, v)
    k = params.k
    label = tuple(v.label[(i - m) % k] for i in range(k)) if k else ()
    return VertexId(m + v.rank, label)
