"""Random link states, idle-path reachability and Monte-Carlo estimates.

Each link (ranks 1 .. l-1) is idle independently with probability q; inputs
and outputs carry no status.  Reachability and path counts are computed rank
by rank: a stage-m crossbar joins every label to the b labels differing in
position ((m - 1) % k) + 1, which on the ``(n, b, ..., b)`` view of a rank
array is a reduction along one axis.

Monte-Carlo samples are drawn in fixed-size blocks.  Block ``i`` uses a
Philox stream keyed by ``(seed, i)``, so results do not depend on how
blocks are scheduled across workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from .netgraph import CapExceeded, NetworkParams, VertexId, check_vertex, label_index
from .stats import wilson_interval

BLOCK = 4096
EXACT_CAP_BITS = 24


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


# -- link states ---------------------------------------------------------------


@dataclass(frozen=True)
class LinkState:
    """Idle flags of every link; row ``m - 1`` holds rank ``m``, column = label index."""

    params: NetworkParams
    idle: np.ndarray

    def __post_init__(self) -> None:
        shape = (max(self.params.l - 1, 0), self.params.rank_size)
        if self.idle.shape != shape:
            raise ValueError(f"state shape {self.idle.shape}, expected {shape}")

    @property
    def bits(self) -> bytes:
        return np.packbits(self.idle.ravel()).tobytes()

    @classmethod
    def from_bits(cls, params: NetworkParams, bits: bytes) -> "LinkState":
        shape = (max(params.l - 1, 0), params.rank_size)
        flat = np.unpackbits(np.frombuffer(bits, dtype=np.uint8), count=shape[0] * shape[1])
        return cls(params, flat.astype(bool).reshape(shape))

    def is_idle(self, v: VertexId) -> bool:
        return bool(self.idle[v.rank - 1, label_index(v.label, self.params.b)])


def sample_state(params: NetworkParams, q: float, stream: np.random.Generator) -> LinkState:
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    shape = (max(params.l - 1, 0), params.rank_size)
    return LinkState(params, stream.random(shape) < q)


# -- vectorized rank sweeps ---------------------------------------------------


def _stage(reach: np.ndarray, params: NetworkParams, m: int, count: bool) -> np.ndarray:
    """Push values across stage ``m``: OR (or sum) over each crossbar."""
    b, k = params.b, params.k
    if k == 0:
        return reach
    j = params.stage_position(m)
    n = reach.shape[0]
    view = reach.reshape(n, b ** (j - 1), b, b ** (k - j))
    agg = view.sum(axis=2, keepdims=True) if count else view.any(axis=2, keepdims=True)
    return np.broadcast_to(agg, view.shape).reshape(n, b**k)


def sweep(
    params: NetworkParams,
    start: np.ndarray,
    idle_rows: Iterable[np.ndarray],
    first_stage: int,
    last_stage: int,
    count: bool = False,
) -> np.ndarray:
    """Propagate ``start`` from rank ``first_stage - 1`` to rank ``last_stage``.

    ``idle_rows`` yields the ``(n, b^k)`` idle masks of ranks
    ``first_stage .. last_stage - 1`` in order; the final rank is unmasked.
    """
    reach = start
    rows = iter(idle_rows)
    for m in range(first_stage, last_stage + 1):
        reach = _stage(reach, params, m, count)
        if m < last_stage:
            mask = next(rows)
            reach = reach * mask if count else reach & mask
    return reach


def _onehot(n: int, size: int, index: int, dtype=bool) -> np.ndarray:
    out = np.zeros((n, size), dtype=dtype)
    out[:, index] = 1
    return out


def linked_batch(params: NetworkParams, idle: np.ndarray, src: int = 0, dst: int = 0) -> np.ndarray:
    """``idle`` has shape ``(n, l-1, b^k)``; returns a length-n bool array."""
    n = idle.shape[0]
    start = _onehot(n, params.rank_size, src)
    reach = sweep(params, start, (idle[:, m] for m in range(idle.shape[1])), 1, params.l)
    return reach[:, dst]


def count_batch(params: NetworkParams, idle: np.ndarray, src: int = 0, dst: int = 0) -> np.ndarray:
    n = idle.shape[0]
    # path counts reach b^(l-k); fall back to Python ints beyond int64
    dtype = np.int64 if params.b ** max(params.l - params.k, 0) < 2**62 else object
    start = _onehot(n, params.rank_size, src, dtype=dtype)
    rows = (idle[:, m].astype(dtype) for m in range(idle.shape[1]))
    return sweep(params, start, rows, 1, params.l, count=True)[:, dst]


def _endpoints(params: NetworkParams, v: VertexId, w: VertexId) -> tuple[int, int]:
    check_vertex(params, v)
    check_vertex(params, w)
    if v.rank != 0 or w.rank != params.l:
        raise ValueError("v must be an input and w an output")
    return label_index(v.label, params.b), label_index(w.label, params.b)


def is_linked(params: NetworkParams, state: LinkState, v: VertexId, w: VertexId) -> bool:
    src, dst = _endpoints(params, v, w)
    return bool(linked_batch(params, state.idle[None], src, dst)[0])


def count_idle_paths(params: NetworkParams, state: LinkState, v: VertexId, w: VertexId) -> int:
    src, dst = _endpoints(params, v, w)
    return int(count_batch(params, state.idle[None], src, dst)[0])


# -- Monte Carlo ------------------------------------------------------------


@dataclass(frozen=True)
class Estimate:
    p_hat: float
    n: int
    ci_low: float
    ci_high: float
    seed: int
    successes: int

    @classmethod
    def from_counts(cls, successes: int, n: int, seed: int) -> "Estimate":
        lo, hi = wilson_interval(successes, n)
        return cls(successes / n, n, lo, hi, seed, successes)

    @property
    def sigma(self) -> float:
        """Binomial standard error of ``p_hat``."""
        return math.sqrt(self.p_hat * (1 - self.p_hat) / self.n)

    def to_dict(self) -> dict:
        return asdict(self)


def _blocks(n: int) -> list[tuple[int, int]]:
    return [(i, min(BLOCK, n - i * BLOCK)) for i in range(-(-n // BLOCK))]


def _map_blocks(fn, n: int, workers: int):
    blocks = _blocks(n)
    if workers <= 1:
        return [fn(i, size) for i, size in blocks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda bs: fn(*bs), blocks))


def _sample_rows(rng: np.random.Generator, size: int, ranks: int, width: int, q: float) -> np.ndarray:
    idle = np.empty((size, ranks, width), dtype=bool)
    for m in range(ranks):
        idle[:, m] = rng.random((size, width)) < q
    return idle


def estimate_Q(params: NetworkParams, q: float, n: int, seed: int, workers: int = 1) -> Estimate:
    """Fraction of ``n`` random states in which input 0^k reaches output 0^k."""
    if n < 1:
        raise ValueError("need at least one sample")

    def block(i: int, size: int) -> int:
        idle = _sample_rows(block_rng(seed, i), size, max(params.l - 1, 0), params.rank_size, q)
        return int(linked_batch(params, idle).sum())

    return Estimate.from_counts(sum(_map_blocks(block, n, workers)), n, seed)


def sample_idle_paths(params: NetworkParams, q: float, n: int, seed: int, workers: int = 1) -> np.ndarray:
    """Idle-path counts X between 0^k and 0^k for ``n`` random states."""

    def block(i: int, size: int) -> np.ndarray:
        idle = _sample_rows(block_rng(seed, i), size, max(params.l - 1, 0), params.rank_size, q)
        return count_batch(params, idle)

    return np.concatenate(_map_blocks(block, n, workers))


def estimate_moments(params: NetworkParams, q: float, n: int, seed: int, workers: int = 1) -> tuple[float, float]:
    """Sample means of X and X^2."""
    x = sample_idle_paths(params, q, n, seed, workers).astype(float)
    return float(x.mean()), float((x * x).mean())


# -- exact enumeration ---------------------------------------------------------


@lru_cache(maxsize=32)
def linked_state_counts(params: NetworkParams, cap_bits: int = EXACT_CAP_BITS) -> tuple[int, ...]:
    """``N_j``: number of linked link-states with exactly ``j`` idle links."""
    links = max(params.l - 1, 0) * params.rank_size
    if links > cap_bits:
        raise CapExceeded(f"{links} links exceed the {cap_bits}-bit exact enumeration cap")
    counts = np.zeros(links + 1, dtype=np.int64)
    total = 1 << links
    chunk = min(total, 1 << 16)
    shifts = np.arange(links, dtype=np.int64)
    for start in range(0, total, chunk):
        idx = np.arange(start, start + chunk, dtype=np.int64)
        bits = ((idx[:, None] >> shifts) & 1).astype(bool)
        idle = bits.reshape(chunk, max(params.l - 1, 0), params.rank_size)
        ok = linked_batch(params, idle)
        counts += np.bincount(bits[ok].sum(axis=1), minlength=links + 1)
    return tuple(int(c) for c in counts)


def exact_Q(params: NetworkParams, q, cap_bits: int = EXACT_CAP_BITS):
    """Exact linking probability by enumerating every link state.

    Pass ``q`` as a ``Fraction`` for an exact rational result.
    """
    counts = linked_state_counts(params, cap_bits)
    links = len(counts) - 1
    p = 1 - q
    return sum(c * q**j * p ** (links - j) for j, c in enumerate(counts) if c)


# -- link-set connection -----------------------------------------------------


def linkset_ranks(params: NetworkParams) -> tuple[int, int]:
    half = params.k // 2
    return half, params.l - half


def linkset_connect_prob(
    params: NetworkParams,
    V: Iterable[VertexId],
    W: Iterable[VertexId],
    q: float,
    n: int,
    seed: int,
    workers: int = 1,
) -> Estimate:
    """Probability that an idle path joins some link of V to some link of W.

    V lives in rank ``floor(k/2)`` and W in rank ``l - floor(k/2)``; only the
    links strictly between them are sampled.
    """
    r, s = linkset_ranks(params)
    V, W = list(V), list(W)
    if not V or not W:
        raise ValueError("V and W must be nonempty")
    for v in V:
        check_vertex(params, v)
        if v.rank != r:
            raise ValueError(f"V must lie in rank {r}, got {v}")
    for w in W:
        check_vertex(params, w)
        if w.rank != s:
            raise ValueError(f"W must lie in rank {s}, got {w}")
    if s <= r:
        raise ValueError(f"need s > r, got r={r}, s={s}")
    size = params.rank_size
    src = np.zeros(size, dtype=bool)
    src[[label_index(v.label, params.b) for v in V]] = True
    dst = np.zeros(size, dtype=bool)
    dst[[label_index(w.label, params.b) for w in W]] = True

    def block(i: int, count: int) -> int:
        idle = _sample_rows(block_rng(seed, i), count, s - r - 1, size, q)
        start = np.broadcast_to(src, (count, size)).copy()
        reach = sweep(params, start, (idle[:, m] for m in range(s - r - 1)), r + 1, s)
        return int((reach & dst).any(axis=1).sum())

    return Estimate.from_counts(sum(_map_blocks(block, n, workers)), n, seed)
