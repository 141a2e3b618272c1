"""Brute-force cross-check suites, shared by the CLI and the test-suite."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .genfun import brute_phi, phi_poly
from .moments import brute_second_moment, second_moment
from .netgraph import NetworkParams, VertexId, enumerate_paths, is_path, neighbors
from .simulate import estimate_Q, exact_Q

GRID_B = (2, 3)
GRID_K = (1, 2)
GRID_Q = (0.3, 0.5, 0.8)
EXACT_Q_CASES = ((2, 1, 2), (2, 1, 3), (2, 2, 4))


@dataclass
class CaseResult:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}  {self.detail}".rstrip()


def _grid():
    for b in GRID_B:
        for k in GRID_K:
            for l in range(k, k + 5):
                yield b, k, l


def bfs_path_count(params: NetworkParams, v: VertexId, w: VertexId) -> int:
    """Count paths v -> w by forward expansion through ``neighbors``."""
    counts = {v: 1}
    for _ in range(params.l):
        nxt: dict[VertexId, int] = {}
        for x, c in counts.items():
            for y in neighbors(params, x, forward=True):
                nxt[y] = nxt.get(y, 0) + c
        counts = nxt
    return counts.get(w, 0)


def suite_paths() -> list[CaseResult]:
    out = []
    for b, k, l in _grid():
        params = NetworkParams(b, k, l)
        v = VertexId(0, (0,) * k)
        w = VertexId(l, (b - 1,) * k)
        paths = enumerate_paths(params, v, w)
        ok = (
            len(paths) == b ** (l - k)
            and len(set(paths)) == len(paths)
            and all(is_path(p, params) for p in paths)
            and bfs_path_count(params, v, w) == len(paths)
        )
        out.append(CaseResult(f"paths b={b} k={k} l={l}", ok, f"{len(paths)} paths"))
    return out


def suite_phi() -> list[CaseResult]:
    out = []
    for b, k, l in _grid():
        exact, brute = phi_poly(b, k, l), brute_phi(b, k, l)
        out.append(CaseResult(f"phi b={b} k={k} l={l}", exact == brute, str(exact)))
    return out


def suite_moments() -> list[CaseResult]:
    out = []
    for b, k, l in _grid():
        for q in GRID_Q:
            a, c = brute_second_moment(b, k, l, q), second_moment(b, k, l, q)
            rel = abs(a - c) / c
            out.append(CaseResult(f"moments b={b} k={k} l={l} q={q}", rel <= 1e-12, f"rel={rel:.2e}"))
    return out


def suite_exact_q(samples: int = 200_000, seed: int = 0) -> list[CaseResult]:
    out = []
    for b, k, l in EXACT_Q_CASES:
        params = NetworkParams(b, k, l)
        for q in GRID_Q:
            ex = exact_Q(params, q)
            est = estimate_Q(params, q, samples, seed)
            sigma = math.sqrt(ex * (1 - ex) / samples)
            dev = abs(est.p_hat - ex) / sigma
            out.append(
                CaseResult(
                    f"exactQ b={b} k={k} l={l} q={q}",
                    dev <= 3.0,
                    f"exact={ex:.6f} est={est.p_hat:.6f} ({dev:.2f} sigma)",
                )
            )
    return out


SUITES: dict[str, Callable[..., list[CaseResult]]] = {
    "paths": suite_paths,
    "phi": suite_phi,
    "moments": suite_moments,
    "exactQ": suite_exact_q,
}


def run_suite(name: str, samples: int = 200_000, seed: int = 0) -> list[CaseResult]:
    if name == "all":
        return [r for key in SUITES for r in run_suite(key, samples, seed)]
    if name not in SUITES:
        raise KeyError(name)
    if name == "exactQ":
        return suite_exact_q(samples, seed)
    return SUITES[name]()
