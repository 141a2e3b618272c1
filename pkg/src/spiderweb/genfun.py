"""Path-intersection polynomials phi_l(y) from the rational generating function.

``phi_l(y)`` counts paths 0^k -> 0^k of depth ``l`` by the number of links
whose label differs from 0^k.  Their generating function in ``z`` is the
rational function ``A(y, z) / B(y, z)`` with

    A = 1 - b y z + (b - 1) (y z)^(k + 1)
    B = (1 - z)(1 - b y z) - (b - 1) z (1 - y) (y z)^k

so the coefficients satisfy ``phi_l = alpha_l - sum_j beta_j phi_{l-j}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .netgraph import NetworkParams, VertexId, enumerate_paths, path_links


@dataclass(frozen=True)
class IntPoly:
    """Dense polynomial in ``y`` with Python-int coefficients (index = power)."""

    coeffs: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        c = list(self.coeffs)
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(int(x) for x in c))

    @classmethod
    def monomial(cls, coeff: int, power: int) -> "IntPoly":
        return cls((0,) * power + (coeff,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __add__(self, other: "IntPoly") -> "IntPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        c = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntPoly(tuple(x + y for x, y in zip(a, c)))

    def __neg__(self) -> "IntPoly":
        return IntPoly(tuple(-x for x in self.coeffs))

    def __sub__(self, other: "IntPoly") -> "IntPoly":
        return self + (-other)

    def __mul__(self, other: "IntPoly | int") -> "IntPoly":
        if isinstance(other, int):
            return IntPoly(tuple(other * x for x in self.coeffs))
        if not self.coeffs or not other.coeffs:
            return IntPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    out[i + j] += x * y
        return IntPoly(tuple(out))

    __rmul__ = __mul__

    def __call__(self, y):
        """Horner evaluation; works for float, Fraction or int arguments."""
        acc = 0 * y
        for c in reversed(self.coeffs):
            acc = acc * y + c
        return acc

    def __str__(self) -> str:
        terms = []
        for power, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if power == 0:
                body = str(abs(c))
            else:
                mono = "y" if power == 1 else f"y^{power}"
                body = mono if abs(c) == 1 else f"{abs(c)}{mono}"
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        if not terms:
            return "0"
        head_sign, head = terms[0]
        out = ("-" if head_sign == "-" else "") + head
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    def to_json(self) -> list[str]:
        """Decimal strings, so consumers never overflow fixed-width ints."""
        return [str(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence[str | int]) -> "IntPoly":
        return cls(tuple(int(x) for x in data))


ONE = IntPoly((1,))


@dataclass(frozen=True)
class RationalGF:
    """Numerator/denominator as z-coefficient lists of IntPoly in y."""

    A: tuple[IntPoly, ...]
    B: tuple[IntPoly, ...]


def build_gf(b: int, k: int) -> RationalGF:
    if b < 2:
        raise ValueError(f"base b must be >= 2, got {b}")
    if k < 1:
        raise ValueError(f"generating function needs k >= 1, got {k}")
    A = [IntPoly() for _ in range(k + 2)]
    A[0] = ONE
    A[1] = A[1] + IntPoly.monomial(-b, 1)
    A[k + 1] = A[k + 1] + IntPoly.monomial(b - 1, k + 1)

    B = [IntPoly() for _ in range(max(3, k + 2))]
    B[0] = ONE
    B[1] = B[1] + IntPoly((-1, -b))
    B[2] = B[2] + IntPoly.monomial(b, 1)
    # -(b - 1)(1 - y) y^k, i.e. (b - 1)(y^(k+1) - y^k)
    B[k + 1] = B[k + 1] + IntPoly.monomial(-(b - 1), k) + IntPoly.monomial(b - 1, k + 1)
    return RationalGF(tuple(A), tuple(B))


@lru_cache(maxsize=64)
def _phi_table(b: int, k: int, l: int) -> tuple[IntPoly, ...]:
    gf = build_gf(b, k)
    table: list[IntPoly] = []
    for n in range(l + 1):
        acc = gf.A[n] if n < len(gf.A) else IntPoly()
        for j in range(1, min(n, len(gf.B) - 1) + 1):
            if gf.B[j].coeffs:
                acc = acc - gf.B[j] * table[n - j]
        table.append(acc)
    return tuple(table)


def phi_poly(b: int, k: int, l: int) -> IntPoly:
    """Exact phi_l(y) by series division of A by B."""
    if l < 0:
        raise ValueError("depth must be >= 0")
    return _phi_table(b, k, l)[l]


@lru_cache(maxsize=256)
def _float_coeffs(b: int, k: int, l: int) -> tuple[float, ...]:
    return tuple(float(c) for c in phi_poly(b, k, l).coeffs)


def _horner(coeffs: tuple[float, ...], y: float) -> float:
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * y + c
    return acc


def psi_series(b: int, k: int, y: float, n: int) -> list[float]:
    """phi_0(y), ..., phi_n(y) as floats."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if b < 2 or k < 1:
        raise ValueError(f"need b >= 2 and k >= 1, got b={b}, k={k}")
    return [_horner(_float_coeffs(b, k, m), float(y)) for m in range(n + 1)]


def phi_eval(b: int, k: int, l: int, q: float) -> float:
    """phi_l(q) in floating point.

    Uses the exact integer coefficients; they are non-negative, so Horner at
    q > 0 loses nothing to cancellation. The float version of the series
    recurrence is not used: rounding feeds the mode growing like (bq)^m.
    """
    if not 0.0 < q <= 1.0:
        raise ValueError(f"q must lie in (0, 1], got {q}")
    if b < 2 or k < 1:
        raise ValueError(f"need b >= 2 and k >= 1, got b={b}, k={k}")
    if l < 0:
        raise ValueError("depth must be >= 0")
    return _horner(_float_coeffs(b, k, l), float(q))


def brute_phi(b: int, k: int, l: int, cap: int | None = None) -> IntPoly:
    """Oracle: tally enumerated paths 0^k -> 0^k by their non-zero links."""
    params = NetworkParams(b, k, l)
    zero = (0,) * k
    counts: dict[int, int] = {}
    for p in enumerate_paths(params, VertexId(0, zero), VertexId(l, zero), cap=cap):
        j = sum(1 for v in path_links(p, params) if v.label != zero)
        counts[j] = counts.get(j, 0) + 1
    if not counts:
        return IntPoly()
    return IntPoly(tuple(counts.get(j, 0) for j in range(max(counts) + 1)))


# -- stretch / excursion / segment decomposition --------------------------------
#
# A path 0^k t_{k+1} ... t_{k+l} is rewritten as l symbols (digit, overlined)
# where t_{k+m} is overlined iff the rank-m label it produces is not 0^k.  The symbol
# strings are exactly the language
#     ((eps + (B' (eps + 0' + ... + 0'^(k-1)))* B' 0'^(k-1)) 0)*
# with B' the overlined non-zero digits and 0' an overlined zero.


def marked_symbols(digits: Sequence[int], k: int) -> list[tuple[int, bool]]:
    """Symbol string of a path from 0^k whose final label is 0^k."""
    l = len(digits) - k
    out = []
    window = list(digits[:k])
    for m in range(1, l + 1):
        d = digits[k + m - 1]
        window[(m - 1) % k] = d
        out.append((d, any(window)))
    return out


def count_parses(symbols: Sequence[tuple[int, bool]], k: int) -> int:
    """Number of parses of ``symbols`` as a sequence of stretches.

    An unambiguous grammar gives exactly 1 for every member and 0 otherwise.
    """
    n = len(symbols)

    def lead(i: int) -> bool:
        d, marked = symbols[i]
        return marked and d != 0

    def zbar(i: int) -> bool:
        d, marked = symbols[i]
        return marked and d == 0

    def run_of_zbar(i: int, j: int) -> bool:
        return all(zbar(x) for x in range(i, j))

    @lru_cache(maxsize=None)
    def segment(i: int, j: int, final: bool) -> int:
        if j <= i or not lead(i):
            return 0
        tail = j - i - 1
        if final:
            return int(tail == k - 1 and run_of_zbar(i + 1, j))
        return int(tail <= k - 1 and run_of_zbar(i + 1, j))

    @lru_cache(maxsize=None)
    def prelims(i: int, j: int) -> int:
        total = int(i == j)
        for p in range(i + 1, j + 1):
            s = segment(i, p, False)
            if s:
                total += s * prelims(p, j)
        return total

    @lru_cache(maxsize=None)
    def excursion(i: int, j: int) -> int:
        return sum(prelims(i, m) * segment(m, j, True) for m in range(i, j))

    @lru_cache(maxsize=None)
    def stretch(i: int, j: int) -> int:
        if j <= i or symbols[j - 1] != (0, False):
            return 0
        return int(j - 1 == i) + excursion(i, j - 1)

    @lru_cache(maxsize=None)
    def stretches(i: int) -> int:
        if i == n:
            return 1
        return sum(stretch(i, j) * stretches(j) for j in range(i + 1, n + 1))

    return stretches(0)
