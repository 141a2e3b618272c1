"""Threshold and limit quantities of the linking-probability phase transition.

Above the critical vacancy probability ``q_c = b^(-(c-1)/c)`` the linking
probability tends to ``(1 - xi)^2``, where ``xi`` is the extinction
probability of the b-ary branching process with survival probability ``q``
per child, i.e. the interior root of ``x = (1 - q (1 - x))^b``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .errors import RegimeError, ThresholdError
from .genfun import psi_series

BISECT_DELTA = 1e-12


def critical_vacancy(b: int, c: float) -> float:
    if b < 2 or not c > 1:
        raise ValueError(f"need b >= 2 and c > 1, got b={b}, c={c}")
    return b ** (-(c - 1) / c)


def _extinction_map(b: int, q: float, x: float) -> float:
    return (1.0 - q * (1.0 - x)) ** b


def fixed_point_xi(b: int, q: float) -> float:
    """Interior fixed point of ``x -> (1 - q(1 - x))^b`` on (0, 1).

    Bisection on ``[0, 1 - delta]`` followed by a Newton polish.
    """
    if not 1.0 / b < q < 1.0:
        raise RegimeError(f"no interior fixed point unless 1/b < q < 1, got q={q}")
    g = lambda x: _extinction_map(b, q, x) - x  # noqa: E731
    lo, hi = 0.0, 1.0 - BISECT_DELTA
    if not (g(lo) > 0 and g(hi) < 0):
        raise RegimeError(f"fixed point not bracketed for b={b}, q={q}")
    while hi - lo > 1e-15:
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    for _ in range(3):
        d = b * q * (1.0 - q * (1.0 - x)) ** (b - 1) - 1.0
        if d == 0.0:
            break
        nx = x - g(x) / d
        if not 0.0 < nx < 1.0:
            break
        x = nx
    return x


def limiting_Q(b: int, q: float, c: float) -> float:
    """Limit of the linking probability as k -> infinity with l = c k."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    qc = critical_vacancy(b, c)
    if abs(q - qc) <= 4 * math.ulp(qc):
        raise ThresholdError(f"q = q_c = {qc}: the limit is not defined at the threshold")
    if q < qc:
        return 0.0
    return (1.0 - fixed_point_xi(b, q)) ** 2


def eta(b: int, q: float) -> float:
    """``b (1 - q (1 - xi))^(b-1)``, the constant in the extinction error term."""
    xi = fixed_point_xi(b, q)
    value = b * (1.0 - q * (1.0 - xi)) ** (b - 1)
    if not value < 1.0:
        raise RegimeError(f"eta = {value} >= 1 for b={b}, q={q}")
    return value


def alpha_exponent(b: int, q: float) -> float:
    value = math.log(1.0 / eta(b, q)) / math.log(b * q)
    assert value > 0
    return value


def contraction_rate(b: int, q: float) -> float:
    """Derivative of the extinction map at xi: the actual geometric rate
    at which ``branching_extinction_seq`` approaches xi."""
    xi = fixed_point_xi(b, q)
    return b * q * (1.0 - q * (1.0 - xi)) ** (b - 1)


def branching_extinction_seq(b: int, q: float, r: int) -> list[float]:
    """``p_0 = 0``, ``p_m = (1 - q (1 - p_{m-1}))^b``; ``p_r = Pr[Z_r = 0]``."""
    if r < 0:
        raise ValueError("depth r must be >= 0")
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    out = [0.0]
    for _ in range(r):
        out.append(_extinction_map(b, q, out[-1]))
    return out


def q_star(b: int, q: float, c: float) -> float:
    """Reduced vacancy probability ``q_{c-1} q^(1/(c-1)^2)`` (needs c > 2, q > q_c)."""
    if not c > 2:
        raise RegimeError(f"q_* is defined for c > 2, got c={c}")
    if not critical_vacancy(b, c) < q < 1.0:
        raise RegimeError(f"q_* needs q_c < q < 1, got q={q}")
    q_cm1 = critical_vacancy(b, c - 1)
    value = q_cm1 * q ** (1.0 / (c - 1) ** 2)
    assert value < q and value < q_cm1
    return value


def H_threshold(b: int, q: float, c: float, k: int) -> int:
    """``ceil((b q_*)^floor(k/2))``."""
    return math.ceil((b * q_star(b, q, c)) ** (k // 2))


@dataclass
class PhiBoundCheck:
    holds: bool
    k: int
    l: int
    q_star: float
    max_phi: float
    argmax_h: int
    values: list[float] = field(repr=False)

    def __bool__(self) -> bool:
        return self.holds


def lemma36_check(b: int, k: int, c: float, q: float) -> PhiBoundCheck:
    """Check ``phi_h(q_*) <= k`` for every ``0 <= h <= l - k`` with ``l = round(c k)``."""
    qs = q_star(b, q, c)
    l = round(c * k)
    values = psi_series(b, k, qs, l - k)
    h_max = max(range(len(values)), key=values.__getitem__)
    return PhiBoundCheck(
        holds=all(v <= k for v in values),
        k=k,
        l=l,
        q_star=qs,
        max_phi=values[h_max],
        argmax_h=h_max,
        values=values,
    )


@dataclass
class ThresholdReport:
    q_c: float
    xi: float | None
    q_limit: float
    eta: float | None
    alpha: float | None
    q_star: float | None

    def to_dict(self) -> dict:
        return asdict(self)


def threshold_report(b: int, q: float, c: float) -> ThresholdReport:
    """Everything limit-related at one (b, q, c); undefined entries are None.

    Raises ThresholdError at q = q_c, like ``limiting_Q``.
    """
    q_limit = limiting_Q(b, q, c)
    xi = e = a = qs = None
    if 1.0 / b < q < 1.0:
        xi = fixed_point_xi(b, q)
        try:
            e = eta(b, q)
            a = alpha_exponent(b, q)
        except RegimeError:
            pass
    if c > 2 and q > critical_vacancy(b, c):
        qs = q_star(b, q, c)
    return ThresholdReport(critical_vacancy(b, c), xi, q_limit, e, a, qs)
