"""First and second moments of the idle-path count X and the bounds they give on Q.

``X`` counts idle paths between a fixed input and output of G(b, k, l).  The
second moment factors exactly as ``Ex[X^2] = Ex[X] * phi_l(q)``; everything
here is built on that identity.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Union

from .errors import RegimeError
from .genfun import phi_eval, phi_poly
from .netgraph import CapExceeded, NetworkParams, VertexId, enumerate_paths, enumeration_cap, path_links

Real = Union[float, Fraction]


def _check(b: int, k: int, l: int, q: Real) -> None:
    if l < k:
        raise ValueError(f"moments need l >= k, got k={k}, l={l}")
    if not 0 < q <= 1:
        raise ValueError(f"q must lie in (0, 1], got {q}")


def expected_paths(b: int, k: int, l: int, q: Real) -> Real:
    """``b^(l-k) q^(l-1)``: each of the paths has l-1 links."""
    _check(b, k, l, q)
    return b ** (l - k) * q ** max(l - 1, 0)


def second_moment(b: int, k: int, l: int, q: Real, exact: bool = False) -> Real:
    """``Ex[X^2] = Ex[X] * phi_l(q)``.

    With ``exact=True`` the computation runs over ``Fraction`` using the
    integer polynomial; pass ``q`` as a Fraction to get an exact result.
    """
    _check(b, k, l, q)
    if exact:
        q = Fraction(q)
        return expected_paths(b, k, l, q) * phi_poly(b, k, l)(q)
    if k == 0:
        raise ValueError("second moment needs k >= 1")
    return expected_paths(b, k, l, q) * phi_eval(b, k, l, q)


def second_moment_asymptotic(b: int, k: int, l: int, q: float) -> float:
    """Leading terms ``Ex[X] * (((b-1)/(bq-1))^2 b^(l-k) q^(l+1) + 1)``."""
    _check(b, k, l, q)
    if b * q <= 1:
        raise RegimeError(f"asymptotic second moment needs q > 1/b, got q={q}")
    lead = ((b - 1) / (b * q - 1)) ** 2 * b ** (l - k) * q ** (l + 1)
    return expected_paths(b, k, l, q) * (lead + 1.0)


def markov_upper_bound(b: int, k: int, l: int, q: Real) -> Real:
    return min(1, expected_paths(b, k, l, q))


def chebyshev_lower_bound(b: int, k: int, l: int, q: Real, exact: bool = False) -> Real:
    ex = expected_paths(b, k, l, q)
    bound = ex * ex / second_moment(b, k, l, q, exact=exact)
    # a value outside [0, 1] means the moments are inconsistent
    assert 0 <= bound <= 1 + 1e-12, f"Chebyshev bound {bound} outside [0, 1]"
    return bound


def critical_ratio_limit(b: int, q: float) -> float:
    """k -> infinity limit of Ex[X]^2 / Ex[X^2] at fixed q (used at q = q_c)."""
    if not 1.0 / b < q < 1.0:
        raise RegimeError(f"need 1/b < q < 1, got q={q}")
    num = (b * q - 1) ** 2
    return num / ((b - 1) ** 2 * q * q + num * q)


def brute_second_moment(b: int, k: int, l: int, q: Real, cap: int | None = None) -> Real:
    """Oracle: sum of ``q^|links(u) | links(u')|`` over ordered path pairs."""
    params = NetworkParams(b, k, l)
    cap = enumeration_cap() if cap is None else cap
    if b ** (2 * max(l - k, 0)) > cap:
        raise CapExceeded(f"{b}^{2 * (l - k)} path pairs exceed cap {cap}")
    zero = (0,) * k
    paths = enumerate_paths(params, VertexId(0, zero), VertexId(l, zero))
    link_sets = [frozenset(path_links(p, params)) for p in paths]
    total: Real = 0 * q
    for a in link_sets:
        for c in link_sets:
            total += q ** len(a | c)
    return total


@dataclass
class MomentReport:
    ex_x: float
    ex_x2_exact: float
    ex_x2_asymptotic: float
    markov_upper: float
    chebyshev_lower: float

    def to_dict(self) -> dict:
        return asdict(self)


def moment_report(b: int, k: int, l: int, q: float) -> MomentReport:
    """All moment quantities at one point; the asymptotic value is NaN when q <= 1/b."""
    try:
        asym = second_moment_asymptotic(b, k, l, q)
    except RegimeError:
        asym = math.nan
    return MomentReport(
        ex_x=expected_paths(b, k, l, q),
        ex_x2_exact=second_moment(b, k, l, q),
        ex_x2_asymptotic=asym,
        markov_upper=markov_upper_bound(b, k, l, q),
        chebyshev_lower=chebyshev_lower_bound(b, k, l, q),
    )
