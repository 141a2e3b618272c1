"""Residue evaluation of phi_l(q) from the two real poles of A(z)/B(z).

At y = q the generating function is ``A(z) / B(z)`` with

    A(z) = 1 - b q z + (b - 1) (q z)^(k + 1)
    B(z) = (1 - z)(1 - b q z) - (b - 1) z (1 - q) (q z)^k

Both vanish at z = 1/q, so the common factor (1 - q z) is divided out and
the roots are sought on the reduced denominator; otherwise Newton can land
on the removable point 1/q when k is small.  Inside |z| < 1/q the reduced
denominator has two real zeros, perturbations of z = 1 and z = 1/(bq).  Summing minus the residues of ``A / (B z^(l+1))`` at
those two poles reproduces phi_l(q) up to a contour term of order l q^l.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConvergenceError, RegimeError

NEWTON_TOL = 1e-14
MAX_ITER = 100
NEAR_THRESHOLD = 0.05


def _check(b: int, k: int, q: float) -> None:
    if k < 1:
        raise ValueError(f"need k >= 1, got {k}")
    if not 1.0 / b < q < 1.0:
        raise RegimeError(f"residue analysis needs 1/b < q < 1, got q={q}")


def gf_numerator(b: int, k: int, q: float, z: float) -> float:
    return 1.0 - b * q * z + (b - 1) * (q * z) ** (k + 1)


def gf_denominator(b: int, k: int, q: float, z: float) -> float:
    return (1.0 - z) * (1.0 - b * q * z) - (b - 1) * z * (1.0 - q) * (q * z) ** k


def gf_denominator_prime(b: int, k: int, q: float, z: float) -> float:
    return (
        -(1.0 - b * q * z)
        - b * q * (1.0 - z)
        - (b - 1) * (1.0 - q) * (k + 1) * q**k * z**k
    )


def _geom(w: float, n: int) -> tuple[float, float]:
    # sum_{j=1..n} w^j and its derivative in w
    s = ds = 0.0
    p = 1.0
    for j in range(1, n + 1):
        ds += j * p
        p *= w
        s += p
    return s, ds


def reduced_numerator(b: int, k: int, q: float, z: float) -> float:
    """A(z) / (1 - q z) = 1 - (b - 1) sum_{j=1..k} (q z)^j."""
    return 1.0 - (b - 1) * _geom(q * z, k)[0]


def reduced_denominator(b: int, k: int, q: float, z: float) -> float:
    """B(z) / (1 - q z) = (1 - bqz) - (1 - q) z [1 - (b - 1) sum_{j<k} (q z)^j]."""
    s, _ = _geom(q * z, k - 1)
    return (1.0 - b * q * z) - (1.0 - q) * z * (1.0 - (b - 1) * s)


def reduced_denominator_prime(b: int, k: int, q: float, z: float) -> float:
    s, ds = _geom(q * z, k - 1)
    return -b * q - (1.0 - q) * (1.0 - (b - 1) * s) + (1.0 - q) * z * (b - 1) * q * ds


def _denominator_scale(b: int, k: int, q: float, z: float) -> float:
    # sum of |monomial| over the expanded polynomial: a backward-error scale
    z = abs(z)
    return 1.0 + (1.0 + b * q) * z + b * q * z * z + (b - 1) * (1.0 - q) * q**k * z ** (k + 1) * 2


def _bisect(f, lo: float, hi: float) -> float:
    flo = f(lo)
    if flo * f(hi) > 0:
        raise ConvergenceError(f"no sign change on [{lo}, {hi}]")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0 or hi - lo <= 4e-16 * abs(mid):
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _newton(b: int, k: int, q: float, z0: float, bracket: tuple[float, float]) -> tuple[float, int]:
    f = lambda z: reduced_denominator(b, k, q, z)  # noqa: E731
    z = z0
    for it in range(1, MAX_ITER + 1):
        d = reduced_denominator_prime(b, k, q, z)
        if d == 0.0:
            break
        step = f(z) / d
        z -= step
        if not math.isfinite(z):
            break
        if abs(step) <= NEWTON_TOL * abs(z):
            lo, hi = bracket
            if lo <= z <= hi:
                return z, it
            break
    return _bisect(f, *bracket), -1


# Near 1/(bq) both reduced polynomials are of size b^-k, so they are written
# in terms of the displacement d, with zeta3 = (1 - d)/(bq), to avoid
# cancellation.  Then w = qz = (1 - d)/b and 1 - bw = d exactly.


def _z3_parts(b: int, k: int, q: float, d: float):
    z = (1.0 - d) / (b * q)
    w = (1.0 - d) / b
    n = d + (b - 1) * w**k
    return z, w, n, 1.0 - w


def _g3(b: int, k: int, q: float, d: float) -> float:
    """Reduced denominator as a function of d."""
    z, _, n, den = _z3_parts(b, k, q, d)
    return d - (1.0 - q) * z * n / den


def _g3_prime(b: int, k: int, q: float, d: float) -> float:
    z, w, n, den = _z3_parts(b, k, q, d)
    dz, dn, dden = -1.0 / (b * q), 1.0 - (b - 1) * k * w ** (k - 1) / b, 1.0 / b
    dh = (1.0 - q) * (dz * n / den + z * dn / den - z * n * dden / den**2)
    return 1.0 - dh


def _zeta3_term(b: int, k: int, l: int, q: float, d: float) -> float:
    z, w, _, den = _z3_parts(b, k, q, d)
    a = (d + (b - 1) * w ** (k + 1)) / den
    # dB~/dz = dB~/dd * dd/dz, dd/dz = -bq
    bp = -b * q * _g3_prime(b, k, q, d)
    return -a / (bp * z ** (l + 1))


def _solve_delta(b: int, k: int, q: float) -> tuple[float, int]:
    f = lambda d: _g3(b, k, q, d)  # noqa: E731
    hi = b ** (-k / 2)
    d = 0.0
    for it in range(1, MAX_ITER + 1):
        step = f(d) / _g3_prime(b, k, q, d)
        d -= step
        if not math.isfinite(d):
            break
        if abs(step) <= NEWTON_TOL * max(abs(d), 1e-300):
            if 0.0 <= d <= hi:
                return d, it
            break
    return _bisect(f, 0.0, hi), -1


@dataclass(frozen=True)
class RootPair:
    zeta2: float
    zeta3: float
    newton_iters: tuple[int, int]
    residual: tuple[float, float]
    regime_warning: bool = False
    # zeta3 = (1 - delta3)/(bq), kept separately for full relative precision
    delta3: float = 0.0


def denominator_roots(b: int, k: int, q: float) -> RootPair:
    """Zeros of B near 1 (zeta2) and near 1/(bq) (zeta3), excluding z = 1/q.

    ``newton_iters`` holds -1 for a root that fell back to bisection.
    """
    _check(b, k, q)
    half = k / 2
    br2 = (1.0 - q**half, 1.0 + q**half)
    zeta2, it2 = _newton(b, k, q, 1.0, br2)
    delta3, it3 = _solve_delta(b, k, q)
    zeta3 = (1.0 - delta3) / (b * q)
    res = tuple(
        abs(gf_denominator(b, k, q, z)) / _denominator_scale(b, k, q, z) for z in (zeta2, zeta3)
    )
    if not 0.0 < zeta3 < zeta2:
        raise RegimeError(f"root ordering violated: zeta3={zeta3}, zeta2={zeta2}")
    return RootPair(
        zeta2, zeta3, (it2, it3), res, regime_warning=b * q - 1 < NEAR_THRESHOLD, delta3=delta3
    )


def pole_terms(b: int, k: int, l: int, q: float, roots: RootPair | None = None) -> tuple[float, float]:
    """Contributions ``-A(zeta) / (B'(zeta) zeta^(l+1))`` of the two poles.

    Computed from the reduced pair, which has the same ratio at a simple
    zero away from 1/q.
    """
    roots = roots or denominator_roots(b, k, q)
    z = roots.zeta2
    t2 = -reduced_numerator(b, k, q, z) / (reduced_denominator_prime(b, k, q, z) * z ** (l + 1))
    return t2, _zeta3_term(b, k, l, q, roots.delta3)


def residue_phi(b: int, k: int, l: int, q: float) -> float:
    if l < k:
        raise ValueError(f"residue evaluation needs l >= k, got k={k}, l={l}")
    roots = denominator_roots(b, k, q)
    radius = (1.0 / q) * (1.0 - 1.0 / l)
    if roots.zeta2 >= radius:
        raise RegimeError(
            f"zeta2={roots.zeta2:.6g} lies outside the contour radius {radius:.6g}; "
            "the two-pole expansion does not apply (k too small for this q and l)"
        )
    t2, t3 = pole_terms(b, k, l, q, roots)
    return t2 + t3


def phi_asymptotic(b: int, k: int, l: int, q: float) -> float:
    """Closed-form leading terms ``((b-1)/(bq-1))^2 b^(l-k) q^(l+1) + 1``."""
    if not 1.0 / b < q < 1.0:
        raise RegimeError(f"asymptotic formula needs 1/b < q < 1, got q={q}")
    return ((b - 1) / (b * q - 1)) ** 2 * b ** (l - k) * q ** (l + 1) + 1.0


def zeta3_leading(b: int, k: int, q: float) -> float:
    """First-order displacement of the pole near 1/(bq)."""
    return (1.0 / (b * q)) * (1.0 - (b - 1) * (1.0 - q) / ((b * q - 1) * b**k))
