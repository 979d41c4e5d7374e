"""The standard error-feedback loop and stabilizing-pair certificates.

A controller ``c`` stabilizes a plant ``p`` when all four entries of the
closed-loop map from (reference, disturbance) to (error, input) lie in the
stability ring.  Equivalently there is a certificate pair (a, b) of stable
elements with ``a - p*b = 1`` and ``p*a`` stable, ``c = b/a``; the pair is
what every downstream synthesis step consumes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from fractions import Fraction

from .algebra import Poly, RatFunc, nullspace_basis, poly_ext_gcd, solve_linear_system
from .rings import DEFAULT_BOUND, RingId, _a_indices, is_stable, to_ring_fraction


class SingularLoop(ValueError):
    """1 - p*c = 0: the closed loop is not well posed."""


class NotStabilizing(ValueError):
    """A stabilizing controller was required."""


@dataclass(frozen=True)
class ClosedLoopMatrix:
    """Entries of the 2x2 closed-loop map; h11 = h22 = 1/(1 - p*c)."""

    h11: RatFunc
    h12: RatFunc
    h21: RatFunc
    h22: RatFunc

    def entries(self) -> tuple[RatFunc, RatFunc, RatFunc, RatFunc]:
        return (self.h11, self.h12, self.h21, self.h22)


@dataclass(frozen=True)
class StabilizingPair:
    """Certificate (a, b): a, b stable, a - p*b = 1, p*a stable, c = b/a."""

    a: RatFunc
    b: RatFunc
    ring: RingId

    @property
    def controller(self) -> RatFunc:
        return self.b / self.a


def closed_loop(p: RatFunc, c: RatFunc) -> ClosedLoopMatrix:
    """Exact closed-loop entries; raises SingularLoop when 1 - p*c = 0."""
    den = 1 - p * c
    if den.is_zero:
        raise SingularLoop("1 - p*c = 0")
    h11 = den.inv()
    return ClosedLoopMatrix(h11, p * h11, c * h11, h11)


def stabilizes(ring: RingId, p: RatFunc, c: RatFunc) -> bool:
    loop = closed_loop(p, c)
    return all(is_stable(ring, h) for h in loop.entries())


def pair_from_controller(ring: RingId, p: RatFunc, c: RatFunc) -> StabilizingPair:
    """The canonical pair a = 1/(1-p*c), b = c/(1-p*c) of a stabilizing c."""
    if not stabilizes(ring, p, c):
        raise NotStabilizing("controller does not stabilize the plant")
    loop = closed_loop(p, c)
    return StabilizingPair(loop.h11, loop.h21, ring)


def check_pair(ring: RingId, p: RatFunc, a: RatFunc, b: RatFunc) -> bool:
    """Re-verify a claimed pair exactly (a nonzero, identities, stability)."""
    if a.is_zero:
        return False
    if not (is_stable(ring, a) and is_stable(ring, b)):
        return False
    if not (a - p * b - 1).is_zero:
        return False
    return is_stable(ring, p * a)


def parametrize_stabilizing(
    ring: RingId, p: RatFunc, pair: StabilizingPair, q1: RatFunc, q2: RatFunc
) -> RatFunc:
    """The two-parameter family of stabilizing controllers through a pair.

    c(q1, q2) = (b + q1*a^2 + q2*b^2) / (a + q1*p*a^2 + q2*p*b^2) for stable
    q1, q2 outside the excluded set where the denominator vanishes.
    """
    for name, q in (("q1", q1), ("q2", q2)):
        if not is_stable(ring, q):
            raise ValueError(f"{name} is not stable in {ring.value}")
    a, b = pair.a, pair.b
    den = a + q1 * p * a * a + q2 * p * b * b
    if den.is_zero:
        raise SingularLoop("parametrization denominator vanishes at (q1, q2)")
    return (b + q1 * a * a + q2 * b * b) / den


def _synthesize_poly(p: RatFunc) -> tuple[RatFunc, StabilizingPair]:
    n, d = p.num, p.den
    _, x, y = poly_ext_gcd(d, n)  # x*d + y*n = 1 (p canonical: gcd(n, d) = 1)
    y = -y
    if x.is_zero:  # shift along the homogeneous solution to get a != 0
        x, y = x + n, y + d
    a = RatFunc.from_poly(x * d)
    b = RatFunc.from_poly(y * d)
    return b / a, StabilizingPair(a, b, RingId.POLY)


def _synthesize_stable_proper(p: RatFunc) -> tuple[RatFunc, StabilizingPair]:
    n, d = p.num, p.den
    var = p.var
    splus = Poly.make([1, 1], var)
    deg_n, deg_d = int(max(n.degree, 0)), int(d.degree)
    prefer_small_x = deg_n >= deg_d  # improper plants need the x side reduced
    for m in range(2 * max(deg_n, deg_d, 1), 4 * max(deg_n, deg_d, 1) + 4):
        e = splus ** m
        if prefer_small_x:
            _, x0, y0 = poly_ext_gcd(d, n)
            x = (x0 * e) % n if n.degree > 0 else x0 * e
            y = (x * d - e).div_exact(n)
        else:
            _, x0, y0 = poly_ext_gcd(d, n)
            y = (-y0 * e) % d if d.degree > 0 else -y0 * e
            x = (e + y * n).div_exact(d)
        a = RatFunc.from_poly(x * d) / RatFunc.from_poly(e)
        b = RatFunc.from_poly(y * d) / RatFunc.from_poly(e)
        if not a.is_zero and check_pair(RingId.STABLE_PROPER, p, a, b):
            return b / a, StabilizingPair(a, b, RingId.STABLE_PROPER)
    raise RuntimeError("stable-proper synthesis failed past its degree bound")


def _synthesize_no_linear(p: RatFunc, bound: int) -> Optional[tuple[RatFunc, StabilizingPair]]:
    """Bounded coefficient search for a pair over Q[x^2, x^3].

    With p = gamma/theta the pair conditions clear to two polynomial
    identities, linear in the unknown coefficients of (a, b, s):
    a*theta - b*gamma = theta and gamma*a = theta*s with s = p*a stable.
    """
    rep = to_ring_fraction(RingId.NO_LINEAR, p)
    gam, th = rep.gamma.num, rep.theta.num
    var = gam.var
    extra = int(max(gam.degree - th.degree, 0))
    for d in range(bound + 1):
        ab_idx = _a_indices(d)
        s_idx = _a_indices(d + extra)
        ncols = 2 * len(ab_idx) + len(s_idx)
        top = d + extra + int(max(gam.degree, th.degree)) + 1
        rows = [[Fraction(0)] * ncols for _ in range(2 * top)]
        rhs = [Fraction(0)] * (2 * top)
        for col, i in enumerate(ab_idx):
            for k in range(top):
                rows[k][col] = th.coeff(k - i)  # a*theta
                rows[k][len(ab_idx) + col] = -gam.coeff(k - i)  # -b*gamma
                rows[top + k][col] = gam.coeff(k - i)  # gamma*a
        for col, i in enumerate(s_idx):
            for k in range(top):
                rows[top + k][2 * len(ab_idx) + col] = -th.coeff(k - i)  # -theta*s
        for k in range(top):
            rhs[k] = th.coeff(k)
        sol = solve_linear_system(rows, rhs)
        if sol is None:
            continue
        if all(v == 0 for v in sol[: len(ab_idx)]):  # need a != 0
            for vec in nullspace_basis(rows, ncols):
                if any(v != 0 for v in vec[: len(ab_idx)]):
                    sol = [s + v for s, v in zip(sol, vec)]
                    break
            else:
                continue
        a_poly = Poly.make(_scatter(sol[: len(ab_idx)], ab_idx), var)
        b_poly = Poly.make(_scatter(sol[len(ab_idx): 2 * len(ab_idx)], ab_idx), var)
        a, b = RatFunc.from_poly(a_poly), RatFunc.from_poly(b_poly)
        if check_pair(RingId.NO_LINEAR, p, a, b):
            return b / a, StabilizingPair(a, b, RingId.NO_LINEAR)
    return None


def _scatter(values, idxs):
    out = [Fraction(0)] * (max(idxs) + 1 if idxs else 0)
    for val, i in zip(values, idxs):
        out[i] = val
    return out


def synthesize_stabilizing(
    ring: RingId, p: RatFunc, bound: int = DEFAULT_BOUND
) -> Optional[tuple[RatFunc, StabilizingPair]]:
    """A stabilizing controller and its certificate pair, or None.

    Always succeeds for ``poly`` and ``stable-proper``.  For ``no-linear``
    a None only means nothing was found within the degree budget.
    """
    if is_stable(ring, p):  # open loop already stable
        var = p.var
        pair = StabilizingPair(RatFunc.one(var), RatFunc.zero(var), ring)
        return RatFunc.zero(var), pair
    if ring is RingId.POLY:
        return _synthesize_poly(p)
    if ring is RingId.STABLE_PROPER:
        return _synthesize_stable_proper(p)
    return _synthesize_no_linear(p, bound)
