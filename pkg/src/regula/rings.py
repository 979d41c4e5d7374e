"""Concrete stability rings embedded in Q(x), with exact decision procedures.

Three rings are shipped:

* ``poly`` -- A = Q[x], plain polynomials.
* ``no-linear`` -- A = Q[x^2, x^3], polynomials whose x^1 coefficient is
  zero (a discrete finite-time model ring without unit delays).
* ``stable-proper`` -- A = proper rational functions in ``s`` whose
  denominator is Hurwitz (all poles in the open left half-plane).

For each ring the module answers membership (:func:`is_stable`), builds
fractional representations (:func:`to_ring_fraction`), and solves Bezout
identities ``alpha*u - beta*v = w`` inside the ring (:func:`bezout_solve`).
The polynomial and stable-proper solvers are complete deciders; the
no-linear solver is a bounded coefficient search and reports
``unknown-within-budget`` instead of claiming nonexistence.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import lcm as _int_lcm
from typing import Optional

from .algebra import (
    Poly,
    RatFunc,
    nullspace_basis,
    poly_ext_gcd,
    poly_gcd,
    rf_normalize,
    solve_linear_system,
)

DEFAULT_BOUND = 8


class RingId(Enum):
    POLY = "poly"
    NO_LINEAR = "no-linear"
    STABLE_PROPER = "stable-proper"

    @classmethod
    def from_name(cls, name: str) -> "RingId":
        for ring in cls:
            if ring.value == name:
                return ring
        raise ValueError(f"unknown ring {name!r}; expected one of "
                         f"{[r.value for r in cls]}")

    @property
    def default_variable(self) -> str:
        return "s" if self is RingId.STABLE_PROPER else "x"


class SolveStatus(Enum):
    SOLVED = "solved"
    UNSOLVABLE = "unsolvable"
    UNKNOWN = "unknown-within-budget"


@dataclass(frozen=True)
class BezoutResult:
    status: SolveStatus
    alpha: Optional[RatFunc] = None
    beta: Optional[RatFunc] = None


class Coprimeness(Enum):
    COPRIME = "coprime"
    NOT_COPRIME = "not-coprime"
    WEAKLY_COPRIME = "weakly-coprime"
    NOT_WEAKLY_COPRIME = "not-weakly-coprime"
    UNKNOWN_UP_TO_BOUND = "unknown-within-budget"


@dataclass(frozen=True)
class CoprimenessVerdict:
    """Outcome of a coprimeness query, with re-verifiable witnesses.

    ``COPRIME`` carries (alpha, beta) with alpha*gamma - beta*theta = 1;
    ``NOT_WEAKLY_COPRIME`` carries a falsifier k with k*gamma and k*theta
    stable but k itself unstable.
    """

    status: Coprimeness
    alpha: Optional[RatFunc] = None
    beta: Optional[RatFunc] = None
    witness: Optional[RatFunc] = None
    bound: Optional[int] = None


# -- membership --------------------------------------------------------------


def routh_hurwitz(d: Poly) -> bool:
    """Exact test that every root of ``d`` lies in the open left half-plane.

    Necessary sign condition first, then a fraction-free Routh array over
    the integers; any nonpositive pivot or vanishing row decides "no".
    """
    if d.is_zero:
        raise ValueError("routh_hurwitz of the zero polynomial")
    n = int(d.degree)
    if n == 0:
        return True
    coeffs = [c / d.lc for c in d.coeffs]  # lc normalized to +1
    if any(c <= 0 for c in coeffs):
        return False
    den_lcm = 1
    for c in coeffs:
        den_lcm = _int_lcm(den_lcm, c.denominator)
    ints = [int(c * den_lcm) for c in coeffs]
    rev = ints[::-1]  # highest degree first
    prev, cur = rev[0::2], rev[1::2]
    for _ in range(n - 1):
        if cur[0] <= 0:
            return False
        nxt = []
        for i in range(len(prev) - 1):
            a = prev[i + 1]
            b = cur[i + 1] if i + 1 < len(cur) else 0
            nxt.append(cur[0] * a - prev[0] * b)
        if not nxt or all(c == 0 for c in nxt):
            return False
        prev, cur = cur, nxt
    return cur[0] > 0


def is_stable(ring: RingId, f: RatFunc) -> bool:
    """Membership of a canonical rational function in the ring."""
    if ring is RingId.POLY:
        return f.is_polynomial
    if ring is RingId.NO_LINEAR:
        return f.is_polynomial and f.num.coeff(1) == 0
    # stable-proper: proper with Hurwitz denominator
    return f.num.degree <= f.den.degree and routh_hurwitz(f.den)


def ring_contains_poly(ring: RingId, p: Poly) -> bool:
    return is_stable(ring, RatFunc.from_poly(p))


# -- fractional representations ----------------------------------------------


@dataclass(frozen=True)
class FractionRep:
    """A representation f = gamma/theta with both components in the ring."""

    gamma: RatFunc
    theta: RatFunc
    ring: RingId

    def __post_init__(self):
        if self.theta.is_zero:
            raise ValueError("fractional representation with zero denominator")
        if not is_stable(self.ring, self.gamma):
            raise ValueError("gamma is not stable in the ring")
        if not is_stable(self.ring, self.theta):
            raise ValueError("theta is not stable in the ring")

    @property
    def value(self) -> RatFunc:
        return self.gamma / self.theta


def to_ring_fraction(ring: RingId, f: RatFunc) -> FractionRep:
    """A valid fractional representation of ``f`` over the ring."""
    var = f.var
    one = RatFunc.one(var)
    if f.is_zero:
        return FractionRep(RatFunc.zero(var), one, ring)
    if ring is RingId.POLY:
        return FractionRep(RatFunc.from_poly(f.num), RatFunc.from_poly(f.den), ring)
    if ring is RingId.NO_LINEAR:
        gamma, theta = f.num.shift(2), f.den.shift(2)
        for k in (2, 1):
            if all(gamma.coeff(i) == 0 for i in range(k)) and all(
                theta.coeff(i) == 0 for i in range(k)
            ):
                g2 = Poly.make(gamma.coeffs[k:], var)
                t2 = Poly.make(theta.coeffs[k:], var)
                if g2.coeff(1) == 0 and t2.coeff(1) == 0:
                    gamma, theta = g2, t2
                    break
        return FractionRep(RatFunc.from_poly(gamma), RatFunc.from_poly(theta), ring)
    # stable-proper: divide by (s+1)^k
    k = int(max(f.num.degree, f.den.degree))
    e = Poly.make([1, 1], var) ** k
    return FractionRep(rf_normalize(f.num, e), rf_normalize(f.den, e), ring)


# -- Bezout solvers -----------------------------------------------------------


def _solve_poly_pair(
    p: Poly, q: Poly, rhs: Poly
) -> Optional[tuple[Poly, Poly]]:
    """Solve x*p - y*q = rhs over Q[var] with deg x minimized; None if unsolvable."""
    if q.is_zero:
        if p.is_zero:
            return (Poly.zero(p.var), Poly.zero(p.var)) if rhs.is_zero else None
        try:
            return rhs.div_exact(p), Poly.zero(p.var)
        except ValueError:
            return None
    g, u, v = poly_ext_gcd(p, q)
    quot, rem = divmod(rhs, g)
    if not rem.is_zero:
        return None
    x = u * quot
    qg = q.div_exact(g)
    if qg.degree > 0:
        x = x % qg
    y = (x * p - rhs).div_exact(q)
    return x, y


def _bezout_poly(u: Poly, v: Poly, w: Poly) -> BezoutResult:
    sol = _solve_poly_pair(u, v, w)
    if sol is None:
        return BezoutResult(SolveStatus.UNSOLVABLE)
    x, y = sol
    return BezoutResult(SolveStatus.SOLVED, RatFunc.from_poly(x), RatFunc.from_poly(y))


def _a_indices(limit: int) -> list[int]:
    """Coefficient indices of a no-linear element of degree <= limit."""
    return [i for i in range(limit + 1) if i != 1]


def _bezout_no_linear(u: Poly, v: Poly, w: Poly, bound: int) -> BezoutResult:
    """Coefficient search for alpha*u - beta*v = w inside Q[x^2, x^3]."""
    var = u.var
    top = int(max(u.degree, v.degree, 0))
    for d in range(bound + 1):
        idxs = _a_indices(d)
        ncols = 2 * len(idxs)
        nrows = d + top + 1
        rows = [[Fraction(0)] * ncols for _ in range(max(nrows, int(max(w.degree, 0)) + 1))]
        rhs = [Fraction(0)] * len(rows)
        for col, i in enumerate(idxs):
            for k in range(len(rows)):
                rows[k][col] = u.coeff(k - i)
                rows[k][len(idxs) + col] = -v.coeff(k - i)
        for k in range(len(rows)):
            rhs[k] = w.coeff(k)
        sol = solve_linear_system(rows, rhs)
        if sol is None:
            continue
        alpha = Poly.make(_scatter(sol[: len(idxs)], idxs), var)
        beta = Poly.make(_scatter(sol[len(idxs):], idxs), var)
        assert alpha * u - beta * v == w
        return BezoutResult(
            SolveStatus.SOLVED, RatFunc.from_poly(alpha), RatFunc.from_poly(beta)
        )
    return BezoutResult(SolveStatus.UNKNOWN)


def _scatter(values, idxs) -> list[Fraction]:
    out = [Fraction(0)] * (max(idxs) + 1 if idxs else 0)
    for val, i in zip(values, idxs):
        out[i] = val
    return out


def _rel_deg(f: RatFunc) -> int:
    """Relative degree (pole excess at infinity) of a nonzero proper function."""
    return int(f.den.degree - f.num.degree)


def _bezout_stable_proper(u: RatFunc, v: RatFunc, w: RatFunc) -> BezoutResult:
    """Complete decision of alpha*u - beta*v = w over the stable-proper ring.

    Solvability requires (a) every common closed-right-half-plane zero of u
    and v to divide w with multiplicity, and (b) the common zero at infinity
    min(reldeg u, reldeg v) not to exceed reldeg w.  Condition (a) is decided
    without factoring: the part of gcd(u_bar, v_bar) not compensated by
    w*du*dv must be Hurwitz, and that Hurwitz excess then joins the solution
    denominator.  Witnesses are built from a polynomial Diophantine equation
    cleared by a sufficient power of (s+1).
    """
    var = u.var if not u.is_zero else (v.var if not v.is_zero else w.var)
    zero = RatFunc.zero(var)
    if w.is_zero:
        return BezoutResult(SolveStatus.SOLVED, zero, zero)
    if u.is_zero and v.is_zero:
        raise ValueError("bezout_solve with u = v = 0")
    if v.is_zero:
        cand = w / u
        if is_stable(RingId.STABLE_PROPER, cand):
            return BezoutResult(SolveStatus.SOLVED, cand, zero)
        return BezoutResult(SolveStatus.UNSOLVABLE)
    if u.is_zero:
        cand = -(w / v)
        if is_stable(RingId.STABLE_PROPER, cand):
            return BezoutResult(SolveStatus.SOLVED, zero, cand)
        return BezoutResult(SolveStatus.UNSOLVABLE)

    nu, du = u.num, u.den
    nv, dv = v.num, v.den
    nw, dw = w.num, w.den
    ubar, vbar = nu * dv, nv * du
    g = poly_gcd(ubar, vbar)
    splus = Poly.make([1, 1], var)
    compensator = (splus ** int(g.degree)) * nw * du * dv
    h = g.div_exact(poly_gcd(g, compensator))
    if not routh_hurwitz(h):
        return BezoutResult(SolveStatus.UNSOLVABLE)
    ru, rv, rw = _rel_deg(u), _rel_deg(v), _rel_deg(w)
    if rw < min(ru, rv):
        return BezoutResult(SolveStatus.UNSOLVABLE)

    degs = [int(p.degree) for p in (ubar, vbar, dw, h, g)]
    d_ubar, d_vbar, d_dw, d_h, d_g = degs
    # guaranteed-success power; smaller n are still tried for minimal witnesses
    n_hi = max(0, d_vbar - d_g - d_dw - d_h, d_ubar - d_g - d_dw - d_h) + d_g + 6
    minimize_x = rv <= ru
    for n in range(n_hi):
        rhs = (splus ** n) * h * nw * du * dv
        if minimize_x:
            sol = _solve_poly_pair(ubar, vbar, rhs)
        else:
            swapped = _solve_poly_pair(vbar, ubar, -rhs)
            sol = (swapped[1], swapped[0]) if swapped is not None else None
        if sol is None:  # cannot happen once n >= deg g; defensive
            continue
        x, y = sol
        cap = n + d_dw + d_h
        if x.degree > cap or y.degree > cap:
            continue
        denom = (splus ** n) * dw * h
        alpha = rf_normalize(x, denom)
        beta = rf_normalize(y, denom)
        assert alpha * u - beta * v == w
        assert is_stable(RingId.STABLE_PROPER, alpha)
        assert is_stable(RingId.STABLE_PROPER, beta)
        return BezoutResult(SolveStatus.SOLVED, alpha, beta)
    raise RuntimeError("stable-proper Bezout construction failed past its degree bound")


def bezout_solve(
    ring: RingId, u: RatFunc, v: RatFunc, w: RatFunc, bound: int = DEFAULT_BOUND
) -> BezoutResult:
    """Find alpha, beta in the ring with alpha*u - beta*v = w.

    Complete for ``poly`` and ``stable-proper``; for ``no-linear`` a failed
    search only means "unknown within the degree budget".
    """
    for name, f in (("u", u), ("v", v), ("w", w)):
        if not is_stable(ring, f):
            raise ValueError(f"bezout_solve: {name} is not stable in {ring.value}")
    if u.is_zero and v.is_zero:
        raise ValueError("bezout_solve with u = v = 0")
    if ring is RingId.POLY:
        return _bezout_poly(u.num, v.num, w.num)
    if ring is RingId.NO_LINEAR:
        return _bezout_no_linear(u.num, v.num, w.num, bound)
    return _bezout_stable_proper(u, v, w)


# -- coprimeness ---------------------------------------------------------------


def is_coprime_factorization(rep: FractionRep, bound: int = DEFAULT_BOUND) -> CoprimenessVerdict:
    """Does gamma/theta admit Bezout witnesses alpha*gamma - beta*theta = 1?"""
    one = RatFunc.one(rep.gamma.var if not rep.gamma.is_zero else rep.theta.var)
    result = bezout_solve(rep.ring, rep.gamma, rep.theta, one, bound)
    if result.status is SolveStatus.SOLVED:
        assert result.alpha * rep.gamma - result.beta * rep.theta == one
        return CoprimenessVerdict(Coprimeness.COPRIME, alpha=result.alpha, beta=result.beta)
    if result.status is SolveStatus.UNSOLVABLE:
        return CoprimenessVerdict(Coprimeness.NOT_COPRIME)
    return CoprimenessVerdict(Coprimeness.UNKNOWN_UP_TO_BOUND, bound=bound)


def _verify_falsifier(rep: FractionRep, k: RatFunc) -> None:
    assert is_stable(rep.ring, k * rep.gamma)
    assert is_stable(rep.ring, k * rep.theta)
    assert not is_stable(rep.ring, k)


def _weak_poly(rep: FractionRep) -> CoprimenessVerdict:
    g = poly_gcd(rep.gamma.num, rep.theta.num)
    if g.degree <= 0:
        return CoprimenessVerdict(Coprimeness.WEAKLY_COPRIME)
    k = rf_normalize(Poly.one(g.var), g)
    _verify_falsifier(rep, k)
    return CoprimenessVerdict(Coprimeness.NOT_WEAKLY_COPRIME, witness=k)


def _weak_no_linear(rep: FractionRep, bound: int) -> CoprimenessVerdict:
    """Search for a falsifier k = m/g over the ambient PID Q[x].

    Any k with k*gamma and k*theta polynomial must have the form m/g with
    g = gcd(gamma, theta): a Bezout identity in Q[x] forces k*g into Q[x].
    The two stability constraints are linear in the coefficients of m, so
    each candidate degree yields a nullspace whose basis vectors either all
    stay in the ring (no falsifier at this degree) or expose one.
    """
    gam, th = rep.gamma.num, rep.theta.num
    var = th.var
    g = poly_gcd(gam, th)
    gg, tg = gam.div_exact(g), th.div_exact(g)
    for d in range(int(g.degree) + bound + 1):
        rows = []
        for f in (gg, tg):
            rows.append([f.coeff(1 - i) for i in range(d + 1)])
        for vec in nullspace_basis(rows, d + 1):
            m = Poly.make(vec, var)
            if m.is_zero:
                continue
            quot, rem = divmod(m, g)
            if rem.is_zero and quot.coeff(1) == 0:
                continue  # m/g lies in the ring: not a falsifier
            k = rf_normalize(m, g)
            _verify_falsifier(rep, k)
            return CoprimenessVerdict(Coprimeness.NOT_WEAKLY_COPRIME, witness=k)
    # No falsifier found; a Bezout identity still settles it positively.
    cop = is_coprime_factorization(rep, bound)
    if cop.status is Coprimeness.COPRIME:
        return CoprimenessVerdict(Coprimeness.WEAKLY_COPRIME)
    return CoprimenessVerdict(Coprimeness.UNKNOWN_UP_TO_BOUND, bound=bound)


def _weak_stable_proper(rep: FractionRep) -> CoprimenessVerdict:
    """Weak coprimeness over stable-proper = no shared closed-RHP zero.

    Shared finite zeros show up as a non-Hurwitz gcd of the numerators;
    a shared zero at infinity means both components are strictly proper.
    Either defect yields a concrete falsifier built from (s+1) powers.
    """
    gam, th = rep.gamma, rep.theta
    var = th.var
    splus = Poly.make([1, 1], var)
    g = poly_gcd(gam.num, th.num)
    if not routh_hurwitz(g):
        k = rf_normalize(splus ** int(g.degree), g)
        _verify_falsifier(rep, k)
        return CoprimenessVerdict(Coprimeness.NOT_WEAKLY_COPRIME, witness=k)
    r_gam = _rel_deg(gam) if not gam.is_zero else None
    r_th = _rel_deg(th)
    if (r_gam is None or r_gam >= 1) and r_th >= 1:
        r = r_th if r_gam is None else min(r_gam, r_th)
        k = RatFunc.from_poly(splus ** r)
        _verify_falsifier(rep, k)
        return CoprimenessVerdict(Coprimeness.NOT_WEAKLY_COPRIME, witness=k)
    return CoprimenessVerdict(Coprimeness.WEAKLY_COPRIME)


def is_weakly_coprime(rep: FractionRep, bound: int = DEFAULT_BOUND) -> CoprimenessVerdict:
    """Is gamma/theta a weakly coprime factorization over its ring?

    A falsifier witness k satisfies: k*gamma and k*theta stable, k not
    stable.  Complete for ``poly`` and ``stable-proper``; bounded search for
    ``no-linear`` (with the coprime => weakly-coprime upgrade applied when a
    Bezout identity is found).
    """
    if rep.ring is RingId.POLY:
        return _weak_poly(rep)
    if rep.ring is RingId.NO_LINEAR:
        return _weak_no_linear(rep, bound)
    return _weak_stable_proper(rep)
