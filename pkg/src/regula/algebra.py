"""Exact univariate polynomial and rational-function arithmetic over Q.

Coefficients are arbitrary-precision `fractions.Fraction`, polynomials are
dense coefficient tuples, and rational functions are always kept in a
canonical reduced form (monic denominator, gcd(num, den) = 1).  Canonical
forms make equality of field elements coincide with structural equality,
which the rest of the package relies on when re-checking certificates.

Everything in this module is immutable and pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd as _int_gcd, lcm as _int_lcm
from typing import Iterable, Optional, Sequence, Union

#: Degree of the zero polynomial.
NEG_INF = float("-inf")

Scalar = Union[int, Fraction]


class VariableMismatch(ValueError):
    """Two expressions use different indeterminates."""


def _unify_var(a: "Poly", b: "Poly") -> str:
    """Common variable of two polynomials; constants adopt the other side's."""
    if a.var == b.var:
        return a.var
    if a.degree <= 0:
        return b.var
    if b.degree <= 0:
        return a.var
    raise VariableMismatch(f"cannot mix variables {a.var!r} and {b.var!r}")


@dataclass(frozen=True)
class Poly:
    """Dense univariate polynomial; ``coeffs[k]`` is the coefficient of ``var**k``.

    Invariant: the last coefficient is nonzero (the zero polynomial is the
    empty tuple).  Use :meth:`make` rather than the raw constructor.
    """

    coeffs: tuple[Fraction, ...]
    var: str = "x"

    @staticmethod
    def make(coeffs: Iterable[Scalar], var: str = "x") -> "Poly":
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        return Poly(tuple(cs), var)

    @staticmethod
    def zero(var: str = "x") -> "Poly":
        return Poly((), var)

    @staticmethod
    def one(var: str = "x") -> "Poly":
        return Poly.make([1], var)

    @staticmethod
    def const(c: Scalar, var: str = "x") -> "Poly":
        return Poly.make([c], var)

    @staticmethod
    def variable(var: str = "x") -> "Poly":
        return Poly.make([0, 1], var)

    # -- basic queries ----------------------------------------------------

    @property
    def degree(self) -> float:
        """Degree, with the zero polynomial at -inf."""
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    @property
    def lc(self) -> Fraction:
        """Leading coefficient (of the zero polynomial: 0)."""
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def monic(self) -> "Poly":
        if self.is_zero or self.lc == 1:
            return self
        return self.scale(1 / self.lc)

    def _as_var(self, var: str) -> "Poly":
        return self if self.var == var else Poly(self.coeffs, var)

    # -- arithmetic -------------------------------------------------------

    def __neg__(self) -> "Poly":
        return Poly(tuple(-c for c in self.coeffs), self.var)

    def __add__(self, other: "Poly") -> "Poly":
        var = _unify_var(self, other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly.make((self.coeff(i) + other.coeff(i) for i in range(n)), var)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: Union["Poly", Scalar]) -> "Poly":
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(other))
        var = _unify_var(self, other)
        if self.is_zero or other.is_zero:
            return Poly.zero(var)
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly.make(out, var)

    def __rmul__(self, other: Scalar) -> "Poly":
        return self.scale(Fraction(other))

    def scale(self, c: Scalar) -> "Poly":
        c = Fraction(c)
        if c == 0:
            return Poly.zero(self.var)
        return Poly(tuple(a * c for a in self.coeffs), self.var)

    def shift(self, k: int) -> "Poly":
        """Multiply by var**k."""
        if self.is_zero or k == 0:
            return self
        return Poly((Fraction(0),) * k + self.coeffs, self.var)

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = Poly.one(self.var)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __divmod__(self, other: "Poly") -> tuple["Poly", "Poly"]:
        var = _unify_var(self, other)
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        q = Poly.zero(var)
        r = self._as_var(var)
        d = other._as_var(var)
        while not r.is_zero and r.degree >= d.degree:
            k = int(r.degree - d.degree)
            c = r.lc / d.lc
            t = Poly.make([c], var).shift(k)
            q = q + t
            r = r - t * d
        return q, r

    def __floordiv__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[1]

    def div_exact(self, other: "Poly") -> "Poly":
        q, r = divmod(self, other)
        if not r.is_zero:
            raise ValueError(f"inexact polynomial division: remainder {r}")
        return q

    def __call__(self, point: Scalar) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * Fraction(point) + c
        return acc

    def __str__(self) -> str:  # debugging aid; canonical printing lives in expr
        if self.is_zero:
            return "0"
        return " + ".join(f"{c}*{self.var}^{k}" for k, c in enumerate(self.coeffs) if c != 0)


# -- gcd machinery ---------------------------------------------------------


def _int_primitive(p: Poly) -> list[int]:
    """Integer coefficient vector of ``p`` with content 1 and positive lc."""
    if p.is_zero:
        return []
    den = 1
    for c in p.coeffs:
        den = _int_lcm(den, c.denominator)
    nums = [int(c * den) for c in p.coeffs]
    g = 0
    for n in nums:
        g = _int_gcd(g, n)
    if nums[-1] < 0:
        g = -g
    return [n // g for n in nums]


def _int_pseudo_rem(a: list[int], b: list[int]) -> list[int]:
    """Pseudo-remainder of integer coefficient vectors (b nonzero)."""
    a = a[:]
    db, lb = len(b) - 1, b[-1]
    while a and len(a) - 1 >= db:
        la = a[-1]
        shift = len(a) - 1 - db
        a = [c * lb for c in a]
        for i, bc in enumerate(b):
            a[i + shift] -= la * bc
        while a and a[-1] == 0:
            a.pop()
    return a


def _int_prim_part(a: list[int]) -> list[int]:
    if not a:
        return a
    g = 0
    for n in a:
        g = _int_gcd(g, n)
    if a[-1] < 0:
        g = -g
    return [n // g for n in a]


def poly_gcd(p: Poly, q: Poly) -> Poly:
    """Monic gcd via a primitive pseudo-remainder sequence.

    Working over primitive integer vectors keeps intermediate coefficients
    from swelling the way naive rational Euclid does.  gcd(0, 0) = 0.
    """
    var = _unify_var(p, q)
    a, b = _int_primitive(p), _int_primitive(q)
    if len(a) < len(b):
        a, b = b, a
    while b:
        a, b = b, _int_prim_part(_int_pseudo_rem(a, b))
    return Poly.make(a, var).monic()


def poly_ext_gcd(p: Poly, q: Poly) -> tuple[Poly, Poly, Poly]:
    """Extended Euclid: returns (g, u, v) with u*p + v*q = g = monic gcd.

    The cofactors are degree-reduced: deg u < deg(q/g) whenever q/g is
    non-constant, which pins a unique minimal representative.
    """
    if p.is_zero and q.is_zero:
        raise ValueError("ext_gcd(0, 0) is undefined")
    var = _unify_var(p, q)
    r0, r1 = p._as_var(var), q._as_var(var)
    s0, s1 = Poly.one(var), Poly.zero(var)
    t0, t1 = Poly.zero(var), Poly.one(var)
    while not r1.is_zero:
        qq, rr = divmod(r0, r1)
        r0, r1 = r1, rr
        s0, s1 = s1, s0 - qq * s1
        t0, t1 = t1, t0 - qq * t1
    c = 1 / r0.lc
    g, u, v = r0.scale(c), s0.scale(c), t0.scale(c)
    qg = q._as_var(var)
    if not qg.is_zero:
        qg = qg.div_exact(g)
        if qg.degree > 0:
            u = u % qg
            v = (g - u * p._as_var(var)).div_exact(q._as_var(var))
    return g, u, v


# -- rational functions -----------------------------------------------------


@dataclass(frozen=True)
class RatFunc:
    """Reduced rational function: gcd(num, den) = 1 and den is monic.

    Construct through :func:`rf_normalize` (or the arithmetic operators);
    the raw constructor trusts its inputs.
    """

    num: Poly
    den: Poly

    @staticmethod
    def from_poly(p: Poly) -> "RatFunc":
        return RatFunc(p, Poly.one(p.var))

    @staticmethod
    def const(c: Scalar, var: str = "x") -> "RatFunc":
        return RatFunc.from_poly(Poly.const(c, var))

    @staticmethod
    def zero(var: str = "x") -> "RatFunc":
        return RatFunc.from_poly(Poly.zero(var))

    @staticmethod
    def one(var: str = "x") -> "RatFunc":
        return RatFunc.from_poly(Poly.one(var))

    @staticmethod
    def variable(var: str = "x") -> "RatFunc":
        return RatFunc.from_poly(Poly.variable(var))

    @property
    def var(self) -> str:
        return self.num.var if self.num.degree > 0 else self.den.var

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    @staticmethod
    def _coerce(value: Union["RatFunc", Poly, Scalar], var: str) -> "RatFunc":
        if isinstance(value, RatFunc):
            return value
        if isinstance(value, Poly):
            return RatFunc.from_poly(value)
        return RatFunc.const(value, var)

    def __add__(self, other) -> "RatFunc":
        o = RatFunc._coerce(other, self.var)
        return rf_normalize(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den)

    def __sub__(self, other) -> "RatFunc":
        return self + (-RatFunc._coerce(other, self.var))

    def __rsub__(self, other) -> "RatFunc":
        return RatFunc._coerce(other, self.var) + (-self)

    def __mul__(self, other) -> "RatFunc":
        o = RatFunc._coerce(other, self.var)
        return rf_normalize(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RatFunc":
        o = RatFunc._coerce(other, self.var)
        if o.is_zero:
            raise ZeroDivisionError("division by the zero rational function")
        return rf_normalize(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other) -> "RatFunc":
        return RatFunc._coerce(other, self.var) / self

    def inv(self) -> "RatFunc":
        return RatFunc.one(self.var) / self

    def __pow__(self, n: int) -> "RatFunc":
        if n < 0:
            return self.inv() ** (-n)
        f = RatFunc.one(self.var)
        base = self
        while n:
            if n & 1:
                f = f * base
            base = base * base
            n >>= 1
        return f

    def __str__(self) -> str:
        return f"({self.num})/({self.den})"


def rf_normalize(num: Poly, den: Poly) -> RatFunc:
    """Canonical representative of num/den: fully reduced, monic denominator."""
    var = _unify_var(num, den)
    if den.is_zero:
        raise ZeroDivisionError("zero denominator")
    if num.is_zero:
        return RatFunc(Poly.zero(var), Poly.one(var))
    g = poly_gcd(num, den)
    if g.degree > 0:
        num = num._as_var(var).div_exact(g)
        den = den._as_var(var).div_exact(g)
    else:
        num, den = num._as_var(var), den._as_var(var)
    c = 1 / den.lc
    return RatFunc(num.scale(c), den.scale(c))


# -- exact linear algebra ----------------------------------------------------


def solve_linear_system(
    rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]
) -> Optional[list[Fraction]]:
    """One exact solution of rows*x = rhs with free variables set to 0.

    Returns None when the system is inconsistent.
    """
    m = [list(row) + [r] for row, r in zip(rows, rhs)]
    ncols = len(rows[0]) if rows else 0
    pivots: list[tuple[int, int]] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append((r, c))
        r += 1
        if r == len(m):
            break
    for i in range(r, len(m)):
        if m[i][-1] != 0:
            return None
    x = [Fraction(0)] * ncols
    for row, col in pivots:
        x[col] = m[row][-1]
    return x


def nullspace_basis(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[list[Fraction]]:
    """Basis of the nullspace of the homogeneous system rows*x = 0."""
    m = [list(row) for row in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    basis = []
    free = [c for c in range(ncols) if c not in pivots]
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for row, pc in enumerate(pivots):
            vec[pc] = -m[row][fc]
        basis.append(vec)
    return basis
