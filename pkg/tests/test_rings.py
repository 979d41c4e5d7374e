"""Stability rings: membership, Routh-Hurwitz, representations, Bezout solvers."""

import random
from fractions import Fraction

import numpy as np
import pytest

from regula.algebra import Poly, RatFunc, rf_normalize
from regula.expr import parse_expr
from regula.rings import (
    Coprimeness,
    FractionRep,
    RingId,
    SolveStatus,
    bezout_solve,
    is_coprime_factorization,
    is_stable,
    is_weakly_coprime,
    routh_hurwitz,
    to_ring_fraction,
)


def rf(src, var="x"):
    return parse_expr(src, var)


class TestRouthHurwitz:
    def test_first_order(self):
        assert routh_hurwitz(Poly.make([1, 1], "s"))

    def test_imaginary_axis(self):
        assert not routh_hurwitz(Poly.make([1, 0, 1], "s"))

    def test_sign_change_in_array(self):
        # s^3 + s^2 + 2s + 8: first column picks up 2 - 8 < 0
        assert not routh_hurwitz(Poly.make([8, 2, 1, 1], "s"))

    def test_all_negative_coefficients(self):
        assert routh_hurwitz(Poly.make([-1, -1], "s"))

    def test_constant(self):
        assert routh_hurwitz(Poly.make([5], "s"))

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            routh_hurwitz(Poly.zero("s"))

    def test_numeric_root_oracle_agreement(self):
        rng = random.Random(20260809)
        checked = 0
        while checked < 200:
            deg = rng.randint(1, 6)
            coeffs = [rng.randint(-9, 9) for _ in range(deg)] + [rng.randint(1, 9)]
            roots = np.roots(list(reversed(coeffs)))
            margin = max(abs(r.real) for r in roots) if len(roots) else 1.0
            if len(roots) and min(abs(r.real) for r in roots) < 1e-6 * max(1.0, margin):
                continue  # numerically boundary case: the float oracle is blind here
            oracle = all(r.real < 0 for r in roots)
            assert routh_hurwitz(Poly.make(coeffs, "s")) == oracle
            checked += 1


class TestIsStable:
    def test_no_linear_paper_product(self):
        assert is_stable(RingId.NO_LINEAR, rf("(x^4+x^2+1)/2"))

    def test_no_linear_rejects_linear_term(self):
        assert not is_stable(RingId.NO_LINEAR, rf("x"))

    def test_stable_proper(self):
        assert is_stable(RingId.STABLE_PROPER, rf("1/(s+1)", "s"))
        assert not is_stable(RingId.STABLE_PROPER, rf("s", "s"))
        assert not is_stable(RingId.STABLE_PROPER, rf("1/(s-1)", "s"))

    def test_poly(self):
        assert is_stable(RingId.POLY, rf("x^3-1"))
        assert not is_stable(RingId.POLY, rf("1/(x-1)"))

    def test_zero_everywhere(self):
        for ring in RingId:
            assert is_stable(ring, RatFunc.zero(ring.default_variable))


class TestToRingFraction:
    def test_no_linear_spec_example(self):
        rep = to_ring_fraction(RingId.NO_LINEAR, rf("1/(x-1)"))
        assert rep.gamma == rf("x^2")
        assert rep.theta == rf("x^3-x^2")

    def test_poly_passthrough(self):
        rep = to_ring_fraction(RingId.POLY, rf("(x+1)/(x^2+1)"))
        assert rep.gamma == rf("x+1")
        assert rep.theta == rf("x^2+1")

    def test_stable_proper(self):
        rep = to_ring_fraction(RingId.STABLE_PROPER, rf("s^2/(s-1)", "s"))
        assert rep.gamma == rf("s^2/(s+1)^2", "s")
        assert rep.theta == rf("(s-1)/(s+1)^2", "s")

    def test_zero(self):
        rep = to_ring_fraction(RingId.NO_LINEAR, RatFunc.zero("x"))
        assert rep.gamma.is_zero and rep.theta == RatFunc.one("x")

    def test_cancellation_keeps_components_in_ring(self):
        rep = to_ring_fraction(RingId.NO_LINEAR, rf("x^2"))
        assert rep.gamma == rf("x^2") and rep.theta == RatFunc.one("x")

    @pytest.mark.parametrize(
        "ring,src,var",
        [
            (RingId.POLY, "(x^3-1)/(x^2-1)", "x"),
            (RingId.NO_LINEAR, "(x^3-1)/(x^2-1)", "x"),
            (RingId.NO_LINEAR, "(x^2+x)/(x^3+2)", "x"),
            (RingId.STABLE_PROPER, "(s^3+2)/(s^2-4)", "s"),
        ],
    )
    def test_value_and_membership(self, ring, src, var):
        f = rf(src, var)
        rep = to_ring_fraction(ring, f)
        assert rep.gamma / rep.theta == f
        assert is_stable(ring, rep.gamma) and is_stable(ring, rep.theta)

    def test_invalid_rep_rejected(self):
        with pytest.raises(ValueError):
            FractionRep(rf("x"), RatFunc.one("x"), RingId.NO_LINEAR)
        with pytest.raises(ValueError):
            FractionRep(rf("x^2"), RatFunc.zero("x"), RingId.NO_LINEAR)


class TestBezout:
    def test_poly_spec_example(self):
        res = bezout_solve(RingId.POLY, rf("x^2-1"), rf("x^3-1"), rf("x-1"))
        assert res.status is SolveStatus.SOLVED
        assert res.alpha == rf("-x") and res.beta == rf("-1")

    def test_poly_unsolvable(self):
        res = bezout_solve(RingId.POLY, rf("x^2-1"), rf("x^3-1"), RatFunc.one("x"))
        assert res.status is SolveStatus.UNSOLVABLE

    def test_unit_u(self):
        for ring in RingId:
            var = ring.default_variable
            w = RatFunc.const(Fraction(3, 2), var)
            res = bezout_solve(ring, RatFunc.one(var), RatFunc.zero(var), w)
            assert res.status is SolveStatus.SOLVED
            assert res.alpha == w and res.beta.is_zero

    def test_no_linear_paper_instance(self):
        # alpha*(x^5-x^2+2) - beta*(x^3-1)/2 = 1 has the witness (1/2, x^2)
        res = bezout_solve(
            RingId.NO_LINEAR, rf("x^5-x^2+2"), rf("(x^3-1)/2"), RatFunc.one("x")
        )
        assert res.status is SolveStatus.SOLVED
        assert res.alpha == rf("1/2")
        assert res.beta == rf("x^2")

    def test_no_linear_unknown_within_budget(self):
        # alpha*x^2 - beta*x^3 = 1 is unsolvable (x divides the left side),
        # but the bounded search cannot prove that: it must answer "unknown"
        res = bezout_solve(RingId.NO_LINEAR, rf("x^2"), rf("x^3"), RatFunc.one("x"), bound=6)
        assert res.status is SolveStatus.UNKNOWN

    def test_stable_proper_integrator(self):
        theta = rf("s/(s+1)", "s")
        p = rf("1/(s+1)", "s")
        res = bezout_solve(RingId.STABLE_PROPER, theta, p, RatFunc.one("s"))
        assert res.status is SolveStatus.SOLVED
        assert res.alpha == RatFunc.one("s")
        assert res.beta == rf("-1", "s")

    def test_stable_proper_unsolvable_common_zero(self):
        # u and v share the closed-RHP zero s = 1; w = 1 cannot be reached
        u = rf("(s-1)/(s+1)", "s")
        v = rf("(s-1)/(s+2)", "s")
        res = bezout_solve(RingId.STABLE_PROPER, u, v, RatFunc.one("s"))
        assert res.status is SolveStatus.UNSOLVABLE

    def test_stable_proper_unsolvable_at_infinity(self):
        u = rf("1/(s+1)", "s")
        v = rf("1/(s+1)^2", "s")
        res = bezout_solve(RingId.STABLE_PROPER, u, v, RatFunc.one("s"))
        assert res.status is SolveStatus.UNSOLVABLE

    def test_stable_proper_hurwitz_common_factor_is_unit(self):
        u = rf("(s+2)/(s+1)", "s")
        v = u
        res = bezout_solve(RingId.STABLE_PROPER, u, v, RatFunc.one("s"))
        assert res.status is SolveStatus.SOLVED
        assert res.alpha * u - res.beta * v == RatFunc.one("s")

    def test_stable_proper_denominators_beyond_splus(self):
        # solvable only with a denominator carrying (s+2)(s+3) factors
        u = rf("(s+2)/(s+1)", "s")
        w = rf("1/(s+3)", "s")
        res = bezout_solve(RingId.STABLE_PROPER, u, RatFunc.zero("s"), w)
        assert res.status is SolveStatus.SOLVED
        assert res.alpha == rf("(s+1)/((s+2)*(s+3))", "s")

    @pytest.mark.parametrize("seed", range(5))
    def test_stable_proper_random_solved_reverify(self, seed):
        rng = random.Random(seed)

        def rand_stable():
            k = rng.randint(0, 3)
            num = Poly.make([rng.randint(-4, 4) for _ in range(k + 1)], "s")
            return rf_normalize(num, Poly.make([1, 1], "s") ** k)

        u, v, w = rand_stable(), rand_stable(), rand_stable()
        if u.is_zero and v.is_zero:
            return
        res = bezout_solve(RingId.STABLE_PROPER, u, v, w)
        if res.status is SolveStatus.SOLVED:
            assert res.alpha * u - res.beta * v == w
            assert is_stable(RingId.STABLE_PROPER, res.alpha)
            assert is_stable(RingId.STABLE_PROPER, res.beta)


class TestCoprimeness:
    def test_poly_not_coprime(self):
        rep = FractionRep(rf("x^3-1"), rf("x^2-1"), RingId.POLY)
        assert is_coprime_factorization(rep).status is Coprimeness.NOT_COPRIME

    def test_no_linear_coprime(self):
        rep = FractionRep(rf("x^2"), rf("x^2-1"), RingId.NO_LINEAR)
        verdict = is_coprime_factorization(rep)
        assert verdict.status is Coprimeness.COPRIME
        assert verdict.alpha * rep.gamma - verdict.beta * rep.theta == RatFunc.one("x")
        assert is_stable(RingId.NO_LINEAR, verdict.alpha)
        assert is_stable(RingId.NO_LINEAR, verdict.beta)

    def test_stable_proper_coprime(self):
        theta = rf("s/(s+1)", "s")
        rep = FractionRep(theta - 1, theta, RingId.STABLE_PROPER)
        verdict = is_coprime_factorization(rep)
        assert verdict.status is Coprimeness.COPRIME
        assert verdict.alpha * rep.gamma - verdict.beta * rep.theta == RatFunc.one("s")

    def test_weak_no_linear_falsifier(self):
        rep = FractionRep(rf("x^3-1"), rf("x^2-1"), RingId.NO_LINEAR)
        verdict = is_weakly_coprime(rep)
        assert verdict.status is Coprimeness.NOT_WEAKLY_COPRIME
        k = verdict.witness
        assert k == rf("x^2/(x-1)")
        assert is_stable(RingId.NO_LINEAR, k * rep.gamma)
        assert is_stable(RingId.NO_LINEAR, k * rep.theta)
        assert not is_stable(RingId.NO_LINEAR, k)

    def test_weak_poly(self):
        assert (
            is_weakly_coprime(FractionRep(rf("x^2"), rf("x^2-1"), RingId.POLY)).status
            is Coprimeness.WEAKLY_COPRIME
        )
        verdict = is_weakly_coprime(FractionRep(rf("x^2-1"), rf("x^3-1"), RingId.POLY))
        assert verdict.status is Coprimeness.NOT_WEAKLY_COPRIME
        assert verdict.witness == rf("1/(x-1)")

    def test_weak_stable_proper_shared_infinity(self):
        rep = FractionRep(rf("1/(s+1)", "s"), rf("1/(s+2)", "s"), RingId.STABLE_PROPER)
        verdict = is_weakly_coprime(rep)
        assert verdict.status is Coprimeness.NOT_WEAKLY_COPRIME

    def test_weak_stable_proper_shared_unstable_zero(self):
        rep = FractionRep(
            rf("(s-1)/(s+1)", "s"), rf("(s-1)/(s+2)", "s"), RingId.STABLE_PROPER
        )
        verdict = is_weakly_coprime(rep)
        assert verdict.status is Coprimeness.NOT_WEAKLY_COPRIME

    def test_weak_stable_proper_positive(self):
        rep = FractionRep(rf("1/(s+1)", "s"), rf("s/(s+1)", "s"), RingId.STABLE_PROPER)
        assert is_weakly_coprime(rep).status is Coprimeness.WEAKLY_COPRIME

    def test_no_linear_unit_numerator_weakly_coprime(self):
        rep = FractionRep(RatFunc.one("x"), rf("x^5-x^2+2"), RingId.NO_LINEAR)
        assert is_weakly_coprime(rep).status is Coprimeness.WEAKLY_COPRIME

    @pytest.mark.parametrize(
        "ring,gamma,theta",
        [
            (RingId.POLY, "x^2", "x^2-1"),
            (RingId.POLY, "x^3-1", "x^2-1"),
            (RingId.NO_LINEAR, "x^2", "x^2-1"),
            (RingId.STABLE_PROPER, "1/(s+1)", "s/(s+1)"),
        ],
    )
    def test_coprime_implies_weakly_coprime(self, ring, gamma, theta):
        var = ring.default_variable
        rep = FractionRep(rf(gamma, var), rf(theta, var), ring)
        cop = is_coprime_factorization(rep).status
        weak = is_weakly_coprime(rep).status
        if cop is Coprimeness.COPRIME:
            assert weak is Coprimeness.WEAKLY_COPRIME
