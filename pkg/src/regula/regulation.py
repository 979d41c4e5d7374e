"""Regulation tests, internal-model certificates, and robust synthesis.

A fixed signal generator produces every reference and disturbance as a
stable multiple of one field element.  A stabilizing controller regulates
when the generator-weighted sensitivity entries stay in the ring, and for
SISO loops that is already robust: the controller then regulates every
plant it stabilizes.  Each operation here returns or consumes explicit
witnesses (alpha, beta, q1, q2) whose defining identities re-verify by
exact arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .algebra import RatFunc
from .feedback import (
    StabilizingPair,
    check_pair,
    closed_loop,
    parametrize_stabilizing,
    stabilizes,
    synthesize_stabilizing,
)
from .rings import (
    DEFAULT_BOUND,
    Coprimeness,
    CoprimenessVerdict,
    FractionRep,
    RingId,
    SolveStatus,
    bezout_solve,
    is_coprime_factorization,
    is_stable,
    is_weakly_coprime,
    to_ring_fraction,
)


class NotRegulating(ValueError):
    """A (robustly) regulating controller was required."""


class PreconditionFailed(ValueError):
    """An operation's input contract was violated."""


@dataclass(frozen=True)
class Generator:
    """A signal generator together with a chosen fractional representation."""

    value: RatFunc
    rep: FractionRep
    weak_coprime_status: CoprimenessVerdict

    @property
    def is_weakly_coprime(self) -> bool:
        return self.weak_coprime_status.status is Coprimeness.WEAKLY_COPRIME


def make_generator(
    ring: RingId,
    value: RatFunc,
    rep: Optional[FractionRep] = None,
    bound: int = DEFAULT_BOUND,
) -> Generator:
    if rep is None:
        rep = to_ring_fraction(ring, value)
    elif rep.value != value:
        raise ValueError("fractional representation does not match the generator value")
    return Generator(value, rep, is_weakly_coprime(rep, bound))


class CertKind(Enum):
    INTERNAL_MODEL = "internal-model"  # generator = alpha + beta*c
    DENOMINATOR_MODEL = "denominator-model"  # theta*(alpha + beta*c) = 1
    SOLVABILITY = "solvability"  # alpha/Theta - beta*(b+q1*a^2+q2*b^2)*p = 1


@dataclass(frozen=True)
class RegulationCertificate:
    kind: CertKind
    alpha: RatFunc
    beta: RatFunc
    q1: Optional[RatFunc] = None
    q2: Optional[RatFunc] = None


class Solvability(Enum):
    SOLVABLE = "solvable"
    NOT_SOLVABLE = "not-solvable"
    NOT_STABILIZABLE = "not-stabilizable"
    UNKNOWN = "unknown-within-budget"


@dataclass(frozen=True)
class SolvabilityResult:
    status: Solvability
    pair: Optional[StabilizingPair] = None
    certificate: Optional[RegulationCertificate] = None
    note: str = ""


@dataclass(frozen=True)
class StablePlantResult:
    status: SolveStatus
    controller: Optional[RatFunc] = None
    alpha: Optional[RatFunc] = None
    beta: Optional[RatFunc] = None


@dataclass(frozen=True)
class SynthesisResult:
    status: Solvability
    controller: Optional[RatFunc] = None
    pair: Optional[StabilizingPair] = None
    certificate: Optional[RegulationCertificate] = None
    note: str = ""


@dataclass(frozen=True)
class CoprimeRegulationResult:
    regulating: bool
    z: Optional[RatFunc] = None
    delta: Optional[RatFunc] = None


@dataclass(frozen=True)
class LiftLowerResult:
    controller: RatFunc
    ok: bool
    failing: Optional[str] = None


@dataclass(frozen=True)
class WeakSolvabilityResult:
    status: Solvability
    alpha: Optional[RatFunc] = None
    beta: Optional[RatFunc] = None
    controller: Optional[RatFunc] = None


# -- regulation tests ----------------------------------------------------------


def is_regulating(ring: RingId, p: RatFunc, c: RatFunc, gen: Generator) -> bool:
    """Do Theta/(1-p*c) and Theta*p/(1-p*c) both stay in the ring?"""
    loop = closed_loop(p, c)
    theta_sens = gen.value * loop.h11
    theta_comp = gen.value * loop.h12
    return is_stable(ring, theta_sens) and is_stable(ring, theta_comp)


def is_robustly_regulating(ring: RingId, p: RatFunc, c: RatFunc, gen: Generator) -> bool:
    """Stabilizing + regulating; for SISO loops that is already robust."""
    return stabilizes(ring, p, c) and is_regulating(ring, p, c, gen)


def regulation_witness(
    ring: RingId, p: RatFunc, c: RatFunc, gen: Generator
) -> RegulationCertificate:
    """Internal-model witnesses: stable alpha, beta with Theta = alpha + beta*c."""
    if not is_robustly_regulating(ring, p, c, gen):
        raise NotRegulating("controller is not robustly regulating for this generator")
    h11 = closed_loop(p, c).h11
    alpha = gen.value * h11
    beta = -(gen.value * p * h11)
    assert is_stable(ring, alpha) and is_stable(ring, beta)
    assert (gen.value - (alpha + beta * c)).is_zero
    return RegulationCertificate(CertKind.INTERNAL_MODEL, alpha, beta)


def check_denominator_model(
    ring: RingId, c: RatFunc, theta: RatFunc, bound: int = DEFAULT_BOUND
) -> tuple[SolveStatus, Optional[RegulationCertificate]]:
    """Witnesses for theta*(alpha + beta*c) = 1, the single-element model.

    Solving the identity cleared by a representation c = gamma_c/theta_c;
    the emitted certificate is re-verified against the original fractional
    form.  Complete for poly/stable-proper, budget-bounded for no-linear.
    """
    if theta.is_zero or not is_stable(ring, theta):
        raise ValueError("theta must be a nonzero stable element")
    rep_c = to_ring_fraction(ring, c)
    u = theta * rep_c.theta
    v = -(theta * rep_c.gamma)
    w = rep_c.theta
    result = bezout_solve(ring, u, v, w, bound)
    if result.status is not SolveStatus.SOLVED:
        return result.status, None
    alpha, beta = result.alpha, result.beta
    assert (theta * (alpha + beta * c) - 1).is_zero
    return SolveStatus.SOLVED, RegulationCertificate(CertKind.DENOMINATOR_MODEL, alpha, beta)


# -- synthesis -----------------------------------------------------------------


def solve_stable_plant(
    ring: RingId, p_stable: RatFunc, gen: Generator, bound: int = DEFAULT_BOUND
) -> StablePlantResult:
    """Robust regulator for a stable plant, via alpha/Theta - beta*p = 1.

    The identity is solved after clearing the generator's denominators;
    when the solver lands on alpha = 0 the witnesses are repaired with
    alpha <- gamma, beta <- (1 - theta)*beta, which preserves the identity.
    """
    if not is_stable(ring, p_stable):
        raise PreconditionFailed("plant is not stable in the ring")
    var = p_stable.var
    if gen.value.is_zero:
        return StablePlantResult(SolveStatus.SOLVED, RatFunc.zero(var))
    gamma, theta = gen.rep.gamma, gen.rep.theta
    result = bezout_solve(ring, theta, p_stable * gamma, gamma, bound)
    if result.status is not SolveStatus.SOLVED:
        return StablePlantResult(result.status)
    alpha, beta = result.alpha, result.beta
    if alpha.is_zero:
        alpha, beta = gamma, (1 - theta) * beta
    assert (alpha * gen.value.inv() - beta * p_stable - 1).is_zero
    controller = (beta / alpha) * gen.value
    assert is_robustly_regulating(ring, p_stable, controller, gen)
    return StablePlantResult(SolveStatus.SOLVED, controller, alpha, beta)


def compose_regulator(
    ring: RingId,
    p: RatFunc,
    c: RatFunc,
    pair: StabilizingPair,
    c_inner: RatFunc,
) -> RatFunc:
    """c*(1 + c_inner): stabilizing for p, robustly regulating when c_inner is
    a robust regulator of the stable plant b*p."""
    if not check_pair(ring, p, pair.a, pair.b) or pair.controller != c:
        raise PreconditionFailed("pair is not a valid certificate for c against p")
    if not stabilizes(ring, pair.b * p, c_inner):
        raise PreconditionFailed("inner controller does not stabilize b*p")
    return c * (1 + c_inner)


def _q_grid(ring: RingId, var: str, max_degree: int):
    """Deterministic sweep values for the solvability search: monomials of
    degree <= max_degree with coefficients in {-1, 1} (plus zero)."""
    values = [RatFunc.zero(var)]
    for deg in range(max_degree + 1):
        if ring is RingId.NO_LINEAR and deg == 1:
            continue
        if ring is RingId.STABLE_PROPER:
            mono = RatFunc.one(var) / (RatFunc.variable(var) + 1) ** deg
        else:
            mono = RatFunc.from_poly(RatFunc.variable(var).num ** deg)
        values.extend([mono, -mono])
    return values


def solvability(
    ring: RingId,
    p: RatFunc,
    gen: Generator,
    bound: int = DEFAULT_BOUND,
    grid_degree: int = 4,
) -> SolvabilityResult:
    """Decide solvability of the robust regulation problem, with witnesses.

    Pipeline: obtain a stabilizing pair; try the base identity
    alpha/Theta - beta*b*p = 1; for weakly coprime generators fall back to
    the complete single-identity test alpha*theta - beta*p = 1; finally
    sweep (q1, q2) over a bounded monomial grid.  Failures of the bounded
    searches are reported as unknown, never as nonexistence.
    """
    var = p.var
    if gen.value.is_zero:
        synth = synthesize_stabilizing(ring, p, bound)
        if synth is None:
            return SolvabilityResult(Solvability.UNKNOWN, note="no stabilizing pair within budget")
        cert = RegulationCertificate(
            CertKind.SOLVABILITY,
            RatFunc.zero(var),
            RatFunc.zero(var),
            RatFunc.zero(var),
            RatFunc.zero(var),
        )
        return SolvabilityResult(Solvability.SOLVABLE, synth[1], cert, note="zero generator")
    if p.is_zero:
        # the identity collapses to alpha/Theta = 1 regardless of (q1, q2)
        pair = StabilizingPair(RatFunc.one(var), RatFunc.zero(var), ring)
        if is_stable(ring, gen.value):
            cert = RegulationCertificate(
                CertKind.SOLVABILITY, gen.value, RatFunc.zero(var),
                RatFunc.zero(var), RatFunc.zero(var),
            )
            return SolvabilityResult(Solvability.SOLVABLE, pair, cert)
        return SolvabilityResult(Solvability.NOT_SOLVABLE, pair,
                                 note="unstable generator against the zero plant")
    synth = synthesize_stabilizing(ring, p, bound)
    if synth is None:
        return SolvabilityResult(Solvability.UNKNOWN, note="no stabilizing pair within budget")
    _, pair = synth
    a, b = pair.a, pair.b
    gamma, theta = gen.rep.gamma, gen.rep.theta
    zero = RatFunc.zero(var)

    def attempt(q1: RatFunc, q2: RatFunc) -> Optional[RegulationCertificate]:
        b_shift = b + q1 * a * a + q2 * b * b
        a_shift = a + q1 * p * a * a + q2 * p * b * b
        if a_shift.is_zero:
            return None
        result = bezout_solve(ring, theta, b_shift * p * gamma, gamma, bound)
        if result.status is not SolveStatus.SOLVED:
            return None
        alpha, beta = result.alpha, result.beta
        assert (alpha * gen.value.inv() - beta * b_shift * p - 1).is_zero
        return RegulationCertificate(CertKind.SOLVABILITY, alpha, beta, q1, q2)

    cert = attempt(zero, zero)
    if cert is not None:
        return SolvabilityResult(Solvability.SOLVABLE, pair, cert)

    if gen.is_weakly_coprime:
        rep_p = to_ring_fraction(ring, p)
        result = bezout_solve(ring, theta * rep_p.theta, rep_p.gamma, rep_p.theta, bound)
        if result.status is SolveStatus.SOLVED:
            alpha, beta = result.alpha, result.beta
            if alpha.is_zero:  # shift along the homogeneous direction
                alpha = alpha + rep_p.gamma
                beta = beta + theta * rep_p.theta
            assert (alpha * theta - beta * p - 1).is_zero
            a_new = alpha * theta * a
            b_new = beta + alpha * theta * b
            pair_new = StabilizingPair(a_new, b_new, ring)
            assert check_pair(ring, p, a_new, b_new)
            alpha7 = alpha * a * gamma
            beta7 = RatFunc.one(var)
            assert (alpha7 * gen.value.inv() - beta7 * b_new * p - 1).is_zero
            cert = RegulationCertificate(CertKind.SOLVABILITY, alpha7, beta7, zero, zero)
            return SolvabilityResult(Solvability.SOLVABLE, pair_new, cert)
        if result.status is SolveStatus.UNSOLVABLE:
            return SolvabilityResult(
                Solvability.NOT_SOLVABLE, pair,
                note="no stable solution of alpha*theta - beta*p = 1 "
                     "(complete test for weakly coprime generators)",
            )

    grid = _q_grid(ring, var, grid_degree)
    for q1 in grid:
        for q2 in grid:
            if q1.is_zero and q2.is_zero:
                continue
            cert = attempt(q1, q2)
            if cert is not None:
                return SolvabilityResult(Solvability.SOLVABLE, pair, cert)
    return SolvabilityResult(Solvability.UNKNOWN, pair, note="budget exhausted")


def solvability_weakly_coprime(
    ring: RingId, p: RatFunc, gen: Generator, bound: int = DEFAULT_BOUND
) -> WeakSolvabilityResult:
    """Complete solvability test for weakly coprime generators.

    Decides the single identity alpha*theta - beta*p = 1 and, on success,
    also returns the explicit robust regulator (beta + alpha*theta*b) /
    (alpha*theta*a) built from any stabilizing pair of p.
    """
    if not gen.is_weakly_coprime:
        raise PreconditionFailed("generator representation is not weakly coprime")
    var = p.var
    theta = gen.rep.theta
    rep_p = to_ring_fraction(ring, p)
    result = bezout_solve(ring, theta * rep_p.theta, rep_p.gamma, rep_p.theta, bound)
    if result.status is SolveStatus.UNSOLVABLE:
        return WeakSolvabilityResult(Solvability.NOT_SOLVABLE)
    if result.status is SolveStatus.UNKNOWN:
        return WeakSolvabilityResult(Solvability.UNKNOWN)
    alpha, beta = result.alpha, result.beta
    if alpha.is_zero:
        alpha = alpha + rep_p.gamma
        beta = beta + theta * rep_p.theta
    assert (alpha * theta - beta * p - 1).is_zero
    synth = synthesize_stabilizing(ring, p, bound)
    if synth is None:
        return WeakSolvabilityResult(Solvability.UNKNOWN, alpha, beta)
    _, pair = synth
    controller = (beta + alpha * theta * pair.b) / (alpha * theta * pair.a)
    assert is_robustly_regulating(ring, p, controller, gen)
    return WeakSolvabilityResult(Solvability.SOLVABLE, alpha, beta, controller)


def synthesize_robust(
    ring: RingId,
    p: RatFunc,
    gen: Generator,
    bound: int = DEFAULT_BOUND,
    grid_degree: int = 4,
) -> SynthesisResult:
    """Full pipeline: solvability witnesses -> stabilizing controller at the
    witness point -> robust regulator of the stable inner plant -> composed
    robust regulator.  The output re-verifies before it is returned."""
    sv = solvability(ring, p, gen, bound, grid_degree)
    if sv.status is not Solvability.SOLVABLE:
        return SynthesisResult(sv.status, pair=sv.pair, note=sv.note)
    pair, cert = sv.pair, sv.certificate
    var = p.var
    if gen.value.is_zero:
        controller = pair.controller if not pair.a.is_zero else RatFunc.zero(var)
        return SynthesisResult(Solvability.SOLVABLE, controller, pair, cert, sv.note)
    controller = parametrize_stabilizing(ring, p, pair, cert.q1, cert.q2)
    b_shift = pair.b + cert.q1 * pair.a ** 2 + cert.q2 * pair.b ** 2
    a_shift = pair.a + cert.q1 * p * pair.a ** 2 + cert.q2 * p * pair.b ** 2
    pair_shift = StabilizingPair(a_shift, b_shift, ring)
    inner_plant = b_shift * p
    alpha, beta = cert.alpha, cert.beta
    if alpha.is_zero:
        alpha = gen.rep.gamma
        beta = (1 - gen.rep.theta) * beta
        assert (alpha * gen.value.inv() - beta * inner_plant - 1).is_zero
    c_inner = (beta / alpha) * gen.value
    assert is_robustly_regulating(ring, inner_plant, c_inner, gen)
    c_r = compose_regulator(ring, p, controller, pair_shift, c_inner)
    assert is_robustly_regulating(ring, p, c_r, gen)
    return SynthesisResult(Solvability.SOLVABLE, c_r, pair_shift, cert)


# -- structure of the robust regulator set -------------------------------------


def _unit_of_ring(ring: RingId, u: RatFunc) -> bool:
    if u.is_zero:
        return False
    if ring in (RingId.POLY, RingId.NO_LINEAR):
        return u.num.degree == 0 and u.is_polynomial
    return is_stable(ring, u) and is_stable(ring, u.inv())


def check_coprime_regulation(
    ring: RingId,
    plant_rep: FractionRep,
    controller_rep: FractionRep,
    gen: Generator,
    bound: int = DEFAULT_BOUND,
) -> CoprimeRegulationResult:
    """For coprime plant and controller representations, robust regulation is
    equivalent to x*Theta being stable, where x is the controller's
    denominator.  Returns z = x*Theta and, when the generator representation
    is itself coprime, the cofactor delta with x = delta*theta."""
    for name, rep in (("plant", plant_rep), ("controller", controller_rep)):
        verdict = is_coprime_factorization(rep, bound)
        if verdict.status is not Coprimeness.COPRIME:
            raise PreconditionFailed(f"{name} representation is not verified coprime")
    n, d = plant_rep.gamma, plant_rep.theta
    y, x = controller_rep.gamma, controller_rep.theta
    unit = d * x - n * y
    if not _unit_of_ring(ring, unit):
        raise PreconditionFailed("d*x - n*y is not a unit: controller does not stabilize")
    z = x * gen.value
    if not is_stable(ring, z):
        return CoprimeRegulationResult(False)
    delta = None
    gen_cop = is_coprime_factorization(gen.rep, bound)
    if gen_cop.status is Coprimeness.COPRIME:
        if gen.rep.gamma.is_zero:
            delta = x / gen.rep.theta
        else:
            # from alpha*gamma - beta*theta = 1: delta = z*alpha - x*beta
            delta = z * gen_cop.alpha - x * gen_cop.beta
        assert is_stable(ring, delta)
        assert (delta * gen.rep.theta - x).is_zero
    return CoprimeRegulationResult(True, z, delta)


def _loop_report(ring: RingId, p: RatFunc, c: RatFunc, gen: Optional[Generator]) -> Optional[str]:
    """Name of the first failing closed-loop (or regulation) entry, if any."""
    den = 1 - p * c
    if den.is_zero:
        return "singular loop (1 - p*c = 0)"
    loop = closed_loop(p, c)
    for name, entry in zip(("h11", "h12", "h21", "h22"), loop.entries()):
        if not is_stable(ring, entry):
            return f"{name} unstable"
    if gen is not None:
        if not is_stable(ring, gen.value * loop.h11):
            return "generator/(1 - p*c) unstable"
        if not is_stable(ring, gen.value * loop.h12):
            return "generator*p/(1 - p*c) unstable"
    return None


def lift_lower(
    ring: RingId,
    controller: RatFunc,
    theta: RatFunc,
    direction: str,
    p: RatFunc,
    bound: int = DEFAULT_BOUND,
) -> LiftLowerResult:
    """Move between robust regulators of p and stabilizers of p/theta.

    ``lower``: given a robust regulator c, return c0 = theta*c and check it
    stabilizes p/theta.  ``lift``: given c0 stabilizing p/theta, return
    c = c0/theta and check it is robustly regulating for the generator
    1/theta.  Failures are reported with the failing entry, not raised.
    """
    if theta.is_zero or not is_stable(ring, theta):
        raise ValueError("theta must be a nonzero stable element")
    p0 = p / theta
    if direction == "lower":
        c0 = theta * controller
        failing = _loop_report(ring, p0, c0, None)
        return LiftLowerResult(c0, failing is None, failing)
    if direction == "lift":
        c = controller / theta
        gen = make_generator(ring, theta.inv(),
                             FractionRep(RatFunc.one(theta.var), theta, ring), bound)
        failing = _loop_report(ring, p, c, gen)
        return LiftLowerResult(c, failing is None, failing)
    raise ValueError("direction must be 'lift' or 'lower'")


def parametrize_all_robust(
    ring: RingId,
    p: RatFunc,
    c_robust: RatFunc,
    gen: Generator,
    q1: RatFunc,
    q2: RatFunc,
) -> RatFunc:
    """The two-parameter family of all robust regulators through one of them.

    With a = 1/(1-p*c), b = theta*c*a the family is
    (b + q1*a^2 + q2*b^2) / (theta*a + q1*a^2*p + q2*b^2*p); q1 = q2 = 0
    returns c itself.  Requires a weakly coprime generator representation.
    """
    if not gen.is_weakly_coprime:
        raise PreconditionFailed("generator representation is not weakly coprime")
    if not is_robustly_regulating(ring, p, c_robust, gen):
        raise PreconditionFailed("base controller is not robustly regulating")
    for name, q in (("q1", q1), ("q2", q2)):
        if not is_stable(ring, q):
            raise ValueError(f"{name} is not stable in {ring.value}")
    theta = gen.rep.theta
    a = closed_loop(p, c_robust).h11
    b = theta * c_robust * a
    den = theta * a + q1 * a * a * p + q2 * b * b * p
    if den.is_zero:
        raise ValueError("parametrization denominator vanishes at (q1, q2)")
    return (b + q1 * a * a + q2 * b * b) / den
