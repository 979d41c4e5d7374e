"""Problem-file ingestion, command dispatch, verification reports, and the
``regula`` command line.

Problems are JSON objects; reports are JSON (or human-readable text) whose
certificates re-verify when fed back through the matching verify command.
Exit codes form a stable CI contract: 0 accepted/solvable, 1 rejected or
proven unsolvable, 2 unknown within the search budget, 3 input error.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .algebra import RatFunc
from .expr import ExprSyntaxError, parse_expr, print_expr
from .feedback import (
    SingularLoop,
    StabilizingPair,
    check_pair,
    closed_loop,
    pair_from_controller,
    parametrize_stabilizing,
    stabilizes,
    synthesize_stabilizing,
)
from .regulation import (
    NotRegulating,
    PreconditionFailed,
    Solvability,
    check_denominator_model,
    is_regulating,
    is_robustly_regulating,
    lift_lower,
    make_generator,
    parametrize_all_robust,
    regulation_witness,
    solvability,
    solvability_weakly_coprime,
    synthesize_robust,
)
from .rings import (
    DEFAULT_BOUND,
    Coprimeness,
    FractionRep,
    RingId,
    SolveStatus,
    is_coprime_factorization,
    is_stable,
    is_weakly_coprime,
)

COMMANDS = (
    "check-stability",
    "verify-pair",
    "verify-regulation",
    "check-factorization",
    "solvability",
    "synthesize",
    "parametrize",
    "lift-lower",
)

# verdict -> exit code; anything not listed is an input error (3)
EXIT_CODES = {
    "stable loop": 0,
    "accepted": 0,
    "solvable": 0,
    "coprime": 0,
    "weakly-coprime": 0,
    "unstable loop": 1,
    "rejected": 1,
    "not-solvable": 1,
    "not-stabilizable": 1,
    "not-coprime": 1,
    "not-weakly-coprime": 1,
    "unknown-within-budget": 2,
    "input error": 3,
}

WITNESS_NAMES = ("alpha", "beta", "a", "b", "q1", "q2", "k", "c0")


class ProblemError(ValueError):
    """Malformed problem file or missing fields."""


@dataclass
class Problem:
    ring: RingId
    variable: str
    plant: Optional[RatFunc] = None
    generator: Optional[RatFunc] = None
    generator_rep: Optional[FractionRep] = None
    controller: Optional[RatFunc] = None
    witnesses: dict[str, RatFunc] = field(default_factory=dict)
    degree_bound: int = DEFAULT_BOUND
    sweep: int = 25
    direction: str = "lower"
    label: str = ""
    command: str = ""


@dataclass
class Report:
    command: str
    verdict: str
    certificates: dict[str, str] = field(default_factory=dict)
    residuals: list[tuple[str, str]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES.get(self.verdict, 3)

    def to_json(self) -> str:
        return json.dumps(
            {
                "command": self.command,
                "verdict": self.verdict,
                "certificates": self.certificates,
                "residuals": [{"identity": name, "value": val} for name, val in self.residuals],
                "notes": self.notes,
            },
            indent=2,
        )

    def to_text(self) -> str:
        lines = [f"command: {self.command}", f"verdict: {self.verdict}"]
        if self.certificates:
            lines.append("certificates:")
            lines.extend(f"  {name} = {val}" for name, val in self.certificates.items())
        if self.residuals:
            lines.append("residuals (exact):")
            lines.extend(f"  {name} = {val}" for name, val in self.residuals)
        for note in self.notes:
            lines.append(f"note: {note}")
        return "\n".join(lines)


def load_problem(data: dict) -> Problem:
    if not isinstance(data, dict):
        raise ProblemError("problem file must contain a JSON object")
    try:
        ring = RingId.from_name(data["ring"])
    except KeyError:
        raise ProblemError("missing required field 'ring'") from None
    except ValueError as exc:
        raise ProblemError(str(exc)) from None
    variable = data.get("variable", ring.default_variable)
    options = data.get("options", {})

    def parse_field(name: str, src: Optional[str]) -> Optional[RatFunc]:
        if src is None:
            return None
        try:
            return parse_expr(src, variable)
        except (ExprSyntaxError, ZeroDivisionError) as exc:
            raise ProblemError(f"field {name!r}: {exc}") from None

    problem = Problem(
        ring=ring,
        variable=variable,
        plant=parse_field("plant", data.get("plant")),
        generator=parse_field("generator", data.get("generator")),
        controller=parse_field("controller", data.get("controller")),
        degree_bound=int(options.get("degree_bound", DEFAULT_BOUND)),
        sweep=int(options.get("sweep", 25)),
        direction=str(options.get("direction", "lower")),
        label=str(data.get("label", "")),
        command=str(data.get("command", "")),
    )
    rep_data = data.get("generator_rep")
    if rep_data is not None:
        gamma = parse_field("generator_rep.gamma", rep_data.get("gamma"))
        theta = parse_field("generator_rep.theta", rep_data.get("theta"))
        if gamma is None or theta is None:
            raise ProblemError("generator_rep needs both 'gamma' and 'theta'")
        try:
            problem.generator_rep = FractionRep(gamma, theta, ring)
        except ValueError as exc:
            raise ProblemError(f"generator_rep: {exc}") from None
    for name, src in data.get("witnesses", {}).items():
        if name not in WITNESS_NAMES:
            raise ProblemError(f"unknown witness name {name!r}")
        problem.witnesses[name] = parse_field(f"witnesses.{name}", src)
    return problem


def _require(problem: Problem, *names: str):
    values = []
    for name in names:
        value = problem.witnesses.get(name) if name in WITNESS_NAMES else getattr(problem, name)
        if value is None:
            raise ProblemError(f"command requires field {name!r}")
        values.append(value)
    return values


def _generator_of(problem: Problem):
    if problem.generator is None and problem.generator_rep is None:
        raise ProblemError("command requires a generator (or generator_rep)")
    value = problem.generator
    if value is None:
        value = problem.generator_rep.value
    return make_generator(problem.ring, value, problem.generator_rep, problem.degree_bound)


def _cert(report: Report, name: str, value: RatFunc):
    report.certificates[name] = print_expr(value)


def _residual(report: Report, name: str, value: RatFunc) -> bool:
    ok = value.is_zero
    if ok:
        report.residuals.append((name, "0"))
    else:
        report.notes.append(f"residual {name} = {print_expr(value)} != 0")
    return ok


def _cmd_check_stability(problem: Problem) -> Report:
    plant, controller = _require(problem, "plant", "controller")
    report = Report("check-stability", "unstable loop")
    loop = closed_loop(plant, controller)
    for name, entry in zip(("h11", "h12", "h21", "h22"), loop.entries()):
        _cert(report, name, entry)
        if not is_stable(problem.ring, entry):
            report.notes.append(f"{name} is not stable in {problem.ring.value}")
    if not report.notes:
        report.verdict = "stable loop"
    return report


def _cmd_verify_pair(problem: Problem) -> Report:
    plant, a, b = _require(problem, "plant", "a", "b")
    report = Report("verify-pair", "rejected")
    ok = True
    if a.is_zero:
        report.notes.append("a = 0 is not a valid pair component")
        ok = False
    for name, f in (("a", a), ("b", b), ("p*a", plant * a)):
        if not is_stable(problem.ring, f):
            report.notes.append(f"{name} is not stable in {problem.ring.value}")
            ok = False
    ok = _residual(report, "a - p*b - 1", a - plant * b - 1) and ok
    if ok:
        report.verdict = "accepted"
        _cert(report, "controller", b / a)
        _cert(report, "p*a", plant * a)
    return report


def _cmd_verify_regulation(problem: Problem) -> Report:
    plant, controller = _require(problem, "plant", "controller")
    gen = _generator_of(problem)
    report = Report("verify-regulation", "rejected")
    if not stabilizes(problem.ring, plant, controller):
        report.notes.append("controller does not stabilize the plant")
        return report
    if not is_regulating(problem.ring, plant, controller, gen):
        loop = closed_loop(plant, controller)
        for name, f in (
            ("generator/(1-p*c)", gen.value * loop.h11),
            ("generator*p/(1-p*c)", gen.value * loop.h12),
        ):
            if not is_stable(problem.ring, f):
                report.notes.append(f"{name} = {print_expr(f)} is not stable")
        return report
    cert = regulation_witness(problem.ring, plant, controller, gen)
    report.verdict = "accepted"
    _cert(report, "alpha", cert.alpha)
    _cert(report, "beta", cert.beta)
    _residual(report, "generator - (alpha + beta*c)",
              gen.value - (cert.alpha + cert.beta * controller))
    return report


def _cmd_check_factorization(problem: Problem) -> Report:
    if problem.generator_rep is None:
        raise ProblemError("check-factorization requires generator_rep")
    rep = problem.generator_rep
    report = Report("check-factorization", "unknown-within-budget")
    cop = is_coprime_factorization(rep, problem.degree_bound)
    weak = is_weakly_coprime(rep, problem.degree_bound)
    report.notes.append(f"coprimeness: {cop.status.value}")
    report.notes.append(f"weak coprimeness: {weak.status.value}")
    if cop.status is Coprimeness.COPRIME:
        report.verdict = "coprime"
        _cert(report, "alpha", cop.alpha)
        _cert(report, "beta", cop.beta)
        _residual(report, "alpha*gamma - beta*theta - 1",
                  cop.alpha * rep.gamma - cop.beta * rep.theta - 1)
    elif weak.status is Coprimeness.NOT_WEAKLY_COPRIME:
        report.verdict = "not-weakly-coprime"
        _cert(report, "k", weak.witness)
        _cert(report, "k*gamma", weak.witness * rep.gamma)
        _cert(report, "k*theta", weak.witness * rep.theta)
    elif weak.status is Coprimeness.WEAKLY_COPRIME:
        report.verdict = "weakly-coprime"
        if cop.status is Coprimeness.NOT_COPRIME:
            report.notes.append("weakly coprime but provably not coprime")
    elif cop.status is Coprimeness.NOT_COPRIME:
        report.verdict = "not-coprime"
    return report


def _cmd_solvability(problem: Problem) -> Report:
    (plant,) = _require(problem, "plant")
    gen = _generator_of(problem)
    result = solvability(problem.ring, plant, gen, problem.degree_bound)
    report = Report("solvability", result.status.value)
    if result.note:
        report.notes.append(result.note)
    if result.pair is not None:
        _cert(report, "a", result.pair.a)
        _cert(report, "b", result.pair.b)
    cert = result.certificate
    if cert is not None:
        for name, value in (("alpha", cert.alpha), ("beta", cert.beta),
                            ("q1", cert.q1), ("q2", cert.q2)):
            if value is not None:
                _cert(report, name, value)
        if result.status is Solvability.SOLVABLE and not gen.value.is_zero:
            b_shift = result.pair.b + cert.q1 * result.pair.a ** 2 + cert.q2 * result.pair.b ** 2
            _residual(report, "alpha/generator - beta*(b+q1*a^2+q2*b^2)*p - 1",
                      cert.alpha * gen.value.inv() - cert.beta * b_shift * plant - 1)
    if gen.is_weakly_coprime and not gen.value.is_zero:
        weak = solvability_weakly_coprime(problem.ring, plant, gen, problem.degree_bound)
        report.notes.append(f"weakly-coprime test: {weak.status.value}")
        if weak.controller is not None:
            _cert(report, "controller", weak.controller)
    return report


def _cmd_synthesize(problem: Problem) -> Report:
    (plant,) = _require(problem, "plant")
    if problem.generator is None and problem.generator_rep is None:
        # no generator: plain stabilization synthesis
        report = Report("synthesize", "unknown-within-budget")
        result = synthesize_stabilizing(problem.ring, plant, problem.degree_bound)
        if result is None:
            report.notes.append("no stabilizing pair within the degree budget")
            return report
        c, pair = result
        report.verdict = "solvable"
        _cert(report, "controller", c)
        _cert(report, "a", pair.a)
        _cert(report, "b", pair.b)
        _residual(report, "a - p*b - 1", pair.a - plant * pair.b - 1)
        return report
    gen = _generator_of(problem)
    result = synthesize_robust(problem.ring, plant, gen, problem.degree_bound)
    report = Report("synthesize", result.status.value)
    if result.note:
        report.notes.append(result.note)
    if result.status is not Solvability.SOLVABLE:
        return report
    c_r = result.controller
    _cert(report, "controller", c_r)
    if result.pair is not None:
        _cert(report, "a", result.pair.a)
        _cert(report, "b", result.pair.b)
    if not is_robustly_regulating(problem.ring, plant, c_r, gen):
        report.verdict = "rejected"  # unreachable: the engine re-verifies
        return report
    witness = regulation_witness(problem.ring, plant, c_r, gen)
    _cert(report, "alpha", witness.alpha)
    _cert(report, "beta", witness.beta)
    _residual(report, "generator - (alpha + beta*c)",
              gen.value - (witness.alpha + witness.beta * c_r))
    return report


def _cmd_parametrize(problem: Problem) -> Report:
    (plant,) = _require(problem, "plant")
    robust = problem.generator is not None or problem.generator_rep is not None
    report = Report("parametrize", "accepted")
    q1 = problem.witnesses.get("q1")
    q2 = problem.witnesses.get("q2")
    if (q1 is None) != (q2 is None):
        raise ProblemError("witnesses q1 and q2 must be given together")
    if robust:
        controller, = _require(problem, "controller")
        gen = _generator_of(problem)
        if q1 is None:
            report.notes.append(f"sweep of {problem.sweep} deterministic points")
            count = _sweep_robust(problem, plant, controller, gen, report)
            report.notes.append(f"{count} parametrized controllers re-verified")
            return report
        c_new = parametrize_all_robust(problem.ring, plant, controller, gen, q1, q2)
        _cert(report, "controller", c_new)
        if not is_robustly_regulating(problem.ring, plant, c_new, gen):
            report.verdict = "rejected"
        return report
    a, b = _require(problem, "a", "b")
    pair = StabilizingPair(a, b, problem.ring)
    if not check_pair(problem.ring, plant, a, b):
        raise ProblemError("witnesses (a, b) are not a valid stabilizing pair")
    if q1 is None:
        report.notes.append(f"sweep of {problem.sweep} deterministic points")
        count = _sweep_stabilizing(problem, plant, pair, report)
        report.notes.append(f"{count} parametrized controllers re-verified")
        return report
    c_new = parametrize_stabilizing(problem.ring, plant, pair, q1, q2)
    _cert(report, "controller", c_new)
    if not stabilizes(problem.ring, plant, c_new):
        report.verdict = "rejected"
    return report


def _sweep_values(problem: Problem):
    import random

    rng = random.Random(12345)
    var = problem.variable
    from .algebra import Poly

    def rand_stable():
        if problem.ring is RingId.STABLE_PROPER:
            k = rng.randint(0, 3)
            num = Poly.make([rng.randint(-3, 3) for _ in range(k + 1)], var)
            return RatFunc.from_poly(num) / RatFunc.from_poly(Poly.make([1, 1], var) ** k)
        coeffs = [rng.randint(-3, 3) for _ in range(5)]
        if problem.ring is RingId.NO_LINEAR:
            coeffs[1] = 0
        return RatFunc.from_poly(Poly.make(coeffs, var))

    while True:
        yield rand_stable(), rand_stable()


def _sweep_stabilizing(problem, plant, pair, report) -> int:
    count = 0
    for q1, q2 in _sweep_values(problem):
        if count >= problem.sweep:
            break
        try:
            c_new = parametrize_stabilizing(problem.ring, plant, pair, q1, q2)
        except SingularLoop:
            continue
        if not stabilizes(problem.ring, plant, c_new):
            report.verdict = "rejected"
            report.notes.append(f"sweep failure at q1={print_expr(q1)}, q2={print_expr(q2)}")
            break
        count += 1
    return count


def _sweep_robust(problem, plant, controller, gen, report) -> int:
    count = 0
    for q1, q2 in _sweep_values(problem):
        if count >= problem.sweep:
            break
        try:
            c_new = parametrize_all_robust(problem.ring, plant, controller, gen, q1, q2)
        except ValueError:
            continue
        if not is_robustly_regulating(problem.ring, plant, c_new, gen):
            report.verdict = "rejected"
            report.notes.append(f"sweep failure at q1={print_expr(q1)}, q2={print_expr(q2)}")
            break
        count += 1
    return count


def _cmd_lift_lower(problem: Problem) -> Report:
    plant, controller = _require(problem, "plant", "controller")
    if problem.generator_rep is not None:
        theta = problem.generator_rep.theta
    else:
        gen = _generator_of(problem)
        theta = gen.rep.theta
    direction = problem.direction
    if direction == "lift" and "c0" in problem.witnesses:
        controller = problem.witnesses["c0"]
    result = lift_lower(problem.ring, controller, theta, direction, plant, problem.degree_bound)
    report = Report("lift-lower", "accepted" if result.ok else "rejected")
    name = "c" if direction == "lift" else "c0"
    _cert(report, name, result.controller)
    _cert(report, "theta", theta)
    if result.failing:
        report.notes.append(f"failing entry: {result.failing}")
    if result.ok:
        back = lift_lower(
            problem.ring, result.controller, theta,
            "lift" if direction == "lower" else "lower", plant, problem.degree_bound,
        )
        _residual(report, "round trip - original", back.controller - controller)
    return report


_HANDLERS = {
    "check-stability": _cmd_check_stability,
    "verify-pair": _cmd_verify_pair,
    "verify-regulation": _cmd_verify_regulation,
    "check-factorization": _cmd_check_factorization,
    "solvability": _cmd_solvability,
    "synthesize": _cmd_synthesize,
    "parametrize": _cmd_parametrize,
    "lift-lower": _cmd_lift_lower,
}


def run_command(command: str, problem: Problem) -> Report:
    """Dispatch one command against a loaded problem; never raises for
    engine-level failures, which are reported as verdicts/notes instead."""
    if command not in _HANDLERS:
        raise ProblemError(f"unknown command {command!r}")
    if problem.label:
        note = f"label: {problem.label}"
    try:
        report = _HANDLERS[command](problem)
    except (ProblemError, ExprSyntaxError) as exc:
        report = Report(command, "input error", notes=[str(exc)])
    except (SingularLoop, NotRegulating, PreconditionFailed, ZeroDivisionError, ValueError) as exc:
        report = Report(command, "input error", notes=[f"engine error: {exc}"])
    if problem.label:
        report.notes.insert(0, note)
    return report


def _run_file(path: Path, command: Optional[str], args) -> Report:
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        return Report(command or "?", "input error", notes=[f"{path}: {exc}"])
    try:
        problem = load_problem(data)
    except ProblemError as exc:
        return Report(command or "?", "input error", notes=[str(exc)])
    if args.degree_bound is not None:
        problem.degree_bound = args.degree_bound
    if args.sweep is not None:
        problem.sweep = args.sweep
    cmd = command or problem.command
    if not cmd:
        return Report("?", "input error", notes=["no command given (file lacks 'command')"])
    return run_command(cmd, problem)


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="regula",
        description="Exact stabilization and robust-regulation certificates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cp = sub.add_parser(name)
        cp.add_argument("--problem", required=True, type=Path)
        _common_flags(cp)
    corpus = sub.add_parser("corpus", help="run every problem file in a directory")
    corpus.add_argument("--dir", required=True, type=Path)
    corpus.add_argument("--jobs", type=int, default=4)
    _common_flags(corpus)
    args = parser.parse_args(argv)

    if args.command == "corpus":
        files = sorted(args.dir.glob("*.json"))
        if not files:
            print(f"no problem files in {args.dir}", file=sys.stderr)
            return 3
        with concurrent.futures.ThreadPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(lambda f: (_run_file(f, None, args), f), files))
        worst = 0
        for report, path in reports:
            print(f"{path.name}: {report.command}: {report.verdict}")
            worst = max(worst, report.exit_code)
        return worst

    report = _run_file(args.problem, args.command, args)
    print(report.to_json() if args.json else report.to_text())
    return report.exit_code


def _common_flags(cp: argparse.ArgumentParser):
    cp.add_argument("--degree-bound", type=int, default=None)
    cp.add_argument("--sweep", type=int, default=None)
    fmt = cp.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--text", dest="json", action="store_false")
    cp.set_defaults(json=False)


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
