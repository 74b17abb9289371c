"""Command-line entry point: ``bmgame {gen,solve,allocate,gamma,verify,gap}``.

Exit status: 0 ok, 2 input error, 3 verification violation, 4 oracle budget
exceeded, 5 internal certificate failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from fractions import Fraction

from .bsolver import CertificateError, solve
from .instance import Coalition, InstanceError, gen_random, gen_tight_family, load_instance, save_instance
from .mechanism import dump_report, fmt, parse_allocation, run_mechanism
from .oracle import DEFAULT_BUDGET, BudgetExceeded, audit_core, dump_audit, gamma_exact, integrality_gap

log = logging.getLogger("bmgame")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_VIOLATION = 3
EXIT_BUDGET = 4
EXIT_CERTIFICATE = 5

# above this many players verify checks connected coalitions only
EXHAUSTIVE_MAX_N = 16

COMMANDS = ("gen", "solve", "allocate", "gamma", "verify", "gap")


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    output: str | None = None
    seed: int = 0
    budget: int = DEFAULT_BUDGET
    family: str | None = None
    random: str | None = None
    alpha: Fraction | None = None
    report: str | None = None
    coalition: str | None = None
    connected: bool = False
    verbosity: int = 0

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InstanceError(f"unknown command {self.command!r}")
        if self.command != "gen" and (self.family or self.random):
            raise InstanceError("generator parameters are only valid with 'gen'")
        if self.command == "gen" and bool(self.family) == bool(self.random):
            raise InstanceError("gen needs exactly one of --family or --random")


def _read_instance(cfg: RunConfig):
    if cfg.input in (None, "-"):
        text = sys.stdin.read()
    else:
        try:
            with open(cfg.input) as fh:
                text = fh.read()
        except OSError as exc:
            raise InstanceError(f"cannot read {cfg.input}: {exc}") from exc
    return load_instance(text)


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(cfg.output, "w") as fh:
            fh.write(text)


def _ints(spec: str, what: str) -> list[str]:
    parts = [p.strip() for p in spec.split(",")]
    if not parts or any(not p for p in parts):
        raise InstanceError(f"malformed {what}: {spec!r}")
    return parts


def cmd_gen(cfg: RunConfig) -> int:
    try:
        if cfg.family:
            parts = _ints(cfg.family, "--family")
            if len(parts) not in (3, 4):
                raise InstanceError("--family expects n,l,b[,link]")
            n, l, b = (int(p) for p in parts[:3])
            link = len(parts) == 4 and parts[3].lower() in ("1", "link", "true", "yes")
            inst = gen_tight_family(n, l, b, link)
        else:
            parts = _ints(cfg.random, "--random")
            if len(parts) not in (4, 5):
                raise InstanceError("--random expects n,p,max_b,max_w[,bip]")
            bip = len(parts) == 5 and parts[4].lower() in ("1", "bip", "true", "yes")
            inst = gen_random(int(parts[0]), Fraction(parts[1]), int(parts[2]), int(parts[3]), cfg.seed, bip)
    except ValueError as exc:
        raise InstanceError(str(exc)) from exc
    _emit(cfg, save_instance(inst))
    return EXIT_OK


def cmd_solve(cfg: RunConfig) -> int:
    inst = _read_instance(cfg)
    x, y = solve(inst)
    doc = {
        "lp_value": fmt(x.weight()),
        "dual_value": fmt(y.value()),
        "x": [{"u": u, "v": v, "x": fmt(x.x(k))} for k, (u, v, _) in enumerate(inst.edges)],
        "y": {str(v): fmt(y.y(v)) for v in inst.vertices},
    }
    _emit(cfg, json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


def cmd_allocate(cfg: RunConfig) -> int:
    inst = _read_instance(cfg)
    report = run_mechanism(inst)
    log.info("alpha=%s lp=%s total=%s", report.alpha, report.lp_value, report.total)
    _emit(cfg, dump_report(report))
    return EXIT_OK


def cmd_gamma(cfg: RunConfig) -> int:
    inst = _read_instance(cfg)
    if cfg.coalition:
        by_name = {str(v): v for v in inst.vertices}
        names = _ints(cfg.coalition, "--coalition")
        unknown = [n for n in names if n not in by_name]
        if unknown:
            raise InstanceError(f"--coalition names unknown vertices {unknown}")
        S = Coalition(inst, frozenset(by_name[n] for n in names))
    else:
        S = Coalition.grand(inst)
    gv = gamma_exact(inst, S, budget=cfg.budget)
    doc = {
        "coalition": sorted(S.members, key=inst.index.__getitem__),
        "gamma": gv.gamma,
        "witness": [
            {"u": inst.edges[k][0], "v": inst.edges[k][1], "x": t} for k, t in gv.witness.items()
        ],
    }
    _emit(cfg, json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    inst = _read_instance(cfg)
    if cfg.report:
        try:
            with open(cfg.report) as fh:
                doc = json.load(fh)
            allocation, alpha = parse_allocation(doc, inst)
        except (OSError, json.JSONDecodeError, ValueError, ZeroDivisionError) as exc:
            raise InstanceError(f"bad report {cfg.report}: {exc}") from exc
    else:
        report = run_mechanism(inst)
        allocation, alpha = report.allocation, report.alpha
    if cfg.alpha is not None:
        alpha = cfg.alpha
    connected = cfg.connected or inst.n > EXHAUSTIVE_MAX_N
    if connected:
        log.info("auditing connected coalitions only (n=%d)", inst.n)
    audit = audit_core(inst, allocation, alpha, budget=cfg.budget, connected_only=connected)
    _emit(cfg, dump_audit(inst, audit))
    if not audit.in_core:
        log.warning("%d violating coalitions, budget_ok=%s", len(audit.violations), audit.budget_ok)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_gap(cfg: RunConfig) -> int:
    inst = _read_instance(cfg)
    gap = integrality_gap(inst, budget=cfg.budget)
    line = f"ip={gap.ip_value} lp={fmt(gap.lp_value)} ratio={fmt(gap.ratio)}\n"
    if cfg.output in (None, "-"):
        sys.stdout.write(line)
    else:
        doc = {"ip_value": gap.ip_value, "lp_value": fmt(gap.lp_value), "ratio": fmt(gap.ratio)}
        _emit(cfg, json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


HANDLERS = {
    "gen": cmd_gen,
    "solve": cmd_solve,
    "allocate": cmd_allocate,
    "gamma": cmd_gamma,
    "verify": cmd_verify,
    "gap": cmd_gap,
}


def _fraction(text: str) -> Fraction:
    try:
        q = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational p/q: {text!r}") from exc
    if not 0 < q <= 1:
        raise argparse.ArgumentTypeError("alpha must lie in (0, 1]")
    return q


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bmgame", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--output", "-o", help="output path (default stdout)")
        p.add_argument("-v", "--verbose", action="count", default=0)
        if name == "gen":
            p.add_argument("--family", help="n,l,b[,link]: 2n disjoint l-cycles")
            p.add_argument("--random", help="n,p,max_b,max_w[,bip]: seeded random graph")
            p.add_argument("--seed", type=int, default=0)
            continue
        p.add_argument("--input", "-i", help="instance JSON (default stdin)")
        if name in ("gamma", "verify", "gap"):
            p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="oracle search-node limit")
        if name == "gamma":
            p.add_argument("--coalition", help="comma-separated vertex ids (default all)")
        if name == "verify":
            p.add_argument("--report", help="audit this allocation report instead of computing one")
            p.add_argument("--alpha", type=_fraction, help="audit target p/q (default: report alpha)")
            p.add_argument(
                "--connected",
                action="store_true",
                help=f"check connected coalitions only (automatic above {EXHAUSTIVE_MAX_N} players)",
            )
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s: %(message)s"
    )
    try:
        cfg = RunConfig(
            command=args.command,
            input=getattr(args, "input", None),
            output=args.output,
            seed=getattr(args, "seed", 0),
            budget=getattr(args, "budget", DEFAULT_BUDGET),
            family=getattr(args, "family", None),
            random=getattr(args, "random", None),
            alpha=getattr(args, "alpha", None),
            report=getattr(args, "report", None),
            coalition=getattr(args, "coalition", None),
            connected=getattr(args, "connected", False),
            verbosity=args.verbose,
        )
        return HANDLERS[cfg.command](cfg)
    except InstanceError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        print(f"oracle budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except CertificateError as exc:
        print(f"internal certificate failure: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATE


if __name__ == "__main__":
    sys.exit(main())
