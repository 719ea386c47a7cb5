import argparse
import logging
from typing import Any, Dict, List, Tuple

from dynamics.census import VARIANTS, density_trend, periodic_census
from dynamics.iterates import cleared_iterate, critical_orbit, g_poly, iterate_coeffs, orbit_eval
from dynamics.newton import (base_irreducibility, certificate_to_dict, certify_iterate,
                             irreducibility_oracle, power_free_certificate,
                             stability_certificate)
from dynamics.periodic import exact_period, exclusion_filter, find_periodic
from dynamics.primitive import (divisibility_check, periodic_primitive_check,
                                primitive_divisors, zero_orbit_consistency)
from dynamics.records import checks_to_dict, merge_checks
from handlers.router import Router, argument
from utils.database import CensusRun, Database, db
from utils.errors import IncompleteFactorizationError, InputError
from utils.factor import is_prime
from utils.rational import parse_rational, split

logger = logging.getLogger(__name__)

# Configuration of the router
router = Router()

Result = Tuple[Dict[str, Any], str]

D = argument("--d", type=int, required=True, help="degree d >= 2")
C = argument("--c", type=parse_rational, required=True, help='constant c as "a/b"')


def _yes_no(value) -> str:
    if value is None:
        return "vacuous"
    return "yes" if value else "no"


def _check_degree(d: int):
    if d < 2:
        raise InputError(f"degree d must be at least 2, got {d}")


@router.command(
    "iterate",
    "coefficients of f^n, its cleared integer form and g_n",
    D, C,
    argument("--n", type=int, required=True, help="iterate index n >= 1"),
)
def iterate_handler(args: argparse.Namespace) -> Result:
    _check_degree(args.d)
    table = iterate_coeffs(args.d, args.c, args.n)
    c1, c2 = split(args.c)
    cleared = cleared_iterate(args.d, c1, c2, args.n)
    g = g_poly(args.d, args.n) if args.n >= 2 else None

    payload = {
        "d": args.d,
        "n": args.n,
        "c": str(args.c),
        "coeffs": [str(a) for a in table.coeffs],
        "cleared": cleared.to_dict(),
        "g": None if g is None else [str(a) for a in g],
    }
    lines = [f"f^{args.n}(x) for x^{args.d} + {args.c}, coefficient of x^(i*{args.d}):"]
    lines += [f"  f_{i} = {a}" for i, a in enumerate(table.coeffs)]
    lines.append(f"cleared by {c2}^{cleared.top}: F = [{', '.join(str(v) for v in cleared.F)}]")
    if g is not None:
        lines.append(f"g_{args.n} = [{', '.join(str(a) for a in g)}]")
    return payload, "\n".join(lines)


@router.command(
    "stability",
    "Eisenstein-Dumas stability certificate and irreducibility checks",
    D, C,
    argument("--oracle-n", type=int, default=0,
             help="also run the irreducibility oracle on H_1..H_k"),
)
def stability_handler(args: argparse.Namespace) -> Result:
    _check_degree(args.d)
    certificate = stability_certificate(args.d, args.c)
    base = base_irreducibility(args.d, args.c)
    power_free = power_free_certificate(args.d, args.c) if is_prime(args.d) else None

    oracle: List[Dict[str, Any]] = []
    c1, c2 = split(args.c)
    for n in range(1, args.oracle_n + 1):
        cleared = cleared_iterate(args.d, c1, c2, n)
        result = irreducibility_oracle(cleared.full_degree())
        entry = {"n": n, **result.to_dict()}
        if certificate is not None:
            entry["eisenstein_dumas"] = certify_iterate(args.d, args.c, certificate, n)
        oracle.append(entry)

    payload = {
        "d": args.d,
        "c": str(args.c),
        "certificate": certificate_to_dict(certificate),
        "base_irreducible": base,
        "power_free": power_free,
        "oracle": oracle,
    }
    if certificate is None:
        lines = ["stable: unknown"]
    else:
        lines = [f"stable: yes (p={certificate.p}, e={certificate.e})"]
    lines.append(f"x^{args.d} + {args.c} irreducible: {_yes_no(base)}")
    for entry in oracle:
        line = f"H_{entry['n']}: {entry['verdict']}"
        if entry["witness"] is not None:
            line += f" (factor {entry['witness']})"
        lines.append(line)
    return payload, "\n".join(lines)


def _cycle_text(orbit) -> str:
    return " -> ".join(str(x) for x in orbit)


@router.command(
    "periodic",
    "all rational points of exact period n, grouped into cycles",
    D, C,
    argument("--n", type=int, required=True, help="exact period n >= 1"),
    argument("--primitive", action="store_true",
             help="also check the primitive-prime theorems on each cycle"),
)
def periodic_handler(args: argparse.Namespace) -> Result:
    _check_degree(args.d)
    records = find_periodic(args.d, args.c, args.n)
    payload: Dict[str, Any] = {
        "c": str(args.c),
        "d": args.d,
        "n": args.n,
        "cycles": [[str(x) for x in rec.orbit] for rec in records],
        "checks": checks_to_dict(merge_checks([rec.checks for rec in records])),
        "cycle_checks": [checks_to_dict(rec.checks) for rec in records],
    }
    lines = [f"x^{args.d} + {args.c}, exact period {args.n}: {len(records)} cycle(s)"]
    for rec in records:
        lines.append(f"  {_cycle_text(rec.orbit)}")
        failed = [name for name, value in rec.checks.items() if value is False]
        if failed:
            lines.append(f"    failed checks: {', '.join(failed)}")

    if args.primitive:
        c1, c2 = split(args.c)
        orbit = critical_orbit(args.d, c1, c2, args.n)
        checks = [periodic_primitive_check(rec, orbit) for rec in records]
        payload["primitive"] = [check.to_dict() for check in checks]
        for check in checks:
            lines.append(
                f"  primes of numerators primitive: {_yes_no(check.thm_primes_of_u1)}, "
                f"count bound: {_yes_no(check.count_bound)}"
            )
    return payload, "\n".join(lines)


@router.command(
    "exclude",
    "rule out period n from the primes of c1",
    D,
    argument("--c1", type=int, required=True, help="numerator of c"),
    argument("--n", type=int, required=True, help="period n >= 1"),
)
def exclude_handler(args: argparse.Namespace) -> Result:
    _check_degree(args.d)
    verdict = exclusion_filter(args.d, args.c1, args.n)
    payload = {"d": args.d, "c1": str(args.c1), "n": args.n, **verdict.to_dict()}
    lines = [str(verdict)]
    for p, g, h in verdict.trace:
        lines.append(f"  p={p}: gcd(p, d^n-1)={g}, gcd(p-1, d^n-1)={h}")
    if verdict.note:
        lines.append(f"  note: {verdict.note}")
    return payload, "\n".join(lines)


@router.command(
    "orbit",
    "critical orbit F_0^k with primitive primes, or the orbit of a point",
    D, C,
    argument("--N", type=int, default=None, help="number of critical orbit terms"),
    argument("--u", type=parse_rational, default=None, help="start point instead of 0"),
    argument("--steps", type=int, default=10, help="steps for --u"),
)
def orbit_handler(args: argparse.Namespace) -> Result:
    _check_degree(args.d)
    if args.u is not None:
        points = orbit_eval(args.d, args.c, args.u, args.steps)
        period = exact_period(args.d, args.c, args.u, max(args.steps, 1))
        payload = {
            "d": args.d,
            "c": str(args.c),
            "u": str(args.u),
            "orbit": [str(x) for x in points],
            "period": period,
        }
        text = _cycle_text(points) + f"\nexact period: {period if period else 'none within ' + str(args.steps)}"
        return payload, text

    if args.N is None:
        raise InputError("orbit needs --N (critical orbit) or --u (point orbit)")
    c1, c2 = split(args.c)
    orbit = critical_orbit(args.d, c1, c2, args.N)
    try:
        report = primitive_divisors(orbit)
        primitive = report.to_dict()
    except IncompleteFactorizationError as e:
        logger.warning(f"primitive divisors unavailable: {e}")
        report, primitive = None, None
    payload = {
        **orbit.to_dict(),
        "c": str(args.c),
        "primitive": primitive,
        "divisibility": divisibility_check(orbit),
        "zero_orbit_consistency": zero_orbit_consistency(orbit),
    }
    lines = []
    for k, term in enumerate(orbit.terms, start=1):
        factorization = orbit.factorizations[k - 1]
        line = f"F_0^{k} = {term}"
        if factorization is not None:
            line += f" = {factorization}"
        if report is not None and k <= len(report.primitive):
            line += f"  primitive: {{{', '.join(str(p) for p in report.at(k))}}}"
        lines.append(line)
    if report is not None and report.note:
        lines.append(report.note)
    lines.append(f"divisibility sequence: {_yes_no(payload['divisibility'])}")
    return payload, "\n".join(lines)


@router.command(
    "census",
    "all cycles of period <= n_max for c of height <= N",
    D,
    argument("--N", type=int, required=True, help="height bound"),
    argument("--n-max", type=int, required=True, help="largest period"),
    argument("--workers", type=int, default=None, help="worker processes"),
    argument("--max-volume", type=int, default=None, help="census budget cap"),
    argument("--store", action="store_true", help="save the report to the database"),
    argument("--reuse", action="store_true", help="return a stored report if one exists"),
    argument("--database-url", default=None, help="override DATABASE_URL"),
)
def census_handler(args: argparse.Namespace) -> Result:
    _check_degree(args.d)
    database = Database(args.database_url) if args.database_url else db
    report = None
    if args.reuse or args.store:
        database.init_models()
    if args.reuse:
        with database.get_session() as session:
            run = CensusRun.get_matching(session, args.d, args.N, args.n_max)
            if run is not None:
                logger.info(f"Reusing census run {run.id}")
                report = run.to_report()
    if report is None:
        report = periodic_census(
            args.d, args.N, args.n_max, workers=args.workers, max_volume=args.max_volume
        )
        if args.store:
            with database.get_session() as session:
                CensusRun.create_from_report(session, report)

    lines = [
        f"census d={report.d} N={report.N} n<={report.n_max}",
        f"  |S(N)| = |P(N)| = {report.s_count}",
        f"  |S_d(N)| reduced = {report.sd_reduced}, pairs = {report.sd_pairs}",
        f"  |P_d(N)| >= {report.pd_count}",
        f"  ratio pairs = {float(report.ratio_pairs):.6g}, predicted = {report.predicted:.6g}",
        f"  {'c':>10}  {'n':>2}  cycle",
    ]
    for finding in report.findings:
        lines.append(f"  {str(finding.c):>10}  {finding.record.n:>2}  {_cycle_text(finding.record.orbit)}")
    for failure in report.failures:
        lines.append(f"  {str(failure.c):>10}  {failure.n:>2}  FAILED: {failure.message}")
    return report.to_dict(), "\n".join(lines)


@router.command(
    "density",
    "exact height counts |S(N)|, |S_d(N)| against the density prediction",
    D,
    argument("--N", type=int, nargs="+", required=True, help="one or more height bounds"),
    argument("--variant", choices=VARIANTS + ("both",), default="both"),
)
def density_handler(args: argparse.Namespace) -> Result:
    _check_degree(args.d)
    variants = VARIANTS if args.variant == "both" else (args.variant,)
    results = []
    for variant in variants:
        results.extend(density_trend(args.d, args.N, variant))
    payload = {"d": args.d, "results": [r.to_dict() for r in results]}
    lines = [f"  {'N':>10}  {'variant':>8}  {'|S(N)|':>14}  {'|S_d(N)|':>14}  {'ratio':>10}  {'predicted':>10}"]
    for r in results:
        lines.append(
            f"  {r.N:>10}  {r.variant:>8}  {r.s_count:>14}  {r.sd_count:>14}  "
            f"{float(r.ratio):>10.6g}  {r.predicted:>10.6g}"
        )
    return payload, "\n".join(lines)

