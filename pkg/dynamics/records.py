"""Result records shared by the search, primitive-divisor and census modules.

Every record serializes to JSON with big integers and rationals as strings
and parses back with ``from_dict``.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from utils.rational import BigRat, parse_rational

# Checks that do not apply (c1 = 0, n = 1, zero orbit terms) are None and
# serialize as this marker
VACUOUS = "vacuous"

CheckMap = Dict[str, Optional[bool]]


def checks_to_dict(checks: CheckMap) -> Dict[str, object]:
    return {name: VACUOUS if value is None else value for name, value in sorted(checks.items())}


def checks_from_dict(data: Dict[str, object]) -> CheckMap:
    return {name: None if value == VACUOUS else bool(value) for name, value in data.items()}


def merge_checks(maps: List[CheckMap]) -> CheckMap:
    """False if any map fails a check, None if every map is vacuous on it, else True"""
    merged: CheckMap = {}
    for checks in maps:
        for name, value in checks.items():
            current = merged.get(name)
            if value is False or current is False:
                merged[name] = False
            elif value is True or current is True:
                merged[name] = True
            else:
                merged[name] = None
    return merged


@dataclass(frozen=True)
class PeriodicPointRecord:
    """One cycle of exact period n, rotated so its smallest point leads"""

    u: BigRat
    n: int
    orbit: Tuple[BigRat, ...]
    u1_list: Tuple[int, ...]
    checks: CheckMap = field(default_factory=dict, compare=False, hash=False)

    @property
    def u2(self) -> int:
        return self.u.denominator

    @property
    def passed(self) -> bool:
        return all(value is not False for value in self.checks.values())

    def to_dict(self) -> dict:
        return {
            "u": str(self.u),
            "n": self.n,
            "orbit": [str(x) for x in self.orbit],
            "u1_list": [str(x) for x in self.u1_list],
            "checks": checks_to_dict(self.checks),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PeriodicPointRecord":
        return cls(
            u=parse_rational(data["u"]),
            n=int(data["n"]),
            orbit=tuple(parse_rational(x) for x in data["orbit"]),
            u1_list=tuple(int(x) for x in data["u1_list"]),
            checks=checks_from_dict(data.get("checks", {})),
        )


@dataclass(frozen=True)
class ExclusionVerdict:
    outcome: str  # "impossible" or "inconclusive"
    p: Optional[int] = None
    # (p, gcd(p, d^n - 1), gcd(p - 1, d^n - 1)) for each certified prime of c1
    trace: Tuple[Tuple[int, int, int], ...] = ()
    incomplete: bool = False
    note: Optional[str] = None

    @property
    def impossible(self) -> bool:
        return self.outcome == "impossible"

    def __str__(self) -> str:
        text = f"impossible (p={self.p})" if self.impossible else "inconclusive"
        if self.incomplete:
            text += " [factorization of c1 incomplete]"
        return text

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome,
            "p": None if self.p is None else str(self.p),
            "trace": [[str(p), str(g), str(h)] for p, g, h in self.trace],
            "incomplete": self.incomplete,
            "note": self.note,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExclusionVerdict":
        return cls(
            outcome=data["outcome"],
            p=None if data.get("p") is None else int(data["p"]),
            trace=tuple(tuple(int(v) for v in row) for row in data.get("trace", [])),
            incomplete=bool(data.get("incomplete", False)),
            note=data.get("note"),
        )


@dataclass(frozen=True)
class PrimitiveReport:
    # primitive[k - 1] holds the primitive primes of F_0^k
    primitive: Tuple[Tuple[int, ...], ...]
    truncated_at: Optional[int] = None
    note: Optional[str] = None

    def at(self, k: int) -> Tuple[int, ...]:
        return self.primitive[k - 1]

    def to_dict(self) -> dict:
        return {
            "n": len(self.primitive),
            "primitive": {
                str(k): [str(p) for p in primes]
                for k, primes in enumerate(self.primitive, start=1)
            },
            "truncated_at": self.truncated_at,
            "note": self.note,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PrimitiveReport":
        table = data["primitive"]
        return cls(
            primitive=tuple(
                tuple(int(p) for p in table[str(k)]) for k in range(1, len(table) + 1)
            ),
            truncated_at=data.get("truncated_at"),
            note=data.get("note"),
        )


@dataclass(frozen=True)
class PrimitiveCheck:
    """Primitive-prime verification for one cycle of exact period n"""

    n: int
    report: Optional[PrimitiveReport] = None
    thm_primes_of_u1: Optional[bool] = None
    count_bound: Optional[bool] = None
    zero_orbit: Optional[bool] = None
    note: Optional[str] = None

    def to_dict(self) -> dict:
        data = {
            "n": self.n,
            "primitive": {} if self.report is None else self.report.to_dict()["primitive"],
            "thm_primes_of_u1": VACUOUS if self.thm_primes_of_u1 is None else self.thm_primes_of_u1,
            "count_bound": VACUOUS if self.count_bound is None else self.count_bound,
            "zero_orbit_consistency": VACUOUS if self.zero_orbit is None else self.zero_orbit,
        }
        if self.note:
            data["note"] = self.note
        return data


@dataclass(frozen=True)
class HeightCounts:
    N: int
    d: int
    variant: str  # "reduced" or "pairs"
    s_count: int
    sd_count: int
    ratio: Fraction
    predicted: float

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "d": self.d,
            "variant": self.variant,
            "s_count": str(self.s_count),
            "sd_count": str(self.sd_count),
            "ratio": str(self.ratio),
            "ratio_float": float(self.ratio),
            "predicted": self.predicted,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "HeightCounts":
        return cls(
            N=int(data["N"]),
            d=int(data["d"]),
            variant=data["variant"],
            s_count=int(data["s_count"]),
            sd_count=int(data["sd_count"]),
            ratio=Fraction(data["ratio"]),
            predicted=float(data["predicted"]),
        )


@dataclass(frozen=True)
class CensusFinding:
    c: BigRat
    record: PeriodicPointRecord

    def to_dict(self) -> dict:
        return {"c": str(self.c), **self.record.to_dict()}

    @classmethod
    def from_dict(cls, data: dict) -> "CensusFinding":
        return cls(c=parse_rational(data["c"]), record=PeriodicPointRecord.from_dict(data))


@dataclass(frozen=True)
class CensusFailure:
    c: BigRat
    n: int
    message: str

    def to_dict(self) -> dict:
        return {"c": str(self.c), "n": self.n, "message": self.message}

    @classmethod
    def from_dict(cls, data: dict) -> "CensusFailure":
        return cls(c=parse_rational(data["c"]), n=int(data["n"]), message=data["message"])


@dataclass(frozen=True)
class CensusReport:
    d: int
    N: int
    n_max: int
    s_count: int  # |S(N)| = |P(N)|
    sd_reduced: int
    sd_pairs: int
    p_count: int
    pd_count: int  # c with a periodic point of period <= n_max
    predicted: float
    findings: Tuple[CensusFinding, ...] = ()
    failures: Tuple[CensusFailure, ...] = ()

    @property
    def ratio_reduced(self) -> Fraction:
        return Fraction(self.sd_reduced, self.s_count)

    @property
    def ratio_pairs(self) -> Fraction:
        return Fraction(self.sd_pairs, self.s_count)

    @property
    def ratio_periodic(self) -> Fraction:
        return Fraction(self.pd_count, self.p_count)

    def constants(self) -> List[BigRat]:
        """Distinct c with at least one finding, in census order"""
        seen: List[BigRat] = []
        for finding in self.findings:
            if finding.c not in seen:
                seen.append(finding.c)
        return seen

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "N": self.N,
            "n_max": self.n_max,
            "counts": {
                "S": str(self.s_count),
                "S_d": {"reduced": str(self.sd_reduced), "pairs": str(self.sd_pairs)},
                "P": str(self.p_count),
                "P_d": str(self.pd_count),
            },
            "ratio": {
                "reduced": str(self.ratio_reduced),
                "pairs": str(self.ratio_pairs),
                "periodic": str(self.ratio_periodic),
            },
            "predicted": self.predicted,
            "findings": [finding.to_dict() for finding in self.findings],
            "failures": [failure.to_dict() for failure in self.failures],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CensusReport":
        counts = data["counts"]
        return cls(
            d=int(data["d"]),
            N=int(data["N"]),
            n_max=int(data["n_max"]),
            s_count=int(counts["S"]),
            sd_reduced=int(counts["S_d"]["reduced"]),
            sd_pairs=int(counts["S_d"]["pairs"]),
            p_count=int(counts["P"]),
            pd_count=int(counts["P_d"]),
            predicted=float(data["predicted"]),
            findings=tuple(CensusFinding.from_dict(f) for f in data["findings"]),
            failures=tuple(CensusFailure.from_dict(f) for f in data["failures"]),
        )
