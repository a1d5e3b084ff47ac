"""Command-line interface: series, counts, verification suites, conversions.

Exit-code contract: 0 on success, 1 when a verification or internal
consistency check fails, 2 on usage or input errors.  Output is
byte-deterministic for fixed inputs and flags, except for the ``elapsed_ms``
field of count reports.

The truncation order defaults to 12 and is capped; the cap is 64 unless
overridden by the ``NROOTED_MAX_ORDER`` environment variable, and an
explicit ``--max-order`` flag takes precedence over both.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import BoundExceededError, ConsistencyError
from .qft import m0_series, m1_closed_form, m_count, m_series, z_np_series, z_series
from .relations import (
    VerificationReport,
    b_table,
    mn_in_m1,
    r_series,
    verify_ode_m0,
    verify_ode_m1,
    verify_ode_z0,
    zj_over_z0_in_m1,
)
from .ribbon import (
    count_maps_by_division,
    enumerate_maps,
    genus_profile,
    map_from_json,
    map_to_json,
)
from .series import Series
from .wick import (
    bijection_class_multiset,
    contraction_from_json,
    contraction_to_json,
    count_connected_classes,
    from_map,
    to_map,
    total_weighted_classes,
)

__all__ = ["main", "entry_point", "CountReport"]

DEFAULT_ORDER = 12
DEFAULT_MAX_ORDER = 64

#: (N, e) pairs covered by the bijection suite at desk scale.
BIJECTION_CASES = [(1, 0), (1, 1), (1, 2), (2, 1), (2, 2), (3, 2), (1, 3)]
FIBER_CASES = [(1, 1), (1, 2), (2, 1)]


@dataclass
class CountReport:
    """Result of one counting run, serialized as the count-command JSON."""

    n_roots: int
    edges: int
    method: str
    value: int
    genus_profile: dict[int, int] | None = None
    elapsed_ms: int = 0

    def to_json_dict(self) -> dict:
        out: dict = {
            "n_roots": self.n_roots,
            "edges": self.edges,
            "method": self.method,
            "value": self.value,
        }
        if self.genus_profile is not None:
            out["genus_profile"] = {str(g): c for g, c in self.genus_profile.items()}
        out["elapsed_ms"] = self.elapsed_ms
        return out


def _resolve_max_order(flag_value: int | None) -> int:
    if flag_value is not None:
        return flag_value
    env = os.environ.get("NROOTED_MAX_ORDER")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ValueError(
                f"NROOTED_MAX_ORDER must be an integer, got {env!r}"
            ) from None
    return DEFAULT_MAX_ORDER


def _checked_order(args) -> int:
    order = args.order
    cap = _resolve_max_order(getattr(args, "max_order", None))
    if order < 0:
        raise ValueError("order must be non-negative")
    if order > cap:
        raise ValueError(f"order {order} exceeds the configured maximum {cap}")
    return order


# ---------------------------------------------------------------------------
# series
# ---------------------------------------------------------------------------


def _series_for(args) -> Series:
    order = _checked_order(args)
    family = args.family
    if family == "m0":
        return m0_series(order)
    if family == "m":
        if args.n is None or args.n < 1:
            raise ValueError("family m requires --n >= 1")
        return m_series(args.n, order)
    if family == "z":
        if args.n is None or args.n < 0:
            raise ValueError("family z requires --n >= 0")
        return z_series(args.n, order)
    if family == "znp":
        if args.n is None or args.n < 0:
            raise ValueError("family znp requires --n >= 0")
        if args.p is None or args.p < 0:
            raise ValueError("family znp requires --p >= 0")
        return z_np_series(args.n, args.p, order)
    raise ValueError(f"unknown family {family!r}")


def _format_series(series: Series, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(series.to_json_dict(), indent=2)
    if fmt == "csv":
        rows = [
            f"{p},{series.coefficient(p)}"
            for p in range(series.order + 1)
            if series.coefficient(p) != 0
        ]
        return "\n".join(rows)
    if fmt == "text":
        return series.format_terms()
    raise ValueError(f"unknown format {fmt!r}")


def _cmd_series(args) -> int:
    print(_format_series(_series_for(args), args.format))
    return 0


# ---------------------------------------------------------------------------
# count
# ---------------------------------------------------------------------------


def _cmd_count(args) -> int:
    n, e = args.n, args.edges
    if n < 1:
        raise ValueError("--n must be at least 1")
    if e < 0:
        raise ValueError("--edges must be non-negative")
    started = time.monotonic()
    profile: dict[int, int] | None = None

    if args.method == "theorem2":
        value = m_count(n, e)
    elif args.method == "closed-form":
        if n != 1:
            raise ValueError("method closed-form applies only to --n 1")
        value = m1_closed_form(e)
    elif args.method == "oracle-ribbon":
        classes = enumerate_maps(n, e)
        value = len(classes)
        division = count_maps_by_division(n, e)
        if division != value:
            raise ConsistencyError(
                f"enumeration found {value} classes but labeled division gives {division}"
            )
        profile = genus_profile(n, e)
    elif args.method == "oracle-wick":
        value = count_connected_classes(n, e, workers=args.threads)
    else:
        raise ValueError(f"unknown method {args.method!r}")

    elapsed_ms = int(round((time.monotonic() - started) * 1000))
    report = CountReport(n, e, args.method, value, profile, elapsed_ms)
    print(json.dumps(report.to_json_dict(), indent=2))
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _equal_series_report(identity: str, lhs: Series, rhs: Series) -> VerificationReport:
    order = min(lhs.order, rhs.order)
    for p in range(order + 1):
        if lhs.coefficient(p) != rhs.coefficient(p):
            return VerificationReport(
                identity=identity,
                order_checked=order,
                passed=False,
                first_failure_power=p,
                detail=f"{lhs.coefficient(p)} != {rhs.coefficient(p)}",
            )
    return VerificationReport(identity, order, True, None)


def _value_report(identity: str, order: int, got, expected) -> VerificationReport:
    if got == expected:
        return VerificationReport(identity, order, True, None)
    return VerificationReport(
        identity, order, False, order, detail=f"{got} != {expected}"
    )


def _attempt(identity: str, order: int, thunk) -> VerificationReport:
    """Run a self-validating construction; a ConsistencyError means failure."""
    try:
        thunk()
    except ConsistencyError as exc:
        return VerificationReport(identity, order, False, None, detail=str(exc))
    return VerificationReport(identity, order, True, None)


def _suite_ode(order: int) -> list[VerificationReport]:
    return [verify_ode_m1(order), verify_ode_m0(order), verify_ode_z0(order)]


# Multiples N! λ^{2N-2} M_N written in M₁ and λ; terms are (coeff, λ-power,
# M₁-power).  N = 1 is the degenerate member of the family (M₁ itself).
_M1_IDENTITIES: dict[int, list[tuple[int, int, int]]] = {
    1: [(1, 0, 1)],
    2: [(-1, 0, 0), (1, 0, 1), (-2, 2, 2)],
    3: [(-1, 0, 0), (1, 0, 1), (7, 2, 1), (-9, 2, 2), (12, 4, 3)],
    4: [
        (-1, 0, 0),
        (-15, 2, 0),
        (1, 0, 1),
        (47, 2, 1),
        (-34, 2, 2),
        (-112, 4, 2),
        (144, 4, 3),
        (-144, 6, 4),
    ],
    5: [
        (-1, 0, 0),
        (-93, 2, 0),
        (1, 0, 1),
        (216, 2, 1),
        (633, 4, 1),
        (-125, 2, 2),
        (-1875, 4, 2),
        (1300, 4, 3),
        (2800, 6, 3),
        (-3600, 6, 4),
        (2880, 8, 5),
    ],
}


def _m1_identity_report(n: int, order: int) -> VerificationReport:
    from math import factorial

    m1 = m_series(1, order)
    rhs = Series.zero(order)
    m1_power = Series.one(order)
    by_power: dict[int, list[tuple[int, int]]] = {}
    for coeff, lam, mpow in _M1_IDENTITIES[n]:
        by_power.setdefault(mpow, []).append((coeff, lam))
    for mpow in range(max(by_power) + 1):
        for coeff, lam in by_power.get(mpow, []):
            rhs = rhs + Series.monomial(coeff, lam, order) * m1_power
        m1_power = m1_power * m1
    lhs = Series.monomial(factorial(n), 2 * n - 2, order) * m_series(n, order)
    return _equal_series_report(f"m{n}-in-m1", lhs, rhs)


def _suite_theorem3(order: int) -> list[VerificationReport]:
    from math import factorial

    reports: list[VerificationReport] = []

    table = b_table(12)
    ok = True
    for n in range(13):
        if table.value(n, 0) != factorial(n) or table.value(n, n) != 1:
            ok = False
        if n >= 1 and table.value(n, n - 1) != (3 * n - 1) * n // 2:
            ok = False
    reports.append(
        VerificationReport("b-closed-forms", 12, ok, None if ok else 0)
    )

    for n in range(1, 7):
        reports.append(
            _attempt(f"z0-derivative-basis-n{n}", order, lambda n=n: _check_oop(n, order))
        )

    reports.append(
        _attempt(
            "z1-over-z0-is-m1",
            order,
            lambda: _check_z1_shape(order),
        )
    )
    for n in range(2, 6):
        reports.append(_m1_identity_report(n, order))
        reports.append(
            _attempt(f"m{n}-in-m1-closure", order, lambda n=n: mn_in_m1(n, order))
        )
    return reports


def _check_oop(n: int, order: int) -> None:
    """λⁿ Z₀⁽ⁿ⁾ = Σ_k (−1)^{n−k} B_{n,2k−1} R_{2k−1}, as truncated series."""
    z0 = z_series(0, order + n)
    deriv = z0
    for _ in range(n):
        deriv = deriv.derivative()
    lhs = deriv.shifted(n).truncate(order)
    table = b_table(n)
    rhs = Series.zero(order)
    for k in range(n + 1):
        rhs = rhs + r_series(2 * k - 1, order) * ((-1) ** (n - k) * table.value(n, k))
    if lhs != rhs:
        raise ConsistencyError(f"derivative-basis identity fails at n={n}")


def _check_z1_shape(order: int) -> None:
    poly = zj_over_z0_in_m1(1, order)
    c0, c1 = poly.coefficient(0), poly.coefficient(1)
    if poly.degree != 1 or not c0.is_zero or c1.items() != [(0, Fraction(1))]:
        raise ConsistencyError("Z₁/Z₀ should be exactly M₁")


def _suite_tables(order: int) -> list[VerificationReport]:
    reports = []
    m1_row = [m_count(1, e) for e in range(7)]
    reports.append(
        _value_report("m1-table", 12, m1_row, [1, 2, 10, 74, 706, 8162, 110410])
    )
    m2 = m_series(2, 12)
    reports.append(
        _value_report(
            "m2-table",
            12,
            [m2.coefficient(2 * e) for e in range(7)],
            [0, 1, 13, 165, 2273, 34577, 581133],
        )
    )
    m3 = m_series(3, 12)
    reports.append(
        _value_report(
            "m3-table",
            12,
            [m3.coefficient(2 * e) for e in range(7)],
            [0, 0, 6, 172, 3834, 81720, 1775198],
        )
    )
    reports.append(
        _value_report(
            "znp-1-1-coefficient", 5, z_np_series(1, 1, 5).coefficient(5), 90
        )
    )
    return reports


def _suite_bijection(threads: int) -> list[VerificationReport]:
    reports = []
    for n, e in BIJECTION_CASES:
        expected = m_count(n, e)
        enum_count = len(enumerate_maps(n, e))
        division = count_maps_by_division(n, e)
        wick = count_connected_classes(n, e, workers=threads)
        values = {
            "enumeration": enum_count,
            "division": division,
            "contraction": wick,
            "series": expected,
        }
        ok = len(set(values.values())) == 1
        reports.append(
            VerificationReport(
                f"oracle-agreement-n{n}-e{e}",
                2 * e,
                ok,
                None if ok else 2 * e,
                detail="" if ok else str(values),
            )
        )
    for n, e in FIBER_CASES:
        from math import factorial

        fibers = bijection_class_multiset(n, e)
        classes = set(enumerate_maps(n, e))
        ok = set(fibers) == classes and all(
            v == factorial(2 * e) for v in fibers.values()
        )
        reports.append(
            VerificationReport(
                f"fiber-size-n{n}-e{e}", 2 * e, ok, None if ok else 2 * e
            )
        )
    return reports


def _cmd_verify(args) -> int:
    order = _checked_order(args)
    suites = {
        "ode": lambda: _suite_ode(order),
        "theorem3": lambda: _suite_theorem3(order),
        "tables": lambda: _suite_tables(order),
        "bijection": lambda: _suite_bijection(args.threads),
    }
    if args.suite == "all":
        selected = ["ode", "theorem3", "tables", "bijection"]
    else:
        selected = [args.suite]
    reports: list[VerificationReport] = []
    for name in selected:
        reports.extend(suites[name]())
    print(json.dumps([r.to_json_dict() for r in reports], indent=2))
    return 0 if all(r.passed for r in reports) else 1


# ---------------------------------------------------------------------------
# convert
# ---------------------------------------------------------------------------


def _cmd_convert(args) -> int:
    if args.input == "-":
        raw = sys.stdin.read()
    else:
        with open(args.input, "r", encoding="utf-8") as fh:
            raw = fh.read()
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ValueError(f"input is not valid JSON: {exc}") from None

    if args.to == "contraction":
        m = map_from_json(data)
        print(json.dumps(contraction_to_json(from_map(m)), indent=2))
    else:
        w = contraction_from_json(data)
        from .ribbon import canonical_form

        print(json.dumps(map_to_json(canonical_form(to_map(w))), indent=2))
    return 0


# ---------------------------------------------------------------------------
# parser & dispatch
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nrooted",
        description="Exact enumeration of N-rooted maps: series, oracles, identities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_series = sub.add_parser("series", help="print a generating-function series")
    p_series.add_argument(
        "--family", required=True, choices=["z", "znp", "m", "m0"]
    )
    p_series.add_argument("--n", type=int, default=None)
    p_series.add_argument("--p", type=int, default=None)
    p_series.add_argument("--order", type=int, default=DEFAULT_ORDER)
    p_series.add_argument("--max-order", type=int, default=None, dest="max_order")
    p_series.add_argument(
        "--format", choices=["json", "csv", "text"], default="text"
    )
    p_series.set_defaults(func=_cmd_series)

    p_count = sub.add_parser("count", help="count N-rooted maps with e edges")
    p_count.add_argument("--n", type=int, required=True)
    p_count.add_argument("--edges", type=int, required=True)
    p_count.add_argument(
        "--method",
        required=True,
        choices=["theorem2", "closed-form", "oracle-ribbon", "oracle-wick"],
    )
    p_count.add_argument("--threads", type=int, default=1)
    p_count.set_defaults(func=_cmd_count)

    p_verify = sub.add_parser("verify", help="run identity/oracle verification suites")
    p_verify.add_argument(
        "--suite",
        required=True,
        choices=["ode", "theorem3", "bijection", "tables", "all"],
    )
    p_verify.add_argument("--order", type=int, default=DEFAULT_ORDER)
    p_verify.add_argument("--max-order", type=int, default=None, dest="max_order")
    p_verify.add_argument("--threads", type=int, default=1)
    p_verify.set_defaults(func=_cmd_verify)

    p_convert = sub.add_parser(
        "convert", help="convert between map JSON and contraction JSON"
    )
    p_convert.add_argument(
        "--input", default="-", help="path to a JSON file, or - for stdin"
    )
    p_convert.add_argument("--to", required=True, choices=["map", "contraction"])
    p_convert.set_defaults(func=_cmd_convert)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help; pass both through.
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConsistencyError as exc:
        print(f"consistency failure: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
