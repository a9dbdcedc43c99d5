"""Command-line front end: construct, verify, classify, crosscheck.

Machine-readable JSON goes to stdout (or --out); human summaries and
timing go to stderr.  With timing kept off the payload, identical
invocations produce byte-identical output whatever the thread count.

Exit status: 0 every check passed, 1 a construction or a mathematical
check failed, 2 bad usage or unreadable input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from . import ConsistencyError, GeometryError, NotRecoverable, OvoidConstructionError
from .analysis import (
    Check,
    VerificationReport,
    classical_sweep,
    disjoint_planes_check,
    is_classical,
    kernel_span,
    orbit_count_trace_zero,
    recover_ovoid_via_frame,
    verify_hyperoval,
)
from .constructions import (
    PointSet,
    eq1_point_set,
    h_from_ovoid,
    h_lambda,
    h_q2_complement,
    sc_decompose,
    sc_hyperoval,
)
from .gf2h import elements_to_hex
from .ovoids import classical_ovoid, tits_ovoid
from .quadrics import Setting, build_setting

_H_OF_Q = {2: 1, 4: 2, 8: 3, 16: 4, 32: 5}

# the full six-dimensional incidence model is materialized up front;
# its line table alone passes 4 GB at q = 32, so commands stop there
_MODEL_LIMIT = 16


@dataclass(frozen=True)
class RunConfig:
    """One parsed invocation; validate() enforces flag consistency."""

    command: str
    q: int
    family: Optional[str] = None
    lam: Optional[str] = None
    b: Optional[Tuple[int, int, int, int]] = None
    ovoid_kind: str = "classical"
    infile: Optional[str] = None
    outfile: Optional[str] = None
    jobs: int = 1
    scan: Optional[str] = None
    seed: int = 0

    def validate(self) -> None:
        if self.q not in _H_OF_Q:
            raise ValueError(f"q must be one of {sorted(_H_OF_Q)}, not {self.q}")
        if self.q > _MODEL_LIMIT:
            raise ValueError(
                f"q={self.q} parses but the incidence model is sized for q <= "
                f"{_MODEL_LIMIT}; the library's ovoid layer still works there"
            )
        if self.jobs < 1:
            raise ValueError("--jobs wants a positive thread count")
        if self.scan == "exhaustive" and self.q > 4:
            raise ValueError("exhaustive plane scans stop at q=4; use classes or sample")
        if self.command in ("construct", "verify"):
            self._validate_build()
        if self.command == "crosscheck":
            if self.q == 2:
                raise ValueError("the parametric routes start at q=4; q=2 has only "
                                 "the complement construction")
            if self.lam not in (None, "all"):
                self.lambda_value()

    def _validate_build(self) -> None:
        if self.infile is not None:
            if self.family or self.lam or self.b:
                raise ValueError("--in replaces the construction flags; drop them")
            return
        family = self.family
        if family is None:
            if self.q != 2:
                raise ValueError("pick a construction family with --family")
            family = "q2"
        if family == "q2" and self.q != 2:
            raise ValueError("the complement family exists only at q=2")
        if family in ("lambda", "eq1"):
            if self.q == 2:
                raise ValueError(f"--family {family} starts at q=4; at q=2 use "
                                 "the complement (--family q2)")
            if self.lam in (None, "all"):
                raise ValueError(f"--family {family} needs a single --lambda value")
            self.lambda_value()
        if family == "ovoid":
            if self.ovoid_kind == "classical" and self.b is None:
                raise ValueError("a classical ovoid needs --b a,b,c,d (hex)")
            if self.ovoid_kind == "tits" and self.q != 8:
                raise ValueError("the Suzuki-Tits ovoid needs q=8 here")
            if self.ovoid_kind == "tits" and self.b is not None:
                raise ValueError("--b has no role for the Tits ovoid")
        elif self.b is not None:
            raise ValueError("--b only applies to --family ovoid")

    def lambda_value(self) -> int:
        try:
            v = int(str(self.lam), 16)
        except ValueError:
            raise ValueError(f"--lambda wants a hex field element, not {self.lam!r}")
        if not 0 < v < self.q:
            raise ValueError(f"--lambda must be a nonzero element of GF({self.q})")
        return v

    def resolved_family(self) -> str:
        return self.family or "q2"


def _parse_b(text: str, q: int) -> Tuple[int, int, int, int]:
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("--b wants four comma-separated hex values")
    try:
        vals = tuple(int(p, 16) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--b could not parse {text!r} as hex")
    if any(v < 0 or v >= q for v in vals):
        raise argparse.ArgumentTypeError(f"--b entries must lie in GF({q})")
    if not any(vals):
        raise argparse.ArgumentTypeError("--b must be nonzero")
    return vals  # type: ignore[return-value]


def _hexed(values: Sequence[int]) -> str:
    return ":".join(elements_to_hex(values))


def _emit(payload: Dict, outfile: Optional[str]) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if outfile:
        with open(outfile, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _note(msg: str) -> None:
    sys.stderr.write(msg + "\n")


# -- subject assembly ---------------------------------------------------------------


def _build_subject(setting: Setting, cfg: RunConfig) -> PointSet:
    family = cfg.resolved_family()
    if family == "q2":
        return h_q2_complement(setting)
    if family == "lambda":
        return h_lambda(setting, cfg.lambda_value())
    if family == "eq1":
        oval = eq1_point_set(setting, cfg.lambda_value())
        return sc_hyperoval(setting, sc_decompose(setting, oval), oval)
    if family == "ovoid":
        if cfg.ovoid_kind == "tits":
            return h_from_ovoid(setting, tits_ovoid(setting))
        return h_from_ovoid(setting, classical_ovoid(setting, cfg.b))
    raise ValueError(f"unknown family {family!r}")


def _load_subject(setting: Setting, path: str) -> PointSet:
    with open(path) as fh:
        data = json.load(fh)
    return PointSet.from_json(data, setting)


# -- commands -----------------------------------------------------------------------


def cmd_construct(cfg: RunConfig) -> int:
    setting = build_setting(_H_OF_Q[cfg.q])
    t0 = time.perf_counter()
    pset = _build_subject(setting, cfg)
    provenance = " ".join(f"{k}={v}" for k, v in pset.params)
    _note(f"{pset.size} points  {pset.tag} {provenance}".rstrip())
    _emit(pset.to_json(setting), cfg.outfile)
    _note(f"construct: {time.perf_counter() - t0:.2f}s")
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    setting = build_setting(_H_OF_Q[cfg.q])
    t0 = time.perf_counter()
    if cfg.infile is not None:
        try:
            pset = _load_subject(setting, cfg.infile)
        except (OSError, ValueError, KeyError, ConsistencyError) as exc:
            _note(f"error reading {cfg.infile}: {exc}")
            return 2
    else:
        pset = _build_subject(setting, cfg)

    report = verify_hyperoval(setting, pset)
    checks: List[Check] = list(report.checks)

    recovered = None
    try:
        recovered = recover_ovoid_via_frame(setting, pset)
    except NotRecoverable as exc:
        checks.append(
            Check(
                name="ovoid-recovery-round-trip",
                passed=False,
                counts={},
                witness={"reason": str(exc)},
            )
        )
    else:
        checks.append(
            Check(
                name="ovoid-recovery-round-trip",
                passed=True,
                counts={
                    "ovoid_points": recovered.size,
                    "contact_points": len(recovered.base_intersection(setting)),
                },
            )
        )

    if recovered is not None:
        checks.append(disjoint_planes_check(setting, pset, recovered))
        if not is_classical(setting, recovered):
            span = kernel_span(setting, pset, seed=cfg.seed, mode=cfg.scan)
            dim = span.span.projdim
            good = dim == 3 and span.span == setting.pi
            checks.append(
                Check(
                    name="conic-nuclei-span-the-base-solid",
                    passed=good,
                    counts={
                        "planes_scanned": span.n_scanned,
                        "conic_planes": len(span.nuclei),
                        "span_projdim": dim,
                    },
                    witness=None if good else {"projdim": dim},
                )
            )
            _note(f"plane scan coverage: {span.coverage}")

    full = VerificationReport(
        subject=report.subject,
        checks=tuple(checks),
        seconds=time.perf_counter() - t0,
    )
    _note(str(full))
    _note(f"verify: {full.seconds:.2f}s")
    _emit(full.to_json(), cfg.outfile)
    return 0 if full.ok else 1


def cmd_classify(cfg: RunConfig) -> int:
    setting = build_setting(_H_OF_Q[cfg.q])
    t0 = time.perf_counter()
    sweep = classical_sweep(setting, jobs=cfg.jobs)
    n_orbits, reps = orbit_count_trace_zero(setting.field)

    rows = []
    for (q, contact, tag), info in sorted(sweep.items()):
        rows.append(
            {
                "q": q,
                "contact": contact,
                "tag": tag,
                "count": info["count"],
                "first_b": _hexed(info["first_b"]),
            }
        )
        _note(
            f"class q={q} contact={contact} tag={tag}: "
            f"{info['count']} perturbations, first b={_hexed(info['first_b'])}"
        )

    secant_tags = {r["tag"] for r in rows if r["tag"] != "tangent"}
    expected = n_orbits + 1
    passed = len(rows) == expected and secant_tags == {format(r, "x") for r in reps}
    payload = {
        "q": cfg.q,
        "classes": rows,
        "class_count": len(rows),
        "expected_classes": expected,
        "trace_zero_orbit_count": n_orbits,
        "orbit_reps": [format(r, "x") for r in reps],
        "swept_constructible": sum(r["count"] for r in rows),
        "passed": passed,
    }
    _note(f"{len(rows)} classes (expected {expected})")
    _note(f"classify: {time.perf_counter() - t0:.2f}s")
    _emit(payload, cfg.outfile)
    return 0 if passed else 1


def cmd_crosscheck(cfg: RunConfig) -> int:
    setting = build_setting(_H_OF_Q[cfg.q])
    t0 = time.perf_counter()
    if cfg.lam in (None, "all"):
        lams = list(range(1, cfg.q))
    else:
        lams = [cfg.lambda_value()]

    entries = []
    all_agree = True
    for lam in lams:
        direct = h_lambda(setting, lam)
        oval = eq1_point_set(setting, lam)
        engine = sc_hyperoval(setting, sc_decompose(setting, oval), oval)
        refed = h_from_ovoid(setting, recover_ovoid_via_frame(setting, direct))
        agree = direct.indices == engine.indices == refed.indices
        all_agree &= agree
        entries.append(
            {"lambda": format(lam, "x"), "size": direct.size, "agree": agree}
        )
        _note(
            f"lambda={format(lam, 'x')}: {direct.size} points, three routes "
            + ("agree" if agree else "DISAGREE")
        )

    payload = {"q": cfg.q, "entries": entries, "passed": all_agree}
    _note(f"crosscheck: {time.perf_counter() - t0:.2f}s")
    _emit(payload, cfg.outfile)
    return 0 if all_agree else 1


_COMMANDS = {
    "construct": cmd_construct,
    "verify": cmd_verify,
    "classify": cmd_classify,
    "crosscheck": cmd_crosscheck,
}


# -- argument plumbing --------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kleinoval",
        description="Construct and verify hyperovals of the Klein quadric "
        "built from symplectic ovoids.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--q", type=int, required=True, metavar="Q",
                       help="field size, a power of 2 up to 32")
        p.add_argument("--out", dest="outfile", metavar="PATH",
                       help="write the JSON payload here instead of stdout")

    def build_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--family", choices=("lambda", "eq1", "ovoid", "q2"),
                       help="construction route (default q2 when q=2)")
        p.add_argument("--lambda", dest="lam", metavar="HEX",
                       help="field parameter for the lambda and eq1 families")
        p.add_argument("--b", metavar="A,B,C,D",
                       help="perturbation direction of a classical ovoid, hex csv")
        p.add_argument("--ovoid", dest="ovoid_kind",
                       choices=("classical", "tits"), default="classical",
                       help="ovoid family behind --family ovoid")

    p_con = sub.add_parser("construct", help="build a hyperoval, write it as JSON")
    common(p_con)
    build_flags(p_con)

    p_ver = sub.add_parser("verify", help="exhaustive incidence checks on a hyperoval")
    common(p_ver)
    build_flags(p_ver)
    p_ver.add_argument("--in", dest="infile", metavar="PATH",
                       help="verify a stored point set instead of constructing one")
    p_ver.add_argument("--scan", choices=("exhaustive", "classes", "sample"),
                       help="plane-scan budget for the nonclassical recovery stage "
                       "(default picks by field size)")
    p_ver.add_argument("--seed", type=int, default=0,
                       help="seed for sampled plane scans (default 0)")

    p_cls = sub.add_parser("classify", help="sweep perturbations, count classes")
    common(p_cls)
    p_cls.add_argument("--jobs", type=int, default=1,
                       help="worker threads for the sweep; output is identical "
                       "for every degree")

    p_crs = sub.add_parser("crosscheck", help="confirm the construction routes agree")
    common(p_crs)
    p_crs.add_argument("--lambda", dest="lam", metavar="HEX|all", default="all",
                       help="one parameter value, or all of them (default)")

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    b = None
    if getattr(args, "b", None) is not None:
        b = _parse_b(args.b, args.q)
    return RunConfig(
        command=args.command,
        q=args.q,
        family=getattr(args, "family", None),
        lam=getattr(args, "lam", None),
        b=b,
        ovoid_kind=getattr(args, "ovoid_kind", "classical"),
        infile=getattr(args, "infile", None),
        outfile=args.outfile,
        jobs=getattr(args, "jobs", 1),
        scan=getattr(args, "scan", None),
        seed=getattr(args, "seed", 0),
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        cfg.validate()
    except (argparse.ArgumentTypeError, ValueError) as exc:
        parser.error(str(exc))
    try:
        return _COMMANDS[cfg.command](cfg)
    except (OvoidConstructionError, ConsistencyError, GeometryError, ValueError) as exc:
        _note(f"error: {exc}")
        return 1
    except OSError as exc:
        _note(f"error: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
