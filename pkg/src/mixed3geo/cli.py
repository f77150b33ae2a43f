"""Command-line front end for the verification suites.

Exit codes: 0 when every assertion passes, 1 when any fails, 2 on a
configuration error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .errors import ConfigError, GeometryError
from .jet_chart import DEFAULT_FD_STEP
from .models import MODEL_DESCRIPTIONS, PERTURBABLE, list_models
from .suites import DEFAULT_MODELS, SUITES, SuiteSpec, applicable, emit_report, list_suites, run_suite

SEED_ENV = "MIXED3GEO_SEED"
EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_CONFIG)


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 42
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV}={raw!r} is not an integer") from None


def _parse_tol(items: list[str]) -> dict[str, float]:
    out = {}
    for item in items:
        key, sep, val = item.partition("=")
        if not sep:
            raise ConfigError(f"--tol expects KEY=VAL, got {item!r}")
        try:
            out[key] = float(val)
        except ValueError:
            raise ConfigError(f"--tol value for {key!r} is not a number: {val!r}") from None
    return out


def _expand(values: list[str] | None, everything, what: str) -> tuple[list[str], bool]:
    """Split comma lists; ``all`` expands to ``everything``.  Returns (items, expanded)."""
    items: list[str] = []
    expanded = False
    for v in values or ["all"]:
        for part in v.split(","):
            part = part.strip()
            if part == "all":
                items.extend(everything)
                expanded = True
            elif part:
                items.append(part)
    if not items:
        raise ConfigError(f"no {what} given")
    return list(dict.fromkeys(items)), expanded


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mixed3geo",
                description="Verify curvature and structure identities of mixed 3-Sasakian models.")
    p.add_argument("--suite", action="append",
                   help="suite id, comma list, or 'all' (default: all); repeatable")
    p.add_argument("--model", action="append",
                   help="model key, comma list, or 'all' (default: all); repeatable")
    p.add_argument("--points", type=int, default=32, help="sample points per run (default 32)")
    p.add_argument("--vectors", type=int, default=8,
                   help="random argument tuples per point (default 8)")
    p.add_argument("--seed", type=int, default=None,
                   help=f"seed (default 42, or ${SEED_ENV} when set)")
    p.add_argument("--tol", action="append", default=[], metavar="KEY=VAL",
                   help="override a tolerance; repeatable")
    p.add_argument("--fd-step", type=float, default=DEFAULT_FD_STEP,
                   help=f"finite-difference base step (default {DEFAULT_FD_STEP:g})")
    p.add_argument("--perturb", choices=PERTURBABLE,
                   help="perturb one structure tensor by 1e-3 (negative control)")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--out", metavar="FILE", help="write the report here instead of stdout")
    p.add_argument("--list-models", action="store_true", help="print model keys and exit")
    p.add_argument("--list-suites", action="store_true", help="print suite ids and exit")
    return p


def _specs(args) -> list[SuiteSpec]:
    seed = args.seed if args.seed is not None else _default_seed()
    suites, suites_all = _expand(args.suite, sorted(SUITES), "suites")
    models, models_all = _expand(args.model, DEFAULT_MODELS, "models")
    tols = _parse_tol(args.tol)
    specs = []
    for mk in models:
        if mk not in MODEL_DESCRIPTIONS and not _key_shape_ok(mk):
            raise ConfigError(f"unknown model key {mk!r}")
        for s in suites:
            if s not in SUITES:
                raise ConfigError(f"unknown suite {s!r}")
            if (suites_all or models_all) and not applicable(s, mk):
                continue
            specs.append(SuiteSpec(s, mk, args.points, args.vectors, seed, tols,
                                   args.perturb, args.fd_step))
    if not specs:
        raise ConfigError("no applicable suite/model combination")
    return specs


def _key_shape_ok(key: str) -> bool:
    # keys with other m values resolve in build_model
    return key.split(":")[0] in ("flat-pq", "flat-mixed", "pseudo-sphere", "product")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.list_models or args.list_suites:
        text = "\n".join(t for t in (args.list_models and list_models(),
                                     args.list_suites and list_suites()) if t)
        print(text)
        return EXIT_PASS
    try:
        reports = [run_suite(spec) for spec in _specs(args)]
        data = emit_report(reports[0] if len(reports) == 1 else reports, args.format)
    except (ConfigError, GeometryError, ValueError) as exc:
        print(f"mixed3geo: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.write(data.decode())
    return EXIT_PASS if all(r.passed for r in reports) else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
