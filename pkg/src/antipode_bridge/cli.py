"""Command-line front end.

Exit codes: 0 success, 1 check or precondition failure, 2 input error,
3 internal self-test failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from . import construction
from .analysis import (
    approximate_kkm_cells,
    best_star_distance,
    brute_intersection,
    resolution_sweep,
    sweep_to_json,
)
from .construction import build_extended, exposure_set, run_pipeline
from .cover import (
    CoverSpec,
    build_cover,
    random_ratio_spec,
    thicken,
    verify_cover,
    verify_kkm,
    verify_nondegenerate,
)
from .errors import PreconditionError, SpecError
from .geometry import MAX_DIM, MAX_RESOLUTION, format_point, format_rational
from .render import DEFAULT_PALETTE, render_svg

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_SELF_TEST = 3

DEFAULT_RESOLUTION = 6


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    spec: Optional[str] = None
    dim: int = 2
    resolution: Optional[int] = None
    sweep: List[int] = field(default_factory=list)
    out: Optional[str] = None
    format: str = "json"
    seed: Optional[int] = None
    degenerate: bool = False
    size: int = 600
    palette: Sequence[str] = DEFAULT_PALETTE
    checks: Sequence[str] = ("cover", "kkm", "nondegenerate")
    timings: bool = False

    def validate(self) -> "RunConfig":
        if not 1 <= self.dim <= MAX_DIM:
            raise InputError(f"--dim must lie in [1, {MAX_DIM}]")
        for n in ([self.resolution] if self.resolution is not None else []) + list(self.sweep):
            if not 1 <= n <= MAX_RESOLUTION:
                raise InputError(f"resolution must lie in [1, {MAX_RESOLUTION}], got {n}")
        if self.size < 50:
            raise InputError("--size must be at least 50 px")
        return self


# -- io ----------------------------------------------------------------------

def load_spec(path: Optional[str]) -> CoverSpec:
    if not path:
        raise InputError("--spec is required")
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read spec: {exc}") from exc
    try:
        return CoverSpec.from_json(text)
    except SpecError as exc:
        raise InputError(str(exc)) from exc


def write_output(text: str, out: Optional[str]) -> None:
    if not out:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(out))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _resolution(config: RunConfig, spec: CoverSpec) -> int:
    if config.resolution is not None:
        return config.resolution
    return spec.n if spec.n is not None else DEFAULT_RESOLUTION


# -- commands ----------------------------------------------------------------

def cmd_verify(config: RunConfig) -> int:
    spec = load_spec(config.spec)
    n = _resolution(config, spec)
    cover = build_cover(spec)
    checks = {"cover": verify_cover, "kkm": verify_kkm, "nondegenerate": verify_nondegenerate}
    reports = [checks[name](cover, n) for name in config.checks]
    passed = all(r.passed for r in reports)
    if config.format == "json":
        text = _dump({"passed": passed, "N": n, "checks": [r.to_dict() for r in reports]})
    else:
        lines = []
        for r in reports:
            lines.append(f"{r.name}: {'PASS' if r.passed else 'FAIL'} (N={n}, {r.checked} points)")
            for w in r.to_dict()["witnesses"]:
                where = " ".join(w["point"])
                lines.append(f"  witness ({where})" + (f" set {w['set']}" if "set" in w else ""))
        text = "\n".join(lines) + "\n"
    write_output(text, config.out)
    return EXIT_OK if passed else EXIT_FAILED


def cmd_run(config: RunConfig) -> int:
    spec = load_spec(config.spec)
    n = _resolution(config, spec)
    try:
        report = run_pipeline(build_cover(spec), n)
    except PreconditionError as exc:
        write_output(_dump({"error": "precondition", "message": str(exc), "N": n}), config.out)
        return EXIT_FAILED
    if config.format == "json":
        text = report.to_json(include_timings=config.timings)
    else:
        doc = report.to_dict()["outcome"]
        lines = [f"outcome: {report.outcome} (N={n}, thickened={str(report.thickened).lower()})"]
        for p in doc.get("points", []):
            lines.append("  point: " + " ".join(p))
        for w in doc.get("witnesses", []):
            lines.append(f"  witness: {w}")
        if "coverStats" in doc:
            lines.append(f"  stats: {json.dumps(doc['coverStats'], sort_keys=True)}")
        text = "\n".join(lines) + "\n"
    write_output(text, config.out)
    return EXIT_SELF_TEST if report.outcome == construction.VIOLATION else EXIT_OK


def _oracle_one(cover, n: int) -> dict:
    brute = brute_intersection(cover, n)
    exposed = exposure_set(cover, n)
    duality = {g.antipode() for g in exposed} == set(brute)
    doc = {
        "N": n,
        "intersection": [format_point(g.point) for g in brute],
        "exposure": [format_point(g.point) for g in exposed],
        "duality": duality,
    }
    certs = approximate_kkm_cells(cover, n)
    doc["stars"] = [c.to_dict() for c in certs]
    target = cover.spec.target
    best = best_star_distance(certs, target) if target is not None else None
    doc["bestStarDistance"] = None if best is None else format_rational(best)
    return doc


def cmd_oracle(config: RunConfig) -> int:
    spec = load_spec(config.spec)
    cover = build_cover(spec)
    if config.sweep:
        rows = resolution_sweep(spec, config.sweep)
        ok = True
        for row in rows:
            brute = brute_intersection(cover, row.n)
            ok &= {g.antipode() for g in exposure_set(cover, row.n)} == set(brute)
        if config.format == "json":
            text = sweep_to_json(rows)
        else:
            text = "".join(
                f"N={r.n} intersection={r.intersection_count} exposure={r.exposure_count} "
                f"stars={r.star_count} best={r.to_dict()['bestStarDistance']}\n"
                for r in rows
            )
        write_output(text, config.out)
        return EXIT_OK if ok else EXIT_SELF_TEST

    n = _resolution(config, spec)
    try:
        doc = _oracle_one(cover, n)
    except PreconditionError as exc:
        write_output(_dump({"error": "precondition", "message": str(exc), "N": n}), config.out)
        return EXIT_FAILED
    if config.format == "json":
        text = _dump(doc)
    else:
        text = (
            f"N={n} intersection={len(doc['intersection'])} exposure={len(doc['exposure'])} "
            f"stars={len(doc['stars'])} best={doc['bestStarDistance']} duality={'ok' if doc['duality'] else 'BROKEN'}\n"
        )
    write_output(text, config.out)
    return EXIT_OK if doc["duality"] else EXIT_SELF_TEST


def cmd_gen(config: RunConfig) -> int:
    if config.seed is None:
        raise InputError("--seed is required")
    spec = random_ratio_spec(config.seed, config.dim, degenerate=config.degenerate)
    write_output(spec.to_json(), config.out)
    return EXIT_OK


def cmd_render(config: RunConfig) -> int:
    spec = load_spec(config.spec)
    if spec.dim != 2:
        raise InputError(f"rendering needs dim = 2, got {spec.dim}")
    n = _resolution(config, spec)
    cover = build_cover(spec)
    if not verify_nondegenerate(cover, n).passed:
        cover = thicken(cover)
    ext = build_extended(cover, n)
    svg = render_svg(ext, exposure_set(cover, n), size=config.size, palette=config.palette)
    write_output(svg, config.out)
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "run": cmd_run,
    "oracle": cmd_oracle,
    "gen": cmd_gen,
    "render": cmd_render,
}


# -- argument parsing --------------------------------------------------------

def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="antipode-bridge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, spec=True):
        if spec:
            p.add_argument("--spec", help="cover spec JSON file")
        p.add_argument("--out", help="write output here instead of stdout")
        p.add_argument("--format", choices=("json", "text"), default="json")

    p = sub.add_parser("verify", help="check cover, KKM and non-degeneracy conditions on the grid")
    common(p)
    p.add_argument("--resolution", "-N", type=int)
    p.add_argument("--checks", type=lambda s: [c for c in s.split(",") if c], default=["cover", "kkm", "nondegenerate"])

    p = sub.add_parser("run", help="run the sphere extension pipeline")
    common(p)
    p.add_argument("--resolution", "-N", type=int)
    p.add_argument("--timings", action="store_true", help="include wall-clock timings (breaks byte determinism)")

    p = sub.add_parser("oracle", help="brute-force intersection, star certificates, duality check")
    common(p)
    p.add_argument("--resolution", "-N", type=int)
    p.add_argument("--sweep", type=_int_list, default=[])

    p = sub.add_parser("gen", help="emit a random ratio cover spec")
    common(p, spec=False)
    p.add_argument("--seed", type=int)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--degenerate", action="store_true")

    p = sub.add_parser("render", help="SVG of the unfolded octahedron (d = 2)")
    p.add_argument("--spec", help="cover spec JSON file")
    p.add_argument("--out")
    p.add_argument("--resolution", "-N", type=int)
    p.add_argument("--size", type=int, default=600)
    p.add_argument("--palette", type=lambda s: [c.strip() for c in s.split(",") if c.strip()], default=list(DEFAULT_PALETTE))
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    kwargs = {k: v for k, v in vars(args).items() if v is not None and k in RunConfig.__dataclass_fields__}
    try:
        config = RunConfig(**kwargs).validate()
        bad = [c for c in config.checks if c not in ("cover", "kkm", "nondegenerate")]
        if bad:
            raise InputError(f"unknown checks: {', '.join(bad)}")
        return COMMANDS[config.command](config)
    except (InputError, SpecError, ValueError) as exc:
        print(f"antipode-bridge: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
