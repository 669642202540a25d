"""Command-line front end.

Subcommands::

    mabuchi solve   --phi0 EXPR --phi1 EXPR --domain A,B --nx N --nt N --method envelope|foliation
    mabuchi oracle  --name example3|example4 --nx N --nt N
    mabuchi verify  GRID.csv --checks c11,convexity --radius 0.2
    mabuchi images  --phi EXPR --psi EXPR --domain A,B

``mabuchi --job job.json`` reads the same settings from a JSON file whose keys
mirror the long option names plus ``command``. Exit status is 0 on success,
2 when the endpoints cannot be joined by a smooth geodesic, 1 on any other
error; errors are reported on one line starting with ``error:``.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from .envelope import barrier, envelope_grid
from .expr import parse_expression
from .foliation import NotSmoothlyConnectable, smooth_geodesic
from .grid import SpaceDomain, SpaceTimeGrid, read_grid_csv
from .oracles import oracle_grid
from .potential import gradient_image, image_distance, validate_potential
from .toric import ToricProblem
from .verify import CHECK_ORDER, DEFAULT_SEED, CheckRegion, run_checks

COMMANDS = ("solve", "oracle", "verify", "images")
METHODS = ("envelope", "foliation")
DEFAULT_CHECKS = {
    "envelope": ("convexity", "barrier", "lipschitz", "c11"),
    "foliation": ("ma_residual", "convexity", "barrier", "lipschitz", "energy"),
    "toric": ("convexity", "lipschitz"),
}
ALL_CHECKS = tuple(c for c in CHECK_ORDER if c != "blowup")


class CliError(Exception):
    pass


@dataclass
class JobConfig:
    command: str
    phi0: str | None = None
    phi1: str | None = None
    domain: str = "-1,1"
    nx: int = 129
    nt: int = 129
    method: str = "envelope"
    truncation: float | None = None
    checks: list[str] | None = None
    radius: float = 0.2
    corner: tuple[float, float] | None = None
    radii: tuple[float, ...] = (0.4, 0.2, 0.1)
    expect: str = "blowup"
    seed: int = DEFAULT_SEED
    name: str | None = None
    grid_file: str | None = None
    out: str | None = None
    report: str | None = None
    manifest: str | None = None
    foliation_json: str | None = None
    json_out: str | None = None
    tol: float = 1e-8
    summary: bool = False

    def validate(self) -> "JobConfig":
        if self.command not in COMMANDS:
            raise CliError(f"unknown command {self.command!r}; expected one of {', '.join(COMMANDS)}")
        if self.nx < 3 or self.nt < 3:
            raise CliError("grid sizes must be at least 3")
        if self.command == "solve":
            if self.method not in METHODS:
                raise CliError(f"unknown method {self.method!r}; expected envelope or foliation")
            if self.truncation is not None and self.method != "envelope":
                raise CliError("toric problems are solved with the envelope method")
            if not self.phi0 or not self.phi1:
                raise CliError("solve needs --phi0 and --phi1")
        if self.command == "verify":
            if not self.grid_file:
                raise CliError("verify needs a grid file")
            if not Path(self.grid_file).is_file():
                raise CliError(f"grid file {self.grid_file} does not exist")
        if self.command == "images" and (not self.phi0 or not self.phi1):
            raise CliError("images needs --phi and --psi")
        for name in ("out", "report", "manifest", "foliation_json", "json_out"):
            p = getattr(self, name)
            if p is not None and not Path(p).resolve().parent.is_dir():
                raise CliError(f"cannot create {p}: directory does not exist")
        return self

    @classmethod
    def from_json(cls, path: str) -> "JobConfig":
        try:
            data = json.loads(Path(path).read_text())
        except OSError as exc:
            raise CliError(f"cannot read job file {path}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise CliError(f"job file {path} is not valid JSON (line {exc.lineno})") from exc
        if not isinstance(data, dict):
            raise CliError("job file must be a JSON object")
        data.setdefault("command", "solve")
        aliases = {"phi": "phi0", "psi": "phi1", "grid": "grid_file", "json": "json_out",
                   "foliation-json": "foliation_json"}
        known = {f.name for f in fields(cls)}
        kwargs, extra = {}, {}
        for k, v in data.items():
            k = aliases.get(k, k).replace("-", "_")
            (kwargs if k in known else extra)[k] = v
        if extra:
            raise CliError(f"unknown job keys: {', '.join(sorted(extra))}")
        if isinstance(kwargs.get("checks"), str):
            kwargs["checks"] = _split_checks(kwargs["checks"])
        if "domain" in kwargs and not isinstance(kwargs["domain"], str):
            kwargs["domain"] = ",".join(str(v) for v in kwargs["domain"])
        if kwargs.get("corner") is not None:
            kwargs["corner"] = tuple(float(v) for v in kwargs["corner"])
        if "radii" in kwargs:
            kwargs["radii"] = tuple(float(v) for v in kwargs["radii"])
        return cls(**kwargs)


def _split_checks(text: str) -> list[str]:
    text = text.strip()
    if text == "all":
        return list(ALL_CHECKS)
    return [c.strip() for c in text.split(",") if c.strip()]


def _pair(text: str) -> tuple[float, float]:
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}") from exc
    return a, b


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 with the uniform prefix
        raise CliError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mabuchi", description="Geodesics between convex potentials: solve, verify, export.")
    p.add_argument("--job", help="JSON job file mirroring the long options (plus 'command')")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("solve", help="weak geodesic by convex envelope, or smooth geodesic by foliation")
    s.add_argument("--phi0", required=True)
    s.add_argument("--phi1", required=True)
    s.add_argument("--domain", default="-1,1", help="interval as A,B")
    s.add_argument("--nx", type=int, default=129)
    s.add_argument("--nt", type=int, default=129)
    s.add_argument("--method", default="envelope", choices=METHODS)
    s.add_argument("--truncation", type=float, help="toric problem on [TRUNCATION, 0] in log coordinates")
    s.add_argument("--checks", type=_split_checks, help="comma list, 'all', or empty for none")
    s.add_argument("--radius", type=float, default=0.2, help="corner-exclusion radius for region checks")
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.add_argument("--out", default="geodesic.csv")
    s.add_argument("--report", default="report.json")
    s.add_argument("--foliation-json", dest="foliation_json")
    s.add_argument("--summary", action="store_true")

    o = sub.add_parser("oracle", help="sample a closed-form example")
    o.add_argument("--name", required=True)
    o.add_argument("--nx", type=int, default=129)
    o.add_argument("--nt", type=int, default=129)
    o.add_argument("--truncation", type=float, default=-4.0)
    o.add_argument("--out", help="CSV path (stdout if omitted)")
    o.add_argument("--manifest", help="JSON manifest path")
    o.add_argument("--summary", action="store_true")

    v = sub.add_parser("verify", help="run checks on a grid CSV")
    v.add_argument("grid_file", metavar="GRID")
    v.add_argument("--checks", type=_split_checks, default=list(ALL_CHECKS))
    v.add_argument("--radius", type=float, default=0.2)
    v.add_argument("--corner", type=_pair, help="blow-up probe corner X,T (adds the blowup check)")
    v.add_argument("--radii", type=_floats, default=(0.4, 0.2, 0.1))
    v.add_argument("--expect", choices=("blowup", "bounded"), default="blowup")
    v.add_argument("--phi0")
    v.add_argument("--phi1")
    v.add_argument("--seed", type=int, default=DEFAULT_SEED)
    v.add_argument("--out", help="report JSON path (stdout if omitted)")
    v.add_argument("--summary", action="store_true")

    i = sub.add_parser("images", help="compare gradient images of two potentials")
    i.add_argument("--phi", dest="phi0", required=True)
    i.add_argument("--psi", dest="phi1", required=True)
    i.add_argument("--domain", default="-1,1")
    i.add_argument("--tol", type=float, default=1e-8)
    i.add_argument("--json", dest="json_out", help="write the verdict as JSON")
    return p


def config_from_args(ns: argparse.Namespace) -> JobConfig:
    if ns.job:
        if ns.command:
            raise CliError("--job cannot be combined with a subcommand")
        return JobConfig.from_json(ns.job).validate()
    if not ns.command:
        raise CliError("a subcommand or --job is required")
    known = {f.name for f in fields(JobConfig)}
    kwargs = {k: v for k, v in vars(ns).items() if k in known and v is not None}
    cfg = JobConfig(**kwargs)
    if ns.command == "verify" and ns.corner is not None and "blowup" not in cfg.checks:
        cfg.checks = list(cfg.checks) + ["blowup"]
    return cfg.validate()


# ----------------------------------------------------------------- commands


def _potentials(cfg: JobConfig):
    phi0 = parse_expression(cfg.phi0)
    phi1 = parse_expression(cfg.phi1)
    return phi0, phi1


def _domain(cfg: JobConfig) -> SpaceDomain:
    try:
        return SpaceDomain.from_text(cfg.domain)
    except ValueError as exc:
        raise CliError(f"bad domain {cfg.domain!r}: {exc}") from exc


def _emit(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(path).write_text(text if text.endswith("\n") else text + "\n")


def cmd_solve(cfg: JobConfig) -> int:
    phi0, phi1 = _potentials(cfg)
    region = CheckRegion(radius=cfg.radius)
    b = None
    if cfg.truncation is not None:
        prob = ToricProblem(phi0, phi1, cfg.truncation)
        u = prob.solve(cfg.nx, cfg.nt)
        checks = DEFAULT_CHECKS["toric"] if cfg.checks is None else cfg.checks
        if "barrier" in checks:
            raise CliError("the barrier check needs potentials vanishing at both ends")
    else:
        dom = _domain(cfg)
        for name, f in (("phi0", phi0), ("phi1", phi1)):
            diag = validate_potential(f, dom, samples=max(10 * cfg.nx, 1281))
            if not diag.member:
                raise CliError(
                    f"{name} is not a strictly convex potential vanishing on the boundary "
                    f"(min f''={diag.min_hessian_eig:.6g}, max boundary |f|={diag.max_boundary_abs:.3g})"
                )
        grid = SpaceTimeGrid.over(dom, cfg.nx, cfg.nt)
        b = barrier(phi0, phi1, dom)
        if cfg.method == "envelope":
            u, _ = envelope_grid(phi0, phi1, dom, grid)
        else:
            g = smooth_geodesic(phi0, phi1, dom, grid)
            u = g.field
            if cfg.foliation_json:
                g.foliation.to_json(cfg.foliation_json)
        checks = DEFAULT_CHECKS[cfg.method] if cfg.checks is None else cfg.checks
    report = run_checks(u, checks, region, barrier=b, seed=cfg.seed)
    u.to_csv(cfg.out)
    report.to_json(cfg.report)
    if cfg.summary:
        print(report.summary())
    return 0


def _manifest(name: str, nx: int, nt: int, truncation: float) -> dict:
    if name == "example3":
        regions = [
            {"id": 1, "when": "(x+t)/(1-t) < -1/2", "u": "2*(1-t)*(((x+t)/(1-t))^2-1)"},
            {"id": 2, "when": "otherwise", "u": "2*x^2/(1+t)+t-2"},
            {"id": 3, "when": "(x-t)/(1-t) >= 1/2", "u": "2*(1-t)*(((x-t)/(1-t))^2-1)"},
        ]
        box = [-1.0, 1.0]
    else:
        regions = [
            {"id": 1, "when": "x < log(2)*(t-1)/2", "u": "2*exp(2*x)/exp(log(2)*t)+t-2"},
            {"id": 2, "when": "otherwise", "u": "2*(1-t)*(exp(2*x/(1-t))-1)"},
        ]
        box = [truncation, 0.0]
    return {"name": name, "grid": {"nx": nx, "nt": nt, "x": box, "t": [0.0, 1.0]},
            "columns": ["x", "t", "u", "region"], "regions": regions}


def cmd_oracle(cfg: JobConfig) -> int:
    name = cfg.name
    if name not in ("example3", "example4"):
        raise CliError(f"unknown oracle {name!r}; expected example3 or example4")
    trunc = -4.0 if cfg.truncation is None else cfg.truncation
    u = oracle_grid(name, cfg.nx, cfg.nt, trunc)
    _emit(u.to_csv(), cfg.out)
    if cfg.manifest:
        Path(cfg.manifest).write_text(json.dumps(_manifest(name, cfg.nx, cfg.nt, trunc), indent=2) + "\n")
    if cfg.summary and cfg.out:
        print(f"{name}: {cfg.nx}x{cfg.nt} grid written to {cfg.out}")
    return 0


def cmd_verify(cfg: JobConfig) -> int:
    u = read_grid_csv(cfg.grid_file)
    checks = list(ALL_CHECKS) if cfg.checks is None else cfg.checks
    b = None
    if cfg.phi0 or cfg.phi1:
        if not (cfg.phi0 and cfg.phi1):
            raise CliError("give both --phi0 and --phi1, or neither")
        phi0, phi1 = _potentials(cfg)
        dom = SpaceDomain.interval(u.grid.a, u.grid.b)
        b = barrier(phi0, phi1, dom)
    region = CheckRegion(radius=cfg.radius) if cfg.radius else None
    report = run_checks(u, checks, region, barrier=b, seed=cfg.seed, corner=cfg.corner,
                        radii=cfg.radii, expect=cfg.expect)
    _emit(report.to_json(), cfg.out)
    if cfg.summary:
        print(report.summary(), file=sys.stderr if cfg.out is None else sys.stdout)
    return 0 if report.passed else 1


def cmd_images(cfg: JobConfig) -> int:
    phi, psi = _potentials(cfg)
    dom = _domain(cfg)
    a, b = gradient_image(phi, dom), gradient_image(psi, dom)
    dist = image_distance(a, b)
    equal = dist <= cfg.tol
    print(f"{a} vs {b}: {'equal' if equal else 'NOT equal'}")
    doc = {"phi": a.to_json(), "psi": b.to_json(), "distance": dist, "tol": cfg.tol, "equal": equal}
    if cfg.json_out:
        Path(cfg.json_out).write_text(json.dumps(doc, indent=2) + "\n")
    return 0


DISPATCH = {"solve": cmd_solve, "oracle": cmd_oracle, "verify": cmd_verify, "images": cmd_images}


def _one_line(exc: BaseException) -> str:
    msg = str(exc).strip().replace("\n", " ") or type(exc).__name__
    return f"error: {msg}"


_VALUED = ("--domain", "--corner", "--radii", "--truncation")


def _join_negative_values(argv: list[str]) -> list[str]:
    # argparse mistakes "-1,1" for an option; bind it to its flag instead
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _VALUED and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
        else:
            out.append(a)
            i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    try:
        argv = sys.argv[1:] if argv is None else list(argv)
        ns = build_parser().parse_args(_join_negative_values(argv))
        cfg = config_from_args(ns)
        return DISPATCH[cfg.command](cfg)
    except NotSmoothlyConnectable as exc:
        print(_one_line(exc), file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except Exception as exc:  # noqa: BLE001 - every failure becomes one diagnostic line
        print(_one_line(exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
