"""nullity-lab command line front end.

    nullity-lab table   --ambient ch --family geodesic-sphere --r-min 0.5 --r-max 1.5 --steps 3
    nullity-lab verify  --ambient ch --family horosphere --nullity K --kappa 1
    nullity-lab fit     --ambient ch --n 3 --family tube --k 1 --r 0.8 --nullity KM
    nullity-lab classify --ambient cp --family geodesic-sphere --r pi/3
    nullity-lab nonhopf-search --c 4 --nullity K --seed 0 --count 100000

Exit status: 0 when every reported check passes, 1 when a check fails,
2 on usage or configuration errors (a JSON error object is printed).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from dataclasses import asdict, dataclass

import numpy as np

from .errors import NullityLabError
from .geometry import AmbientSpace
from .models import SCHEMA, Family, ModelSpec, build_frame, closed_form_kappa, phi_partner_curvature, principal_data
from .nonhopf import (
    Box,
    NonHopfState,
    force_kappa_nullity,
    force_km_nullity,
    feasibility_search,
    kappa_contradiction_residual,
)
from .nullity import NullityFamily, classify_model, fit_nullity, membership_residual

COMMANDS = ("table", "verify", "fit", "classify", "nonhopf-search")

FAMILY_ALIASES = {
    ("cp", "geodesic-sphere"): Family.CP_GeodesicSphere,
    ("cp", "tube"): Family.CP_TubeOverCPk,
    ("ch", "horosphere"): Family.CH_Horosphere,
    ("ch", "geodesic-sphere"): Family.CH_GeodesicSphere,
    ("ch", "tube-hyperplane"): Family.CH_TubeOverCHn1,
    ("ch", "tube"): Family.CH_TubeOverCHk,
    ("cp", "axi-zero"): Family.HopfAxiZero,
    ("ch", "axi-zero"): Family.HopfAxiZero,
}


class UsageError(NullityLabError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    ambient: str
    c: float
    n: int
    family: str | None = None
    k: int | None = None
    r: float | None = None
    r_min: float | None = None
    r_max: float | None = None
    steps: int | None = None
    lambdas: tuple[float, ...] | None = None
    nullity_family: str = "K"
    kappa: float | None = None
    mu: float = 0.0
    nu: float = 0.0
    seed: int = 0
    count: int = 100_000
    box: float = 10.0
    beta_min: float = 1e-3
    output: str = "json"
    tolerance: float = 1e-10

    def __post_init__(self):
        if not self.tolerance > 0:
            raise UsageError("tolerance must be positive")
        if self.steps is not None and self.steps < 1:
            raise UsageError("steps must be >= 1")
        if self.c == 0:
            raise UsageError("c must be nonzero: only non-flat ambients are supported")

    def radii(self) -> list[float]:
        if self.r is not None:
            return [self.r]
        if self.r_min is None:
            raise UsageError("a radius is required: --r or --r-min/--r-max/--steps")
        if self.r_max is None or self.steps in (None, 1):
            return [self.r_min]
        return [float(v) for v in np.linspace(self.r_min, self.r_max, self.steps)]

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["lambdas"] is not None:
            d["lambdas"] = list(d["lambdas"])
        return d


_PI = re.compile(r"^\s*([-+]?[0-9.]*(?:[eE][-+]?\d+)?)\s*\*?\s*pi\s*(?:/\s*([0-9.]+(?:[eE][-+]?\d+)?))?\s*$")


def parse_real(text: str) -> float:
    """A float, or a multiple of pi such as 'pi/4', '0.5pi', '2*pi/3'."""
    try:
        return float(text)
    except ValueError:
        pass
    mt = _PI.match(text)
    if not mt:
        raise argparse.ArgumentTypeError(f"not a real number: {text!r}")
    head, den = mt.groups()
    coef = 1.0 if head in ("", "+") else -1.0 if head == "-" else float(head)
    return coef * math.pi / (float(den) if den else 1.0)


def _resolve_family(cfg: RunConfig) -> Family:
    if cfg.family is None:
        raise UsageError("--family is required")
    key = (cfg.ambient, cfg.family)
    if key in FAMILY_ALIASES:
        return FAMILY_ALIASES[key]
    try:
        fam = Family(cfg.family)
    except ValueError:
        names = sorted({name for amb, name in FAMILY_ALIASES if amb == cfg.ambient})
        raise UsageError(f"unknown family {cfg.family!r} for {cfg.ambient}; choose from {names}") from None
    if fam.ambient_kind not in (None, cfg.ambient):
        raise UsageError(f"{fam.value} does not live in {cfg.ambient}")
    return fam


def _spec(cfg: RunConfig, r: float | None) -> ModelSpec:
    amb = AmbientSpace(cfg.c, cfg.n)
    fam = _resolve_family(cfg)
    k = None
    if fam.is_tube:
        k = 1 if cfg.k is None else cfg.k
    pairs = None
    if fam is Family.HopfAxiZero:
        lam1 = cfg.lambdas or (math.sqrt(abs(cfg.c) / 4.0),) * (cfg.n - 1)
        if len(lam1) != cfg.n - 1:
            raise UsageError(f"--lambdas needs n-1 = {cfg.n - 1} values")
        pairs = tuple((l1, phi_partner_curvature(0.0, l1, cfg.c)) for l1 in lam1)
    return ModelSpec(amb, fam, r=r if fam.has_radius else None, k=k, axi_pairs=pairs)


def _specs(cfg: RunConfig) -> list[ModelSpec]:
    fam = _resolve_family(cfg)
    if not fam.has_radius:
        return [_spec(cfg, None)]
    return [_spec(cfg, r) for r in cfg.radii()]


def _envelope(cfg: RunConfig, passed: bool, **body) -> dict:
    doc = {"schema": SCHEMA, "command": cfg.command, "config": cfg.to_dict(), "tolerance": cfg.tolerance}
    doc.update(body)
    doc["pass"] = bool(passed)
    return doc


def cmd_table(cfg: RunConfig) -> tuple[dict, list[dict]]:
    rows = []
    for spec in _specs(cfg):
        target = closed_form_kappa(spec)
        if target is None:
            raise UsageError(f"{spec.family.value} has two distinct curvatures and no kappa value")
        data = principal_data(spec)
        fit = fit_nullity(build_frame(data), NullityFamily.K)
        delta = abs(fit.kappa - target)
        rows.append({
            "r": spec.r,
            "alpha": data.alpha,
            "lambdas": ";".join(repr(v) for v in data.distinct_lambdas()),
            "kappa_closed_form": target,
            "kappa_fitted": fit.kappa,
            "abs_delta": delta,
            "fit_residual": fit.residual,
            "pass": delta <= cfg.tolerance and fit.residual <= cfg.tolerance,
        })
    return _envelope(cfg, all(r["pass"] for r in rows), family=_resolve_family(cfg).value, rows=rows), rows


def cmd_verify(cfg: RunConfig) -> tuple[dict, list[dict]]:
    if cfg.kappa is None:
        raise UsageError("verify needs --kappa (and --mu/--nu for KM/KMN)")
    spec = _spec(cfg, cfg.radii()[0] if _resolve_family(cfg).has_radius else None)
    frame = build_frame(spec)
    res = membership_residual(frame, cfg.nullity_family, cfg.kappa, cfg.mu, cfg.nu)
    row = {
        "family": spec.family.value,
        "r": spec.r,
        "nullity": cfg.nullity_family,
        "kappa": cfg.kappa,
        "mu": cfg.mu,
        "nu": cfg.nu,
        "residual": res,
        "pass": res <= cfg.tolerance,
    }
    return _envelope(cfg, row["pass"], result=row), [row]


def cmd_fit(cfg: RunConfig) -> tuple[dict, list[dict]]:
    rows, fits = [], []
    for spec in _specs(cfg):
        fit = fit_nullity(build_frame(spec), cfg.nullity_family)
        d = fit.to_dict()
        fits.append(dict(d, r=spec.r))
        rows.append({
            "r": spec.r,
            "family": d["family"],
            "kappa": fit.kappa,
            "mu": fit.mu,
            "nu": fit.nu,
            "residual": fit.residual,
            "solution_dim": fit.solution_dim,
            "pass": fit.residual <= cfg.tolerance,
        })
    return _envelope(cfg, all(r["pass"] for r in rows), fits=fits), rows


def _classification_checks(spec: ModelSpec, tol: float) -> tuple[dict, list[dict]]:
    report = classify_model(spec)
    frame = build_frame(spec)
    fk = fit_nullity(frame, NullityFamily.K)
    fkm = fit_nullity(frame, NullityFamily.KM)
    fkmn = fit_nullity(frame, NullityFamily.KMN)
    checks = []
    k_fit_member = fk.residual <= tol
    checks.append({"check": "K membership agrees with fit", "value": fk.residual, "pass": k_fit_member == report.kappa_member})
    if report.kappa_member:
        dk = abs(fk.kappa - report.kappa)
        checks.append({"check": "fitted kappa equals closed form", "value": dk, "pass": dk <= tol * max(1.0, abs(report.kappa))})
    expected_dim = 0 if report.km_direction is None else 1
    checks.append({"check": "KM fit residual", "value": fkm.residual, "pass": fkm.residual <= tol})
    checks.append({"check": "KM solution_dim", "value": fkm.solution_dim, "pass": fkm.solution_dim == expected_dim})
    checks.append({"check": "KM fit in closed-form solution set", "value": None, "pass": report.km_contains(fkm.kappa, fkm.mu, tol)})
    checks.append({"check": "KMN fitted nu vanishes", "value": abs(fkmn.nu), "pass": abs(fkmn.nu) <= tol})
    body = {"classification": report.to_dict(), "fits": [fk.to_dict(), fkm.to_dict(), fkmn.to_dict()], "checks": checks}
    return body, checks


def cmd_classify(cfg: RunConfig) -> tuple[dict, list[dict]]:
    results, rows = [], []
    for spec in _specs(cfg):
        body, checks = _classification_checks(spec, cfg.tolerance)
        results.append(dict(body, r=spec.r))
        cls = body["classification"]
        rows.append({
            "r": spec.r,
            "family": spec.family.value,
            "alpha": cls["alpha"],
            "kappa_member": cls["kappa_member"],
            "kappa": cls["kappa"],
            "km_solution": cls["km_solution"],
            "km_kappa": cls["km_point"][0],
            "km_mu": cls["km_point"][1],
            "nu": cls["nu"],
            "pass": all(ch["pass"] for ch in checks),
        })
    return _envelope(cfg, all(r["pass"] for r in rows), results=results), rows


def cmd_nonhopf_search(cfg: RunConfig) -> tuple[dict, list[dict]]:
    fam = NullityFamily(cfg.nullity_family)
    result = feasibility_search(cfg.c, fam, seed=cfg.seed, count=cfg.count, box=Box(cfg.box, cfg.beta_min))
    passed = result.min_residual >= result.bound - cfg.tolerance
    state: NonHopfState = result.argmin
    if fam is NullityFamily.K:
        forcing = force_kappa_nullity(state)
    else:
        forcing = force_km_nullity(state, with_nu=fam is NullityFamily.KMN)
    body = result.to_dict()
    body["forcing"] = forcing.to_dict()
    body["kappa_contradiction_residual"] = kappa_contradiction_residual(forcing.state)
    row = {
        "c": result.c,
        "family": fam.value,
        "seed": result.seed,
        "count": result.count,
        "min_residual": result.min_residual,
        "bound": result.bound,
        "argmin_index": result.argmin_index,
        **{f"argmin_{k}": v for k, v in state.to_dict().items() if k != "c"},
        "pass": passed,
    }
    return _envelope(cfg, passed, search=body), [row]


HANDLERS = {
    "table": cmd_table,
    "verify": cmd_verify,
    "fit": cmd_fit,
    "classify": cmd_classify,
    "nonhopf-search": cmd_nonhopf_search,
}


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def render_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    writer = csv.writer(buf, lineterminator="\n")
    header = list(rows[0])
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(row.get(h)) for h in header])
    return buf.getvalue()


def render_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nullity-lab", description=__doc__.split("\n\n")[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--ambient", choices=("cp", "ch"), help="default: inferred from --c, else cp")
    p.add_argument("--family", help="geodesic-sphere, tube, horosphere, tube-hyperplane, axi-zero")
    p.add_argument("--n", type=int, default=2, help="complex dimension (default 2)")
    p.add_argument("--c", type=parse_real, help="holomorphic sectional curvature (default +-4)")
    p.add_argument("--k", type=int, help="dimension of the totally geodesic CP^k / CH^k (tube families)")
    p.add_argument("--r", type=parse_real, help="radius; accepts pi multiples such as pi/4")
    p.add_argument("--r-min", type=parse_real)
    p.add_argument("--r-max", type=parse_real)
    p.add_argument("--steps", type=int)
    p.add_argument("--lambdas", help="comma separated lambda1 per block for axi-zero")
    p.add_argument("--nullity", choices=[f.value for f in NullityFamily], default="K")
    p.add_argument("--kappa", type=parse_real)
    p.add_argument("--mu", type=parse_real, default=0.0)
    p.add_argument("--nu", type=parse_real, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=100_000)
    p.add_argument("--box", type=float, default=10.0, help="half width of the sampling box")
    p.add_argument("--beta-min", type=float, default=1e-3)
    p.add_argument("--output", choices=("json", "csv"), default="json")
    p.add_argument("--tolerance", type=float, default=1e-10)
    p.add_argument("--out", help="write the report to this file instead of stdout")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    ambient = args.ambient
    c = args.c
    if c is not None and c != 0:
        inferred = "cp" if c > 0 else "ch"
        if ambient is not None and ambient != inferred:
            raise UsageError(f"--c {c} does not match --ambient {ambient}")
        ambient = inferred
    ambient = ambient or "cp"
    if c is None:
        c = 4.0 if ambient == "cp" else -4.0
    lambdas = None
    if args.lambdas:
        lambdas = tuple(parse_real(v) for v in args.lambdas.split(","))
    return RunConfig(
        command=args.command,
        ambient=ambient,
        c=float(c),
        n=args.n,
        family=args.family,
        k=args.k,
        r=args.r,
        r_min=args.r_min,
        r_max=args.r_max,
        steps=args.steps,
        lambdas=lambdas,
        nullity_family=args.nullity,
        kappa=args.kappa,
        mu=args.mu,
        nu=args.nu,
        seed=args.seed,
        count=args.count,
        box=args.box,
        beta_min=args.beta_min,
        output=args.output,
        tolerance=args.tolerance,
    )


def run(argv: list[str] | None = None) -> tuple[int, str, str | None]:
    """Execute one invocation; returns (exit status, rendered report, output path)."""
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        doc, rows = HANDLERS[cfg.command](cfg)
    except NullityLabError as exc:
        err = {
            "schema": SCHEMA,
            "command": args.command,
            "error": {"type": type(exc).__name__, "message": str(exc)},
            "pass": False,
        }
        return 2, render_json(err), args.out
    text = render_csv(rows) if cfg.output == "csv" else render_json(doc)
    return (0 if doc["pass"] else 1), text, args.out


def main(argv: list[str] | None = None) -> int:
    status, text, out = run(argv)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
