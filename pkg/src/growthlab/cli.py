"""Command-line front door: ``growthlab profile|classify|lie``.

Exit codes: 0 success, 1 usage or input error, 2 invariant violation
(negative or decreasing volume, Jacobi failure, ...), 3 quadrature
non-convergence.  Reports are written with sorted keys and full-precision
floats so that identical configurations give byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import growth, lie
from .exact import gq, nullspace
from .forms import ExteriorForm
from .gallery import GALLERY, gallery
from .quadrature import QuadratureSpec

EXIT_OK, EXIT_USAGE, EXIT_INVARIANT, EXIT_QUADRATURE = 0, 1, 2, 3
CSV_HEADER = ("t", "vol", "sphere_ball", "sphere_direct", "ratio_i", "F")
LIE_CHECKS = ("jacobi", "structure-eqs", "witness", "pmap", "dk-search")
SL2C_T_CAP = 12.0
CONVERGENCE_TOL = {"gauss-legendre-product": 1e-3, "monte-carlo": 5e-2}
PMAP_TRIALS = 50


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    """Validated command-line configuration."""

    command: str
    model: str | None = None
    n: int | None = None
    t_min: float = 0.5
    t_max: float = 8.0
    t_steps: int = 32
    quad: str | None = None
    order: int | None = None
    angular_order: int = 16
    mc_samples: int = 200_000
    seed: int = 0
    r0: float = 1.0
    structure: str | None = None
    checks: tuple = field(default_factory=lambda: ("jacobi", "structure-eqs"))
    out_csv: str | None = None
    out_json: str | None = None

    def validate(self):
        if self.command in ("profile", "classify"):
            if self.model not in GALLERY:
                raise UsageError(f"--model must be one of {', '.join(GALLERY)}")
            if not self.t_min > 0:
                raise UsageError("--t-min must be positive")
            if not self.t_max > self.t_min:
                raise UsageError("--t-max must exceed --t-min")
            if self.t_steps < 8:
                raise UsageError("--t-steps must be at least 8")
        else:
            if (self.structure is None) == (self.model is None):
                raise UsageError("lie needs exactly one of --structure FILE or --model NAME")
            unknown = set(self.checks) - set(LIE_CHECKS)
            if unknown:
                raise UsageError(f"unknown check(s) {sorted(unknown)}; choose from {', '.join(LIE_CHECKS)}")
        for path in (self.out_csv, self.out_json):
            if path is not None and not Path(path).resolve().parent.is_dir():
                raise UsageError(f"output directory does not exist for {path}")

    def quadrature(self, domain_dim):
        method = self.quad or ("gl" if domain_dim <= 2 else "mc")
        try:
            if method == "gl":
                order = self.order or 24
                return QuadratureSpec("gauss-legendre-product", order, self.angular_order, order,
                                      seed=self.seed)
            return QuadratureSpec("monte-carlo", sample_count=self.mc_samples, seed=self.seed)
        except ValueError as exc:
            raise UsageError(str(exc)) from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="growthlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, text in (("profile", "write the growth series of a gallery map"),
                       ("classify", "profile a gallery map and print its verdict")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--model", required=True, choices=GALLERY)
        p.add_argument("--n", type=int, help="target dimension (torus, fubini_study)")
        p.add_argument("--t-min", type=float, default=0.5)
        p.add_argument("--t-max", type=float, default=8.0)
        p.add_argument("--t-steps", type=int, default=32)
        p.add_argument("--quad", choices=("gl", "mc"), help="default: gl for 2-dimensional domains, else mc")
        p.add_argument("--order", type=int, help="Gauss-Legendre radial and polar order (default 24)")
        p.add_argument("--angular-order", type=int, default=16, help="Gauss-Legendre order of the other angles")
        p.add_argument("--mc-samples", type=int, default=200_000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--r0", type=float, default=1.0)
        p.add_argument("--out-csv")
        p.add_argument("--out-json")
    p = sub.add_parser("lie", help="exact checks on a complex Lie algebra")
    p.add_argument("--structure", help="structure-constant JSON file")
    p.add_argument("--model", choices=lie.LIE_GALLERY, help="built-in algebra instead of a file")
    p.add_argument("--n", type=int, help="dimension of the abelian algebra")
    p.add_argument("--check", default="jacobi,structure-eqs",
                   help=f"comma-separated subset of {','.join(LIE_CHECKS)}")
    p.add_argument("--seed", type=int, default=0, help="seed for the random P-map trials")
    p.add_argument("--out-json")
    return parser


def config_from_args(args):
    values = {k: v for k, v in vars(args).items() if v is not None}
    if "check" in values:
        values["checks"] = tuple(c.strip() for c in values.pop("check").split(",") if c.strip())
    config = RunConfig(**values)
    config.validate()
    return config


def _dump_json(data, path):
    text = json.dumps(data, sort_keys=True, indent=2, allow_nan=False) + "\n"
    if path:
        Path(path).write_text(text)
    return text


def _clean(x):
    if x is None:
        return None
    x = float(x)
    return x if np.isfinite(x) else None


# ---------------------------------------------------------------------------
# profile / classify

def run_profile(config):
    """Build the profile, write the CSV/JSON reports, return ``(report, exit code)``."""
    model = gallery(config.model, config.n)
    quad = config.quadrature(model.domain_dim)
    t_max = config.t_max
    if config.model == "sl2c" and t_max > SL2C_T_CAP:
        print(f"growthlab: sl2c grid capped at t = {SL2C_T_CAP:g}", file=sys.stderr)
        t_max = SL2C_T_CAP
        if t_max <= config.t_min:
            raise UsageError("--t-min must stay below the sl2c cap")
    radii = np.linspace(config.t_min, t_max, config.t_steps)
    profile = growth.build_profile(model, radii, quad)

    if config.out_csv:
        with open(config.out_csv, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for row in profile.rows():
                writer.writerow([repr(v) for v in row])

    try:
        cond_i = growth.check_condition_i(profile, config.r0)
    except ValueError:
        cond_i = None
    try:
        cond_ii = growth.classify_condition_ii(profile)
    except ValueError:
        cond_ii = None
    try:
        order = growth.finite_order_fit(profile)
    except ValueError:
        order = None
    hoelder = growth.hoelder_chain_check(profile) if profile.hoelder_rhs is not None else None

    coarse = growth.vol_ball(model, t_max, quad.coarsened())
    change = abs(coarse - profile.vol[-1]) / abs(profile.vol[-1])
    tol = CONVERGENCE_TOL[quad.method]
    violations = growth.profile_violations(profile)

    if cond_i is not None and cond_ii is not None and model.pd_everywhere:
        verdict = growth.verdict(cond_i, cond_ii)
    else:
        verdict = "not-certified"
    report = {
        "schema": "growthlab-profile/1",
        "command": config.command,
        "model": model.name,
        "n": model.ambient_dim,
        "domain_dim": model.domain_dim,
        "grid": {"t_min": config.t_min, "t_max": float(t_max), "t_max_requested": config.t_max,
                 "t_steps": config.t_steps},
        "constants": {
            "C1": _clean(cond_i.C1) if cond_i else None,
            "r0": config.r0,
            "condition_i": cond_i.status if cond_i else "insufficient-tail",
        },
        "classification": {
            "label": cond_ii.classification if cond_ii else "inconclusive",
            "rate": _clean(cond_ii.rate) if cond_ii else None,
            "condition_ii": cond_ii.condition if cond_ii else "inconclusive",
            "witness_C": cond_ii.witness_C if cond_ii else None,
            "window": list(cond_ii.window) if cond_ii else None,
        },
        "slopes": {
            "condition_i_trend": _clean(cond_i.trend_slope) if cond_i else None,
            "log_F_tail": _clean(cond_ii.rate) if cond_ii else None,
            "finite_order": ({"order": order.order, "residual": order.residual, "finite": order.finite}
                             if order else None),
        },
        "hoelder": ({"worst_margin": hoelder.worst_margin, "tolerance": hoelder.tolerance,
                     "holds": hoelder.holds} if hoelder else None),
        "quadrature": quad.as_dict(),
        "seed": config.seed,
        "convergence": {"relative_change": float(change), "tolerance": tol, "converged": bool(change <= tol)},
        "invariants": {"violations": violations},
        "verdict": verdict,
    }
    _dump_json(report, config.out_json)

    if violations:
        print(f"growthlab: invariant violated: {'; '.join(violations)}", file=sys.stderr)
        return report, EXIT_INVARIANT
    if hoelder is not None and not hoelder.holds:
        print(f"growthlab: invariant violated: Hoelder chain margin {hoelder.worst_margin:.3e}", file=sys.stderr)
        return report, EXIT_INVARIANT
    if change > tol:
        print(f"growthlab: quadrature not converged: relative change {change:.3e} > {tol:g}", file=sys.stderr)
        return report, EXIT_QUADRATURE
    return report, EXIT_OK


def _summary(report):
    c = report["classification"]
    k = report["constants"]
    lines = [
        f"model: {report['model']} (n={report['n']}, grid {report['grid']['t_min']:g}..{report['grid']['t_max']:g})",
        f"condition (i): {k['condition_i']} (C1={k['C1']}, r0={k['r0']:g})",
        f"classification: {c['label']} (rate={c['rate']}); condition (ii): {c['condition_ii']}",
        f"verdict: {report['verdict']}",
    ]
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# lie

def _random_closed_real_2form(cx, rng):
    cols = cx.d_columns(2)
    nrows = len(cx.total_basis(3))
    rows = [[c[r] for c in cols] for r in range(nrows)]
    kernel = nullspace([r for r in rows if any(r)], len(cx.total_basis(2)))
    coords = [gq(0)] * len(cx.total_basis(2))
    for vec in kernel:
        a = gq(rng.randint(-3, 3), rng.randint(-3, 3))
        coords = [x + a * v for x, v in zip(coords, vec)]
    form = cx.from_total_coords(coords, 2)
    return form + form.conj()


def _random_real_1form(cx, rng):
    form = ExteriorForm(cx.n, {((k,), ()): gq(rng.randint(-3, 3), rng.randint(-3, 3)) for k in range(cx.n)})
    return form + form.conj()


def pmap_trials(cx, trials=PMAP_TRIALS, seed=0):
    """``p_map(alpha + d beta) == p_map(alpha)`` on random invariant data."""
    rng = random.Random(seed)
    ok = 0
    for _ in range(trials):
        alpha = _random_closed_real_2form(cx, rng)
        beta = _random_real_1form(cx, rng)
        ok += lie.p_map(cx, alpha) == lie.p_map(cx, alpha + cx.d(beta))
    return ok


def run_lie(config):
    if config.structure:
        try:
            algebra = lie.load_algebra(config.structure)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read structure file {config.structure}: {exc}") from None
        except (ValueError, TypeError, KeyError) as exc:
            raise UsageError(f"bad structure file {config.structure}: {exc}") from None
    else:
        algebra = lie.lie_algebra(config.model, config.n)
    report = {"schema": "growthlab-lie/1", "algebra": algebra.to_json(),
              "reference_metric": lie.REFERENCE_NOTE, "checks": {}, "status": "ok"}
    violations = algebra.jacobi_violations()
    if "jacobi" in config.checks or violations:
        report["checks"]["jacobi"] = {"holds": not violations, "violations": [list(t) for t in violations]}
    if violations:
        report["status"] = "jacobi-failure"
        _dump_json(report, config.out_json)
        names = ", ".join(algebra.labels[t - 1] for t in violations[0])
        print(f"growthlab: invariant violated: Jacobi identity fails on ({names}) = {violations[0]}",
              file=sys.stderr)
        return report, EXIT_INVARIANT
    cx = lie.build_complex(algebra)
    omega = lie.reference_metric(cx.n)
    if "structure-eqs" in config.checks:
        diffs = {}
        for k, label in enumerate(algebra.labels):
            diffs[label] = _pretty(cx.d(ExteriorForm(cx.n, {((k,), ()): gq(1)})), algebra.labels)
        report["checks"]["structure-eqs"] = {"differentials": diffs, "d_squared_zero": not cx.check_d_squared()}
    if "witness" in config.checks:
        outcome = lie.degenerate_balanced_witness(cx, omega)
        report["checks"]["witness"] = {
            "verdict": "degenerate balanced" if outcome.certified else "not degenerate balanced",
            "certificate": outcome.to_json(),
        }
    if "pmap" in config.checks:
        ok = pmap_trials(cx, seed=config.seed)
        dims = lie.cohomology_dims(cx, cx.n - 1, cx.n - 1)
        report["checks"]["pmap"] = {"trials": PMAP_TRIALS, "invariant": ok == PMAP_TRIALS, "aeppli_dim": dims.aeppli}
    if "dk-search" in config.checks:
        if cx.is_closed(omega):
            alpha, label = omega, "reference metric (closed)"
        else:
            alpha, label = ExteriorForm(cx.n, {}), "zero class"
        report["checks"]["dk-search"] = {"alpha": label,
                                        "certificate": lie.dk_membership_search(cx, alpha).to_json()}
    _dump_json(report, config.out_json)
    if "pmap" in report["checks"] and not report["checks"]["pmap"]["invariant"]:
        return report, EXIT_INVARIANT
    if report["checks"].get("structure-eqs", {}).get("d_squared_zero") is False:
        return report, EXIT_INVARIANT
    return report, EXIT_OK


def _pretty(form, labels):
    if form.is_zero():
        return "0"
    parts = []
    for (I, J), c in sorted(form.terms.items()):
        word = "^".join([labels[i] for i in I] + [f"conj({labels[j]})" for j in J])
        re, im = c.x, c.y
        coef = str(re) if not im else f"({c})"
        parts.append(word if coef == "1" else f"-{word}" if coef == "-1" else f"{coef}*{word}")
    return " + ".join(parts).replace("+ -", "- ")


# ---------------------------------------------------------------------------

def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        if config.command == "lie":
            report, code = run_lie(config)
            checks = report["checks"]
            for name in LIE_CHECKS:
                if name in checks:
                    print(f"{name}: {_lie_line(name, checks[name])}")
            return code
        report, code = run_profile(config)
        if config.command == "classify":
            print(_summary(report))
        else:
            print(f"wrote {config.t_steps} rows for {report['model']}; "
                  f"classification {report['classification']['label']}; verdict {report['verdict']}")
        return code
    except UsageError as exc:
        print(f"growthlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _lie_line(name, entry):
    if name == "jacobi":
        return "holds" if entry["holds"] else f"fails on {entry['violations'][0]}"
    if name == "structure-eqs":
        eqs = "; ".join(f"d{k} = {v}" for k, v in entry["differentials"].items())
        return f"{eqs} (d^2 = 0: {entry['d_squared_zero']})"
    if name == "witness":
        return entry["verdict"]
    if name == "pmap":
        return f"{'invariant' if entry['invariant'] else 'NOT invariant'} over {entry['trials']} trials"
    cert = entry["certificate"]
    return f"{'certified' if cert.get('certified', True) else 'not certified'} for {entry['alpha']}"


if __name__ == "__main__":
    sys.exit(main())
