"""
Command-line front end.

Every subcommand prints one JSON report (or CSV for the grid commands with
``--output csv``) and exits with 0 on success, 1 on a domain error (EP
obstruction, broken reality, no EP found, ...) and 2 on a usage error.
Errors are reported on stderr as one JSON line carrying a ``reason`` field.

Tolerances default to :class:`epatlas.linalg.ToleranceConfig` and can be
overridden through ``EPATLAS_TOL_RANK``, ``EPATLAS_TOL_ROOT``,
``EPATLAS_TOL_RESIDUAL`` and ``EPATLAS_MAX_ITER`` or, taking precedence,
``--tol rank=1e-12,residual=1e-8``.
"""

import argparse
import os
import sys
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional

import numpy as np

from . import io as eio
from .errors import EpAtlasError, ParseError
from .jordan import ep_classify
from .linalg import DEFAULT_TOL, ToleranceConfig, eigenvalues
from .metric import construct_positive_metric, factor_metric, hermitize, metric_condition
from .models import MODELS, ModelError, build, family
from .secular import cardano_roots, classify_point, energies_from_s
from .sweep import locate_ep_1d, reality_experiment, spectral_locus_2d, sweep_1d, unfolding_exponent
from .transition import CanonicalJordanSpec, solve_transition

COMMANDS = ("spectrum", "jordan", "transition", "metric", "secular", "region-map",
            "sweep", "ep-locate", "unfold", "reality", "locus")

_TOL_KEYS = {"rank": "rank_rel_tol", "root": "root_abs_tol", "residual": "residual_tol", "max_iter": "max_iter"}
_TOL_ENV = {"EPATLAS_TOL_RANK": "rank", "EPATLAS_TOL_ROOT": "root",
            "EPATLAS_TOL_RESIDUAL": "residual", "EPATLAS_MAX_ITER": "max_iter"}


class UsageError(EpAtlasError):
    reason = "usage error"


@dataclass
class CliConfig:
    command: str
    model: Optional[str] = None
    file: Optional[str] = None
    params: Dict[str, float] = field(default_factory=dict)
    tolerances: ToleranceConfig = DEFAULT_TOL
    output: str = "json"
    output_path: Optional[str] = None
    seed: Optional[int] = None
    options: dict = field(default_factory=dict)


# ---------------------------------------------------------------- parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text: str) -> List[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _pair(text: str) -> tuple:
    vals = _floats(text)
    if len(vals) != 2:
        raise UsageError(f"expected two comma-separated numbers, got {text!r}")
    return tuple(vals)


def parse_kv(text: Optional[str]) -> Dict[str, float]:
    """``"tau=0.25,beta=0"`` -> {"tau": 0.25, "beta": 0.0}."""
    out = {}
    if not text:
        return out
    for item in text.split(","):
        if not item.strip():
            continue
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"expected key=value, got {item!r}")
        try:
            out[key.strip()] = float(value)
        except ValueError:
            raise UsageError(f"value of {key.strip()!r} is not a number: {value!r}") from None
    return out


def tolerances(env=None, overrides: Optional[str] = None) -> ToleranceConfig:
    env = os.environ if env is None else env
    values = {}
    for var, key in _TOL_ENV.items():
        if var in env:
            values.update(parse_kv(f"{key}={env[var]}"))
    values.update(parse_kv(overrides))
    unknown = sorted(set(values) - set(_TOL_KEYS))
    if unknown:
        raise UsageError(f"unknown tolerance(s) {unknown}; expected {sorted(_TOL_KEYS)}")
    kwargs = {_TOL_KEYS[k]: (int(v) if k == "max_iter" else v) for k, v in values.items()}
    try:
        return replace(DEFAULT_TOL, **kwargs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _prefactors(text: Optional[str]):
    """``"1,0=1;1,1=1;2,0=1"`` -> {(1, 0): 1.0, (1, 1): 1.0, (2, 0): 1.0}."""
    if not text:
        return None
    out = {}
    for item in text.split(";"):
        key, sep, value = item.partition("=")
        try:
            k, j = (int(t) for t in key.split(","))
            out[(k, j)] = float(value)
        except ValueError:
            raise UsageError(f"prefactor entries look like k,j=value; got {item!r}") from None
        if not sep:
            raise UsageError(f"prefactor entries look like k,j=value; got {item!r}")
    return out


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--model", choices=sorted(MODELS), help="built-in model name")
    src.add_argument("--file", help="matrix file (.json or .csv)")
    common.add_argument("--params", help="model parameters, e.g. tau=0.25,beta=0")
    common.add_argument("--tol", help="tolerance overrides, e.g. rank=1e-12,residual=1e-8")
    common.add_argument("--output", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="write the report to this path instead of stdout")
    common.add_argument("--seed", type=int)
    common.add_argument("--steps", type=int)

    fam = _Parser(add_help=False)
    fam.add_argument("--free", help="free parameter name (two comma-separated names for locus)")
    fam.add_argument("--tie", help="parameters proportional to the free one, e.g. c=5 for c = 5*b")

    parser = _Parser(prog="epatlas", description="Exceptional-point analysis of small non-Hermitian matrices.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("spectrum", parents=[common], help="eigenvalues")
    sub.add_parser("jordan", parents=[common], help="Jordan structure per eigenvalue cluster")
    p = sub.add_parser("transition", parents=[common], help="transition matrix Q with HQ = QJ")
    p.add_argument("--blocks", help="Jordan block sizes, e.g. 4,2 (default: detected)")
    p.add_argument("--eta", type=float, help="EP eigenvalue (default: detected)")
    p = sub.add_parser("metric", parents=[common], help="positive-definite metric and hermitization")
    p.add_argument("--weights", help="positive weights, one per eigenvalue")
    p = sub.add_parser("secular", parents=[common], help="closed-form roots of the h6 secular cubic")
    p.add_argument("--tau", type=float)
    p.add_argument("--beta", type=float)
    p = sub.add_parser("region-map", parents=[common], help="unitarity labels on a (tau, beta) grid")
    p.add_argument("--tau-range", type=_pair, default=(0.01, 1.0))
    p.add_argument("--beta-range", type=_pair, default=(-0.5, 0.5))
    p = sub.add_parser("sweep", parents=[common, fam], help="spectra along a one-parameter family")
    p.add_argument("--range", type=_pair, required=True)
    p = sub.add_parser("ep-locate", parents=[common, fam], help="locate a discriminant zero in a bracket")
    p.add_argument("--bracket", type=_pair, required=True)
    p = sub.add_parser("unfold", parents=[common, fam], help="fit the unfolding exponent at an EP")
    p.add_argument("--ep", type=float, required=True)
    p.add_argument("--g-range", type=_pair, default=(1e-2, 1e-8), help="largest,smallest g")
    p.add_argument("--direction", type=float, default=1.0)
    p = sub.add_parser("reality", parents=[common], help="real-spectrum fraction of perturbed Jordan blocks")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--mode", choices=("generic", "lemma2", "flat"), default="generic")
    p.add_argument("--prefactors", help="k,j=value;... (default: random per trial)")
    p.add_argument("--g-values", default="1e-2,1e-4,1e-6")
    p.add_argument("--trials", type=int, default=100)
    p = sub.add_parser("locus", parents=[common, fam], help="real-eigenvalue count on a 2-D grid")
    p.add_argument("--x-range", type=_pair, required=True)
    p.add_argument("--y-range", type=_pair, required=True)
    return parser


def parse_config(argv: List[str], env=None) -> CliConfig:
    ns = build_parser().parse_args(argv)
    options = {k: v for k, v in vars(ns).items()
               if k not in ("command", "model", "file", "params", "tol", "output", "out", "seed")}
    return CliConfig(
        command=ns.command,
        model=ns.model,
        file=ns.file,
        params=parse_kv(ns.params),
        tolerances=tolerances(env, ns.tol),
        output=ns.output,
        output_path=ns.out,
        seed=ns.seed,
        options=options,
    )


# ------------------------------------------------------------ subcommands

def _matrix(cfg: CliConfig) -> np.ndarray:
    if cfg.file:
        if cfg.params:
            raise UsageError("--params only applies to --model")
        return eio.load_matrix(cfg.file)
    if cfg.model:
        return build(cfg.model, cfg.params)
    raise UsageError("one of --model or --file is required")


def _family(cfg: CliConfig, n_free: int = 1):
    if not cfg.model:
        raise UsageError(f"{cfg.command} needs --model (families cannot be read from files)")
    free = cfg.options.get("free")
    if not free:
        raise UsageError(f"{cfg.command} needs --free")
    names = [f.strip() for f in free.split(",")]
    if len(names) != n_free:
        raise UsageError(f"{cfg.command} needs {n_free} free parameter name(s), got {names}")
    expected = MODELS[cfg.model][1]
    for name in names:
        if name not in expected:
            raise ModelError(f"unknown parameter {name!r} for {cfg.model}; expected {list(expected)}")
    ties = parse_kv(cfg.options.get("tie"))
    if n_free == 1:
        return names, family(cfg.model, names[0], cfg.params, {k: (lambda x, c=c: c * x) for k, c in ties.items()})

    def make(x, y):
        p = {**cfg.params, names[0]: x, names[1]: y}
        return build(cfg.model, p)

    return names, make


def _eig_pairs(values):
    return [[float(z.real), float(z.imag)] for z in values]


def cmd_spectrum(cfg: CliConfig):
    ev = eigenvalues(_matrix(cfg), cfg.tolerances)
    report = {"n": int(ev.size), "eigenvalues": _eig_pairs(ev)}
    rows = [[i, float(z.real), float(z.imag)] for i, z in enumerate(ev)]
    return report, (["index", "re", "im"], rows)


def cmd_jordan(cfg: CliConfig):
    classes = ep_classify(_matrix(cfg), cfg.tolerances)
    structures = [s.to_dict() for s in classes]
    main = max(classes.structures, key=lambda s: (max(s.block_sizes), s.algebraic_multiplicity))
    report = {**main.to_dict(), "structures": structures, "diagonalizable": classes.diagonalizable,
              "cluster_radius": classes.radius_used}
    rows = [[s["eta"][0], s["eta"][1], s["alg_mult"], s["geom_mult"], " ".join(map(str, s["blocks"]))]
            for s in structures]
    return report, (["re_eta", "im_eta", "alg_mult", "geom_mult", "blocks"], rows)


def cmd_transition(cfg: CliConfig):
    H = _matrix(cfg)
    blocks, eta = cfg.options.get("blocks"), cfg.options.get("eta")
    if blocks is None or eta is None:
        classes = ep_classify(H, cfg.tolerances)
        if len(classes) != 1:
            raise UsageError("matrix has several eigenvalue clusters; pass --eta and --blocks")
        main = classes[0]
        eta = main.eigenvalue if eta is None else eta
        blocks = main.block_sizes if blocks is None else blocks
    if isinstance(blocks, str):
        blocks = [int(b) for b in _floats(blocks)]
    sol = solve_transition(H, CanonicalJordanSpec(eta, tuple(blocks)), cfg.tolerances)
    return sol.to_dict(), None


def cmd_metric(cfg: CliConfig):
    H = _matrix(cfg)
    weights = cfg.options.get("weights")
    weights = _floats(weights) if weights else None
    sol = construct_positive_metric(H, weights, cfg.tolerances)
    omega = factor_metric(sol.chosen_theta, cfg.tolerances)
    herm = hermitize(H, omega, cfg.tolerances)
    report = {
        "theta": _matrix_pairs(sol.chosen_theta),
        "omega": _matrix_pairs(omega),
        "h": _matrix_pairs(herm.h),
        "residual": sol.residual,
        "positive_definite": sol.positive_definite,
        "hermiticity_defect": herm.hermiticity_defect,
        "condition": metric_condition(sol.chosen_theta),
        "solution_space_dim": len(sol.basis),
    }
    return report, None


def _matrix_pairs(M):
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(M, dtype=complex)]


def cmd_secular(cfg: CliConfig):
    tau = cfg.options.get("tau")
    beta = cfg.options.get("beta")
    tau = cfg.params.get("tau") if tau is None else tau
    beta = cfg.params.get("beta") if beta is None else beta
    if tau is None or beta is None:
        raise UsageError("secular needs --tau and --beta (or --params tau=..,beta=..)")
    roots = cardano_roots(tau, beta)
    label = classify_point(tau, beta, cfg.tolerances)
    report = {
        "tau": tau,
        "beta": beta,
        "s": _eig_pairs(roots.s),
        "energies": _eig_pairs(energies_from_s(roots)),
        "discriminant": roots.discriminant,
        "region": label.to_dict(),
    }
    return report, None


def cmd_region_map(cfg: CliConfig):
    steps = cfg.options.get("steps") or 21
    if steps < 2:
        raise UsageError("--steps must be >= 2")
    taus = np.linspace(*cfg.options["tau_range"], steps)
    betas = np.linspace(*cfg.options["beta_range"], steps)
    rows = []
    for t in taus:
        for b in betas:
            lab = classify_point(float(t), float(b), cfg.tolerances)
            rows.append([float(t), float(b), int(lab.all_s_real), int(lab.all_s_positive), int(lab.unitary)])
    header = ["tau", "beta", "real_flag", "positive_flag", "unitary_flag"]
    report = {"steps": steps, "columns": header, "rows": rows,
              "unitary_fraction": float(np.mean([r[4] for r in rows]))}
    return report, (header, rows)


def cmd_sweep(cfg: CliConfig):
    (name,), fam = _family(cfg)
    steps = cfg.options.get("steps") or 101
    table = sweep_1d(fam, cfg.options["range"], steps, cfg.tolerances, name=name)
    rows = list(table.rows())
    report = {"parameter": name, "steps": steps, "columns": table.header(), "rows": rows,
              "max_imag": float(max(p.max_imag for p in table.points))}
    return report, (table.header(), rows)


def cmd_ep_locate(cfg: CliConfig):
    (name,), fam = _family(cfg)
    loc = locate_ep_1d(fam, cfg.options["bracket"], cfg.tolerances)
    report = {
        "parameter": name,
        "param_value": loc.param_value,
        "discriminant_at": loc.discriminant_at,
        "disc_tol": loc.disc_tol,
        "bracket": list(loc.bracket),
        "method": loc.method,
        "extrapolated": loc.extrapolated,
        "jordan": [s.to_dict() for s in loc.jordan],
    }
    return report, None


def cmd_unfold(cfg: CliConfig):
    (name,), fam = _family(cfg)
    hi, lo = cfg.options["g_range"]
    steps = cfg.options.get("steps") or 13
    g = np.logspace(np.log10(hi), np.log10(lo), steps)
    fit = unfolding_exponent(fam, cfg.options["ep"], g, cfg.tolerances, cfg.options["direction"])
    report = {
        "parameter": name,
        "ep_value": fit.ep_value,
        "eta": [fit.eta.real, fit.eta.imag],
        "exponent": fit.exponent,
        "prefactor": fit.prefactor,
        "r_squared": fit.r_squared,
        "samples": [list(s) for s in fit.samples],
    }
    return report, (["g", "distance"], [list(s) for s in fit.samples])


def cmd_reality(cfg: CliConfig):
    o = cfg.options
    if o["N"] < 1 or o["trials"] < 1:
        raise UsageError("--N and --trials must be positive")
    g_values = _floats(o["g_values"])
    if any(g <= 0 for g in g_values):
        raise UsageError("g values must be positive")
    rep = reality_experiment(o["N"], o["mode"], _prefactors(o.get("prefactors")), g_values,
                             o["trials"], cfg.tolerances, seed=cfg.seed if cfg.seed is not None else 0)
    rows = [[g, f] for g, f in zip(rep.g_values, rep.fraction_real_per_g)]
    return rep.to_dict(), (["g", "fraction_real"], rows)


def cmd_locus(cfg: CliConfig):
    names, fam = _family(cfg, 2)
    steps = cfg.options.get("steps") or 21
    if steps < 2:
        raise UsageError("--steps must be >= 2")
    xs = np.linspace(*cfg.options["x_range"], steps)
    ys = np.linspace(*cfg.options["y_range"], steps)
    grid = spectral_locus_2d(fam, xs, ys, cfg.tolerances, tuple(names))
    rows = list(grid.rows())
    report = {"parameters": names, "steps": steps, "columns": grid.header(), "rows": rows}
    return report, (grid.header(), rows)


_HANDLERS = {
    "spectrum": cmd_spectrum,
    "jordan": cmd_jordan,
    "transition": cmd_transition,
    "metric": cmd_metric,
    "secular": cmd_secular,
    "region-map": cmd_region_map,
    "sweep": cmd_sweep,
    "ep-locate": cmd_ep_locate,
    "unfold": cmd_unfold,
    "reality": cmd_reality,
    "locus": cmd_locus,
}


def run(cfg: CliConfig):
    """Dispatch ``cfg``; returns (exit code, serialized report or error line)."""
    try:
        report, table = _HANDLERS[cfg.command](cfg)
    except (UsageError, ModelError, ParseError) as exc:
        return 2, _error(exc)
    except EpAtlasError as exc:
        return 1, _error(exc)
    except ValueError as exc:
        return 2, _error(UsageError(str(exc)))
    if cfg.output == "csv":
        if table is None:
            return 2, _error(UsageError(f"{cfg.command} has no CSV output; use --output json"))
        return 0, eio.rows_to_csv(*table)
    return 0, eio.dumps(report) + "\n"


def _error(exc: EpAtlasError) -> str:
    return eio.dumps({"error": exc.message, "reason": exc.reason}) + "\n"


def main(argv: Optional[List[str]] = None, env=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv, env)
    except UsageError as exc:
        sys.stderr.write(_error(exc))
        return 2
    code, text = run(cfg)
    if code != 0:
        sys.stderr.write(text)
    elif cfg.output_path:
        with open(cfg.output_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
