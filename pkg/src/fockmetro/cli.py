"""Command-line front end.

Every command writes one report to stdout (or ``--out``) as JSON, CSV or a
human-readable table; warnings go to stderr. Exit codes: 0 success
(possibly with flagged rows), 2 invalid input, 3 numerical failure.

JSON reports are ``{"meta": {"version", "command", "config"}, "rows": [...]}``.
CSV reports carry a header row; machine formats keep 17 significant digits
so both formats parse to identical doubles.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import secrets
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable

import numpy as np

from . import __version__
from . import bayes_estimation as be
from . import closed_forms as cf
from . import fock_core as fc
from . import freq_estimation as fe
from . import measurement_sim as ms
from .errors import NumericalError, ValidationError

log = logging.getLogger("fockmetro")

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3
DUAL_ROUTE_TOL = 1e-8

SPEC_ALIASES = {
    "noon": "noon",
    "vacuum-fock-squared": "vacuum_fock_squared", "psi-ons": "vacuum_fock_squared",
    "rho-ons": "rho_ons",
    "rho-onn": "rho_onn",
    "psi-onn": "psi_onn",
    "master": "master", "master-state": "master",
    "prob-mix": "prob_mix",
    "coherent-prob-mix": "coherent_prob_mix",
    "custom": "custom",
}
SPEC_KEYS = {
    "noon": ("N",),
    "vacuum_fock_squared": ("N", "eta"),
    "rho_ons": ("N", "eta"),
    "rho_onn": ("N", "eta"),
    "psi_onn": ("N", "eta"),
    "master": ("N", "alpha", "beta"),
}
SWEEP_PARAMETERS = ("eta", "N", "W", "p", "gamma")

ESTIMATION_COLUMNS = (
    "spec", "N", "eta", "alpha", "beta", "p", "phi",
    "nbar", "nbar_squared", "vacuum_probability",
    "qfi", "qfi_method", "qfi_closed", "conditioned_qfi", "qcrb_variance", "cfi_counting",
    "prior_width", "sigma0_sq", "P", "P_closed", "optimal_error", "conditioned_P",
    "gamma", "loss_bound", "flags",
)
STATE_INFO_COLUMNS = (
    "spec", "N", "eta", "alpha", "beta", "p", "n_max",
    "nbar", "nbar_closed", "nbar_squared", "nbar_squared_closed",
    "vacuum_probability", "vacuum_probability_closed", "total_number_distribution", "flags",
)
TABLE1_COLUMNS = (
    "family", "N", "eta",
    "nbar", "nbar_closed", "vacuum_probability", "vacuum_probability_closed",
    "qfi", "qfi_twirled", "qfi_closed", "conditioned_qfi", "conditioned_qfi_closed", "flags",
)


# ---------------------------------------------------------------------------
# Configuration


@dataclass
class Settings:
    phi: float = 0.0
    nu: int = 1
    nodes: int = be.DEFAULT_NODES
    eps_supp: float = 1e-10
    eps_prob: float = fe.EPS_PROB
    recombiner: str | None = None

    def recombiner_for(self, default: str) -> str:
        return self.recombiner or default


@dataclass
class RunConfig:
    command: str
    spec: dict | None = None
    prior: dict | None = None
    sweep: dict | None = None
    output: dict = field(default_factory=lambda: {"format": "json", "path": None})
    settings: Settings = field(default_factory=Settings)
    gamma: float | None = None
    nbar: float | None = None
    shots: int | None = None
    seed: int | None = None
    params: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "spec": self.spec, "prior": self.prior, "sweep": self.sweep, "output": self.output,
            "phi": self.settings.phi, "nu": self.settings.nu,
            "tolerances": {"eps_supp": self.settings.eps_supp, "eps_prob": self.settings.eps_prob,
                           "nodes": self.settings.nodes},
            "recombiner": self.settings.recombiner,
            "gamma": self.gamma, "nbar": self.nbar, "shots": self.shots, "seed": self.seed,
        }


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ValidationError("config file must hold a single JSON object")
    return data


def _merge_spec(base: dict | None, args: argparse.Namespace) -> dict | None:
    spec = dict(base or {})
    if args.spec:
        kind = SPEC_ALIASES.get(args.spec)
        if kind is None:
            raise ValidationError(f"unknown --spec {args.spec!r}; choose from {sorted(SPEC_ALIASES)}")
        if spec.get("kind") != kind:
            spec = {"kind": kind}
    if not spec:
        return None
    kind = spec.get("kind")
    if kind in ("prob_mix", "coherent_prob_mix"):
        inner = dict(spec.get("inner") or {})
        if args.inner:
            ikind = SPEC_ALIASES.get(args.inner)
            if ikind is None:
                raise ValidationError(f"unknown --inner {args.inner!r}")
            if inner.get("kind") != ikind:
                inner = {"kind": ikind}
        if not inner:
            raise ValidationError(f"{kind} needs an inner spec (--inner or config)")
        _apply_spec_flags(inner, args)
        spec["inner"] = inner
        if args.p is not None:
            spec["p"] = args.p
    else:
        _apply_spec_flags(spec, args)
    return spec


def _apply_spec_flags(spec: dict, args: argparse.Namespace) -> None:
    for key in SPEC_KEYS.get(spec.get("kind"), ()):
        value = getattr(args, key, None)
        if value is not None:
            spec[key] = value


def _merge_prior(base: dict | None, args: argparse.Namespace, nodes: int) -> dict | None:
    prior = dict(base or {})
    if args.prior_width is not None:
        prior = {k: v for k, v in prior.items() if k not in ("xs", "density")}
        prior["width"] = args.prior_width
    if args.prior_center is not None:
        prior["center"] = args.prior_center
    if not prior:
        return None
    prior.setdefault("nodes", nodes)
    return prior


def build_config(args: argparse.Namespace) -> RunConfig:
    raw = _load_config(args.config)
    tol = dict(raw.get("tolerances") or {})
    settings = Settings(
        phi=_first(args.phi, raw.get("phi"), 0.0),
        nu=int(_first(args.nu, raw.get("nu"), 1)),
        nodes=int(_first(args.nodes, tol.get("nodes"), be.DEFAULT_NODES)),
        eps_supp=float(_first(args.eps_supp, tol.get("eps_supp"), 1e-10)),
        eps_prob=float(_first(args.eps_prob, tol.get("eps_prob"), fe.EPS_PROB)),
        recombiner=_first(args.recombiner, raw.get("recombiner"), None),
    )
    out = dict(raw.get("output") or {})
    output = {"format": _first(args.format, out.get("format"), "json"),
              "path": _first(args.out, out.get("path"), None)}
    if output["format"] not in ("json", "csv", "table"):
        raise ValidationError(f"unknown output format {output['format']!r}")
    sweep = raw.get("sweep")
    if getattr(args, "param", None) or getattr(args, "values", None) or getattr(args, "grid", None):
        sweep = dict(sweep or {})
        if args.param:
            sweep["parameter"] = args.param
        if args.values:
            sweep["values"] = [float(v) for v in args.values.split(",") if v.strip()]
        elif args.grid:
            try:
                start, stop, num = args.grid.split(":")
                sweep["values"] = np.linspace(float(start), float(stop), int(num)).tolist()
            except ValueError:
                raise ValidationError("--grid expects start:stop:num") from None
    return RunConfig(
        command=args.command,
        spec=_merge_spec(raw.get("spec"), args),
        prior=_merge_prior(raw.get("prior"), args, settings.nodes),
        sweep=sweep,
        output=output,
        settings=settings,
        gamma=_first(args.gamma, raw.get("gamma"), None),
        nbar=_first(getattr(args, "nbar", None), raw.get("nbar"), None),
        shots=_first(args.shots, raw.get("shots"), None),
        seed=_first(args.seed, raw.get("seed"), None),
        params={k: getattr(args, k) for k in ("N", "eta") if getattr(args, k) is not None},
    )


def _first(*values):
    for v in values[:-1]:
        if v is not None:
            return v
    return values[-1]


def make_prior(prior: dict | None, nodes: int) -> be.Prior | None:
    if prior is None:
        return None
    n = int(prior.get("nodes", nodes))
    if "xs" in prior or "density" in prior:
        return be.Prior.tabulated(prior["xs"], prior["density"], nodes=n)
    if "width" not in prior:
        raise ValidationError("prior needs a width (flat) or xs/density (tabulated)")
    return be.Prior.flat(float(prior["width"]), float(prior.get("center", 0.0)), nodes=n)


def _spec(cfg: RunConfig):
    if cfg.spec is None:
        raise ValidationError("a state spec is required (--spec or config 'spec')")
    return fc.spec_from_dict(cfg.spec)


# ---------------------------------------------------------------------------
# Reports


@dataclass
class Report:
    command: str
    config: dict
    columns: tuple[str, ...]
    rows: list[dict]
    extra: dict = field(default_factory=dict)

    def flagged(self) -> bool:
        return any(r.get("flags") for r in self.rows)


def _machine(value: Any) -> Any:
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not math.isfinite(v):
            return str(v)
        return float(format(v, ".17g"))
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, dict):
        return {str(k): _machine(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_machine(v) for v in value]
    return value


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if isinstance(value, (list, tuple)):
        return ";".join(str(v) for v in value)
    if isinstance(value, dict):
        return ";".join(f"{k}:{_csv_cell(v)}" for k, v in value.items())
    return str(value)


def _human_cell(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".6g")
    if isinstance(value, dict):
        return ";".join(f"{k}:{_human_cell(v)}" for k, v in value.items())
    return _csv_cell(value)


def render(report: Report, fmt: str) -> str:
    if fmt == "json":
        payload = {"meta": {"version": __version__, "command": report.command,
                            "config": _machine(report.config)},
                   "rows": [{c: _machine(r.get(c)) for c in report.columns} for r in report.rows]}
        payload.update({k: _machine(v) for k, v in report.extra.items()})
        return json.dumps(payload, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(report.columns)
        for r in report.rows:
            w.writerow([_csv_cell(r.get(c)) for c in report.columns])
        return buf.getvalue()
    cols = [c for c in report.columns if any(r.get(c) not in (None, "", ()) for r in report.rows)]
    cells = [[_human_cell(r.get(c)) for c in cols] for r in report.rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells]
    for k, v in report.extra.items():
        lines.append(f"{k}: {_human_cell(v) if not isinstance(v, list) else json.dumps(_machine(v))}")
    return "\n".join(lines) + "\n"


def _check(row: dict, numeric: str, closed: str) -> None:
    a, b = row.get(numeric), row.get(closed)
    if a is None or b is None:
        return
    if abs(a - b) > DUAL_ROUTE_TOL * max(1.0, abs(b)):
        row["flags"].append(f"mismatch:{numeric}")
        log.warning("%s=%r disagrees with closed form %r", numeric, a, b)


def _spec_fields(spec) -> dict:
    row: dict[str, Any] = {"spec": fc.SPEC_KINDS[type(spec)]}
    target = spec.inner if isinstance(spec, (fc.ProbMix, fc.CoherentProbMix)) else spec
    if isinstance(spec, (fc.ProbMix, fc.CoherentProbMix)):
        row["spec"] += f"[{fc.SPEC_KINDS[type(spec.inner)]}]"
        row["p"] = spec.p
    for key in ("N", "eta", "alpha", "beta"):
        if hasattr(target, key):
            row[key] = getattr(target, key)
    return row


def _noon_family_beta(spec) -> float | None:
    if isinstance(spec, fc.Noon):
        return 1.0
    if isinstance(spec, (fc.RhoONs, fc.RhoONN)):
        return 2 * spec.eta**2 / (1 + spec.eta**2) ** 2
    if isinstance(spec, fc.MasterState):
        return spec.beta
    return None


def estimation_row(spec, settings: Settings, prior: be.Prior | None = None,
                   gamma: float | None = None, *, with_qfi: bool = True,
                   with_counting: bool = False) -> dict:
    state = fc.make_state(spec)
    row = _spec_fields(spec)
    row["flags"] = []
    row["phi"] = settings.phi
    row["nbar"] = fc.mean_total_number(state)
    row["nbar_squared"] = fc.mean_total_number_squared(state)
    vac = fc.vacuum_probability(state)
    row["vacuum_probability"] = vac
    if with_qfi:
        res = (fe.qfi_pure(state) if isinstance(state, fc.PureState)
               else fe.qfi_mixed(state, settings.phi, eps_support=settings.eps_supp))
        row["qfi"] = res.value
        row["qfi_method"] = res.method
        row["qfi_closed"] = cf.qfi(spec)
        _check(row, "qfi", "qfi_closed")
        if vac < 1.0:
            row["conditioned_qfi"] = res.value / (1.0 - vac)
        row["qcrb_variance"] = fe.qcrb_variance(res.value, settings.nu)
        if math.isinf(row["qcrb_variance"]):
            row["flags"].append("zero_qfi")
        if with_counting:
            povm = ms.photon_counting_povm(state.n_max, settings.recombiner_for("balanced"))
            c = fe.cfi(state, settings.phi, povm, eps_prob=settings.eps_prob)
            row["cfi_counting"] = c
            if math.isinf(c):
                row["flags"].append("divergent_cfi")
    if prior is not None:
        result = be.metrological_power(state, prior, eps_support=settings.eps_supp)
        row["prior_width"] = prior.width
        row["sigma0_sq"] = result.sigma0_sq
        row["P"] = result.P
        row["optimal_error"] = result.optimal_error
        beta = _noon_family_beta(spec)
        centred_flat = prior.kind == "flat" and abs(sum(prior.support)) < 1e-15
        if beta is not None and centred_flat:
            row["P_closed"] = be.closed_form_P(spec.N, 0.0, beta, prior.width)
            _check(row, "P", "P_closed")
        if vac < 1.0:
            row["conditioned_P"] = result.P / (1.0 - vac)
        row["flags"].extend(result.flags)
    if gamma is not None:
        row["gamma"] = gamma
        row["loss_bound"] = fe.loss_bound(row["nbar"], gamma)
        if with_qfi and row["qfi"] > row["loss_bound"] * (1 + 1e-12):
            row["flags"].append("qfi_exceeds_loss_bound")
    return row


# ---------------------------------------------------------------------------
# Commands


def cmd_state_info(cfg: RunConfig) -> Report:
    spec = _spec(cfg)
    state = fc.make_state(spec)
    row = _spec_fields(spec)
    row.update(flags=[], n_max=state.n_max,
               nbar=fc.mean_total_number(state), nbar_closed=cf.mean_number(spec),
               nbar_squared=fc.mean_total_number_squared(state),
               nbar_squared_closed=cf.mean_number_squared(spec),
               vacuum_probability=fc.vacuum_probability(state),
               vacuum_probability_closed=cf.vacuum_probability(spec),
               total_number_distribution=fc.total_number_distribution(state))
    for name in ("nbar", "nbar_squared", "vacuum_probability"):
        _check(row, name, f"{name}_closed")
    return Report(cfg.command, cfg.as_dict(), STATE_INFO_COLUMNS, [row])


def table1_rows(N: int, eta: float, settings: Settings | None = None) -> list[dict]:
    """Numerically computed Table-1 quantities with closed forms alongside.

    For the two vacuum-Fock rows the pure state gives n-bar, vacuum
    probability and QFI; the QFI of its total-number twirl (the mixed
    partner) is reported in ``qfi_twirled`` and must agree.
    """
    settings = settings or Settings()
    families = (("noon", fc.Noon(N), fc.Noon(N)),
                ("psi_ons|rho_ons", fc.VacuumFockSquared(N, eta), fc.RhoONs(N, eta)),
                ("psi_onn|rho_onn", fc.PsiONN(N, eta), fc.RhoONN(N, eta)))
    rows = []
    for name, pure_spec, mixed_spec in families:
        pure = fc.make_state(pure_spec)
        mixed = fc.to_density(fc.make_state(mixed_spec))
        vac = fc.vacuum_probability(pure)
        q = fe.qfi_pure(pure).value
        row = {"family": name, "N": N, "eta": eta, "flags": [],
               "nbar": fc.mean_total_number(pure), "nbar_closed": cf.mean_number(pure_spec),
               "vacuum_probability": vac, "vacuum_probability_closed": cf.vacuum_probability(pure_spec),
               "qfi": q, "qfi_twirled": fe.qfi_mixed(mixed, settings.phi, eps_support=settings.eps_supp).value,
               "qfi_closed": cf.qfi(pure_spec),
               "conditioned_qfi": q / (1 - vac), "conditioned_qfi_closed": cf.conditioned_qfi(pure_spec)}
        for a in ("nbar", "vacuum_probability", "qfi", "conditioned_qfi"):
            _check(row, a, f"{a}_closed")
        if abs(row["qfi_twirled"] - q) > DUAL_ROUTE_TOL * max(1.0, q):
            row["flags"].append("mismatch:qfi_twirled")
        if abs(fc.mean_total_number(mixed) - row["nbar"]) > 1e-12:
            row["flags"].append("mismatch:nbar_twirled")
        rows.append(row)
    return rows


def cmd_table1(cfg: RunConfig) -> Report:
    spec = {**(cfg.spec or {}), **cfg.params}
    N, eta = spec.get("N"), spec.get("eta")
    if N is None or eta is None:
        raise ValidationError("table1 needs --N and --eta")
    fc.VacuumFockSquared(N, eta)
    return Report(cfg.command, cfg.as_dict(), TABLE1_COLUMNS, table1_rows(N, eta, cfg.settings))


def cmd_qfi(cfg: RunConfig) -> Report:
    row = estimation_row(_spec(cfg), cfg.settings, with_counting=True)
    return Report(cfg.command, cfg.as_dict(), ESTIMATION_COLUMNS, [row])


def cmd_bayes(cfg: RunConfig) -> Report:
    prior = make_prior(cfg.prior, cfg.settings.nodes)
    if prior is None:
        raise ValidationError("bayes needs a prior (--prior-width or config 'prior')")
    row = estimation_row(_spec(cfg), cfg.settings, prior)
    return Report(cfg.command, cfg.as_dict(), ESTIMATION_COLUMNS, [row])


def cmd_loss(cfg: RunConfig) -> Report:
    if cfg.gamma is None:
        raise ValidationError("loss needs --gamma")
    if cfg.spec is None:
        if cfg.nbar is None:
            raise ValidationError("loss needs --nbar or a state spec")
        row = {"flags": [], "nbar": float(cfg.nbar), "gamma": cfg.gamma,
               "loss_bound": fe.loss_bound(float(cfg.nbar), cfg.gamma)}
    else:
        row = estimation_row(_spec(cfg), cfg.settings, gamma=cfg.gamma)
    return Report(cfg.command, cfg.as_dict(), ESTIMATION_COLUMNS, [row])


def _sweep_grid(sweep: dict | None) -> tuple[str, list]:
    if not sweep or "parameter" not in sweep or "values" not in sweep:
        raise ValidationError("sweep needs --param and --values/--grid (or config 'sweep')")
    name = sweep["parameter"]
    if name not in SWEEP_PARAMETERS:
        raise ValidationError(f"sweep parameter must be one of {SWEEP_PARAMETERS}, got {name!r}")
    values = [float(v) for v in sweep["values"]]
    if not values or not all(math.isfinite(v) for v in values):
        raise ValidationError("sweep grid must be non-empty and finite")
    d = np.diff(values)
    if not (np.all(d > 0) or np.all(d < 0)):
        raise ValidationError("sweep grid must be strictly monotone")
    if name == "N":
        if any(v != int(v) for v in values):
            raise ValidationError("N grid must hold integers")
        values = [int(v) for v in values]
    return name, values


def _with_param(spec_dict: dict, name: str, value) -> dict:
    spec = json.loads(json.dumps(spec_dict))
    if name == "p":
        if spec.get("kind") not in ("prob_mix", "coherent_prob_mix"):
            raise ValidationError("sweeping p needs a prob-mix or coherent-prob-mix spec")
        spec["p"] = value
        return spec
    target = spec["inner"] if spec.get("kind") in ("prob_mix", "coherent_prob_mix") else spec
    if name not in SPEC_KEYS.get(target.get("kind"), ()):
        raise ValidationError(f"spec {target.get('kind')!r} has no parameter {name!r}")
    target[name] = value
    return spec


def sweep_rows(cfg: RunConfig) -> Iterable[dict]:
    """One row per grid point, in grid order; failures become flagged rows."""
    name, values = _sweep_grid(cfg.sweep)
    if cfg.spec is None:
        raise ValidationError("sweep needs a state spec")
    for value in values:
        try:
            spec_dict = cfg.spec
            prior_dict = cfg.prior
            gamma = cfg.gamma
            if name in ("eta", "N", "p"):
                spec_dict = _with_param(cfg.spec, name, value)
            elif name == "W":
                prior_dict = {**(cfg.prior or {}), "width": value}
                prior_dict.pop("xs", None)
                prior_dict.pop("density", None)
            else:
                gamma = value
            row = estimation_row(fc.spec_from_dict(spec_dict), cfg.settings,
                                 make_prior(prior_dict, cfg.settings.nodes), gamma)
        except (ValidationError, NumericalError) as exc:
            log.warning("sweep point %s=%r failed: %s", name, value, exc)
            row = {"flags": [f"error:{type(exc).__name__}: {exc}"]}
        row["sweep_parameter"] = name
        row["sweep_value"] = value
        yield row


def cmd_sweep(cfg: RunConfig) -> Report:
    rows = list(sweep_rows(cfg))
    return Report(cfg.command, cfg.as_dict(), ("sweep_parameter", "sweep_value") + ESTIMATION_COLUMNS, rows)


def cmd_sample(cfg: RunConfig) -> Report:
    spec = _spec(cfg)
    shots = cfg.shots if cfg.shots is not None else 100_000
    if isinstance(shots, float) and shots.is_integer():
        shots = int(shots)
    if not isinstance(shots, int) or shots < 1:
        raise ValidationError(f"shots must be a positive integer, got {shots!r}")
    seed = cfg.seed
    if seed is None:
        seed = secrets.randbits(63)
        log.warning("no seed given; using generated seed %d", seed)
    state = fc.make_state(spec)
    povm = ms.photon_counting_povm(state.n_max, cfg.settings.recombiner_for("none"))
    rec = ms.sample_counts(state, cfg.settings.phi, povm, shots, seed)
    nbar = fc.mean_total_number(state)
    summary: dict[str, Any] = {
        "seed": seed, "shots": shots,
        "worst_case_photons": rec.worst_case_photons,
        "mean_photons_per_shot": rec.mean_photons_per_shot,
        "nbar": nbar,
        "class_frequencies": rec.class_frequencies(),
    }
    if isinstance(spec, ms.VACUUM_FOCK_FAMILY):
        summary["event_classes"] = {k: {"probability": v.probability, "photons": v.photons,
                                        "informative": v.informative}
                                    for k, v in ms.event_class_summary(spec).items()}
    rows = [{"label_n1": n1, "label_n2": n2, "count": c} for (n1, n2), c in rec.histogram.items()]
    config = cfg.as_dict()
    config["seed"] = seed
    return Report(cfg.command, config, ("label_n1", "label_n2", "count"), rows, {"summary": summary})


COMMANDS: dict[str, Callable[[RunConfig], Report]] = {
    "state-info": cmd_state_info,
    "table1": cmd_table1,
    "qfi": cmd_qfi,
    "bayes": cmd_bayes,
    "loss": cmd_loss,
    "sweep": cmd_sweep,
    "sample": cmd_sample,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("state")
    g.add_argument("--spec", help=f"state family: {', '.join(sorted(SPEC_ALIASES))}")
    g.add_argument("--inner", help="inner family for prob-mix / coherent-prob-mix")
    g.add_argument("--N", type=int)
    g.add_argument("--eta", type=float)
    g.add_argument("--alpha", type=float)
    g.add_argument("--beta", type=float)
    g.add_argument("--p", type=float)
    g = common.add_argument_group("estimation")
    g.add_argument("--phi", type=float)
    g.add_argument("--nu", type=int, help="repetitions in the QCRB variance")
    g.add_argument("--prior-width", type=float)
    g.add_argument("--prior-center", type=float)
    g.add_argument("--nodes", type=int, help="quadrature nodes (default 200)")
    g.add_argument("--eps-supp", type=float)
    g.add_argument("--eps-prob", type=float)
    g.add_argument("--gamma", type=float, help="fractional loss rate")
    g.add_argument("--recombiner", choices=ms.RECOMBINERS)
    g = common.add_argument_group("sampling")
    g.add_argument("--shots", type=int)
    g.add_argument("--seed", type=int)
    g = common.add_argument_group("output")
    g.add_argument("--format", choices=("json", "csv", "table"))
    g.add_argument("--out")
    g.add_argument("--config", help="JSON config file; flags override it")
    g.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="fockmetro", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("state-info", parents=[common], help="number statistics of a state")
    sub.add_parser("table1", parents=[common], help="N00N / vacuum-Fock comparison table")
    sub.add_parser("qfi", parents=[common], help="quantum Fisher information and counting CFI")
    sub.add_parser("bayes", parents=[common], help="Bayesian metrological power")
    loss = sub.add_parser("loss", parents=[common], help="loss bound on the QFI")
    loss.add_argument("--nbar", type=float)
    sweep = sub.add_parser("sweep", parents=[common], help="parameter sweep")
    sweep.add_argument("--param", choices=SWEEP_PARAMETERS)
    sweep.add_argument("--values", help="comma-separated grid")
    sweep.add_argument("--grid", help="start:stop:num (inclusive linspace)")
    sub.add_parser("sample", parents=[common], help="finite-shot counting simulation")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.INFO if args.verbose else logging.WARNING)
    try:
        cfg = build_config(args)
        report = COMMANDS[args.command](cfg)
        text = render(report, cfg.output["format"])
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    finally:
        log.removeHandler(handler)
    path = cfg.output.get("path")
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if cfg.command == "sample" and cfg.output["format"] == "csv":
        s = report.extra["summary"]
        print(f"worst-case photons per shot: {s['worst_case_photons']}  "
              f"mean per shot: {s['mean_photons_per_shot']:.6g}  nbar: {s['nbar']:.6g}", file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
