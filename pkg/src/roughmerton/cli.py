"""Command line front end.

Every subcommand reads a TOML config (all keys optional, defaults below),
applies ``--set section.key=value`` and shortcut overrides, validates the
whole parameter set, then computes and writes CSV/JSON artifacts into
``--out``. Each artifact gets a ``<name>.meta.json`` sidecar with the
resolved config, a git-style SHA-1 of the artifact bytes and the seed.

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import hashlib
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from . import __version__
from .backend import BACKEND
from .distortion import martingale_check, solve_distortion
from .errors import DomainError, NumericalError, StagingError
from .kernels import (
    KernelKind,
    KernelSpec,
    TimeGrid,
    first_kind_check,
    resolvent_residual,
    resolvent_scaled,
    tol_res,
)
from .markov_approx import (
    assemble_approx_vol,
    build_quantization,
    convergence_study,
    feynman_kac_value,
    laplace_check,
)
from .models import (
    MarchaudParams,
    MarketParams,
    VolterraHestonParams,
    simulate_cir,
    simulate_fbm,
    simulate_marchaud_factors,
    simulate_volterra_heston,
    simulate_wealth,
)
from .riccati import RiccatiCoefficients, solve_riccati, tol_riccati
from .roughness import estimate_hurst

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


# ---------------------------------------------------------------------------
# schema


@dataclass(frozen=True)
class Key:
    kind: str  # float, int, str, bool, floats, ints
    default: Any
    help: str


SCHEMA: dict[str, dict[str, Key]] = {
    "grid": {
        "T": Key("float", 1.0, "horizon in years"),
        "dt": Key("float", 1.0 / 256, "time step; must divide T"),
    },
    "kernel": {
        "kind": Key("str", "fractional", "constant | fractional | exponential | gamma"),
        "c": Key("float", 1.0, "kernel scale"),
        "alpha": Key("float", 0.6, "exponent in (0, 1] (fractional, gamma)"),
        "lambda": Key("float", 1.0, "decay rate > 0 (exponential, gamma)"),
    },
    "market": {
        "r": Key("float", 0.02, "risk-free rate"),
        "theta": Key("float", 1.0, "market price of variance risk"),
        "rho": Key("float", -0.5, "correlation between stock and variance drivers"),
        "gamma": Key("float", 0.5, "risk aversion exponent in (0, 1)"),
        "w0": Key("float", 1.0, "initial wealth"),
        "rate_curve": Key("floats", None, "optional short rate at every grid node"),
    },
    "heston": {
        "v0": Key("float", 0.04, "initial variance"),
        "kappa": Key("float", 2.0, "mean reversion speed"),
        "phi": Key("float", 0.04, "long-run variance level"),
        "sigma": Key("float", 0.3, "vol of vol"),
    },
    "marchaud": {
        "nu0": Key("float", 0.04, "base volatility level"),
        "alpha": Key("float", -0.75, "Marchaud exponent in (-1, -1/2)"),
        "z0": Key("float", 0.04, "initial CIR factor"),
        "kappa": Key("float", 2.0, "CIR mean reversion"),
        "phi": Key("float", 0.04, "CIR long-run level"),
        "sigma": Key("float", 0.3, "CIR vol of vol"),
        "floor_eps": Key("float", 1e-6, "variance floor in max(nu, floor_eps)"),
    },
    "quantization": {
        "n": Key("int", 50, "number of atoms"),
        "xi_min": Key("float", 1e-4, "lowest knot"),
        "xi_max": Key("float", 1e4, "highest knot"),
        "spacing": Key("str", "geometric", "geometric | linear"),
        "laplace_t": Key("float", 1.0, "time at which the Laplace transform is checked"),
    },
    "run": {
        "seed": Key("int", 0, "64-bit seed"),
        "paths": Key("int", 10000, "Monte Carlo paths"),
        "threads": Key("int", 1, "worker threads (output does not depend on it)"),
        "scheme": Key("str", "auto", "euler | ivi | auto (ivi for singular kernels)"),
        "antithetic": Key("bool", False, "antithetic variates (euler only)"),
    },
    "riccati": {
        "c0": Key("float", 0.0, "constant coefficient"),
        "c1": Key("float", 0.0, "linear coefficient"),
        "c2": Key("float", 0.0, "quadratic coefficient"),
        "n_corr": Key("int", 2, "corrector sweeps"),
    },
    "resolvent": {
        "scale": Key("float", 1.0, "resolvent of scale * K"),
    },
    "simulate": {
        "model": Key("str", "volterra_heston", "volterra_heston | cir | fbm | marchaud"),
        "strategy": Key("float", None, "constant holding for wealth paths (volterra_heston)"),
        "hurst": Key("float", 0.1, "Hurst exponent (fbm)"),
        "binary": Key("bool", True, "also write the binary path dump (volterra_heston)"),
    },
    "roughness": {
        "hurst": Key("float", 0.1, "Hurst exponent of the simulated fBm"),
        "steps": Key("int", 4096, "samples per simulated path (at most 4096)"),
        "paths": Key("int", 25, "independent simulated paths, pooled"),
        "input": Key("str", None, "CSV with one column of log-volatility; replaces simulation"),
        "qs": Key("floats", [0.5, 1.0, 1.5, 2.0, 3.0], "moment orders"),
        "lags": Key("ints", list(range(1, 21)), "lags in samples"),
    },
    "distortion": {
        "p": Key("float", None, "integrability exponent p (default max(1.01, 1/(2 delta) + 0.01))"),
        "a_scan": Key("floats", [1.1, 1.5, 2.0, 4.0], "values of a scanned for the eta condition"),
    },
    "approx": {
        "convergence": Key("ints", None, "atom counts for a convergence study, e.g. [10, 20, 40]"),
    },
}

COMMANDS: dict[str, tuple[str, tuple[str, ...]]] = {
    "kernels": ("resolvent curve and identity residuals", ("grid", "kernel", "resolvent")),
    "riccati": ("solve a Riccati-Volterra equation", ("grid", "kernel", "riccati")),
    "simulate": ("simulate paths", ("grid", "kernel", "market", "heston", "marchaud",
                                    "quantization", "run", "simulate")),
    "roughness": ("Hurst exponent by moment scaling", ("grid", "run", "roughness")),
    "distortion": ("optimal strategy and value for Volterra Heston",
                   ("grid", "kernel", "market", "heston", "distortion")),
    "approx": ("quantized Marchaud model: quantization, value, convergence",
               ("grid", "market", "marchaud", "quantization", "run", "approx")),
    "compare": ("distortion value against its Monte Carlo martingale check",
                ("grid", "kernel", "market", "heston", "distortion", "run")),
}


def _coerce(section: str, name: str, key: Key, value: Any) -> Any:
    where = f"{section}.{name}"
    if value is None:
        return None
    if key.kind == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise DomainError(f"{where} must be a number, got {value!r}")
        return float(value)
    if key.kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise DomainError(f"{where} must be an integer, got {value!r}")
        return int(value)
    if key.kind == "str":
        if not isinstance(value, str):
            raise DomainError(f"{where} must be a string, got {value!r}")
        return value
    if key.kind == "bool":
        if not isinstance(value, bool):
            raise DomainError(f"{where} must be true or false, got {value!r}")
        return value
    if key.kind in ("floats", "ints"):
        if not isinstance(value, list):
            raise DomainError(f"{where} must be a list, got {value!r}")
        item = Key(key.kind[:-1], None, "")
        return [_coerce(section, name, item, v) for v in value]
    raise AssertionError(key.kind)


def _parse_value(text: str) -> Any:
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text


def load_config(path: str | None, overrides: Sequence[str] = ()) -> dict[str, dict[str, Any]]:
    """Resolved config: defaults, then the file, then ``section.key=value`` overrides."""
    raw: dict[str, Any] = {}
    if path is not None:
        with open(path, "rb") as fh:
            try:
                raw = tomllib.load(fh)
            except tomllib.TOMLDecodeError as exc:
                raise DomainError(f"cannot parse config {path}: {exc}") from exc
    for item in overrides:
        lhs, sep, rhs = item.partition("=")
        if not sep or "." not in lhs:
            raise DomainError(f"override must look like section.key=value, got {item!r}")
        section, _, name = lhs.strip().partition(".")
        raw.setdefault(section, {})
        if not isinstance(raw[section], dict):
            raise DomainError(f"config entry {section!r} must be a table")
        raw[section][name] = _parse_value(rhs.strip())

    unknown = sorted(set(raw) - set(SCHEMA))
    if unknown:
        raise DomainError(f"unknown config sections: {unknown}")
    out: dict[str, dict[str, Any]] = {}
    for section, keys in SCHEMA.items():
        given = raw.get(section, {})
        if not isinstance(given, dict):
            raise DomainError(f"config entry {section!r} must be a table")
        extra = sorted(set(given) - set(keys))
        if extra:
            raise DomainError(f"unknown keys in [{section}]: {extra}")
        out[section] = {name: _coerce(section, name, key, given.get(name, key.default))
                        for name, key in keys.items()}
    return out


# ---------------------------------------------------------------------------
# parameter builders


def _grid(cfg) -> TimeGrid:
    return TimeGrid.from_dt(cfg["grid"]["T"], cfg["grid"]["dt"])


def _kernel(cfg) -> KernelSpec:
    k = cfg["kernel"]
    kind = KernelKind.parse(k["kind"])
    alpha = k["alpha"] if kind in (KernelKind.FRACTIONAL, KernelKind.GAMMA) else None
    lam = k["lambda"] if kind in (KernelKind.EXPONENTIAL, KernelKind.GAMMA) else None
    return KernelSpec(kind, k["c"], alpha=alpha, lam=lam)


def _market(cfg) -> MarketParams:
    m = cfg["market"]
    return MarketParams(m["r"], m["theta"], m["rho"], m["gamma"], cfg["grid"]["T"], m["w0"])


def _heston(cfg) -> VolterraHestonParams:
    h = cfg["heston"]
    return VolterraHestonParams(h["v0"], h["kappa"], h["phi"], h["sigma"], _kernel(cfg))


def _marchaud(cfg) -> MarchaudParams:
    p = cfg["marchaud"]
    return MarchaudParams(p["nu0"], p["alpha"], p["z0"], p["kappa"], p["phi"], p["sigma"],
                          p["floor_eps"])


def _quantization(cfg, alpha_m: float, n: int | None = None):
    q = cfg["quantization"]
    return build_quantization(alpha_m, q["n"] if n is None else n, q["xi_min"], q["xi_max"],
                              q["spacing"])


def _run(cfg) -> dict[str, Any]:
    r = cfg["run"]
    if not 0 <= r["seed"] < 2 ** 64:
        raise DomainError("run.seed must lie in [0, 2^64)")
    if r["paths"] < 1:
        raise DomainError("run.paths must be positive")
    if r["threads"] < 1:
        raise DomainError("run.threads must be positive")
    if r["scheme"] not in ("auto", "euler", "ivi"):
        raise DomainError(f"run.scheme must be auto, euler or ivi, got {r['scheme']!r}")
    return r


def _scheme(run: dict, kernel: KernelSpec) -> str:
    if run["scheme"] != "auto":
        return run["scheme"]
    return "ivi" if kernel.singular else "euler"


# ---------------------------------------------------------------------------
# artifacts


class Artifacts:
    """Writes artifacts and their sidecars into one directory."""

    def __init__(self, out: Path, command: str, cfg: dict, seed: int | None):
        self.out, self.command, self.cfg, self.seed = out, command, cfg, seed
        self.written: list[str] = []
        out.mkdir(parents=True, exist_ok=True)

    def write(self, name: str, data: str | bytes) -> None:
        payload = data.encode() if isinstance(data, str) else data
        (self.out / name).write_bytes(payload)
        digest = hashlib.sha1(b"blob %d\0" % len(payload) + payload).hexdigest()
        meta = {
            "artifact": name,
            "command": self.command,
            "config": self.cfg,
            "sha1": digest,
            "seed": self.seed,
            "backend": BACKEND,
            "version": __version__,
            "created": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        }
        (self.out / f"{name}.meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
        self.written.append(name)


def _json(obj: Any) -> str:
    def clean(x):
        if isinstance(x, dict):
            return {str(k): clean(v) for k, v in x.items()}
        if isinstance(x, (list, tuple)):
            return [clean(v) for v in x]
        if isinstance(x, (np.floating, float)):
            x = float(x)
            return x if math.isfinite(x) else repr(x)
        if isinstance(x, np.integer):
            return int(x)
        if isinstance(x, np.bool_):
            return bool(x)
        return x
    return json.dumps(clean(obj), indent=2, sort_keys=True) + "\n"


def _columns(header: str, *cols) -> str:
    buf = io.StringIO()
    buf.write(header + "\n")
    for row in zip(*cols):
        buf.write(",".join(repr(float(v)) for v in row) + "\n")
    return buf.getvalue()


def _long_paths(header: str, grid: TimeGrid, *arrays) -> str:
    buf = io.StringIO()
    buf.write(header + "\n")
    t = grid.nodes
    for p in range(arrays[0].shape[0]):
        for j in range(t.shape[0]):
            vals = ",".join(repr(float(a[p, j])) for a in arrays)
            buf.write(f"{p},{float(t[j])!r},{vals}\n")
    return buf.getvalue()


# ---------------------------------------------------------------------------
# commands


def cmd_kernels(cfg, art: Artifacts, args) -> None:
    grid, spec = _grid(cfg), _kernel(cfg)
    scale = cfg["resolvent"]["scale"]
    curve = resolvent_scaled(spec, scale, grid)
    res = resolvent_residual(curve)
    art.write("resolvent.csv", curve.to_csv())
    art.write("residual.csv", _columns("t,residual", grid.nodes[1:], res))
    scaled = spec.scaled(scale)
    summary = {
        "kernel": scaled.to_dict(),
        "source": curve.source.value,
        "max_residual": float(np.max(np.abs(res))),
        "tol_res": tol_res(scaled, grid.dt),
    }
    if scaled.kind is KernelKind.FRACTIONAL and scaled.alpha < 1.0:
        err = float(np.max(np.abs(first_kind_check(scaled, grid) - 1.0)))
        summary["first_kind_max_err"] = err
        summary["first_kind_tol"] = 2.0 * grid.dt ** min(scaled.alpha, 1.0 - scaled.alpha)
    art.write("kernels.json", _json(summary))


def cmd_riccati(cfg, art: Artifacts, args) -> None:
    grid, spec = _grid(cfg), _kernel(cfg)
    r = cfg["riccati"]
    coeffs = RiccatiCoefficients(r["c0"], r["c1"], r["c2"])
    sol = solve_riccati(spec, coeffs, grid, n_corr=r["n_corr"])
    art.write("riccati.csv", sol.to_csv())
    art.write("riccati.json", _json({
        "kernel": spec.to_dict(),
        "coefficients": {"c0": coeffs.c0, "c1": coeffs.c1, "c2": coeffs.c2},
        "terminal": sol.terminal,
        "residual": sol.residual,
        "tol_riccati": tol_riccati(spec, grid.dt),
        "corrector_iters": sol.corrector_iters,
    }))


def cmd_simulate(cfg, art: Artifacts, args) -> None:
    grid, run = _grid(cfg), _run(cfg)
    sim = cfg["simulate"]
    model = sim["model"]
    n, seed, threads = run["paths"], run["seed"], run["threads"]
    if model == "volterra_heston":
        h, m = _heston(cfg), _market(cfg)
        scheme = _scheme(run, h.kernel)
        bundle = simulate_volterra_heston(h, m, grid, n, seed, scheme=scheme,
                                          antithetic=run["antithetic"], threads=threads)
        if sim["strategy"] is not None:
            bundle = simulate_wealth(bundle, m, sim["strategy"])
        art.write("paths.csv", bundle.to_csv())
        if sim["binary"]:
            art.write("paths.bin", bundle.to_bytes())
        summary = {"model": model, "scheme": scheme, "mean_V_T": float(bundle.v[:, -1].mean()),
                   "mean_S_T": float(bundle.s[:, -1].mean())}
    elif model == "cir":
        p = _marchaud(cfg)
        z = simulate_cir(p, grid, n, seed, antithetic=run["antithetic"], threads=threads)
        art.write("paths.csv", _long_paths("path_id,t,Z", grid, z))
        summary = {"model": model, "mean_Z_T": float(z[:, -1].mean())}
    elif model == "fbm":
        w = simulate_fbm(sim["hurst"], grid, n, seed, threads=threads)
        art.write("paths.csv", _long_paths("path_id,t,W", grid, w))
        summary = {"model": model, "hurst": sim["hurst"]}
    elif model == "marchaud":
        p = _marchaud(cfg)
        q = _quantization(cfg, p.alpha_m)
        z, y = simulate_marchaud_factors(p, q, grid, n, seed, threads=threads)
        nu, var = assemble_approx_vol(p, q, z, y, grid)
        art.write("paths.csv", _long_paths("path_id,t,Z,nu,V", grid, z, nu, var))
        summary = {"model": model, "atoms": q.n, "mean_nu_T": float(nu[:, -1].mean())}
    else:
        raise DomainError(f"simulate.model must be volterra_heston, cir, fbm or marchaud, got {model!r}")
    summary.update({"paths": n, "seed": seed, "n_steps": grid.n_steps, "dt": grid.dt})
    art.write("simulate.json", _json(summary))


def _read_series(path: str) -> np.ndarray:
    try:
        data = np.loadtxt(path, delimiter=",", ndmin=1, comments="#")
    except ValueError:
        data = np.loadtxt(path, delimiter=",", ndmin=1, comments="#", skiprows=1)
    if data.ndim != 1:
        raise DomainError(f"{path} must hold a single column of log-volatility values")
    return data


def cmd_roughness(cfg, art: Artifacts, args) -> None:
    rc = cfg["roughness"]
    if rc["input"] is not None:
        series = _read_series(rc["input"])
    else:
        run = _run(cfg)
        grid = TimeGrid.uniform(cfg["grid"]["T"], rc["steps"])
        series = simulate_fbm(rc["hurst"], grid, rc["paths"], run["seed"], threads=run["threads"])
    report = estimate_hurst(series, rc["qs"], rc["lags"])
    art.write("scaling.csv", report.to_csv())
    art.write("scaling.json", report.to_json() + "\n")


def cmd_distortion(cfg, art: Artifacts, args) -> None:
    grid, m, h = _grid(cfg), _market(cfg), _heston(cfg)
    d = cfg["distortion"]
    sol = solve_distortion(m, h, grid, rate_curve=cfg["market"]["rate_curve"], p=d["p"],
                           a_scan=d["a_scan"])
    art.write("strategy.csv", sol.strategy.to_csv())
    art.write("curves.csv", sol.curves_csv())
    art.write("distortion.json", _json(sol.summary()))


def cmd_approx(cfg, art: Artifacts, args) -> None:
    grid, m, p, run = _grid(cfg), _market(cfg), _marchaud(cfg), _run(cfg)
    q = _quantization(cfg, p.alpha_m)
    art.write("quantization.csv", q.to_csv())
    lap = laplace_check(q, cfg["quantization"]["laplace_t"])
    summary: dict[str, Any] = {
        "laplace": {"t": cfg["quantization"]["laplace_t"], "discrete": lap.discrete,
                    "exact": lap.exact, "abs_err": lap.abs_err},
        "strategy": m.theta / (1.0 - m.gamma_ra),
    }
    n_list = args.convergence if args.convergence is not None else cfg["approx"]["convergence"]
    if n_list:
        qc = cfg["quantization"]
        table = convergence_study(p, m, n_list, run["paths"], run["seed"], grid, qc["xi_min"],
                                  qc["xi_max"], qc["spacing"], threads=run["threads"])
        art.write("convergence.csv", table.to_csv())
        summary["convergence"] = {"nondecreasing": table.nondecreasing,
                                  "stabilizing": table.stabilizing}
    else:
        v = feynman_kac_value(p, m, q, run["paths"], run["seed"], grid, threads=run["threads"])
        summary["value"] = {"n": v.n, "estimate": v.estimate, "std_err": v.std_err,
                            "n_paths": v.n_paths, "seed": v.seed}
    art.write("approx.json", _json(summary))


def cmd_compare(cfg, art: Artifacts, args) -> None:
    grid, m, h, run = _grid(cfg), _market(cfg), _heston(cfg), _run(cfg)
    d = cfg["distortion"]
    sol = solve_distortion(m, h, grid, rate_curve=cfg["market"]["rate_curve"], p=d["p"],
                           a_scan=d["a_scan"])
    check = martingale_check(sol, run["paths"], run["seed"], grid=grid,
                             scheme=_scheme(run, h.kernel), threads=run["threads"])
    out = sol.summary()
    out["monte_carlo"] = check.to_dict()
    out["verdict"] = "consistent" if check.consistent else "inconsistent"
    art.write("compare.json", _json(out))


HANDLERS: dict[str, Callable] = {
    "kernels": cmd_kernels,
    "riccati": cmd_riccati,
    "simulate": cmd_simulate,
    "roughness": cmd_roughness,
    "distortion": cmd_distortion,
    "approx": cmd_approx,
    "compare": cmd_compare,
}


# ---------------------------------------------------------------------------
# argument parsing


def _keys_help(sections: Sequence[str]) -> str:
    lines = ["config keys read (section.key = default: meaning):"]
    for section in sections:
        for name, key in SCHEMA[section].items():
            default = "unset" if key.default is None else json.dumps(key.default)
            lines.append(f"  {section}.{name} = {default}: {key.help}")
    return "\n".join(lines)


def _convergence_arg(text: str) -> list[int]:
    body = text.split("=", 1)[1] if "=" in text else text
    try:
        values = [int(v) for v in body.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected n=10,20,40, got {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("empty atom list")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="roughmerton", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (summary, sections) in COMMANDS.items():
        p = sub.add_parser(name, help=summary, description=summary, epilog=_keys_help(sections),
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--config", metavar="PATH", help="TOML config file")
        p.add_argument("--out", metavar="DIR", default=".", help="output directory (default .)")
        p.add_argument("--set", metavar="SECTION.KEY=VALUE", action="append", default=[],
                       dest="overrides", help="override one config key (repeatable)")
        p.add_argument("--dt", type=float, help="shortcut for grid.dt")
        if "run" in sections:
            p.add_argument("--seed", type=int, help="shortcut for run.seed")
            p.add_argument("--paths", type=int, help="shortcut for run.paths")
            p.add_argument("--threads", type=int, help="shortcut for run.threads")
        if name == "approx":
            p.add_argument("--convergence", type=_convergence_arg, metavar="n=N1,N2,...",
                           help="run a convergence study over nested atom counts")
    return parser


def _overrides(args) -> list[str]:
    out = list(args.overrides)
    for flag, key in (("dt", "grid.dt"), ("seed", "run.seed"), ("paths", "run.paths"),
                      ("threads", "run.threads")):
        value = getattr(args, flag, None)
        if value is not None:
            out.append(f"{key}={value!r}")
    return out


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, _overrides(args))
        # validate every block the command reads before computing anything
        sections = COMMANDS[args.command][1]
        _grid(cfg)
        for section, build in (("kernel", _kernel), ("market", _market), ("heston", _heston),
                               ("marchaud", _marchaud), ("run", _run)):
            if section in sections:
                build(cfg)
        seed = cfg["run"]["seed"] if "run" in sections else None
        used = {s: cfg[s] for s in sections}
        art = Artifacts(Path(args.out), args.command, used, seed)
        HANDLERS[args.command](cfg, art, args)
    except (DomainError, StagingError) as exc:
        print(f"roughmerton: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"roughmerton: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"roughmerton: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    for name in art.written:
        print(Path(args.out) / name)
    return EXIT_OK


def main() -> None:
    sys.exit(run())
