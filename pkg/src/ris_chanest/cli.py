"""Command-line front end.

Parses a flat key=value config file and/or long flags (flags win, defaults
fill the rest), runs the sweep, and writes ``nmse_direct.csv``,
``nmse_cascade.csv``, NMSE figures, and a ``manifest.json`` run record
from which the exact configuration can be re-parsed.

Exit codes: 0 success, 1 config error, 2 I/O error.
"""

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .channel import PathLosses
from .sim import (
    SystemConfig,
    closed_form_curves,
    default_estimators,
    monte_carlo_sweep,
)

__all__ = ["parse_config", "run_command", "main"]

THREADS_ENV_VAR = "RIS_CHANEST_THREADS"

# Every config-file key is also exposed as a long flag.
CONFIG_KEYS = (
    "m",
    "n",
    "tau_p",
    "trials",
    "seed",
    "pattern",
    "estimators",
    "snr",
    "beta_bs",
    "beta_irs",
    "beta_bs_irs",
    "pilots",
    "d_bs_over_lambda",
    "d_irs_over_lambda",
    "resample_los",
)


def _parse_snr(value):
    """SNR grid from a min:step:max spec, a comma list, or a sequence."""
    if isinstance(value, (list, tuple)):
        return tuple(float(v) for v in value)
    text = str(value).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"snr spec must be min:step:max, got {text!r}")
        lo, step, hi = (float(p) for p in parts)
        if step <= 0:
            raise ValueError(f"snr step must be positive, got {step}")
        if hi < lo:
            raise ValueError(f"snr max must be >= min, got {text!r}")
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return tuple(lo + i * step for i in range(count))
    return tuple(float(p) for p in text.split(","))


def _parse_estimators(value):
    if isinstance(value, (list, tuple)):
        return tuple(str(v) for v in value)
    return tuple(p.strip() for p in str(value).split(",") if p.strip())


def _parse_pilots(value):
    if isinstance(value, (list, tuple)):
        tokens = [str(v) for v in value]
    else:
        tokens = [p.strip() for p in str(value).split(",") if p.strip()]
    try:
        return tuple(complex(t.strip("()")) for t in tokens)
    except ValueError as exc:
        raise ValueError(f"could not parse pilot sequence: {exc}") from exc


def _parse_bool(value):
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {value!r}")


_COERCERS = {
    "m": int,
    "n": int,
    "tau_p": int,
    "trials": int,
    "seed": int,
    "pattern": str,
    "estimators": _parse_estimators,
    "snr": _parse_snr,
    "beta_bs": float,
    "beta_irs": float,
    "beta_bs_irs": float,
    "pilots": _parse_pilots,
    "d_bs_over_lambda": float,
    "d_irs_over_lambda": float,
    "resample_los": _parse_bool,
}


def _load_config_file(path):
    """Read a flat key=value file or a JSON config/manifest."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError:
        return _parse_flat_text(text, path)
    if not isinstance(obj, dict):
        raise ValueError(f"JSON config {path} must be an object")
    if isinstance(obj.get("config"), dict):
        obj = obj["config"]
    return dict(obj)


def _parse_flat_text(text, path):
    data = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, value = line.split("=", 1)
        data[key.strip()] = value.strip()
    return data


def parse_config(path=None, overrides=None):
    """Resolve a :class:`SystemConfig` from a config file and/or overrides.

    Override values (typically CLI flags) win over file values; the
    numerical-study defaults fill whatever remains. Raises ``ValueError``
    naming the offending key on any invalid input.
    """
    data = {}
    if path is not None:
        data.update(_load_config_file(path))
    if overrides:
        data.update({k: v for k, v in overrides.items() if v is not None})

    unknown = sorted(set(data) - set(CONFIG_KEYS))
    if unknown:
        raise ValueError(f"unknown config key(s): {', '.join(unknown)}")

    coerced = {}
    for key, value in data.items():
        try:
            coerced[key] = _COERCERS[key](value)
        except (TypeError, ValueError) as exc:
            raise ValueError(f"invalid value for config key {key!r}: {exc}") from exc

    n = coerced.get("n", 50)
    tau_p = coerced.get("tau_p", n + 1)
    pattern = coerced.get("pattern", "dft")
    estimators = coerced.get("estimators") or default_estimators(pattern)
    pilots = coerced.get("pilots") or (1.0 + 0.0j,) * tau_p
    snr_grid = coerced.get("snr") or tuple(float(s) for s in range(-20, 25, 5))
    beta_bs = coerced.get("beta_bs", 0.5)
    beta_bs_irs = coerced.get("beta_bs_irs", 1.0)
    if "beta_irs" in coerced:
        losses = PathLosses(beta_bs, coerced["beta_irs"], beta_bs_irs)
    else:
        losses = PathLosses.normalized(n, beta_bs=beta_bs, beta_bs_irs=beta_bs_irs)
    return SystemConfig(
        m=coerced.get("m", 10),
        n=n,
        tau_p=tau_p,
        losses=losses,
        snr_grid_db=snr_grid,
        trials=coerced.get("trials", 10_000),
        master_seed=coerced.get("seed", 0),
        pattern=pattern,
        estimators=estimators,
        pilots=pilots,
        d_bs_over_lambda=coerced.get("d_bs_over_lambda", 0.5),
        d_irs_over_lambda=coerced.get("d_irs_over_lambda", 0.5),
        resample_los=coerced.get("resample_los", False),
    )


def _fmt(value):
    """Plain decimal with 9 significant digits."""
    return np.format_float_positional(
        float(value), precision=9, unique=False, fractional=False, trim="-"
    )


def _write_csv(path, curves, estimators, group, closed_form_only):
    header = ["snr_db"]
    for name in estimators:
        if not closed_form_only:
            header.append(f"{name}_{group}_emp")
        header.append(f"{name}_{group}_cf")
    attr = "direct" if group == "direct" else "cascade"
    lines = [",".join(header)]
    for curve in curves:
        row = [_fmt(curve.snr_db)]
        for name in estimators:
            point = curve.per_estimator[name]
            if not closed_form_only:
                row.append(_fmt(getattr(point, f"{attr}_emp")))
            row.append(_fmt(getattr(point, f"{attr}_cf")))
        lines.append(",".join(row))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def _config_record(cfg):
    """JSON-serializable config; parse_config on this reproduces cfg exactly."""
    return {
        "m": cfg.m,
        "n": cfg.n,
        "tau_p": cfg.tau_p,
        "beta_bs": cfg.losses.beta_bs,
        "beta_irs": cfg.losses.beta_irs,
        "beta_bs_irs": cfg.losses.beta_bs_irs,
        "snr": list(cfg.snr_grid_db),
        "trials": cfg.trials,
        "seed": cfg.master_seed,
        "pattern": cfg.pattern,
        "estimators": list(cfg.estimators),
        "pilots": [str(x) for x in cfg.pilots],
        "d_bs_over_lambda": cfg.d_bs_over_lambda,
        "d_irs_over_lambda": cfg.d_irs_over_lambda,
        "resample_los": cfg.resample_los,
    }


def run_command(cfg, out_dir, threads=1, closed_form_only=False, figures=True):
    """Run the sweep and write CSVs, figures, and the manifest into out_dir.

    Returns a process exit status: 0 on success, 2 on I/O failure.
    """
    start = time.perf_counter()
    try:
        os.makedirs(out_dir, exist_ok=True)
        if closed_form_only:
            curves = closed_form_curves(cfg)
        else:
            curves = monte_carlo_sweep(cfg, threads=threads)
        direct_path = os.path.join(out_dir, "nmse_direct.csv")
        cascade_path = os.path.join(out_dir, "nmse_cascade.csv")
        _write_csv(direct_path, curves, cfg.estimators, "direct", closed_form_only)
        _write_csv(cascade_path, curves, cfg.estimators, "cascade_avg", closed_form_only)
        outputs = {"nmse_direct": direct_path, "nmse_cascade": cascade_path}
        if figures:
            from .plotting import save_nmse_figures

            outputs["figures"] = save_nmse_figures(
                curves, cfg.estimators, out_dir, closed_form_only=closed_form_only
            )
        manifest = {
            "artifact": "ris-chanest",
            "version": __version__,
            "config": _config_record(cfg),
            "threads": threads,
            "closed_form_only": closed_form_only,
            "duration_seconds": time.perf_counter() - start,
            "outputs": outputs,
        }
        with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    return 0


class _Parser(argparse.ArgumentParser):
    """Raises instead of exiting so usage problems map to exit code 1."""

    def error(self, message):
        raise ValueError(message)


def _build_parser():
    parser = _Parser(
        prog="ris-chanest",
        description=(
            "Monte Carlo NMSE sweep for pilot-based channel estimation in a "
            "RIS-aided MISO uplink (LS with on-off or DFT activation, and MMSE)."
        ),
    )
    parser.add_argument("--config", help="config file (flat key=value text, JSON, or a manifest.json)")
    parser.add_argument("--m", type=int, help="base station antenna count (default 10)")
    parser.add_argument("--n", type=int, help="RIS element count (default 50)")
    parser.add_argument("--tau-p", dest="tau_p", type=int, help="pilot symbols per coherence interval (default n+1)")
    parser.add_argument("--snr", help="SNR grid in dB as min:step:max or a comma list (default -20:5:20)")
    parser.add_argument("--trials", type=int, help="Monte Carlo trials per SNR point (default 10000)")
    parser.add_argument("--seed", type=int, help="master seed (default 0)")
    parser.add_argument("--pattern", choices=["dft", "onoff"], help="activation pattern kind (default dft)")
    parser.add_argument(
        "--estimators",
        help="comma list from mvu-onoff, mvu-dft, mmse (default per pattern: dft -> mvu-dft,mmse; onoff -> mvu-onoff)",
    )
    parser.add_argument("--beta-bs", dest="beta_bs", type=float, help="direct-path loss share of the unit budget (default 0.5)")
    parser.add_argument("--beta-irs", dest="beta_irs", type=float, help="user-RIS path loss (default derived from the unit budget)")
    parser.add_argument("--beta-bs-irs", dest="beta_bs_irs", type=float, help="BS-RIS path loss (default 1.0)")
    parser.add_argument("--pilots", help="comma list of unit-modulus pilot symbols (default all ones)")
    parser.add_argument("--d-bs-over-lambda", dest="d_bs_over_lambda", type=float, help="BS antenna spacing in wavelengths (default 0.5)")
    parser.add_argument("--d-irs-over-lambda", dest="d_irs_over_lambda", type=float, help="RIS element spacing in wavelengths (default 0.5)")
    parser.add_argument("--resample-los", dest="resample_los", action="store_true", default=None, help="redraw the LoS geometry every trial (sensitivity studies)")
    parser.add_argument("--out", default="results", help="output directory (default ./results)")
    parser.add_argument("--emit-closed-form-only", action="store_true", help="skip Monte Carlo and emit only the closed-form curves")
    parser.add_argument("--threads", type=int, help=f"worker processes (default ${THREADS_ENV_VAR} or 1)")
    parser.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    parser.add_argument("--version", action="version", version=f"ris-chanest {__version__}")
    return parser


def _inline_dashed_values(argv):
    """Rewrite '--snr -20:5:20' to '--snr=-20:5:20' so argparse keeps the value."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in ("--snr", "--pilots") and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None):
    if argv is None:
        argv = sys.argv[1:]
    try:
        parser = _build_parser()
        args = parser.parse_args(_inline_dashed_values(list(argv)))
        overrides = {key: getattr(args, key) for key in CONFIG_KEYS}
        cfg = parse_config(args.config, overrides)
        if args.threads is not None:
            threads = args.threads
        else:
            threads = int(os.environ.get(THREADS_ENV_VAR, "1"))
        if threads < 1:
            raise ValueError(f"thread count must be positive, got {threads}")
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    return run_command(
        cfg,
        args.out,
        threads=threads,
        closed_form_only=args.emit_closed_form_only,
        figures=not args.no_figures,
    )


if __name__ == "__main__":
    sys.exit(main())
