"""Command-line front end: analyze a CSV, simulate scenarios, print lattices.

``pdgc analyze`` ingests a CSV, fits the model, runs the decomposition with
surrogate significance, and writes ``result.json`` plus a long-format
``spectra.csv``. Runs are fully deterministic given the configuration and
master seed. Errors exit nonzero with a category: 1 = io, 2 = config,
3 = numeric.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .estimator import _significance
from .exceptions import EstimationError, NumericalError, ParseError, ValidationError
from .lattice import build_lattice, classify_atom, decompose
from .scenarios import scenario, scenario_names
from .series import Band, FrequencyGrid, load_csv, preprocess, write_csv
from .state_space import var_to_ss
from .surrogates import SurrogateConfig
from .var import estimate_var, is_stable, select_order

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

_DEFAULTS = {
    "order_min": 3,
    "order_max": 12,
    "nfreq": 1000,
    "surrogates": 100,
    "percentile": 95.0,
    "seed": 0,
    "jobs": 1,
}


class ConfigError(ValueError):
    """Bad or missing configuration value."""


def read_config(path) -> dict[str, str]:
    """Parse a flat ``key = value`` file ('#' starts a comment)."""
    settings: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, value = line.split("=", 1)
            settings[key.strip()] = value.strip()
    return settings


def parse_bands(text: str) -> tuple[Band, ...]:
    """Parse ``lf=0.03:0.15,hf=0.15:0.4`` into Band objects."""
    if not text:
        return ()
    bands = []
    for chunk in text.split(","):
        try:
            name, rest = chunk.split("=", 1)
            lo, hi = rest.split(":", 1)
            bands.append(Band(float(lo), float(hi), name.strip()))
        except ValueError as exc:
            raise ConfigError(f"bad band spec {chunk!r}: {exc}") from None
    return tuple(bands)


def _merged_settings(args) -> dict:
    settings: dict = dict(_DEFAULTS)
    if args.config:
        settings.update(read_config(args.config))
    overrides = {
        "input": args.input,
        "fs": args.fs,
        "target": args.target,
        "drivers": args.drivers,
        "bands": args.bands,
        "order": args.order,
        "order_min": args.order_min,
        "order_max": args.order_max,
        "nfreq": args.nfreq,
        "surrogates": args.surrogates,
        "percentile": args.percentile,
        "seed": args.seed,
        "out": args.out,
        "detrend_cutoff": args.detrend_cutoff,
        "jobs": args.jobs,
    }
    settings.update({k: v for k, v in overrides.items() if v is not None})
    return settings


def _require(settings: dict, key: str):
    if key not in settings or settings[key] in ("", None):
        raise ConfigError(f"missing required setting {key!r}")
    return settings[key]


def cmd_analyze(args) -> int:
    settings = _merged_settings(args)
    input_path = _require(settings, "input")
    fs = float(_require(settings, "fs"))
    target_name = str(_require(settings, "target"))
    drivers_text = str(_require(settings, "drivers"))
    out_dir = Path(_require(settings, "out"))
    bands = parse_bands(str(settings.get("bands", "")))
    n_freqs = int(settings["nfreq"])
    n_surrogates = int(settings["surrogates"])
    percentile = float(settings["percentile"])
    seed = int(settings["seed"])
    n_jobs = int(settings["jobs"])
    cutoff = settings.get("detrend_cutoff")
    cutoff = float(cutoff) if cutoff not in (None, "") else None

    series = load_csv(input_path, fs)
    series = preprocess(series, cutoff)

    target = series.channel_index(_maybe_int(target_name))
    drivers = tuple(
        series.channel_index(_maybe_int(d.strip())) for d in drivers_text.split(",") if d.strip()
    )
    if not 1 <= len(drivers) <= 4:
        raise ConfigError(f"need 1..4 drivers, got {len(drivers)}")

    if settings.get("order") not in (None, ""):
        order = int(settings["order"])
        order_source = "fixed"
    else:
        order = select_order(series, int(settings["order_min"]), int(settings["order_max"]))
        order_source = f"bic:{settings['order_min']}-{settings['order_max']}"
    model = estimate_var(series, order)
    stable, radius = is_stable(model)
    if not stable:
        raise NumericalError(
            f"fitted VAR({order}) is unstable (spectral radius {radius:.4f})"
        )

    grid = FrequencyGrid.uniform(n_freqs, fs)
    ss = var_to_ss(model)
    result = decompose(ss, target, drivers, grid, bands)
    if n_surrogates:
        cfg = SurrogateConfig(
            n_surrogates=n_surrogates, percentile=percentile, seed=seed, n_jobs=n_jobs
        )
        result.significance = _significance(series, result, cfg, order)

    doc = result.to_dict()
    doc["order"] = order
    doc["diagnostics"] = {
        "order_source": order_source,
        "spectral_radius": radius,
        "n_samples": series.n_samples,
        "n_channels": series.n_channels,
        "detrend_cutoff": cutoff,
        "n_surrogates": n_surrogates,
        "seed": seed,
    }

    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "result.json", "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(out_dir / "spectra.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frequency_hz", "curve", "value"])
        freqs = grid.freqs_hz
        for name, curve in result.spectra():
            for f_hz, value in zip(freqs, curve.values):
                writer.writerow([f"{float(f_hz):.12g}", name, f"{float(value):.17g}"])
    print(f"wrote {out_dir / 'result.json'} and {out_dir / 'spectra.csv'}")
    return EXIT_OK


def _maybe_int(token):
    try:
        return int(token)
    except (TypeError, ValueError):
        return token


def cmd_simulate(args) -> int:
    series, _ = scenario(args.scenario, length=args.length, seed=args.seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(series, out)
    print(f"wrote {out}")
    return EXIT_OK


def cmd_lattice(args) -> int:
    lattice = build_lattice(args.n)
    classes = {atom: classify_atom(atom) for atom in lattice.atoms}
    covers = [
        (lattice.atoms[i].key(), lattice.atoms[j].key())
        for i, j in lattice.cover_pairs()
    ]
    if args.json:
        doc = {
            "n_sources": lattice.n_sources,
            "n_atoms": len(lattice),
            "atoms": [
                {
                    "atom": atom.key(),
                    "class": classes[atom][0],
                    "source": classes[atom][1],
                }
                for atom in lattice.atoms
            ],
            "covers": [list(pair) for pair in covers],
        }
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(f"{len(lattice)} atoms for {lattice.n_sources} sources (bottom to top)")
        for atom in lattice.atoms:
            kind, source = classes[atom]
            label = f"unique({source})" if kind == "unique" else kind
            print(f"  {atom.key():24s} {label}")
        print("cover relations (lower < upper):")
        for low, high in covers:
            print(f"  {low} < {high}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pdgc",
        description="Partial decomposition of Granger causality for multivariate time series",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="decompose causality in a CSV recording")
    analyze.add_argument("--config", help="key = value configuration file")
    analyze.add_argument("--input", help="input CSV (one sample per row)")
    analyze.add_argument("--fs", type=float, help="sampling frequency in Hz")
    analyze.add_argument("--target", help="target channel (label or index)")
    analyze.add_argument("--drivers", help="comma-separated driver channels")
    analyze.add_argument("--bands", help="bands as name=lo:hi[,name=lo:hi...] in Hz")
    analyze.add_argument("--order", type=int, help="fixed VAR order (skips BIC)")
    analyze.add_argument("--order-min", dest="order_min", type=int, help="BIC range start")
    analyze.add_argument("--order-max", dest="order_max", type=int, help="BIC range end")
    analyze.add_argument("--nfreq", type=int, help="frequency grid points")
    analyze.add_argument("--surrogates", type=int, help="surrogate count (0 disables)")
    analyze.add_argument("--percentile", type=float, help="significance percentile")
    analyze.add_argument("--seed", type=int, help="master random seed")
    analyze.add_argument("--jobs", type=int, help="parallel surrogate jobs")
    analyze.add_argument(
        "--detrend-cutoff", dest="detrend_cutoff", type=float,
        help="slow-trend cutoff in cycles/sample",
    )
    analyze.add_argument("--out", help="output directory")
    analyze.set_defaults(func=cmd_analyze)

    simulate = sub.add_parser("simulate", help="emit a synthetic scenario CSV")
    simulate.add_argument("--scenario", required=True, help=", ".join(scenario_names()))
    simulate.add_argument("--length", type=int, default=250)
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument("--out", required=True, help="output CSV path")
    simulate.set_defaults(func=cmd_simulate)

    lattice = sub.add_parser("lattice", help="list the redundancy lattice for N sources")
    lattice.add_argument("--n", type=int, required=True)
    lattice.add_argument("--json", action="store_true")
    lattice.set_defaults(func=cmd_lattice)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValidationError, OSError) as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, ValueError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, EstimationError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
