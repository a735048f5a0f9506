"""Command-line front end.

Every subcommand reads an optional INI config, writes CSV files plus a
``manifest.json`` into the output directory and returns an exit code:

==  ===========================================
0   success
2   invalid config or layout
3   numeric failure
4   tolerance not met (only with ``--strict``)
==  ===========================================
"""
from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import json
import math
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .bath import BathParams
from .errors import (
    ConfigError,
    GiantAtomError,
    InvalidLayoutError,
    NumericFailure,
    ToleranceWarning,
    UnsupportedLayoutError,
    WrapAroundWarning,
)
from .evolve import EvolveConfig, simulate
from .hamiltonian import energy_spectrum
from .layout import (
    Layout,
    braided_pair,
    giant_atom,
    layout_from_points,
    nested_pair,
    separate_pair,
    single_atom,
    small_pair,
)
from .metrics import ComparisonConfig, DfiScanResult, compare_giant_small, dfi_scan
from .resolvent import (
    PHYSICAL,
    SECOND,
    atomic_amplitudes,
    channels_of,
    find_poles,
    find_unstable_poles,
    markov_split,
    self_energy,
    sigma_int,
)

SUBCOMMANDS = ("spectrum", "decay-rate", "evolve", "selfenergy-scan", "poles", "dfi-scan", "compare")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_TOLERANCE = 0, 2, 3, 4


# ---------------------------------------------------------------------------
# Config
# ---------------------------------------------------------------------------

def _floats(text):
    return tuple(float(x) for x in str(text).replace(",", " ").split())


def _ints(text):
    return tuple(int(x) for x in str(text).replace(",", " ").split())


def _bool(text):
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt_int(text):
    return None if str(text).strip().lower() in ("", "auto", "none") else int(text)


# section -> key -> (parser, default)
SCHEMA = {
    "bath": {"N": (_opt_int, "auto"), "J": (float, "1.0"), "periodic": (_bool, "true")},
    "layout": {
        "kind": (str, "braided"),
        "Delta": (float, "0.0"),
        "g": (float, "0.2"),
        "d": (int, "5"),
        "P": (int, "2"),
        "points": (str, ""),
    },
    "evolve": {
        "t_max": (float, "50.0"),
        "dt": (float, "0.05"),
        "splitting": (str, "lie"),
        "record_stride": (_opt_int, "auto"),
        "overlay": (_bool, "false"),
    },
    "spectrum": {"g_min": (float, "0.0"), "g_max": (float, "1.0"), "g_steps": (int, "21"),
                 "N": (int, "201")},
    "decay_rate": {"delta_min": (float, "-1.99"), "delta_max": (float, "1.99"),
                   "delta_steps": (int, "399"), "poles": (_bool, "true")},
    "selfenergy": {"E_min": (float, "-1.99"), "E_max": (float, "1.99"), "E_steps": (int, "399"),
                   "imag": (float, "0.0"), "sheet": (str, PHYSICAL)},
    "poles": {"channels": (str, "auto")},
    "dfi_scan": {"d_max": (int, "10"), "delta_min": (float, "-1.95"), "delta_max": (float, "1.95"),
                 "delta_step": (float, "0.05"), "g": (float, "0.2"), "transfer": (str, "optima"),
                 "include_candidates": (_bool, "true"), "t_max": (float, "600.0")},
    "compare": {"gap_detunings": (_floats, "2.1 3.0"), "d_values": (_ints, "1 2 3 4 5"),
                "g_values": (_floats, "0.2 0.4"), "handicap": (_bool, "true"),
                "in_band": (_bool, "true"), "t_max": (float, "600.0"),
                "evolve_t_cap": (float, "600.0")},
    "tolerance": {"cross_engine": (float, "0.02"), "norm": (float, "1e-8")},
}


def load_config(path: str | Path | None) -> dict:
    """Parse and validate an INI file; unknown sections or keys are errors."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            parser.read(path)
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
    out = {}
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        for key in parser[section]:
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
    for section, keys in SCHEMA.items():
        out[section] = {}
        for key, (conv, default) in keys.items():
            raw = parser.get(section, key, fallback=default)
            try:
                out[section][key] = conv(raw)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"[{section}] {key} = {raw!r}: {exc}") from exc
    if out["selfenergy"]["sheet"] not in (PHYSICAL, SECOND):
        raise ConfigError(f"[selfenergy] sheet must be {PHYSICAL!r} or {SECOND!r}")
    if out["evolve"]["splitting"].lower() not in ("lie", "strang"):
        raise ConfigError("[evolve] splitting must be 'lie' or 'strang'")
    return out


def build_layout(section: dict) -> Layout:
    kind = section["kind"].lower()
    Delta, g, d = section["Delta"], section["g"], section["d"]
    builders = {
        "single": lambda: single_atom(Delta, g),
        "giant": lambda: giant_atom(Delta, g, d, section["P"]),
        "braided": lambda: braided_pair(Delta, g, d),
        "nested": lambda: nested_pair(Delta, g, d),
        "separate": lambda: separate_pair(Delta, g, d),
        "small": lambda: small_pair(Delta, g, d),
    }
    if kind == "points":
        groups = [g_.strip() for g_ in section["points"].split(";") if g_.strip()]
        if not groups:
            raise ConfigError("[layout] kind = points needs 'points', e.g. '0 2; 1 3'")
        return layout_from_points([_ints(grp) for grp in groups], Delta, g)
    if kind not in builders:
        raise ConfigError(f"[layout] unknown kind {kind!r}")
    return builders[kind]()


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def format_value(x) -> str:
    """Fixed CSV formatting: 12 significant digits in scientific notation."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.11e}"


def write_csv(path: Path, header, rows) -> Path:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
    return path


def sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(out: Path, subcommand: str, config: dict, derived: dict, files, wall: float,
                   notes) -> Path:
    manifest = {
        "subcommand": subcommand,
        "version": __version__,
        "config": {s: {k: _jsonable(v) for k, v in kv.items()} for s, kv in config.items()},
        "derived": {k: _jsonable(v) for k, v in derived.items()},
        "checksums": {Path(f).name: sha256(f) for f in files},
        "wall_clock_s": wall,
        "warnings": list(notes),
    }
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _jsonable(v):
    if isinstance(v, tuple):
        return list(v)
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    return v


# ---------------------------------------------------------------------------
# Subcommands. Each returns (files, derived defaults).
# ---------------------------------------------------------------------------

def cmd_spectrum(cfg, out, workers=None):
    sec = cfg["spectrum"]
    base = build_layout(cfg["layout"])
    N = sec["N"]
    layout = base.shifted(N // 2 - (base.points[0] + base.points[-1]) // 2)
    bath = BathParams(N, cfg["bath"]["J"])
    rows, n_bound = [], {}
    for g in np.linspace(sec["g_min"], sec["g_max"], sec["g_steps"]):
        spec = energy_spectrum(bath, layout.with_coupling(float(g)), cfg["bath"]["periodic"])
        rows.extend((float(g), i, E) for i, E in enumerate(spec.eigenvalues))
        n_bound[format_value(float(g))] = len(spec.bound_state_indices)
    path = write_csv(out / "spectrum.csv", ["g", "index", "eigenvalue"], rows)
    return [path], {"N": N, "bound_states_per_g": n_bound}


def cmd_decay_rate(cfg, out, workers=None):
    sec = cfg["decay_rate"]
    base = build_layout(cfg["layout"])
    if base.n_atoms != 1:
        raise UnsupportedLayoutError("decay-rate works on a single atom")
    rows = []
    for Delta in np.linspace(sec["delta_min"], sec["delta_max"], sec["delta_steps"]):
        layout = base.with_detuning(float(Delta))
        split = markov_split(float(Delta), layout)
        z = complex("nan")
        if sec["poles"]:
            unstable = find_unstable_poles("e", layout)
            if len(unstable):
                z = unstable.dominant().z_pole
        rows.append((float(Delta), split.gamma_e, split.delta_e, z.real, z.imag, -2.0 * z.imag))
    header = ["Delta", "gamma_e", "delta_e", "pole_re", "pole_im", "pole_gamma"]
    return [write_csv(out / "decay_rate.csv", header, rows)], {}


def cmd_evolve(cfg, out, workers=None):
    ev, tol = cfg["evolve"], cfg["tolerance"]
    layout = build_layout(cfg["layout"])
    config = EvolveConfig(t_max=ev["t_max"], dt=ev["dt"], record_stride=ev["record_stride"],
                          splitting=ev["splitting"])
    N = cfg["bath"]["N"]
    if N is None:
        bath = None
    else:
        bath = BathParams(N, cfg["bath"]["J"])
        layout = layout.shifted(N // 2 - (layout.points[0] + layout.points[-1]) // 2)
    trace = simulate(bath, layout, None, config)
    drift = float(np.max(np.abs(trace.total_norm - 1.0)))
    if drift > tol["norm"]:
        warnings.warn(f"norm drift {drift:.3e} exceeds {tol['norm']:.1e}", ToleranceWarning)

    na = layout.n_atoms
    header = ["tJ"] + [f"pop_atom{i + 1}" for i in range(na)]
    for i in range(na):
        header += [f"re_C{i + 1}", f"im_C{i + 1}"]
    header.append("norm")
    cols = [trace.times, *trace.atom_populations]
    for i in range(na):
        cols += [trace.atom_amplitudes[i].real, trace.atom_amplitudes[i].imag]
    cols.append(trace.total_norm)

    derived = {"N": trace.N, "dt": config.dt, "record_stride": config.stride,
               "splitting": config.splitting, "wrap_warning": trace.wrap_warning,
               "norm_drift": drift}
    if ev["overlay"]:
        amps = atomic_amplitudes(trace.times, layout)
        amps = [amps] if na == 1 else list(amps)
        for i, a in enumerate(amps):
            header.append(f"pop_atom{i + 1}_resolvent")
            cols.append(np.abs(a) ** 2)
        diff = max(float(np.max(np.abs(np.abs(a) ** 2 - p))) for a, p in zip(amps, trace.atom_populations))
        derived["cross_engine_linf"] = diff
        if diff > tol["cross_engine"]:
            warnings.warn(f"engines differ by {diff:.3e} > {tol['cross_engine']}", ToleranceWarning)
    path = write_csv(out / "trace.csv", header, zip(*cols))
    return [path], derived


def cmd_selfenergy_scan(cfg, out, workers=None):
    sec = cfg["selfenergy"]
    layout = build_layout(cfg["layout"])
    rows = []
    for E in np.linspace(sec["E_min"], sec["E_max"], sec["E_steps"]):
        z = complex(E, sec["imag"])
        se = self_energy(z, layout.atoms[0], sec["sheet"])
        si = sigma_int(z, layout, sec["sheet"]) if layout.n_atoms == 2 else 0j
        rows.append((float(E), se.real, -2.0 * se.imag, si.real, si.imag))
    header = ["E", "delta_e", "gamma_e", "re_int", "im_int"]
    return [write_csv(out / "selfenergy.csv", header, rows)], {"sheet": sec["sheet"]}


def cmd_poles(cfg, out, workers=None):
    layout = build_layout(cfg["layout"])
    channels = cfg["poles"]["channels"]
    channels = list(channels_of(layout)) if channels == "auto" else channels.replace(",", " ").split()
    rows = []
    for ch in channels:
        for p in find_poles(ch, layout):
            rows.append((ch, p.z_pole.real, p.z_pole.imag, p.residue.real, p.residue.imag, p.kind))
    header = ["channel", "re_z", "im_z", "re_R", "im_R", "kind"]
    return [write_csv(out / "poles.csv", header, rows)], {"channels": channels}


DFI_HEADER = ["d", "Delta", "zR", "zI", "ratio", "max_transfer", "well_defined"]


def _dfi_row(r):
    return (r.d, r.Delta, r.z_R, r.z_I, r.ratio, r.max_transfer, r.well_defined)


def cmd_dfi_scan(cfg, out, workers=None):
    sec = cfg["dfi_scan"]
    if sec["transfer"] not in ("all", "optima", "none"):
        raise ConfigError("[dfi_scan] transfer must be 'all', 'optima' or 'none'")
    step = sec["delta_step"]
    n = int(math.floor((sec["delta_max"] - sec["delta_min"]) / step + 1e-9)) + 1 if step > 0 else 0
    grid = [round(sec["delta_min"] + i * step, 12) for i in range(max(n, 0))]
    if sec["d_max"] < 1 or (not grid and not sec["include_candidates"]):
        result = DfiScanResult([], {})
    else:
        result = dfi_scan(sec["d_max"], grid, sec["g"], transfer=sec["transfer"],
                          include_candidates=sec["include_candidates"], t_max=sec["t_max"],
                          workers=workers)
    files = [write_csv(out / "dfi_scan.csv", DFI_HEADER, map(_dfi_row, result.rows)),
             write_csv(out / "dfi_optima.csv", DFI_HEADER,
                       (_dfi_row(result.optima[d]) for d in sorted(result.optima)))]
    derived = {
        "grid_points": len(grid),
        "optimal_ratio_non_increasing": DfiScanResult.non_increasing(result.optimal_ratios()),
    }
    if sec["transfer"] != "none":
        derived["optimal_transfer_non_increasing"] = DfiScanResult.non_increasing(result.optimal_transfers())
    return files, derived


COMPARE_HEADER = ["kind", "region", "Delta", "d", "g", "g_reference", "zR", "max_transfer",
                  "markov_exchange", "transfer_source"]


def cmd_compare(cfg, out, workers=None):
    sec = cfg["compare"]
    config = ComparisonConfig(gap_detunings=sec["gap_detunings"], d_values=sec["d_values"],
                              g_values=sec["g_values"], handicap=sec["handicap"],
                              in_band=sec["in_band"], t_max=sec["t_max"],
                              evolve_t_cap=sec["evolve_t_cap"])
    rows = compare_giant_small(config, workers=workers)
    table = ((r.kind.value, r.region.value, r.Delta, r.d, r.g, r.g_reference, r.z_R, r.max_transfer,
              r.markov_exchange, r.transfer_source) for r in rows)
    return [write_csv(out / "compare.csv", COMPARE_HEADER, table)], {"rows": len(rows)}


COMMANDS = {
    "spectrum": cmd_spectrum,
    "decay-rate": cmd_decay_rate,
    "evolve": cmd_evolve,
    "selfenergy-scan": cmd_selfenergy_scan,
    "poles": cmd_poles,
    "dfi-scan": cmd_dfi_scan,
    "compare": cmd_compare,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="giant-atoms", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, default=None, help="INI file with run parameters")
        p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
        p.add_argument("--strict", action="store_true", help="exit with 4 when a tolerance is not met")
        p.add_argument("--workers", type=int, default=None,
                       help="worker processes for sweeps (default: $GIANT_ATOMS_WORKERS or 1)")
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        cfg = load_config(args.config)
        if args.workers is not None and args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        args.out.mkdir(parents=True, exist_ok=True)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            files, derived = COMMANDS[args.command](cfg, args.out, args.workers)
    except (ConfigError, InvalidLayoutError, UnsupportedLayoutError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericFailure, ArithmeticError, GiantAtomError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    notes = []
    tolerance_missed = False
    for w in caught:
        notes.append(f"{w.category.__name__}: {w.message}")
        print(f"warning: {w.category.__name__}: {w.message}", file=sys.stderr)
        if issubclass(w.category, (ToleranceWarning, WrapAroundWarning)):
            tolerance_missed = True
    write_manifest(args.out, args.command, cfg, derived, files, time.perf_counter() - start, notes)
    if tolerance_missed and args.strict:
        return EXIT_TOLERANCE
    return EXIT_OK


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
