"""Parameter-sweep CLI: evaluate a plate over a (frequency, thickness)
grid, emit deterministic CSV, and run the conservation identity checks.

Configs are TOML.  A minimal example:

    [media.res]
    kind = "single_resonance"
    omega0 = 1.0          # units of omega_ref
    omega1 = 1.0
    damping = 0.1

    [stack]
    left = "vac"
    right = "vac"
    layers = [["res", "sweep"]]

    [frequency]           # units of omega_ref
    start = 0.2
    stop = 2.0
    count = 181

    [thickness]           # units of c/omega_ref, for the "sweep" layer
    start = 0.1
    stop = 30.0
    count = 300

    [run]
    scenario = "one_side" # one_side | thermal_plate | blackbody | identities
    temperature = 0.0
    omega_ref = 1e15      # rad/s
    output = "scan.csv"

    [media.vac]
    kind = "vacuum"

Unknown keys anywhere are rejected.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import c as c_light

try:
    import tomllib as _toml
except ModuleNotFoundError:  # Python < 3.11
    import tomli as _toml

from .errors import (
    ConfigurationError,
    DivergentResummationError,
    OpaqueStackError,
    QplateError,
)
from .media import MediumModel, SingleResonance, Vacuum, load_tabulated, lossless
from .quantum import InputState, output_photon_density
from .stack import LayerStack, conservation_residuals, stack_matrices

__all__ = [
    "ScanConfig",
    "ScanRow",
    "IdentityReport",
    "parse_config",
    "run_scan",
    "emit_csv",
    "check_identities",
    "main",
]

_SCENARIOS = ("one_side", "thermal_plate", "blackbody", "identities")

CSV_COLUMNS = (
    "omega_over_ref",
    "thickness_ref",
    "n1",
    "n2",
    "na",
    "out1",
    "out2",
    "res_row1",
    "res_row2",
    "res_cross",
    "flag",
)


@dataclass(frozen=True)
class ScanConfig:
    """Validated sweep description.

    Frequencies are in units of omega_ref; thicknesses in units of
    c/omega_ref.  ``sweep_index`` is the index of the swept layer in
    ``layers`` or None when no layer is swept.
    """

    media: dict = field(repr=False)
    left: str = "vac"
    right: str = "vac"
    layers: tuple = ()
    sweep_index: int = None
    freq_grid: tuple = ()
    thickness_grid: tuple = ()
    scenario: str = "one_side"
    temperature: float = 0.0
    omega_ref: float = 1e15
    output: str = "scan.csv"


@dataclass(frozen=True)
class ScanRow:
    omega_over_ref: float
    thickness_ref: float
    n1: float
    n2: float
    na: float
    out1: float
    out2: float
    res_row1: float
    res_row2: float
    res_cross: float
    flag: int


@dataclass(frozen=True)
class IdentityReport:
    max_residual: float
    mean_residual: float
    unitarity_residual: float

    @property
    def passed(self) -> bool:
        return max(self.max_residual, self.unitarity_residual) <= 1e-8


def _reject_unknown(section: dict, allowed, where: str):
    for key in section:
        if key not in allowed:
            raise ConfigurationError(f"unknown key {key!r} in {where}")


def _grid(section: dict, where: str):
    _reject_unknown(section, ("start", "stop", "count"), where)
    try:
        start = float(section["start"])
        stop = float(section["stop"])
        count = int(section["count"])
    except KeyError as exc:
        raise ConfigurationError(f"missing key {exc.args[0]!r} in {where}") from None
    if count < 2:
        raise ConfigurationError(f"{where}: count must be >= 2")
    if not start < stop:
        raise ConfigurationError(f"{where}: start must be < stop")
    if start <= 0:
        raise ConfigurationError(f"{where}: values must be > 0")
    return tuple(np.linspace(start, stop, count))


def _build_medium(name: str, section: dict, omega_ref: float) -> MediumModel:
    where = f"[media.{name}]"
    kind = section.get("kind")
    if kind == "vacuum":
        _reject_unknown(section, ("kind",), where)
        return Vacuum()
    if kind == "single_resonance":
        _reject_unknown(section, ("kind", "omega0", "omega1", "damping"), where)
        try:
            return SingleResonance(
                omega0=float(section["omega0"]) * omega_ref,
                omega1=float(section["omega1"]) * omega_ref,
                damping=float(section["damping"]) * omega_ref,
            )
        except KeyError as exc:
            raise ConfigurationError(
                f"missing key {exc.args[0]!r} in {where}") from None
    if kind == "tabulated":
        _reject_unknown(section, ("kind", "path"), where)
        if "path" not in section:
            raise ConfigurationError(f"missing key 'path' in {where}")
        with open(section["path"], "rb") as fh:
            return load_tabulated(fh.read())
    raise ConfigurationError(f"{where}: unknown kind {kind!r}")


def parse_config(source) -> ScanConfig:
    """Read and validate a TOML scan config from a path, bytes, or file."""
    if isinstance(source, bytes):
        raw = _toml.loads(source.decode("utf-8"))
    elif hasattr(source, "read"):
        data = source.read()
        raw = _toml.loads(data.decode("utf-8") if isinstance(data, bytes) else data)
    else:
        with open(source, "rb") as fh:
            raw = _toml.load(fh)

    _reject_unknown(raw, ("media", "stack", "frequency", "thickness", "run"),
                    "top level")
    run = raw.get("run", {})
    _reject_unknown(run, ("scenario", "temperature", "omega_ref", "output"), "[run]")
    scenario = run.get("scenario", "one_side")
    if scenario not in _SCENARIOS:
        raise ConfigurationError(
            f"scenario must be one of {_SCENARIOS}, got {scenario!r}")
    temperature = float(run.get("temperature", 0.0))
    if temperature < 0:
        raise ConfigurationError("temperature must be >= 0")
    omega_ref = float(run.get("omega_ref", 1e15))
    if not omega_ref > 0:
        raise ConfigurationError("omega_ref must be > 0")
    output = str(run.get("output", "scan.csv"))

    media_raw = raw.get("media", {})
    media = {name: _build_medium(name, sec, omega_ref)
             for name, sec in media_raw.items()}

    stack = raw.get("stack")
    if not stack:
        raise ConfigurationError("missing [stack] section")
    _reject_unknown(stack, ("left", "right", "layers"), "[stack]")
    for side in ("left", "right"):
        if side not in stack:
            raise ConfigurationError(f"[stack] needs a {side!r} medium name")
        if stack[side] not in media:
            raise ConfigurationError(f"[stack] {side} medium {stack[side]!r} "
                                     "is not defined in [media]")
    layers_raw = stack.get("layers")
    if not layers_raw:
        raise ConfigurationError("[stack] needs a nonempty layers list")
    layers = []
    sweep_index = None
    for pos, entry in enumerate(layers_raw):
        if not isinstance(entry, list) or len(entry) != 2:
            raise ConfigurationError(
                f"layer {pos}: expected [medium_name, thickness]")
        name, thick = entry
        if name not in media:
            raise ConfigurationError(f"layer {pos}: medium {name!r} not defined")
        if thick == "sweep":
            if sweep_index is not None:
                raise ConfigurationError("only one layer may be swept")
            sweep_index = pos
            layers.append((name, None))
        else:
            t = float(thick)
            if not t > 0:
                raise ConfigurationError(f"layer {pos}: thickness must be > 0")
            layers.append((name, t))

    freq_grid = _grid(raw.get("frequency", {}), "[frequency]") \
        if "frequency" in raw else None
    if freq_grid is None:
        raise ConfigurationError("missing [frequency] section")
    if sweep_index is not None:
        if "thickness" not in raw:
            raise ConfigurationError(
                "a swept layer requires a [thickness] section")
        thickness_grid = _grid(raw["thickness"], "[thickness]")
    else:
        if "thickness" in raw:
            raise ConfigurationError(
                "[thickness] given but no layer is marked \"sweep\"")
        thickness_grid = (sum(t for _, t in layers),)

    return ScanConfig(
        media=media, left=stack["left"], right=stack["right"],
        layers=tuple(layers), sweep_index=sweep_index,
        freq_grid=freq_grid, thickness_grid=thickness_grid,
        scenario=scenario, temperature=temperature,
        omega_ref=omega_ref, output=output,
    )


def _evaluate_point(config: ScanConfig, t_ref: float, w_ref: float) -> ScanRow:
    """One grid point; opaque plates become flagged rows, not failures."""
    unit_l = c_light / config.omega_ref
    layers = []
    for pos, (name, thick) in enumerate(config.layers):
        l = t_ref if pos == config.sweep_index else thick
        layers.append((config.media[name], l * unit_l))
    stack = LayerStack(config.media[config.left], config.media[config.right],
                       tuple(layers))
    omega = w_ref * config.omega_ref
    try:
        M = stack_matrices(stack, omega)
    except (OpaqueStackError, DivergentResummationError):
        return ScanRow(w_ref, t_ref, 0.0, 0.0, 1.0, 0.0, 0.0,
                       0.0, 0.0, 0.0, 1)
    n1 = abs(M.T[0, 0]) ** 2
    n2 = abs(M.T[1, 0]) ** 2
    na = abs(M.A[0, 0]) ** 2 + abs(M.A[0, 1]) ** 2
    r1, r2, cross = conservation_residuals(M)
    if config.scenario == "thermal_plate" and config.temperature > 0:
        s = InputState.thermal_plate(omega, config.temperature)
        out1, out2 = output_photon_density(M, s)
    elif config.scenario == "blackbody" and config.temperature > 0:
        s = InputState.blackbody(omega, config.temperature)
        out1, out2 = output_photon_density(M, s)
    else:
        out1, out2 = n1, n2  # unit one-side illumination
    return ScanRow(w_ref, t_ref, n1, n2, na, out1, out2,
                   abs(r1), abs(r2), cross, 0)


def run_scan(config: ScanConfig, threads: int = 1):
    """Evaluate all grid points, thickness-major then frequency.

    Points are independent; with threads > 1 they are evaluated in a pool
    and collected in grid order, so output is identical for any count.
    """
    points = [(t, w) for t in config.thickness_grid for w in config.freq_grid]
    if threads <= 1:
        return [_evaluate_point(config, t, w) for t, w in points]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda p: _evaluate_point(config, *p), points))


def emit_csv(rows, path) -> None:
    """Write rows with a header, 17 significant digits, and LF endings."""
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(CSV_COLUMNS) + "\n")
            for r in rows:
                fields = [f"{v:.16e}" for v in (
                    r.omega_over_ref, r.thickness_ref, r.n1, r.n2, r.na,
                    r.out1, r.out2, r.res_row1, r.res_row2, r.res_cross)]
                fields.append(str(r.flag))
                fh.write(",".join(fields) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write scan output to {path!r}: {exc}") from exc


def check_identities(stack: LayerStack, omegas, transform=None) -> IdentityReport:
    """Conservation and unitarity residuals over a frequency grid.

    ``transform``, if given, is applied to each TwoPortMatrices before
    checking (used to verify the check detects corrupted matrices).
    """
    residuals = []
    unit_worst = 0.0
    clamped = LayerStack(lossless(stack.left), lossless(stack.right),
                         tuple((lossless(m), l) for m, l in stack.layers))
    for w in omegas:
        M = stack_matrices(stack, w)
        if transform is not None:
            M = transform(M)
        r1, r2, cross = conservation_residuals(M)
        residuals.extend((abs(r1), abs(r2), cross))
        Mc = stack_matrices(clamped, w)
        gram = Mc.T.conj().T @ Mc.T - np.eye(2)
        unit_worst = max(unit_worst, float(np.abs(gram).max()),
                         float(np.abs(Mc.A).max()))
    return IdentityReport(
        max_residual=max(residuals),
        mean_residual=float(np.mean(residuals)),
        unitarity_residual=unit_worst,
    )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="scan",
        description="Sweep a multilayer plate over frequency and thickness, "
                    "writing per-point transmission, reflection, absorption, "
                    "and identity residuals as CSV.")
    parser.add_argument("config", help="path to a TOML scan config")
    parser.add_argument("--out", help="override the output path")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads (output is order-independent)")
    parser.add_argument("--check-only", action="store_true",
                        help="validate the config and run the identity "
                             "checks without writing CSV")
    args = parser.parse_args(argv)

    try:
        config = parse_config(args.config)
    except (QplateError, OSError, _toml.TOMLDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    if args.check_only:
        unit_l = c_light / config.omega_ref
        mid_t = config.thickness_grid[len(config.thickness_grid) // 2]
        layers = tuple(
            (config.media[name],
             (mid_t if pos == config.sweep_index else thick) * unit_l)
            for pos, (name, thick) in enumerate(config.layers))
        stack = LayerStack(config.media[config.left],
                           config.media[config.right], layers)
        omegas = [w * config.omega_ref for w in config.freq_grid]
        report = check_identities(stack, omegas)
        print(f"max residual {report.max_residual:.3e}, "
              f"mean {report.mean_residual:.3e}, "
              f"unitarity {report.unitarity_residual:.3e}")
        return 0 if report.passed else 2

    rows = run_scan(config, threads=max(1, args.threads))
    out = args.out or config.output
    try:
        emit_csv(rows, out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if config.scenario == "identities":
        worst = max(max(r.res_row1, r.res_row2, r.res_cross)
                    for r in rows if not r.flag)
        print(f"wrote {out} ({len(rows)} rows); max residual {worst:.3e}")
        if worst > 1e-8:
            return 2
    else:
        print(f"wrote {out} ({len(rows)} rows)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
