"""Batch front end: TOML configs in, CSV tables out.

Subcommands: ``budget`` (noise budget over a frequency grid), ``sweep``
(budget summary along one parameter axis), ``verify`` (closed forms vs.
network oracle on random configurations), ``optimize`` (band minimization
over parameter ranges). Exit codes: 0 ok, 1 validation error, 2
verification failure.

Outputs are deterministic: a fixed column schema, full resolved config in
'#'-prefixed header lines, repeatable bytes for a fixed config/seed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from typing import Any

import numpy as np

try:
    import tomllib
except ImportError:  # python < 3.11
    import tomli as tomllib

from . import formulas, network, optimize
from .core import FreeMass, FrequencyGrid, Oscillator, Shifted, \
    Susceptibility, susceptibility_inverse
from .elements import epsilon

SCHEMES = ("position_meter", "virtual_rigidity", "real_rigidity", "hybrid")

BUDGET_COLUMNS = ("omega_rad_s", "S_sum", "S_sql", "term_shot",
                  "term_backaction", "term_loss_I", "term_loss_S",
                  "degenerate_flag")

SWEEP_COLUMNS = ("axis_value", "S_band_min", "S_at_omega", "kappa",
                 "varkappa", "S_opt", "degenerate_count", "invalid_flag")


class ConfigError(Exception):
    """Invalid run configuration; message names the offending field."""


# ---------------------------------------------------------------------------
# config parsing


@dataclass
class RunConfig:
    scheme: str
    params: dict[str, Any]
    grid: FrequencyGrid
    gamma: float | None
    out: str | None
    raw: dict[str, Any]


def _mech_from(block: dict[str, Any] | None) -> Susceptibility:
    if not block:
        return FreeMass()
    kind = block.get("kind", "free_mass")
    if kind == "free_mass":
        base: Susceptibility = FreeMass()
    elif kind == "oscillator":
        if "omega0_sq" not in block:
            raise ConfigError("mechanics.omega0_sq required for an oscillator")
        base = Oscillator(float(block["omega0_sq"]),
                          int(block.get("mass_sign", 1)))
    else:
        raise ConfigError(f"mechanics.kind must be free_mass or oscillator, "
                          f"got {kind!r}")
    spring = float(block.get("spring", 0.0))
    return Shifted(base, spring) if spring != 0.0 else base


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc

    scheme = raw.get("scheme")
    if scheme not in SCHEMES:
        raise ConfigError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    params = dict(raw.get("params", {}))

    grid_block = raw.get("grid")
    if not grid_block:
        raise ConfigError("missing [grid] block")
    try:
        omin = float(grid_block["omega_min"])
        omax = float(grid_block["omega_max"])
        points = int(grid_block["points"])
    except KeyError as exc:
        raise ConfigError(f"grid.{exc.args[0]} is required") from exc
    spacing = grid_block.get("spacing", "log")
    if spacing not in ("log", "linear"):
        raise ConfigError(f"grid.spacing must be log or linear, got {spacing!r}")
    try:
        grid = (FrequencyGrid.log if spacing == "log"
                else FrequencyGrid.linear)(omin, omax, points)
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from exc

    gamma = raw.get("cavity", {}).get("gamma")
    out = raw.get("output", {}).get("path")
    return RunConfig(scheme, params, grid, gamma, out, raw)


def _require(params: dict[str, Any], scheme: str, *names: str) -> list[float]:
    out = []
    for name in names:
        if name not in params:
            raise ConfigError(f"params.{name} is required for scheme {scheme}")
        out.append(float(params[name]))
    return out


# ---------------------------------------------------------------------------
# budget table


def _single_channel_terms(cfg: RunConfig, omegas: np.ndarray):
    """(S_sum, terms..., kappa_emergent) for the non-hybrid schemes."""
    p = cfg.params
    mech = _mech_from(p.get("mechanics"))
    chi_inv = susceptibility_inverse(mech, omegas)
    eta = float(p.get("eta", 1.0))
    if not (0.0 < eta <= 1.0):
        raise ConfigError("params.eta must be in (0, 1]")
    eps = epsilon(eta)

    if cfg.scheme == "position_meter":
        (ups,) = _require(p, cfg.scheme, "upsilon")
        ups_k, k = ups, 0.0
    elif cfg.scheme == "virtual_rigidity":
        ups, phi = _require(p, cfg.scheme, "upsilon", "phi")
        ups_k, k = formulas.virtual_rigidity_params(ups, phi)
    else:  # real_rigidity
        ups, psi = _require(p, cfg.scheme, "upsilon", "psi")
        ups_k, k = formulas.double_pass_effective(ups, psi)
    if ups <= 0.0:
        raise ConfigError("params.upsilon must be > 0")

    n = omegas.size
    if ups_k == 0.0:
        inf = np.full(n, np.inf)
        zero = np.zeros(n)
        return inf, inf, inf, zero, zero, np.ones(n, dtype=int), k

    u2 = ups_k * ups_k
    shifted = chi_inv + k
    shot = 0.5 * shifted ** 2 / u2
    ba = np.full(n, 0.5 * u2)
    if cfg.scheme == "virtual_rigidity":
        loss_i = 0.5 * eps ** 2 * chi_inv ** 2 / u2
    else:
        loss_i = 0.5 * eps ** 2 * shifted ** 2 / u2
    loss_s = np.zeros(n)
    s_sum = shot + ba + loss_i
    kappa_loop = k if cfg.scheme == "real_rigidity" else 0.0
    chi_eff = chi_inv + kappa_loop
    scale = np.maximum(np.abs(chi_inv), abs(kappa_loop))
    deg = (np.abs(chi_eff) <= network.DEGENERATE_RTOL * scale).astype(int)
    return s_sum, shot, ba, loss_i, loss_s, deg, k


def _hybrid_params(cfg: RunConfig) -> formulas.HybridParams:
    p = cfg.params
    ups_i, r, omega_s = _require(p, "hybrid", "upsilon_i", "r", "omega_s")
    eta_i = float(p.get("eta_i", 1.0))
    eta_s = float(p.get("eta_s", 1.0))
    mode = p.get("mode", "virtual")
    if mode not in ("virtual", "real"):
        raise ConfigError("params.mode must be virtual or real")
    if omega_s <= 0.0:
        raise ConfigError("params.omega_s must be > 0")
    k = float(p.get("k", omega_s * omega_s))
    chi_i = _mech_from(p.get("mechanics"))
    chi_s = Oscillator(omega_s * omega_s, mass_sign=-1)
    try:
        return formulas.HybridParams(ups_i=ups_i, r=r, eps_i=epsilon(eta_i),
                                     eps_s=epsilon(eta_s), chi_i=chi_i,
                                     chi_s=chi_s, k=k, mode=mode)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _budget_table(cfg: RunConfig, with_oracle: bool) -> tuple[list[str], list[list[float]]]:
    omegas = cfg.grid.points
    if cfg.scheme == "hybrid":
        hp = _hybrid_params(cfg)
        chi_i_inv = susceptibility_inverse(hp.chi_i, omegas)
        s_sql = np.abs(chi_i_inv)
        s_sum = np.atleast_1d(formulas.hybrid_full_spectrum(hp, omegas))
        _, _, _, loss_i, loss_s = (np.atleast_1d(a) for a in
                                   formulas.hybrid_component_spectra(hp, omegas))
        ch = math.cosh(2.0 * hp.r)
        shot = 0.5 * chi_i_inv ** 2 / (hp.ups_i ** 2 * ch)
        ba = np.full(omegas.size, 0.5 * hp.ups_i ** 2 / ch)
        deg = np.zeros(omegas.size, dtype=int)
    else:
        s_sum, shot, ba, loss_i, loss_s, deg, _ = \
            _single_channel_terms(cfg, omegas)
        mech = _mech_from(cfg.params.get("mechanics"))
        s_sql = np.abs(susceptibility_inverse(mech, omegas))

    columns = list(BUDGET_COLUMNS)
    table = [omegas, s_sum, s_sql, shot, ba, loss_i, loss_s, deg]
    if with_oracle:
        columns.append("S_oracle")
        table.append(_oracle_spectrum(cfg, omegas))
    rows = [[col[i] for col in table] for i in range(omegas.size)]
    return columns, rows


def _oracle_chain(cfg: RunConfig):
    p = cfg.params
    mech = _mech_from(p.get("mechanics"))
    eta = float(p.get("eta", 1.0))
    if cfg.scheme == "position_meter":
        return network.position_meter_chain(float(p["upsilon"]), mech, eta=eta)
    if cfg.scheme == "virtual_rigidity":
        return network.position_meter_chain(float(p["upsilon"]), mech,
                                            phi=float(p["phi"]), eta=eta)
    return network.double_pass_chain(float(p["upsilon"]), float(p["psi"]),
                                     mech, eta=eta)


def _oracle_spectrum(cfg: RunConfig, omegas: np.ndarray) -> np.ndarray:
    if cfg.scheme == "hybrid":
        hp = _hybrid_params(cfg)
        hs = network.hybrid_system(hp.ups_i, hp.r,
                                   1.0 / (1.0 + hp.eps_i ** 2),
                                   1.0 / (1.0 + hp.eps_s ** 2),
                                   hp.chi_i, hp.chi_s, hp.k, hp.mode)
        return network.combine_optimal(*network.cross_spectrum(hs, omegas))
    return network.sum_noise_spectrum(_oracle_chain(cfg), omegas)


# ---------------------------------------------------------------------------
# sweep


def _sweep_row(cfg: RunConfig, eval_omega: float | None) -> list[float]:
    omegas = cfg.grid.points
    kappa = varkappa = s_opt = math.nan
    if cfg.scheme == "hybrid":
        hp = _hybrid_params(cfg)
        s_sum = np.atleast_1d(formulas.hybrid_full_spectrum(hp, omegas))
        deg = np.zeros(omegas.size, dtype=int)
        s_at = (float(formulas.hybrid_full_spectrum(hp, eval_omega))
                if eval_omega is not None else math.nan)
    else:
        s_sum, _, _, _, _, deg, k = _single_channel_terms(cfg, omegas)
        mech = _mech_from(cfg.params.get("mechanics"))
        if cfg.scheme == "real_rigidity":
            kappa = k
        elif cfg.scheme == "virtual_rigidity":
            varkappa = k
            eta = float(cfg.params.get("eta", 1.0))
            bound = np.atleast_1d(
                formulas.optimal_lossy_bound(mech, k, eta, omegas))
            s_opt = float(np.min(bound))
        if eval_omega is not None:
            om = np.array([float(eval_omega)])
            s_at = float(_single_channel_terms(cfg, om)[0][0])
        else:
            s_at = math.nan
    finite = np.isfinite(s_sum)
    s_band_min = float(np.min(s_sum[finite])) if finite.any() else math.inf
    return [s_band_min, s_at, kappa, varkappa, s_opt, int(deg.sum()), 0]


def _sweep_table(cfg: RunConfig) -> tuple[list[str], list[list[float]]]:
    block = cfg.raw.get("sweep")
    if not block:
        raise ConfigError("missing [sweep] block")
    try:
        axis = block["axis"]
        lo = float(block["min"])
        hi = float(block["max"])
        steps = int(block["steps"])
    except KeyError as exc:
        raise ConfigError(f"sweep.{exc.args[0]} is required") from exc
    if steps < 1:
        raise ConfigError("sweep.steps must be >= 1")
    eval_omega = block.get("eval_omega")
    eval_omega = float(eval_omega) if eval_omega is not None else None

    rows = []
    for value in np.linspace(lo, hi, steps):
        sub = RunConfig(cfg.scheme, dict(cfg.params), cfg.grid, cfg.gamma,
                        cfg.out, cfg.raw)
        sub.params[axis] = float(value)
        try:
            row = _sweep_row(sub, eval_omega)
        except (ConfigError, ValueError):
            # axis touched an invalid region; flag the row, keep sweeping
            row = [math.nan] * 5 + [0, 1]
        rows.append([float(value)] + row)
    return list(SWEEP_COLUMNS), rows


# ---------------------------------------------------------------------------
# verify: closed forms vs. the network oracle


def _draw_susceptibility(rng: np.random.Generator) -> Susceptibility:
    if rng.integers(0, 2) == 0:
        return FreeMass()
    omega0_sq = rng.uniform(0.3, 3.0) ** 2
    sign = -1 if rng.integers(0, 2) == 0 else 1
    return Oscillator(omega0_sq, sign)


def _max_rel_err(formula: np.ndarray, oracle: np.ndarray) -> float:
    formula = np.atleast_1d(formula)
    oracle = np.atleast_1d(oracle)
    ok = np.isfinite(formula) & np.isfinite(oracle)
    if not ok.all():
        both_inf = np.isinf(formula) & np.isinf(oracle)
        if not (ok | both_inf).all():
            return math.inf
    if not ok.any():
        return 0.0
    return float(np.max(np.abs(formula[ok] - oracle[ok]) / np.abs(oracle[ok])))


def run_verify(seed: int = 42, samples: int = 100, tol: float = 1e-9
               ) -> tuple[str, dict[str, float], bool]:
    """Compare each closed form against its oracle configuration on random
    draws; returns (report text, max relative error per formula, pass)."""
    if samples < 1:
        raise ConfigError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    grid = FrequencyGrid.log(0.1, 10.0, 30)
    om = grid.points
    errs = {"position_meter_spectrum": 0.0, "lossy_virtual_spectrum": 0.0,
            "lossy_real_spectrum": 0.0, "hybrid_full_spectrum": 0.0}

    for _ in range(samples):
        ups = rng.uniform(0.1, 10.0)
        phi = rng.uniform(-1.4, 1.4)
        psi = rng.uniform(-1.4, 1.4)
        eta = rng.uniform(0.5, 1.0)
        chi = _draw_susceptibility(rng)

        f = formulas.position_meter_spectrum(ups, chi, om)
        o = network.sum_noise_spectrum(
            network.position_meter_chain(ups, chi), om)
        errs["position_meter_spectrum"] = max(
            errs["position_meter_spectrum"], _max_rel_err(f, o))

        f = formulas.lossy_virtual_spectrum(ups, phi, eta, chi, om)
        o = network.sum_noise_spectrum(
            network.position_meter_chain(ups, chi, phi=phi, eta=eta), om)
        errs["lossy_virtual_spectrum"] = max(
            errs["lossy_virtual_spectrum"], _max_rel_err(f, o))

        ups_k, kappa = formulas.double_pass_effective(ups, psi)
        if ups_k > 0.0:
            f = formulas.lossy_real_spectrum(ups_k, kappa, eta, chi, om)
            o = network.sum_noise_spectrum(
                network.double_pass_chain(ups, psi, chi, eta=eta), om)
            errs["lossy_real_spectrum"] = max(
                errs["lossy_real_spectrum"], _max_rel_err(f, o))

        r = rng.uniform(0.0, 2.0)
        eta_i = rng.uniform(0.5, 1.0)
        eta_s = rng.uniform(0.5, 1.0)
        omega_s = rng.uniform(1.0, 5.0)
        mode = "virtual" if rng.integers(0, 2) == 0 else "real"
        hp = formulas.HybridParams(
            ups_i=ups, r=r, eps_i=epsilon(eta_i), eps_s=epsilon(eta_s),
            chi_i=FreeMass(), chi_s=Oscillator(omega_s ** 2, -1),
            k=omega_s ** 2, mode=mode)
        f = formulas.hybrid_full_spectrum(hp, om)
        hs = network.hybrid_system(ups, r, eta_i, eta_s, hp.chi_i, hp.chi_s,
                                   hp.k, mode)
        o = network.combine_optimal(*network.cross_spectrum(hs, om))
        errs["hybrid_full_spectrum"] = max(
            errs["hybrid_full_spectrum"], _max_rel_err(f, o))

    ok = all(e <= tol for e in errs.values())
    lines = [f"verify: seed={seed} samples={samples} tol={tol:g}"]
    for name, err in errs.items():
        status = "PASS" if err <= tol else "FAIL"
        lines.append(f"  {name:28s} max_rel_err={err:.3e}  {status}")
    lines.append("verify: " + ("PASS" if ok else "FAIL"))
    return "\n".join(lines) + "\n", errs, ok


# ---------------------------------------------------------------------------
# optimize subcommand


def _band_spectrum(cfg: RunConfig):
    def spectrum(params, omegas):
        sub = RunConfig(cfg.scheme, {**cfg.params, **params}, cfg.grid,
                        cfg.gamma, cfg.out, cfg.raw)
        if cfg.scheme == "hybrid":
            return np.atleast_1d(
                formulas.hybrid_full_spectrum(_hybrid_params(sub), omegas))
        grid_cfg = RunConfig(sub.scheme, sub.params,
                             FrequencyGrid(np.sort(np.atleast_1d(omegas))),
                             sub.gamma, sub.out, sub.raw)
        return _single_channel_terms(grid_cfg, np.atleast_1d(omegas))[0]
    return spectrum


def _run_optimize(cfg: RunConfig) -> tuple[list[str], list[list[Any]]]:
    block = cfg.raw.get("optimize", {})
    ranges_block = block.get("ranges")
    if not ranges_block:
        raise ConfigError("missing [optimize.ranges] block")
    ranges = {}
    for name, pair in ranges_block.items():
        if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
            raise ConfigError(f"optimize.ranges.{name} must be [lo, hi]")
        ranges[name] = (float(pair[0]), float(pair[1]))
    obj = optimize.BandObjective(cfg.grid, _band_spectrum(cfg), ranges)
    best, value = optimize.minimize_band(
        obj, sweeps=int(block.get("sweeps", 3)),
        rel_tol=float(block.get("rel_tol", 1e-6)))
    rows = [[name, best[name]] for name in ranges]
    rows.append(["objective", value])
    return ["name", "value"], rows


# ---------------------------------------------------------------------------
# output plumbing


def _fmt(value: Any) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def _write_csv(path: str | None, columns: list[str], rows: list[list[Any]],
               provenance: dict[str, Any]) -> None:
    lines = ["# " + json.dumps(provenance, sort_keys=True,
                               separators=(",", ":"), default=str),
             ",".join(columns)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)


def _bad_cavity_check(cfg: RunConfig) -> None:
    if cfg.gamma is not None and cfg.grid.points[-1] > float(cfg.gamma) / 10.0:
        print(f"warning: omega_max={cfg.grid.points[-1]:g} rad/s exceeds "
              f"gamma/10={float(cfg.gamma) / 10.0:g}; the instantaneous-cavity "
              "model is unreliable there", file=sys.stderr)


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="optospring",
        description="quantum noise budgets for double-pass optical-spring "
                    "force sensors")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("budget", "sweep", "optimize"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="TOML config path")
        p.add_argument("--out", default=None, help="output CSV path (default stdout)")
        if name == "budget":
            p.add_argument("--with-oracle", action="store_true",
                           help="add the network-oracle column")

    v = sub.add_parser("verify")
    v.add_argument("--seed", type=int, default=42)
    v.add_argument("--samples", type=int, default=100)
    v.add_argument("--tol", type=float, default=1e-9)
    v.add_argument("--out", default=None, help="report path (default stdout)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            report, _, ok = run_verify(args.seed, args.samples, args.tol)
            if args.out is None:
                sys.stdout.write(report)
            else:
                with open(args.out, "w", newline="\n") as fh:
                    fh.write(report)
            return 0 if ok else 2

        cfg = load_config(args.config)
        out = args.out if args.out is not None else cfg.out
        provenance = {"command": args.command, "config": cfg.raw}
        if args.command == "budget":
            _bad_cavity_check(cfg)
            columns, rows = _budget_table(cfg, args.with_oracle)
        elif args.command == "sweep":
            columns, rows = _sweep_table(cfg)
        else:
            columns, rows = _run_optimize(cfg)
        _write_csv(out, columns, rows, provenance)
        return 0
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
