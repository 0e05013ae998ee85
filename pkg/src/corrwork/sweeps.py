"""Parameter sweeps behind the command-line tool.

A sweep is split into independent cells (one temperature, plus one coupling
for the qubit and boson systems).  Cells run in a process pool and are sorted
before writing, so the CSV does not depend on scheduling or worker count.
"""
from __future__ import annotations

import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import bosons as bs
from . import fermions as fm
from . import qubits as qb

SYSTEMS = ("two-qubit", "fermion", "boson")
KINDS = ("correlations", "thermal")
FEAS_TOL = 1e-6


class ConfigError(ValueError):
    """Invalid sweep configuration; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class NumericalFailure(RuntimeError):
    """A grid cell produced an infeasible or inconsistent result."""


def parse_grid(text) -> list:
    """Parse ``"a:b:step"`` ranges and comma lists into a list of floats.

    Ranges include ``b`` when it is hit within 1e-12; values are rounded to
    12 significant digits so ``0.1:0.3:0.1`` gives exactly 0.1, 0.2, 0.3.
    """
    if isinstance(text, (int, float)):
        return [float(text)]
    if isinstance(text, (list, tuple)):
        out = []
        for item in text:
            out += parse_grid(item)
        return out
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            raise ValueError(f"empty entry in grid {text!r}")
        if ":" in part:
            bits = part.split(":")
            if len(bits) != 3:
                raise ValueError(f"range must be start:stop:step, got {part!r}")
            a, b, h = (float(x) for x in bits)
            if h == 0 or (b - a) * h < 0:
                raise ValueError(f"step of {part!r} does not lead from start to stop")
            n = int(math.floor((b - a) / h + 1e-12 / abs(h))) + 1
            out += [_round12(a + k * h) for k in range(n)]
        else:
            out.append(float(part))
    return out


def _round12(x: float) -> float:
    return float(f"{x:.12g}")


@dataclass
class SweepConfig:
    system: str
    omega: float = 1.0
    eps: list = field(default_factory=list)
    eps_even: float = 0.5
    eps_odd: float = 0.25
    T_grid: list = field(default_factory=list)
    W_grid: list = field(default_factory=list)
    w_relative: bool = False
    alpha_II: float = 0.5
    kind: str = "correlations"
    scale_grid: list = field(default_factory=list)
    output_path: str = "-"

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))


DEFAULTS = {
    "two-qubit": {"eps": "0:-1:-0.1", "t": "0.02:3:0.02"},
    "fermion": {"t": "0.1:1:0.1", "w_rel": "0.05:1:0.05"},
    "fermion-thermal": {"t": "0.01,0.05:1:0.05", "scale": "0:2:0.05"},
    "boson": {"eps": "0.5", "t": "0.1:1:0.1", "w": "0.05:1:0.05"},
}

# keys accepted in a config file (same spelling as the long flags)
CONFIG_KEYS = ("system", "omega", "eps", "eps_even", "eps_odd", "t", "w", "w_rel",
               "alpha_ii", "kind", "scale", "output")


def _strictly_increasing(name, grid):
    if not grid:
        raise ConfigError(name, "grid is empty")
    if any(not math.isfinite(x) for x in grid):
        raise ConfigError(name, "grid has non-finite values")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError(name, "grid must be strictly increasing")


def build_config(values: dict) -> SweepConfig:
    """Validate merged file/flag values (keys as in ``CONFIG_KEYS``)."""
    unknown = sorted(set(values) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(unknown[0], "unknown key")
    system = values.get("system")
    if system not in SYSTEMS:
        raise ConfigError("system", f"must be one of {', '.join(SYSTEMS)}")
    kind = values.get("kind") or "correlations"
    if kind not in KINDS:
        raise ConfigError("kind", f"must be one of {', '.join(KINDS)}")
    if kind == "thermal" and system != "fermion":
        raise ConfigError("kind", "'thermal' sweeps exist only for the fermion system")
    if values.get("w") is not None and values.get("w_rel") is not None:
        raise ConfigError("w", "give either w or w_rel, not both")

    key = "fermion-thermal" if kind == "thermal" else system
    defaults = DEFAULTS[key]

    def grid(name):
        raw = values.get(name)
        if raw is None:
            raw = defaults.get(name)
        if raw is None:
            return []
        try:
            return parse_grid(raw)
        except ValueError as exc:
            raise ConfigError(name, str(exc)) from None

    def real(name, default):
        raw = values.get(name, default)
        try:
            x = float(default if raw is None else raw)
        except (TypeError, ValueError):
            raise ConfigError(name, f"not a number: {raw!r}") from None
        if not math.isfinite(x):
            raise ConfigError(name, "must be finite")
        return x

    cfg = SweepConfig(system=system, kind=kind,
                      omega=real("omega", 1.0),
                      eps_even=real("eps_even", 0.5),
                      eps_odd=real("eps_odd", 0.25),
                      alpha_II=real("alpha_ii", 0.5),
                      output_path=str(values.get("output") or "-"))
    cfg.T_grid = grid("t")
    _strictly_increasing("t", cfg.T_grid)
    if any(T < 0 for T in cfg.T_grid):
        raise ConfigError("t", "temperatures must be >= 0")
    if cfg.omega < 0 or (system == "boson" and cfg.omega == 0):
        raise ConfigError("omega", "must be positive" if system == "boson" else "must be >= 0")

    if system in ("two-qubit", "boson"):
        cfg.eps = grid("eps")
        if not cfg.eps:
            raise ConfigError("eps", "grid is empty")
        if len(set(cfg.eps)) != len(cfg.eps):
            raise ConfigError("eps", "duplicate couplings")
    elif values.get("eps") is not None:
        raise ConfigError("eps", "fermion sweeps use eps_even and eps_odd")

    if system == "two-qubit":
        if any(e > 0 for e in cfg.eps):
            raise ConfigError("eps", "step II of the qubit protocol needs eps <= 0")
        if not 0 < cfg.alpha_II <= 1:
            raise ConfigError("alpha_ii", "must lie in (0, 1]")
        if values.get("w") is not None or values.get("w_rel") is not None:
            raise ConfigError("w", "two-qubit sweeps have no work grid")
    elif system == "boson":
        if any(abs(e) >= cfg.omega for e in cfg.eps):
            raise ConfigError("eps", "need |eps| < omega")
        if values.get("w_rel") is not None:
            raise ConfigError("w_rel", "bosonic sweeps take absolute work only")
        cfg.W_grid = grid("w")
    elif kind == "thermal":
        cfg.scale_grid = grid("scale")
        _strictly_increasing("scale", cfg.scale_grid)
    else:
        cfg.w_relative = values.get("w") is None
        cfg.W_grid = grid("w_rel" if cfg.w_relative else "w")

    if cfg.W_grid:
        _strictly_increasing("w_rel" if cfg.w_relative else "w", cfg.W_grid)
        if cfg.W_grid[0] < 0:
            raise ConfigError("w", "work must be >= 0")
    if system == "fermion" and kind == "correlations" and cfg.w_relative:
        for T in cfg.T_grid:
            for model in (_fermion_model(cfg, T), _fermion_model(cfg, T).noninteracting()):
                if not fm.w_min(model).positive:
                    raise ConfigError("w_rel", f"W_min <= 0 at T={T:g}; use absolute w")
    return cfg


def _fermion_model(cfg, T, scale=1.0):
    return fm.FermionModel(cfg.omega, scale * cfg.eps_even, scale * cfg.eps_odd, T)


# --- cell evaluation -------------------------------------------------------

COLUMNS = {
    "two-qubit": ["T", "eps", "alpha_II", "a_tau", "a_gibbs", "a_final", "c_zz",
                  "delta_F_tilde", "I_initial", "I_final", "delta_I"],
    "fermion": ["T", "W_abs", "W_rel", "W_min", "I_initial", "I_final", "delta_I", "F_spent",
                "analytic", "evaluations", "p", "x_even", "z_even", "x_odd", "z_odd",
                "W_min_nonint", "I_final_nonint", "delta_I_nonint",
                "W_rel_nonint_same_abs", "I_final_nonint_same_rel", "delta_I_nonint_same_rel"],
    "fermion-thermal": ["T", "scale", "eps_even", "eps_odd", "I_thermal", "tau0", "ground_limit"],
    "boson": ["T", "eps", "W_abs", "nu", "r", "I_initial", "I_final", "delta_I", "F_spent",
              "I_final_nonint", "delta_I_nonint"],
}


def _cells(cfg: SweepConfig) -> list:
    if cfg.system == "fermion":
        return [(i, 0) for i in range(len(cfg.T_grid))]
    return [(i, j) for i in range(len(cfg.T_grid)) for j in range(len(cfg.eps))]


def _qubit_cell(cfg, T, eps):
    row = qb.advantage_row(cfg.omega, eps, cfg.alpha_II, T)
    model = qb.QubitModel(cfg.omega, eps, T)
    tau = qb.thermal_coefficients(model)
    final = qb.QubitDiagState(row.a_final, row.a_final, row.c_zz)
    if final.min_eigenvalue() < -1e-12:
        raise NumericalFailure(f"two-qubit cell T={T:g} eps={eps:g}: final state not positive")
    I0, I1 = qb.diag_mutual_information(tau), qb.diag_mutual_information(final)
    return [[T, eps, cfg.alpha_II, row.a_tau, row.a_gibbs, row.a_final, row.c_zz,
             row.delta_F_tilde, I0, I1, I1 - I0]]


def _check(ok, where, what):
    if not ok:
        raise NumericalFailure(f"{where}: {what}")


def _fermion_cell(cfg, T):
    model = _fermion_model(cfg, T)
    free = model.noninteracting()
    wm, wm0 = fm.w_min(model).value, fm.w_min(free).value
    if cfg.w_relative:
        W_abs = [w * wm for w in cfg.W_grid]
    else:
        W_abs = list(cfg.W_grid)
    inter = fm.correlation_curve(model, W_abs)
    same_abs = fm.correlation_curve(free, W_abs)
    if cfg.w_relative:
        same_rel = fm.correlation_curve(free, [w * wm0 for w in cfg.W_grid])
    else:
        same_rel = fm.correlation_curve(free, [w / wm * wm0 for w in cfg.W_grid]) if wm > 0 else None
    rows = []
    for k, W in enumerate(W_abs):
        r, a = inter[k], same_abs[k]
        where = f"fermion cell T={T:g} W={W:.12g}"
        _check(r.state.is_valid(1e-9), where, "state outside the Bloch balls")
        _check(r.F_spent <= W + FEAS_TOL, where, f"budget exceeded ({r.F_spent} > {W})")
        _check(r.delta_I >= -FEAS_TOL, where, "correlations decreased")
        s = r.state
        rel = cfg.W_grid[k] if cfg.w_relative else (W / wm if wm > 0 else math.nan)
        b = same_rel[k] if same_rel is not None else None
        rows.append([T, W, rel, wm, r.I_thermal, r.I_final, r.delta_I, r.F_spent,
                     int(r.analytic), r.evaluations, s.p, s.x_even, s.z_even, s.x_odd, s.z_odd,
                     wm0, a.I_final, a.delta_I, W / wm0,
                     b.I_final if b else math.nan, b.delta_I if b else math.nan])
    return rows


def _fermion_thermal_cell(cfg, T):
    rows = []
    for sc in cfg.scale_grid:
        model = _fermion_model(cfg, T, sc)
        rows.append([T, sc, model.eps_even, model.eps_odd, fm.thermal_mutual_information(model),
                     fm.tau0(model), fm.ground_state_limit(model).value])
    return rows


def _boson_cell(cfg, T, eps):
    model = bs.BosonModel(cfg.omega, eps, T)
    free = model.noninteracting()
    rows = []
    for W in cfg.W_grid:
        r, a = bs.maximize_correlations_boson(model, W), bs.maximize_correlations_boson(free, W)
        where = f"boson cell T={T:g} eps={eps:g} W={W:.12g}"
        _check(r.F_spent <= W + FEAS_TOL, where, "budget exceeded")
        _check(r.delta_I >= -FEAS_TOL, where, "correlations decreased")
        rows.append([T, eps, W, r.nu, r.r, r.I_thermal, r.I_final, r.delta_I, r.F_spent,
                     a.I_final, a.delta_I])
    return rows


def run_cell(cfg: SweepConfig, cell) -> tuple:
    i, j = cell
    T = cfg.T_grid[i]
    if cfg.system == "two-qubit":
        rows = _qubit_cell(cfg, T, cfg.eps[j])
    elif cfg.system == "boson":
        rows = _boson_cell(cfg, T, cfg.eps[j])
    elif cfg.kind == "thermal":
        rows = _fermion_thermal_cell(cfg, T)
    else:
        rows = _fermion_cell(cfg, T)
    return cell, rows


def worker_count(n_cells: int) -> int:
    raw = os.environ.get("CORRWORK_THREADS")
    if raw is None or raw.strip() == "":
        n = os.cpu_count() or 1
    else:
        try:
            n = int(raw)
        except ValueError:
            raise ConfigError("CORRWORK_THREADS", f"not an integer: {raw!r}") from None
        if n < 1:
            raise ConfigError("CORRWORK_THREADS", "must be a positive integer")
    return max(1, min(n, n_cells))


def run_sweep(cfg: SweepConfig, workers: int | None = None) -> list:
    """Evaluate all cells; returns rows ordered by temperature, then grid position."""
    cells = _cells(cfg)
    n = worker_count(len(cells)) if workers is None else max(1, min(workers, len(cells)))
    if n == 1:
        results = [run_cell(cfg, c) for c in cells]
    else:
        with ProcessPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(run_cell, [cfg] * len(cells), cells))
    results.sort(key=lambda item: item[0])
    return [row for _, rows in results for row in rows]


def columns(cfg: SweepConfig) -> list:
    return COLUMNS["fermion-thermal" if cfg.kind == "thermal" else cfg.system]


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if v == 0:
        return "0"  # no "-0"
    return "%.12g" % v


def format_csv(cfg: SweepConfig, rows) -> str:
    buf = io.StringIO(newline="")
    buf.write("# corrwork " + cfg.to_json() + "\n")
    buf.write(",".join(columns(cfg)) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def write_csv(cfg: SweepConfig, rows) -> str:
    text = format_csv(cfg, rows)
    if cfg.output_path == "-":
        return text
    with open(cfg.output_path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(text)
    return text
