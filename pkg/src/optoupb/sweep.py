"""Parameter sweeps, g-minimization, figure presets and result serialization."""

from __future__ import annotations

import configparser
import csv
import io
import json
import math
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from datetime import datetime, timezone
from itertools import product
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from . import __version__
from .errors import ConfigError, OptoUPBError
from .liouvillian import SystemParams, thermal_occupation, with_optimal_detuning
from .observables import OBSERVABLES, observable_value
from .steady import CutoffCaps, SolveOptions, converge_cutoffs, steady_state
from .weakpump import g2_weak_pump_params

PARAM_FIELDS = tuple(f.name for f in fields(SystemParams))
ALIASES = {
    "J": "coupling_j",
    "g": "coupling_g",
    "eps": "drive_eps",
    "epsilon": "drive_eps",
    "Gamma": "dephasing",
}
TEMPERATURE = "k_BT"
COLUMN_LABELS = {
    "coupling_j": "J",
    "coupling_g": "g",
    "drive_eps": "eps",
    "dephasing": "Gamma",
}
MODELS = ("full", "weak-pump")
DIAGNOSTICS = ("residual", "N_ph", "N_m", "solve_time", "error")


def canonical_name(name: str) -> str:
    """Map an axis or parameter name (field, alias or ``k_BT``) to its canonical form."""
    if name in PARAM_FIELDS or name == TEMPERATURE:
        return name
    if name in ALIASES:
        return ALIASES[name]
    raise ConfigError(f"unknown parameter {name!r}; expected one of "
                      f"{', '.join(PARAM_FIELDS + (TEMPERATURE,) + tuple(ALIASES))}")


def column_name(name: str) -> str:
    if name == "n_th":
        return name
    return f"{COLUMN_LABELS.get(name, name)}_over_kappa"


@dataclass(frozen=True)
class SweepConfig:
    """Grid definition.

    ``cutoffs=None`` converges ``(N_ph, N_m)`` independently at each point.
    ``k_b_t`` (units of kappa) overrides ``base.n_th`` through the Bose factor
    of the point's own ``omega_m``.
    """

    base: SystemParams = field(default_factory=SystemParams)
    axes: Tuple[Tuple[str, Tuple[float, ...]], ...] = ()
    derived_detuning: bool = True
    cutoffs: Optional[Tuple[int, int]] = None
    rel_tol: float = 5e-3
    caps: CutoffCaps = field(default_factory=CutoffCaps)
    outputs: Tuple[str, ...] = ("g2", "g2_zero_phonon", "n1")
    solver: SolveOptions = field(default_factory=SolveOptions)
    k_b_t: Optional[float] = None
    model: str = "full"
    workers: int = 1

    def __post_init__(self):
        axes = []
        seen = set()
        for name, grid in self.axes:
            key = canonical_name(name)
            if key in seen:
                raise ConfigError(f"axis {name!r} given twice")
            seen.add(key)
            grid = tuple(float(v) for v in grid)
            if not grid:
                raise ConfigError(f"axis {name!r} has an empty grid")
            if not all(math.isfinite(v) for v in grid):
                raise ConfigError(f"axis {name!r} has non-finite values")
            diffs = np.diff(grid)
            if len(grid) > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
                raise ConfigError(f"axis {name!r} must be strictly ordered")
            axes.append((key, grid))
        object.__setattr__(self, "axes", tuple(axes))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        if self.model not in MODELS:
            raise ConfigError(f"model must be one of {MODELS}, got {self.model!r}")
        allowed = ("g2",) if self.model == "weak-pump" else OBSERVABLES
        for name in self.outputs:
            if name not in allowed:
                raise ConfigError(f"unknown output {name!r} for model {self.model!r}; "
                                  f"choose from {allowed}")
        if self.cutoffs is not None:
            nph, nm = self.cutoffs
            if int(nph) != nph or int(nm) != nm or nph < 0 or nm < 0:
                raise ConfigError(f"cutoffs must be non-negative integers, got {self.cutoffs!r}")
            object.__setattr__(self, "cutoffs", (int(nph), int(nm)))
        if not self.rel_tol > 0:
            raise ConfigError("rel_tol must be > 0")
        if self.k_b_t is not None and self.k_b_t < 0:
            raise ConfigError("k_BT must be >= 0")
        if int(self.workers) != self.workers or self.workers < 1:
            raise ConfigError(f"workers must be a positive integer, got {self.workers!r}")

    @property
    def shape(self):
        return tuple(len(g) for _, g in self.axes)

    def points(self):
        """Axis-value tuples in row-major order (last axis fastest)."""
        return list(product(*(g for _, g in self.axes)))

    def replace(self, **changes) -> "SweepConfig":
        return replace(self, **changes)


@dataclass
class SweepResult:
    columns: Tuple[str, ...]
    rows: list
    metadata: dict

    def column(self, name):
        return [r[name] for r in self.rows]

    @property
    def failures(self):
        return [r for r in self.rows if r.get("error")]


def point_params(cfg: SweepConfig, values: Sequence[float]) -> SystemParams:
    """Parameters of one grid point, with temperature and detuning wiring applied."""
    changes = {}
    k_b_t = cfg.k_b_t
    for (name, _), v in zip(cfg.axes, values):
        if name == TEMPERATURE:
            k_b_t = v
        else:
            changes[name] = v
    p = cfg.base.replace(**changes)
    if k_b_t is not None:
        p = p.replace(n_th=thermal_occupation(k_b_t, p.omega_m))
    if cfg.derived_detuning:
        p = with_optimal_detuning(p)
        if cfg.model == "weak-pump":
            # the analytic model takes one detuning; the blockade is set by mode two
            p = p.replace(delta1=p.delta2)
    return p


def _observables_for(cfg: SweepConfig, params: SystemParams):
    if cfg.model == "weak-pump":
        if params.drive_eps == 0:
            # the model's g2 is drive independent; any nonzero drive will do
            params = params.replace(drive_eps=1.0)
        return {"g2": g2_weak_pump_params(params)}, None
    if cfg.cutoffs is not None:
        state = steady_state(params, *cfg.cutoffs, cfg.solver)
    else:
        target = "g2" if "g2" in cfg.outputs else cfg.outputs[0]
        state = converge_cutoffs(params, target, cfg.rel_tol, cfg.solver, caps=cfg.caps)[2]
    return {name: observable_value(state, name) for name in cfg.outputs}, state


def solve_point(cfg: SweepConfig, values: Sequence[float]) -> dict:
    """One result row; failures are recorded in the ``error`` column."""
    row = {column_name(name): v for (name, _), v in zip(cfg.axes, values)}
    row.update({name: None for name in cfg.outputs})
    row.update(residual=None, N_ph=None, N_m=None, solve_time=None, error="")
    t0 = time.perf_counter()
    try:
        obs, state = _observables_for(cfg, point_params(cfg, values))
    except (OptoUPBError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    else:
        row.update(obs)
        if state is not None:
            row.update(residual=state.residual, N_ph=state.n_ph_max, N_m=state.n_m_max)
    row["solve_time"] = time.perf_counter() - t0
    return row


def _solve_indexed(args):
    cfg, values = args
    return solve_point(cfg, values)


def run_sweep(cfg: SweepConfig) -> SweepResult:
    points = cfg.points()
    jobs = [(cfg, v) for v in points]
    if cfg.workers > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.workers, len(points))) as pool:
            # map yields in submission order, so rows keep grid order
            rows = list(pool.map(_solve_indexed, jobs))
    else:
        rows = [_solve_indexed(j) for j in jobs]
    columns = tuple(column_name(n) for n, _ in cfg.axes) + cfg.outputs + DIAGNOSTICS
    return SweepResult(columns, rows, sweep_metadata(cfg))


def sweep_metadata(cfg: SweepConfig, **extra) -> dict:
    meta = {
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "config": config_echo(cfg),
    }
    meta.update(extra)
    return meta


def config_echo(cfg: SweepConfig) -> dict:
    return {
        "base": asdict(cfg.base),
        "axes": {name: list(grid) for name, grid in cfg.axes},
        "derived_detuning": cfg.derived_detuning,
        "cutoffs": "auto" if cfg.cutoffs is None else list(cfg.cutoffs),
        "rel_tol": cfg.rel_tol,
        "caps": [cfg.caps.n_ph_max, cfg.caps.n_m_max],
        "outputs": list(cfg.outputs),
        "solver": asdict(cfg.solver),
        "k_BT": cfg.k_b_t,
        "model": cfg.model,
    }


# -- g minimization ----------------------------------------------------------

@dataclass(frozen=True)
class GMinimum:
    """Result of ``minimize_g2_over_g``; unpacks as ``(g_min, g2_min)``."""

    g_min: float
    g2_min: float
    multimodal: bool
    cutoffs: Tuple[int, int]
    grid: Tuple[Tuple[float, float], ...] = ()

    def __iter__(self):
        return iter((self.g_min, self.g2_min))


def _grid_local_minima(values):
    v = np.asarray(values)
    idx = []
    for i in range(len(v)):
        left = i == 0 or v[i] < v[i - 1]
        right = i == len(v) - 1 or v[i] < v[i + 1]
        if left and right:
            idx.append(i)
    return idx


def minimize_g2_over_g(params: SystemParams, g_range: Tuple[float, float], grid_n: int,
                       cutoffs: Optional[Tuple[int, int]] = None,
                       opts: Optional[SolveOptions] = None, rel_tol: float = 5e-3,
                       derived_detuning: bool = True, xtol: float = 1e-4,
                       caps: CutoffCaps = CutoffCaps(),
                       comparable_ratio: float = 2.0) -> GMinimum:
    """Minimize ``g2(0)`` over the optomechanical coupling.

    A uniform grid of ``grid_n`` couplings is scanned first, then the best grid
    point is refined by golden-section search on its neighbouring interval.
    Without fixed ``cutoffs`` each grid point is converged on its own and the
    refinement runs at the largest cutoffs met near the best point, so the
    objective stays smooth. Two or more grid minima within ``comparable_ratio``
    of each other set ``multimodal``; the global grid best is refined anyway.
    """
    lo, hi = map(float, g_range)
    if not lo < hi:
        raise ValueError(f"g_range must satisfy lo < hi, got {g_range!r}")
    if int(grid_n) != grid_n or grid_n < 3:
        raise ValueError(f"grid_n must be an integer >= 3, got {grid_n!r}")
    opts = opts or SolveOptions()

    def wired(g):
        p = params.replace(coupling_g=g)
        return with_optimal_detuning(p) if derived_detuning else p

    grid = np.linspace(lo, hi, int(grid_n))
    values, cuts = [], []
    for g in grid:
        if cutoffs is None:
            nph, nm, st = converge_cutoffs(wired(g), "g2", rel_tol, opts, caps=caps)
        else:
            nph, nm = cutoffs
            st = steady_state(wired(g), nph, nm, opts)
        values.append(observable_value(st, "g2"))
        cuts.append((nph, nm))

    best = int(np.argmin(values))
    minima = _grid_local_minima(values)
    multimodal = sum(values[i] <= comparable_ratio * values[best] for i in minima) > 1

    near = range(max(best - 1, 0), min(best + 2, len(grid)))
    fixed = cutoffs or (max(cuts[i][0] for i in near), max(cuts[i][1] for i in near))

    def objective(g):
        return math.log(observable_value(steady_state(wired(g), *fixed, opts), "g2"))

    a, c = grid[max(best - 1, 0)], grid[min(best + 1, len(grid) - 1)]
    if 0 < best < len(grid) - 1:
        b = grid[best]
        fb = objective(b)
        # a fixed-cutoff objective can shift the bracket slightly; fall back if so
        if fb < objective(a) and fb < objective(c):
            res = minimize_scalar(objective, bracket=(a, b, c), method="golden",
                                  options={"xtol": xtol})
        else:
            res = minimize_scalar(objective, bounds=(a, c), method="bounded",
                                  options={"xatol": xtol * b})
    else:
        res = minimize_scalar(objective, bounds=(a, c), method="bounded",
                              options={"xatol": xtol * max(abs(a), abs(c))})
    g_min, g2_min = float(res.x), float(math.exp(res.fun))
    if g2_min > values[best]:
        g_min, g2_min = float(grid[best]), float(values[best])
    samples = tuple((float(g), float(v)) for g, v in zip(grid, values))
    return GMinimum(g_min, g2_min, bool(multimodal), tuple(fixed), samples)


# -- figure presets -----------------------------------------------------------

FIGURES = ("fig1", "fig3", "fig4", "fig5a", "fig5b", "fig5c", "fig5d", "figS6")
SCALES = ("desk", "full")

# absolute minima of g2 over (g, J) at eps = 0.1 kappa, read off the J where the
# blockade is deepest; g from minimize_g2_over_g at that J
OPTIMA = {11.0: (1.9, 1.073), 24.0: (2.6, 1.165), 50.0: (3.6, 1.216)}
FULL_CAPS = CutoffCaps(22, 36)


def _grid(lo, hi, n):
    return tuple(float(v) for v in np.linspace(lo, hi, n))


def _geom(lo, hi, n):
    return tuple(float(v) for v in np.geomspace(lo, hi, n))


def _stack(results, label, values, meta):
    """Concatenate sub-sweeps into one table with a leading constant column."""
    rows = []
    for v, res in zip(values, results):
        for r in res.rows:
            rows.append({label: v, **r})
    columns = (label,) + results[0].columns
    return SweepResult(columns, rows, meta)


def figure_preset(fig_id: str, scale: str = "desk", workers: int = 1,
                  solver: Optional[SolveOptions] = None) -> SweepResult:
    """Sweep data behind one of the published figures.

    Desk scale uses coarse grids, ``eps = 0.1`` where the figure is at weak
    pump, and per-point converged cutoffs with ``rel_tol = 5e-3`` on ``g2``.
    Full scale uses denser grids and caps of ``N_ph = 22`` and ``N_m = 36``;
    hot fig5d points then end as cap failure rows.
    """
    if fig_id not in FIGURES:
        raise ConfigError(f"unknown figure {fig_id!r}; choose from {FIGURES}")
    if scale not in SCALES:
        raise ConfigError(f"scale must be 'desk' or 'full', got {scale!r}")
    full = scale == "full"
    solver = solver or SolveOptions()
    common = dict(solver=solver, workers=workers, caps=FULL_CAPS if full else CutoffCaps())
    weak = SystemParams(gamma=0.01, drive_eps=0.1)

    if fig_id == "fig1":
        cfg = SweepConfig(base=weak.replace(omega_m=50.0),
                          axes=(("coupling_g", _grid(0.05, 3.0, 60 if full else 12)),
                                ("coupling_j", _grid(0.75, 10.0, 60 if full else 10))),
                          outputs=("g2", "g2_zero_phonon", "n1"), **common)
        return run_sweep(cfg)

    if fig_id == "fig3":
        rows = []
        for wm in (11.0, 24.0, 50.0):
            for j in _grid(1.0, 8.0, 29 if full else 8):
                row = {"omega_m_over_kappa": wm, "J_over_kappa": j, "g_min_over_kappa": None,
                       "g2_min": None, "multimodal": None, "N_ph": None, "N_m": None,
                       "error": ""}
                try:
                    res = minimize_g2_over_g(weak.replace(omega_m=wm, coupling_j=j),
                                             (0.05, 3.0), 30 if full else 12, opts=solver,
                                             caps=common["caps"])
                    row.update(g_min_over_kappa=res.g_min, g2_min=res.g2_min,
                               multimodal=res.multimodal, N_ph=res.cutoffs[0],
                               N_m=res.cutoffs[1])
                except (OptoUPBError, ValueError, ArithmeticError) as exc:
                    row["error"] = f"{type(exc).__name__}: {exc}"
                rows.append(row)
        meta = sweep_metadata(SweepConfig(base=weak, **common), figure=fig_id, scale=scale)
        return SweepResult(tuple(rows[0]), rows, meta)

    if fig_id == "fig4":
        results, oms = [], (11.0, 24.0, 50.0) if full else (50.0,)
        for wm in oms:
            j, g = OPTIMA[wm]
            cfg = SweepConfig(base=weak.replace(omega_m=wm, coupling_j=j, coupling_g=g),
                              axes=(("drive_eps", _geom(0.1, 11.0, 24 if full else 10)),),
                              outputs=("g2", "n1", "n2"), **{**common, "caps": CutoffCaps(22, 8)})
            results.append(run_sweep(cfg))
        return _stack(results, "omega_m_over_kappa", oms,
                      sweep_metadata(cfg, figure=fig_id, scale=scale))

    if fig_id in ("fig5a", "fig5b", "fig5c"):
        wm = {"fig5a": 11.0, "fig5b": 24.0, "fig5c": 50.0}[fig_id]
        g = OPTIMA[wm][1]
        gammas = (0.0, 1e-4, 1e-3, 1e-2)
        results = []
        for gam in gammas:
            cfg = SweepConfig(base=weak.replace(omega_m=wm, coupling_g=g, dephasing=gam),
                              axes=(("coupling_j", _grid(1.0, 8.0, 36 if full else 8)),),
                              outputs=("g2", "n1"), **common)
            results.append(run_sweep(cfg))
        return _stack(results, "Gamma_over_kappa", gammas,
                      sweep_metadata(cfg, figure=fig_id, scale=scale))

    if fig_id == "fig5d":
        j, g = OPTIMA[24.0]
        cfg = SweepConfig(base=weak.replace(omega_m=24.0, coupling_j=j, coupling_g=g),
                          axes=((TEMPERATURE, _grid(0.1, 144.0, 25) if full
                                 else (0.1, 12.0, 24.0, 48.0, 72.0, 96.0, 120.0, 144.0)),),
                          outputs=("g2", "n1", "n_m"), **common)
        if not full:
            # the Bose tail at k_BT = 6 omega_m needs about 100 phonon levels
            cfg = cfg.replace(caps=CutoffCaps(cfg.caps.n_ph_max, 110))
        return run_sweep(cfg)

    # figS6: analytic line and two exact drives over the same J grid
    base = weak.replace(omega_m=24.0, coupling_g=1.16, drive_eps=0.1)
    j_axis = (("coupling_j", _grid(1.0, 6.0, 50 if full else 20)),)
    analytic = run_sweep(SweepConfig(base=base, axes=j_axis, model="weak-pump",
                                     outputs=("g2",), k_b_t=0.1, **common))
    exact = [run_sweep(SweepConfig(base=base.replace(drive_eps=e), axes=j_axis,
                                   outputs=("g2",), k_b_t=0.1, **common))
             for e in (0.1, 1.0)]
    rows = []
    for a, e1, e2 in zip(analytic.rows, *(r.rows for r in exact)):
        rows.append({
            "J_over_kappa": a["J_over_kappa"],
            "g2_analytic": a["g2"],
            "g2_eps_0.1": e1["g2"],
            "g2_eps_1": e2["g2"],
            "N_ph_eps_1": e2["N_ph"],
            "N_m_eps_1": e2["N_m"],
            "error": "; ".join(x["error"] for x in (a, e1, e2) if x["error"]),
        })
    meta = sweep_metadata(SweepConfig(base=base, axes=j_axis, k_b_t=0.1, **common),
                          figure=fig_id, scale=scale)
    return SweepResult(tuple(rows[0]), rows, meta)


# -- config files -------------------------------------------------------------

SECTIONS = {
    "params": set(PARAM_FIELDS) | set(ALIASES) | {TEMPERATURE},
    "axes": set(PARAM_FIELDS) | set(ALIASES) | {TEMPERATURE},
    "sweep": {"derived_detuning", "cutoffs", "rel_tol", "outputs", "model", "workers",
              "cap_n_ph", "cap_n_m"},
    "solver": {f.name for f in fields(SolveOptions)},
    "minimize": {"g_min", "g_max", "grid_n"},
}

_GRID_FN = re.compile(r"^(linspace|geomspace|logspace)\s*\((.*)\)$")


def _line_of(text: str, section: str, key: Optional[str] = None) -> int:
    current = None
    for n, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if s.startswith("[") and s.endswith("]"):
            current = s[1:-1].strip()
            if key is None and current == section:
                return n
        elif current == section and key is not None and re.match(
                rf"^{re.escape(key)}\s*[=:]", s, re.IGNORECASE):
            return n
    return 0


def _fail(text, source, section, key, msg):
    line = _line_of(text, section, key)
    where = f"{source}:{line}" if line else source
    raise ConfigError(f"{where}: [{section}]{' ' + key if key else ''}: {msg}")


def parse_grid(text: str):
    """``linspace(a, b, n)``, ``geomspace(a, b, n)``, ``logspace(a, b, n)`` or a comma list."""
    text = text.strip()
    m = _GRID_FN.match(text)
    if m:
        args = [a.strip() for a in m.group(2).split(",")]
        if len(args) != 3:
            raise ValueError(f"{m.group(1)} needs three arguments")
        a, b, n = float(args[0]), float(args[1]), int(args[2])
        if n < 1:
            raise ValueError("grid length must be >= 1")
        return tuple(float(v) for v in getattr(np, m.group(1))(a, b, n))
    return tuple(float(v) for v in text.split(",") if v.strip())


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


@dataclass(frozen=True)
class LoadedConfig:
    sweep: SweepConfig
    g_range: Tuple[float, float] = (0.05, 3.0)
    grid_n: int = 12


def parse_config(text: str, source: str = "<config>") -> LoadedConfig:
    """Parse the INI-style configuration; every unknown section or key is an error."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None

    for section in cp.sections():
        if section not in SECTIONS:
            _fail(text, source, section, None,
                  f"unknown section; expected one of {', '.join(SECTIONS)}")
        for key in cp[section]:
            if key not in SECTIONS[section]:
                _fail(text, source, section, key, "unknown key")

    def value(section, key, conv):
        try:
            return conv(cp[section][key])
        except (ValueError, TypeError) as exc:
            _fail(text, source, section, key, str(exc))

    base, k_b_t = {}, None
    if cp.has_section("params"):
        for key in cp["params"]:
            v = value("params", key, float)
            name = canonical_name(key)
            if name == TEMPERATURE:
                k_b_t = v
            elif name in base:
                _fail(text, source, "params", key, "parameter given twice")
            else:
                base[name] = v
    try:
        base_params = SystemParams(**base)
    except ValueError as exc:
        raise ConfigError(f"{source}: [params]: {exc}") from None

    axes = []
    if cp.has_section("axes"):
        for key in cp["axes"]:
            axes.append((key, value("axes", key, parse_grid)))

    kw = {}
    if cp.has_section("sweep"):
        s = cp["sweep"]
        if "derived_detuning" in s:
            kw["derived_detuning"] = value("sweep", "derived_detuning", _bool)
        if "cutoffs" in s:
            raw = s["cutoffs"].strip().lower()
            kw["cutoffs"] = None if raw == "auto" else value(
                "sweep", "cutoffs", lambda t: tuple(int(x) for x in t.split(",")))
        if "rel_tol" in s:
            kw["rel_tol"] = value("sweep", "rel_tol", float)
        if "outputs" in s:
            kw["outputs"] = tuple(o.strip() for o in s["outputs"].split(",") if o.strip())
        if "model" in s:
            kw["model"] = s["model"].strip()
        if "workers" in s:
            kw["workers"] = value("sweep", "workers", int)
        caps = CutoffCaps()
        if "cap_n_ph" in s:
            caps = replace(caps, n_ph_max=value("sweep", "cap_n_ph", int))
        if "cap_n_m" in s:
            caps = replace(caps, n_m_max=value("sweep", "cap_n_m", int))
        kw["caps"] = caps

    if cp.has_section("solver"):
        types = {f.name: f.type for f in fields(SolveOptions)}
        opts = {}
        for key in cp["solver"]:
            t = str(types[key])
            if "int" in t:
                conv = int
            elif "float" in t:
                conv = float
            else:
                conv = str.strip
            opts[key] = value("solver", key, conv)
        try:
            kw["solver"] = SolveOptions(**opts)
        except ValueError as exc:
            raise ConfigError(f"{source}: [solver]: {exc}") from None

    g_range, grid_n = (0.05, 3.0), 12
    if cp.has_section("minimize"):
        m = cp["minimize"]
        g_range = (value("minimize", "g_min", float) if "g_min" in m else g_range[0],
                   value("minimize", "g_max", float) if "g_max" in m else g_range[1])
        if "grid_n" in m:
            grid_n = value("minimize", "grid_n", int)

    try:
        cfg = SweepConfig(base=base_params, axes=tuple(axes), k_b_t=k_b_t, **kw)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    return LoadedConfig(cfg, g_range, grid_n)


def load_config(path) -> LoadedConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), source=str(path))


# -- output -------------------------------------------------------------------

def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".12g")
    return str(v)


def to_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(result.columns)
    for row in result.rows:
        writer.writerow([_fmt(row.get(c)) for c in result.columns])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    return v


def to_json(result: SweepResult) -> str:
    rows = [{c: _json_value(r.get(c)) for c in result.columns} for r in result.rows]
    return json.dumps({"metadata": result.metadata, "columns": list(result.columns),
                       "rows": rows}, indent=2, default=_json_value)


def write_result(result: SweepResult, fmt: str = "csv", path=None) -> str:
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format must be 'csv' or 'json', got {fmt!r}")
    text = to_csv(result) if fmt == "csv" else to_json(result)
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text
