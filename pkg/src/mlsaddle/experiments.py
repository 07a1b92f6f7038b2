"""Experiment manifests, single runs and diffusion-constant sweeps.

A manifest is a JSON document::

    {
      "network": "four-layer",                 # builtin name or {"file": path}
      "scales": {"dinter_1_3": 0.5},           # optional overrides, 1-based
      "cost": {"family": "quadratic"},         # or {"gamma": [...]} / seed
      "integrator": {"method": "rk4", "dt": 0.001, "t_end": 300,
                     "sample_every": 100},
      "epsilon": null,                         # default 1e-3 * max(1, |x*|)
      "sweep": {"dinter_1_3": [0.1, 0.5, 1.0]},
      "outputs": {"dir": "out"},
      "seed": 0
    }

Scale keys are ``dintra_<h>`` and ``dinter_<h>_<k>``. A value can also be an
object ``{"value": 0.1, "assumed": true}``. The same seed always produces the
same costs, initial states and output bytes.
"""

from __future__ import annotations

import copy
import itertools
import json
import os
import re
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .cost import QuadraticCost, make_cost, optimum
from .dynamics import FlowState, consensus_epsilon, detect_consensus, integrate_saddle
from .laplacian import algebraic_connectivity, build_laplacian
from .network import ASSUMED_FOUR_LAYER_SCALES, BUILTIN_NAMES, build_paper_networks, is_connected, read_network

__all__ = [
    "OUTPUT_DIR_ENV",
    "ExperimentManifest",
    "ManifestError",
    "SweepResult",
    "SweepRow",
    "builtin_manifest",
    "prepare",
    "run_experiment",
    "run_sweep",
]

OUTPUT_DIR_ENV = "MLSADDLE_OUTPUT_DIR"

DEFAULT_INTEGRATOR = {
    "method": "rk4",
    "dt": 1e-3,
    "t_end": 100.0,
    "sample_every": 100,
    "rtol": 1e-6,
    "atol": 1e-8,
}

DEFAULT_OUTPUTS = {
    "dir": None,
    "trajectory": "trajectory.csv",
    "report": "report.txt",
    "manifest": "manifest.json",
    "sweep": "sweep.csv",
    "sweep_trajectories": False,
}

_SCALE_KEY = re.compile(r"^(dintra)_(\d+)$|^(dinter)_(\d+)_(\d+)$")

# horizons long enough for |y - x*| <= 1e-3 from y0 in [-5, 5]
_BUILTIN_HORIZONS = {"two-layer": 100.0, "four-layer": 300.0, "multiplex-2x5": 60.0}


class ManifestError(ValueError):
    pass


def parse_scale_key(key):
    """``"dinter_1_3"`` -> ``("inter", (0, 2))``; ``"dintra_2"`` -> ``("intra", 1)``."""
    m = _SCALE_KEY.match(key)
    if not m:
        raise ManifestError(f"bad scale key {key!r}; expected dintra_<h> or dinter_<h>_<k>")
    if m.group(1):
        return "intra", int(m.group(2)) - 1
    h, k = int(m.group(4)) - 1, int(m.group(5)) - 1
    if h == k:
        raise ManifestError(f"scale key {key!r} names the same layer twice")
    return "inter", (min(h, k), max(h, k))


@dataclass
class ExperimentManifest:
    network: object = "two-layer"
    scales: dict = field(default_factory=dict)
    cost: dict = field(default_factory=lambda: {"family": "quadratic"})
    integrator: dict = field(default_factory=dict)
    epsilon: float = None
    sweep: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    seed: int = 0
    base_dir: str = None  # resolves relative paths; not serialized

    _FIELDS = ("network", "scales", "cost", "integrator", "epsilon", "sweep", "outputs", "seed")

    @classmethod
    def from_dict(cls, data, base_dir=None):
        unknown = set(data) - set(cls._FIELDS)
        if unknown:
            raise ManifestError(f"unknown manifest fields: {sorted(unknown)}")
        m = cls(**{k: copy.deepcopy(v) for k, v in data.items()}, base_dir=base_dir)
        m.validate()
        return m

    @classmethod
    def load(cls, path):
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ManifestError(f"{path}: invalid JSON: {exc}") from exc
        return cls.from_dict(data, base_dir=str(path.parent))

    def to_dict(self):
        return {k: copy.deepcopy(getattr(self, k)) for k in self._FIELDS}

    def dumps(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n"

    def validate(self):
        if isinstance(self.network, str):
            if self.network not in BUILTIN_NAMES:
                raise ManifestError(f"unknown builtin network {self.network!r}")
        elif not (isinstance(self.network, dict) and "file" in self.network):
            raise ManifestError("network must be a builtin name or {\"file\": path}")
        for key in list(self.scales) + list(self.sweep):
            parse_scale_key(key)
        for key, values in self.sweep.items():
            if not isinstance(values, list) or not values:
                raise ManifestError(f"sweep grid for {key} must be a non-empty list")
        unknown = set(self.integrator) - set(DEFAULT_INTEGRATOR)
        if unknown:
            raise ManifestError(f"unknown integrator settings: {sorted(unknown)}")
        unknown = set(self.outputs) - set(DEFAULT_OUTPUTS)
        if unknown:
            raise ManifestError(f"unknown output settings: {sorted(unknown)}")
        if self.epsilon is not None and not self.epsilon > 0:
            raise ManifestError(f"epsilon must be positive, got {self.epsilon}")
        if not isinstance(self.seed, int):
            raise ManifestError(f"seed must be an integer, got {self.seed!r}")

    def with_point(self, point):
        """Copy with the sweep removed and ``point`` merged into ``scales``."""
        m = copy.deepcopy(self)
        m.sweep = {}
        m.scales = {**m.scales, **{k: float(v) for k, v in point.items()}}
        return m

    def settings(self):
        return {**DEFAULT_INTEGRATOR, **self.integrator}

    def output_settings(self):
        return {**DEFAULT_OUTPUTS, **self.outputs}

    def grid(self):
        keys = list(self.sweep)
        return keys, [dict(zip(keys, combo)) for combo in itertools.product(*self.sweep.values())]


def builtin_manifest(name, **overrides):
    """Manifest reproducing one of the builtin consensus experiments."""
    if name not in BUILTIN_NAMES:
        raise ManifestError(f"unknown builtin network {name!r}")
    data = {
        "network": name,
        "integrator": {"t_end": _BUILTIN_HORIZONS[name]},
        "seed": 0,
    }
    if name == "four-layer":
        data["scales"] = {
            f"dinter_{h + 1}_{k + 1}": {"value": d, "assumed": True}
            for (h, k), d in ASSUMED_FOUR_LAYER_SCALES.items()
        }
    data.update(overrides)
    return ExperimentManifest.from_dict(data)


def _scale_value(v):
    return float(v["value"]) if isinstance(v, dict) else float(v)


def _resolve_path(manifest, p):
    p = Path(p)
    if not p.is_absolute() and manifest.base_dir is not None:
        p = Path(manifest.base_dir) / p
    return p


def _network_and_gamma(manifest):
    if isinstance(manifest.network, str):
        net, gamma = build_paper_networks(manifest.network), {}
    else:
        net, gamma = read_network(_resolve_path(manifest, manifest.network["file"]))
    intra, inter = {}, {}
    for key, v in manifest.scales.items():
        kind, idx = parse_scale_key(key)
        if kind == "intra":
            if not 0 <= idx < net.n_layers:
                raise ManifestError(f"scale {key}: network has {net.n_layers} layers")
            intra[idx] = _scale_value(v)
        else:
            if not idx[1] < net.n_layers:
                raise ManifestError(f"scale {key}: network has {net.n_layers} layers")
            inter[idx] = _scale_value(v)
    return net.with_scales(intra, inter), gamma


def _make_cost(manifest, net, file_gamma):
    spec = dict(manifest.cost)
    n = net.n_total
    if "gamma" in spec:
        gamma = np.asarray(spec["gamma"], dtype=float)
        if gamma.shape != (n,):
            raise ManifestError(f"cost.gamma has {gamma.size} values, network has {n} node-layer pairs")
        return QuadraticCost(gamma)
    if file_gamma and spec.get("family", "quadratic") == "quadratic" and "seed" not in spec:
        return QuadraticCost.from_mapping(net, file_gamma)
    seed = spec.get("seed", manifest.seed)
    return make_cost(spec.get("family", "quadratic"), n, [seed, 0])


def prepare(manifest):
    """Resolve a manifest into ``(net, laplacian, cost, initial_state, epsilon, x_star)``."""
    net, file_gamma = _network_and_gamma(manifest)
    lap = build_laplacian(net)
    cost = _make_cost(manifest, net, file_gamma)
    rng = np.random.default_rng([manifest.seed, 1])
    s0 = FlowState(rng.uniform(-5.0, 5.0, net.n_total), np.zeros(net.n_total))
    x_star = optimum(cost)
    eps = manifest.epsilon if manifest.epsilon is not None else consensus_epsilon(x_star)
    return net, lap, cost, s0, eps, x_star


def _output_dir(manifest, output_dir=None):
    if output_dir is not None:
        return Path(output_dir)
    env = os.environ.get(OUTPUT_DIR_ENV)
    if env:
        return Path(env)
    d = manifest.output_settings()["dir"]
    return None if d is None else _resolve_path(manifest, d)


def _write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def run_experiment(manifest, output_dir=None, write=True):
    """Integrate the saddle flow described by ``manifest``.

    Writes the trajectory CSV, the consensus report and the resolved
    manifest when an output directory is configured (argument, environment
    variable ``MLSADDLE_OUTPUT_DIR`` or ``outputs.dir``, in that order).

    Returns
    -------
    (Trajectory, ConsensusReport)
    """
    net, lap, cost, s0, eps, x_star = prepare(manifest)
    if not is_connected(net):
        warnings.warn("supra graph is disconnected; consensus is not expected", RuntimeWarning)
    cfg = manifest.settings()
    traj = integrate_saddle(lap, cost, s0, cfg["t_end"], dt=cfg["dt"], method=cfg["method"],
                            sample_every=cfg["sample_every"], rtol=cfg["rtol"], atol=cfg["atol"])
    traj.meta.update({"x_star": x_star, "epsilon": eps, "seed": manifest.seed})
    report = detect_consensus(traj, eps)

    out = _output_dir(manifest, output_dir) if write else None
    if out is not None:
        names = manifest.output_settings()
        _write(out / names["trajectory"], traj.to_csv())
        _write(out / names["report"], report.to_text())
        _write(out / names["manifest"], manifest.dumps())
    return traj, report


@dataclass
class SweepRow:
    point: dict
    t_consensus: float
    consensus_value: float
    reached: bool
    lambda2: float
    error: str = None


@dataclass
class SweepResult:
    parameters: list
    rows: list
    trajectories: list = None

    def to_csv(self):
        def fmt(v):
            return "" if v is None else repr(float(v))
        lines = [",".join(self.parameters + ["t_consensus", "consensus_value", "reached", "lambda2", "error"])]
        for r in self.rows:
            fields = [fmt(r.point[p]) for p in self.parameters]
            fields += [fmt(r.t_consensus), fmt(r.consensus_value), str(r.reached).lower(),
                       fmt(r.lambda2), (r.error or "").replace(",", ";").replace("\n", " ")]
            lines.append(",".join(fields))
        return "\n".join(lines) + "\n"

    @property
    def t_consensus(self):
        return np.array([np.nan if r.t_consensus is None else r.t_consensus for r in self.rows])


def _run_point(args):
    manifest, point, traj_path = args
    m = manifest.with_point(point)
    try:
        lam2 = algebraic_connectivity(build_laplacian(_network_and_gamma(m)[0]))
    except Exception as exc:  # recorded in the row
        return SweepRow(point, None, None, False, None, f"{type(exc).__name__}: {exc}"), None
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            traj, report = run_experiment(m, write=False)
    except Exception as exc:
        return SweepRow(point, None, None, False, lam2, f"{type(exc).__name__}: {exc}"), None
    if traj_path is not None:
        _write(traj_path, traj.to_csv())
    return SweepRow(point, report.t_consensus, report.consensus_value, report.reached, lam2), traj


def run_sweep(manifest, output_dir=None, workers=1, keep_trajectories=False):
    """Run :func:`run_experiment` once per grid point of ``manifest.sweep``.

    Rows follow grid order (last parameter varies fastest). A failing point
    is recorded in its row and the sweep continues.
    """
    keys, points = manifest.grid()
    if not points or not keys:
        raise ManifestError("manifest has an empty sweep grid")
    out = _output_dir(manifest, output_dir)
    names = manifest.output_settings()
    traj_paths = [
        out / f"sweep_point_{k:03d}.csv" if (out is not None and names["sweep_trajectories"]) else None
        for k in range(len(points))
    ]
    jobs = [(manifest, p, tp) for p, tp in zip(points, traj_paths)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_point, jobs))
    else:
        results = [_run_point(j) for j in jobs]
    rows = [r for r, _ in results]
    result = SweepResult(keys, rows, [t for _, t in results] if keep_trajectories else None)
    if out is not None:
        _write(out / names["sweep"], result.to_csv())
        _write(out / names["manifest"], manifest.dumps())
    return result
