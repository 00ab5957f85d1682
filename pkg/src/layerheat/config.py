"""JSON run configurations and the built-in examples.

A configuration is a JSON object::

    {
      "problem": {...} | "path/to/problem.json",
      "times": [0.01, 0.1, 1.0],
      "grid": 401,
      "method": "utm" | "fd" | "fourier",
      "compare_to": null | "utm" | "fd" | "fourier",
      "exclude_endpoints": null | true | false,
      "flux": true,
      "contour": {"theta_max": 12.0, "nodes": 2401, "radius": 1.0, "fixed_T": null},
      "fd": {"cells_per_layer": 200, "dt": 1e-4},
      "fourier": {"terms": 400},
      "threads": 1,
      "output": null
    }

and a problem is::

    {
      "breakpoints": [0, 0.5, 1],
      "sigmas": [1, 2],
      "interface": {"kind": "perfect"} | {"kind": "imperfect", "contact": [0.5]},
      "boundary": {"beta": [1, 0, 1, 0], "left": <signal>, "right": <signal>},
      "initial": <signal> | [<signal>, ...]
    }

Signals are numbers (constants) or objects such as
``{"type": "polynomial", "coeffs": [0, 0, 0, 1]}``,
``{"type": "cosine", "amplitude": 1, "frequency": 1}`` or
``{"type": "sampled", "points": [...], "values": [...]}``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

from .contour import DEFAULT_COUNT, DEFAULT_THETA_MAX
from .errors import InvalidProblem, UnknownExample
from .evaluate import ContourSettings
from .oracles import DEFAULT_CELLS, DEFAULT_DT, DEFAULT_TERMS
from .problem import (
    BoundarySpec,
    Constant,
    Cosine,
    InterfaceKind,
    InterfaceSpec,
    LayerStack,
    Polynomial,
    Problem,
    ValidatedProblem,
    evenly_spaced,
    signal_from_dict,
)

METHODS = ("utm", "fd", "fourier")


class ConfigError(ValueError):
    """The configuration could not be parsed."""


@dataclass(frozen=True)
class RunConfig:
    problem: Problem
    times: tuple = (0.1,)
    grid: int = 401
    method: str = "utm"
    compare_to: str | None = None
    exclude_endpoints: bool | None = None
    flux: bool = True
    theta_max: float = DEFAULT_THETA_MAX
    nodes: int = DEFAULT_COUNT
    radius: float = 1.0
    fixed_T: float | None = None
    cells_per_layer: int = DEFAULT_CELLS
    dt: float = DEFAULT_DT
    terms: int = DEFAULT_TERMS
    threads: int = 1
    output: str | None = None

    def contour_settings(self):
        return ContourSettings(theta_max=self.theta_max, count=self.nodes, radius=self.radius,
                               fixed_T=self.fixed_T, workers=self.threads)

    def check(self):
        """Raise :class:`InvalidProblem` for values outside the documented ranges."""
        bad = []
        if not self.times or any(t < 0 or not math.isfinite(t) for t in self.times):
            bad.append("times must be nonnegative and finite")
        if list(self.times) != sorted(self.times):
            bad.append("times must be sorted")
        if self.grid < 3:
            bad.append("grid must have at least 3 points")
        if self.method not in METHODS:
            bad.append(f"method must be one of {METHODS}")
        if self.compare_to is not None and self.compare_to not in METHODS:
            bad.append(f"compare_to must be one of {METHODS}")
        if self.threads < 1:
            bad.append("threads must be positive")
        if bad:
            raise InvalidProblem("; ".join(bad), bad)
        return self


# ---------------------------------------------------------------------------
# Problems <-> dicts
# ---------------------------------------------------------------------------

def _signal_dict(sig):
    return sig.to_dict()


def problem_to_dict(problem) -> dict:
    """JSON-ready dict; a validated problem is written in its original frame."""
    if isinstance(problem, ValidatedProblem):
        problem = problem.source if problem.source is not None else problem.to_problem()
    iface = {"kind": problem.interfaces.kind.value}
    if problem.interfaces.kind is InterfaceKind.IMPERFECT:
        iface["contact"] = list(problem.interfaces.contact_coeffs)
    return {
        "breakpoints": list(problem.layers.breakpoints),
        "sigmas": list(problem.layers.sigmas),
        "interface": iface,
        "boundary": {
            "beta": list(problem.boundary.beta),
            "left": _signal_dict(problem.boundary.f_left),
            "right": _signal_dict(problem.boundary.f_right),
        },
        "initial": [_signal_dict(ic) for ic in problem.initial],
    }


def problem_from_dict(d) -> Problem:
    try:
        iface = d.get("interface", {"kind": "perfect"})
        kind = InterfaceKind(iface.get("kind", "perfect"))
        spec = InterfaceSpec(kind, tuple(iface.get("contact", ())))
        bnd = d["boundary"]
        boundary = BoundarySpec(tuple(bnd["beta"]), signal_from_dict(bnd.get("left", 0.0)),
                                signal_from_dict(bnd.get("right", 0.0)))
        init = d["initial"]
        if isinstance(init, list):
            init = tuple(signal_from_dict(v) for v in init)
        else:
            init = signal_from_dict(init)
        return Problem(LayerStack(tuple(d["breakpoints"]), tuple(d["sigmas"])), spec, boundary, init)
    except InvalidProblem:
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ConfigError(f"malformed problem: {exc!r}") from exc


def config_to_dict(cfg: RunConfig) -> dict:
    return {
        "problem": problem_to_dict(cfg.problem),
        "times": list(cfg.times),
        "grid": cfg.grid,
        "method": cfg.method,
        "compare_to": cfg.compare_to,
        "exclude_endpoints": cfg.exclude_endpoints,
        "flux": cfg.flux,
        "contour": {"theta_max": cfg.theta_max, "nodes": cfg.nodes, "radius": cfg.radius,
                    "fixed_T": cfg.fixed_T},
        "fd": {"cells_per_layer": cfg.cells_per_layer, "dt": cfg.dt},
        "fourier": {"terms": cfg.terms},
        "threads": cfg.threads,
        "output": cfg.output,
    }


def config_from_dict(d, base_dir=None) -> RunConfig:
    if not isinstance(d, dict):
        raise ConfigError("configuration must be a JSON object")
    try:
        prob = d["problem"]
        if isinstance(prob, str):
            path = Path(prob)
            if base_dir is not None and not path.is_absolute():
                path = Path(base_dir) / path
            prob = _read_json(path)
        contour = d.get("contour", {})
        fd = d.get("fd", {})
        fourier = d.get("fourier", {})
        return RunConfig(
            problem=problem_from_dict(prob),
            times=tuple(float(t) for t in d.get("times", (0.1,))),
            grid=int(d.get("grid", 401)),
            method=str(d.get("method", "utm")),
            compare_to=d.get("compare_to"),
            exclude_endpoints=d.get("exclude_endpoints"),
            flux=bool(d.get("flux", True)),
            theta_max=float(contour.get("theta_max", DEFAULT_THETA_MAX)),
            nodes=int(contour.get("nodes", DEFAULT_COUNT)),
            radius=float(contour.get("radius", 1.0)),
            fixed_T=None if contour.get("fixed_T") is None else float(contour["fixed_T"]),
            cells_per_layer=int(fd.get("cells_per_layer", DEFAULT_CELLS)),
            dt=float(fd.get("dt", DEFAULT_DT)),
            terms=int(fourier.get("terms", DEFAULT_TERMS)),
            threads=int(d.get("threads", 1)),
            output=d.get("output"),
        )
    except (ConfigError, InvalidProblem):
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ConfigError(f"malformed configuration: {exc!r}") from exc


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc


def load_config(path) -> RunConfig:
    return config_from_dict(_read_json(path), Path(path).parent)


def dump_config(cfg: RunConfig, path):
    with open(path, "w") as fh:
        json.dump(config_to_dict(cfg), fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Built-in examples
# ---------------------------------------------------------------------------

DIRICHLET = (1.0, 0.0, 1.0, 0.0)
_ALTERNATING = tuple([1.0, math.sqrt(0.1)] * 5)


def _sine_stack(n):
    return tuple(math.sqrt(1.1 + math.sin(j)) for j in range(1, n + 2))


def example_problem(name, n=None) -> Problem:
    """The layered problems used throughout the documentation and tests.

    ``n`` overrides the number of interfaces for ``E`` and ``F``.
    """
    key = name.upper()
    if key in ("A", "A0"):
        right = 1.0 if key == "A" else 0.0
        return Problem(LayerStack(evenly_spaced(3), (1.0, 1.0, 1.0)), InterfaceSpec.perfect(),
                       BoundarySpec(DIRICHLET, Constant(0.0), Constant(right)),
                       Polynomial((0.0, 0.0, 0.0, 1.0)))
    if key == "B":
        return Problem(LayerStack(evenly_spaced(10), _ALTERNATING), InterfaceSpec.perfect(),
                       BoundarySpec(DIRICHLET, Constant(1.0), Constant(0.0)), Constant(0.0))
    if key == "C":
        sig = (math.sqrt(0.2), math.sqrt(0.01), math.sqrt(0.1), 1.0)
        return Problem(LayerStack(evenly_spaced(4), sig), InterfaceSpec.perfect(),
                       BoundarySpec((1.0, 0.0, 1.0, 1.0), Cosine(1.0, 1.0), Constant(0.0)),
                       Constant(1.0))
    if key == "D":
        return Problem(LayerStack(evenly_spaced(10), _ALTERNATING), InterfaceSpec.imperfect([0.5] * 9),
                       BoundarySpec((1.0, 0.0, 0.0, 1.0), Constant(1.0), Constant(0.0)),
                       Constant(0.0))
    if key == "E":
        n = 199 if n is None else n
        return Problem(LayerStack(evenly_spaced(n + 1), _sine_stack(n)), InterfaceSpec.perfect(),
                       BoundarySpec(DIRICHLET, Constant(0.5), Constant(0.0)), Constant(1.0))
    if key == "F":
        n = 199 if n is None else n
        return Problem(LayerStack(evenly_spaced(n + 1), _sine_stack(n)),
                       InterfaceSpec.imperfect([0.5] * n),
                       BoundarySpec((0.0, 1.0, 1.0, 0.0), Constant(0.0), Constant(0.0)),
                       Polynomial((0.0, 1.0)))
    raise UnknownExample(f"unknown example {name!r}; choose from {', '.join(EXAMPLES)}")


EXAMPLES = ("A", "A0", "B", "C", "D", "E", "F")

_EXAMPLE_RUNS = {
    "A": dict(times=(0.01, 0.1, 1.0), compare_to="fourier"),
    "A0": dict(times=(0.001, 0.01, 0.1), compare_to="fourier"),
    "B": dict(times=(0.02, 0.1, 0.5)),
    "C": dict(times=(0.1, 0.5, 1.0)),
    "D": dict(times=(0.02, 0.1, 0.5)),
    "E": dict(times=(0.02, 0.1, 0.5)),
    "F": dict(times=(0.02, 0.1, 0.5)),
}


def example_config(name, **overrides) -> RunConfig:
    key = name.upper()
    if key not in _EXAMPLE_RUNS:
        raise UnknownExample(f"unknown example {name!r}; choose from {', '.join(EXAMPLES)}")
    cfg = RunConfig(problem=example_problem(key), **_EXAMPLE_RUNS[key])
    return replace(cfg, **overrides) if overrides else cfg
