"""Run configuration: JSON schema, validation, and defaults.

A config file is a single JSON object.  Minimal example::

    {"model": "infinite_well"}

Full schema (unknown keys are rejected)::

    {
      "schema": "ghalab-config/1",              # optional, checked if present
      "model": "poschl_teller",                 # required; one of
                                                #   poschl_teller | infinite_well
                                                #   | harmonic_oscillator | quon
                                                #   | pseudo_boson_power
      "lambda": 2.0,                            # poschl_teller only, >= 1
      "q": 0.5,                                 # quon only, in (0, 1]
      "k": 1,                                   # pseudo_boson_power only, >= 1
      "deformation": {
        "kind": "rational_pt" | "tanh_shift" | "inverse_cosine" | "diagonal_sigma",
        "alpha": 2.0, "k0": 1,                  # inverse_cosine parameters
        "sigma": "rational",                    # diagonal_sigma named form, or
        "sigma_samples": [1.5, 1.66, ...]       # explicit sigma(1..N) samples
      },
      "truncation": {"n_levels": 64, "margin": 8},
      "grid": {"x_min": 0.0, "x_max": 3.14159, "n_points": 2000},
      "n_max": 20,                              # family depth (default: fills the interior)
      "tolerances": {"algebra": 1e-10, "eigen": 1e-3, "quadrature": 1e-8,
                     "biorthogonality": 1e-8, "similarity": 1e-9,
                     "grid_algebra": 1e-6},
      "seed": 1234,
      "outputs": ["report", "spectrum", "potential"]
    }
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .discretize import Grid, default_grid
from .errors import ParseError, ValidationError
from .models import (
    ModelSpec,
    SimilarityRecipe,
    diagonal_rational_recipe,
    diagonal_sigma_recipe,
    inverse_cosine_recipe,
    rational_pt_recipe,
    tanh_shift_recipe,
)

__all__ = ["RunConfig", "DEFAULT_TOLERANCES", "parse_config", "config_from_dict"]

CONFIG_SCHEMA = "ghalab-config/1"

DEFAULT_TOLERANCES = {
    "algebra": 1e-10,
    "eigen": 1e-3,
    "quadrature": 1e-8,
    "biorthogonality": 1e-8,
    "similarity": 1e-9,
    "grid_algebra": 1e-6,
}

_MODEL_NAMES = (
    "poschl_teller",
    "infinite_well",
    "harmonic_oscillator",
    "quon",
    "pseudo_boson_power",
)

_RECIPE_KEYS = {"kind", "alpha", "k0", "sigma", "sigma_samples"}
_TOP_KEYS = {
    "schema",
    "model",
    "lambda",
    "q",
    "k",
    "deformation",
    "truncation",
    "grid",
    "n_max",
    "tolerances",
    "seed",
    "outputs",
}
_OUTPUT_NAMES = {"report", "spectrum", "potential"}


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration with all defaults filled in."""

    model: ModelSpec
    n_levels: int
    margin: int
    grid: Grid
    n_max: int
    tolerances: dict
    seed: int
    outputs: tuple
    echo: dict = field(repr=False, default_factory=dict)

    @property
    def interior_dim(self) -> int:
        return self.n_levels - self.margin


def _build_recipe(raw: dict, problems: list) -> SimilarityRecipe | None:
    unknown = set(raw) - _RECIPE_KEYS
    if unknown:
        problems.append(f"deformation: unknown keys {sorted(unknown)}")
        return None
    kind = raw.get("kind")
    try:
        if kind == "rational_pt":
            return rational_pt_recipe()
        if kind == "tanh_shift":
            return tanh_shift_recipe()
        if kind == "inverse_cosine":
            return inverse_cosine_recipe(raw.get("alpha", 2.0), raw.get("k0", 1))
        if kind == "diagonal_sigma":
            if "sigma_samples" in raw:
                samples = np.asarray(raw["sigma_samples"], dtype=float)
                if samples.size == 0 or np.any(samples <= 0):
                    problems.append("deformation: sigma_samples must be positive")
                    return None
                lo, hi = float(samples.min()), float(samples.max())
                return diagonal_sigma_recipe(
                    lambda t, s=samples: s[np.minimum(t.astype(int) - 1, s.size - 1)],
                    (lo, hi),
                )
            name = raw.get("sigma", "rational")
            if name == "rational":
                return diagonal_rational_recipe()
            problems.append(f"deformation: unknown sigma form {name!r}")
            return None
        problems.append(f"deformation: unknown kind {kind!r}")
    except Exception as exc:  # recipe constructors validate their parameters
        problems.append(f"deformation: {exc}")
    return None


def config_from_dict(raw: dict) -> RunConfig:
    """Validate a parsed JSON object and fill defaults.

    Collects every violation before raising, so one round trip reports all
    problems in a config file.
    """
    if not isinstance(raw, dict):
        raise ValidationError("config must be a JSON object")
    problems: list[str] = []
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        problems.append(f"unknown keys {sorted(unknown)}")
    if "schema" in raw and raw["schema"] != CONFIG_SCHEMA:
        problems.append(f"schema must be {CONFIG_SCHEMA!r}, got {raw['schema']!r}")

    name = raw.get("model")
    if name not in _MODEL_NAMES:
        problems.append(f"model must be one of {_MODEL_NAMES}, got {name!r}")
        raise ValidationError("; ".join(problems))

    recipe = None
    if raw.get("deformation") is not None:
        if not isinstance(raw["deformation"], dict):
            problems.append("deformation must be an object")
        else:
            recipe = _build_recipe(raw["deformation"], problems)

    model = None
    try:
        model = ModelSpec(
            kind=name,
            lam=float(raw["lambda"]) if "lambda" in raw else (2.0 if name == "poschl_teller" else None),
            q=float(raw["q"]) if "q" in raw else (0.5 if name == "quon" else None),
            k=int(raw["k"]) if "k" in raw else (1 if name == "pseudo_boson_power" else None),
            deformation=recipe,
        )
    except Exception as exc:
        problems.append(str(exc))

    trunc = raw.get("truncation", {})
    if not isinstance(trunc, dict) or set(trunc) - {"n_levels", "margin"}:
        problems.append("truncation accepts only n_levels and margin")
        trunc = {}
    n_levels = int(trunc.get("n_levels", 64))
    margin = int(trunc.get("margin", 8))
    if n_levels <= margin or margin < 1:
        problems.append(f"need 1 <= margin < n_levels, got margin={margin}, n_levels={n_levels}")

    grid_raw = raw.get("grid", {})
    if not isinstance(grid_raw, dict) or set(grid_raw) - {"x_min", "x_max", "n_points"}:
        problems.append("grid accepts only x_min, x_max, n_points")
        grid_raw = {}
    n_points = int(grid_raw.get("n_points", 2000))
    grid = None
    try:
        if model is not None and model.interval is not None:
            base = default_grid(model, n_points)
            grid = Grid(
                float(grid_raw.get("x_min", base.x_min)),
                float(grid_raw.get("x_max", base.x_max)),
                n_points,
            )
        else:
            grid = Grid(
                float(grid_raw.get("x_min", 0.0)),
                float(grid_raw.get("x_max", math.pi)),
                n_points,
            )
    except Exception as exc:
        problems.append(f"grid: {exc}")

    tol = dict(DEFAULT_TOLERANCES)
    tol_raw = raw.get("tolerances", {})
    if not isinstance(tol_raw, dict) or set(tol_raw) - set(DEFAULT_TOLERANCES):
        problems.append(f"tolerances accepts only {sorted(DEFAULT_TOLERANCES)}")
    else:
        tol.update({k: float(v) for k, v in tol_raw.items()})
    if any(v <= 0 for v in tol.values()):
        problems.append("all tolerances must be positive")

    n_max_default = min(n_levels - margin - 1, 20)
    n_max = int(raw.get("n_max", n_max_default))
    if n_max < 0 or n_max + margin > n_levels:
        problems.append(f"n_max must satisfy 0 <= n_max <= n_levels - margin = {n_levels - margin}")

    seed = int(raw.get("seed", 1234))
    outputs = tuple(raw.get("outputs", ("report",)))
    bad_outputs = set(outputs) - _OUTPUT_NAMES
    if bad_outputs:
        problems.append(f"unknown outputs {sorted(bad_outputs)}")

    if problems:
        raise ValidationError("; ".join(problems))
    echo = {
        "schema": CONFIG_SCHEMA,
        "model": name,
        **({"lambda": model.lam} if model.lam is not None else {}),
        **({"q": model.q} if model.q is not None else {}),
        **({"k": model.k} if model.k is not None else {}),
        **({"deformation": dict(raw["deformation"])} if raw.get("deformation") else {}),
        "truncation": {"n_levels": n_levels, "margin": margin},
        "grid": {"x_min": grid.x_min, "x_max": grid.x_max, "n_points": grid.n_points},
        "n_max": n_max,
        "tolerances": tol,
        "seed": seed,
        "outputs": list(outputs),
    }
    return RunConfig(
        model=model,
        n_levels=n_levels,
        margin=margin,
        grid=grid,
        n_max=n_max,
        tolerances=tol,
        seed=seed,
        outputs=outputs,
        echo=echo,
    )


def parse_config(path) -> RunConfig:
    """Read and validate a JSON config file."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return config_from_dict(raw)
