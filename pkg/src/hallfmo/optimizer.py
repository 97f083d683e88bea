"""Reaction-diffusion design update driven by adaptive-moment sensitivities.

Each design field ``phi`` evolves in fictitious time as
``d phi/dt = -L' + R^2 lap(phi)``, integrated implicitly:

    (M + dt R^2 K) phi_new = M (phi_old - dt L')

with ``L' = v / sqrt(s_m + eps)`` built from exponentially averaged first
and second moments of the adjoint gradient (no bias correction). Values are
clamped to [-1, 1] after every step.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .fem import Factorization, assemble_mass, assemble_update_system
from .material import DesignFields
from .objectives import PROBLEMS, SWITCHING
from .sensitivity import evaluate

log = logging.getLogger(__name__)

CONVERGED = "converged"
MAX_ITERS = "max_iters"


@dataclass(frozen=True)
class OptimizerConfig:
    beta1: float = 0.9
    beta2: float = 0.999
    eps_adam: float = 1e-8
    dt: float = 1e-2
    radius: float | None = None   # None: twice the element size
    max_iters: int = 1000
    tol: float = 1e-6
    solver_tol: float = 1e-10

    def __post_init__(self):
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ConfigurationError(f"moment decay rates must lie in [0, 1), got {self.beta1}, {self.beta2}")
        if not self.eps_adam > 0:
            raise ConfigurationError("eps_adam must be positive")
        if not self.dt > 0:
            raise ConfigurationError("dt must be positive")
        if self.radius is not None and self.radius < 0:
            raise ConfigurationError("radius must be non-negative")
        if not self.tol > 0:
            raise ConfigurationError("tol must be positive")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ConfigurationError("max_iters must be a positive integer")

    def radius_for(self, mesh):
        return 2.0 * mesh.h if self.radius is None else float(self.radius)


@dataclass(frozen=True)
class AdamState:
    v: dict
    s_m: dict
    iteration: int = 0

    @classmethod
    def zeros(cls, names, n_nodes):
        return cls({k: np.zeros(n_nodes) for k in names}, {k: np.zeros(n_nodes) for k in names})


def update_moments(state, G, config):
    """``v <- b1 v + (1-b1) G`` and ``s_m <- b2 s_m + (1-b2) G^2`` per field."""
    if set(G) != set(state.v):
        raise ConfigurationError(f"gradient fields {sorted(G)} do not match optimizer state {sorted(state.v)}")
    b1, b2 = config.beta1, config.beta2
    v = {k: b1 * state.v[k] + (1 - b1) * np.asarray(G[k]) for k in state.v}
    s_m = {k: b2 * state.s_m[k] + (1 - b2) * np.square(G[k]) for k in state.s_m}
    return AdamState(v, s_m, state.iteration + 1)


def design_sensitivity(state, config):
    return {k: state.v[k] / np.sqrt(state.s_m[k] + config.eps_adam) for k in state.v}


class ReactionDiffusionUpdate:
    """Factorized ``M + dt R^2 K`` reused for every field and iteration."""

    def __init__(self, mesh, dt, radius, tol=1e-10):
        self.dt = dt
        self.mass = assemble_mass(mesh)
        self._fac = Factorization(assemble_update_system(mesh, dt, radius), tol)

    def __call__(self, phi_old, sensitivity, clip=True):
        rhs = self.mass @ (np.asarray(phi_old, dtype=float) - self.dt * np.asarray(sensitivity, dtype=float))
        phi = self._fac.solve(rhs)
        return np.clip(phi, -1.0, 1.0) if clip else phi


def rd_step(mesh, phi_old, sensitivity, config, clip=True):
    """One implicit reaction-diffusion step of a single nodal field."""
    return ReactionDiffusionUpdate(mesh, config.dt, config.radius_for(mesh), config.solver_tol)(
        phi_old, sensitivity, clip)


def relative_change(history):
    prev, cur = float(history[-2]), float(history[-1])
    if prev == 0:
        return 0.0 if cur == 0 else math.inf
    return abs(cur - prev) / abs(prev)


def converged(history, tol=1e-6):
    """Stopping rule ``|J(t) - J(t-dt)| / |J(t-dt)| <= tol``; needs two entries.

    A zero previous value counts as converged only when the current one is
    zero too.
    """
    if len(history) < 2:
        return False
    return relative_change(history) <= tol


@dataclass
class IterationRecord:
    iteration: int
    objective: float
    terms: tuple
    max_change: float
    ratio: float


@dataclass
class OptimizationResult:
    design: DesignFields
    history: list                 # ObjectiveValue per iteration
    temperatures: list            # final [T] or [T, T']
    status: str
    records: list = field(default_factory=list)

    @property
    def objectives(self):
        return np.array([float(j) for j in self.history])

    @property
    def iterations(self):
        return len(self.history)


def optimize(kind, mesh, params, config, load, design=None, callback=None):
    """Minimize the ``kind`` objective over the design fields.

    ``load`` is the assembled heat-source vector. The initial design is
    all zeros unless ``design`` is given. Returns when the stopping rule
    holds or after ``config.max_iters`` objective evaluations; the latter is
    reported through ``status == "max_iters"``, not raised.
    """
    if kind not in PROBLEMS:
        raise ConfigurationError(f"unknown problem {kind!r}; expected one of {PROBLEMS}")
    if design is None:
        design = DesignFields.constant(mesh.n_nodes, a_prime=0.0 if kind == SWITCHING else None)
    else:
        design = design.copy()
    if kind == SWITCHING and design.a_prime is None:
        raise ConfigurationError("switching problem needs an a_prime design field")

    update = ReactionDiffusionUpdate(mesh, config.dt, config.radius_for(mesh), config.solver_tol)
    state = AdamState.zeros(design.names, mesh.n_nodes)
    history, records = [], []
    status = MAX_ITERS
    max_change = 0.0

    for it in range(config.max_iters):
        ev = evaluate(kind, mesh, design, params, load, config.solver_tol, with_gradient=True)
        history.append(ev.objective)
        ratio = relative_change(history) if len(history) > 1 else math.nan
        rec = IterationRecord(it, float(ev.objective), ev.objective.terms, max_change, ratio)
        records.append(rec)
        log.info("iter %4d  J=%.10e  max|dphi|=%.3e  ratio=%.3e", it, rec.objective, max_change, ratio)
        if callback is not None:
            callback(rec, design)
        if converged(history, config.tol):
            status = CONVERGED
            break
        if it == config.max_iters - 1:
            break

        state = update_moments(state, ev.gradients, config)
        sens = design_sensitivity(state, config)
        new = {name: update(phi, sens[name]) for name, phi in design.fields().items()}
        max_change = max(float(np.max(np.abs(new[k] - design.fields()[k]))) for k in new)
        design = DesignFields(**new)

    return OptimizationResult(design, history, ev.temperatures, status, records)
