"""Physics-driven kinetic typography in axis-weight space.

Each timestep minimizes elastic + kinetic + collision energies with the
damped least-squares solver (a global linear solve is not available since
contact projection is nonlinear). The kinetic term weights the momentum
target by mass/dt^2, the implicit-Euler variational weighting, so changing
dt behaves like a standard incremental-potential integrator.
"""

from dataclasses import dataclass, field

import numpy as np

from .collision import ColliderScene, detect_contacts
from .energies import (
    CompositeEnergy,
    collision_energy,
    elastic_energy,
    kinetic_energy,
)
from .interp import clamp_weights
from .solvers import SolverConfig, solve_lm


@dataclass
class SimState:
    theta: np.ndarray  # flat (n*l,)
    velocity: np.ndarray  # same shape, per second
    time: float = 0.0

    def copy(self):
        return SimState(self.theta.copy(), self.velocity.copy(), self.time)


@dataclass
class SimScript:
    dt: float
    steps: int
    stiffness: float = 1.0
    mass: float = 1.0
    rest_keys: list = field(default_factory=list)  # (time, theta flat) sorted
    impulses: list = field(default_factory=list)  # (time, dvel flat)
    scene: ColliderScene = field(default_factory=ColliderScene)
    density: int = 8
    solver: SolverConfig = field(
        default_factory=lambda: SolverConfig(max_iterations=60)
    )

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be > 0")
        times = [t for t, _ in self.rest_keys]
        if times != sorted(times):
            raise ValueError("rest keyframe times must be non-decreasing")

    def rest_at(self, time, default):
        """Piecewise-constant rest target: last keyframe at or before t."""
        current = default
        for key_time, value in self.rest_keys:
            if key_time <= time + 1e-12:
                current = value
            else:
                break
        return np.asarray(current, dtype=np.float64)

    def impulses_in(self, t0, t1):
        """Velocity impulses scheduled in [t0, t1)."""
        out = []
        for when, dv in self.impulses:
            if t0 - 1e-12 <= when < t1 - 1e-12:
                out.append(np.asarray(dv, dtype=np.float64))
        return out

    @classmethod
    def from_text(cls, text, dim):
        """Script file: `dt`, `steps`, `stiffness`, `mass`, `density`,
        `rest t v1 ... vdim`, `impulse t dv1 ... dvdim`, plus embedded
        collider lines (wall/poly/pairwise)."""
        kwargs = {"dt": None, "steps": None}
        rest = []
        impulses = []
        scene_lines = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            kind = parts[0]
            if kind in ("wall", "poly", "pairwise"):
                scene_lines.append(line)
            elif kind in ("dt", "stiffness", "mass"):
                kwargs[kind] = float(parts[1])
            elif kind in ("steps", "density"):
                kwargs[kind] = int(parts[1])
            elif kind == "rest":
                values = [float(v) for v in parts[1:]]
                if len(values) != dim + 1:
                    raise ValueError(f"line {lineno}: rest needs time + {dim} values")
                rest.append((values[0], np.array(values[1:])))
            elif kind == "impulse":
                values = [float(v) for v in parts[1:]]
                if len(values) != dim + 1:
                    raise ValueError(
                        f"line {lineno}: impulse needs time + {dim} values"
                    )
                impulses.append((values[0], np.array(values[1:])))
            else:
                raise ValueError(f"line {lineno}: unknown record {kind!r}")
        if kwargs["dt"] is None or kwargs["steps"] is None:
            raise ValueError("script must set dt and steps")
        scene = ColliderScene.from_text("\n".join(scene_lines))
        return cls(scene=scene, rest_keys=rest, impulses=impulses, **kwargs)


def predict(state, dt, impulses=()):
    """Momentum-predicted weights: clamp(theta + dt * (v + sum impulses))."""
    v = state.velocity.copy()
    for dv in impulses:
        v = v + dv
    theta_m, _ = clamp_weights(state.theta + dt * v)
    return theta_m, v


def step(state, script, pipeline, t_index=None):
    """Advance one timestep; returns the new SimState."""
    t0 = state.time if t_index is None else t_index * script.dt
    impulses = script.impulses_in(t0, t0 + script.dt)
    theta_m, v_used = predict(state, script.dt, impulses)
    rest = script.rest_at(t0, default=state.theta)
    terms = [
        elastic_energy(rest, script.stiffness),
        kinetic_energy(theta_m, script.mass / script.dt**2),
    ]
    if not script.scene.is_empty():
        terms.append(
            collision_energy(
                pipeline,
                detector=lambda layout: detect_contacts(
                    layout, script.scene, script.density
                ),
            )
        )
    energy = CompositeEnergy(terms)
    result = solve_lm(energy, state.theta, script.solver)
    theta_new = result.theta
    velocity = (theta_new - state.theta) / script.dt
    return SimState(theta=theta_new, velocity=velocity, time=t0 + script.dt)


def run(script, initial, pipeline, on_frame=None):
    """Run the whole script; returns the trajectory including the initial
    state. on_frame(index, state) is called for every produced frame."""
    trajectory = [initial.copy()]
    state = initial.copy()
    if on_frame is not None:
        on_frame(0, state)
    for i in range(script.steps):
        try:
            state = step(state, script, pipeline, t_index=i)
        except Exception as exc:
            raise type(exc)(f"frame {i + 1}: {exc}") from exc
        trajectory.append(state.copy())
        if on_frame is not None:
            on_frame(i + 1, state)
    return trajectory
