"""Residual-form objectives over axis weights.

Every application objective is a sum of terms, each exposing a residual
vector r(theta) and its Jacobian; the energy of a term is
weight * ||r||^2, and a composite concatenates sqrt(weight)-scaled
residuals so least-squares solvers consume the sum directly.
"""

import numpy as np

from .errors import ArityError, SizeMismatch
from .gradients import curve_point_jacobian, word_jacobian
from .interp import evaluate_curve, layout_word


class WordPipeline:
    """Shared layout/Jacobian evaluation for one word, memoized on theta.

    Energy terms built over the same pipeline reuse a single layout and
    word Jacobian per solver iterate.
    """

    def __init__(self, font, glyph_ids):
        self.font = font
        self.glyph_ids = list(glyph_ids)
        self.n = font.n_axes
        self.l = len(self.glyph_ids)
        self.dim = self.n * self.l
        self._layout_key = None
        self._layout = None
        self._jac_key = None
        self._jac = None

    def layout(self, theta):
        key = np.asarray(theta, dtype=np.float64).tobytes()
        if key != self._layout_key:
            self._layout = layout_word(self.font, self.glyph_ids, theta)
            self._layout_key = key
        return self._layout

    def jacobian(self, theta):
        key = np.asarray(theta, dtype=np.float64).tobytes()
        if key != self._jac_key:
            self._jac = word_jacobian(self.font, self.glyph_ids, theta)
            self._jac_key = key
        return self._jac

    def curve_point(self, theta, segment, t):
        return evaluate_curve(self.layout(theta), segment, t)

    def curve_point_jacobian(self, theta, segment, t):
        layout = self.layout(theta)
        return curve_point_jacobian(self.jacobian(theta), layout.segments, segment, t)


class EnergyTerm:
    """One residual block: r(theta), J(theta), and a scalar weight."""

    def __init__(self, name, residual_fn, jacobian_fn, weight=1.0, refresh_fn=None):
        if weight < 0:
            raise ValueError("weight must be nonnegative")
        self.name = name
        self._residual_fn = residual_fn
        self._jacobian_fn = jacobian_fn
        self.weight = float(weight)
        self._refresh_fn = refresh_fn

    def residual(self, theta):
        return np.atleast_1d(np.asarray(self._residual_fn(theta), dtype=np.float64))

    def jacobian(self, theta):
        return np.atleast_2d(np.asarray(self._jacobian_fn(theta), dtype=np.float64))

    def value(self, theta):
        r = self.residual(theta)
        return self.weight * float(r @ r)

    def refresh(self, theta):
        """Rebuild any state that depends on theta (e.g. contact sets)."""
        if self._refresh_fn is not None:
            self._refresh_fn(theta)


class CompositeEnergy:
    """Ordered sum of terms; residuals concatenate in declaration order."""

    def __init__(self, terms):
        self.terms = list(terms)

    def residual(self, theta):
        parts = [np.sqrt(t.weight) * t.residual(theta) for t in self.terms]
        return np.concatenate(parts) if parts else np.zeros(0)

    def jacobian(self, theta):
        parts = [np.sqrt(t.weight) * t.jacobian(theta) for t in self.terms]
        return np.vstack(parts) if parts else np.zeros((0, 1))

    def value(self, theta):
        return sum(t.value(theta) for t in self.terms)

    def refresh(self, theta):
        for t in self.terms:
            t.refresh(theta)


def drag_energy(pipeline, handle, target, theta_prev, lam=1e-2):
    """Pull the curve point at a picked handle toward a target position,
    with a Tikhonov pull toward the previous weights."""
    segment, t = handle
    target = np.asarray(target, dtype=np.float64)
    theta_prev = np.asarray(theta_prev, dtype=np.float64).reshape(-1)
    sqrt_lam = np.sqrt(lam)

    def residual(theta):
        theta = np.asarray(theta, dtype=np.float64).reshape(-1)
        p = pipeline.curve_point(theta, segment, t)
        parts = [p - target]
        if lam > 0:
            parts.append(sqrt_lam * (theta - theta_prev))
        return np.concatenate(parts)

    def jacobian(theta):
        theta = np.asarray(theta, dtype=np.float64).reshape(-1)
        jp = pipeline.curve_point_jacobian(theta, segment, t)
        if lam > 0:
            return np.vstack([jp, sqrt_lam * np.eye(pipeline.dim)])
        return jp

    return EnergyTerm("drag", residual, jacobian)


_CONSTRAINT_MIN_HANDLES = {"pin": 1, "same_x": 2, "same_y": 2, "collinear": 3}


def constraint_energy(pipeline, kind, handles, targets=None, weight=1.0):
    """Extra least-squares terms: pin points, share a coordinate, or keep
    sample triples collinear (cross products scaled by 1/upem to stay
    commensurate with point distances)."""
    if kind not in _CONSTRAINT_MIN_HANDLES:
        raise ArityError(f"unknown constraint kind {kind!r}")
    if len(handles) < _CONSTRAINT_MIN_HANDLES[kind]:
        raise ArityError(
            f"{kind} needs >= {_CONSTRAINT_MIN_HANDLES[kind]} handles, "
            f"got {len(handles)}"
        )
    if kind == "pin":
        if targets is None or len(targets) != len(handles):
            raise ArityError("pin needs one target per handle")
        targets = [np.asarray(t, dtype=np.float64) for t in targets]
    upem = pipeline.font.units_per_em

    def points_and_rows(theta):
        theta = np.asarray(theta, dtype=np.float64).reshape(-1)
        pts = [pipeline.curve_point(theta, s, t) for s, t in handles]
        rows = [pipeline.curve_point_jacobian(theta, s, t) for s, t in handles]
        return pts, rows

    def residual(theta):
        pts, _ = points_and_rows(theta)
        if kind == "pin":
            return np.concatenate([p - x0 for p, x0 in zip(pts, targets)])
        if kind == "same_x":
            return np.array([pts[i][0] - pts[i + 1][0] for i in range(len(pts) - 1)])
        if kind == "same_y":
            return np.array([pts[i][1] - pts[i + 1][1] for i in range(len(pts) - 1)])
        out = []
        for i in range(len(pts) - 2):
            a, b, c = pts[i], pts[i + 1], pts[i + 2]
            ab = b - a
            ac = c - a
            out.append((ab[0] * ac[1] - ab[1] * ac[0]) / upem)
        return np.array(out)

    def jacobian(theta):
        pts, rows = points_and_rows(theta)
        if kind == "pin":
            return np.vstack(rows)
        if kind == "same_x":
            return np.vstack(
                [rows[i][0] - rows[i + 1][0] for i in range(len(pts) - 1)]
            )
        if kind == "same_y":
            return np.vstack(
                [rows[i][1] - rows[i + 1][1] for i in range(len(pts) - 1)]
            )
        out = []
        for i in range(len(pts) - 2):
            a, b, c = pts[i], pts[i + 1], pts[i + 2]
            ja, jb, jc = rows[i], rows[i + 1], rows[i + 2]
            # d/dtheta [(b-a) x (c-a)]
            dab = jb - ja
            dac = jc - ja
            ab = b - a
            ac = c - a
            row = (dab[0] * ac[1] + ab[0] * dac[1] - dab[1] * ac[0] - ab[1] * dac[0])
            out.append(row / upem)
        return np.vstack(out)

    return EnergyTerm(f"constraint:{kind}", residual, jacobian, weight=weight)


def collision_energy(pipeline, detector=None, contacts=None, weight=1.0):
    """Unilateral penetration penalty over a contact set.

    Contacts come either from a frozen set or from a detector called on
    refresh (solvers re-detect between iterations, since the set depends
    on theta). Residual per contact: max(0, -N . (p(theta, t) - b)), i.e.
    only penetrating samples contribute.
    """
    state = {"contacts": list(contacts) if contacts is not None else []}

    def refresh(theta):
        if detector is not None:
            theta = np.asarray(theta, dtype=np.float64).reshape(-1)
            state["contacts"] = list(detector(pipeline.layout(theta)))

    def residual(theta):
        theta = np.asarray(theta, dtype=np.float64).reshape(-1)
        cs = state["contacts"]
        out = np.zeros(len(cs))
        for i, c in enumerate(cs):
            p = pipeline.curve_point(theta, c.segment, c.t)
            out[i] = max(0.0, -float(c.normal @ (p - c.closest)))
        return out

    def jacobian(theta):
        theta = np.asarray(theta, dtype=np.float64).reshape(-1)
        cs = state["contacts"]
        out = np.zeros((len(cs), pipeline.dim))
        for i, c in enumerate(cs):
            p = pipeline.curve_point(theta, c.segment, c.t)
            if -float(c.normal @ (p - c.closest)) > 0.0:
                jp = pipeline.curve_point_jacobian(theta, c.segment, c.t)
                out[i] = -c.normal @ jp
        return out

    term = EnergyTerm("collision", residual, jacobian, weight=weight, refresh_fn=refresh)
    term.contacts = lambda: list(state["contacts"])
    return term


def elastic_energy(theta_rest, stiffness=1.0):
    """Pull toward a rest configuration: r = sqrt(stiffness) (theta - rest)."""
    if stiffness < 0:
        raise ValueError("stiffness must be >= 0")
    rest = np.asarray(theta_rest, dtype=np.float64).reshape(-1)
    s = np.sqrt(stiffness)

    def residual(theta):
        return s * (np.asarray(theta, dtype=np.float64).reshape(-1) - rest)

    def jacobian(theta):
        return s * np.eye(rest.size)

    return EnergyTerm("elastic", residual, jacobian)


def kinetic_energy(theta_m, mass=1.0):
    """Drive toward the momentum-predicted state: r = sqrt(mass) (theta - theta_m)."""
    if mass <= 0:
        raise ValueError("mass must be > 0")
    target = np.asarray(theta_m, dtype=np.float64).reshape(-1)
    s = np.sqrt(mass)

    def residual(theta):
        return s * (np.asarray(theta, dtype=np.float64).reshape(-1) - target)

    def jacobian(theta):
        return s * np.eye(target.size)

    return EnergyTerm("kinetic", residual, jacobian)


def image_energy(pipeline, target, config):
    """Match the soft rasterization of the word to a target image."""
    from .raster import image_residual_jacobian, rasterize

    if target.values.shape != (config.height, config.width):
        raise SizeMismatch(
            f"target {target.values.shape} vs config "
            f"({config.height}, {config.width})"
        )
    flat_target = target.values.reshape(-1)

    def residual(theta):
        theta = np.asarray(theta, dtype=np.float64).reshape(-1)
        img = rasterize(pipeline.layout(theta), config)
        return img.values.reshape(-1) - flat_target

    def jacobian(theta):
        theta = np.asarray(theta, dtype=np.float64).reshape(-1)
        layout = pipeline.layout(theta)
        img = rasterize(layout, config, with_gradients=True)
        return image_residual_jacobian(layout, pipeline.jacobian(theta), config, img)

    return EnergyTerm("image", residual, jacobian)
