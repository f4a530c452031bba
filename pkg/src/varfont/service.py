"""Interactive session service: HTTP for static assets plus a WebSocket
per session carrying JSON messages (one message per frame, newline-joined
batches accepted).

Every client message produces exactly one reply; malformed input produces
an error reply, never a dropped connection. State replies carry the full
outline geometry and the current weights in both normalized and design
units, so clients never do font math. See PROTOCOL.md for the schema.
"""

import itertools
import json
import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .collision import ColliderScene, detect_contacts, nearest_on_cubic
from .energies import (
    CompositeEnergy,
    WordPipeline,
    collision_energy,
    constraint_energy,
    drag_energy,
)
from .errors import MissingGlyph
from .interp import denormalize_axis, normalize_axis
from .parse import parse_font
from .simulation import SimScript, SimState, step as sim_step
from .solvers import SolverConfig, solve_lm

PICK_RADIUS_EM = 0.04
DRAG_ITERATIONS = 15
COLLISION_WEIGHT = 1e3  # contact resolution dominates the drag pull


@dataclass
class Session:
    id: str
    font_name: str
    font: object
    glyph_ids: list = field(default_factory=list)
    text: str = ""
    theta: np.ndarray = None
    theta_prev: np.ndarray = None
    constraints: dict = field(default_factory=dict)
    collision_on: bool = False
    scene: ColliderScene = field(default_factory=ColliderScene)
    lam: float = 1e-2
    solver: SolverConfig = field(
        default_factory=lambda: SolverConfig(max_iterations=DRAG_ITERATIONS)
    )
    pipeline: object = None
    sim_state: SimState = None
    lock: threading.Lock = field(default_factory=threading.Lock)
    cancel: threading.Event = field(default_factory=threading.Event)
    constraint_ids: itertools.count = field(default_factory=itertools.count)

    @property
    def dim(self):
        return len(self.glyph_ids) * self.font.n_axes

    def set_text(self, text):
        self.text = text
        self.glyph_ids = self.font.glyph_ids_for_text(text)
        self.pipeline = WordPipeline(self.font, self.glyph_ids)
        self.theta = np.zeros(self.dim)
        self.theta_prev = self.theta.copy()
        self.constraints.clear()
        self.sim_state = None


class ServiceCore:
    """Transport-independent message handling (shared by tests and ws)."""

    def __init__(self, fonts):
        self.fonts = dict(fonts)
        self.sessions = {}
        self._session_counter = itertools.count(1)

    # -- message plumbing ---------------------------------------------------

    def handle_text(self, text):
        """One raw frame -> list of reply strings (one per message line)."""
        replies = []
        for line in text.split("\n"):
            if not line.strip():
                continue
            replies.append(json.dumps(self.handle_line(line), sort_keys=True))
        if not replies:
            replies.append(
                json.dumps(_error(None, "empty message"), sort_keys=True)
            )
        return replies

    def handle_line(self, line):
        try:
            msg = json.loads(line)
        except json.JSONDecodeError as exc:
            return _error(None, f"bad json: {exc.msg}")
        if not isinstance(msg, dict):
            return _error(None, "message must be a JSON object")
        mtype = msg.get("type")
        session_id = msg.get("session")
        payload = msg.get("payload") or {}
        if not isinstance(payload, dict):
            return _error(session_id, "payload must be an object")
        if mtype == "load_font":
            return self.load_font(payload)
        session = self.sessions.get(session_id)
        if session is None:
            return _error(session_id, f"unknown session {session_id!r}")
        handler = getattr(self, f"msg_{mtype}", None)
        if handler is None:
            return _error(session_id, f"unknown message type {mtype!r}")
        if mtype == "drag":
            session.cancel.set()  # preempt any in-flight solve
        with session.lock:
            if mtype == "drag":
                session.cancel.clear()
            try:
                return handler(session, payload)
            except MissingGlyph as exc:
                return _error(session_id, str(exc))
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                return _error(session_id, f"{type(exc).__name__}: {exc}")

    # -- handlers -----------------------------------------------------------

    def load_font(self, payload):
        name = payload.get("font")
        if name not in self.fonts:
            return _error(None, f"unknown font {name!r}; have {sorted(self.fonts)}")
        sid = f"s{next(self._session_counter)}"
        session = Session(id=sid, font_name=name, font=self.fonts[name])
        self.sessions[sid] = session
        return {
            "type": "session",
            "session": sid,
            "payload": {
                "font": name,
                "units_per_em": session.font.units_per_em,
                "axes": _axes_meta(session.font),
            },
        }

    def msg_set_text(self, session, payload):
        session.set_text(str(payload.get("text", "")))
        if not session.glyph_ids:
            return _error(session.id, "text produced no glyphs")
        return self._state(session)

    def msg_set_axes(self, session, payload):
        _need_layout(session)
        axes = payload.get("axes", {})
        glyph = payload.get("glyph")  # None = all glyphs
        theta = session.theta.reshape(len(session.glyph_ids), session.font.n_axes)
        targets = range(len(session.glyph_ids)) if glyph is None else [int(glyph)]
        for tag, design_value in axes.items():
            idx = session.font.axis_index(tag)
            w = normalize_axis(session.font.axes[idx], float(design_value))
            for j in targets:
                theta[j, idx] = w
        session.theta = theta.reshape(-1)
        session.theta_prev = session.theta.copy()
        return self._state(session)

    def msg_pick(self, session, payload):
        _need_layout(session)
        cursor = np.array([float(payload["x"]), float(payload["y"])])
        layout = session.pipeline.layout(session.theta)
        best = None
        for seg_index, quad in enumerate(layout.segments):
            controls = layout.points[list(quad)]
            if np.allclose(controls, controls[0]):
                continue
            t, closest, _ = nearest_on_cubic(cursor, controls)
            d = float(np.linalg.norm(closest - cursor))
            if best is None or d < best[0]:
                best = (d, seg_index, t)
        radius = PICK_RADIUS_EM * session.font.units_per_em
        if best is None or best[0] > radius:
            return {
                "type": "pick",
                "session": session.id,
                "payload": {"found": False, "reason": "NoHandle"},
            }
        d, seg, t = best
        return {
            "type": "pick",
            "session": session.id,
            "payload": {"found": True, "segment": seg, "t": t, "distance": d},
        }

    def msg_drag(self, session, payload):
        _need_layout(session)
        segment = int(payload["segment"])
        t = float(payload["t"])
        target = np.array([float(v) for v in payload["target"]])
        terms = [
            drag_energy(
                session.pipeline,
                (segment, t),
                target,
                theta_prev=session.theta_prev,
                lam=session.lam,
            )
        ]
        terms.extend(self._constraint_terms(session))
        if session.collision_on and not session.scene.is_empty():
            terms.append(
                collision_energy(
                    session.pipeline,
                    detector=lambda layout: detect_contacts(layout, session.scene),
                    weight=COLLISION_WEIGHT,
                )
            )
        result = solve_lm(
            CompositeEnergy(terms),
            session.theta,
            session.solver,
            should_stop=session.cancel.is_set,
        )
        if result.reason == "cancelled":
            return _error(session.id, "drag cancelled by a newer drag")
        session.theta = result.theta
        session.theta_prev = result.theta.copy()
        return self._state(session, extra={"solver": result.reason,
                                           "iterations": result.iterations,
                                           "energy": result.energy})

    def _constraint_terms(self, session):
        terms = []
        for kind, handles, targets, weight in session.constraints.values():
            terms.append(
                constraint_energy(
                    session.pipeline, kind, handles, targets, weight=weight
                )
            )
        return terms

    def msg_add_constraint(self, session, payload):
        _need_layout(session)
        kind = payload["kind"]
        handles = [(int(s), float(t)) for s, t in payload["handles"]]
        targets = payload.get("targets")
        if targets is not None:
            targets = [np.array([float(x), float(y)]) for x, y in targets]
        weight = float(payload.get("weight", 1.0))
        constraint_energy(session.pipeline, kind, handles, targets, weight=weight)
        cid = next(session.constraint_ids)
        session.constraints[cid] = (kind, handles, targets, weight)
        return {
            "type": "constraint",
            "session": session.id,
            "payload": {"id": cid, "kind": kind},
        }

    def msg_remove_constraint(self, session, payload):
        cid = int(payload["id"])
        if cid not in session.constraints:
            return _error(session.id, f"no constraint {cid}")
        del session.constraints[cid]
        return {
            "type": "constraint",
            "session": session.id,
            "payload": {"id": cid, "removed": True},
        }

    def msg_set_collision(self, session, payload):
        session.collision_on = bool(payload.get("on", False))
        scene_text = payload.get("scene")
        if scene_text is not None:
            session.scene = ColliderScene.from_text(scene_text)
        return {
            "type": "collision",
            "session": session.id,
            "payload": {
                "on": session.collision_on,
                "walls": len(session.scene.walls),
                "polygons": len(session.scene.polygons),
            },
        }

    def msg_step_sim(self, session, payload):
        _need_layout(session)
        script = SimScript.from_text(payload["script"], session.dim)
        if session.sim_state is None or payload.get("reset"):
            session.sim_state = SimState(
                theta=session.theta.copy(), velocity=np.zeros(session.dim)
            )
        session.sim_state = sim_step(
            session.sim_state, script, session.pipeline
        )
        session.theta = session.sim_state.theta.copy()
        session.theta_prev = session.theta.copy()
        return self._state(
            session, extra={"time": session.sim_state.time,
                            "velocity": session.sim_state.velocity.tolist()}
        )

    def msg_state(self, session, payload):
        _need_layout(session)
        return self._state(session)

    def _state(self, session, extra=None):
        font = session.font
        layout = session.pipeline.layout(session.theta)
        theta = session.theta.reshape(len(session.glyph_ids), font.n_axes)
        design = [
            [
                denormalize_axis(font.axes[i], float(theta[j, i]))
                for i in range(font.n_axes)
            ]
            for j in range(len(session.glyph_ids))
        ]
        glyphs = []
        seg_base = 0
        for j, inst in enumerate(layout.instances):
            sl = layout.glyph_slices[j]
            glyphs.append(
                {
                    "glyph_id": session.glyph_ids[j],
                    "offset": layout.offsets[j].tolist(),
                    "points": layout.points[sl].tolist(),
                    "contours": [list(c) for c in inst.contours],
                    "segments": [list(s) for s in inst.segments],
                    "segment_base": seg_base,
                }
            )
            seg_base += len(inst.segments)
        payload = {
            "text": session.text,
            "units_per_em": font.units_per_em,
            "axes": _axes_meta(font),
            "theta": theta.tolist(),
            "theta_design": design,
            "glyphs": glyphs,
            "advance": layout.advance,
            "collision": session.collision_on,
            "constraints": [
                {"id": cid, "kind": kind, "handles": [list(h) for h in handles]}
                for cid, (kind, handles, _t, _w) in session.constraints.items()
            ],
        }
        if extra:
            payload.update(extra)
        return {"type": "state", "session": session.id, "payload": payload}


def _need_layout(session):
    if not session.glyph_ids:
        raise ValueError("set_text first")


def _axes_meta(font):
    return [
        {
            "tag": a.tag,
            "min": a.s_min,
            "default": a.s_default,
            "max": a.s_max,
        }
        for a in font.axes
    ]


def _error(session_id, message):
    return {
        "type": "error",
        "session": session_id,
        "payload": {"message": message},
    }


def create_app(fonts, static_dir=None):
    """FastAPI app exposing /ws and optional static assets at /."""
    from fastapi import FastAPI, WebSocket, WebSocketDisconnect
    from fastapi.responses import HTMLResponse

    core = ServiceCore(fonts)
    app = FastAPI(title="varfont service")
    app.state.core = core

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket):
        await websocket.accept()
        try:
            while True:
                text = await websocket.receive_text()
                for reply in core.handle_text(text):
                    await websocket.send_text(reply)
        except WebSocketDisconnect:
            pass

    static = Path(static_dir) if static_dir else None
    if static and static.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static), html=True), name="static")
    else:

        @app.get("/")
        async def index():
            names = ", ".join(sorted(core.fonts))
            return HTMLResponse(
                "<html><body><h1>varfont service</h1>"
                f"<p>fonts: {names}</p><p>WebSocket endpoint: /ws "
                "(see PROTOCOL.md)</p></body></html>"
            )

    return app


def serve(font_paths, host="127.0.0.1", port=8787, static_dir=None):
    """Blocking entry point for `varfont serve`."""
    import uvicorn

    fonts = {}
    for path in font_paths:
        p = Path(path)
        fonts[p.stem] = parse_font(p.read_bytes())
    if static_dir is None:
        candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        static_dir = candidate if candidate.is_dir() else None
    app = create_app(fonts, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")
