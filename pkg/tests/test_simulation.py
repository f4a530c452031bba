"""Timestepping: prediction, energy balance, collisions, scripts."""

import numpy as np
import pytest

from varfont.collision import ColliderScene, detect_contacts
from varfont.energies import WordPipeline
from varfont.simulation import SimScript, SimState, predict, run, step


@pytest.fixture
def pipe(fix1):
    return WordPipeline(fix1, [1])


def make_script(**kw):
    defaults = dict(dt=0.1, steps=5, stiffness=1.0, mass=1.0)
    defaults.update(kw)
    return SimScript(**defaults)


# ---------------------------------------------------------------- predict


def test_predict_zero_velocity():
    state = SimState(theta=np.array([0.2]), velocity=np.array([0.0]))
    theta_m, _ = predict(state, 0.1)
    assert theta_m.tolist() == [0.2]


def test_predict_arithmetic():
    state = SimState(theta=np.zeros(3), velocity=np.full(3, 0.5))
    theta_m, _ = predict(state, 0.1)
    assert np.allclose(theta_m, 0.05)


def test_predict_clamps():
    state = SimState(theta=np.array([0.9]), velocity=np.array([5.0]))
    theta_m, _ = predict(state, 0.1)
    assert theta_m.tolist() == [1.0]


def test_predict_applies_impulses():
    state = SimState(theta=np.zeros(1), velocity=np.zeros(1))
    theta_m, v = predict(state, 0.5, impulses=[np.array([0.4])])
    assert np.allclose(theta_m, 0.2)
    assert np.allclose(v, 0.4)


# ------------------------------------------------------------------- step


def test_fixed_point_invariance(pipe):
    script = make_script(rest_keys=[(0.0, np.array([0.3]))])
    state = SimState(theta=np.array([0.3]), velocity=np.zeros(1))
    out = step(state, script, pipe)
    assert abs(out.theta[0] - 0.3) < 1e-10
    assert abs(out.velocity[0]) < 1e-9


def test_zero_stiffness_pure_momentum(pipe):
    script = make_script(stiffness=0.0)
    state = SimState(theta=np.array([0.2]), velocity=np.array([1.0]))
    out = step(state, script, pipe)
    assert abs(out.theta[0] - 0.3) < 1e-10  # theta_m exactly


def test_one_d_closed_form(pipe):
    a, mass, dt = 2.0, 1.5, 0.25
    b = mass / dt**2
    rest, theta0, v0 = 0.8, 0.1, 0.4
    script = make_script(dt=dt, stiffness=a, mass=mass,
                         rest_keys=[(0.0, np.array([rest]))])
    state = SimState(theta=np.array([theta0]), velocity=np.array([v0]))
    out = step(state, script, pipe)
    theta_m = theta0 + dt * v0
    expect = (a * rest + b * theta_m) / (a + b)
    assert abs(out.theta[0] - expect) < 1e-10


def test_velocity_consistency(pipe):
    script = make_script(rest_keys=[(0.0, np.array([0.9]))])
    state = SimState(theta=np.array([0.0]), velocity=np.array([0.0]))
    out = step(state, script, pipe)
    assert out.velocity[0] * script.dt == pytest.approx(
        out.theta[0] - 0.0, abs=1e-15
    )


def test_bounds_feasibility(pipe):
    script = make_script(stiffness=0.0)
    state = SimState(theta=np.array([0.9]), velocity=np.array([10.0]))
    out = step(state, script, pipe)
    assert out.theta[0] <= 1.0


# -------------------------------------------------------------------- run


def test_run_zero_steps(pipe):
    script = make_script(steps=0)
    state = SimState(theta=np.array([0.4]), velocity=np.zeros(1))
    traj = run(script, state, pipe)
    assert len(traj) == 1
    assert traj[0].theta.tolist() == [0.4]


def test_run_constant_rest_all_frames_identical(pipe):
    script = make_script(steps=6, rest_keys=[(0.0, np.array([0.25]))])
    state = SimState(theta=np.array([0.25]), velocity=np.zeros(1))
    traj = run(script, state, pipe)
    assert len(traj) == 7
    for st in traj:
        assert abs(st.theta[0] - 0.25) < 1e-9


def test_run_reports_frame_callback(pipe):
    script = make_script(steps=3, rest_keys=[(0.0, np.array([0.0]))])
    seen = []
    run(script, SimState(np.zeros(1), np.zeros(1)), pipe,
        on_frame=lambda i, st: seen.append(i))
    assert seen == [0, 1, 2, 3]


def test_drop_scenario_penetration_bounded(fix1):
    # the rectangle glyph is pushed toward a floor; with the contact energy
    # active, no frame ends meaningfully inside the collider
    pipe = WordPipeline(fix1, [1])
    # weight growth widens the rectangle toward the right wall at x=420
    scene = ColliderScene(walls=[((420.0, -100.0), (420.0, 900.0))])
    # wall direction up: free space on its left (x < 420)
    script = SimScript(
        dt=0.1, steps=20, stiffness=0.2, mass=1.0,
        rest_keys=[(0.0, np.array([0.0]))],
        impulses=[(0.0, np.array([3.0]))],  # kick toward heavy weights
        scene=scene,
    )
    state = SimState(theta=np.zeros(1), velocity=np.zeros(1))
    worst = 0.0
    def on_frame(i, st):
        nonlocal worst
        contacts = detect_contacts(pipe.layout(st.theta), scene, 8)
        depth = max((c.penetration for c in contacts), default=0.0)
        worst = max(worst, depth)
    run(script, state, pipe, on_frame=on_frame)
    assert worst < 0.5


def test_keyframed_rest_switches(pipe):
    script = make_script(
        steps=2,
        stiffness=50.0,
        rest_keys=[(0.0, np.array([0.0])), (0.15, np.array([0.5]))],
    )
    state = SimState(theta=np.zeros(1), velocity=np.zeros(1))
    traj = run(script, state, pipe)
    # second step (t = 0.1 -> 0.2) uses the 0.15 keyframe? piecewise
    # constant: rest at t=0.1 is still 0.0, at t=0.2... step index 1 covers
    # [0.1, 0.2): rest(0.1) = 0.0; only later steps see 0.5
    assert abs(traj[1].theta[0]) < 1e-6
    script2 = make_script(
        steps=3, stiffness=50.0,
        rest_keys=[(0.0, np.array([0.0])), (0.15, np.array([0.5]))],
    )
    traj2 = run(script2, SimState(np.zeros(1), np.zeros(1)), pipe)
    assert traj2[3].theta[0] > 0.1  # rest 0.5 took effect from step 2


# ------------------------------------------------------------ script file


def test_script_from_text():
    text = """
    dt 0.1
    steps 12
    stiffness 2.5
    mass 0.5
    rest 0 0.1
    rest 1.0 0.9
    impulse 0.35 -0.2
    wall 0 0 100 0
    pairwise off
    """
    script = SimScript.from_text(text, dim=1)
    assert script.dt == 0.1
    assert script.steps == 12
    assert script.stiffness == 2.5
    assert len(script.rest_keys) == 2
    assert len(script.impulses) == 1
    assert len(script.scene.walls) == 1


def test_script_requires_dt_and_steps():
    with pytest.raises(ValueError):
        SimScript.from_text("stiffness 1.0\n", dim=1)


def test_script_rejects_wrong_arity():
    with pytest.raises(ValueError):
        SimScript.from_text("dt 0.1\nsteps 1\nrest 0 0.1 0.2\n", dim=1)


def test_script_rest_keys_sorted():
    with pytest.raises(ValueError):
        SimScript(dt=0.1, steps=1, rest_keys=[(1.0, np.zeros(1)), (0.0, np.zeros(1))])
