import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shockstab.flux import FluxModel
from shockstab.fronttrack import (
    ENTROPIC_SHOCK,
    NON_ENTROPIC,
    PERSIST,
    RAREFACTION_PIECE,
    RESOLVE,
    EventCapExceeded,
    PiecewiseLinearPath,
    Profile,
    run,
    solve_riemann,
)

TWO_SHOCK = Profile([-1.0, 1.0], [2.0, 0.0, -2.0])


def test_riemann_shock(burgers):
    (f,) = solve_riemann(burgers, 2.0, 0.0, delta=0.3)
    assert (f.speed, f.kind) == (1.0, ENTROPIC_SHOCK)


def test_riemann_fan(burgers):
    fs = solve_riemann(burgers, 0.0, 1.0, delta=0.5)
    assert [(f.u_left, f.u_right, f.speed) for f in fs] == [(0.0, 0.5, 0.25), (0.5, 1.0, 0.75)]
    assert all(f.kind == RAREFACTION_PIECE for f in fs)


def test_riemann_fan_piece_count(burgers):
    assert len(solve_riemann(burgers, -1.0, 1.0, delta=0.1)) == 20
    assert len(solve_riemann(burgers, 0.0, 1.0, delta=0.3)) == 4


def test_riemann_non_entropic(burgers):
    (f,) = solve_riemann(burgers, -1.0, -0.5, admissible=False)
    assert f.kind == NON_ENTROPIC
    assert f.speed == -0.75


def test_riemann_trivial_and_errors(burgers):
    assert solve_riemann(burgers, 0.3, 0.3) == []
    with pytest.raises(ValueError):
        solve_riemann(burgers, 0.0, 1.0, delta=0.0)


def test_profile_validation():
    with pytest.raises(ValueError):
        Profile([1.0, 0.0], [0.0, 1.0, 2.0])
    with pytest.raises(ValueError):
        Profile([0.0], [1.0])
    p = Profile.canonical([0.0, 0.0, 1.0, 2.0], [1.0, 5.0, 2.0, 2.0, 3.0])
    assert p == Profile([0.0, 2.0], [1.0, 2.0, 3.0])


def test_profile_evaluation_and_integrals():
    p = Profile([0.0, 1.0], [1.0, -1.0, 2.0])
    assert p(0.0) == -1.0 and p(-0.1) == 1.0 and p(5.0) == 2.0
    assert p.mass(-1.0, 2.0) == 1.0 - 1.0 + 2.0
    assert Profile.constant(0.7).mass(-1.0, 3.0) == pytest.approx(2.8)


def test_two_shock_collision(burgers):
    sim = run(TWO_SHOCK, burgers, T=2.0)
    assert len(sim.fronts) == 3
    (ev,) = sim.events
    assert (ev.time, ev.position) == (1.0, 0.0)
    merged = sim.fronts[ev.outgoing[0]]
    assert (merged.u_left, merged.u_right, merged.speed) == (2.0, -2.0, 0.0)


def test_samples(burgers):
    sim = run(TWO_SHOCK, burgers, T=2.0)
    assert list(sim.sample(0.5).breakpoints) == [-0.5, 0.5]
    assert list(sim.sample(1.0).breakpoints) == [0.0]
    shock = run(Profile.step(1.0, -1.0), burgers, T=2.0)
    assert list(shock.sample(2.0).breakpoints) == [0.0]


def test_constant_initial_data(burgers):
    sim = run(Profile.constant(0.4), burgers, T=1.0)
    assert sim.fronts == () and sim.events == ()
    assert sim.sample(0.5) == Profile.constant(0.4)


def test_pure_shock_position(model):
    sim = run(Profile.step(1.5, -0.5), model, T=1.0)
    (f,) = sim.fronts
    assert f.position(1.0) == pytest.approx(model.shock_speed(1.5, -0.5))


def test_traces(burgers):
    shock = run(Profile.step(1.0, -1.0), burgers, T=1.0)
    assert shock.traces_along(PiecewiseLinearPath.affine(0.0, 0.0, 0.0, 1.0)) == [(0.0, 1.0, 1.0, -1.0)]
    assert shock.traces_along(PiecewiseLinearPath.affine(1.0, 0.0, 0.0, 1.0)) == [(0.0, 1.0, -1.0, -1.0)]
    sim = run(TWO_SHOCK, burgers, T=2.0)
    tr = sim.traces_along(PiecewiseLinearPath.affine(0.0, 0.0, 0.0, 2.0))
    assert [(c, d, a, b) for c, d, a, b in tr] == [(0.0, 1.0, 0.0, 0.0), (1.0, 2.0, 2.0, -2.0)]


def test_mass(burgers):
    assert Profile.constant(2.0).mass(-1.0, 3.0) == 8.0
    shock = run(Profile.step(1.0, -1.0), burgers, T=1.0)
    assert shock.mass(0.7, -2.0, 2.0) == 0.0
    sim = run(TWO_SHOCK, burgers, T=2.0)
    assert sim.mass(0.0, -5.0, 5.0) == sim.mass(2.0, -5.0, 5.0)


def test_persistent_non_entropic_front(burgers):
    sim = run(Profile([0.0, 1.0, 2.0], [1.0, -1.0, -0.5, -1.0]), burgers, PERSIST, T=1.0,
              admissible=[True, False, True])
    kinds = [f.kind for f in sim.fronts]
    assert kinds == [ENTROPIC_SHOCK, NON_ENTROPIC, ENTROPIC_SHOCK]
    assert [f.speed for f in sim.fronts[1:]] == [-0.75, -0.75]
    assert sim.events == ()


def test_non_entropic_front_resolved_at_collision(burgers):
    # the upward jump meets the shock at x=0 at t=4/3; the merged jump is downward
    sim = run(Profile([0.0, 1.0, 2.0], [1.0, -1.0, -0.5, -1.0]), burgers, RESOLVE, T=2.0,
              admissible=[True, False, True])
    assert sim.events[0].time == pytest.approx(4 / 3)
    born = [sim.fronts[i] for e in sim.events for i in e.outgoing]
    assert all(f.kind != NON_ENTROPIC for f in born)


def test_event_cap(burgers):
    with pytest.raises(EventCapExceeded):
        run(TWO_SHOCK, burgers, T=2.0, event_cap=0)


def test_bad_arguments(burgers):
    with pytest.raises(ValueError):
        run(TWO_SHOCK, burgers, policy="nope")
    with pytest.raises(ValueError):
        run(TWO_SHOCK, burgers, T=0.0)
    with pytest.raises(ValueError):
        run(TWO_SHOCK, burgers, admissible=[True])


def test_epoch_lookup_rejects_outside_times(burgers):
    sim = run(TWO_SHOCK, burgers, T=2.0)
    with pytest.raises(ValueError):
        sim.sample(2.5)


def test_path_restrict_and_validation():
    p = PiecewiseLinearPath([0.0, 1.0, 2.0], [0.0, 1.0, 0.0])
    r = p.restrict(0.5, 1.5)
    assert list(r.times) == [0.5, 1.0, 1.5] and list(r.positions) == [0.5, 1.0, 0.5]
    assert p.lipschitz() == 1.0
    with pytest.raises(ValueError):
        PiecewiseLinearPath([0.0, 0.0], [1.0, 2.0])


profiles = st.integers(1, 6).flatmap(lambda n: st.tuples(
    st.lists(st.floats(-3, 3, allow_nan=False), min_size=n, max_size=n, unique=True),
    st.lists(st.floats(-2, 2, allow_nan=False), min_size=n + 1, max_size=n + 1),
    st.lists(st.booleans(), min_size=n, max_size=n),
))


@settings(max_examples=60, deadline=None)
@given(data=profiles, kind=st.sampled_from(["burgers", "quartic", "cosh"]),
       policy=st.sampled_from([PERSIST, RESOLVE]), delta=st.sampled_from([0.1, 0.25]))
def test_engine_invariants(data, kind, policy, delta):
    bps, vals, adm = data
    order = np.argsort(bps)
    vals = [v for v in vals]
    bps = sorted(bps)
    adm = [adm[k] for k in order]
    if any(a == b for a, b in zip(vals, vals[1:])):
        return
    m = FluxModel(kind, {"a": 1.0, "b": 3.0} if kind == "quartic" else {})
    prof = Profile(bps, vals)
    sim = run(prof, m, policy, delta, T=1.5, admissible=adm)
    lo, hi = prof.value_range()
    for f in sim.fronts:
        assert abs(f.rh_residual(m)) <= 1e-12 * max(1.0, abs(m.f(f.u_left)))
        assert lo <= f.u_left <= hi and lo <= f.u_right <= hi
        if f.kind == ENTROPIC_SHOCK:
            assert f.u_left > f.u_right
        else:
            assert f.u_left < f.u_right
        if f.kind == RAREFACTION_PIECE:
            assert f.u_right - f.u_left <= delta + 1e-12
    for ev in sim.events:
        ins = [sim.fronts[i] for i in ev.incoming]
        outs = [sim.fronts[i] for i in ev.outgoing]
        if outs:
            assert outs[0].u_left == ins[0].u_left and outs[-1].u_right == ins[-1].u_right
        else:
            assert ins[0].u_left == ins[-1].u_right
        if policy == RESOLVE:
            assert all(f.kind != NON_ENTROPIC for f in outs)
    for ep in sim.epochs:
        for t in (ep.t0, 0.5 * (ep.t0 + ep.t1)):
            xs = [f.position(t) for f in ep.fronts]
            assert all(a <= b + 1e-9 for a, b in zip(xs, xs[1:]))
    for t in (0.3, 1.0, 1.5):
        assert sim.mass_defect(t) <= 1e-10
    again = run(prof, m, policy, delta, T=1.5, admissible=adm)
    assert again.fronts == sim.fronts and again.events == sim.events


def test_mass_defect_balance_law(burgers):
    # tails 1.5 and -1 have different flux, so mass flows in at rate f(1.5) - f(-1)
    sim = run(Profile([-1.0, 0.0], [1.5, 1.0, -1.0]), burgers, T=1.0)
    L = sim.reach() + 1.0
    drift = sim.mass(1.0, -L, L) - sim.mass(0.0, -L, L)
    assert drift == pytest.approx(burgers.f(1.5) - burgers.f(-1.0), abs=1e-12)
    assert sim.mass_defect(1.0) <= 1e-12
    assert not math.isinf(sim.reach())
