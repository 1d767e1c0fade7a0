"""How tight is the drift estimate for a misplaced shock?

The reference shock sits at 0 but the data has it at x = a. The shift path
starts at 0, travels along the characteristic of u = 1 and attaches to the
real shock at t = a. So the drift has h' = 1 on [0, a] and the energy is a,
while the initial mismatch is a strip of width a and height 2.

With c = 1/24, M = alpha = 1 and u_ell - u_r = 2 the lhs is a/12 and the
rhs is 4a: the ratio is 1/48 for every a. The estimate is never saturated
in this family, and the constant is what keeps it loose, not the shift.

    python3 demos/drift_saturation.py
"""

from shockstab import parse_config, run_scenario


def shifted(a):
    return parse_config({
        "id": f"shifted_{a}",
        "flux": {"name": "burgers"},
        "initial": {"breakpoints": [a], "values": [1.0, -1.0]},
        "T": 2.0,
        "shock": {"u_ell": 1.0, "u_r": -1.0},
        "times": [0.5, 1.0, 2.0],
        "windows": [5.0],
    })


print(f"{'a':>6} {'energy(T)':>10} {'lhs/rhs':>10} {'min margin':>11}")
for a in (0.01, 0.1, 0.5, 1.0):
    rep = run_scenario(shifted(a))
    print(f"{a:6.2f} {rep.drift_energy[-1]:10.4f} {rep.drift_saturation:10.6f} {min(rep.drift_margins):11.6f}")
print(f"\n1/48 = {1 / 48:.6f}")
