"""Empirical constants for the dissipation bound.

The bound holds with C1 = 33 and C2 = 1/24. On a finite grid much smaller
C1 and larger C2 already suffice; this prints the bisected values and the
quadruple that binds. These are grid facts, not proofs.

    python3 demos/sharp_constants.py [points]
"""

import sys

from shockstab import FluxModel
from shockstab.verify import GridSpec, estimate_sharp_constants

points = int(sys.argv[1]) if len(sys.argv) > 1 else 15

for model in (FluxModel.burgers(), FluxModel.quartic(1.0, 3.0), FluxModel.cosh()):
    sc = estimate_sharp_constants(GridSpec(model, points=points))
    print(f"{model.kind:8s} C1_min={sc.C1_min:.3f} at {sc.C1_witness}")
    print(f"{'':8s} C2_max={sc.C2_max:.4f} at {sc.C2_witness}")

# downward jumps only: C1 plays no role and C2 can go past 1/12
sc = estimate_sharp_constants(GridSpec(FluxModel.burgers(), points=points, case="case2"))
print(f"\nburgers, u_- > u_+ only: C2_max={sc.C2_max:.4f} (1/12 = {1 / 12:.4f}); {'; '.join(sc.notes)}")
