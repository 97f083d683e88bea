# Checking the adjoint gradient against finite differences.
#
# One forward and one adjoint solve give dJ/dphi for every nodal design value.
# Here a handful of entries are compared with central differences on a small
# mesh with a random design.
import numpy as np

from hallfmo.material import DesignFields, MaterialParams
from hallfmo.mesh import Region, RegionSpec
from hallfmo.problems import build_problem_mesh, heat_load
from hallfmo.sensitivity import evaluate

params = MaterialParams()
mesh = build_problem_mesh(8, regions=(
    RegionSpec(0.25, 0.125, 0.75, 0.375, Region.PROTECT),
    RegionSpec(0.375, 0.375, 0.625, 0.625, Region.HEAT),
))
load = heat_load(mesh)
rng = np.random.default_rng(0)
design = DesignFields(*rng.uniform(-0.8, 0.8, size=(4, mesh.n_nodes)))

ev = evaluate("temp-min", mesh, design, params, load)
print(f"J = {float(ev.objective):.6f}")

delta = 1e-6
for name in design.names:
    G = ev.gradients[name]
    node = int(np.argmax(np.abs(G)))
    vals = []
    for sign in (1, -1):
        f = design.fields()
        f[name] = f[name].copy()
        f[name][node] += sign * delta
        vals.append(float(evaluate("temp-min", mesh, DesignFields(**f), params, load,
                                   with_gradient=False).objective))
    fd = (vals[0] - vals[1]) / (2 * delta)
    print(f"{name:>4} node {node:3d}: adjoint {G[node]:+.8e}  fd {fd:+.8e}  rel err {abs(fd - G[node]) / abs(G[node]):.1e}")
