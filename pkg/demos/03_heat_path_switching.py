# Heat-path switching: one layout, two Hall fields.
#
# The anisotropic part of the material is shared, but the Hall field can take
# two values (a for mode 1, a' for mode 2, e.g. by reversing a magnetic
# field). The objective asks mode 1 to keep the left square p cold and mode 2
# to keep the right square p' cold.
from hallfmo.mesh import Region
from hallfmo.objectives import region_integral
from hallfmo.optimizer import OptimizerConfig, optimize
from hallfmo.problems import SWITCHING_PARAMS, default_mesh, heat_load

mesh = default_mesh(32, "switching")
res = optimize("switching", mesh, SWITCHING_PARAMS, OptimizerConfig(), heat_load(mesh))
print(f"{res.status} after {res.iterations} iterations, J = {res.objectives[-1]:.4f}")

T, T_prime = res.temperatures
for label, field in (("mode 1", T), ("mode 2", T_prime)):
    ip = region_integral(field, mesh, Region.PROTECT)
    ipp = region_integral(field, mesh, Region.PROTECT_PRIME)
    cold = "p" if ip < ipp else "p'"
    print(f"{label}: I_p = {ip:.4f}, I_p' = {ipp:.4f}  -> {cold} is colder")

print(f"mean a = {res.design.a.mean():+.3f}, mean a' = {res.design.a_prime.mean():+.3f}")
