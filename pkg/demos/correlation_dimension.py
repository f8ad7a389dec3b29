"""
Correlation dimension of simulated increments
=============================================

Gaussian increments fill whatever embedding space they are put in, so the
estimated dimension should track the embedding dimension m.
"""
import numpy as np

from mpslab import chaos

walk = chaos.simulate_bachelier(714, 0.0, 0.5, 20001, 1.0, seed=5)
b = walk.b_increments()

for m in (1, 2, 3):
    pts = chaos.embed(b, m)
    curve = chaos.correlation_integral(pts, chaos.EmbeddingConfig(m))
    nu, window = chaos.estimate_dimension(curve)
    print(f"m = {m}: {len(pts)} points, nu = {nu:.3f}, fit window {window}")

# uniform noise behaves the same way
u = chaos.Lcg64(12345).uniform(20000)
curve = chaos.correlation_integral(chaos.embed(u, 2), chaos.EmbeddingConfig(2))
print("uniform, m = 2: nu = %.3f" % chaos.estimate_dimension(curve)[0])
print("ln C at the smallest radius:", np.log(curve.C[curve.C > 0][0]))
