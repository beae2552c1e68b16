"""Why random block targets can replace Laplacian eigenvectors.

The between-class Laplacian is constant on (class, subclass) blocks, so
its range is spanned by block indicator vectors orthogonal to the ones
vector. Orthonormalized random targets with that block structure span
exactly the same space, which the structural suite confirms numerically.

    python demos/oracle_check.py
"""
import numpy as np

from fastsda import LabelLayout, build_lb_single, make_targets, structural_checks

layout = LabelLayout.from_sizes([[3, 2], [4, 1], [2, 3]])
lb = build_lb_single(layout).lb
t = make_targets(layout, rng=np.random.default_rng(0))

np.set_printoptions(precision=3, suppress=True, linewidth=120)
print("targets (rows), one value per subclass block:")
print(t)
print(f"rank of L_b: {np.linalg.matrix_rank(lb)}, targets: {t.shape[0]}")
print(f"||L_b - T^T T L_b|| = {np.linalg.norm(lb - t.T @ t @ lb):.2e}")

print("\nfull suite on a two-view layout:")
mv = LabelLayout.from_sizes([[[2, 2], [3, 4]], [[1, 3], [4, 3]]])
for check in structural_checks(mv, rng=0):
    print(" ", check.line())
