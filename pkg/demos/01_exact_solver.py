"""
Smallest supports under a residual budget
=========================================

A redundant dictionary usually offers many ways to approximate a data
vector.  The solver below finds, for a tolerance tau, the fewest atoms
whose span passes within tau of the data, together with the first such
atom subset in index order.
"""

import numpy as np

from l0geom import Dictionary, L0Solver, NormSpec, solve_l0

# Four atoms in the plane: the two axes, the diagonal, and a slight tilt.
dictionary = Dictionary.from_vectors(
    [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [3.0, 1.0]]
)

d = np.array([0.9, 0.8])
print(f"data vector: {d}")
print()

# Loosening the budget lets fewer atoms do the job.  For tiny tau only a
# two-atom combination reaches d; once tau exceeds the distance from d to
# the diagonal atom's line, a single atom suffices; and for tau beyond
# the norm of d itself, the empty combination (the origin) is feasible.
for tau in (0.01, 0.1, 1.25):
    result = solve_l0(dictionary, NormSpec.l2(), d, tau)
    print(f"tau = {tau:<5}  value = {result.value}  support = {result.support}")
    print(f"             coefficients = {np.round(result.coefficients, 6)}")
    print(f"             residual = {result.residual:.6f}")
print()

# The residual norm is a modelling choice.  A max-coordinate budget costs
# each coordinate separately, so the same data at the same tau can need a
# different number of atoms than under the Euclidean budget.
solver_l2 = L0Solver(dictionary, NormSpec.l2())
solver_linf = L0Solver(dictionary, NormSpec.linf())
tricky = np.array([0.08, -0.08])
for name, solver in (("l2  ", solver_l2), ("linf", solver_linf)):
    result = solver.solve(tricky, 0.1)
    print(f"{name} budget 0.1 on {tricky}: value = {result.value}")
print()

# Ties go to the earliest subset in index order.  Atoms 0 and 3 are not
# parallel, but both lines pass within tau of this vector; the solver
# reports atom 0, never atom 3.
near_axis = np.array([1.0, 0.05])
result = solver_l2.solve(near_axis, 0.1)
print(f"near-axis vector {near_axis}: support = {result.support} (first wins)")
