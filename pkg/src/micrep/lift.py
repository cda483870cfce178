"""Lifting mixed-integer Chvatal systems to mixed-integer linear systems.

Each step trades one ceiling for one fresh integer variable: an inequality
with positive ceiling count decomposes as ``gamma * ceil(g1) + g2 <= b``
and is replaced by ``g1 - z <= 0`` and ``g2 + gamma*z <= b`` with z
integral, which strictly lowers the total ceiling count and preserves the
projection onto the original variables.  Iterating to ceiling count zero
and reading off coefficients yields the MILP representation.
"""

from __future__ import annotations

from fractions import Fraction

from .systems import ChvatalIneq, MicSystem, MilpRow, MilpSystem
from .trees import Case2, Leaf, AffineForm, Sum, decompose, tree_as_affine
from .varpool import fresh_var


class NoCeilingError(ValueError):
    """reduce_one_ceiling needs a positive total ceiling count."""


def reduce_one_ceiling(system: MicSystem) -> MicSystem:
    """Replace the first ceiling-bearing inequality by its two-constraint
    lift with one fresh integer variable."""
    index = next((i for i, ineq in enumerate(system.inequalities) if ineq.cc > 0),
                 None)
    if index is None:
        raise NoCeilingError("system has total ceiling count 0")
    ineq = system.inequalities[index]
    split = decompose(ineq.lhs)
    assert isinstance(split, Case2)
    z = fresh_var("_z", taken=set(system.variables) | _tree_vars(system))
    lower = ChvatalIneq(Sum(Fraction(1), split.g1, Fraction(1),
                            Leaf(AffineForm.variable(z, -1))), Fraction(0))
    upper = ChvatalIneq(Sum(Fraction(1), split.g2, split.gamma,
                            Leaf(AffineForm.variable(z))), ineq.rhs)
    ineqs = (system.inequalities[:index] + (lower, upper)
             + system.inequalities[index + 1:])
    return MicSystem(system.continuous_vars, system.integer_vars + (z,), ineqs)


def _tree_vars(system: MicSystem) -> set[int]:
    out: set[int] = set()
    for ineq in system.inequalities:
        out |= ineq.lhs.variables()
    return out


def lift_to_milp(system: MicSystem) -> MilpSystem:
    """Apply ceiling reductions until none remain, then read off matrices.

    The number of added integer variables never exceeds the initial total
    ceiling count; the projection onto the input's variables is unchanged
    (certified against the brute-force oracle in the test suite).
    """
    current = system
    budget = system.total_ceiling_count
    steps = 0
    while current.total_ceiling_count > 0:
        before = current.total_ceiling_count
        current = reduce_one_ceiling(current)
        steps += 1
        if current.total_ceiling_count >= before:
            raise AssertionError("ceiling count failed to decrease")
        if steps > budget:
            raise AssertionError("more reductions than initial ceiling count")
    rows = []
    for ineq in current.inequalities:
        form = tree_as_affine(ineq.lhs)
        # f(x) <= b  <=>  -f(x) >= -b (constant folded by MilpRow).
        rows.append(MilpRow(-form, -ineq.rhs))
    fresh = tuple(v for v in current.integer_vars if v not in system.integer_vars)
    return MilpSystem(
        target_vars=system.continuous_vars,
        continuous_aux_vars=(),
        integer_aux_vars=system.integer_vars + fresh,
        rows=tuple(rows),
    )
