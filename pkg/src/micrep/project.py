"""Projections back to Chvatal form and sequential variable elimination.

`project_to_mic` eliminates the continuous auxiliaries of a MILP by exact
Fourier-Motzkin, runs the closure pipeline on the integer block to obtain
feasibility functions in fresh row parameters, then substitutes the affine
map ``b_i -> d_i - (kept-variable part)`` into every function, producing a
system of affine Chvatal inequalities over the kept variables only.

`eliminate_variable` is one step of the sequential scheme: lift the current
system to a MILP, then project out the chosen variable together with every
lift-created auxiliary.  Repeating it eliminates variables one at a time
while staying disjunction-free.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

from .closure import (ClosureOptions, DEFAULT_OPTIONS, FeasibilityFunctions,
                      _feasibility_functions)
from .fm import LinearSystem, eliminate_var
from .lift import lift_to_milp
from .systems import ChvatalIneq, MicSystem, MilpRow, MilpSystem
from .trees import AffineForm, Leaf, compose_affine
from .varpool import fresh_var, intern_var, var_name


def project_to_mic(system: MilpSystem,
                   rounds=None,
                   options: ClosureOptions = DEFAULT_OPTIONS) -> MicSystem:
    """Project a MILP onto its target block as a MIC system.

    The result has no integer variables; rows that never touched the
    integer block stay affine instead of passing through the closure
    pipeline (pointwise the same system, far smaller output).
    """
    mic, _ = _project(system.rows, system.target_vars, (),
                      system.continuous_aux_vars, system.integer_aux_vars,
                      rounds, options)
    return mic


def eliminate_variable(system: MicSystem, var: int,
                       rounds=None,
                       options: ClosureOptions = DEFAULT_OPTIONS) -> MicSystem:
    """Project a MIC system onto its variables minus `var`.

    Lifts ceilings into fresh integer variables, then projects out `var`
    together with all of those auxiliaries; remaining variables keep their
    kinds.
    """
    if var not in system.variables:
        raise ValueError(f"variable {var_name(var)!r} not in system")
    milp = lift_to_milp(system)
    fresh = tuple(v for v in milp.integer_aux_vars
                  if v not in system.integer_vars)
    keep_cont = tuple(v for v in system.continuous_vars if v != var)
    keep_int = tuple(v for v in system.integer_vars if v != var)
    elim_cont = (var,) if var in system.continuous_vars else ()
    elim_int = fresh + ((var,) if var in system.integer_vars else ())
    mic, _ = _project(milp.rows, keep_cont, keep_int, elim_cont, elim_int,
                      rounds, options)
    return mic


def eliminate_variables(system: MicSystem, order: Sequence[int],
                        rounds=None,
                        options: ClosureOptions = DEFAULT_OPTIONS) -> MicSystem:
    """Fold eliminate_variable over the given order (the sequential scheme)."""
    for var in order:
        system = eliminate_variable(system, var, rounds, options)
    return system


def monoid_representation(matrix: Sequence[Sequence[int]],
                          param_vars: Optional[Sequence[int]] = None,
                          rounds=None,
                          options: ClosureOptions = DEFAULT_OPTIONS
                          ) -> FeasibilityFunctions:
    """Chvatal functions cutting out ``{A x : x integer, x >= 0}``.

    Encodes membership as ``(A; -A; I) x >= (b; -b; 0)`` and runs the
    closure pipeline; the encoding is linear homogeneous in b, so every
    output leaf has zero constant term (honest Chvatal functions).
    """
    rows = [tuple(int(c) for c in row) for row in matrix]
    if not rows:
        raise ValueError("empty matrix")
    m, n = len(rows), len(rows[0])
    if param_vars is None:
        param_vars = [intern_var(f"b{i + 1}") for i in range(m)]
    param_vars = tuple(param_vars)
    if len(param_vars) != m:
        raise ValueError("need one parameter variable per matrix row")
    coeff_rows = []
    init = []
    for i, row in enumerate(rows):
        coeff_rows.append(tuple(map(Fraction, row)))
        init.append(Leaf(AffineForm.variable(param_vars[i])))
    for i, row in enumerate(rows):
        coeff_rows.append(tuple(Fraction(-c) for c in row))
        init.append(Leaf(AffineForm.variable(param_vars[i], -1)))
    for j in range(n):
        coeff_rows.append(tuple(Fraction(1 if k == j else 0) for k in range(n)))
        init.append(Leaf(AffineForm()))
    return _feasibility_functions(coeff_rows, init, param_vars, rounds, options)


def _project(rows: Sequence[MilpRow],
             keep_cont: tuple[int, ...],
             keep_int: tuple[int, ...],
             elim_cont: Sequence[int],
             elim_int: Sequence[int],
             rounds,
             options: ClosureOptions) -> tuple[MicSystem, Optional[FeasibilityFunctions]]:
    """Shared projection core returning the MIC system over kept variables."""
    keep = keep_cont + keep_int
    search = tuple(elim_cont) + tuple(elim_int)
    lin_rows = []
    for row in rows:
        coeffs = tuple(row.coeffs.coeff(v) for v in search)
        param = AffineForm.make({v: -row.coeffs.coeff(v) for v in keep}, row.rhs)
        lin_rows.append((coeffs, param))
    sys0 = LinearSystem.make(search, lin_rows)
    for var in elim_cont:
        sys0 = eliminate_var(sys0, var)

    passthrough: list[ChvatalIneq] = []
    z_rows: list[tuple] = []
    z_forms: list[AffineForm] = []
    if sys0.infeasible:
        # 0 >= 1 over the kept variables: the empty set, honestly encoded.
        passthrough.append(ChvatalIneq(Leaf(AffineForm.constant(1)), Fraction(0)))
    for coeffs, rhs in sys0.rows:
        if all(c == 0 for c in coeffs):
            # beta(keep) <= 0 directly.
            passthrough.append(ChvatalIneq(Leaf(rhs), Fraction(0)))
        else:
            z_rows.append(coeffs)
            z_forms.append(rhs)

    functions: Optional[FeasibilityFunctions] = None
    composed: list[ChvatalIneq] = []
    if z_rows:
        taken = set(keep) | set(search)
        params = _fresh_params(len(z_rows), taken)
        functions = _feasibility_functions(z_rows,
                                           [Leaf(AffineForm.variable(p)) for p in params],
                                           tuple(params), rounds, options)
        mapping = {p: z_forms[i] for i, p in enumerate(params)}
        for f in functions.functions:
            composed.append(ChvatalIneq(compose_affine(f, mapping), Fraction(0)))

    mic = MicSystem(keep_cont, keep_int, tuple(passthrough + composed))
    return mic, functions


def _fresh_params(count: int, taken: set[int]) -> tuple[int, ...]:
    params = []
    used = set(taken)
    for _ in range(count):
        p = fresh_var("_b", taken=used)
        used.add(p)
        params.append(p)
    return tuple(params)
