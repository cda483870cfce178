"""Hilbert generating sets, TDI aggregation and the symbolic closure loop.

The pipeline that turns an integer matrix C into explicit feasibility
functions works in rounds.  Each round (a) aggregates the current rows:
for row subsets S, every vector of a generating set of the cone spanned by
the S-rows becomes a new row m = u.A with a nonnegative witness u supported
on S, and (b) applies the closure step, wrapping every aggregated symbolic
right-hand side in one ceiling.  After the configured number of rounds the
integer-space variables are projected out; the surviving zero-coefficient
conditions ``0 >= g_i(b)`` are the feasibility functions.

Round counts: the theoretical bound is astronomically large, so `auto`
mode escalates the round count until the functions agree with the
brute-force oracle on a configurable parameter grid; the certificate (grid
and witness bound) is recorded on the result.
"""

from __future__ import annotations

import itertools
import random
from math import comb
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import CapExceededError, ValidationError
from .fm import (IntegerChain, LinearSystem, feasible_point,
                 infeasibility_certificate, project_cone)
from .linalg import LinSolver, integerize, rank, rows_independent
from .rationals import format_rational, rational
from .trees import (AffineForm, Ceil, ChvatalTree, Leaf, evaluate,
                    weighted_sum)
from .varpool import intern_var

IntVec = tuple[int, ...]


@dataclass(frozen=True)
class Cone:
    """Rational polyhedral cone given by nonzero integer generators."""

    generators: tuple[IntVec, ...]

    def __post_init__(self):
        gens = tuple(tuple(int(x) for x in g) for g in self.generators)
        if not gens:
            raise ValueError("cone needs at least one generator")
        if any(all(x == 0 for x in g) for g in gens):
            raise ValueError("cone generators must be nonzero")
        if len({len(g) for g in gens}) != 1:
            raise ValueError("generators have mixed dimensions")
        object.__setattr__(self, "generators", gens)

    @property
    def dim(self) -> int:
        return len(self.generators[0])


@dataclass(frozen=True)
class GeneratingSet:
    vectors: tuple[IntVec, ...]


@dataclass(frozen=True)
class TdiAggregator:
    """Nonnegative U with M = U.A such that ``Mx >= Ub`` is TDI for every b.

    Rows of M include a positive scaling of every row of A (singleton
    subsets), so both systems always describe the same polyhedron.
    """

    u_rows: tuple[tuple[Fraction, ...], ...]
    m_rows: tuple[IntVec, ...]
    subset_index: tuple[tuple[int, ...], ...]

    @property
    def U(self) -> list[list[Fraction]]:
        return [list(r) for r in self.u_rows]

    @property
    def M(self) -> list[list[int]]:
        return [list(r) for r in self.m_rows]


@dataclass(frozen=True)
class FeasibilityFunctions:
    """Explicit functions with ``system feasible  iff  all f_i(b) <= 0``.

    The guarantee is exact in the rejecting direction (every function is a
    valid aggregation) and oracle-certified on the recorded grid in the
    accepting direction.
    """

    functions: tuple[ChvatalTree, ...]
    rounds_used: int
    param_vars: tuple[int, ...]
    grid_points: int = 0
    grid_sampled: bool = False
    witness_bound: int = 0

    def accepts(self, point) -> bool:
        values = {v: rational(x) for v, x in point.items()}
        return all(evaluate(f, values) <= 0 for f in self.functions)


# ---------------------------------------------------------------------------
# zonotope enumeration


def zonotope_integer_points(generators: Sequence[IntVec],
                            cap: int = 200_000) -> list[IntVec]:
    """All nonzero integer points of ``{sum lam_i g_i : 0 <= lam_i <= 1}``.

    Enumeration runs over rank-many pivot coordinates only (candidates are
    lifted back through the span), so ambient dimension does not inflate
    the search.
    """
    gens = [tuple(int(x) for x in g) for g in generators]
    n = len(gens[0])
    t = len(gens)
    solver = LinSolver([tuple(map(Fraction, g)) for g in gens])
    r = solver.rank
    if r == 0:
        return []
    # Greedy independent coordinate rows; their sub-box drives enumeration.
    coord_rows = [tuple(Fraction(g[i]) for g in gens) for i in range(n)]
    pivot_coords: list[int] = []
    chosen: list[tuple[Fraction, ...]] = []
    for i in range(n):
        if len(pivot_coords) == r:
            break
        if rank(chosen + [coord_rows[i]]) > len(chosen):
            chosen.append(coord_rows[i])
            pivot_coords.append(i)
    basis_cols = solver.pivot_cols
    lift = LinSolver([tuple(Fraction(gens[j][i]) for i in pivot_coords)
                      for j in basis_cols])

    ranges = []
    total = 1
    for i in pivot_coords:
        lo = sum(min(0, g[i]) for g in gens)
        hi = sum(max(0, g[i]) for g in gens)
        ranges.append(range(lo, hi + 1))
        total *= hi - lo + 1
        if total > cap:
            raise CapExceededError(
                f"zonotope enumeration needs {total} candidates (cap {cap})")

    full_lo = [sum(min(0, g[i]) for g in gens) for i in range(n)]
    full_hi = [sum(max(0, g[i]) for g in gens) for i in range(n)]

    out = []
    for combo in itertools.product(*ranges):
        solved = lift.solve(tuple(Fraction(c) for c in combo))
        if solved is None:
            continue
        y, _ = solved
        point = [sum(Fraction(gens[j][i]) * y[k]
                     for k, j in enumerate(basis_cols)) for i in range(n)]
        if any(p.denominator != 1 for p in point):
            continue
        ints = tuple(int(p) for p in point)
        if all(x == 0 for x in ints):
            continue
        if any(x < lo or x > hi for x, lo, hi in zip(ints, full_lo, full_hi)):
            continue
        if _in_unit_combination(solver, ints):
            out.append(ints)
    out.sort()
    return out


def _in_unit_combination(solver: LinSolver, point: IntVec) -> bool:
    solved = solver.solve(tuple(map(Fraction, point)))
    if solved is None:
        return False
    lam0, null = solved
    if not null:
        return all(0 <= x <= 1 for x in lam0)
    # Box feasibility over the free directions, solved exactly by FM.
    rows = []
    f = len(null)
    for i in range(solver.t):
        coeffs = tuple(vec[i] for vec in null)
        rows.append((coeffs, -lam0[i]))                      # lam_i >= 0
        rows.append((tuple(-c for c in coeffs), lam0[i] - 1))  # lam_i <= 1
    return feasible_point(LinearSystem.make(tuple(range(f)), rows)) is not None


def cone_contains(generators: Sequence[IntVec], point: Sequence) -> bool:
    """Exact membership ``point in cone(generators)``."""
    gens = [tuple(map(Fraction, g)) for g in generators]
    point = tuple(map(rational, point))
    solver = LinSolver(gens)
    solved = solver.solve(point)
    if solved is None:
        return False
    lam0, null = solved
    if not null:
        return all(x >= 0 for x in lam0)
    rows = []
    for i in range(solver.t):
        coeffs = tuple(vec[i] for vec in null)
        rows.append((coeffs, -lam0[i]))
    return feasible_point(LinearSystem.make(tuple(range(len(null))), rows)) is not None


def is_pointed(generators: Sequence[IntVec]) -> bool:
    """A cone is pointed iff some vector is strictly positive on every
    generator (scaled to >= 1)."""
    n = len(generators[0])
    rows = [(tuple(map(Fraction, g)), Fraction(1)) for g in generators]
    return feasible_point(LinearSystem.make(tuple(range(n)), rows)) is not None


def reduce_generating_set(vectors: Iterable[IntVec]) -> list[IntVec]:
    """Drop vectors that are sums of two others until none remain.

    Substituting ``v = u + w`` preserves nonnegative-integer generation, so
    the reduced set generates the same points.
    """
    current = set(tuple(v) for v in vectors)
    changed = True
    while changed:
        changed = False
        for v in sorted(current, key=lambda x: (sum(abs(c) for c in x), x),
                        reverse=True):
            rest = current - {v}
            for u in rest:
                w = tuple(a - b for a, b in zip(v, u))
                if w in rest:
                    current.remove(v)
                    changed = True
                    break
            if changed:
                break
    return sorted(current)


def hilbert_generating_set(cone: Cone, minimal: bool = False,
                           cap: int = 200_000) -> GeneratingSet:
    """Integer points of the generator zonotope: a generating set for the
    integer points of the cone.

    With ``minimal=True`` and a pointed cone, vectors that are sums of two
    others are removed, which yields the minimal Hilbert basis.
    """
    points = zonotope_integer_points(cone.generators, cap=cap)
    if minimal and is_pointed(cone.generators):
        points = reduce_generating_set(points)
    return GeneratingSet(tuple(points))


# ---------------------------------------------------------------------------
# TDI aggregation


def tdi_aggregator(rows: Sequence[Sequence], *,
                   subset_cap: int = 4096,
                   max_support: Optional[int] = None,
                   minimal: bool = False,
                   zonotope_cap: int = 200_000) -> TdiAggregator:
    """Build U and M = U.A making ``Mx >= Ub`` TDI for every b.

    Row subsets are restricted to linearly independent ones of size at most
    rank(A): an optimal dual can always be chosen basic, so its support is
    such a subset, which is all the TDI argument needs.  `max_support`
    lowers that size further, trading per-round tightness for speed (the
    closure rows stay valid cuts; auto-mode validation decides whether more
    rounds are needed).  Witnesses u are recovered by exact feasibility
    with support restricted to the subset; duplicate (m-row, u-row) pairs
    are skipped.  `subset_cap` bounds how many subsets may be enumerated
    (the default matches a full powerset of 12 rows).
    """
    a_rows = [tuple(rational(c) for c in row) for row in rows]
    m = len(a_rows)
    if m == 0:
        return TdiAggregator((), (), ())
    n = len(a_rows[0])
    nonzero = [i for i, row in enumerate(a_rows) if any(c != 0 for c in row)]
    support_cap = rank([a_rows[i] for i in nonzero]) if nonzero else 0
    if max_support is not None:
        support_cap = min(support_cap, max_support)
    volume = sum(comb(len(nonzero), k) for k in range(1, support_cap + 1))
    if volume > subset_cap:
        raise CapExceededError(
            f"{volume} row subsets to enumerate exceed cap {subset_cap} "
            f"({len(nonzero)} rows, supports up to {support_cap})")

    u_rows: list[tuple[Fraction, ...]] = []
    m_rows: list[IntVec] = []
    subsets: list[tuple[int, ...]] = []
    seen = set()

    def add(u: tuple[Fraction, ...], mvec: IntVec, subset: tuple[int, ...]):
        key = (mvec, u)
        if key not in seen:
            seen.add(key)
            u_rows.append(u)
            m_rows.append(mvec)
            subsets.append(subset)

    # Zero rows pass through untouched so the polyhedron is preserved.
    for i, row in enumerate(a_rows):
        if i not in nonzero:
            unit = tuple(Fraction(1 if j == i else 0) for j in range(m))
            add(unit, tuple(0 for _ in range(n)), (i,))

    for size in range(1, support_cap + 1):
        for subset in itertools.combinations(nonzero, size):
            sub_rows = [a_rows[i] for i in subset]
            if size > 1 and not rows_independent(sub_rows):
                continue
            gens = [integerize(r) for r in sub_rows]
            points = zonotope_integer_points(gens, cap=zonotope_cap)
            if minimal:
                points = reduce_generating_set(points)
            for h in points:
                u = _recover_witness(sub_rows, h)
                full = [Fraction(0)] * m
                for k, i in enumerate(subset):
                    full[i] = u[k]
                add(tuple(full), h, subset)
    return TdiAggregator(tuple(u_rows), tuple(m_rows), tuple(subsets))


def _recover_witness(sub_rows: list[tuple[Fraction, ...]], target: IntVec
                     ) -> list[Fraction]:
    """Solve ``u . A_S = target`` with u >= 0 exactly (always feasible)."""
    t = len(sub_rows)
    n = len(target)
    rows = []
    for j in range(n):
        col = tuple(r[j] for r in sub_rows)
        rows.append((col, Fraction(target[j])))
        rows.append((tuple(-c for c in col), Fraction(-target[j])))
    for i in range(t):
        unit = tuple(Fraction(1 if k == i else 0) for k in range(t))
        rows.append((unit, Fraction(0)))
    witness = feasible_point(LinearSystem.make(tuple(range(t)), rows))
    if witness is None:
        raise AssertionError("witness recovery infeasible for a cone member")
    return [witness[i] for i in range(t)]


def closure_step(m_rows: Sequence[IntVec],
                 rhs: Sequence[ChvatalTree]) -> list[ChvatalTree]:
    """One Chvatal closure of a TDI system: round every right-hand side up."""
    if len(m_rows) != len(rhs):
        raise ValueError("row/rhs length mismatch")
    for row in m_rows:
        if any(Fraction(c).denominator != 1 for c in row):
            raise ValueError("closure step needs an integral coefficient matrix")
    return [Ceil(t) for t in rhs]


# ---------------------------------------------------------------------------
# feasibility functions


@dataclass(frozen=True)
class ClosureOptions:
    rounds: object = "auto"          # int or "auto"
    max_rounds: int = 3
    subset_cap: int = 4096
    max_support: Optional[int] = None
    minimal_hilbert: bool = True     # reduction inside the iteration
    grid_radius: int = 3
    grid_denominators: tuple[int, ...] = (1, 2)
    max_grid_points: int = 4000
    witness_bound: int = 50
    zonotope_cap: int = 200_000
    simplify: bool = False           # keep a grid-covering subset of outputs
    seed: int = 0


DEFAULT_OPTIONS = ClosureOptions()


def feasibility_functions(matrix: Sequence[Sequence],
                          rounds=None,
                          param_vars: Optional[Sequence[int]] = None,
                          options: ClosureOptions = DEFAULT_OPTIONS
                          ) -> FeasibilityFunctions:
    """Feasibility functions for ``{z integer : matrix . z >= b}``.

    Returns trees over the parameter variables (fresh ``b1..bm`` unless
    given) with the property that the system with right-hand side b has an
    integer solution iff every function is <= 0 at b -- exactly so for
    rejection, certified on the validation grid for acceptance.
    """
    m = len(matrix)
    if param_vars is None:
        param_vars = [intern_var(f"b{i + 1}") for i in range(m)]
    param_vars = tuple(param_vars)
    if len(param_vars) != m:
        raise ValueError("need one parameter variable per row")
    init = [Leaf(AffineForm.variable(v)) for v in param_vars]
    return _feasibility_functions(matrix, init, param_vars, rounds, options)


def _validation_grid(param_vars, options: ClosureOptions
                     ) -> tuple[list[dict[int, Fraction]], bool]:
    values: list[Fraction] = sorted({
        Fraction(k, d)
        for d in options.grid_denominators
        for k in range(-options.grid_radius * d, options.grid_radius * d + 1)})
    total = len(values) ** len(param_vars)
    if total <= options.max_grid_points:
        grid = [dict(zip(param_vars, combo))
                for combo in itertools.product(values, repeat=len(param_vars))]
        return grid, False
    rng = random.Random(options.seed)
    grid = [{v: rng.choice(values) for v in param_vars}
            for _ in range(options.max_grid_points)]
    return grid, True


def _feasibility_functions(matrix: Sequence[Sequence],
                           init_trees: Sequence[ChvatalTree],
                           param_vars: tuple[int, ...],
                           rounds,
                           options: ClosureOptions) -> FeasibilityFunctions:
    coeff_rows = [tuple(rational(c) for c in row) for row in matrix]
    if len(coeff_rows) != len(init_trees):
        raise ValueError("matrix/right-hand-side length mismatch")
    rounds = options.rounds if rounds is None else rounds
    auto = rounds == "auto"
    if not auto and (not isinstance(rounds, int) or rounds < 0):
        raise ValueError(f"rounds must be a nonnegative integer or 'auto', got {rounds!r}")

    needs_oracle = auto or options.simplify
    grid: list[dict[int, Fraction]] = []
    oracle_verdicts: list[bool] = []
    sampled = False
    if needs_oracle:
        grid, sampled = _validation_grid(param_vars, options)
        init_forms = [t.form for t in init_trees]  # init trees are leaves
        q = len(coeff_rows[0]) if coeff_rows else 0
        z_vars = tuple(-(k + 1) for k in range(q))  # synthetic column labels
        chain = IntegerChain(LinearSystem.make(
            z_vars, list(zip(coeff_rows, init_forms))))
        oracle_verdicts = [
            chain.search(pt, options.witness_bound) is not None for pt in grid]

    state = list(zip(coeff_rows, list(init_trees)))
    used = 0
    target = options.max_rounds if auto else rounds
    while True:
        if not auto and used < target:
            state = _closure_round(state, options)
            used += 1
            continue
        trees = [t for _, t in state]
        if options.simplify and needs_oracle:
            # Lazy mode: one Farkas certificate per still-uncovered
            # oracle-rejected point instead of the full projection cone.
            mismatch, conds = _lazy_conditions(
                [vec for vec, _ in state], trees, grid, oracle_verdicts)
        else:
            conds = project_cone([vec for vec, _ in state])
            if not needs_oracle:
                return FeasibilityFunctions(tuple(_build(conds, trees)), used,
                                            param_vars,
                                            witness_bound=options.witness_bound)
            mismatch, rejected_values = _validate(conds, trees, grid,
                                                  oracle_verdicts)
            if mismatch is None and options.simplify:
                conds = _grid_cover(conds, rejected_values)
        if mismatch is None:
            return FeasibilityFunctions(tuple(_build(conds, trees)), used,
                                        param_vars, len(grid), sampled,
                                        options.witness_bound)
        if not auto or used >= target:
            point = {k: format_rational(v) for k, v in sorted(mismatch.items())}
            raise ValidationError(
                f"feasibility functions disagree with the oracle at {point} "
                f"after {used} rounds (witness bound {options.witness_bound})",
                witness=mismatch)
        state = _closure_round(state, options)
        used += 1


def _closure_round(state, options: ClosureOptions):
    agg = tdi_aggregator([vec for vec, _ in state],
                         subset_cap=options.subset_cap,
                         max_support=options.max_support,
                         minimal=options.minimal_hilbert,
                         zonotope_cap=options.zonotope_cap)
    trees = [t for _, t in state]
    aggregated = []
    for u in agg.u_rows:
        parts = [(u[i], trees[i]) for i in range(len(trees)) if u[i] != 0]
        aggregated.append(weighted_sum(parts))
    closed = closure_step(agg.m_rows, aggregated)
    return [(tuple(map(Fraction, vec)), tree)
            for vec, tree in zip(agg.m_rows, closed)]


def _build(conds, trees) -> list[ChvatalTree]:
    return [weighted_sum([(Fraction(w), trees[k]) for k, w in cond])
            for cond in conds]


def _lazy_conditions(vecs, trees, grid, oracle_verdicts):
    """Build conditions point by point from infeasibility certificates.

    For every oracle-rejected grid point not yet rejected by a collected
    condition, a Farkas certificate of the instantiated system becomes a
    new condition (a valid multiplier everywhere, rejecting that point).
    A rejected point with no certificate means the closure round is not yet
    tight there: that point is the mismatch.  Oracle-accepted points are
    checked against the collected conditions afterwards; by validity they
    can never be rejected.
    """
    conds: list[tuple[tuple[int, int], ...]] = []
    seen = set()
    accepted_points = []
    for point, expected in zip(grid, oracle_verdicts):
        if expected:
            accepted_points.append(point)
            continue
        row_values = [t.evaluate(point) for t in trees]
        row_values = [int(v) if v.denominator == 1 else v for v in row_values]
        if any(sum(w * row_values[k] for k, w in cond) > 0 for cond in conds):
            continue
        cert = infeasibility_certificate(vecs, [Fraction(v) for v in row_values])
        if cert is None:
            return point, []
        if cert not in seen:
            seen.add(cert)
            conds.append(cert)
    for point in accepted_points:
        row_values = [t.evaluate(point) for t in trees]
        row_values = [int(v) if v.denominator == 1 else v for v in row_values]
        for cond in conds:
            if sum(w * row_values[k] for k, w in cond) > 0:
                raise AssertionError("a derived condition rejected a feasible point")
    return None, sorted(conds)


def _validate(conds, trees, grid, oracle_verdicts):
    """Check function verdicts against the oracle on the grid.

    Functions are evaluated as sparse combinations of per-row tree values,
    so each point costs one pass over the rows plus one pass over the
    multipliers (plain int arithmetic whenever values are integral).
    Returns (first mismatch point or None, row values of the
    oracle-rejected points for cover selection).
    """
    rejected_values = []
    for point, expected in zip(grid, oracle_verdicts):
        row_values = [t.evaluate(point) for t in trees]
        row_values = [int(v) if v.denominator == 1 else v for v in row_values]
        accepted = True
        for cond in conds:
            if sum(w * row_values[k] for k, w in cond) > 0:
                accepted = False
                break
        if accepted != expected:
            return point, []
        if not expected:
            rejected_values.append(row_values)
    return None, rejected_values


def _grid_cover(conds, rejected_values):
    """Small subset of conditions rejecting every oracle-infeasible point.

    Lazy greedy: take the first uncovered point, pool a few conditions that
    reject it, keep the pool member rejecting the most still-uncovered
    points.  Avoids materializing the full condition/point matrix.
    """
    if not rejected_values:
        return []

    def rejects(cond, row_values) -> bool:
        return sum(w * row_values[k] for k, w in cond) > 0

    uncovered = list(range(len(rejected_values)))
    chosen: list[int] = []
    pool_cap = 24
    while uncovered:
        pivot = rejected_values[uncovered[0]]
        pool = []
        for j, cond in enumerate(conds):
            if j not in chosen and rejects(cond, pivot):
                pool.append(j)
                if len(pool) >= pool_cap:
                    break
        if not pool:
            raise AssertionError("validated grid left a point uncovered")
        scored = []
        for j in pool:
            covered = [i for i in uncovered if rejects(conds[j], rejected_values[i])]
            scored.append((-len(covered), j, covered))
        scored.sort()
        _, best, covered = scored[0]
        chosen.append(best)
        covered_set = set(covered)
        uncovered = [i for i in uncovered if i not in covered_set]
    return [conds[j] for j in sorted(chosen)]
