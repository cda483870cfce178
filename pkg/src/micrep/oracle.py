"""Brute-force ground truth on bounded domains.

Membership, feasibility and projection-equality certificates used by the
test suites and by auto-mode round escalation.  Every verdict is "within
the stated box": continuous witness variables are eliminated exactly by
Fourier-Motzkin, integer witnesses are enumerated over exact projected
intervals clipped to the box, and reports always carry the box so an
infeasible-in-box verdict is never read as global infeasibility.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from .errors import UnboundVariableError
from .fm import IntegerChain, LinearSystem, eliminate_var, feasible_point
from .rationals import format_rational, rational, rational_ceil, rational_floor
from .systems import MicSystem, MilpSystem
from .trees import AffineForm, evaluate
from .varpool import var_name

DEFAULT_INTEGER_RADIUS = 50
DEFAULT_CONTINUOUS_RADIUS = 6
DEFAULT_DENOMINATOR = 2


@dataclass(frozen=True)
class Box:
    """Finite search/grid domain.

    `bounds` maps variable ids to closed rational intervals; `denominators`
    gives the grid step denominator for continuous variables (integer
    variables always step by 1).
    """

    bounds: tuple[tuple[int, tuple[Fraction, Fraction]], ...]
    denominators: tuple[tuple[int, int], ...] = ()

    @staticmethod
    def make(bounds: Mapping[int, tuple], denominators: Mapping[int, int] | None = None) -> "Box":
        norm = []
        for vid, (lo, hi) in sorted(bounds.items()):
            lo, hi = rational(lo), rational(hi)
            if lo > hi:
                raise ValueError(f"empty interval for {var_name(vid)}")
            norm.append((vid, (lo, hi)))
        dens = tuple(sorted((denominators or {}).items()))
        for _, d in dens:
            if d < 1:
                raise ValueError("denominator bound must be positive")
        return Box(tuple(norm), dens)

    @staticmethod
    def cube(vars: Sequence[int], radius, denominator: int = 1,
             continuous_vars: Sequence[int] = ()) -> "Box":
        bounds = {v: (-rational(radius), rational(radius)) for v in vars}
        dens = {v: denominator for v in continuous_vars}
        return Box.make(bounds, dens)

    def bound(self, vid: int) -> tuple[Fraction, Fraction]:
        for v, interval in self.bounds:
            if v == vid:
                return interval
        raise KeyError(f"no bounds for {var_name(vid)}")

    def as_dict(self) -> dict[int, tuple[Fraction, Fraction]]:
        return dict(self.bounds)

    def values(self, vid: int, integer: bool) -> list[Fraction]:
        lo, hi = self.bound(vid)
        if integer:
            return [Fraction(k) for k in range(rational_ceil(lo), rational_floor(hi) + 1)]
        den = dict(self.denominators).get(vid, 1)
        start = rational_ceil(lo * den)
        stop = rational_floor(hi * den)
        return [Fraction(k, den) for k in range(start, stop + 1)]

    def grid(self, vars: Sequence[int], integer_vars: Iterable[int] = ()
             ) -> Iterable[dict[int, Fraction]]:
        integer_vars = set(integer_vars)
        axes = [self.values(v, v in integer_vars) for v in vars]
        for combo in itertools.product(*axes):
            yield dict(zip(vars, combo))

    def describe(self) -> str:
        parts = []
        for vid, (lo, hi) in self.bounds:
            parts.append(f"{var_name(vid)} in [{format_rational(lo)}, {format_rational(hi)}]")
        return "; ".join(parts)


def mic_member(system: MicSystem, point: Mapping[int, Fraction]) -> bool:
    """Conjunction of ``f_i(point) <= b_i``; integer variables must bind to
    integers and every declared variable must be bound."""
    values = {}
    for vid in system.variables:
        if vid not in point:
            raise UnboundVariableError(var_name(vid))
        values[vid] = rational(point[vid])
    for vid in system.integer_vars:
        if values[vid].denominator != 1:
            raise ValueError(
                f"integer variable {var_name(vid)} bound to non-integer "
                f"{format_rational(values[vid])}")
    return all(evaluate(ineq.lhs, values) <= ineq.rhs for ineq in system.inequalities)


def dmic_member(systems: Sequence[MicSystem], point: Mapping[int, Fraction]) -> bool:
    """Union (disjunctive) membership; used only as a test fixture."""
    return any(mic_member(s, point) for s in systems)


def _milp_chain(system: MilpSystem) -> tuple[IntegerChain, LinearSystem]:
    """Eliminate continuous aux exactly; return chain over integer aux.

    The remaining parameters of the chain are the target variables; the
    second return value is the post-elimination system used for witness
    back-substitution of the continuous block.
    """
    search_vars = system.continuous_aux_vars + system.integer_aux_vars
    rows = []
    for row in system.rows:
        coeffs = tuple(row.coeffs.coeff(v) for v in search_vars)
        # Parameters: rhs - target part, as an affine form over targets.
        param = {v: -row.coeffs.coeff(v) for v in system.target_vars}
        rows.append((coeffs, AffineForm.make(param, row.rhs)))
    base = LinearSystem.make(search_vars, rows)
    reduced = base
    for var in system.continuous_aux_vars:
        reduced = eliminate_var(reduced, var)
    return IntegerChain(reduced, reduced.vars), base


def milp_feasible(system: MilpSystem, target_point: Mapping[int, Fraction],
                  box: Box | None = None, bound: int = DEFAULT_INTEGER_RADIUS
                  ) -> tuple[bool, Optional[dict[int, Fraction]]]:
    """Is the instantiated system satisfiable by aux variables in the box?

    Continuous aux variables are projected out exactly and recovered by
    back-substitution; integer aux variables are searched on their exact
    projected intervals clipped to ``bound`` (or the box when given).
    Returns (verdict, witness); the witness binds every aux variable.
    """
    chain, base = _milp_chain(system)
    params = {v: rational(x) for v, x in target_point.items()}
    for vid in system.target_vars:
        if vid not in params:
            raise UnboundVariableError(var_name(vid))
    box_map = box.as_dict() if box is not None else None
    witness = chain.search(params, bound, box_map)
    if witness is None:
        return False, None
    if system.continuous_aux_vars:
        # Fix integers, then pick exact rationals for the continuous block.
        fixed_rows = []
        for coeffs, rhs in base.rows:
            value = rhs.evaluate(params)
            shift = sum(coeffs[j] * witness[v]
                        for j, v in enumerate(base.vars) if v in witness)
            cont = tuple(coeffs[j] for j, v in enumerate(base.vars)
                         if v in system.continuous_aux_vars)
            fixed_rows.append((cont, value - shift))
        cont_sys = LinearSystem.make(system.continuous_aux_vars, fixed_rows)
        cont_witness = feasible_point(cont_sys)
        if cont_witness is None:  # cannot happen: projection was exact
            raise AssertionError("continuous back-substitution failed")
        witness.update(cont_witness)
    return True, witness


@dataclass(frozen=True)
class Disagreement:
    point: tuple[tuple[int, Fraction], ...]
    lhs_verdict: bool
    rhs_verdict: bool

    def format(self) -> str:
        coords = ", ".join(f"{var_name(v)}={format_rational(x)}"
                           for v, x in self.point)
        return f"{coords} ; {self.lhs_verdict} ; {self.rhs_verdict}"


@dataclass(frozen=True)
class EqualityReport:
    disagreements: tuple[Disagreement, ...]
    points_checked: int
    box_description: str

    @property
    def equal(self) -> bool:
        return not self.disagreements

    def format(self) -> str:
        lines = [d.format() for d in self.disagreements]
        lines.append(f"# checked {self.points_checked} points on {self.box_description}")
        return "\n".join(lines)


def check_projection_equality(lhs: MicSystem,
                              rhs: Union[MicSystem, MilpSystem],
                              box: Box,
                              aux_box: Box | None = None,
                              bound: int = DEFAULT_INTEGER_RADIUS) -> EqualityReport:
    """Compare lhs membership against exists-witness membership of rhs.

    The rhs may mention extra variables (the lift/projection witnesses);
    for a MilpSystem they are searched exactly, for a MicSystem an explicit
    ``aux_box`` grid is required since ceilings block exact elimination.
    """
    grid_vars = lhs.variables
    disagreements = []
    count = 0

    if isinstance(rhs, MilpSystem):
        extra = [v for v in rhs.variables if v not in grid_vars]
        unexpected = [v for v in rhs.target_vars if v not in grid_vars]
        if unexpected:
            names = ", ".join(var_name(v) for v in unexpected)
            raise ValueError(f"rhs target variables missing from lhs: {names}")
        checker = _MilpWitnessChecker(rhs, grid_vars, extra, aux_box, bound)
    else:
        extra = [v for v in rhs.variables if v not in grid_vars]
        if extra and aux_box is None:
            names = ", ".join(var_name(v) for v in extra)
            raise ValueError(f"need aux_box for rhs-only variables: {names}")
        checker = _MicWitnessChecker(rhs, extra, aux_box)

    for point in box.grid(grid_vars, lhs.integer_vars):
        count += 1
        left = mic_member(lhs, point)
        right = checker(point)
        if left != right:
            disagreements.append(Disagreement(tuple(sorted(point.items())), left, right))
    disagreements.sort(key=lambda d: d.point)
    return EqualityReport(tuple(disagreements), count, box.describe())


class _MilpWitnessChecker:
    def __init__(self, system: MilpSystem, grid_vars, extra, aux_box, bound):
        self.grid_vars = tuple(grid_vars)
        self.bound = bound
        self.box_map = aux_box.as_dict() if aux_box is not None else None
        # Re-block the system so every grid variable is a parameter, keeping
        # any integer grid variable out of the search space; the elimination
        # chain is built once and instantiated per point.
        cont_aux = tuple(v for v in system.continuous_aux_vars if v in extra)
        int_aux = tuple(v for v in system.integer_aux_vars if v in extra)
        view = MilpSystem(self.grid_vars, cont_aux, int_aux, system.rows)
        self.chain, _ = _milp_chain(view)

    def __call__(self, point) -> bool:
        params = {v: rational(x) for v, x in point.items()}
        return self.chain.search(params, self.bound, self.box_map) is not None


class _MicWitnessChecker:
    def __init__(self, system: MicSystem, extra, aux_box):
        self.system = system
        self.extra = tuple(extra)
        self.aux_box = aux_box

    def __call__(self, point) -> bool:
        if not self.extra:
            return mic_member(self.system, point)
        integer = set(self.system.integer_vars)
        for combo in self.aux_box.grid(self.extra, integer):
            full = dict(point)
            full.update(combo)
            if mic_member(self.system, full):
                return True
        return False
