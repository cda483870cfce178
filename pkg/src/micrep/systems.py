"""Mixed-integer Chvatal systems and mixed-integer linear systems.

A MicSystem is finitely many affine Chvatal inequalities ``f_i(x, z) <= b_i``
over continuous variables x and integer variables z.  A MilpSystem is a block
system ``A x + B y + C z >= d`` with designated target / continuous-aux /
integer-aux variables whose meaning is the projection onto the target block.
Both are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .rationals import format_rational, rational
from .trees import AffineForm, ChvatalTree, Leaf, format_tree
from .varpool import var_name


@dataclass(frozen=True)
class ChvatalIneq:
    """``lhs(point) <= rhs`` with a rational right-hand side."""

    lhs: ChvatalTree
    rhs: Fraction

    def __post_init__(self):
        object.__setattr__(self, "rhs", rational(self.rhs))

    @property
    def cc(self) -> int:
        return self.lhs.cc

    def __str__(self) -> str:
        return f"{format_tree(self.lhs)} <= {format_rational(self.rhs)}"


def affine_ineq(form: AffineForm, rhs) -> ChvatalIneq:
    return ChvatalIneq(Leaf(form), rational(rhs))


@dataclass(frozen=True)
class MicSystem:
    continuous_vars: tuple[int, ...]
    integer_vars: tuple[int, ...]
    inequalities: tuple[ChvatalIneq, ...]

    def __post_init__(self):
        object.__setattr__(self, "continuous_vars", tuple(self.continuous_vars))
        object.__setattr__(self, "integer_vars", tuple(self.integer_vars))
        object.__setattr__(self, "inequalities", tuple(self.inequalities))
        declared = set(self.continuous_vars) | set(self.integer_vars)
        if len(declared) != len(self.continuous_vars) + len(self.integer_vars):
            raise ValueError("continuous and integer variable lists overlap")
        for ineq in self.inequalities:
            loose = ineq.lhs.variables() - declared
            if loose:
                names = ", ".join(sorted(var_name(v) for v in loose))
                raise ValueError(f"undeclared variables in inequality: {names}")

    @property
    def variables(self) -> tuple[int, ...]:
        return self.continuous_vars + self.integer_vars

    @property
    def total_ceiling_count(self) -> int:
        return sum(ineq.cc for ineq in self.inequalities)


@dataclass(frozen=True)
class MilpRow:
    """One row ``coeffs . v >= rhs`` (constant part folded into rhs)."""

    coeffs: AffineForm
    rhs: Fraction

    def __post_init__(self):
        rhs = rational(self.rhs) - self.coeffs.const
        object.__setattr__(self, "coeffs", AffineForm(self.coeffs.terms, Fraction(0)))
        object.__setattr__(self, "rhs", rhs)


@dataclass(frozen=True)
class MilpSystem:
    """``{(x, y, z) : A x + B y + C z >= d}`` with z integral.

    The represented set is the projection onto (x and, for lifted systems,
    the pre-existing integer variables); auxiliary variables are
    existentially quantified by the oracle and projection machinery.
    """

    target_vars: tuple[int, ...]
    continuous_aux_vars: tuple[int, ...]
    integer_aux_vars: tuple[int, ...]
    rows: tuple[MilpRow, ...]

    def __post_init__(self):
        object.__setattr__(self, "target_vars", tuple(self.target_vars))
        object.__setattr__(self, "continuous_aux_vars", tuple(self.continuous_aux_vars))
        object.__setattr__(self, "integer_aux_vars", tuple(self.integer_aux_vars))
        object.__setattr__(self, "rows", tuple(self.rows))
        declared = (set(self.target_vars) | set(self.continuous_aux_vars)
                    | set(self.integer_aux_vars))
        total = (len(self.target_vars) + len(self.continuous_aux_vars)
                 + len(self.integer_aux_vars))
        if len(declared) != total:
            raise ValueError("variable blocks overlap")
        for row in self.rows:
            loose = set(row.coeffs.variables()) - declared
            if loose:
                names = ", ".join(sorted(var_name(v) for v in loose))
                raise ValueError(f"undeclared variables in row: {names}")

    @property
    def variables(self) -> tuple[int, ...]:
        return self.target_vars + self.continuous_aux_vars + self.integer_aux_vars

    def _block(self, vars: tuple[int, ...]) -> list[list[Fraction]]:
        return [[row.coeffs.coeff(v) for v in vars] for row in self.rows]

    @property
    def A(self) -> list[list[Fraction]]:
        return self._block(self.target_vars)

    @property
    def B(self) -> list[list[Fraction]]:
        return self._block(self.continuous_aux_vars)

    @property
    def C(self) -> list[list[Fraction]]:
        return self._block(self.integer_aux_vars)

    @property
    def d(self) -> list[Fraction]:
        return [row.rhs for row in self.rows]
