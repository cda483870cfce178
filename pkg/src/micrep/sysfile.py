"""Line-oriented system files.

Three formats share one reader:

* ``format mic``    -- ``var <name> cont|int`` declarations, then affine
  ``row`` constraints and/or ``chv`` tree constraints.
* ``format milp``   -- ``var <name> target|caux|iaux`` declarations and
  ``row`` constraints; right-hand sides may be parameter names instead of
  rationals, which is the closure-mode input ``C z >= b``.
* ``format monoid`` -- bare integer ``row`` lines forming the matrix.

``row`` coefficients follow variable declaration order; ``=`` rows are
split into two inequalities while parsing.  ``#`` starts a comment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .errors import SystemFileError, TreeSyntaxError
from .rationals import format_rational, parse_rational
from .systems import ChvatalIneq, MicSystem, MilpRow, MilpSystem
from .trees import AffineForm, ChvatalTree, Leaf, format_tree, parse_tree
from .varpool import intern_var, var_name

MIC_KINDS = ("cont", "int")
MILP_KINDS = ("target", "caux", "iaux")


@dataclass
class ParsedSystem:
    format: str
    path: str
    names: list[str] = field(default_factory=list)
    kinds: dict[str, str] = field(default_factory=dict)
    rows: list[tuple[list[Fraction], Union[Fraction, str]]] = field(default_factory=list)
    chv: list[tuple[ChvatalTree, Fraction]] = field(default_factory=list)
    matrix: list[list[int]] = field(default_factory=list)

    @property
    def has_symbolic_rhs(self) -> bool:
        return any(isinstance(rhs, str) for _, rhs in self.rows)

    def var_ids(self, kinds: tuple[str, ...]) -> tuple[int, ...]:
        return tuple(intern_var(n) for n in self.names if self.kinds[n] in kinds)

    def to_mic(self) -> MicSystem:
        if self.format != "mic":
            raise SystemFileError(f"expected a mic file, got {self.format}", self.path)
        if self.has_symbolic_rhs:
            raise SystemFileError("mic files need rational right-hand sides", self.path)
        ids = [intern_var(n) for n in self.names]
        ineqs = []
        for coeffs, rhs in self.rows:
            # coeffs . v >= rhs  ==>  (-coeffs) . v <= -rhs
            form = AffineForm.make({v: -c for v, c in zip(ids, coeffs)})
            ineqs.append(ChvatalIneq(Leaf(form), -rhs))
        ineqs.extend(ChvatalIneq(tree, rhs) for tree, rhs in self.chv)
        return MicSystem(self.var_ids(("cont",)), self.var_ids(("int",)),
                         tuple(ineqs))

    def to_milp(self) -> MilpSystem:
        if self.format != "milp":
            raise SystemFileError(f"expected a milp file, got {self.format}", self.path)
        if self.has_symbolic_rhs:
            raise SystemFileError(
                "milp files with parameter right-hand sides are closure-mode "
                "inputs; this command needs rational ones", self.path)
        ids = [intern_var(n) for n in self.names]
        rows = [MilpRow(AffineForm.make(dict(zip(ids, coeffs))), rhs)
                for coeffs, rhs in self.rows]
        return MilpSystem(self.var_ids(("target",)), self.var_ids(("caux",)),
                          self.var_ids(("iaux",)), tuple(rows))

    def to_closure_input(self) -> tuple[list[list[Fraction]], tuple[int, ...], tuple[int, ...]]:
        """(coefficient matrix, integer-space var ids, parameter var ids)."""
        if self.format != "milp":
            raise SystemFileError(f"expected a milp file, got {self.format}", self.path)
        if set(self.kinds.values()) - {"iaux"}:
            raise SystemFileError(
                "closure input declares integer-space variables only (iaux)",
                self.path)
        z_ids = self.var_ids(("iaux",))
        params: list[int] = []
        matrix: list[list[Fraction]] = []
        for coeffs, rhs in self.rows:
            if not isinstance(rhs, str):
                raise SystemFileError(
                    "closure input needs parameter names as right-hand sides",
                    self.path)
            params.append(intern_var(rhs))
            matrix.append(list(coeffs))
        if len(set(params)) != len(params):
            raise SystemFileError("repeated right-hand-side parameter", self.path)
        return matrix, z_ids, tuple(params)

    def to_matrix(self) -> list[list[int]]:
        if self.format != "monoid":
            raise SystemFileError(f"expected a monoid file, got {self.format}", self.path)
        return [list(row) for row in self.matrix]


def parse_system(text: str, path: str = "<input>") -> ParsedSystem:
    parsed: Optional[ParsedSystem] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0]
        if head == "format":
            if parsed is not None:
                raise SystemFileError("duplicate format line", path, lineno)
            if len(tokens) != 2 or tokens[1] not in ("mic", "milp", "monoid"):
                raise SystemFileError("format must be mic, milp or monoid",
                                      path, lineno)
            parsed = ParsedSystem(tokens[1], path)
            continue
        if parsed is None:
            raise SystemFileError("file must start with a format line", path, lineno)
        if head == "var":
            _parse_var(parsed, tokens, path, lineno)
        elif head == "row":
            _parse_row(parsed, tokens, path, lineno)
        elif head == "chv":
            _parse_chv(parsed, line, path, lineno)
        else:
            raise SystemFileError(f"unknown directive {head!r}", path, lineno)
    if parsed is None:
        raise SystemFileError("empty system file", path)
    return parsed


def _parse_var(parsed: ParsedSystem, tokens, path, lineno):
    if parsed.format == "monoid":
        raise SystemFileError("monoid files have no variable declarations",
                              path, lineno)
    kinds = MIC_KINDS if parsed.format == "mic" else MILP_KINDS
    if len(tokens) != 3 or tokens[2] not in kinds:
        raise SystemFileError(
            f"expected 'var <name> <{'|'.join(kinds)}>'", path, lineno)
    name = tokens[1]
    if name in parsed.kinds:
        raise SystemFileError(f"duplicate variable {name!r}", path, lineno)
    try:
        intern_var(name)
    except ValueError as exc:
        raise SystemFileError(str(exc), path, lineno) from None
    parsed.names.append(name)
    parsed.kinds[name] = tokens[2]


def _parse_row(parsed: ParsedSystem, tokens, path, lineno):
    if parsed.format == "monoid":
        try:
            row = [int(tok) for tok in tokens[1:]]
        except ValueError:
            raise SystemFileError("monoid rows are integer lists", path, lineno) from None
        if parsed.matrix and len(row) != len(parsed.matrix[0]):
            raise SystemFileError("ragged matrix row", path, lineno)
        if not row:
            raise SystemFileError("empty matrix row", path, lineno)
        parsed.matrix.append(row)
        return
    rel_positions = [i for i, tok in enumerate(tokens) if tok in (">=", "<=", "=")]
    if len(rel_positions) != 1:
        raise SystemFileError("row needs exactly one relation (>=, <= or =)",
                              path, lineno)
    rel = tokens[rel_positions[0]]
    lhs_tokens = tokens[1:rel_positions[0]]
    rhs_tokens = tokens[rel_positions[0] + 1:]
    if len(lhs_tokens) != len(parsed.names):
        raise SystemFileError(
            f"row has {len(lhs_tokens)} coefficients for {len(parsed.names)} "
            "declared variables", path, lineno)
    if len(rhs_tokens) != 1:
        raise SystemFileError("row needs a single right-hand side", path, lineno)
    try:
        coeffs = [parse_rational(tok) for tok in lhs_tokens]
    except ValueError as exc:
        raise SystemFileError(str(exc), path, lineno) from None
    rhs_tok = rhs_tokens[0]
    rhs: Union[Fraction, str]
    try:
        rhs = parse_rational(rhs_tok)
    except ValueError:
        rhs = rhs_tok  # parameter name (closure/monoid modes)
        if parsed.format == "mic":
            raise SystemFileError(
                f"invalid rational right-hand side {rhs_tok!r}", path, lineno) from None
    if rel == ">=":
        parsed.rows.append((coeffs, rhs))
    elif rel == "<=":
        if isinstance(rhs, str):
            raise SystemFileError("parameter right-hand sides need >=", path, lineno)
        parsed.rows.append(([-c for c in coeffs], -rhs))
    else:
        if isinstance(rhs, str):
            raise SystemFileError("parameter right-hand sides need >=", path, lineno)
        parsed.rows.append((coeffs, rhs))
        parsed.rows.append(([-c for c in coeffs], -rhs))


def _parse_chv(parsed: ParsedSystem, line: str, path, lineno):
    if parsed.format != "mic":
        raise SystemFileError("chv constraints belong to mic files", path, lineno)
    body = line[len("chv"):].strip()
    if "<=" not in body:
        raise SystemFileError("chv constraint needs '<= rational'", path, lineno)
    tree_text, _, rhs_text = body.rpartition("<=")
    try:
        tree = parse_tree(tree_text.strip())
    except TreeSyntaxError as exc:
        raise SystemFileError(str(exc), path, lineno) from None
    try:
        rhs = parse_rational(rhs_text.strip())
    except ValueError as exc:
        raise SystemFileError(str(exc), path, lineno) from None
    parsed.chv.append((tree, rhs))


def read_system(path: str) -> ParsedSystem:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_system(handle.read(), path)


# ---------------------------------------------------------------------------
# emission


def format_mic(system: MicSystem, header: list[str] | None = None) -> str:
    lines = [f"# {h}" for h in (header or [])]
    lines.append("format mic")
    for v in system.continuous_vars:
        lines.append(f"var {var_name(v)} cont")
    for v in system.integer_vars:
        lines.append(f"var {var_name(v)} int")
    for ineq in system.inequalities:
        lines.append(f"chv {format_tree(ineq.lhs)} <= {format_rational(ineq.rhs)}")
    return "\n".join(lines) + "\n"


def format_milp(system: MilpSystem, header: list[str] | None = None) -> str:
    lines = [f"# {h}" for h in (header or [])]
    lines.append("format milp")
    for v in system.target_vars:
        lines.append(f"var {var_name(v)} target")
    for v in system.continuous_aux_vars:
        lines.append(f"var {var_name(v)} caux")
    for v in system.integer_aux_vars:
        lines.append(f"var {var_name(v)} iaux")
    order = system.variables
    for row in system.rows:
        coeffs = " ".join(format_rational(row.coeffs.coeff(v)) for v in order)
        lines.append(f"row {coeffs} >= {format_rational(row.rhs)}")
    return "\n".join(lines) + "\n"
