"""Affine forms and the affine Chvatal function calculus.

An affine Chvatal function is represented by a finite binary tree whose
leaves are affine forms with rational coefficients and whose inner nodes are
a ceiling edge, a nonnegative rational scaling edge, or a nonnegatively
weighted binary sum.  Everything here is immutable and evaluates exactly
over rationals; there is no floating-point mode and no algebraic
simplification (equality of trees is structural, so ceiling counts are a
property of the given representation, not of the function).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .errors import DimensionMismatchError, TreeSyntaxError, UnboundVariableError
from .rationals import format_rational, rational, rational_ceil
from .varpool import intern_var, var_name

Point = Mapping[int, Fraction]


# ---------------------------------------------------------------------------
# affine forms


@dataclass(frozen=True)
class AffineForm:
    """Sparse affine function ``sum(c_v * v) + const`` over variable ids.

    Canonical: zero coefficients are never stored and terms are sorted by
    variable id, so structural equality is pointwise equality.
    """

    terms: tuple[tuple[int, Fraction], ...] = ()
    const: Fraction = Fraction(0)

    @staticmethod
    def make(coeffs: Mapping[int, Fraction] | Iterable[tuple[int, Fraction]] = (),
             const=0) -> "AffineForm":
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        merged: dict[int, Fraction] = {}
        for vid, c in items:
            c = rational(c)
            if c == 0:
                continue
            acc = merged.get(vid, Fraction(0)) + c
            if acc == 0:
                merged.pop(vid, None)
            else:
                merged[vid] = acc
        return AffineForm(tuple(sorted(merged.items())), rational(const))

    @staticmethod
    def constant(value) -> "AffineForm":
        return AffineForm((), rational(value))

    @staticmethod
    def variable(vid: int, coeff=1) -> "AffineForm":
        return AffineForm.make({vid: rational(coeff)})

    def coeff(self, vid: int) -> Fraction:
        for v, c in self.terms:
            if v == vid:
                return c
        return Fraction(0)

    def variables(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.terms)

    @property
    def is_constant(self) -> bool:
        return not self.terms

    @property
    def is_zero(self) -> bool:
        return not self.terms and self.const == 0

    def evaluate(self, point: Point) -> Fraction:
        total = self.const
        for vid, c in self.terms:
            if vid not in point:
                raise UnboundVariableError(var_name(vid))
            total += c * point[vid]
        return total

    def substitute(self, mapping: Mapping[int, "AffineForm"]) -> "AffineForm":
        """Replace each variable by an affine form (must cover all of them)."""
        acc: dict[int, Fraction] = {}
        const = self.const
        for vid, c in self.terms:
            if vid not in mapping:
                raise DimensionMismatchError(
                    f"no image for variable {var_name(vid)!r} in affine substitution")
            image = mapping[vid]
            const += c * image.const
            for w, d in image.terms:
                acc[w] = acc.get(w, Fraction(0)) + c * d
        return AffineForm.make(acc, const)

    def scaled(self, factor) -> "AffineForm":
        factor = rational(factor)
        if factor == 0:
            return AffineForm()
        return AffineForm(tuple((v, c * factor) for v, c in self.terms),
                          self.const * factor)

    def __add__(self, other: "AffineForm") -> "AffineForm":
        acc = dict(self.terms)
        for v, c in other.terms:
            acc[v] = acc.get(v, Fraction(0)) + c
        return AffineForm.make(acc, self.const + other.const)

    def __sub__(self, other: "AffineForm") -> "AffineForm":
        return self + other.scaled(-1)

    def __neg__(self) -> "AffineForm":
        return self.scaled(-1)

    def __str__(self) -> str:
        return format_tree(Leaf(self))


ZERO_FORM = AffineForm()


# ---------------------------------------------------------------------------
# trees


class ChvatalTree:
    """Base class; nodes are Leaf, Ceil, Scale or Sum."""

    cc: int
    depth: int

    def evaluate(self, point: Point) -> Fraction:
        raise NotImplementedError

    def leaves(self) -> Iterable[AffineForm]:
        raise NotImplementedError

    def variables(self) -> set[int]:
        out: set[int] = set()
        for form in self.leaves():
            out.update(form.variables())
        return out


@dataclass(frozen=True)
class Leaf(ChvatalTree):
    form: AffineForm
    cc: int = field(init=False, default=0, compare=False, repr=False)
    depth: int = field(init=False, default=0, compare=False, repr=False)

    def evaluate(self, point: Point) -> Fraction:
        return self.form.evaluate(point)

    def leaves(self):
        yield self.form


@dataclass(frozen=True)
class Ceil(ChvatalTree):
    child: ChvatalTree
    cc: int = field(init=False, compare=False, repr=False)
    depth: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "cc", self.child.cc + 1)
        object.__setattr__(self, "depth", self.child.depth + 1)

    def evaluate(self, point: Point) -> Fraction:
        return Fraction(rational_ceil(self.child.evaluate(point)))

    def leaves(self):
        yield from self.child.leaves()


@dataclass(frozen=True)
class Scale(ChvatalTree):
    weight: Fraction
    child: ChvatalTree
    cc: int = field(init=False, compare=False, repr=False)
    depth: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        w = rational(self.weight)
        if w < 0:
            raise ValueError(f"scale weight must be nonnegative, got {w}")
        object.__setattr__(self, "weight", w)
        object.__setattr__(self, "cc", self.child.cc)
        object.__setattr__(self, "depth", self.child.depth + 1)

    def evaluate(self, point: Point) -> Fraction:
        return self.weight * self.child.evaluate(point)

    def leaves(self):
        yield from self.child.leaves()


@dataclass(frozen=True)
class Sum(ChvatalTree):
    left_weight: Fraction
    left: ChvatalTree
    right_weight: Fraction
    right: ChvatalTree
    cc: int = field(init=False, compare=False, repr=False)
    depth: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        a = rational(self.left_weight)
        b = rational(self.right_weight)
        if a < 0 or b < 0:
            raise ValueError(f"sum weights must be nonnegative, got {a}, {b}")
        object.__setattr__(self, "left_weight", a)
        object.__setattr__(self, "right_weight", b)
        object.__setattr__(self, "cc", self.left.cc + self.right.cc)
        object.__setattr__(self, "depth", max(self.left.depth, self.right.depth) + 1)

    def evaluate(self, point: Point) -> Fraction:
        return (self.left_weight * self.left.evaluate(point)
                + self.right_weight * self.right.evaluate(point))

    def leaves(self):
        yield from self.left.leaves()
        yield from self.right.leaves()


ZERO_TREE = Leaf(ZERO_FORM)


def leaf(coeffs=(), const=0) -> Leaf:
    return Leaf(AffineForm.make(coeffs, const))


def evaluate(tree: ChvatalTree, point: Point) -> Fraction:
    """Evaluate at a rational point; ceilings produce exact integers."""
    return tree.evaluate({v: rational(x) for v, x in point.items()})


def ceiling_count(tree: ChvatalTree) -> int:
    return tree.cc


def depth(tree: ChvatalTree) -> int:
    return tree.depth


def weighted_sum(parts: list[tuple[Fraction, ChvatalTree]]) -> ChvatalTree:
    """Left fold of nonnegatively weighted trees; empty folds to 0."""
    parts = [(rational(w), t) for w, t in parts]
    if not parts:
        return ZERO_TREE
    w0, t0 = parts[0]
    acc = t0 if w0 == 1 else Scale(w0, t0)
    for w, t in parts[1:]:
        acc = Sum(Fraction(1), acc, w, t)
    return acc


def tree_as_affine(tree: ChvatalTree) -> AffineForm:
    """Collapse a ceiling-free tree to the affine form it computes."""
    if tree.cc != 0:
        raise ValueError("tree contains ceiling nodes; not an affine function")
    if isinstance(tree, Leaf):
        return tree.form
    if isinstance(tree, Scale):
        return tree_as_affine(tree.child).scaled(tree.weight)
    if isinstance(tree, Sum):
        return (tree_as_affine(tree.left).scaled(tree.left_weight)
                + tree_as_affine(tree.right).scaled(tree.right_weight))
    raise TypeError(f"unexpected node {tree!r}")


def interval_evaluate(tree: ChvatalTree,
                      box: Mapping[int, tuple[Fraction, Fraction]]
                      ) -> tuple[Fraction, Fraction]:
    """Exact range bound of `tree` over a per-variable box.

    All node operations are monotone in each child, so interval arithmetic
    gives sound (not necessarily tight) bounds.
    """
    if isinstance(tree, Leaf):
        lo = hi = tree.form.const
        for vid, c in tree.form.terms:
            if vid not in box:
                raise UnboundVariableError(var_name(vid))
            a, b = box[vid]
            lo += c * (a if c > 0 else b)
            hi += c * (b if c > 0 else a)
        return lo, hi
    if isinstance(tree, Ceil):
        lo, hi = interval_evaluate(tree.child, box)
        return Fraction(rational_ceil(lo)), Fraction(rational_ceil(hi))
    if isinstance(tree, Scale):
        lo, hi = interval_evaluate(tree.child, box)
        return tree.weight * lo, tree.weight * hi
    if isinstance(tree, Sum):
        llo, lhi = interval_evaluate(tree.left, box)
        rlo, rhi = interval_evaluate(tree.right, box)
        return (tree.left_weight * llo + tree.right_weight * rlo,
                tree.left_weight * lhi + tree.right_weight * rhi)
    raise TypeError(f"unexpected node {tree!r}")


# ---------------------------------------------------------------------------
# decomposition


@dataclass(frozen=True)
class Case1:
    """Ceiling-free outcome: the tree is the stated affine function."""

    form: AffineForm


@dataclass(frozen=True)
class Case2:
    """Outcome ``gamma * ceil(g1) + g2`` with gamma > 0."""

    gamma: Fraction
    g1: ChvatalTree
    g2: ChvatalTree

    def evaluate(self, point: Point) -> Fraction:
        return (self.gamma * Fraction(rational_ceil(self.g1.evaluate(point)))
                + self.g2.evaluate(point))


Decomposition = Union[Case1, Case2]


def decompose(tree: ChvatalTree) -> Decomposition:
    """Split a tree into Case1 (no ceilings) or Case2 ``gamma*ceil(g1)+g2``.

    Case2 always satisfies ``cc(g1) + cc(g2) + 1 <= cc(tree)`` and the
    reassembled expression equals the tree at every point.  Zero weights are
    legal in trees but never become the Case2 gamma; a zero-weighted branch
    with ceilings degenerates to ``1*ceil(0) + rest``.
    """
    if tree.cc == 0:
        return Case1(tree_as_affine(tree))

    if isinstance(tree, Ceil):
        return Case2(Fraction(1), tree.child, ZERO_TREE)

    if isinstance(tree, Scale):
        if tree.weight == 0:
            return Case2(Fraction(1), ZERO_TREE, ZERO_TREE)
        inner = decompose(tree.child)
        assert isinstance(inner, Case2)  # cc(child) = cc(tree) >= 1
        return Case2(tree.weight * inner.gamma, inner.g1,
                     Scale(tree.weight, inner.g2))

    if isinstance(tree, Sum):
        a, left, b, right = (tree.left_weight, tree.left,
                             tree.right_weight, tree.right)
        if a > 0 and left.cc >= 1:
            inner = decompose(left)
            assert isinstance(inner, Case2)
            return Case2(a * inner.gamma, inner.g1,
                         Sum(a, inner.g2, b, right))
        if b > 0 and right.cc >= 1:
            inner = decompose(right)
            assert isinstance(inner, Case2)
            return Case2(b * inner.gamma, inner.g1,
                         Sum(a, left, b, inner.g2))
        # Every ceiling sits under a zero weight; the function is affine but
        # cc(tree) >= 1 forces a (degenerate) Case2.
        if a > 0:
            rest: ChvatalTree = Scale(a, left)
        elif b > 0:
            rest = Scale(b, right)
        else:
            rest = ZERO_TREE
        return Case2(Fraction(1), ZERO_TREE, rest)

    raise TypeError(f"unexpected node {tree!r}")


def compose_affine(tree: ChvatalTree,
                   mapping: Mapping[int, AffineForm]) -> ChvatalTree:
    """Substitute an affine map into every leaf.

    The substitution happens only at leaves, so the ceiling count and the
    node structure are preserved; if every leaf is homogeneous and the map
    is linear, the result's leaves stay homogeneous.
    """
    if isinstance(tree, Leaf):
        return Leaf(tree.form.substitute(mapping))
    if isinstance(tree, Ceil):
        return Ceil(compose_affine(tree.child, mapping))
    if isinstance(tree, Scale):
        return Scale(tree.weight, compose_affine(tree.child, mapping))
    if isinstance(tree, Sum):
        return Sum(tree.left_weight, compose_affine(tree.left, mapping),
                   tree.right_weight, compose_affine(tree.right, mapping))
    raise TypeError(f"unexpected node {tree!r}")


def is_homogeneous(tree: ChvatalTree) -> bool:
    """True when every leaf has zero constant term."""
    return all(form.const == 0 for form in tree.leaves())


# ---------------------------------------------------------------------------
# text form
#
# tree := "(aff" term* ")" | "(ceil" tree ")"
#       | "(scale" rational tree ")" | "(sum" rational tree rational tree ")"
# term := [sign] rational ["*" varname]     (signs join terms, constants mix in)


def format_tree(tree: ChvatalTree) -> str:
    if isinstance(tree, Leaf):
        return f"(aff {_format_affine(tree.form)})"
    if isinstance(tree, Ceil):
        return f"(ceil {format_tree(tree.child)})"
    if isinstance(tree, Scale):
        return f"(scale {format_rational(tree.weight)} {format_tree(tree.child)})"
    if isinstance(tree, Sum):
        return (f"(sum {format_rational(tree.left_weight)} {format_tree(tree.left)}"
                f" {format_rational(tree.right_weight)} {format_tree(tree.right)})")
    raise TypeError(f"unexpected node {tree!r}")


def _format_affine(form: AffineForm) -> str:
    if form.is_zero:
        return "0"
    pieces: list[str] = []
    for vid, c in form.terms:
        mag = f"{format_rational(abs(c))}*{var_name(vid)}"
        if not pieces:
            pieces.append(mag if c > 0 else f"-{mag}")
        else:
            pieces.append(f"{'+' if c > 0 else '-'} {mag}")
    if form.const != 0:
        mag = format_rational(abs(form.const))
        if not pieces:
            pieces.append(mag if form.const > 0 else f"-{mag}")
        else:
            pieces.append(f"{'+' if form.const > 0 else '-'} {mag}")
    return " ".join(pieces)


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.items: list[tuple[str, int]] = []
        i = 0
        while i < len(text):
            ch = text[i]
            if ch.isspace():
                i += 1
            elif ch in "()*+-":
                self.items.append((ch, i))
                i += 1
            else:
                j = i
                while j < len(text) and not text[j].isspace() and text[j] not in "()*+-":
                    j += 1
                self.items.append((text[i:j], i))
                i = j
        self.pos = 0

    def peek(self):
        return self.items[self.pos] if self.pos < len(self.items) else (None, len(self.text))

    def next(self):
        tok = self.peek()
        if tok[0] is None:
            raise TreeSyntaxError("unexpected end of input", tok[1])
        self.pos += 1
        return tok

    def expect(self, value: str):
        tok, at = self.next()
        if tok != value:
            raise TreeSyntaxError(f"expected {value!r}, got {tok!r}", at)


def parse_tree(text: str) -> ChvatalTree:
    """Parse the tree grammar; raises TreeSyntaxError with a position."""
    toks = _Tokens(text)
    tree = _parse_node(toks)
    tok, at = toks.peek()
    if tok is not None:
        raise TreeSyntaxError(f"trailing input {tok!r}", at)
    return tree


def _parse_node(toks: _Tokens) -> ChvatalTree:
    toks.expect("(")
    head, at = toks.next()
    if head == "aff":
        form = _parse_affine_body(toks)
        toks.expect(")")
        return Leaf(form)
    if head == "ceil":
        child = _parse_node(toks)
        toks.expect(")")
        return Ceil(child)
    if head == "scale":
        weight, wat = _parse_rational_token(toks)
        if weight < 0:
            raise TreeSyntaxError("negative scale weight", wat)
        child = _parse_node(toks)
        toks.expect(")")
        return Scale(weight, child)
    if head == "sum":
        wl, lat = _parse_rational_token(toks)
        if wl < 0:
            raise TreeSyntaxError("negative sum weight", lat)
        left = _parse_node(toks)
        wr, rat = _parse_rational_token(toks)
        if wr < 0:
            raise TreeSyntaxError("negative sum weight", rat)
        right = _parse_node(toks)
        toks.expect(")")
        return Sum(wl, left, wr, right)
    raise TreeSyntaxError(f"unknown node kind {head!r}", at)


def _parse_rational_token(toks: _Tokens) -> tuple[Fraction, int]:
    tok, at = toks.next()
    sign = 1
    if tok in "+-":
        sign = -1 if tok == "-" else 1
        tok, at = toks.next()
    try:
        return sign * Fraction(tok), at
    except (ValueError, ZeroDivisionError):
        raise TreeSyntaxError(f"invalid rational {tok!r}", at) from None


def _parse_affine_body(toks: _Tokens) -> AffineForm:
    coeffs: dict[int, Fraction] = {}
    const = Fraction(0)
    first = True
    while True:
        tok, at = toks.peek()
        if tok == ")" or tok is None:
            break
        sign = 1
        if tok in "+-":
            toks.next()
            sign = -1 if tok == "-" else 1
        elif not first:
            raise TreeSyntaxError(f"expected '+' or '-' before {tok!r}", at)
        value, vat = _parse_rational_token(toks)
        value *= sign
        tok, _ = toks.peek()
        if tok == "*":
            toks.next()
            name, nat = toks.next()
            try:
                vid = intern_var(name)
            except ValueError:
                raise TreeSyntaxError(f"invalid variable name {name!r}", nat) from None
            coeffs[vid] = coeffs.get(vid, Fraction(0)) + value
        else:
            const += value
        first = False
    return AffineForm.make(coeffs, const)
