"""Exact Fourier-Motzkin elimination over rational inequality systems.

Two system kinds share the elimination logic:

* `LinearSystem` -- rows ``coeffs . x >= rhs`` where the right-hand side is
  an affine form in *parameter* variables disjoint from the eliminated
  space (a plain rational is the constant form).  Combining rows keeps the
  rhs affine, which is what the projection proofs do with their b vectors.
* `SymbolicSystem` -- rows whose right-hand sides are Chvatal trees; the
  elimination multipliers are nonnegative, so combined right-hand sides
  only gain Sum/Scale nodes and ceiling counts never increase.

`project_cone` computes generators of ``{lam >= 0 : lam . M = 0}`` by the
same pairwise combination process, tracking multipliers instead of trees;
the closure pipeline rebuilds trees only for surviving conditions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Optional, Sequence

from .rationals import rational, rational_ceil, rational_floor
from .trees import AffineForm, ChvatalTree, Sum
from .varpool import var_name

Coeffs = tuple[Fraction, ...]


# ---------------------------------------------------------------------------
# numeric systems (affine-parametric right-hand sides)


@dataclass(frozen=True)
class LinearSystem:
    """Rows ``coeffs . vars >= rhs``; relation is fixed as >=.

    Construction canonicalizes: each row is scaled so its first nonzero
    coefficient is +-1, duplicates are removed, vacuous constant conditions
    ``0 >= c`` with c <= 0 are dropped and c > 0 marks the system
    infeasible.  Parametric conditions (zero coefficients, non-constant
    rhs) are kept.
    """

    vars: tuple[int, ...]
    rows: tuple[tuple[Coeffs, AffineForm], ...]
    infeasible: bool = False

    @staticmethod
    def make(vars: Sequence[int],
             rows: Iterable[tuple[Sequence, object]],
             infeasible: bool = False) -> "LinearSystem":
        vars = tuple(vars)
        var_set = set(vars)
        seen = set()
        kept = []
        for coeffs, rhs in rows:
            coeffs = tuple(rational(c) for c in coeffs)
            if len(coeffs) != len(vars):
                raise ValueError("row length does not match variable count")
            if not isinstance(rhs, AffineForm):
                rhs = AffineForm.constant(rational(rhs))
            if var_set & set(rhs.variables()):
                raise ValueError("rhs parameters overlap eliminated variables")
            row = _canonical_row(coeffs, rhs)
            if row is None:
                continue
            if row == ():
                infeasible = True
                continue
            if row not in seen:
                seen.add(row)
                kept.append(row)
        if infeasible:
            kept = []
        return LinearSystem(vars, tuple(kept), infeasible)

    def var_index(self, var: int) -> int:
        try:
            return self.vars.index(var)
        except ValueError:
            raise ValueError(f"variable {var_name(var)!r} not in system") from None


def _canonical_row(coeffs: Coeffs, rhs: AffineForm):
    """Scale to +-1 leading coefficient; None = vacuous, () = infeasible."""
    lead = next((c for c in coeffs if c != 0), None)
    if lead is None:
        if rhs.is_constant:
            return None if rhs.const <= 0 else ()
        lead = next((c for _, c in rhs.terms), rhs.const)
    scale = 1 / abs(lead)
    if scale != 1:
        coeffs = tuple(c * scale for c in coeffs)
        rhs = rhs.scaled(scale)
    return (coeffs, rhs)


def eliminate_var(system, var: int):
    """Project out one variable by combining opposite-sign rows.

    Rows not mentioning the variable pass through; every positive/negative
    pair is combined with the multipliers ``1/c_pos`` and ``1/(-c_neg)``
    (both nonnegative), in lexicographic parent order.
    """
    if isinstance(system, SymbolicSystem):
        return _eliminate_var_symbolic(system, var)
    idx = system.var_index(var)
    new_vars = system.vars[:idx] + system.vars[idx + 1:]
    if system.infeasible:
        return LinearSystem(new_vars, (), True)
    pos, neg, zero = [], [], []
    for coeffs, rhs in system.rows:
        c = coeffs[idx]
        (pos if c > 0 else neg if c < 0 else zero).append((coeffs, rhs))

    def drop(coeffs: Coeffs) -> Coeffs:
        return coeffs[:idx] + coeffs[idx + 1:]

    out: list[tuple[Coeffs, AffineForm]] = [(drop(c), r) for c, r in zero]
    for cp, rp in pos:
        wp = 1 / cp[idx]
        for cn, rn in neg:
            wn = 1 / -cn[idx]
            coeffs = tuple(wp * a + wn * b for a, b in zip(drop(cp), drop(cn)))
            out.append((coeffs, rp.scaled(wp) + rn.scaled(wn)))
    return LinearSystem.make(new_vars, out)


def eliminate_all(system, order: Sequence[int]):
    for var in order:
        system = eliminate_var(system, var)
    return system


def prune(system: LinearSystem, lp: bool = False) -> LinearSystem:
    """Drop rows implied by a single other row; optionally LP-redundant ones.

    Same-direction rows keep only the largest constant rhs.  With
    ``lp=True``, each remaining constant-rhs row is dropped when the exact
    minimum of its left-hand side under the other rows already meets it.
    Parametric rows are only deduplicated (done at construction).
    """
    if system.infeasible:
        return system
    best: dict[Coeffs, AffineForm] = {}
    order: list[Coeffs] = []
    kept_parametric: list[tuple[Coeffs, AffineForm]] = []
    for coeffs, rhs in system.rows:
        if not rhs.is_constant:
            kept_parametric.append((coeffs, rhs))
            continue
        cur = best.get(coeffs)
        if cur is None:
            best[coeffs] = rhs
            order.append(coeffs)
        elif rhs.const > cur.const:
            best[coeffs] = rhs
    rows = [(c, best[c]) for c in order]
    if lp and rows:
        rows = _lp_prune(system.vars, rows)
    return LinearSystem.make(system.vars, rows + kept_parametric)


def _lp_prune(vars, rows):
    kept = list(rows)
    i = 0
    while i < len(kept):
        coeffs, rhs = kept[i]
        others = kept[:i] + kept[i + 1:]
        status, value = lp_min(LinearSystem.make(vars, others), coeffs)
        if status == "ok" and value >= rhs.const:
            kept.pop(i)
        else:
            i += 1
    return kept


def lp_min(system: LinearSystem, objective: Sequence) -> tuple[str, Optional[Fraction]]:
    """Exact ``min{obj . x : rows}`` by eliminating x from ``t >= obj . x``.

    Returns ("infeasible", None), ("unbounded", None) or ("ok", value).
    """
    if system.infeasible:
        return "infeasible", None
    objective = tuple(rational(c) for c in objective)
    # Extra column for t; t >= obj.x becomes (-obj | 1) . (x, t) >= 0.
    rows = [(c + (Fraction(0),), r) for c, r in system.rows]
    rows.append((tuple(-c for c in objective) + (Fraction(1),), AffineForm()))
    t_marker = -1  # positional: t is the last column
    sys2 = LinearSystem.make(tuple(system.vars) + (t_marker,), rows)
    for var in system.vars:
        sys2 = eliminate_var(sys2, var)
    if sys2.infeasible:
        return "infeasible", None
    bounds = [r.const / c[0] for c, r in sys2.rows if c[0] > 0]
    if any(c[0] < 0 for c, _ in sys2.rows):
        raise AssertionError("upper bound on epigraph variable")
    if not bounds:
        return "unbounded", None
    return "ok", max(bounds)


def feasible_point(system: LinearSystem) -> Optional[dict[int, Fraction]]:
    """Exact rational witness for a constant-rhs system, or None.

    Eliminates variables back to front, then back-substitutes picking the
    largest lower bound (falling back to the smallest upper bound, then 0),
    which keeps witnesses small and canonical.
    """
    if system.infeasible:
        return None
    for _, rhs in system.rows:
        if not rhs.is_constant:
            raise ValueError("feasible_point needs constant right-hand sides")
    if not system.vars:
        return {}
    var = system.vars[-1]
    idx = len(system.vars) - 1
    sub = feasible_point(eliminate_var(system, var))
    if sub is None:
        return None
    lower, upper = [], []
    for coeffs, rhs in system.rows:
        c = coeffs[idx]
        if c == 0:
            continue
        rest = rhs.const - sum(coeffs[j] * sub[v]
                               for j, v in enumerate(system.vars[:-1])
                               if coeffs[j] != 0)
        (lower if c > 0 else upper).append(rest / c)
    if lower:
        value = max(lower)
    elif upper:
        value = min(upper)
    else:
        value = Fraction(0)
    sub[var] = value
    return sub


# ---------------------------------------------------------------------------
# symbolic systems (Chvatal-tree right-hand sides)


@dataclass(frozen=True)
class SymbolicSystem:
    """Rows ``coeffs . vars >= rhs_tree`` with Chvatal-tree right-hand sides."""

    vars: tuple[int, ...]
    rows: tuple[tuple[Coeffs, ChvatalTree], ...]

    @staticmethod
    def make(vars: Sequence[int],
             rows: Iterable[tuple[Sequence, ChvatalTree]]) -> "SymbolicSystem":
        vars = tuple(vars)
        seen = set()
        kept = []
        for coeffs, rhs in rows:
            coeffs = tuple(rational(c) for c in coeffs)
            if len(coeffs) != len(vars):
                raise ValueError("row length does not match variable count")
            key = (coeffs, rhs)
            if key not in seen:
                seen.add(key)
                kept.append(key)
        return SymbolicSystem(vars, tuple(kept))

    def var_index(self, var: int) -> int:
        try:
            return self.vars.index(var)
        except ValueError:
            raise ValueError(f"variable {var_name(var)!r} not in system") from None


def _eliminate_var_symbolic(system: SymbolicSystem, var: int) -> SymbolicSystem:
    idx = system.var_index(var)
    new_vars = system.vars[:idx] + system.vars[idx + 1:]
    pos, neg, zero = [], [], []
    for coeffs, rhs in system.rows:
        c = coeffs[idx]
        (pos if c > 0 else neg if c < 0 else zero).append((coeffs, rhs))

    def drop(coeffs: Coeffs) -> Coeffs:
        return coeffs[:idx] + coeffs[idx + 1:]

    out: list[tuple[Coeffs, ChvatalTree]] = [(drop(c), r) for c, r in zero]
    for cp, rp in pos:
        wp = 1 / cp[idx]
        for cn, rn in neg:
            wn = 1 / -cn[idx]
            coeffs = tuple(wp * a + wn * b for a, b in zip(drop(cp), drop(cn)))
            out.append((coeffs, Sum(wp, rp, wn, rn)))
    return SymbolicSystem.make(new_vars, out)


# ---------------------------------------------------------------------------
# projection cone generators


def _normalize_mult(items: Iterable[tuple[int, Fraction]]) -> tuple[tuple[int, int], ...]:
    """Scale a nonnegative rational multiplier to a primitive integer one."""
    items = sorted((k, v) for k, v in items if v != 0)
    lcm = 1
    for _, v in items:
        lcm = lcm * v.denominator // gcd(lcm, v.denominator)
    ints = [(k, int(v * lcm)) for k, v in items]
    g = 0
    for _, v in ints:
        g = gcd(g, v)
    if g > 1:
        ints = [(k, v // g) for k, v in ints]
    return tuple(ints)


def project_cone(matrix: Sequence[Sequence]) -> list[tuple[tuple[int, int], ...]]:
    """Generators of ``{lam >= 0 : lam . M = 0}`` as primitive integer rows.

    Fourier-Motzkin elimination of every column with multiplier tracking.
    Pruning keeps the generated cone exact: duplicates are removed and a row
    whose multiplier componentwise dominates a parallel row's multiplier is
    dropped (the difference is itself a valid multiplier).
    """
    n_rows = len(matrix)
    if n_rows == 0:
        return []
    width = len(matrix[0])
    state: list[tuple[Coeffs, dict[int, Fraction]]] = []
    conditions: dict[tuple, None] = {}

    def emit(vec: Coeffs, mult: dict[int, Fraction]):
        if all(c == 0 for c in vec):
            if mult:
                conditions.setdefault(_normalize_mult(mult.items()))
        else:
            state.append((vec, mult))

    for i, row in enumerate(matrix):
        emit(tuple(rational(c) for c in row), {i: Fraction(1)})

    remaining = list(range(width))
    while remaining:
        counts = []
        for col in remaining:
            p = sum(1 for vec, _ in state if vec[col] > 0)
            n = sum(1 for vec, _ in state if vec[col] < 0)
            counts.append((p * n, col, p, n))
        counts.sort()
        _, col, _, _ = counts[0]
        remaining.remove(col)

        pos, neg, zero = [], [], []
        for vec, mult in state:
            c = vec[col]
            (pos if c > 0 else neg if c < 0 else zero).append((vec, mult))
        state = []
        for vec, mult in zero:
            emit(vec, mult)
        for vp, mp in pos:
            wp = 1 / vp[col]
            for vn, mn in neg:
                wn = 1 / -vn[col]
                vec = tuple(wp * a + wn * b for a, b in zip(vp, vn))
                mult = {k: wp * v for k, v in mp.items()}
                for k, v in mn.items():
                    mult[k] = mult.get(k, Fraction(0)) + wn * v
                emit(vec, mult)
        state = _prune_multiplier_rows(state)

    out = list(conditions)
    out = _prune_condition_multipliers(out)
    out.sort()
    return out


def _dominates(candidate: dict, kept: dict, kept_first_key: int) -> bool:
    """candidate >= alpha * kept componentwise with alpha cancelling the
    kept multiplier's first entry exactly.

    Then candidate = alpha*kept + mu where mu is a valid multiplier with
    strictly smaller support, which makes dropping the candidate exact
    (well-founded induction on support size).
    """
    base = candidate.get(kept_first_key, Fraction(0))
    if base == 0:
        return False
    alpha = base / kept[kept_first_key]
    return all(candidate.get(k, Fraction(0)) >= alpha * v for k, v in kept.items())


def _prune_group(group: list[tuple[tuple, dict]]):
    """Keep a generating subset of parallel rows; compare to kept rows only."""

    def size_key(item):
        _, mult = item
        return (len(mult), sorted(mult.items()))

    kept: list[tuple[tuple, dict, int, int]] = []  # vec, mult, mask, first key
    for vec, mult in sorted(group, key=size_key):
        mask = 0
        for k in mult:
            mask |= 1 << k
        dominated = False
        for _, other, omask, ofirst in kept:
            if omask & ~mask:
                continue
            if other == mult or _dominates(mult, other, ofirst):
                dominated = True
                break
        if not dominated:
            kept.append((vec, mult, mask, min(mult)))
    return [(vec, mult) for vec, mult, _, _ in kept]


def _prune_multiplier_rows(state):
    groups: dict[tuple, list[tuple[tuple, dict]]] = {}
    order: list[tuple] = []
    for vec, mult in state:
        lead = next(c for c in vec if c != 0)
        scale = 1 / abs(lead)
        key = tuple(c * scale for c in vec)
        entry = {k: v * scale for k, v in mult.items()}
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append((key, entry))
    kept = []
    for key in order:
        kept.extend(_prune_group(groups[key]))
    return kept


def _prune_condition_multipliers(conds: list[tuple[tuple[int, int], ...]]):
    group = [(cond, {k: Fraction(v) for k, v in cond}) for cond in conds]
    kept = _prune_group(group)
    return [cond for cond, _ in kept]


def infeasibility_certificate(matrix: Sequence[Sequence],
                              rhs_values: Sequence[Fraction]
                              ) -> Optional[tuple[tuple[int, int], ...]]:
    """Farkas certificate for ``{z : M z >= rhs}`` being empty, or None.

    Returns a primitive integer multiplier lam >= 0 with lam.M = 0 and
    lam.rhs > 0 when the system has no real solution.  Numeric FM with
    multiplier tracking; parallel rows keep only the strongest right-hand
    side, which preserves infeasibility and keeps the search tiny.
    """
    state: list[tuple[Coeffs, Fraction, dict[int, Fraction]]] = []
    for i, row in enumerate(matrix):
        vec = tuple(rational(c) for c in row)
        rhs = rational(rhs_values[i])
        if all(c == 0 for c in vec):
            if rhs > 0:
                return ((i, 1),)
            continue
        state.append((vec, rhs, {i: Fraction(1)}))
    width = len(matrix[0]) if matrix else 0
    remaining = list(range(width))
    while remaining and state:
        counts = sorted(
            (sum(1 for v, _, _ in state if v[col] > 0)
             * sum(1 for v, _, _ in state if v[col] < 0), col)
            for col in remaining)
        col = counts[0][1]
        remaining.remove(col)
        pos, neg, zero = [], [], []
        for row in state:
            c = row[0][col]
            (pos if c > 0 else neg if c < 0 else zero).append(row)
        merged: dict[Coeffs, tuple[Fraction, dict]] = {}

        def push(vec, rhs, mult):
            lead = next((c for c in vec if c != 0), None)
            if lead is None:
                if rhs > 0:
                    raise _Infeasible(mult)
                return
            scale = 1 / abs(lead)
            key = tuple(c * scale for c in vec)
            entry = (rhs * scale, {k: v * scale for k, v in mult.items()})
            cur = merged.get(key)
            if cur is None or entry[0] > cur[0]:
                merged[key] = entry

        try:
            for vec, rhs, mult in zero:
                push(vec, rhs, mult)
            for vp, rp, mp in pos:
                wp = 1 / vp[col]
                for vn, rn, mn in neg:
                    wn = 1 / -vn[col]
                    vec = tuple(wp * a + wn * b for a, b in zip(vp, vn))
                    combined = {k: wp * v for k, v in mp.items()}
                    for k, v in mn.items():
                        combined[k] = combined.get(k, Fraction(0)) + wn * v
                    push(vec, wp * rp + wn * rn, combined)
        except _Infeasible as hit:
            return _normalize_mult(hit.mult.items())
        state = [(vec, rhs, mult) for vec, (rhs, mult) in merged.items()]
    return None


class _Infeasible(Exception):
    def __init__(self, mult):
        self.mult = mult


# ---------------------------------------------------------------------------
# integer point search over an eliminated chain


class IntegerChain:
    """Prebuilt elimination chain to enumerate integer points exactly.

    Built once per system; `search` instantiates the parametric right-hand
    sides at a parameter point and walks the chain back to front, so each
    variable ranges over its exact projected interval given the previous
    choices (clipped to the search bound).
    """

    def __init__(self, system: LinearSystem, order: Sequence[int] | None = None):
        self.order = tuple(order) if order is not None else system.vars
        chain = [system]
        for var in self.order:
            chain.append(eliminate_var(chain[-1], var))
        self.chain = chain

    def search(self, params: Mapping[int, Fraction], bound: int,
               box: Mapping[int, tuple[Fraction, Fraction]] | None = None
               ) -> Optional[dict[int, Fraction]]:
        if self.chain[-1].infeasible:
            return None
        inst = []
        for sysk in self.chain:
            rows = []
            feasible = True
            for coeffs, rhs in sysk.rows:
                value = rhs.evaluate(params) if not rhs.is_constant else rhs.const
                if all(c == 0 for c in coeffs):
                    if value > 0:
                        feasible = False
                        break
                    continue
                rows.append((coeffs, value))
            if not feasible:
                return None
            inst.append((sysk.vars, rows))

        assignment: dict[int, Fraction] = {}
        n = len(self.order)

        def rec(level: int) -> bool:
            # level counts eliminated variables still unassigned; chain[level]
            # has vars order[level:] relative ordering preserved by eliminate.
            if level == 0:
                return True
            var = self.order[level - 1]
            vars_k, rows_k = inst[level - 1]
            idx = vars_k.index(var)
            lo, hi = None, None
            for coeffs, value in rows_k:
                c = coeffs[idx]
                if c == 0:
                    continue
                rest = value
                for j, v in enumerate(vars_k):
                    if j != idx and coeffs[j] != 0:
                        rest -= coeffs[j] * assignment[v]
                b = rest / c
                if c > 0:
                    lo = b if lo is None or b > lo else lo
                else:
                    hi = b if hi is None or b < hi else hi
            lo_i = rational_ceil(lo) if lo is not None else -bound
            hi_i = rational_floor(hi) if hi is not None else bound
            lo_i = max(lo_i, -bound)
            hi_i = min(hi_i, bound)
            if box and var in box:
                blo, bhi = box[var]
                lo_i = max(lo_i, rational_ceil(blo))
                hi_i = min(hi_i, rational_floor(bhi))
            for value in range(lo_i, hi_i + 1):
                assignment[var] = Fraction(value)
                if rec(level - 1):
                    return True
            assignment.pop(var, None)
            return False

        if rec(n):
            return dict(assignment)
        return None
