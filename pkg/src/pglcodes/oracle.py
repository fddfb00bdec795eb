"""Brute-force verification of the uniform cover, independent of counting.

The core sweep materializes the multiset product X * Y of two element sets
as a dense table of multiplicities, using nothing but table arithmetic and
composition; the verdicts then reduce to "is the table constant".  A
generic Cayley-graph code checker over explicit multiplication tables is
included so the projective statement can be confirmed without touching
the counting module at all.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field as dataclass_field
from typing import Iterable, Sequence

import numpy as np

from . import counting, gl2
from .field import CapacityError, FieldContext
from .gl2 import GroupElem

DEFAULT_SWEEP_LIMIT = 4096   # largest q^2 the dense sweeps accept
PGL_TABLE_LIMIT = 4096       # largest PGL order for full group tables


class GroupTableError(ValueError):
    """The multiplication table is not a closed group table."""


@dataclass(frozen=True)
class MultiplicityTable:
    """Dense multiplicity counts for a multiset product X * Y.

    At the "gl" level indices are packed pairs a*q2 + b; at the "pgl"
    level they run over the dense canonical element list of the quotient.
    """

    level: str
    counts: np.ndarray
    total: int

    def check_total(self) -> bool:
        return int(self.counts.sum()) == self.total


@dataclass(frozen=True)
class VerificationReport:
    q: int
    level: str
    expected: int
    observed_min: int
    observed_max: int
    element_count: int
    product_total: int
    passed: bool
    oracle: str
    closed_form_agrees: bool | None
    code_check_lambda: int | None
    square_test_convention: str
    elapsed_seconds: float
    workers: int

    def data_dict(self) -> dict:
        """The deterministic part of the report (no timings)."""
        return {
            "q": self.q,
            "level": self.level,
            "expected_multiplicity": self.expected,
            "observed_min": self.observed_min,
            "observed_max": self.observed_max,
            "element_count": self.element_count,
            "product_total": self.product_total,
            "pass": self.passed,
            "oracle": self.oracle,
            "closed_form_agrees": self.closed_form_agrees,
            "code_check_lambda": self.code_check_lambda,
            "square_test_convention": self.square_test_convention,
        }

    def meta_dict(self) -> dict:
        return {
            "elapsed_seconds": self.elapsed_seconds,
            "workers": self.workers,
        }


@dataclass(frozen=True)
class CodeCheckResult:
    """Outcome of the generic code check: a lambda, or a witness of failure."""

    ok: bool
    lam: int | None = None
    reason: str | None = None
    witness: int | None = None
    witness_count: int | None = None


def _require_sweep_capacity(ctx: FieldContext) -> None:
    if ctx.q2 > DEFAULT_SWEEP_LIMIT:
        raise CapacityError(
            f"product sweeps need q^2 <= {DEFAULT_SWEEP_LIMIT}, got {ctx.q2}")


def _sweep_chunk(ctx: FieldContext, ax: np.ndarray, bx: np.ndarray,
                 ys: Sequence[GroupElem], minlength: int,
                 lookup: np.ndarray | None) -> np.ndarray:
    counts = np.zeros(minlength, dtype=np.int64)
    q2 = np.int64(ctx.q2)
    for y in ys:
        ra, rb = gl2.compose_with_const(ctx, ax, bx, y)
        packed = ra * q2 + rb
        if lookup is not None:
            packed = lookup.take(packed)
        counts += np.bincount(packed, minlength=minlength)
    return counts


def _sweep(ctx: FieldContext, xs: Sequence[GroupElem], ys: Sequence[GroupElem],
           minlength: int, lookup: np.ndarray | None, workers: int) -> np.ndarray:
    ax, bx = gl2.elems_to_arrays(xs)
    if workers <= 1 or len(ys) < 2 * workers:
        return _sweep_chunk(ctx, ax, bx, ys, minlength, lookup)
    import multiprocessing as mp

    chunks = [list(ys[i::workers]) for i in range(workers)]
    args = [(ctx, ax, bx, chunk, minlength, lookup) for chunk in chunks if chunk]
    mp_ctx = mp.get_context("fork") if "fork" in mp.get_all_start_methods() \
        else mp.get_context()
    with mp_ctx.Pool(len(args)) as pool:
        parts = pool.starmap(_sweep_chunk, args)
    total = parts[0]
    for part in parts[1:]:
        total += part
    return total


def pgl_index(ctx: FieldContext) -> tuple[np.ndarray, np.ndarray]:
    """(canonical packed index, dense canonical ordinal) per packed index.

    Non-invertible packed indices share ordinal 0; callers only ever look
    up invertible ones, whose composites are again invertible.
    """
    canon = gl2.pgl_canonical_lookup(ctx)
    mask = gl2.invertible_mask(ctx)
    reps = np.unique(canon[mask])
    dense = np.zeros(ctx.q2 * ctx.q2, dtype=np.int64)
    dense[reps] = np.arange(len(reps))
    return canon, dense[canon]


def pgl_canonical_elems(ctx: FieldContext, elems: Iterable[GroupElem],
                        canon: np.ndarray) -> list[GroupElem]:
    q2 = ctx.q2
    packed = {int(canon[g.a * q2 + g.b]) for g in elems}
    return [GroupElem(*divmod(i, q2)) for i in sorted(packed)]


def product_multiset(ctx: FieldContext, xs: Sequence[GroupElem],
                     ys: Sequence[GroupElem], *, level: str = "gl",
                     workers: int = 1) -> MultiplicityTable:
    """Multiplicities of every product x*y over X x Y.

    At the "pgl" level both factors are canonicalized and deduplicated
    first, composition happens on representatives, and each product is
    re-canonicalized; the count array runs over the dense canonical list.
    """
    if not xs or not ys:
        raise ValueError("product factors must be nonempty")
    _require_sweep_capacity(ctx)
    if level == "gl":
        counts = _sweep(ctx, list(xs), list(ys), ctx.q2 * ctx.q2, None, workers)
        return MultiplicityTable("gl", counts, len(xs) * len(ys))
    if level != "pgl":
        raise ValueError(f"unknown level {level!r}")
    canon, dense = pgl_index(ctx)
    xs_c = pgl_canonical_elems(ctx, xs, canon)
    ys_c = pgl_canonical_elems(ctx, ys, canon)
    counts = _sweep(ctx, xs_c, ys_c, int(dense.max()) + 1, dense, workers)
    return MultiplicityTable("pgl", counts, len(xs_c) * len(ys_c))


def expected_gl_multiplicity(q: int) -> int:
    return q * (q - 1) if q % 2 == 0 else (q - 1) * (q - 1)


def expected_pgl_multiplicity(q: int) -> int:
    return q if q % 2 == 0 else q - 1


def _resolve_workers(workers: int | None, work_items: int) -> int:
    if workers is not None and workers >= 1:
        return workers
    cpus = os.cpu_count() or 1
    return max(1, min(cpus, work_items // 256))


def closed_multiplicity_table(ctx: FieldContext) -> np.ndarray:
    """Closed-form multiplicities over all packed indices (0 where singular)."""
    q2 = ctx.q2
    out = np.zeros(q2 * q2, dtype=np.int64)
    norms = ctx._norm
    for a in range(q2):
        for b in range(q2):
            if norms[a] != norms[b]:
                out[a * q2 + b] = counting.multiplicity_closed(ctx, a, b)
    return out


def verify_cover_gl(ctx: FieldContext, *, oracle: str = "brute-force",
                    workers: int | None = None) -> VerificationReport:
    """Check that the connection preimage times the dihedral preimage covers
    GL(2,q) uniformly, with multiplicity q(q-1) or (q-1)^2 by parity."""
    t0 = time.perf_counter()
    q = ctx.q
    expected = expected_gl_multiplicity(q)
    a_tilde = sorted(gl2.connection_preimage(ctx))
    d_tilde = gl2.dihedral_preimage(ctx)
    total = len(a_tilde) * len(d_tilde)
    mask = gl2.invertible_mask(ctx)
    closed_agrees: bool | None = None
    resolved_workers = 1
    if oracle == "closed-form":
        counts_on_group = closed_multiplicity_table(ctx)[mask]
        side_ok = int(counts_on_group.sum()) == total
    else:
        resolved_workers = _resolve_workers(workers, len(d_tilde))
        table = product_multiset(ctx, a_tilde, d_tilde, level="gl",
                                 workers=resolved_workers)
        counts_on_group = table.counts[mask]
        side_ok = not table.counts[~mask].any() and table.check_total()
        if oracle == "both":
            closed_agrees = bool(
                (counts_on_group == closed_multiplicity_table(ctx)[mask]).all())
    lo = int(counts_on_group.min())
    hi = int(counts_on_group.max())
    passed = (lo == hi == expected) and side_ok and closed_agrees is not False
    return VerificationReport(
        q=q, level="gl", expected=expected, observed_min=lo, observed_max=hi,
        element_count=int(mask.sum()), product_total=total, passed=passed,
        oracle=oracle, closed_form_agrees=closed_agrees, code_check_lambda=None,
        square_test_convention=counting.SQUARE_TEST_CONVENTION,
        elapsed_seconds=time.perf_counter() - t0, workers=resolved_workers)


def _pgl_closed_multiplicities(ctx: FieldContext) -> np.ndarray:
    """Per-class multiplicities implied by the closed GL table.

    Summing the closed table over a scalar class must give (q-1)^2 times
    the projective multiplicity; a non-divisible sum marks disagreement.
    """
    canon, dense = pgl_index(ctx)
    closed = closed_multiplicity_table(ctx)
    sums = np.zeros(int(dense.max()) + 1, dtype=np.int64)
    np.add.at(sums, dense, closed)
    scale = (ctx.q - 1) * (ctx.q - 1)
    if (sums % scale).any():
        return np.full_like(sums, -1)
    return sums // scale


def verify_cover_pgl(ctx: FieldContext, *, oracle: str = "brute-force",
                     workers: int | None = None,
                     code_check: bool | None = None) -> VerificationReport:
    """Check the projective statement: the connection set times the dihedral
    subgroup covers PGL(2,q) exactly q or q-1 times by parity."""
    t0 = time.perf_counter()
    q = ctx.q
    expected = expected_pgl_multiplicity(q)
    a_tilde = sorted(gl2.connection_preimage(ctx))
    d_tilde = gl2.dihedral_preimage(ctx)
    closed_agrees: bool | None = None
    resolved_workers = 1
    if oracle == "closed-form":
        counts = _pgl_closed_multiplicities(ctx)
        element_count = len(counts)
        total = (len(a_tilde) // (q - 1)) * 2 * (q + 1)
        side_ok = bool((counts >= 0).all()) and int(counts.sum()) == total
    else:
        resolved_workers = _resolve_workers(workers, len(d_tilde))
        table = product_multiset(ctx, a_tilde, d_tilde, level="pgl",
                                 workers=resolved_workers)
        counts = table.counts
        element_count = len(counts)
        total = table.total
        side_ok = table.check_total()
        if oracle == "both":
            closed_agrees = bool((counts == _pgl_closed_multiplicities(ctx)).all())
    lo = int(counts.min())
    hi = int(counts.max())
    lam_check: int | None = None
    if code_check is None:
        code_check = gl2.pgl_order_total(ctx) <= PGL_TABLE_LIMIT
    if code_check:
        group = pgl_group_table(ctx)
        result = cayley_code_check(group,
                                   pgl_element_ordinals(ctx, a_tilde),
                                   pgl_element_ordinals(ctx, d_tilde))
        lam_check = result.lam if result.ok else -1
    passed = (lo == hi == expected) and side_ok \
        and closed_agrees is not False \
        and (lam_check is None or lam_check == expected)
    return VerificationReport(
        q=q, level="pgl", expected=expected, observed_min=lo, observed_max=hi,
        element_count=element_count, product_total=total, passed=passed,
        oracle=oracle, closed_form_agrees=closed_agrees,
        code_check_lambda=lam_check,
        square_test_convention=counting.SQUARE_TEST_CONVENTION,
        elapsed_seconds=time.perf_counter() - t0, workers=resolved_workers)


# -- generic Cayley code checking over explicit tables ---------------------


@dataclass
class GroupTable:
    """A finite group given by a 0-based multiplication table."""

    mul: np.ndarray
    identity: int = dataclass_field(init=False)
    inv: np.ndarray = dataclass_field(init=False)

    def __post_init__(self) -> None:
        table = np.asarray(self.mul)
        if table.ndim != 2 or table.shape[0] != table.shape[1]:
            raise GroupTableError("multiplication table must be square")
        n = table.shape[0]
        if n == 0:
            raise GroupTableError("group must be nonempty")
        if table.min() < 0 or table.max() >= n:
            raise GroupTableError("table entries leave the element range")
        self.mul = table
        rng = np.arange(n)
        ident = None
        for e in range(n):
            if (table[e] == rng).all() and (table[:, e] == rng).all():
                ident = e
                break
        if ident is None:
            raise GroupTableError("table has no identity element")
        self.identity = ident
        inv = np.full(n, -1, dtype=np.int64)
        rows, cols = np.nonzero(table == ident)
        inv[rows] = cols
        if (inv < 0).any() or (table[rng, inv] != ident).any() \
                or (table[inv, rng] != ident).any():
            raise GroupTableError("some element has no two-sided inverse")
        self.inv = inv

    @property
    def order(self) -> int:
        return self.mul.shape[0]


def pgl_group_table(ctx: FieldContext) -> GroupTable:
    """Multiplication table of PGL(2,q) over its canonical element list."""
    n = gl2.pgl_order_total(ctx)
    if n > PGL_TABLE_LIMIT:
        raise CapacityError(
            f"full PGL table needs order <= {PGL_TABLE_LIMIT}, got {n}")
    canon, dense = pgl_index(ctx)
    mask = gl2.invertible_mask(ctx)
    reps = np.unique(canon[mask])
    q2 = ctx.q2
    elems = [GroupElem(*divmod(int(r), q2)) for r in reps]
    table = np.empty((n, n), dtype=np.int64)
    ax, bx = gl2.elems_to_arrays(elems)
    for j, y in enumerate(elems):
        ra, rb = gl2.compose_with_const(ctx, ax, bx, y)
        table[:, j] = dense.take(ra * np.int64(q2) + rb)
    return GroupTable(table)


def pgl_element_ordinals(ctx: FieldContext, elems: Iterable[GroupElem]) -> list[int]:
    """Dense ordinals of the projective images of GL elements, deduplicated."""
    canon, dense = pgl_index(ctx)
    q2 = ctx.q2
    return sorted({int(dense[g.a * q2 + g.b]) for g in elems})


def cayley_code_check(group: GroupTable, a_set: Sequence[int],
                      b_set: Sequence[int]) -> CodeCheckResult:
    """Whether b_set covers the group uniformly through a_set.

    Requires a_set to be a nonempty proper subset, identity-free and
    closed under inverses (the connection-set conditions of a Cayley
    graph).  Returns the uniform multiplicity lambda, or the first
    minimal-count element as a witness when the cover is not uniform.
    """
    n = group.order
    a_idx = np.array(sorted({int(a) for a in a_set}), dtype=np.int64)
    b_idx = np.array(sorted({int(b) for b in b_set}), dtype=np.int64)
    if a_idx.size == 0:
        return CodeCheckResult(False, reason="connection set is empty")
    if a_idx.size >= n:
        return CodeCheckResult(False, reason="connection set is not proper")
    if b_idx.size == 0:
        return CodeCheckResult(False, reason="code set is empty")
    if a_idx.min() < 0 or a_idx.max() >= n or b_idx.min() < 0 or b_idx.max() >= n:
        return CodeCheckResult(False, reason="element out of range")
    if group.identity in a_idx:
        return CodeCheckResult(False, reason="connection set contains identity")
    if set(group.inv[a_idx].tolist()) != set(a_idx.tolist()):
        return CodeCheckResult(False, reason="connection set is not inverse-closed")
    products = group.mul[np.ix_(a_idx, b_idx)]
    counts = np.bincount(products.ravel(), minlength=n)
    lo, hi = int(counts.min()), int(counts.max())
    if lo != hi:
        witness = int(np.argmin(counts))
        return CodeCheckResult(False, reason="cover is not uniform",
                               witness=witness, witness_count=lo)
    return CodeCheckResult(True, lam=lo)


def pgl_order_consistency(ctx: FieldContext, g: GroupElem) -> bool:
    """Membership in the connection set matches the projective order test:
    order divides q+1 and exceeds 2."""
    order = gl2.pgl_order(ctx, g)
    by_order = (ctx.q + 1) % order == 0 and order > 2
    return by_order == gl2.in_connection_preimage(ctx, g)
