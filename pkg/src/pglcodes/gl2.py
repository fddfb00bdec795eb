"""GL(2,q) modeled as invertible q-linearized maps x -> a*x + b*x^q on GF(q^2).

An element is the coefficient pair (a, b); the map it induces is invertible
exactly when norm(a) != norm(b), and distinct pairs induce distinct maps.
The scalar maps x -> c*x with c in GF(q)* form the center, and dividing by
them gives PGL(2,q).  Everything below is a pure function of a
:class:`~pglcodes.field.FieldContext` and its arguments.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple

import numpy as np

from .field import DomainError, FieldContext


class NotInvertibleError(ValueError):
    """The coefficient pair has equal norms and induces a singular map."""


class GroupElem(NamedTuple):
    a: int
    b: int


class _InfinityType:
    """Tag for the point at infinity in conjugation parameters."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITY"


INFINITY = _InfinityType()

SParam = "int | _InfinityType"


def identity() -> GroupElem:
    return GroupElem(1, 0)


def is_invertible(ctx: FieldContext, a: int, b: int) -> bool:
    return ctx.norm(a) != ctx.norm(b)


def make(ctx: FieldContext, a: int, b: int) -> GroupElem:
    """The element (a, b), rejecting singular pairs."""
    if ctx.norm(a) == ctx.norm(b):
        raise NotInvertibleError(
            f"pair ({a}, {b}) has equal norms and is not invertible")
    return GroupElem(a, b)


def apply(ctx: FieldContext, g: GroupElem, x: int) -> int:
    """Evaluate the map of g at the point x."""
    return ctx.add(ctx.mul(g.a, x), ctx.mul(g.b, ctx.frobenius(x)))


def compose(ctx: FieldContext, g: GroupElem, h: GroupElem) -> GroupElem:
    """g after h: (a,b)(c,d) = (ac + b*d^q, ad + b*c^q)."""
    a, b = g
    c, d = h
    return GroupElem(
        ctx.add(ctx.mul(a, c), ctx.mul(b, ctx.frobenius(d))),
        ctx.add(ctx.mul(a, d), ctx.mul(b, ctx.frobenius(c))),
    )


def inverse(ctx: FieldContext, g: GroupElem) -> GroupElem:
    a, b = g
    det = ctx.sub(ctx.norm(a), ctx.norm(b))
    if det == 0:
        raise NotInvertibleError(f"pair ({a}, {b}) is not invertible")
    inv_det = ctx.inv(det)
    return GroupElem(ctx.mul(ctx.frobenius(a), inv_det),
                     ctx.mul(ctx.neg(b), inv_det))


def power(ctx: FieldContext, g: GroupElem, e: int) -> GroupElem:
    if e < 0:
        return power(ctx, inverse(ctx, g), -e)
    r = identity()
    while e:
        if e & 1:
            r = compose(ctx, r, g)
        g = compose(ctx, g, g)
        e >>= 1
    return r


def scalar_conjugate(ctx: FieldContext, t: int, s) -> GroupElem:
    """The conjugate of the scalar map x -> t*x by conjugation parameter s.

    For finite s the coefficients are ((t*N(s) - t^q)/(N(s) - 1),
    (t - t^q)*s^q/(N(s) - 1)); the tag INFINITY yields the scalar map
    itself and s = 0 its Frobenius twin (t^q, 0).
    """
    if t == 0:
        raise DomainError("scalar map parameter t must be nonzero")
    if s is INFINITY:
        return GroupElem(t, 0)
    ns = ctx.norm(s)
    if ns == 1:
        raise DomainError(f"conjugation parameter {s} has norm 1")
    tq = ctx.frobenius(t)
    denom_inv = ctx.inv(ctx.sub(ns, 1))
    a = ctx.mul(ctx.sub(ctx.mul(t, ns), tq), denom_inv)
    b = ctx.mul(ctx.mul(ctx.sub(t, tq), ctx.frobenius(s)), denom_inv)
    return GroupElem(a, b)


def conjugacy_class(ctx: FieldContext, t: int) -> set[GroupElem]:
    """All conjugates of the scalar map x -> t*x.

    Size q(q-1) when t is outside GF(q); the singleton {(t, 0)} when t is
    a central parameter.
    """
    if t == 0:
        raise DomainError("t must be nonzero")
    out = {GroupElem(t, 0), GroupElem(ctx.frobenius(t), 0)}
    for s in ctx.units():
        if ctx.norm(s) != 1:
            out.add(scalar_conjugate(ctx, t, s))
    return out


def same_class(ctx: FieldContext, t: int, t2: int) -> bool:
    """Whether the scalar maps of t and t2 are conjugate: t2 in {t, t^q}."""
    if t == 0 or t2 == 0:
        raise DomainError("class parameters must be nonzero")
    return t2 == t or t2 == ctx.frobenius(t)


def generic_params(ctx: FieldContext) -> list[int]:
    """Nonzero s with norm(s) != 1; these conjugations move both coefficients
    off zero.  There are q^2 - q - 2 of them."""
    return [s for s in ctx.units() if ctx.norm(s) != 1]


def connection_params(ctx: FieldContext) -> list[int]:
    """Nonzero t with t^(2(q-1)) != 1, i.e. t^2 outside GF(q).

    These parametrize the conjugacy classes whose projective image has
    order dividing q+1 but larger than 2 -- the connection set of the
    Cayley graph under study.  The count is q(q-1) for even q and
    (q-1)^2 for odd q, and none of them lie in GF(q).
    """
    e = 2 * (ctx.q - 1)
    return [t for t in ctx.units() if ctx.pow(t, e) != 1]


def connection_reps(ctx: FieldContext) -> list[int]:
    """One representative per Frobenius pair {t, t^q} of connection params,
    keeping the smaller index."""
    return [t for t in connection_params(ctx) if t <= ctx.frobenius(t)]


def dihedral_preimage(ctx: FieldContext) -> list[GroupElem]:
    """The subgroup {(t,0), (0,t) : t != 0} of order 2(q^2-1).

    Its image in PGL(2,q) is a dihedral subgroup of order 2(q+1).
    """
    out = [GroupElem(t, 0) for t in ctx.units()]
    out += [GroupElem(0, t) for t in ctx.units()]
    return out


def connection_preimage(ctx: FieldContext) -> set[GroupElem]:
    """Union of the conjugacy classes over the canonical connection params.

    This is the full preimage in GL of the Cayley connection set; the
    classes are pairwise disjoint, so the size is |reps| * q(q-1).
    """
    out: set[GroupElem] = set()
    for t in connection_reps(ctx):
        out |= conjugacy_class(ctx, t)
    return out


def is_central(ctx: FieldContext, g: GroupElem) -> bool:
    """Whether g is a scalar map x -> c*x with c in GF(q)*."""
    return g.b == 0 and g.a != 0 and ctx.in_subfield(g.a)


def in_connection_preimage(ctx: FieldContext, g: GroupElem) -> bool:
    """Order test for membership: g^(q+1) central and g^2 not central.

    Must agree with set membership in :func:`connection_preimage` for
    every invertible pair.
    """
    if not is_central(ctx, power(ctx, g, ctx.q + 1)):
        return False
    return not is_central(ctx, power(ctx, g, 2))


def pgl_canonical(ctx: FieldContext, g: GroupElem) -> GroupElem:
    """Lexicographically smallest pair among the GF(q)* scalings of g."""
    best = g
    for lam in ctx.subfield:
        if lam == 0 or lam == 1:
            continue
        cand = GroupElem(ctx.mul(lam, g.a), ctx.mul(lam, g.b))
        if cand < best:
            best = cand
    return best


def pgl_order(ctx: FieldContext, g: GroupElem) -> int:
    """Multiplicative order of the image of g in PGL(2,q)."""
    h = g
    m = 1
    while not is_central(ctx, h):
        h = compose(ctx, h, g)
        m += 1
    return m


def enumerate_group(ctx: FieldContext) -> list[GroupElem]:
    """Every invertible pair, in (a, b) index order."""
    norms = ctx._norm
    return [GroupElem(a, b)
            for a in range(ctx.q2) for b in range(ctx.q2)
            if norms[a] != norms[b]]


def group_order(ctx: FieldContext) -> int:
    q2 = ctx.q2
    return (q2 - 1) * (q2 - ctx.q)


def pgl_order_total(ctx: FieldContext) -> int:
    return ctx.q * (ctx.q2 - 1)


# -- bulk (numpy) views used by the sweep oracle ---------------------------

def elems_to_arrays(elems: Iterable[GroupElem]) -> tuple[np.ndarray, np.ndarray]:
    pairs = np.array([(g.a, g.b) for g in elems], dtype=np.int64)
    return pairs[:, 0].copy(), pairs[:, 1].copy()


def compose_with_const(ctx: FieldContext, a: np.ndarray, b: np.ndarray,
                       h: GroupElem) -> tuple[np.ndarray, np.ndarray]:
    """Compose every (a[i], b[i]) with the fixed right factor h."""
    c, d = h
    col_c = ctx.mul_column(c)
    col_d = ctx.mul_column(d)
    col_cq = ctx.mul_column(ctx.frobenius(c))
    col_dq = ctx.mul_column(ctx.frobenius(d))
    ra = ctx.add_arr(col_c.take(a), col_dq.take(b))
    rb = ctx.add_arr(col_d.take(a), col_cq.take(b))
    return ra, rb


def invertible_mask(ctx: FieldContext) -> np.ndarray:
    """Boolean mask over packed indices a*q2+b marking invertible pairs."""
    norms = ctx.np_norm
    return (norms[:, None] != norms[None, :]).ravel()


def pgl_canonical_lookup(ctx: FieldContext) -> np.ndarray:
    """Packed index -> packed index of the canonical scaling, vectorized."""
    q2 = np.int64(ctx.q2)
    a = np.repeat(np.arange(ctx.q2, dtype=np.int64), ctx.q2)
    b = np.tile(np.arange(ctx.q2, dtype=np.int64), ctx.q2)
    best = a * q2 + b
    for lam in ctx.subfield:
        if lam == 0 or lam == 1:
            continue
        col = ctx.mul_column(lam)
        cand = col.take(a) * q2 + col.take(b)
        np.minimum(best, cand, out=best)
    return best
