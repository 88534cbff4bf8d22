"""Magic unitary verification and constructions on concrete representations.

A magic unitary is a square matrix of projections whose rows and columns each
sum to the identity; in-row and in-column orthogonality then follows.  The
comultiplication of the underlying quantum symmetry only ever appears here
through the convolution of two concrete families, w_{ij} = sum_k u_{ik} (x)
v_{kj}; the counit corresponds to the identity permutation representation.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .linalg import dagger, residual_norm
from .qis import Representation
from .reports import CheckReport, ResidualTracker


def permutation_rep(perm: tuple[int, ...]) -> Representation:
    """Exact 1x1 representation of a classical permutation: entries are the
    indicators [i == perm[j]] (perm given as the tuple of images of 1..n)."""
    n = len(perm)
    if sorted(perm) != list(range(1, n + 1)):
        raise ValueError(f"{perm!r} is not a permutation of 1..{n}")
    gens = {
        (i, j): np.array([[Fraction(1 if perm[j - 1] == i else 0)]], dtype=object)
        for i in range(1, n + 1)
        for j in range(1, n + 1)
    }
    return Representation(kind="permutation", k=n, n=n, gens=gens, dim=1)


def two_point_rep(p: np.ndarray) -> Representation:
    """The square n=2 family (p, 1-p / 1-p, p) built from one projection."""
    one = np.eye(p.shape[0], dtype=complex)
    gens = {(1, 1): p, (2, 2): p, (1, 2): one - p, (2, 1): one - p}
    return Representation(kind="permutation", k=2, n=2, gens=gens, dim=p.shape[0])


def check_magic_unitary(
    rep: Representation, tolerance: float | None = None, seed: int | None = None
) -> CheckReport:
    """Residuals of the magic unitary conditions.

    Defining: every entry a self-adjoint idempotent, row sums and column sums
    equal to 1.  The in-row/in-column orthogonality u_{ik} u_{il} = 0 (k != l)
    is a consequence of those; it is checked as well and reported separately
    under "derived_residual".
    """
    if rep.kind != "permutation":
        raise ValueError("expected a permutation-kind representation")
    n = rep.n
    tol = rep.tolerance if tolerance is None else tolerance
    tracker = ResidualTracker(
        "magic_unitary", tol, params={"n": n, "dim": rep.dim},
        seed=seed if seed is not None else rep.seed,
    )
    one = rep.unit()
    defining = 0
    derived = 0
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            g = rep.gen(i, j)
            r_proj = residual_norm(g @ g - g)
            r_adj = residual_norm(dagger(g) - g)
            tracker.add(("projection", i, j), r_proj)
            tracker.add(("self-adjoint", i, j), r_adj)
            defining = max(defining, r_proj, r_adj)
    for i in range(1, n + 1):
        row = rep.zero()
        col = rep.zero()
        for t in range(1, n + 1):
            row = row + rep.gen(i, t)
            col = col + rep.gen(t, i)
        r_row = residual_norm(row - one)
        r_col = residual_norm(col - one)
        tracker.add(("row-sum", i), r_row)
        tracker.add(("column-sum", i), r_col)
        defining = max(defining, r_row, r_col)
    for i in range(1, n + 1):
        for a in range(1, n + 1):
            for b in range(1, n + 1):
                if a != b:
                    r1 = residual_norm(rep.gen(i, a) @ rep.gen(i, b))
                    r2 = residual_norm(rep.gen(a, i) @ rep.gen(b, i))
                    tracker.add(("row-orthogonality", i, a, b), r1)
                    tracker.add(("column-orthogonality", a, b, i), r2)
                    derived = max(derived, r1, r2)
    return tracker.report(
        extra_params={
            "defining_residual": float(defining),
            "derived_residual": float(derived),
        }
    )


def convolution(rep_u: Representation, rep_v: Representation) -> Representation:
    """Tensor convolution: w_{ij} = sum_t u_{it} (x) v_{tj}.

    Produces a family of the product dimension; it satisfies the magic
    unitary conditions whenever both inputs do, which is the executable form
    of the comultiplication being well defined.
    """
    if rep_u.kind != "permutation" or rep_v.kind != "permutation":
        raise ValueError("convolution needs permutation-kind representations")
    if rep_u.n != rep_v.n:
        raise ValueError(f"size mismatch: {rep_u.n} vs {rep_v.n}")
    n = rep_u.n
    gens = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            total = None
            for t in range(1, n + 1):
                term = np.kron(rep_u.gen(i, t), rep_v.gen(t, j))
                total = term if total is None else total + term
            gens[(i, j)] = total
    return Representation(
        kind="permutation", k=n, n=n, gens=gens, dim=rep_u.dim * rep_v.dim,
        seed=rep_u.seed,
    )


def compose(perm_a: tuple[int, ...], perm_b: tuple[int, ...]) -> tuple[int, ...]:
    """(a o b)(j) = a(b(j)), matching the convolution of their representations."""
    return tuple(perm_a[perm_b[j - 1] - 1] for j in range(1, len(perm_b) + 1))
