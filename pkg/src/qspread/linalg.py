"""Dense small-matrix helpers over complex floats or exact rationals.

Matrices are plain numpy arrays.  The float backend uses ``complex128``; the
exact backend uses ``dtype=object`` arrays filled with ``fractions.Fraction``
(all the arithmetic we need -- matmul, kron, conjugation, partial traces --
works elementwise on Fraction objects).

The ambient algebra is the full (d*D) x (d*D) matrix algebra; the
distinguished subalgebra B is the d x d matrices embedded as b -> b (x) 1_D,
with the trace-preserving conditional expectation given by the normalized
partial trace over the second tensor factor.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np


def is_exact(a: np.ndarray) -> bool:
    """True for the rational (object-dtype) backend."""
    return a.dtype == object


def rational_matrix(entries) -> np.ndarray:
    """Object-dtype matrix with every entry coerced to Fraction."""
    arr = np.array(entries, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx in np.ndindex(arr.shape):
        out[idx] = Fraction(arr[idx])
    return out


def rational_eye(n: int) -> np.ndarray:
    out = np.full((n, n), Fraction(0), dtype=object)
    for i in range(n):
        out[i, i] = Fraction(1)
    return out


def rational_zeros(n: int, m: int | None = None) -> np.ndarray:
    return np.full((n, m if m is not None else n), Fraction(0), dtype=object)


def eye_like(a: np.ndarray) -> np.ndarray:
    """Identity matrix on the same backend and size as ``a``."""
    n = a.shape[0]
    return rational_eye(n) if is_exact(a) else np.eye(n, dtype=complex)


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose (Fraction.conjugate() is the identity, as needed)."""
    return np.conj(a).T


def residual_norm(a: np.ndarray):
    """Size of a defect matrix: spectral norm (float) or max-abs (exact).

    The spectral norm is unitarily invariant, so representation checks give
    the same residual after conjugating a family by a fixed unitary.  On the
    exact backend the value is a Fraction, only ever compared against 0.
    """
    if is_exact(a):
        return max((abs(x) for x in a.flat), default=Fraction(0))
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(np.asarray(a, dtype=complex), 2))


@dataclass(frozen=True)
class BAlgebra:
    """B = M_d inside the ambient M_{d*D}, with E = id (x) normalized trace.

    ``exact`` selects the rational backend for the units this object hands
    out; the expectation itself works on whatever backend its argument uses.
    """

    d: int
    D: int
    exact: bool = False

    def __post_init__(self):
        if self.d < 1 or self.D < 1:
            raise ValueError("dimensions must be positive")

    @property
    def ambient_dim(self) -> int:
        return self.d * self.D

    def unit(self) -> np.ndarray:
        """The unit of B."""
        return rational_eye(self.d) if self.exact else np.eye(self.d, dtype=complex)

    def ambient_unit(self) -> np.ndarray:
        n = self.ambient_dim
        return rational_eye(n) if self.exact else np.eye(n, dtype=complex)

    def embed(self, b: np.ndarray) -> np.ndarray:
        """b -> b (x) 1_D into the ambient algebra."""
        if b.shape != (self.d, self.d):
            raise ValueError(f"expected a {self.d}x{self.d} matrix, got {b.shape}")
        one = rational_eye(self.D) if is_exact(b) else np.eye(self.D, dtype=complex)
        return np.kron(b, one)

    def expect(self, a: np.ndarray) -> np.ndarray:
        """The conditional expectation onto B: normalized partial trace."""
        n = self.ambient_dim
        if a.shape != (n, n):
            raise ValueError(f"expected a {n}x{n} matrix, got {a.shape}")
        partial = a.reshape(self.d, self.D, self.d, self.D).trace(axis1=1, axis2=3)
        if is_exact(a):
            return partial * Fraction(1, self.D)
        return partial / self.D

    def trace_state(self, b: np.ndarray):
        """Normalized trace of a B-element; the scalar state phi on B."""
        n = b.shape[0]
        tr = b.trace()
        return tr * Fraction(1, n) if is_exact(b) else complex(tr) / n


def partial_expectation(alg: BAlgebra, a: np.ndarray) -> np.ndarray:
    """E[a] for an ambient matrix a; see BAlgebra.expect."""
    return alg.expect(a)


def projection_pair(theta: float) -> tuple[np.ndarray, np.ndarray]:
    """diag(1,0) and its rotation by ``theta``: two 2x2 projections."""
    p = np.array([[1, 0], [0, 0]], dtype=complex)
    c, s = np.cos(theta), np.sin(theta)
    rot = np.array([[c, -s], [s, c]], dtype=complex)
    q = rot @ p @ rot.T
    return p, q


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish unitary via QR of a complex Gaussian with phase fixing."""
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_pvm(size: int, dim: int, seed: int) -> list[np.ndarray]:
    """``size`` orthogonal projections summing to 1_dim, seeded.

    A 0/1 diagonal pattern (ranks as equal as possible, each >= 1) conjugated
    by a random unitary.
    """
    if dim < size:
        raise ValueError(f"need dim >= size, got dim={dim} size={size}")
    rng = np.random.default_rng(seed)
    u = random_unitary(dim, rng)
    base, extra = divmod(dim, size)
    ranks = [base + (1 if i < extra else 0) for i in range(size)]
    projections = []
    start = 0
    for r in ranks:
        diag = np.zeros(dim)
        diag[start : start + r] = 1.0
        projections.append(u @ np.diag(diag).astype(complex) @ dagger(u))
        start += r
    return projections


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (z + dagger(z)) / 2


def random_rational_symmetric(n: int, rng: np.random.Generator, span: int = 3) -> np.ndarray:
    """Symmetric matrix of small random Fractions (exact self-adjoint)."""
    out = rational_zeros(n)
    for i in range(n):
        for j in range(i, n):
            value = Fraction(int(rng.integers(-span, span + 1)), int(rng.integers(1, 4)))
            out[i, j] = value
            out[j, i] = value
    return out


def random_rational_matrix(n: int, m: int, rng: np.random.Generator, span: int = 3) -> np.ndarray:
    out = rational_zeros(n, m)
    for i in range(n):
        for j in range(m):
            out[i, j] = Fraction(int(rng.integers(-span, span + 1)), int(rng.integers(1, 4)))
    return out
