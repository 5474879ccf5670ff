"""Infinitesimal generators of the index-ell representation, realised as
truncated tridiagonal operators on Fourier coefficients and as shift
operators on Mellin-transform pairs, plus the ladder coefficients, the
Casimir composite, the adjoint residual and the holomorphic-branch weights.

Basis convention: coefficient sequences v(n), n = -N..N; a banded operator
acts as (X v)(n) = lo(n) v(n-1) + di(n) v(n) + hi(n) v(n+1).  Truncation
corrupts only boundary rows, so every operator identity is asserted on
interior indices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sl2 import SubgroupKind

__all__ = [
    "BandedOperator",
    "generator_discrete",
    "ladder_coeff",
    "casimir_discrete",
    "adjoint_check",
    "holomorphic_weight",
    "MellinOperator",
    "mellin_apply",
    "mellin_compose",
]


@dataclass(frozen=True)
class BandedOperator:
    """Tridiagonal operator on coefficients indexed n = -N..N."""

    kind: SubgroupKind
    ell: complex
    halfwidth: int

    def bands(self, n):
        """(lo, di, hi) coefficients of row n."""
        ell = self.ell
        if self.kind is SubgroupKind.K:
            return 0.0, -1j * n, 0.0
        if self.kind is SubgroupKind.A1:
            return 0.5 * (ell - n + 1), 0.0, 0.5 * (ell + n + 1)
        if self.kind is SubgroupKind.A2:
            return -0.5j * (ell - n + 1), 0.0, 0.5j * (ell + n + 1)
        if self.kind is SubgroupKind.NPLUS:
            return -0.5j * (ell - n + 1), 1j * n, 0.5j * (ell + n + 1)
        if self.kind is SubgroupKind.NMINUS:
            return -0.5j * (ell - n + 1), -1j * n, 0.5j * (ell + n + 1)
        raise ValueError(f"unknown kind {self.kind!r}")

    def to_matrix(self) -> np.ndarray:
        """Dense (2N+1)x(2N+1) matrix, row/column index i = n + N."""
        return _band_matrix(self.kind, self.ell, -self.halfwidth, self.halfwidth)

    def apply(self, v: np.ndarray) -> np.ndarray:
        """Apply to a coefficient vector over n = -N..N (boundary rows drop
        the out-of-window neighbour, i.e. the input is extended by zero)."""
        N = self.halfwidth
        out = np.zeros(2 * N + 1, dtype=complex)
        for i, n in enumerate(range(-N, N + 1)):
            lo, di, hi = self.bands(n)
            acc = di * v[i]
            if i > 0:
                acc += lo * v[i - 1]
            if i < 2 * N:
                acc += hi * v[i + 1]
            out[i] = acc
        return out


def _band_matrix(kind: SubgroupKind, ell, n_min: int, n_max: int) -> np.ndarray:
    op = BandedOperator(kind, complex(ell), max(abs(n_min), abs(n_max)))
    size = n_max - n_min + 1
    m = np.zeros((size, size), dtype=complex)
    for i, n in enumerate(range(n_min, n_max + 1)):
        lo, di, hi = op.bands(n)
        m[i, i] = di
        if i > 0:
            m[i, i - 1] = lo
        if i < size - 1:
            m[i, i + 1] = hi
    return m


def generator_discrete(kind: SubgroupKind, ell, N: int) -> BandedOperator:
    """Generator of the subgroup `kind` on Fourier coefficients, truncated
    to the window |n| <= N (N >= 1)."""
    if N < 1:
        raise ValueError("halfwidth N must be >= 1")
    return BandedOperator(kind, complex(ell), N)


def restricted_generator(kind: SubgroupKind, ell: int) -> np.ndarray:
    """Exact (2 ell + 1) block of a generator on the invariant subspace
    spanned by |n| <= ell (integer ell >= 0); the couplings out of the
    block vanish identically."""
    if ell < 0 or ell != int(ell):
        raise ValueError("block restriction needs a nonnegative integer index")
    return _band_matrix(kind, complex(ell), -int(ell), int(ell))


def ladder_coeff(which: str, ell, n: int):
    """Ladder action on basis elements: returns (coef, n') such that the
    operator sends e_n to coef * e_{n'}.

    J0 is diagonal with eigenvalue n; the raising operator carries ell - n
    to n + 1 and the lowering operator ell + n to n - 1.
    """
    ell = complex(ell)
    if which == "J0":
        return complex(n), n
    if which == "Jplus":
        return ell - n, n + 1
    if which == "Jminus":
        return ell + n, n - 1
    raise ValueError("which must be one of 'J0', 'Jplus', 'Jminus'")


def casimir_discrete(ell, N: int) -> np.ndarray:
    """Dense composite A1^2 + A2^2 - K^2 on the window |n| <= N (N >= 3).

    On interior columns |n| <= N-1 the action equals ell(ell+1) times the
    identity; boundary rows are truncation artefacts.
    """
    if N < 3:
        raise ValueError("need N >= 3 for a meaningful interior")
    a1 = generator_discrete(SubgroupKind.A1, ell, N).to_matrix()
    a2 = generator_discrete(SubgroupKind.A2, ell, N).to_matrix()
    k = generator_discrete(SubgroupKind.K, ell, N).to_matrix()
    return a1 @ a1 + a2 @ a2 - k @ k


def adjoint_check(kind: SubgroupKind, ell, N: int) -> float:
    """Max interior residual |<S(ell*) e_m, e_n> + <e_m, S(ell) e_n>| under
    the coefficientwise sesquilinear pairing, where ell* = -conj(ell) - 1.

    Zero (to roundoff) certifies the adjoint rule S(ell)* = -S(ell*).
    """
    if N < 3:
        raise ValueError("need N >= 3 for a meaningful interior")
    ell = complex(ell)
    ell_star = -ell.conjugate() - 1.0
    s = generator_discrete(kind, ell, N).to_matrix()
    s_star = generator_discrete(kind, ell_star, N).to_matrix()
    interior = slice(1, 2 * N)  # |n| <= N-1
    res = np.conj(s_star.T) + s
    return float(np.max(np.abs(res[interior, interior])))


def holomorphic_weight(ell: int, n: int, branch: str) -> float:
    """Weight Gamma(ell+1 +- n) / Gamma(-ell +- n) of the holomorphic-branch
    inner product, for integer ell >= 0 and +-n > ell.

    Evaluated as the exact product of the 2 ell + 1 consecutive integers
    from +-n - ell to +-n + ell; always positive on the valid range.
    """
    if ell < 0 or ell != int(ell):
        raise ValueError("ell must be a nonnegative integer")
    if branch == "+":
        sign = 1
    elif branch == "-":
        sign = -1
    else:
        raise ValueError("branch must be '+' or '-'")
    if sign * n <= ell:
        raise ValueError(f"index n={n} lies inside the finite-dimensional block")
    out = 1.0
    for j in range(-int(ell), int(ell) + 1):
        out *= sign * n + j
    return out


@dataclass(frozen=True)
class MellinOperator:
    """Generator acting on Mellin-transform pairs (v+, v-) of analytic test
    functions; evaluation reads v at s and at s +- i."""

    kind: SubgroupKind
    ell: complex

    def apply(self, v, s):
        return mellin_apply(self, v, s)


def mellin_apply(op: MellinOperator, v, s):
    """Apply a Mellin-space generator to the pair v = (v_plus, v_minus) at
    the point s; returns the resulting (w_plus, w_minus) values."""
    vp, vm = v
    ell = op.ell
    s = complex(s)
    kind = op.kind
    if kind is SubgroupKind.A1:
        return -1j * s * vp(s), -1j * s * vm(s)
    cu = 0.5 * (ell + 1.0 - 1j * s)  # multiplies v(s + i)
    cd = 0.5 * (ell + 1.0 + 1j * s)  # multiplies v(s - i)
    if kind is SubgroupKind.K:
        return (cu * vp(s + 1j) - cd * vp(s - 1j), -cu * vm(s + 1j) + cd * vm(s - 1j))
    if kind is SubgroupKind.A2:
        return (cu * vp(s + 1j) + cd * vp(s - 1j), -cu * vm(s + 1j) - cd * vm(s - 1j))
    if kind is SubgroupKind.NPLUS:
        c = ell + 1.0 + 1j * s
        return c * vp(s - 1j), -c * vm(s - 1j)
    if kind is SubgroupKind.NMINUS:
        c = ell + 1.0 - 1j * s
        return c * vp(s + 1j), -c * vm(s + 1j)
    raise ValueError(f"unknown kind {kind!r}")


def mellin_compose(op: MellinOperator, v):
    """The pair of functions s -> (op v)(s), suitable for feeding into a
    further operator application (used by the bracket checks)."""
    return (lambda s: mellin_apply(op, v, s)[0], lambda s: mellin_apply(op, v, s)[1])
