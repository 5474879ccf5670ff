"""Exact growth exponents at integer index: the transfer operator restricted
to the invariant (2 ell + 1)-dimensional coefficient block is a small dense
matrix, and the exponent is minus the log of its inverse's smallest
eigenvalue.

The first factor of the product enters through the characteristic function
(rotation factor) or through the first 2 ell moments (shear factor); the
exponentially distributed second factor enters through a resolvent, which is
where the exponential law is essential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericError, SingularModelError
from .families import Family
from .operators import restricted_generator
from .sl2 import SubgroupKind

__all__ = [
    "RestrictedTransferMatrix",
    "transfer_matrix_kn",
    "transfer_matrix_nminus_k",
    "transfer_matrix",
    "GleResult",
    "gle_from_matrix",
    "gle_finite",
]

_CHI_TOL = 1e-300


@dataclass(frozen=True)
class RestrictedTransferMatrix:
    """Inverse-transfer restriction to the invariant block, basis n = -ell..ell."""

    ell: int
    family: Family
    entries: np.ndarray


def _chi_at(law, theta):
    val = complex(law.chi(theta))
    if abs(val) < _CHI_TOL:
        raise SingularModelError(f"chi({theta}) vanishes; inverse transfer undefined")
    return val


def transfer_matrix_kn(ell: int, rho: float, law) -> RestrictedTransferMatrix:
    """Tridiagonal inverse-transfer block for rotation-then-upper-shear
    products, with rotation angle law `law` and shear rate rho.

    Row m = -ell..ell carries (i/2rho)(ell+1-m)/chi(-m+1) on column m-1,
    (1 - i m/rho)/chi(-m) on the diagonal and -(i/2rho)(ell+1+m)/chi(-m-1)
    on column m+1.
    """
    _validate_ell_rho(ell, rho)
    if ell == 0:
        return RestrictedTransferMatrix(0, Family.K_NPLUS, np.array([[1.0 / _chi_at(law, 0)]]))
    size = 2 * ell + 1
    m_mat = np.zeros((size, size), dtype=complex)
    for i, m in enumerate(range(-ell, ell + 1)):
        m_mat[i, i] = (1.0 - 1j * m / rho) / _chi_at(law, -m)
        if i > 0:
            m_mat[i, i - 1] = (0.5j / rho) * (ell + 1 - m) / _chi_at(law, -m + 1)
        if i < size - 1:
            m_mat[i, i + 1] = (-0.5j / rho) * (ell + 1 + m) / _chi_at(law, -m - 1)
    return RestrictedTransferMatrix(ell, Family.K_NPLUS, m_mat)


def assemble_kn_from_generators(ell: int, rho: float, law) -> np.ndarray:
    """Same block assembled as (1 - N+/rho) diag(1/chi(-n)); cross-check
    for the closed-form entries."""
    _validate_ell_rho(ell, rho)
    if ell == 0:
        return np.array([[1.0 / _chi_at(law, 0)]])
    npl = restricted_generator(SubgroupKind.NPLUS, ell)
    diag = np.diag([1.0 / _chi_at(law, -n) for n in range(-ell, ell + 1)])
    return (np.eye(2 * ell + 1) - npl / rho) @ diag


def _shear_average(ell: int, law) -> np.ndarray:
    """Block of E exp(t N-): the nilpotent series sum_{i<=2 ell} E(t^i)/i! N-^i."""
    size = 2 * ell + 1
    if ell == 0:
        return np.eye(1, dtype=complex)
    nm = restricted_generator(SubgroupKind.NMINUS, ell)
    acc = np.eye(size, dtype=complex)
    power = np.eye(size, dtype=complex)
    for i in range(1, 2 * ell + 1):
        power = power @ nm
        mi = law.moment(i)
        if not math.isfinite(mi):
            raise ValueError(f"moment {i} of the shear law is not finite")
        acc += (mi / math.factorial(i)) * power
    return acc


def transfer_matrix_nminus_k(ell: int, rho: float, law) -> RestrictedTransferMatrix:
    """Inverse-transfer block for lower-shear-then-rotation products; the
    shear law enters only through its first 2 ell moments."""
    return transfer_matrix(Family.NMINUS_K, ell, rho, law)


def transfer_matrix(family: Family, ell: int, rho: float, law, sign: int = 1) -> RestrictedTransferMatrix:
    """Inverse-transfer block for any of the four families (integer ell).

    The first factor contributes E exp(t D) (diagonal in chi for the
    rotation family, a nilpotent moment series for the shear families); the
    exponential second factor contributes a resolvent, inverted exactly on
    the block.
    """
    _validate_ell_rho(ell, rho)
    if family is Family.K_NPLUS:
        return transfer_matrix_kn(ell, rho, law)
    size = 2 * ell + 1
    shear = _shear_average(ell, law)
    try:
        shear_inv = np.linalg.inv(shear)
    except np.linalg.LinAlgError as exc:  # unipotent, so this is pure pathology
        raise NumericError(f"shear-average block not invertible: {exc}") from exc
    eye = np.eye(size)
    if family is Family.NMINUS_K:
        k = restricted_generator(SubgroupKind.K, ell) if ell else np.zeros((1, 1))
        resolvent_inv = eye - k / rho
    elif family is Family.NMINUS_NPLUS:
        npl = restricted_generator(SubgroupKind.NPLUS, ell) if ell else np.zeros((1, 1))
        resolvent_inv = eye - npl / rho
    elif family is Family.NMINUS_A1:
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if rho <= ell:
            raise SingularModelError(
                f"E exp(tau A1) diverges on the block: need rho > ell, got rho={rho}, ell={ell}"
            )
        a1 = restricted_generator(SubgroupKind.A1, ell) if ell else np.zeros((1, 1))
        resolvent_inv = eye - sign * a1 / rho
    else:
        raise ValueError(f"unknown family {family!r}")
    return RestrictedTransferMatrix(ell, family, resolvent_inv @ shear_inv)


def _validate_ell_rho(ell, rho):
    if ell != int(ell) or ell < 0:
        raise ValueError("ell must be a nonnegative integer for the block route")
    if not (rho > 0) or not math.isfinite(rho):
        raise ValueError("rho must be positive and finite")


@dataclass(frozen=True)
class GleResult:
    """Spectrum of the inverse-transfer block and the derived exponent."""

    gle: float
    mu: complex
    spectrum: np.ndarray
    complex_leading: bool = False
    diagnostics: dict = field(default_factory=dict, compare=False)


def gle_from_matrix(mat: RestrictedTransferMatrix) -> GleResult:
    """Growth exponent from the full spectrum of the inverse-transfer block.

    mu is the eigenvalue of smallest modulus; the exponent is -log mu.  A mu
    that fails the near-real-positivity check is flagged (complex_leading),
    not fatal, and the exponent falls back to -log |mu|.
    """
    entries = np.asarray(mat.entries)
    try:
        spectrum = np.linalg.eigvals(entries)
    except np.linalg.LinAlgError as exc:
        cond = float(np.linalg.cond(entries)) if entries.size else float("nan")
        raise NumericError(f"eigenvalue computation failed: {exc}", condition=cond) from exc
    mu = spectrum[np.argmin(np.abs(spectrum))]
    flag = abs(mu.imag) > 1e-8 * abs(mu) or mu.real <= 0.0
    return GleResult(
        gle=-math.log(abs(mu)),
        mu=mu,
        spectrum=spectrum,
        complex_leading=bool(flag),
        diagnostics={"order": entries.shape[0]},
    )


def gle_finite(family: Family, ell: int, rho: float, law, sign: int = 1) -> GleResult:
    """Convenience wrapper: block assembly followed by the spectral step."""
    return gle_from_matrix(transfer_matrix(family, ell, rho, law, sign))
