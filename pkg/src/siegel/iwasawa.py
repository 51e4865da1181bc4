"""Iwasawa coordinates on SL(n,R) and Siegel-set membership.

Every ``g`` in SL(n,R) factors uniquely as ``g = k @ diag(a) @ u`` with
``k`` special orthogonal, ``a`` a positive vector of product 1 and ``u``
unit upper triangular (orthonormalize the columns of ``g`` left to right;
the three groups intersect trivially, so the factors are unique).  The
successive ratios ``b[i] = a[i] / a[i+1]`` are the natural coordinates on
the diagonal part: the Siegel set with parameters ``(t, lam)`` is the set
of ``g`` whose factors satisfy ``b[i] <= t`` and ``|u[i, j]| <= lam``.

The mirror-order factorization ``g = u @ diag(a) @ k`` (unipotent part on
the left) is also provided; the two factorizations of the same matrix do
NOT share (a, u) in general, so the two membership predicates differ.
Membership tests in this package always use the k-left factors; the
u-left factors feed the inequality chain in :mod:`siegel.intersections`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    InvalidArgumentError,
    NonInvertibleError,
    NotUnimodularError,
)

# Tolerance defaults, sized for binary64 at n <= 50.
RECON_TOL = 1e-10
ORTHO_TOL = 1e-10
DET_TOL = 1e-9
SINGULAR_TOL = 1e-12
COND_MAX = 1e12

MEMBERSHIP_INSIDE = "inside"
MEMBERSHIP_OUTSIDE = "outside"
MEMBERSHIP_BOUNDARY = "boundary"


@dataclass(frozen=True)
class SiegelParams:
    """Siegel-set parameters: ``b[i] <= t`` and ``|u[i, j]| <= lam``."""

    t: float
    lam: float

    def __post_init__(self):
        if not (self.t > 0 and self.lam > 0):
            raise InvalidArgumentError("Siegel parameters must be positive")


#: Smallest parameters for which the Siegel set still covers SL(n,R)
#: under right multiplication by SL(n,Z).
MINIMAL_PARAMS = SiegelParams(t=2.0 / math.sqrt(3.0), lam=0.5)


def as_square_matrix(g, min_n: int = 2) -> np.ndarray:
    """Validate and return ``g`` as an (n, n) float array with finite entries."""
    arr = np.asarray(g, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InvalidArgumentError(f"expected a square matrix, got shape {arr.shape}")
    if arr.shape[0] < min_n:
        raise InvalidArgumentError(f"dimension must be >= {min_n}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError("matrix entries must be finite")
    return arr


def _bareiss_det(rows: list[list[int]]) -> int:
    """Exact determinant of an integer matrix (fraction-free elimination)."""
    n = len(rows)
    m = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


@dataclass(frozen=True)
class UnimodularIntMatrix:
    """Element of SL(n,Z): exact integer entries, determinant exactly +1."""

    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.entries)
        if n < 1 or any(len(row) != n for row in self.entries):
            raise InvalidArgumentError("entries must form a square matrix")
        object.__setattr__(
            self, "entries", tuple(tuple(int(x) for x in row) for row in self.entries)
        )
        if self.det() != 1:
            raise NotUnimodularError(f"determinant is {self.det()}, must be +1")

    @property
    def n(self) -> int:
        return len(self.entries)

    @classmethod
    def identity(cls, n: int) -> "UnimodularIntMatrix":
        return cls(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "UnimodularIntMatrix":
        return cls(tuple(tuple(int(x) for x in row) for row in rows))

    def det(self) -> int:
        return _bareiss_det([list(r) for r in self.entries])

    def __matmul__(self, other: "UnimodularIntMatrix") -> "UnimodularIntMatrix":
        if self.n != other.n:
            raise InvalidArgumentError("dimension mismatch")
        a, b = self.entries, other.entries
        n = self.n
        rows = tuple(
            tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
            for i in range(n)
        )
        return UnimodularIntMatrix(rows)

    def to_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=float)

    def height(self) -> int:
        return max(abs(x) for row in self.entries for x in row)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "entries": [str(x) for row in self.entries for x in row],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "UnimodularIntMatrix":
        n = int(obj["n"])
        flat = [int(s) for s in obj["entries"]]
        if len(flat) != n * n:
            raise InvalidArgumentError("entries length does not match n*n")
        return cls(tuple(tuple(flat[i * n : (i + 1) * n]) for i in range(n)))

    def __str__(self):
        return "\n".join(" ".join(str(x) for x in row) for row in self.entries)


def matrix_to_json_dict(g: np.ndarray) -> dict:
    g = np.asarray(g, dtype=float)
    return {"n": int(g.shape[0]), "entries": [float(x) for x in g.ravel()]}


def matrix_from_json_dict(obj: dict) -> np.ndarray:
    n = int(obj["n"])
    flat = np.asarray(obj["entries"], dtype=float)
    if flat.size != n * n:
        raise InvalidArgumentError("entries length does not match n*n")
    return flat.reshape(n, n)


def matrix_to_json(g: np.ndarray) -> str:
    return json.dumps(matrix_to_json_dict(g), sort_keys=True)


def matrix_from_json(text: str) -> np.ndarray:
    return matrix_from_json_dict(json.loads(text))


def b_from_a(a: np.ndarray) -> np.ndarray:
    """Successive ratios ``b[i] = a[i] / a[i+1]``."""
    a = np.asarray(a, dtype=float)
    return a[:-1] / a[1:]


def a_from_b(b: np.ndarray) -> np.ndarray:
    """Invert :func:`b_from_a` under the constraint ``prod(a) == 1``.

    ``a[i] = a[n-1] * prod(b[i:])`` and ``a[n-1] = prod(b[l]**(l+1)) ** (-1/n)``
    (exponent ``l+1`` counts how many a-entries each ratio touches).
    """
    b = np.asarray(b, dtype=float)
    n = b.size + 1
    log_b = np.log(b)
    log_an = -np.dot(np.arange(1, n), log_b) / n
    # log a[i] = log a[n-1] + sum of log b[i:]
    suffix = np.concatenate([np.cumsum(log_b[::-1])[::-1], [0.0]])
    return np.exp(log_an + suffix)


@dataclass(frozen=True)
class IwasawaFactors:
    """Factors of ``g = k @ diag(a) @ u`` (k-left order).

    ``u`` is stored as the full unit upper triangular matrix; its strict
    upper entries are the free coordinates.
    """

    k: np.ndarray
    a: np.ndarray
    u: np.ndarray

    @property
    def n(self) -> int:
        return self.a.size

    @property
    def b(self) -> np.ndarray:
        return b_from_a(self.a)

    def reconstruct(self) -> np.ndarray:
        return self.k @ (self.a[:, None] * self.u)

    def max_errors(self, source: np.ndarray | None = None) -> dict:
        """Invariant residuals: orthogonality, det(k), prod(a), reconstruction."""
        n = self.n
        errs = {
            "ortho": float(np.max(np.abs(self.k.T @ self.k - np.eye(n)))),
            "det_k": float(abs(np.linalg.det(self.k) - 1.0)),
            "prod_a": float(abs(np.prod(self.a) - 1.0)),
        }
        if source is not None:
            errs["recon"] = float(np.max(np.abs(self.reconstruct() - source)))
        return errs


@dataclass(frozen=True)
class NakFactors:
    """Factors of the mirror order ``g = u @ diag(a) @ k`` (u-left)."""

    u: np.ndarray
    a: np.ndarray
    k: np.ndarray

    @property
    def n(self) -> int:
        return self.a.size

    @property
    def b(self) -> np.ndarray:
        return b_from_a(self.a)

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.a[None, :]) @ self.k


def _check_group_element(g: np.ndarray, det_tol: float, cond_max: float) -> None:
    det = np.linalg.det(g)
    if abs(det - 1.0) > det_tol:
        raise NotUnimodularError(f"det(g) = {det!r}, expected 1 within {det_tol}")
    cond = np.linalg.cond(g)
    if not np.isfinite(cond) or cond > cond_max:
        raise NonInvertibleError(f"condition number {cond:.3e} exceeds {cond_max:.1e}")


def decompose(
    g,
    *,
    det_tol: float = DET_TOL,
    singular_tol: float = SINGULAR_TOL,
    cond_max: float = COND_MAX,
    check: bool = True,
) -> IwasawaFactors:
    """Factor ``g = k @ diag(a) @ u`` by orthonormalizing the columns of g.

    Computed with a Householder QR and a positive-diagonal sign fix, which
    yields exactly the Gram-Schmidt factors (they are unique) with better
    rounding behavior.  ``check=False`` skips the det/condition guards for
    hot loops that already know their input.
    """
    g = as_square_matrix(g)
    if check:
        _check_group_element(g, det_tol, cond_max)
    q, r = np.linalg.qr(g)
    diag = np.diagonal(r).copy()
    if np.min(np.abs(diag)) < singular_tol:
        raise NonInvertibleError(
            f"column pivot {np.min(np.abs(diag)):.3e} below {singular_tol:.1e}"
        )
    sign = np.where(diag < 0.0, -1.0, 1.0)
    k = q * sign
    a = np.abs(diag)
    u = (sign[:, None] * r) / a[:, None]
    # exact unit diagonal / zero lower triangle, independent of rounding
    np.fill_diagonal(u, 1.0)
    u = np.triu(u)
    return IwasawaFactors(k=k, a=a, u=u)


def decompose_nak(g, **kwargs) -> NakFactors:
    """Factor ``g = u @ diag(a) @ k`` (unipotent part on the left).

    Uses the anti-transpose identity: if ``J`` is the reversal matrix then
    ``J g^T J`` is k-left decomposable and its factors, reversed, are the
    u-left factors of ``g``.
    """
    g = as_square_matrix(g)
    n = g.shape[0]
    j = np.fliplr(np.eye(n))
    f = decompose(j @ g.T @ j, **kwargs)
    u = j @ f.u.T @ j
    a = f.a[::-1].copy()
    k = j @ f.k.T @ j
    return NakFactors(u=u, a=a, k=k)


def recompose(f: IwasawaFactors) -> np.ndarray:
    """Multiply factors back together; inverse of :func:`decompose`."""
    return f.reconstruct()


def membership_excess(g, p: SiegelParams, **kwargs) -> float:
    """Largest constraint violation of g's Siegel coordinates.

    Negative means strictly inside, zero on the boundary, positive outside.
    """
    f = g if isinstance(g, IwasawaFactors) else decompose(g, **kwargs)
    n = f.n
    iu = np.triu_indices(n, k=1)
    excess_b = float(np.max(f.b - p.t))
    excess_u = float(np.max(np.abs(f.u[iu]) - p.lam))
    return max(excess_b, excess_u)


def siegel_membership(g, p: SiegelParams, tol: float, **kwargs) -> str:
    """Classify g against the Siegel set: inside / outside / boundary.

    ``inside`` iff every ``b[i] <= t - tol`` and ``|u[i, j]| <= lam - tol``;
    ``outside`` iff some constraint is exceeded by more than ``tol``;
    ``boundary`` otherwise.  The coordinates are the k-left factors of g.
    """
    if tol < 0:
        raise InvalidArgumentError("tol must be >= 0")
    excess = membership_excess(g, p, **kwargs)
    if excess <= -tol:
        return MEMBERSHIP_INSIDE
    if excess > tol:
        return MEMBERSHIP_OUTSIDE
    return MEMBERSHIP_BOUNDARY


def unit_upper(n: int, coeffs: dict | None = None, value: float | None = None) -> np.ndarray:
    """Unit upper triangular matrix from ``{(i, j): value}`` (1-based, i < j).

    With ``value`` given and no coeffs, every strict upper entry is set to it.
    """
    u = np.eye(n)
    if coeffs:
        for (i, j), v in coeffs.items():
            if not (1 <= i < j <= n):
                raise InvalidArgumentError(f"({i}, {j}) is not strictly upper")
            u[i - 1, j - 1] = v
    elif value is not None:
        iu = np.triu_indices(n, k=1)
        u[iu] = value
    return u
