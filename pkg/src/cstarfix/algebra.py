"""Finite-dimensional unital C*-algebra arithmetic.

Elements of the algebra are square numpy arrays (``dim x dim``) over the real
or complex field. The unity is the identity matrix and the zero element is the
zero matrix. Every function here is pure and returns fresh read-only arrays.

Two norms and two orders are available:

* ``norm_mode="operator"`` (largest singular value, the C* norm) or
  ``norm_mode="max-entry"`` (largest absolute entry).
* ``order_mode="positivity"`` (``a <= b`` iff ``b - a`` is positive) or
  ``order_mode="entrywise"`` (``a <= b`` iff every entry of ``b - a`` is
  nonnegative).

Numerical slack is relative: a check on ``c`` at scale ``s`` tolerates
eigenvalues down to ``-eps_pos * max(s, ||c||)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AlgebraError

NORM_MODES = ("operator", "max-entry")
ORDER_MODES = ("positivity", "entrywise")
SCALARS = ("real", "complex")


@dataclass(frozen=True)
class Tolerance:
    """Numerical slack. ``eps_pos`` bounds negative eigenvalues, ``eps_eq``
    bounds entrywise equality; both are relative to the operand scale."""

    eps_pos: float = 1e-10
    eps_eq: float = 1e-10

    def __post_init__(self):
        if not (self.eps_pos >= 0 and self.eps_eq >= 0):
            raise ValueError("tolerances must be nonnegative")


DEFAULT_TOL = Tolerance()


def element(value, dim: int | None = None) -> np.ndarray:
    """Coerce ``value`` into a read-only square matrix.

    Python scalars become ``1 x 1`` matrices, or ``value * I`` when ``dim`` is
    given. Raises :class:`AlgebraError` for non-square or non-finite input.
    """
    if type(value) is float or type(value) is int:
        v = float(value)
        if not math.isfinite(v):
            raise AlgebraError("algebra elements must have finite entries")
        arr = np.full((1, 1), v) if dim in (None, 1) else v * np.eye(dim)
        arr.setflags(write=False)
        return arr
    if type(value) is np.ndarray and value.dtype == np.float64 and value.ndim == 2 \
            and value.shape[0] == value.shape[1] and dim in (None, value.shape[0]):
        if not np.isfinite(value).all():
            raise AlgebraError("algebra elements must have finite entries")
        if not value.flags.writeable and value.base is None:
            return value
        arr = value.copy()
        arr.setflags(write=False)
        return arr
    arr = np.asarray(value)
    if arr.ndim == 0:
        n = 1 if dim is None else dim
        arr = arr * np.eye(n, dtype=np.result_type(arr.dtype, float))
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise AlgebraError(f"algebra elements must be square matrices, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise AlgebraError(f"expected a {dim}x{dim} element, got {arr.shape[0]}x{arr.shape[0]}")
    if not np.issubdtype(arr.dtype, np.number) or np.issubdtype(arr.dtype, np.bool_):
        raise AlgebraError(f"unsupported entry type {arr.dtype}")
    if np.iscomplexobj(arr):
        arr = arr.astype(complex)
    else:
        arr = arr.astype(float)
    if not np.all(np.isfinite(arr)):
        raise AlgebraError("algebra elements must have finite entries")
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    if np.iscomplexobj(arr) and not np.any(arr.imag):
        arr = arr.real.copy()
    arr.setflags(write=False)
    return arr


def identity(dim: int) -> np.ndarray:
    return _frozen(np.eye(dim))


def zero(dim: int) -> np.ndarray:
    return _frozen(np.zeros((dim, dim)))


def adjoint(a) -> np.ndarray:
    """Conjugate transpose (plain transpose for real matrices)."""
    a = np.asarray(a)
    return _frozen(a.conj().T)


def _operator_norm(a: np.ndarray) -> float:
    if a.shape == (1, 1):
        return float(abs(a[0, 0]))
    return float(np.linalg.norm(a, 2))


def norm(a, mode: str = "operator") -> float:
    a = np.asarray(a)
    if mode == "operator":
        return _operator_norm(a)
    if mode == "max-entry":
        return float(np.max(np.abs(a))) if a.size else 0.0
    raise AlgebraError(f"unknown norm mode {mode!r}; expected one of {NORM_MODES}")


def _asymmetry(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - a.conj().T)))


def _hermitian_part(a: np.ndarray) -> np.ndarray:
    return (a + a.conj().T) / 2


def _min_eigenvalue(h: np.ndarray) -> float:
    if h.shape == (1, 1):
        return float(h[0, 0].real)
    try:
        return float(np.linalg.eigvalsh(h)[0])
    except np.linalg.LinAlgError as exc:
        raise AlgebraError(f"Hermitian eigensolver failed: {exc}") from exc


def is_self_adjoint(a, tol: Tolerance = DEFAULT_TOL, scale: float = 0.0) -> bool:
    a = np.asarray(a)
    s = max(scale, _operator_norm(a), 1e-300)
    return _asymmetry(a) <= tol.eps_eq * s


def spectrum(a, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """All eigenvalues with multiplicity, sorted by (real, imag).

    Self-adjoint input goes through the Hermitian solver so the values come
    back exactly real.
    """
    a = np.asarray(a)
    try:
        if is_self_adjoint(a, tol):
            vals = np.linalg.eigvalsh(_hermitian_part(a)).astype(float)
        else:
            vals = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise AlgebraError(f"eigensolver did not converge (ill-conditioned input?): {exc}") from exc
    order = np.lexsort((np.imag(vals), np.real(vals)))
    return _frozen_vector(vals[order])


def _frozen_vector(v: np.ndarray) -> np.ndarray:
    v = np.array(v, copy=True)
    v.setflags(write=False)
    return v


def is_positive(a, tol: Tolerance = DEFAULT_TOL, scale: float = 0.0) -> bool:
    """True iff ``a`` is self-adjoint and its spectrum lies in [0, inf).

    ``scale`` widens the slack when ``a`` arose as a difference of larger
    operands (cancellation error is proportional to the operands, not to ``a``).
    """
    a = np.asarray(a)
    s = max(scale, _operator_norm(a))
    if s == 0.0:
        return True
    if _asymmetry(a) > tol.eps_eq * s:
        return False
    return _min_eigenvalue(_hermitian_part(a)) >= -tol.eps_pos * s


def _check_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise AlgebraError(f"dimension mismatch: {a.shape} vs {b.shape}")


def leq(a, b, tol: Tolerance = DEFAULT_TOL, mode: str = "positivity") -> bool:
    """Partial order ``a <= b``."""
    a = np.asarray(a)
    b = np.asarray(b)
    _check_same_dim(a, b)
    scale = max(_operator_norm(a), _operator_norm(b))
    diff = b - a
    if mode == "positivity":
        return is_positive(diff, tol, scale=scale)
    if mode == "entrywise":
        if scale == 0.0:
            return True
        if np.iscomplexobj(diff) and np.max(np.abs(diff.imag)) > tol.eps_eq * scale:
            return False
        return float(np.min(diff.real)) >= -tol.eps_pos * scale
    raise AlgebraError(f"unknown order mode {mode!r}; expected one of {ORDER_MODES}")


def order_margin(a, b, mode: str = "positivity") -> float:
    """Normalized slack of ``a <= b``.

    The smallest eigenvalue (positivity order) or the smallest entry (entrywise
    order) of ``b - a``, divided by the larger operator norm of the operands.
    Negative exactly when the inequality fails. The positivity order measures
    the Hermitian part of ``b - a``.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    _check_same_dim(a, b)
    scale = max(_operator_norm(a), _operator_norm(b))
    if scale == 0.0:
        return 0.0
    diff = b - a
    if mode == "positivity":
        return _min_eigenvalue(_hermitian_part(diff)) / scale
    if mode == "entrywise":
        return float(np.min(diff.real)) / scale
    raise AlgebraError(f"unknown order mode {mode!r}; expected one of {ORDER_MODES}")


def positive_sqrt(a, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """The unique positive square root, via the Hermitian eigendecomposition."""
    a = np.asarray(a)
    if not is_positive(a, tol):
        raise AlgebraError("positive_sqrt requires a positive element")
    h = _hermitian_part(a)
    if h.shape == (1, 1):
        return _frozen(np.sqrt(np.maximum(h.real, 0.0)).astype(h.dtype))
    vals, vecs = np.linalg.eigh(h)
    root = (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.conj().T
    return _frozen(_hermitian_part(root))


def inv_residual_transform(a, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """``a (I - a)^-1`` for positive ``a`` with operator norm below 1/2.

    The result has norm < 1; it is the gauge ``B`` that turns a Kannan-style
    bound ``A (d(x,Tx) + d(y,Ty))`` into an iterate bound ``B^n (...)``.
    """
    a = np.asarray(a)
    if not is_positive(a, tol):
        raise AlgebraError("inv_residual_transform requires a positive element")
    n_a = _operator_norm(a)
    if n_a >= 0.5:
        raise AlgebraError(f"inv_residual_transform requires ||a|| < 1/2, got {n_a!r}")
    complement = np.eye(a.shape[0]) - a
    if np.linalg.cond(complement) > 1.0 / np.finfo(float).eps:
        raise AlgebraError("I - a is numerically singular")
    return _frozen(a @ np.linalg.inv(complement))


def matrix_units(dim: int) -> list[np.ndarray]:
    units = []
    for i in range(dim):
        for j in range(dim):
            e = np.zeros((dim, dim))
            e[i, j] = 1.0
            units.append(e)
    return units


def is_central(a, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff ``a`` commutes with every matrix unit ``E_ij``."""
    a = np.asarray(a)
    s = max(1.0, _operator_norm(a))
    for e in matrix_units(a.shape[0]):
        if np.max(np.abs(a @ e - e @ a)) > tol.eps_eq * s:
            return False
    return True


def power(a, n: int) -> np.ndarray:
    """``a**n`` by repeated multiplication (no eigendecomposition shortcut)."""
    a = np.asarray(a)
    result = np.eye(a.shape[0], dtype=a.dtype)
    for _ in range(n):
        result = result @ a
    return _frozen(result)


@dataclass(frozen=True)
class Algebra:
    """Configuration of a matrix C*-algebra: size, scalar field, norm and order."""

    dim: int = 1
    scalar: str = "real"
    norm_mode: str = "operator"
    order_mode: str = "positivity"
    tol: Tolerance = field(default_factory=Tolerance)

    def __post_init__(self):
        if self.dim < 1:
            raise AlgebraError("algebra dimension must be a positive integer")
        if self.scalar not in SCALARS:
            raise AlgebraError(f"unknown scalar field {self.scalar!r}")
        if self.norm_mode not in NORM_MODES:
            raise AlgebraError(f"unknown norm mode {self.norm_mode!r}")
        if self.order_mode not in ORDER_MODES:
            raise AlgebraError(f"unknown order mode {self.order_mode!r}")

    def element(self, value) -> np.ndarray:
        a = element(value, self.dim)
        if self.scalar == "real" and np.iscomplexobj(a):
            if np.any(a.imag):
                raise AlgebraError("complex entries in a real algebra")
            a = _frozen(a.real)
        return a

    @property
    def unity(self) -> np.ndarray:
        return identity(self.dim)

    @property
    def zero(self) -> np.ndarray:
        return zero(self.dim)

    def norm(self, a) -> float:
        return norm(a, self.norm_mode)

    def is_positive(self, a) -> bool:
        if self.order_mode == "entrywise":
            return leq(zero(self.dim), a, self.tol, "entrywise")
        return is_positive(a, self.tol)

    def leq(self, a, b) -> bool:
        return leq(a, b, self.tol, self.order_mode)

    def margin(self, a, b) -> float:
        return order_margin(a, b, self.order_mode)

    def is_central(self, a) -> bool:
        return is_central(a, self.tol)

