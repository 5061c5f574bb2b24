"""Dense complex linear-algebra kernel.

All matrices are ``numpy`` arrays of ``complex128``.  Superoperators act on
column-stacked vectorizations; that convention is fixed here once and is
asserted by a round-trip test.  Everything in this module is a pure function
of its inputs.
"""

import numpy as np
import scipy.linalg

from .errors import DimensionError, InputError

DEFAULT_TOL = 1e-10


def as_matrix(a):
    """Coerce to a finite 2-d complex array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionError(f"expected a matrix, got ndim={m.ndim}")
    if not (np.all(np.isfinite(m.real)) and np.all(np.isfinite(m.imag))):
        raise DimensionError("matrix has non-finite entries")
    return m


def _square(a):
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


def eye(d):
    return np.eye(d, dtype=complex)


def dagger(a):
    return np.conj(np.asarray(a)).T


def tensor(a, b):
    """Kronecker product; the first factor is the slow index."""
    return np.kron(as_matrix(a), as_matrix(b))


def tensor_vec(x, y):
    """Kronecker product of vectors, same index convention as :func:`tensor`."""
    return np.kron(np.asarray(x, dtype=complex), np.asarray(y, dtype=complex))


def partial_trace_second(m, d1, d2):
    """Trace out the second tensor factor of an operator on C^d1 (x) C^d2."""
    m = as_matrix(m)
    if m.shape != (d1 * d2, d1 * d2):
        raise DimensionError(f"expected shape {(d1 * d2, d1 * d2)}, got {m.shape}")
    return np.einsum("aibi->ab", m.reshape(d1, d2, d1, d2))


def partial_trace_first(m, d1, d2):
    """Trace out the first tensor factor of an operator on C^d1 (x) C^d2."""
    m = as_matrix(m)
    if m.shape != (d1 * d2, d1 * d2):
        raise DimensionError(f"expected shape {(d1 * d2, d1 * d2)}, got {m.shape}")
    return np.einsum("aiaj->ij", m.reshape(d1, d2, d1, d2))


def expm(a):
    """Matrix exponential (scaling-and-squaring with Pade approximants)."""
    return scipy.linalg.expm(_square(a))


def exp_derivative(x, y, t=0.0, tol=1e-10, quad_order=8, max_panels=64):
    """Derivative of ``t -> expm(x + t*y)``.

    Evaluates the integral of ``expm((1-s)Z) y expm(s Z)`` over s in [0, 1]
    with Z = x + t*y, by composite Gauss-Legendre quadrature.  Panels are
    doubled until two successive estimates agree to ``tol``; the integrand is
    entire, so this converges after very few doublings.
    """
    x = _square(x)
    y = as_matrix(y)
    if y.shape != x.shape:
        raise DimensionError(f"shape mismatch: {x.shape} vs {y.shape}")
    z = x + t * y
    nodes, weights = np.polynomial.legendre.leggauss(quad_order)

    def estimate(panels):
        total = np.zeros_like(z)
        width = 1.0 / panels
        for p in range(panels):
            mid = (p + 0.5) * width
            for xk, wk in zip(nodes, weights):
                s = mid + 0.5 * width * xk
                total += (0.5 * width * wk) * (expm((1.0 - s) * z) @ y @ expm(s * z))
        return total

    prev = estimate(1)
    panels = 2
    while panels <= max_panels:
        cur = estimate(panels)
        if spectral_norm(cur - prev) < tol:
            return cur
        prev = cur
        panels *= 2
    return prev


def spectral_norm(a):
    """Largest singular value."""
    a = as_matrix(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def trace_norm(a):
    """Sum of singular values."""
    a = _square(a)
    return float(np.linalg.svd(a, compute_uv=False).sum())


def commutator(a, b):
    a, b = _square(a), _square(b)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a @ b - b @ a


def anticommutator(a, b):
    a, b = _square(a), _square(b)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a @ b + b @ a


def adjoint_action(u, s):
    """Conjugation ``s -> u s u*``."""
    u, s = _square(u), _square(s)
    if u.shape != s.shape:
        raise DimensionError(f"shape mismatch: {u.shape} vs {s.shape}")
    return u @ s @ dagger(u)


def hermitian_part(a):
    a = _square(a)
    return 0.5 * (a + dagger(a))


def is_hermitian(a, tol=DEFAULT_TOL):
    a = _square(a)
    return spectral_norm(a - dagger(a)) <= tol


def is_dissipative_hilbert(a, tol=DEFAULT_TOL):
    """True iff the Hermitian part of ``a`` is negative semidefinite.

    This is the Hilbert-space criterion for generating a contraction
    semigroup: when it holds, ``spectral_norm(expm(alpha*a)) <= 1`` for all
    alpha > 0.
    """
    h = hermitian_part(a)
    return float(np.linalg.eigvalsh(h).max()) <= tol


def is_psd(a, tol=DEFAULT_TOL):
    """True iff ``a`` is Hermitian within ``tol`` and has min eigenvalue >= -tol."""
    a = _square(a)
    if not is_hermitian(a, tol):
        return False
    return float(np.linalg.eigvalsh(hermitian_part(a)).min()) >= -tol


def is_unitary(a, tol=DEFAULT_TOL):
    a = _square(a)
    return spectral_norm(a @ dagger(a) - eye(a.shape[0])) <= tol


# -- column-stacking vectorization (fixed globally) --------------------------

def vec(x):
    """Column-stacking vectorization of a d x d matrix."""
    return _square(x).reshape(-1, order="F")


def unvec(v, d):
    """Inverse of :func:`vec`."""
    v = np.asarray(v, dtype=complex)
    if v.size != d * d:
        raise DimensionError(f"expected a vector of length {d * d}, got {v.size}")
    return v.reshape(d, d, order="F")


class SuperOp:
    """Linear map on d x d matrices, stored as a d^2 x d^2 matrix.

    The matrix acts on column-stacked vectorizations: ``apply(X)`` is
    ``unvec(matrix @ vec(X))``.
    """

    def __init__(self, dim, matrix):
        self.dim = int(dim)
        m = as_matrix(matrix)
        if m.shape != (self.dim**2, self.dim**2):
            raise DimensionError(
                f"superoperator on dim {self.dim} needs shape "
                f"{(self.dim**2, self.dim**2)}, got {m.shape}"
            )
        self.matrix = m

    def apply(self, x):
        x = _square(x)
        if x.shape != (self.dim, self.dim):
            raise DimensionError(f"expected {self.dim}x{self.dim} input, got {x.shape}")
        return unvec(self.matrix @ vec(x), self.dim)

    def __call__(self, x):
        return self.apply(x)

    def __add__(self, other):
        return SuperOp(self.dim, self.matrix + _coerce_super(other, self.dim))

    def __sub__(self, other):
        return SuperOp(self.dim, self.matrix - _coerce_super(other, self.dim))

    def __mul__(self, scalar):
        return SuperOp(self.dim, scalar * self.matrix)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return SuperOp(self.dim, self.matrix @ _coerce_super(other, self.dim))

    def expm(self, alpha=1.0):
        return SuperOp(self.dim, expm(alpha * self.matrix))

    @classmethod
    def zero(cls, dim):
        return cls(dim, np.zeros((dim**2, dim**2), dtype=complex))

    @classmethod
    def identity(cls, dim):
        return cls(dim, eye(dim**2))

    @classmethod
    def left_multiplication(cls, a):
        """X -> a X."""
        a = _square(a)
        d = a.shape[0]
        return cls(d, tensor(eye(d), a))

    @classmethod
    def right_multiplication(cls, a):
        """X -> X a."""
        a = _square(a)
        d = a.shape[0]
        return cls(d, tensor(a.T, eye(d)))

    @classmethod
    def commutator_with(cls, a):
        """X -> [a, X]."""
        a = _square(a)
        d = a.shape[0]
        return cls(d, tensor(eye(d), a) - tensor(a.T, eye(d)))

    @classmethod
    def anticommutator_with(cls, a):
        """X -> {a, X}."""
        a = _square(a)
        d = a.shape[0]
        return cls(d, tensor(eye(d), a) + tensor(a.T, eye(d)))

    @classmethod
    def conjugation_by(cls, u):
        """X -> u X u*."""
        u = _square(u)
        d = u.shape[0]
        return cls(d, tensor(np.conj(u), u))

    @classmethod
    def from_kraus(cls, kraus_ops):
        """X -> sum_i K_i X K_i*."""
        ks = [_square(k) for k in kraus_ops]
        d = ks[0].shape[0]
        m = np.zeros((d * d, d * d), dtype=complex)
        for k in ks:
            m += tensor(np.conj(k), k)
        return cls(d, m)


def _coerce_super(other, dim):
    if isinstance(other, SuperOp):
        if other.dim != dim:
            raise DimensionError("superoperator dimensions differ")
        return other.matrix
    return as_matrix(other)


# -- JSON matrix literals (shared with the CLI configs) ----------------------

def matrix_to_literal(a):
    """Nested lists with each scalar as [re, im]."""
    a = as_matrix(a)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def matrix_from_literal(lit):
    """Parse the nested-array literal; shape is inferred from nesting."""
    try:
        rows = []
        for row in lit:
            rows.append([complex(float(z[0]), float(z[1])) for z in row])
    except (TypeError, ValueError, IndexError) as exc:
        raise InputError(f"malformed matrix literal: {exc}") from exc
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise InputError("matrix literal rows have inconsistent lengths")
    return np.array(rows, dtype=complex)


# -- common constant matrices -------------------------------------------------

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
