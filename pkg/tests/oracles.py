"""Independent reference computations used to check the library.

None of these call numpy.linalg: eigenpairs come from a cyclic Jacobi sweep
so they do not share code paths with the implementation under test.
"""

import math

import numpy as np


def realify(a):
    """Real ``2n x 2n`` representation ``[[Re, -Im], [Im, Re]]`` of a complex matrix.

    Each eigenvalue of a Hermitian ``a`` appears twice in the result.
    """
    a = np.asarray(a, dtype=complex)
    re, im = a.real, a.imag
    return np.block([[re, -im], [im, re]])


def jacobi_eigh(a, sweeps=100, tol=1e-15):
    """Eigenvalues and orthonormal eigenvectors of a real symmetric matrix."""
    A = np.array(a, dtype=float)
    n = A.shape[0]
    V = np.eye(n)
    for _ in range(sweeps):
        off = math.sqrt(sum(A[i, j] ** 2 for i in range(n) for j in range(n) if i != j))
        if off <= tol * max(1.0, float(np.max(np.abs(A)))):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if A[p, q] == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2 * A[p, q])
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1 / math.sqrt(t * t + 1)
                s = t * c
                J = np.eye(n)
                J[p, p] = J[q, q] = c
                J[p, q] = s
                J[q, p] = -s
                A = J.T @ A @ J
                V = V @ J
    return np.diag(A).copy(), V


def sqrt_oracle(a):
    """Positive square root through the Jacobi eigendecomposition.

    Complex Hermitian input is realified, rooted, and folded back.
    """
    a = np.asarray(a)
    if np.iscomplexobj(a):
        n = a.shape[0]
        r = sqrt_oracle(realify(a))
        return r[:n, :n] + 1j * r[n:, :n]
    w, V = jacobi_eigh(a)
    w = np.clip(w, 0.0, None)
    return (V * np.sqrt(w)) @ V.T


def min_eig_oracle(h):
    h = np.asarray(h)
    if np.iscomplexobj(h):
        h = realify(h)
    return float(np.min(jacobi_eigh((h + h.T) / 2)[0]))


def spectral_norm_oracle(a):
    """Largest singular value as the square root of the top eigenvalue of a* a."""
    a = np.asarray(a)
    g = a.conj().T @ a
    if np.iscomplexobj(g):
        g = realify(g)
    return math.sqrt(max(0.0, float(np.max(jacobi_eigh((g + g.T) / 2)[0]))))


# -- random elements -------------------------------------------------------

def random_matrix(rng, n, complex_=False, scale=1.0):
    a = rng.standard_normal((n, n))
    if complex_:
        a = a + 1j * rng.standard_normal((n, n))
    return scale * a


def random_unitary(rng, n, complex_=False):
    q, r = np.linalg.qr(random_matrix(rng, n, complex_))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_positive(rng, n, complex_=False, lo=0.0, hi=1.0):
    """``U diag(w) U*`` with eigenvalues ``w`` drawn from ``[lo, hi]``."""
    U = random_unitary(rng, n, complex_)
    w = rng.uniform(lo, hi, n)
    p = (U * w) @ U.conj().T
    return (p + p.conj().T) / 2


def random_self_adjoint(rng, n, complex_=False):
    a = random_matrix(rng, n, complex_)
    return (a + a.conj().T) / 2
