"""Exact matrix representation of the phase-space generators on polynomials.

Every generator maps polynomials of total degree <= D into themselves, so
operator identities (commutators, products of exponentials, conjugation by
the ordering kernel) can be checked exactly with finite matrices.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm

DEGREE = 5
BASIS = [(i, j) for i in range(DEGREE + 1) for j in range(DEGREE + 1) if i + j <= DEGREE]
_INDEX = {b: k for k, b in enumerate(BASIS)}


def _op(rule):
    n = len(BASIS)
    M = np.zeros((n, n), dtype=complex)
    for k, (i, j) in enumerate(BASIS):
        for c, target in rule(i, j):
            if c and target in _INDEX:
                M[_INDEX[target], k] += c
    return M


# S[i] acts on q^i p^j; S[0] is unused so indices match the generator labels
S = [
    None,
    _op(lambda i, j: [(i, (i - 1, j + 1))]),  # p d/dq
    _op(lambda i, j: [(j, (i + 1, j - 1))]),  # q d/dp
    _op(lambda i, j: [(i - j, (i, j))]),  # d/dq q - d/dp p
    _op(lambda i, j: [(i + j + 2, (i, j))]),  # d/dq q + d/dp p
    _op(lambda i, j: [(i, (i - 1, j))]),  # d/dq
    _op(lambda i, j: [(j, (i, j - 1))]),  # d/dp
    _op(lambda i, j: [(i * (i - 1), (i - 2, j))]),  # d2/dq2
    _op(lambda i, j: [(j * (j - 1), (i, j - 2))]),  # d2/dp2
    _op(lambda i, j: [(i * j, (i - 1, j - 1))]),  # d2/dqdp
]


def generator_sum(a) -> np.ndarray:
    return sum(complex(a[i - 1]) * S[i] for i in range(1, 10))


def product_propagator(w) -> np.ndarray:
    """exp(w1 S1) exp(w2 S2) ... exp(w9 S9)."""
    U = np.eye(len(BASIS), dtype=complex)
    for i in range(1, 10):
        U = U @ expm(complex(w[i - 1]) * S[i])
    return U


def kernel_operator(g) -> np.ndarray:
    """Phase-space action of multiplying chi by exp(g1 u^2 + g2 v^2 + 2i g3 uv).

    With d/dq <-> -iv and d/dp <-> iu: v^2 <-> -S7, u^2 <-> -S8, uv <-> S9.
    """
    g1, g2, g3 = g.as_tuple() if hasattr(g, "as_tuple") else g
    return expm(-g1 * S[8] - g2 * S[7] + 2j * g3 * S[9])


def decompose(M: np.ndarray) -> np.ndarray:
    """Coefficients b with M = sum b_i S_i (least squares; exact when in span)."""
    A = np.stack([S[i].ravel() for i in range(1, 10)], axis=1)
    b, *_ = np.linalg.lstsq(A, M.ravel(), rcond=None)
    if np.abs(A @ b - M.ravel()).max() > 1e-9:
        raise ValueError("operator is not in the span of the generators")
    return b


def conjugated_coefficients(a_wigner, g) -> np.ndarray:
    """Coefficients of K L K^-1 where L has Wigner-ordered coefficients ``a_wigner``."""
    K = kernel_operator(g)
    return decompose(K @ generator_sum(a_wigner) @ np.linalg.inv(K))
