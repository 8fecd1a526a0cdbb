"""Sylvester Hadamard matrices and the tensor-row encoding matrix.

The encoding matrix has one row per index pair ``(i, j)`` with
``2 <= i, j <= 2**k`` (1-based Hadamard rows), equal to ``H_i kron H_j``.
Rows are enumerated row-major over ``(i, j)`` and generated on demand; the
full matrix is never built.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

MAX_K = 12


@lru_cache(maxsize=None)
def _sylvester(k: int) -> np.ndarray:
    h = np.ones((1, 1), dtype=np.int64)
    for _ in range(k):
        h = np.block([[h, h], [h, -h]])
    h.setflags(write=False)
    return h


@dataclass(frozen=True)
class HadamardMatrix:
    k: int
    matrix: np.ndarray = field(repr=False, compare=False)

    @property
    def order(self) -> int:
        return 1 << self.k

    def row(self, i: int) -> np.ndarray:
        """1-based row ``H_i``."""
        if not 1 <= i <= self.order:
            raise IndexError(f"Hadamard row {i} outside 1..{self.order}")
        return self.matrix[i - 1]


def hadamard(k: int) -> HadamardMatrix:
    if not 0 <= k <= MAX_K:
        raise ValueError(f"k must lie in 0..{MAX_K}, got {k}")
    return HadamardMatrix(k, _sylvester(k))


def row_count(k: int) -> int:
    return ((1 << k) - 1) ** 2


def row_index_pair(k: int, t: int) -> tuple[int, int]:
    """Map 1-based row ``t`` to its Hadamard index pair ``(i, j)``."""
    if k < 1:
        raise ValueError("encoding matrix needs k >= 1")
    if not 1 <= t <= row_count(k):
        raise IndexError(f"row {t} outside 1..{row_count(k)}")
    side = (1 << k) - 1
    return 2 + (t - 1) // side, 2 + (t - 1) % side


def pair_to_row(k: int, i: int, j: int) -> int:
    side = (1 << k) - 1
    if not (2 <= i <= side + 1 and 2 <= j <= side + 1):
        raise IndexError(f"pair ({i},{j}) outside 2..{side + 1}")
    return (i - 2) * side + (j - 2) + 1


def encoding_row(k: int, t: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Row ``t`` and its tensor factors ``(h_a, h_b)``.

    Column ``(a-1) * 2**k + (b-1)`` holds ``h_a[a] * h_b[b]``, which matches
    the left-node-major ordering of bipartite edges.
    """
    i, j = row_index_pair(k, t)
    h = _sylvester(k)
    h_a, h_b = h[i - 1], h[j - 1]
    return np.kron(h_a, h_b), h_a, h_b


@dataclass(frozen=True)
class EncodingMatrix:
    k: int

    def __post_init__(self) -> None:
        if not 1 <= self.k <= MAX_K:
            raise ValueError(f"k must lie in 1..{MAX_K}, got {self.k}")

    @property
    def dimension(self) -> int:
        return 1 << (2 * self.k)

    @property
    def rows(self) -> int:
        return row_count(self.k)

    def row(self, t: int) -> np.ndarray:
        return encoding_row(self.k, t)[0]

    def factors(self, t: int) -> tuple[np.ndarray, np.ndarray]:
        _, h_a, h_b = encoding_row(self.k, t)
        return h_a, h_b

    def combine(self, z: np.ndarray) -> np.ndarray:
        """``sum_t z[t-1] * M_t`` without forming ``M``.

        Writing ``z`` as the ``(2**k-1)``-square matrix ``Z[i-2, j-2]`` gives
        ``x[a, b] = sum_{i,j} Z[i,j] H_i[a] H_j[b] = (H' ^T Z H')[a, b]`` with
        ``H'`` the Hadamard rows 2..2**k.
        """
        side = (1 << self.k) - 1
        z = np.asarray(z)
        if z.shape != (side * side,):
            raise ValueError(f"expected {side * side} coefficients, got shape {z.shape}")
        hp = _sylvester(self.k)[1:]
        return (hp.T @ z.reshape(side, side) @ hp).reshape(-1)


def gram_explicit(k: int) -> np.ndarray:
    """Exact integer Gram matrix of all rows plus the all-ones vector (last row/column).

    Quadratic in ``4**k``; intended for ``k <= 4``.
    """
    em = EncodingMatrix(k)
    rows = np.stack([em.row(t) for t in range(1, em.rows + 1)] + [np.ones(em.dimension, dtype=np.int64)])
    return rows @ rows.T


def check_rows_explicit(k: int) -> bool:
    em = EncodingMatrix(k)
    gram = gram_explicit(k)
    expected = np.diag(np.full(em.rows + 1, em.dimension, dtype=np.int64))
    expected[-1, -1] = em.dimension
    return bool(np.array_equal(gram, expected))


def check_rows_factored(k: int, spot_checks: int = 64, seed: int = 0) -> bool:
    """Orthogonality through ``<u kron v, w kron z> = <u, w><v, z>`` on Hadamard rows.

    The identity itself is spot-checked against explicit Kronecker products
    on random row pairs.
    """
    h = _sylvester(k)
    order = 1 << k
    hg = h @ h.T
    if not np.array_equal(hg, order * np.eye(order, dtype=np.int64)):
        return False
    if np.any(h[1:].sum(axis=1) != 0):
        return False
    sub = hg[1:, 1:]
    side = order - 1
    # Row block i of the pair Gram: <M_(i,j), M_(i',j')> = G[i,i'] * G[j,j'].
    for i in range(side):
        block = np.kron(sub[i], sub)
        expected = np.zeros((side, side * side), dtype=np.int64)
        expected[:, i * side:(i + 1) * side] = order * order * np.eye(side, dtype=np.int64)
        if not np.array_equal(block, expected):
            return False
    rng = np.random.default_rng(seed)
    for _ in range(spot_checks):
        t1, t2 = rng.integers(1, row_count(k) + 1, size=2)
        r1, a1, b1 = encoding_row(k, int(t1))
        r2, a2, b2 = encoding_row(k, int(t2))
        if int(r1 @ r2) != int(a1 @ a2) * int(b1 @ b2):
            return False
    return True
