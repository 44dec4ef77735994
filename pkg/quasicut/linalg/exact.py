from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import sympy

from quasicut.core.configuration import get_toolkit_config
from quasicut.core.errors import QuasicutInternalError, QuasicutValidationError
from quasicut.core.logging import get_logger
from quasicut.core.utils import make_rng

_logcore = get_logger(__name__)

_PRIME_LOW = 2**30
_PRIME_HIGH = 2**31 - 2**20


@dataclass(frozen=True)
class ExactMatrix:
    """Integer or rational matrix whose rows and columns carry combinatorial labels.

    0-1 families are stored as ``int64``; anything else as an ``object`` array of ``int`` or ``Fraction``.
    """

    name: str
    entries: np.ndarray = field(repr=False)
    row_labels: tuple[tuple[int, ...], ...] = field(repr=False)
    col_labels: tuple[tuple[int, ...], ...] = field(repr=False)
    flags: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.entries.ndim != 2:
            raise QuasicutValidationError("Matrix entries must be two dimensional")

        if self.entries.shape != (len(self.row_labels), len(self.col_labels)):
            raise QuasicutValidationError(
                f"Matrix {self.name} has shape {self.entries.shape} but "
                f"{len(self.row_labels)}x{len(self.col_labels)} labels",
            )

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.row_labels), len(self.col_labels))

    def to_integer_rows(self) -> list[list[int]]:
        """Rows scaled by the lcm of their denominators; scaling rows preserves rank."""
        rows: list[list[int]] = []
        for row in self.entries.tolist():
            values = [Fraction(v) for v in row]
            scale = math.lcm(*(v.denominator for v in values)) if values else 1
            rows.append([int(v * scale) for v in values])

        return rows


def bareiss_rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank over the rationals by fraction-free elimination on an integer matrix.

    Pivots are the entry of largest absolute value in the current column, ties to the first row.
    """
    if not rows or not rows[0]:
        return 0

    a = np.array([[int(v) for v in row] for row in rows], dtype=object)
    n_rows, n_cols = a.shape
    rank = 0
    previous = 1

    for col in range(n_cols):
        if rank == n_rows:
            break

        column = [abs(v) for v in a[rank:, col]]
        best = max(column)
        if best == 0:
            continue

        pivot_row = rank + column.index(best)
        if pivot_row != rank:
            a[[rank, pivot_row]] = a[[pivot_row, rank]]

        pivot = a[rank, col]
        below = a[rank + 1 :, col].copy()
        a[rank + 1 :, col + 1 :] = (pivot * a[rank + 1 :, col + 1 :] - np.outer(below, a[rank, col + 1 :])) // previous
        a[rank + 1 :, col] = 0

        previous = pivot
        rank += 1

    return rank


def modular_rank(rows: Sequence[Sequence[int]] | np.ndarray, prime: int) -> int:
    """Rank over GF(prime) in machine integers; ``prime`` must be below 2**31."""
    if prime >= 2**31:
        raise QuasicutValidationError(f"Prime {prime} is too large for machine-integer elimination")

    a = np.array(
        [[int(v) % prime for v in row] for row in rows] if not isinstance(rows, np.ndarray) else rows,
        dtype=np.int64,
    )
    if a.size == 0:
        return 0

    a %= prime
    n_rows, n_cols = a.shape
    rank = 0
    for col in range(n_cols):
        if rank == n_rows:
            break

        nonzero = np.flatnonzero(a[rank:, col])
        if nonzero.size == 0:
            continue

        pivot_row = rank + int(nonzero[0])
        if pivot_row != rank:
            a[[rank, pivot_row]] = a[[pivot_row, rank]]

        inverse = pow(int(a[rank, col]), -1, prime)
        a[rank] = (a[rank] * inverse) % prime

        factors = a[rank + 1 :, col].copy()
        if factors.any():
            a[rank + 1 :] = (a[rank + 1 :] - np.outer(factors, a[rank]) % prime) % prime

        rank += 1

    return rank


def cross_check_primes(seed: int = 0, count: int = 2) -> list[int]:
    rng = make_rng(seed)
    primes: list[int] = []
    while len(primes) < count:
        candidate = int(sympy.nextprime(int(rng.integers(_PRIME_LOW, _PRIME_HIGH))))
        if candidate not in primes:
            primes.append(candidate)

    return primes


def _integer_rows(matrix: ExactMatrix) -> list[list[int]]:
    if matrix.entries.dtype != object:
        return matrix.entries.astype(np.int64).tolist()

    return matrix.to_integer_rows()


def rank_exact(matrix: ExactMatrix, *, seed: int = 0) -> int:
    """Exact rank over the rationals.

    A full rank modulo a prime certifies full rank over the rationals; the shortcut is taken only when both
    primes report it. Any other outcome is decided by fraction-free elimination, which both modular ranks must
    then reproduce.
    """
    rows = _integer_rows(matrix)
    n_rows, n_cols = matrix.shape
    if n_rows == 0 or n_cols == 0:
        return 0

    first_prime, second_prime = cross_check_primes(seed)
    first = modular_rank(rows, first_prime)
    second = modular_rank(rows, second_prime)

    full = min(n_rows, n_cols)
    if first == second == full and get_toolkit_config().certify_full_rank_modularly:
        _logcore.trace(
            "Rank of {name} certified full ({rank}) modulo {p1} and {p2}",
            name=matrix.name,
            rank=first,
            p1=first_prime,
            p2=second_prime,
        )
        return first

    exact = bareiss_rank(rows)

    if first != exact or second != exact:
        _logcore.error(
            "Rank disagreement on {name}: exact {exact}, mod {p1} -> {r1}, mod {p2} -> {r2}",
            name=matrix.name,
            exact=exact,
            p1=first_prime,
            r1=first,
            p2=second_prime,
            r2=second,
        )
        raise QuasicutInternalError(
            f"Exact rank {exact} of {matrix.name} disagrees with modular ranks {first} (mod {first_prime}) "
            f"and {second} (mod {second_prime})",
        )

    return exact
