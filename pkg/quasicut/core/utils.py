from __future__ import annotations

import hashlib
import zlib
from collections.abc import Iterable, Sequence
from fractions import Fraction

import numpy as np

from quasicut.core.errors import QuasicutValidationError


def parse_fraction(value: str | float | Fraction) -> Fraction:
    if isinstance(value, Fraction):
        return value

    try:
        return Fraction(str(value).strip()).limit_denominator(10**6)
    except (ValueError, ZeroDivisionError) as e:
        raise QuasicutValidationError(f"Cannot parse `{value}` as a fraction") from e


def parse_alpha(value: str | Sequence[str | float | Fraction]) -> tuple[Fraction, ...]:
    """Parse a size vector such as ``"1/3,1/3,1/3"`` or ``[0.5, 0.5]``.

    The entries must be positive and sum to exactly 1 after rational rounding.
    """
    items = value.split(",") if isinstance(value, str) else list(value)
    alpha = tuple(parse_fraction(item) for item in items if str(item).strip() != "")

    if not alpha:
        raise QuasicutValidationError("Size vector is empty")

    if any(a <= 0 for a in alpha):
        raise QuasicutValidationError(f"Size vector entries must be positive: {format_alpha(alpha)}")

    if sum(alpha) != 1:
        raise QuasicutValidationError(f"Size vector must sum to 1, got {sum(alpha)}: {format_alpha(alpha)}")

    return alpha


def balanced_alpha(r: int) -> tuple[Fraction, ...]:
    if r < 1:
        raise QuasicutValidationError("A cut needs at least one part")

    return tuple(Fraction(1, r) for _ in range(r))


def format_alpha(alpha: Iterable[Fraction]) -> str:
    return ",".join(str(a) for a in alpha)


def stage_spawn_key(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


def derive_seed_sequence(master_seed: int, *names: str) -> np.random.SeedSequence:
    """Seed sequence for a named consumer of the master seed.

    The derivation only depends on the names, never on the order in which consumers run.
    """
    return np.random.SeedSequence(master_seed, spawn_key=tuple(stage_spawn_key(name) for name in names))


def derive_seed(master_seed: int, *names: str) -> int:
    return int(derive_seed_sequence(master_seed, *names).generate_state(1, np.uint64)[0])


def make_rng(seed: int | np.random.SeedSequence) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def make_block_rng(seed: int, block: int) -> np.random.Generator:
    """Independent stream for block ``block`` of a computation seeded by ``seed``."""
    return np.random.Generator(np.random.PCG64(seed).jumped(block + 1))


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()
