from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np

from quasicut.core.errors import QuasicutValidationError
from quasicut.core.logging import get_logger
from quasicut.graphs.graph import PartitionStats

_logcore = get_logger(__name__)

_MIN_PARTS = 4


class VerdictTag(StrEnum):
    UNIFORM = "uniform"
    SPECIAL_VERTEX = "special_vertex"
    UNSTRUCTURED = "unstructured"


@dataclass(frozen=True, kw_only=True)
class StructureVerdict:
    """Best fitting template for a partition's density profile.

    ``p_prime`` is set for uniform profiles. ``s``, ``x`` and ``y`` are the best special-part fit whatever the tag,
    with ``sqrt(x)`` the background density and ``sqrt(y)`` the density towards part ``s``.
    """

    tag: VerdictTag
    tolerance: float
    residuals: dict[str, float]
    p_prime: float | None = None
    s: int | None = None
    x: float | None = None
    y: float | None = None
    diagnostics: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict[str, object]:
        return {
            "tag": str(self.tag),
            "tolerance": self.tolerance,
            "residuals": self.residuals,
            "p_prime": self.p_prime,
            "s": self.s,
            "x": self.x,
            "y": self.y,
            "diagnostics": self.diagnostics,
        }


@dataclass(frozen=True)
class _SpecialFit:
    s: int
    root_x: float
    root_y: float
    residual: float
    z: float


def _fit_uniform(stats: PartitionStats) -> tuple[float, float]:
    values = np.concatenate((stats.pair_densities(), stats.x))
    level = float(np.median(values))
    return level, float(np.max(np.abs(values - level)))


def _fit_special(stats: PartitionStats, s: int) -> _SpecialFit:
    t = stats.t
    others = [i for i in range(t) if i != s]
    background = np.array([stats.d[i, j] for a, i in enumerate(others) for j in others[a + 1 :]])
    towards = np.array([stats.d[i, s] for i in others])

    root_x = float(np.median(background))
    root_y = float(np.median(towards))
    x, y = root_x**2, root_y**2
    special_within = root_x * (2 * y - x) / y if y > 0 else math.inf

    deviations = [
        np.max(np.abs(background - root_x)),
        np.max(np.abs(towards - root_y)),
        np.max(np.abs(stats.x[others] - root_x)),
        abs(float(stats.x[s]) - special_within),
    ]
    return _SpecialFit(
        s=s,
        root_x=root_x,
        root_y=root_y,
        residual=float(max(deviations)),
        z=float(np.median(background**2)),
    )


def classify_structure(stats: PartitionStats, tol: float) -> StructureVerdict:
    """Match a density profile against the uniform and single-special-part solution templates.

    Templates are tried from simplest to richest and the first one fitting within ``tol`` wins.
    """
    if stats.t < _MIN_PARTS:
        raise QuasicutValidationError(f"Structure classification needs at least {_MIN_PARTS} parts, got {stats.t}")

    if stats.min_pair_density() <= 0:
        raise QuasicutValidationError("Structure classification needs positive pair densities")

    level, uniform_residual = _fit_uniform(stats)
    fits = [_fit_special(stats, s) for s in range(stats.t)]
    best = min(fits, key=lambda fit: (fit.residual, fit.s))

    residuals = {"uniform": uniform_residual, "special_vertex": best.residual}
    x, y = best.root_x**2, best.root_y**2
    diagnostics = {"z": best.z, "x_plus_y_minus_z": x + y - best.z}
    common = {"tolerance": tol, "residuals": residuals, "s": best.s, "x": x, "y": y, "diagnostics": diagnostics}

    if uniform_residual <= tol:
        verdict = StructureVerdict(tag=VerdictTag.UNIFORM, p_prime=level, **common)  # type: ignore[arg-type]
    elif best.residual <= tol:
        verdict = StructureVerdict(tag=VerdictTag.SPECIAL_VERTEX, **common)  # type: ignore[arg-type]
    else:
        verdict = StructureVerdict(tag=VerdictTag.UNSTRUCTURED, **common)  # type: ignore[arg-type]

    _logcore.debug(
        "Classified {t} parts as {tag} (uniform residual {u:.4f}, special residual {sv:.4f} at s={s})",
        t=stats.t,
        tag=verdict.tag,
        u=uniform_residual,
        sv=best.residual,
        s=best.s,
    )
    return verdict
