"""
Classification sweeps over (α, α̃)
Grid points are snapped to integer channels and classified in a worker pool
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Dict, List

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..capacity.formulas import classify_interaction
from ..channel.core import ChannelParams
from ..errors import InvalidArgumentError

logger = logging.getLogger(__name__)

COLUMNS = ["alpha_num", "alpha_den", "alphat_num", "alphat_den", "n", "m", "nb", "mb", "class"]


def snap(value: Fraction) -> int:
    """Nearest integer, halves rounded up"""
    return math.floor(value + Fraction(1, 2))


class SweepGrid(BaseModel):
    """Square (α, α̃) grid at fixed γ = ñ/n"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    gamma: Fraction
    alpha_step: Fraction
    alpha_max: Fraction
    base_n: int = Field(default=12, ge=1)

    @field_validator("gamma", "alpha_step", "alpha_max", mode="before")
    @classmethod
    def _rational(cls, value) -> Fraction:
        try:
            return Fraction(value)
        except (ValueError, TypeError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational number: {value!r}") from exc

    @field_validator("alpha_step")
    @classmethod
    def _positive(cls, value: Fraction) -> Fraction:
        if value <= 0:
            raise ValueError("alpha step must be positive")
        return value

    def alphas(self) -> List[Fraction]:
        out, value = [], Fraction(0)
        while value <= self.alpha_max:
            out.append(value)
            value += self.alpha_step
        return out

    def channel(self, alpha: Fraction, alpha_b: Fraction) -> ChannelParams:
        n = self.base_n
        n_b = snap(self.gamma * n)
        return ChannelParams.of(n, snap(alpha * n), n_b, snap(alpha_b * n_b))

    def points(self) -> List[tuple]:
        return [(a, at) for a in self.alphas() for at in self.alphas()]


def _row(args) -> Dict[str, object]:
    grid, alpha, alpha_b = args
    p = grid.channel(alpha, alpha_b)
    return {
        "alpha_num": alpha.numerator,
        "alpha_den": alpha.denominator,
        "alphat_num": alpha_b.numerator,
        "alphat_den": alpha_b.denominator,
        "n": p.n,
        "m": p.m,
        "nb": p.n_b,
        "mb": p.m_b,
        "class": classify_interaction(p).value,
    }


def sweep(grid: SweepGrid, workers: int = 1) -> pd.DataFrame:
    """One row per grid point, in grid order"""
    if grid.gamma < 0 or grid.alpha_max < 0:
        raise InvalidArgumentError("gamma and alpha max must be nonnegative")
    jobs = [(grid, a, at) for a, at in grid.points()]
    logger.info("sweeping %d grid points with %d workers", len(jobs), workers)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_row, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        rows = [_row(job) for job in jobs]
    return pd.DataFrame(rows, columns=COLUMNS)
