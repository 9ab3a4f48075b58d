"""Run-time constants and the seeded random streams."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np


def stream(seed: int, *path: int) -> np.random.Generator:
    """Independent Philox stream for ``seed`` and a spawn path (counter-based, splittable)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=tuple(path))))


@dataclass(frozen=True)
class Config:
    eps: Fraction = Fraction(1, 5)
    alpha: Fraction = Fraction(8)
    rho: Fraction = Fraction(8)
    lam: int = 16
    theta: Fraction = Fraction(1, 8)
    seed: int = 0
    small_c: Fraction = Fraction(1)   # small-matching switch below small_c * log2(n)

    def __post_init__(self):
        for name in ("eps", "alpha", "rho", "theta", "small_c"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))

    def violations(self) -> list[str]:
        out = []
        eps = self.eps
        if eps.numerator != 1 or eps.denominator < 2:
            out.append(f"eps = {eps} is not 1/k with k >= 2")
        if not self.alpha >= max(2, 1 / eps):
            out.append(f"alpha >= max(2, 1/eps) fails: {self.alpha} < {max(2, 1 / eps)}")
        if not 1 / self.alpha <= self.theta:
            out.append(f"1/alpha <= theta fails: {1 / self.alpha} > {self.theta}")
        if not self.rho >= 1:
            out.append(f"rho >= 1 fails: {self.rho}")
        if self.lam < 1:
            out.append(f"lambda >= 1 fails: {self.lam}")
        return out

    @property
    def sparsifier_enabled(self) -> bool:
        return 1 / self.alpha <= self.theta

    def validate(self) -> "Config":
        bad = [v for v in self.violations() if not v.startswith("1/alpha")]
        if bad:
            raise ValueError("; ".join(bad))
        return self
