"""Run parameters shared by every algorithm."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from . import hashbag
from .parallel import default_threads

MODES = ("auto", "sparse", "dense")


@dataclass(frozen=True)
class VgcParams:
    """Local-search budget: neighbours examined per task before flushing."""

    tau: int = 512
    enabled: bool = True

    def __post_init__(self):
        if self.tau < 1:
            raise ValueError(f"tau must be >= 1, got {self.tau}")

    @property
    def budget(self) -> int:
        return self.tau if self.enabled else 1


@dataclass(frozen=True)
class Params:
    vgc: VgcParams = VgcParams()
    lam: int = hashbag.LAMBDA
    sigma: int = hashbag.SIGMA
    alpha: float = hashbag.ALPHA
    kappa: int = hashbag.KAPPA
    beta: float = 1.5
    theta: float = 20.0  # densify when frontier out-degree sum exceeds m / theta
    mode: str = "auto"
    threads: int = 0  # 0: CONCUR_GRAPH_THREADS or machine parallelism
    seed: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.beta <= 1.0:
            raise ValueError(f"beta must exceed 1, got {self.beta}")
        if self.theta <= 0:
            raise ValueError(f"theta must be positive, got {self.theta}")
        if self.threads < 0:
            raise ValueError(f"threads must be >= 0, got {self.threads}")

    @property
    def tau(self) -> int:
        return self.vgc.budget

    @property
    def nthreads(self) -> int:
        return self.threads or default_threads()

    def replace(self, **changes) -> Params:
        if "tau" in changes:
            changes["vgc"] = dataclasses.replace(self.vgc, tau=changes.pop("tau"))
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return {
            "tau": self.vgc.tau,
            "vgc": self.vgc.enabled,
            "lambda": self.lam,
            "sigma": self.sigma,
            "alpha": self.alpha,
            "kappa": self.kappa,
            "beta": self.beta,
            "theta": self.theta,
            "mode": self.mode,
            "seed": self.seed,
            "threads": self.nthreads,
        }


def batch_bounds(total: int, beta: float, first: int = 1) -> list[int]:
    """Prefix-doubling boundaries: sizes 1, ceil(beta), ... covering ``total``."""
    bounds = [0]
    size = first
    while bounds[-1] < total:
        bounds.append(min(total, bounds[-1] + size))
        size = max(size + 1, int(-(-size * beta // 1)))
    return bounds
