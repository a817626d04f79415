"""Two-state susceptible/informed diffusion model.

The informed fraction of a population under pairwise random contact
follows the logistic equation dx/dt = beta * (1 - x) * x.  The closed
form is the product API; a fixed-step Runge-Kutta integrator of the same
equation serves as its independent check.  ``diffusion_check`` asks the
empirical question for a simulated network: at which round has every
node received at least one message.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

__all__ = ["SiParams", "si_closed_form", "si_numeric", "diffusion_check"]


@dataclass(frozen=True)
class SiParams:
    """Infection rate and initial informed fraction.

    ``n_prime`` records the population size when the initial fraction is a
    single informed node (x0 = 1/n').
    """

    beta: float
    x0: float
    n_prime: int | None = None

    def __post_init__(self) -> None:
        if self.beta <= 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not 0 < self.x0 <= 1:
            raise ValueError(f"x0 must be in (0, 1], got {self.x0}")

    @classmethod
    def single_source(cls, beta: float, n_prime: int) -> "SiParams":
        if n_prime < 1:
            raise ValueError(f"population must be >= 1, got {n_prime}")
        return cls(beta=beta, x0=1.0 / n_prime, n_prime=n_prime)


def si_closed_form(params: SiParams, t: float) -> float:
    """Informed fraction x(t) = x0 e^(bt) / (1 - x0 + x0 e^(bt)).

    Evaluated as x0 / (x0 + (1 - x0) e^(-bt)), which is the same quantity
    but free of overflow for large bt.
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    x0 = params.x0
    return x0 / (x0 + (1.0 - x0) * math.exp(-params.beta * t))


def si_numeric(params: SiParams, t: float, dt: float = 1e-3) -> float:
    """Fixed-step RK4 integration of dx/dt = beta (1 - x) x from x0 to time t."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    beta = params.beta

    def rate(x: float) -> float:
        return beta * (1.0 - x) * x

    x = params.x0
    steps = int(t / dt)
    remainder = t - steps * dt
    for _ in range(steps):
        x = _rk4_step(rate, x, dt)
    if remainder > 0:
        x = _rk4_step(rate, x, remainder)
    return x


def _rk4_step(rate, x: float, h: float) -> float:
    k1 = rate(x)
    k2 = rate(x + 0.5 * h * k1)
    k3 = rate(x + 0.5 * h * k2)
    k4 = rate(x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def diffusion_check(trace: Iterable, n_nodes: int) -> int | None:
    """First round at which every node has received at least one message.

    ``trace`` is a round-ordered sequence of message records with ``step``
    and ``receiver`` fields (as produced by the network simulation).
    Returns None when coverage is never reached.
    """
    pending = set(range(n_nodes))
    for record in trace:
        pending.discard(record.receiver)
        if not pending:
            return record.step
    return None
