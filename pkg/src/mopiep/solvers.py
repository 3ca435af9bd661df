"""One entry point for every solver and scalar kind."""

from __future__ import annotations

from dataclasses import dataclass

from .coretrans import iep_core
from .errors import ValidationError
from .krylov import KrylovOptions, iep_kryl, krylreorth_solve
from .model import BandedHessenberg, DiscreteSystem, starting_vectors
from .moments import oracle_solve
from .scalar import get_kind

ALGORITHMS = ("kryl", "krylreorth_partial", "krylreorth_full", "core", "oracle")


@dataclass
class Solution:
    W: object
    V: object
    H: BandedHessenberg
    algorithm: str


def solve(system: DiscreteSystem, algorithm: str = "krylreorth_full", kind=None,
          reorthogonalize: bool = True, breakdown_tol: float | None = None) -> Solution:
    """Solve the inverse eigenvalue problem for ``system``.

    ``kind`` converts the system first (e.g. a rational Hahn system solved
    in ``double``).
    """
    if algorithm not in ALGORITHMS:
        raise ValidationError(f"unknown algorithm {algorithm!r}; choose from {', '.join(ALGORITHMS)}")
    if kind is not None:
        system = system.astype(get_kind(kind))
    if algorithm == "oracle":
        W, V, H = oracle_solve(system)
        return Solution(W, V, H, algorithm)
    start = starting_vectors(system)
    z = system.nodes
    if algorithm == "kryl":
        pair, H = iep_kryl(z, start, breakdown_tol)
        return Solution(pair.W, pair.V, H, algorithm)
    if algorithm == "core":
        W, V, H = iep_core(z, start)
        return Solution(W, V, H, algorithm)
    strategy = algorithm.split("_", 1)[1]
    W, V, H = krylreorth_solve(z, start, KrylovOptions(strategy, reorthogonalize, breakdown_tol))
    return Solution(W, V, H, algorithm)
