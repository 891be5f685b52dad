"""Golden-section search on a bracket."""

from __future__ import annotations

import math
from typing import Callable

INV_PHI = (math.sqrt(5) - 1) / 2


def golden_section(
    func: Callable[[float], float],
    lo: float,
    hi: float,
    xtol: float,
    max_iter: int = 500,
) -> tuple[float, float, list[tuple[float, float]]]:
    """Shrink ``[lo, hi]`` around a minimum of ``func`` until narrower than ``xtol``.

    Returns the best evaluated point, its value, and every ``(x, f(x))``
    evaluated, in order. Only interior points are evaluated. On a function
    that is not unimodal on the bracket this still returns the best point it
    saw, which is a local minimum at worst.
    """
    if not hi > lo:
        raise ValueError(f"empty bracket [{lo}, {hi}]")
    if xtol <= 0:
        raise ValueError("xtol must be positive")
    history = []

    def f(x):
        val = float(func(x))
        history.append((x, val))
        return val

    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a < xtol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    x_best, f_best = min(history, key=lambda p: p[1])
    return x_best, f_best, history
