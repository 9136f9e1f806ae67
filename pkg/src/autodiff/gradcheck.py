from typing import Callable

import numpy as np

from .tensor import Graph, Tensor, backward


class GradCheckError(ValueError):
    """La función evaluada no es determinista o el paso es inválido"""


def finite_diff_check(f: Callable[[Tensor], Tensor], x: Tensor, h: float = 1e-6) -> float:
    """
    Compara el gradiente analítico con diferencias centrales.

    Args:
        f: Constructor del grafo; recibe un Tensor y devuelve un escalar
        x: Punto de evaluación
        h: Paso de las diferencias centrales, en [1e-7, 1e-4]

    Returns:
        Máximo sobre coordenadas de |analítico - numérico| / (|analítico| + 1e-8)
    """
    if not 1e-7 <= h <= 1e-4:
        raise GradCheckError(f"Paso h={h} fuera del rango [1e-7, 1e-4]")

    base = np.array(x.data, dtype=np.float64)
    leaf = Tensor(base, requires_grad=True)
    with Graph() as graph:
        out = f(leaf)
    backward(graph, out, leaves=[leaf])
    analytic = leaf.grad

    # Dos evaluaciones idénticas deben dar el mismo valor
    first = f(Tensor(base)).data
    second = f(Tensor(base)).data
    if not np.array_equal(first, second):
        raise GradCheckError("La función no es determinista entre las dos evaluaciones de prueba")

    numeric = np.zeros_like(base)
    for idx in np.ndindex(base.shape):
        plus = base.copy()
        minus = base.copy()
        plus[idx] += h
        minus[idx] -= h
        numeric[idx] = (f(Tensor(plus)).item() - f(Tensor(minus)).item()) / (2 * h)

    if base.size == 0:
        return 0.0
    return float(np.max(np.abs(analytic - numeric) / (np.abs(analytic) + 1e-8)))
