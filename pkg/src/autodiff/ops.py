#Primitivas diferenciables del motor
#Cada primitiva valida formas, calcula el valor y, si hay un grafo activo
#y alguna entrada requiere gradiente, registra su producto vector-jacobiano

from typing import Callable, Dict, List, Optional, Sequence, Tuple, Any

import numpy as np

from .tensor import Graph, Node, NonFiniteError, ShapeError, Tensor

NORM_EPS = 1e-12


def _emit(op: str, inputs: Sequence[Tensor], value: np.ndarray,
          vjp: Callable[[np.ndarray], Tuple[Optional[np.ndarray], ...]],
          saved: Optional[Dict[str, Any]] = None) -> Tensor:
    """Crea la salida, comprueba finitud y registra el nodo si corresponde"""
    if not np.all(np.isfinite(value)):
        raise NonFiniteError(op)
    requires_grad = any(t.requires_grad for t in inputs)
    out = Tensor(value, requires_grad=requires_grad)
    graph = Graph.current()
    if graph is not None and requires_grad:
        graph.record(Node(op=op, inputs=tuple(inputs), output=out, vjp=vjp, saved=saved or {}))
    return out


def _same_shape(op: str, a: Tensor, b: Tensor) -> None:
    if a.shape != b.shape:
        raise ShapeError(f"{op}: formas incompatibles {a.shape} y {b.shape}")


def _matrix(op: str, x: Tensor) -> None:
    if x.data.ndim != 2:
        raise ShapeError(f"{op}: se esperaba una matriz, forma {x.shape}")


# Aritmética básica

def matmul(a: Tensor, b: Tensor) -> Tensor:
    _matrix("matmul", a)
    _matrix("matmul", b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul: formas incompatibles {a.shape} y {b.shape}")
    value = a.data @ b.data
    return _emit("matmul", (a, b), value,
                 lambda g: (g @ b.data.T, a.data.T @ g))


def add(a: Tensor, b: Tensor) -> Tensor:
    _same_shape("add", a, b)
    return _emit("add", (a, b), a.data + b.data, lambda g: (g, g))


def sub(a: Tensor, b: Tensor) -> Tensor:
    _same_shape("sub", a, b)
    return _emit("sub", (a, b), a.data - b.data, lambda g: (g, -g))


def mul(a: Tensor, b: Tensor) -> Tensor:
    _same_shape("mul", a, b)
    return _emit("mul", (a, b), a.data * b.data,
                 lambda g: (g * b.data, g * a.data))


def scale(x: Tensor, c: float) -> Tensor:
    c = float(c)
    return _emit("scale", (x,), x.data * c, lambda g: (g * c,))


def add_row(x: Tensor, row: Tensor) -> Tensor:
    """Suma un vector fila (D,) o (1, D) a cada fila de x (n, D)"""
    _matrix("add_row", x)
    if row.size != x.shape[1]:
        raise ShapeError(f"add_row: formas incompatibles {x.shape} y {row.shape}")
    r = row.data.reshape(1, -1)
    return _emit("add_row", (x, row), x.data + r,
                 lambda g: (g, g.sum(axis=0).reshape(row.shape)))


def sub_row(x: Tensor, row: Tensor) -> Tensor:
    """Resta un vector fila a cada fila de x"""
    _matrix("sub_row", x)
    if row.size != x.shape[1]:
        raise ShapeError(f"sub_row: formas incompatibles {x.shape} y {row.shape}")
    r = row.data.reshape(1, -1)
    return _emit("sub_row", (x, row), x.data - r,
                 lambda g: (g, -g.sum(axis=0).reshape(row.shape)))


def transpose(x: Tensor) -> Tensor:
    _matrix("transpose", x)
    return _emit("transpose", (x,), x.data.T.copy(), lambda g: (g.T,))


def sum_all(x: Tensor) -> Tensor:
    return _emit("sum_all", (x,), np.array(x.data.sum()),
                 lambda g: (np.full_like(x.data, float(g)),))


# Ejes de tokens y features

def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    """Concatena a lo largo del eje de tokens (0) o de features (1)"""
    tensors = list(tensors)
    if not tensors:
        raise ShapeError("concat: lista vacía")
    for t in tensors:
        _matrix("concat", t)
    other = 1 - axis
    widths = {t.shape[other] for t in tensors}
    if len(widths) != 1:
        raise ShapeError(f"concat: formas incompatibles {[t.shape for t in tensors]}")
    sizes = [t.shape[axis] for t in tensors]
    bounds = np.cumsum([0] + sizes)

    def vjp(g):
        if axis == 0:
            return tuple(g[bounds[i]:bounds[i + 1]] for i in range(len(tensors)))
        return tuple(g[:, bounds[i]:bounds[i + 1]] for i in range(len(tensors)))

    return _emit("concat", tensors, np.concatenate([t.data for t in tensors], axis=axis), vjp)


def slice_rows(x: Tensor, start: int, stop: int) -> Tensor:
    _matrix("slice_rows", x)
    if not 0 <= start <= stop <= x.shape[0]:
        raise ShapeError(f"slice_rows: rango [{start}, {stop}) fuera de forma {x.shape}")

    def vjp(g):
        full = np.zeros_like(x.data)
        full[start:stop] = g
        return (full,)

    return _emit("slice_rows", (x,), x.data[start:stop].copy(), vjp)


def gather_rows(x: Tensor, index: np.ndarray) -> Tensor:
    """Selecciona filas por índice (con repetición)"""
    _matrix("gather_rows", x)
    index = np.asarray(index, dtype=np.int64)
    if index.size and (index.min() < 0 or index.max() >= x.shape[0]):
        raise ShapeError(f"gather_rows: índice fuera de rango para forma {x.shape}")

    def vjp(g):
        full = np.zeros_like(x.data)
        np.add.at(full, index, g)
        return (full,)

    return _emit("gather_rows", (x,), x.data[index], vjp)


def mean_rows(x: Tensor) -> Tensor:
    """Media sobre el eje de tokens; devuelve (1, D)"""
    _matrix("mean_rows", x)
    n = x.shape[0]
    if n == 0:
        raise ShapeError("mean_rows: sin filas")
    return _emit("mean_rows", (x,), x.data.mean(axis=0, keepdims=True),
                 lambda g: (np.repeat(g, n, axis=0) / n,))


def masked_mean(x: Tensor, mask: np.ndarray) -> Tensor:
    """Media de las filas marcadas por una máscara booleana; devuelve (1, D)"""
    _matrix("masked_mean", x)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (x.shape[0],):
        raise ShapeError(f"masked_mean: máscara {mask.shape} para forma {x.shape}")
    count = int(mask.sum())
    if count == 0:
        raise ValueError("masked_mean: la máscara no selecciona ninguna fila")

    def vjp(g):
        full = np.zeros_like(x.data)
        full[mask] = g / count
        return (full,)

    return _emit("masked_mean", (x,), x.data[mask].mean(axis=0, keepdims=True), vjp)


def group_max(x: Tensor, k: int) -> Tensor:
    """Máximo sobre grupos de k filas consecutivas: (n*k, D) -> (n, D)"""
    _matrix("group_max", x)
    if k <= 0 or x.shape[0] % k:
        raise ShapeError(f"group_max: {x.shape[0]} filas no se dividen en grupos de {k}")
    n, d = x.shape[0] // k, x.shape[1]
    grouped = x.data.reshape(n, k, d)
    arg = grouped.argmax(axis=1)

    def vjp(g):
        full = np.zeros((n, k, d))
        np.put_along_axis(full, arg[:, None, :], g[:, None, :], axis=1)
        return (full.reshape(n * k, d),)

    return _emit("group_max", (x,), grouped.max(axis=1), vjp, {"argmax": arg})


# No linealidades

def exp(x: Tensor) -> Tensor:
    value = np.exp(x.data)
    return _emit("exp", (x,), value, lambda g: (g * value,))


def log(x: Tensor) -> Tensor:
    with np.errstate(divide="ignore", invalid="ignore"):
        value = np.log(x.data)
    return _emit("log", (x,), value, lambda g: (g / x.data,))


def sin(x: Tensor) -> Tensor:
    return _emit("sin", (x,), np.sin(x.data), lambda g: (g * np.cos(x.data),))


def cos(x: Tensor) -> Tensor:
    return _emit("cos", (x,), np.cos(x.data), lambda g: (-g * np.sin(x.data),))


def leaky_relu(x: Tensor, slope: float = 0.2) -> Tensor:
    factor = np.where(x.data > 0, 1.0, slope)
    return _emit("leaky_relu", (x,), x.data * factor, lambda g: (g * factor,))


def softmax(x: Tensor) -> Tensor:
    """Softmax por filas"""
    _matrix("softmax", x)
    shifted = x.data - x.data.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    y = e / e.sum(axis=1, keepdims=True)

    def vjp(g):
        return (y * (g - (g * y).sum(axis=1, keepdims=True)),)

    return _emit("softmax", (x,), y, vjp)


def l2_normalize(x: Tensor) -> Tensor:
    """Normaliza cada fila a norma unidad; las filas nulas quedan nulas"""
    _matrix("l2_normalize", x)
    norm = np.sqrt((x.data ** 2).sum(axis=1, keepdims=True))
    safe = np.maximum(norm, NORM_EPS)
    y = x.data / safe
    active = norm > NORM_EPS

    def vjp(g):
        proj = np.where(active, (g * y).sum(axis=1, keepdims=True), 0.0)
        return ((g - y * proj) / safe,)

    return _emit("l2_normalize", (x,), y, vjp)


# Pérdidas

def _check_targets(op: str, n_rows: int, n_cols: int, targets: np.ndarray) -> np.ndarray:
    targets = np.asarray(targets, dtype=np.int64)
    if targets.shape != (n_rows,):
        raise ShapeError(f"{op}: objetivos {targets.shape} para {n_rows} filas")
    if targets.size and (targets.min() < 0 or targets.max() >= n_cols):
        raise ValueError(f"{op}: etiqueta fuera de rango [0, {n_cols})")
    return targets


def cross_entropy(logits: Tensor, targets: np.ndarray, mask: Optional[np.ndarray] = None) -> Tensor:
    """
    Entropía cruzada media con objetivos enteros.

    Args:
        logits: Matriz (n, C)
        targets: Clase objetivo por fila
        mask: Máscara booleana (n, C) opcional que restringe el soporte del
            softmax de cada fila; el objetivo debe estar incluido

    Returns:
        Escalar con la media sobre filas
    """
    _matrix("cross_entropy", logits)
    n, c = logits.shape
    targets = _check_targets("cross_entropy", n, c, targets)
    if n == 0:
        raise ShapeError("cross_entropy: sin filas")
    rows = np.arange(n)
    support = np.ones((n, c), dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
    if support.shape != (n, c):
        raise ShapeError(f"cross_entropy: máscara {support.shape} para logits {logits.shape}")
    if not support[rows, targets].all():
        raise ValueError("cross_entropy: la máscara excluye el objetivo")

    masked = np.where(support, logits.data, -np.inf)
    shifted = masked - masked.max(axis=1, keepdims=True)
    e = np.where(support, np.exp(shifted), 0.0)
    z = e.sum(axis=1, keepdims=True)
    probs = e / z
    value = -(shifted[rows, targets] - np.log(z[:, 0])).mean()

    def vjp(g):
        grad = probs.copy()
        grad[rows, targets] -= 1.0
        return (grad * (float(g) / n),)

    return _emit("cross_entropy", (logits,), np.array(value), vjp)


def nll(probs: Tensor, targets: np.ndarray) -> Tensor:
    """Log-verosimilitud negativa media sobre probabilidades ya normalizadas"""
    _matrix("nll", probs)
    n, c = probs.shape
    targets = _check_targets("nll", n, c, targets)
    rows = np.arange(n)
    picked = probs.data[rows, targets]
    with np.errstate(divide="ignore"):
        value = -np.log(picked).mean()

    def vjp(g):
        grad = np.zeros_like(probs.data)
        grad[rows, targets] = -float(g) / (n * picked)
        return (grad,)

    return _emit("nll", (probs,), np.array(value), vjp)


# Similitudes por pares

def pairwise_euclidean(a: Tensor, b: Tensor) -> Tensor:
    """Distancia euclídea entre cada fila de a (n, D) y de b (m, D)"""
    _matrix("pairwise_euclidean", a)
    _matrix("pairwise_euclidean", b)
    if a.shape[1] != b.shape[1]:
        raise ShapeError(f"pairwise_euclidean: formas incompatibles {a.shape} y {b.shape}")
    diff = a.data[:, None, :] - b.data[None, :, :]
    dist = np.sqrt((diff ** 2).sum(axis=2))

    def vjp(g):
        coef = np.where(dist > 0, g / np.where(dist > 0, dist, 1.0), 0.0)
        weighted = diff * coef[:, :, None]
        return (weighted.sum(axis=1), -weighted.sum(axis=0))

    return _emit("pairwise_euclidean", (a, b), dist, vjp)


def pairwise_cosine(a: Tensor, b: Tensor) -> Tensor:
    """Similitud coseno por pares; los vectores nulos dan similitud 0"""
    if a.data.ndim == 2 and b.data.ndim == 2 and a.shape[1] != b.shape[1]:
        raise ShapeError(f"pairwise_cosine: formas incompatibles {a.shape} y {b.shape}")
    return matmul(l2_normalize(a), transpose(l2_normalize(b)))


def relative_logits(q: Tensor, rel: np.ndarray) -> Tensor:
    """
    Término de posición relativa: out[a, b] = q[a] · rel[a, b, :].

    rel es una constante (sin gradiente).
    """
    _matrix("relative_logits", q)
    rel = np.asarray(rel, dtype=np.float64)
    if rel.ndim != 3 or rel.shape[0] != q.shape[0] or rel.shape[2] != q.shape[1]:
        raise ShapeError(f"relative_logits: R con forma {rel.shape} para consultas {q.shape}")
    value = np.einsum("ad,abd->ab", q.data, rel)
    return _emit("relative_logits", (q,), value,
                 lambda g: (np.einsum("ab,abd->ad", g, rel),))
