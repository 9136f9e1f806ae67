#Tensor de 64 bits y grafo (cinta) de diferenciación en modo reverso
#El grafo guarda las aplicaciones de primitivas en orden de ejecución
#backward recorre la cinta exactamente en el orden inverso

import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np


class ShapeError(ValueError):
    """Error de forma detectado antes de ejecutar una primitiva"""


class NonFiniteError(ValueError):
    """Una primitiva produjo NaN o Inf"""

    def __init__(self, op: str):
        super().__init__(f"La operación '{op}' produjo valores no finitos")
        self.op = op


class Tensor:
    """Bloque de datos reales de 64 bits con gradiente opcional"""

    def __init__(self, data: Any, requires_grad: bool = False, name: Optional[str] = None):
        """
        Inicializa el tensor.

        Args:
            data: Datos convertibles a un array de numpy (se copian a float64)
            requires_grad: True si el tensor es una hoja entrenable
            name: Nombre opcional (útil para depurar y para checkpoints)
        """
        self.data = np.array(data, dtype=np.float64)
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None
        self.name = name

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def size(self) -> int:
        return self.data.size

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        return float(self.data.reshape(-1)[0])

    def zero_grad(self) -> None:
        self.grad = None

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad}, name={self.name})"

    # Azúcar sintáctico; las primitivas viven en ops
    def __add__(self, other: "Tensor") -> "Tensor":
        from . import ops
        return ops.add(self, other)

    def __sub__(self, other: "Tensor") -> "Tensor":
        from . import ops
        return ops.sub(self, other)

    def __mul__(self, other: "Tensor") -> "Tensor":
        from . import ops
        return ops.mul(self, other)

    def __matmul__(self, other: "Tensor") -> "Tensor":
        from . import ops
        return ops.matmul(self, other)


@dataclass
class Node:
    """Registro de una aplicación de primitiva dentro del grafo"""
    op: str
    inputs: Tuple[Tensor, ...]
    output: Tensor
    vjp: Callable[[np.ndarray], Tuple[Optional[np.ndarray], ...]]
    saved: Dict[str, Any] = field(default_factory=dict)


_local = threading.local()


class Graph:
    """Cinta de operaciones. Se activa como context manager"""

    def __init__(self):
        self.nodes: List[Node] = []

    @staticmethod
    def current() -> Optional["Graph"]:
        stack = getattr(_local, "stack", None)
        return stack[-1] if stack else None

    def __enter__(self) -> "Graph":
        if not hasattr(_local, "stack"):
            _local.stack = []
        _local.stack.append(self)
        return self

    def __exit__(self, *exc) -> None:
        _local.stack.pop()

    def record(self, node: Node) -> None:
        self.nodes.append(node)

    def __len__(self) -> int:
        return len(self.nodes)


def backward(graph: Graph, loss: Tensor, leaves: Optional[Iterable[Tensor]] = None) -> None:
    """
    Propaga gradientes desde una pérdida escalar hasta las hojas entrenables.

    Args:
        graph: Grafo con el forward registrado
        loss: Tensor escalar
        leaves: Hojas que deben recibir gradiente aunque no sean alcanzables
            (reciben cero en ese caso)
    """
    if loss.size != 1:
        raise ShapeError(f"backward necesita una pérdida escalar, recibió forma {loss.shape}")

    if leaves is not None:
        for leaf in leaves:
            if leaf.grad is None:
                leaf.grad = np.zeros_like(leaf.data)

    grads: Dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
    produced = {id(node.output) for node in graph.nodes}
    leaf_by_id: Dict[int, Tensor] = {}

    for node in reversed(graph.nodes):
        g = grads.pop(id(node.output), None)
        if g is None:
            continue
        input_grads = node.vjp(g)
        for tensor, tensor_grad in zip(node.inputs, input_grads):
            if tensor_grad is None or not tensor.requires_grad:
                continue
            key = id(tensor)
            if key in grads:
                grads[key] = grads[key] + tensor_grad
            else:
                grads[key] = tensor_grad
            if key not in produced:
                leaf_by_id[key] = tensor

    # La pérdida puede ser ella misma una hoja
    if id(loss) not in produced and loss.requires_grad:
        leaf_by_id[id(loss)] = loss

    for key, leaf in leaf_by_id.items():
        g = grads.get(key)
        if g is None:
            continue
        leaf.grad = g.copy() if leaf.grad is None else leaf.grad + g
