#Clase base para los componentes con parámetros entrenables
#Los parámetros se descubren recorriendo los atributos en orden de creación

from abc import ABC
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from . import ops
from .tensor import ShapeError, Tensor


class Module(ABC):
    """Clase base abstracta para todos los bloques con parámetros"""

    def named_parameters(self, prefix: str = "") -> Iterator[Tuple[str, Tensor]]:
        """
        Recorre los parámetros del módulo y de sus submódulos.

        Args:
            prefix: Prefijo a anteponer a cada nombre

        Returns:
            Iterador de tuplas (nombre con puntos, tensor)
        """
        for attr, value in vars(self).items():
            name = f"{prefix}{attr}"
            if isinstance(value, Tensor) and value.requires_grad:
                yield name, value
            elif isinstance(value, Module):
                yield from value.named_parameters(f"{name}.")
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        yield from item.named_parameters(f"{name}.{i}.")

    def parameters(self) -> List[Tensor]:
        return [p for _, p in self.named_parameters()]

    def num_parameters(self) -> int:
        return int(sum(p.size for p in self.parameters()))

    def zero_grad(self) -> None:
        for p in self.parameters():
            p.zero_grad()

    def state_dict(self) -> Dict[str, np.ndarray]:
        return {name: p.data.copy() for name, p in self.named_parameters()}

    def load_state_dict(self, state: Dict[str, np.ndarray]) -> None:
        """
        Carga valores de parámetros por nombre.

        Args:
            state: Diccionario nombre -> array con la misma forma
        """
        params = dict(self.named_parameters())
        missing = sorted(set(params) - set(state))
        if missing:
            raise KeyError(f"Faltan parámetros en el estado: {missing[:5]}")
        for name, p in params.items():
            value = np.asarray(state[name], dtype=np.float64)
            if value.shape != p.shape:
                raise ShapeError(f"Parámetro {name}: forma {value.shape}, se esperaba {p.shape}")
            p.data = value.copy()


def gaussian(rng: np.random.Generator, shape: Tuple[int, ...], std: float, name: str) -> Tensor:
    return Tensor(rng.normal(0.0, std, size=shape), requires_grad=True, name=name)


class Linear(Module):
    """Capa lineal x @ W + b"""

    def __init__(self, d_in: int, d_out: int, rng: np.random.Generator, bias: bool = True,
                 zero: bool = False):
        std = np.sqrt(2.0 / (d_in + d_out))
        self.weight = Tensor(np.zeros((d_in, d_out)), requires_grad=True, name="weight") if zero \
            else gaussian(rng, (d_in, d_out), std, "weight")
        self.bias: Optional[Tensor] = Tensor(np.zeros(d_out), requires_grad=True, name="bias") if bias else None

    def __call__(self, x: Tensor) -> Tensor:
        out = ops.matmul(x, self.weight)
        if self.bias is not None:
            out = ops.add_row(out, self.bias)
        return out
