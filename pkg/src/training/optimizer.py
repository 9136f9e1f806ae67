#Optimizador de momentos adaptativos con weight decay desacoplado y calendarios escalonados

from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from src.autodiff import Tensor


@dataclass(frozen=True)
class StepDecaySchedule:
    """lr(it) = lr0 · ratio^floor(it / step)"""
    lr0: float
    step: int
    ratio: float

    def __call__(self, iteration: int) -> float:
        return self.lr0 * self.ratio ** (iteration // self.step)


@dataclass
class ParamGroup:
    name: str
    params: List[Tensor]
    schedule: StepDecaySchedule
    m: List[np.ndarray] = field(default_factory=list)
    v: List[np.ndarray] = field(default_factory=list)

    def __post_init__(self):
        self.m = [np.zeros_like(p.data) for p in self.params]
        self.v = [np.zeros_like(p.data) for p in self.params]


class AdamW:
    """
    Adam con weight decay desacoplado y un calendario de lr por grupo.

    Los parámetros sin gradiente en un paso sólo reciben el decaimiento.
    """

    def __init__(self, groups: Sequence[ParamGroup], betas: Tuple[float, float] = (0.9, 0.999),
                 weight_decay: float = 1e-4, eps: float = 1e-8):
        self.groups = list(groups)
        self.beta1, self.beta2 = betas
        self.weight_decay = weight_decay
        self.eps = eps
        self.steps = 0

    def learning_rates(self, iteration: int) -> Dict[str, float]:
        return {g.name: g.schedule(iteration) for g in self.groups}

    def zero_grad(self) -> None:
        for group in self.groups:
            for p in group.params:
                p.zero_grad()

    def step(self, iteration: int) -> None:
        self.steps += 1
        c1 = 1.0 - self.beta1 ** self.steps
        c2 = 1.0 - self.beta2 ** self.steps
        for group in self.groups:
            lr = group.schedule(iteration)
            for i, p in enumerate(group.params):
                p.data *= 1.0 - lr * self.weight_decay
                if p.grad is None:
                    continue
                group.m[i] = self.beta1 * group.m[i] + (1.0 - self.beta1) * p.grad
                group.v[i] = self.beta2 * group.v[i] + (1.0 - self.beta2) * p.grad ** 2
                p.data -= lr * (group.m[i] / c1) / (np.sqrt(group.v[i] / c2) + self.eps)
