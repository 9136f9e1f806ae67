#Atención con registros y tokens de prototipo (ProERA)
#Auto-atención de una cabeza sobre [stream ; registros ; tokens], residual y resta de la media del stream de entrada

import math
from typing import Optional, Tuple

import numpy as np

from src.autodiff import Linear, Module, Tensor, ops
from src.autodiff.module import gaussian
from src.autodiff.tensor import ShapeError


class RegisterBank(Module):
    """Registros aprendibles: un banco para el stream de la query y otro para el de prototipos"""

    def __init__(self, n_r: int, d: int, rng: np.random.Generator, std: float = 0.02):
        if n_r < 0:
            raise ValueError(f"n_r debe ser >= 0, se recibió {n_r}")
        self.n_r = n_r
        self.r_q = gaussian(rng, (n_r, d), std, "r_q")
        self.r_p = gaussian(rng, (n_r, d), std, "r_p")


def init_registers(n_r: int, d: int, rng: np.random.Generator, std: float = 0.02) -> RegisterBank:
    return RegisterBank(n_r, d, rng, std)


class ProERA(Module):
    """
    Bloque ProERA.

    La salida del stream es X + SA([X ; r ; p])·Wo - media(X), donde la
    media se toma sobre los tokens del stream de entrada. Registros y tokens
    de prototipo salen sin resta.
    """

    def __init__(self, d: int, rng: np.random.Generator, low_pass: bool = False, zero_output: bool = False):
        self.d = d
        self.w_q = Linear(d, d, rng, bias=False)
        self.w_k = Linear(d, d, rng, bias=False)
        self.w_v = Linear(d, d, rng, bias=False)
        self.w_o = Linear(d, d, rng, bias=False, zero=zero_output)
        # Sustituye la salida del stream por su media (filtro paso-bajo)
        self.low_pass = low_pass

    def attend(self, seq: Tensor) -> Tensor:
        """Auto-atención escalada de una cabeza con proyección de salida"""
        q, k, v = self.w_q(seq), self.w_k(seq), self.w_v(seq)
        logits = ops.scale(ops.matmul(q, ops.transpose(k)), 1.0 / math.sqrt(self.d))
        return self.w_o(ops.matmul(ops.softmax(logits), v))

    def __call__(self, stream: Tensor, registers: Optional[Tensor] = None, tokens: Optional[Tensor] = None,
                 n_classes: Optional[int] = None) -> Tuple[Tensor, Optional[Tensor], Optional[Tensor]]:
        """
        Args:
            stream: Tokens del stream (n_j, D)
            registers: Registros (n_r, D); None o vacío si no hay
            tokens: Tokens de prototipo (N+1, D) o None
            n_classes: N+1 esperado; si se indica, tokens debe tener exactamente esas filas

        Returns:
            (stream_out, registers_out, tokens_out); los segmentos ausentes se devuelven como None
        """
        if tokens is not None and n_classes is not None and tokens.shape[0] != n_classes:
            raise ShapeError(f"ProERA: {tokens.shape[0]} tokens de prototipo para {n_classes} clases (N+1)")
        parts = [stream]
        sizes = [stream.shape[0]]
        for extra in (registers, tokens):
            if extra is not None and extra.shape[0] > 0:
                if extra.shape[1] != stream.shape[1]:
                    raise ShapeError(f"ProERA: segmento {extra.shape} para stream {stream.shape}")
                parts.append(extra)
                sizes.append(extra.shape[0])
            else:
                sizes.append(0)

        seq = ops.concat(parts, axis=0)
        out = ops.add(seq, self.attend(seq))

        n = sizes[0]
        stream_out = ops.sub_row(ops.slice_rows(out, 0, n), ops.mean_rows(stream))
        if self.low_pass:
            stream_out = ops.gather_rows(ops.mean_rows(stream_out), np.zeros(n, dtype=np.int64))

        bounds = np.cumsum(sizes)
        registers_out = ops.slice_rows(out, bounds[0], bounds[1]) if sizes[1] else None
        tokens_out = ops.slice_rows(out, bounds[1], bounds[2]) if sizes[2] else None
        return stream_out, registers_out, tokens_out
