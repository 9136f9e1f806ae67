#Decoder: bloques ProERA + LGPE + DRPE y predicción por producto escalar normalizado

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from src.autodiff import Module, Tensor, ops
from src.autodiff.ops import NORM_EPS
from src.config import AblationConfig, ModelConfig

from .drpe import DrpeCrossAttention, DrpeTensor, compute_drpe
from .lgpe import fuse_prototypes
from .proera import ProERA, RegisterBank
from .prototypes import class_averages

logger = logging.getLogger(__name__)


@dataclass
class DecoderState:
    """Lo que un bloque pasa al siguiente"""
    query: Tensor
    multi_proto: Tensor
    tokens: Tensor
    r_q: Tensor
    r_p: Tensor


@dataclass
class BlockTrace:
    """Prototipos intermedios de un bloque (diagnóstico)"""
    token: Tensor
    dynamic: Tensor
    fused: Tensor
    drpe: Optional[DrpeTensor]


@dataclass
class DecoderOutput:
    query: Tensor
    tokens: Tensor
    multi_proto: Tensor
    traces: List[BlockTrace] = field(default_factory=list)


class DecoderBlock(Module):
    """Un bloque del decoder con pesos propios para los dos streams y las dos llamadas CRA"""

    def __init__(self, model: ModelConfig, ablation: AblationConfig, rng: np.random.Generator):
        d = model.feature_dim
        self.model = model
        self.ablation = ablation
        self.proera_q = ProERA(d, rng, low_pass=ablation.proera_low_pass)
        self.proera_p = ProERA(d, rng, low_pass=ablation.proera_low_pass)
        self.cra_q = DrpeCrossAttention(d, rng, mode=model.drpe_mode)
        self.cra_p = DrpeCrossAttention(d, rng, mode=model.drpe_mode)

    def refine(self, state: DecoderState,
               n_classes: Optional[int] = None) -> Tuple[Tensor, Tensor, Tensor, Tensor, Optional[Tensor]]:
        """ProERA sobre ambos streams; devuelve (X̃_q, X̃_p, r_q, r_p, p̃ o None)"""
        if not self.ablation.proera:
            return state.query, state.multi_proto, state.r_q, state.r_p, None
        tokens = state.tokens if self.ablation.prototype_tokens else None
        r_q = state.r_q if self.ablation.registers else None
        r_p = state.r_p if self.ablation.registers else None
        x_q, r_q_out, t_q = self.proera_q(state.query, r_q, tokens, n_classes)
        x_p, r_p_out, t_p = self.proera_p(state.multi_proto, r_p, tokens, n_classes)
        refined = None if t_q is None else ops.scale(ops.add(t_q, t_p), 0.5)
        return (x_q, x_p,
                r_q_out if r_q_out is not None else state.r_q,
                r_p_out if r_p_out is not None else state.r_p,
                refined)

    def __call__(self, state: DecoderState, p_raw: Tensor, p_text: Optional[Tensor],
                 proto_labels: np.ndarray, t: float, zero_shot: bool = False) -> Tuple[DecoderState, BlockTrace]:
        """
        Args:
            state: Entrada del bloque
            p_raw: Prototipos brutos (N+1, D)
            p_text: Prototipos de texto (N+1, D) o None sin LGPE
            proto_labels: Clase de cada fila del stream multi-prototipo
            t: Progreso del calendario de fusión
            zero_shot: Fuerza p = p_text

        Returns:
            (estado para el bloque siguiente, traza)
        """
        x_q, x_p, r_q, r_p, refined = self.refine(state, p_raw.shape[0])
        token = refined if refined is not None else state.tokens
        dynamic = class_averages(x_p, proto_labels, p_raw.shape[0])

        if p_text is not None and (self.ablation.lgpe or zero_shot):
            fused = fuse_prototypes(token, p_raw, dynamic, p_text, t, self.model.lambda_star,
                                    self.model.schedule_rate, zero_shot=zero_shot)
        else:
            fused = p_raw

        drpe = None
        if self.ablation.drpe:
            drpe = compute_drpe(x_q, fused, self.model.scale_euclid, self.model.scale_cosine, self.model.gamma,
                                use_euclid=self.ablation.r_e, use_cosine=self.ablation.r_c)
        query_out = self.cra_q(x_q, fused, drpe.r if drpe is not None else None)
        tokens_out = self.cra_p(fused, x_q, drpe.transposed() if drpe is not None else None)
        return DecoderState(query_out, x_p, tokens_out, r_q, r_p), BlockTrace(token, dynamic, fused, drpe)


class Decoder(Module):
    """Pila de Z bloques; los registros se comparten entre bloques dentro de un episodio"""

    def __init__(self, model: ModelConfig, ablation: AblationConfig, rng: np.random.Generator):
        n_r = model.n_registers if ablation.registers else 0
        self.registers = RegisterBank(n_r, model.feature_dim, rng, model.register_std)
        self.blocks: List[DecoderBlock] = [DecoderBlock(model, ablation, rng) for _ in range(model.decoder_blocks)]

    def __call__(self, query: Tensor, multi_proto: Tensor, proto_labels: np.ndarray, p_raw: Tensor,
                 p_text: Optional[Tensor], t: float, tokens: Optional[Tensor] = None,
                 zero_shot: bool = False) -> DecoderOutput:
        # Los tokens de prototipo arrancan de p_raw salvo que se indiquen
        state = DecoderState(query, multi_proto, tokens if tokens is not None else p_raw,
                             self.registers.r_q, self.registers.r_p)
        traces = []
        for block in self.blocks:
            state, trace = block(state, p_raw, p_text, proto_labels, t, zero_shot)
            traces.append(trace)
        return DecoderOutput(state.query, state.tokens, state.multi_proto, traces)


def predict(query_feats: Tensor, prototypes: Tensor) -> Tuple[Tensor, int]:
    """
    Probabilidades por punto: softmax de similitudes coseno con cada prototipo.

    Las filas de norma cero dan una distribución uniforme.

    Returns:
        (probabilidades (M, N+1), número de filas de norma cero)
    """
    zero_rows = int((np.linalg.norm(query_feats.data, axis=1) <= NORM_EPS).sum())
    if zero_rows:
        logger.warning("predict: %d filas de la query con norma cero", zero_rows)
    logits = ops.matmul(ops.l2_normalize(query_feats), ops.transpose(ops.l2_normalize(prototypes)))
    return ops.softmax(logits), zero_rows
