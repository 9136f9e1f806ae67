#Modelo completo: backbone, prototipos, LGPE, decoder y predicción
#Un forward por episodio (few-shot) o por nube con nombres de clase (zero-shot)

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from src.autodiff import Linear, Module, Tensor, ops
from src.config import AblationConfig, ModelConfig
from src.data.point_cloud import Episode, PointCloud

from .backbone import Backbone
from .decoder import Decoder, DecoderOutput, predict
from .lgpe import LanguageGuidedPrototypes
from .prototypes import MultiPrototype, PrototypeSet, class_averages, multi_prototype_sample
from .text_embeddings import TextEmbeddingTable

logger = logging.getLogger(__name__)


@dataclass
class ForwardOutput:
    """Resultado de un forward con los intermedios que usan las pérdidas y los análisis"""
    probs: Tensor
    query_features: Tensor
    decoded: DecoderOutput
    p_raw: Tensor
    p_text: Optional[Tensor]
    zero_norm_rows: int
    support_features: Optional[Tensor] = None
    support_labels: Optional[np.ndarray] = None
    multi_proto: Optional[MultiPrototype] = None
    text_embeddings: Optional[np.ndarray] = None

    def hard_labels(self) -> np.ndarray:
        return self.probs.data.argmax(axis=1)

    def prototype_set(self) -> PrototypeSet:
        """Prototipos del último bloque en sus cinco papeles"""
        last = self.decoded.traces[-1]
        text = self.p_text if self.p_text is not None else self.p_raw
        return PrototypeSet(raw=self.p_raw, dynamic=last.dynamic, text=text, token=last.token, fused=last.fused)


class EPSegModel(Module):
    """Segmentador few-shot/zero-shot de nubes de puntos"""

    def __init__(self, model: ModelConfig, ablation: AblationConfig, rng: np.random.Generator):
        self.config = model
        self.ablation = ablation
        d = model.feature_dim
        self.backbone = Backbone(rng, d_in=6, widths=model.backbone_widths, out_dim=d,
                                 k=model.backbone_k, slope=model.leaky_slope)
        self.lgpe = LanguageGuidedPrototypes(model.text_dim, d, rng, model.leaky_slope)
        self.decoder = Decoder(model, ablation, rng)
        # W de la pérdida de alineamiento: (D, D_text)
        self.align = Linear(d, model.text_dim, rng, bias=False)
        # Progreso del calendario de fusión congelado al final del entrenamiento
        self.fusion_t = 0.0

    def module_names(self) -> List[str]:
        return ["backbone", "lgpe", "decoder", "align"]

    def encode_support(self, episode: Episode):
        """Codifica todas las nubes de soporte; etiqueta i+1 para la máscara de la clase i y 0 para el resto"""
        features, labels = [], []
        for i, shots in enumerate(episode.support):
            for cloud, mask in shots:
                features.append(self.backbone.encode(cloud))
                labels.append(np.where(mask, i + 1, 0))
        return ops.concat(features, axis=0), np.concatenate(labels)

    def forward(self, episode: Episode, table: Optional[TextEmbeddingTable] = None, t: Optional[float] = None,
                rng: Optional[np.random.Generator] = None) -> ForwardOutput:
        """
        Forward few-shot de un episodio.

        Args:
            episode: Episodio N-way K-shot
            table: Tabla de embeddings; obligatoria si LGPE está activo
            t: Progreso de fusión; por defecto el valor congelado
            rng: Generador para submuestrear clases grandes en MPS

        Returns:
            ForwardOutput
        """
        t = self.fusion_t if t is None else t
        support_features, support_labels = self.encode_support(episode)
        query_features = self.backbone.encode(episode.query)
        n_classes = episode.n_classes

        multi = multi_prototype_sample(support_features, support_labels, self.config.n_prototypes,
                                       n_classes=n_classes, rng=rng)
        p_raw = class_averages(multi.features, multi.labels, n_classes)

        p_text, text_embeddings = None, None
        if table is not None:
            text_embeddings = self.lgpe.class_embeddings(episode.class_names, table)
            if self.ablation.lgpe:
                p_text = self.lgpe.text_prototypes(episode.class_names, table)
        elif self.ablation.lgpe:
            raise ValueError("LGPE activo: se necesita una tabla de embeddings de texto")

        decoded = self.decoder(query_features, multi.features, multi.labels, p_raw, p_text, t)
        probs, zero_rows = predict(decoded.query, decoded.tokens)
        return ForwardOutput(probs=probs, query_features=query_features, decoded=decoded, p_raw=p_raw,
                             p_text=p_text, zero_norm_rows=zero_rows, support_features=support_features,
                             support_labels=support_labels, multi_proto=multi, text_embeddings=text_embeddings)

    def forward_zero_shot(self, query: PointCloud, class_names: Sequence[str],
                          table: TextEmbeddingTable) -> ForwardOutput:
        """
        Forward sin soporte: prototipos = Proj(T^c).

        El stream de prototipos se inicia con los prototipos de texto (una fila
        por clase) y la fusión se fuerza a (0, 0, 0, 1).
        """
        query_features = self.backbone.encode(query)
        p_text = self.lgpe.text_prototypes(class_names, table)
        labels = np.arange(p_text.shape[0])
        decoded = self.decoder(query_features, p_text, labels, p_text, p_text, self.fusion_t, zero_shot=True)
        probs, zero_rows = predict(decoded.query, decoded.tokens)
        return ForwardOutput(probs=probs, query_features=query_features, decoded=decoded, p_raw=p_text,
                             p_text=p_text, zero_norm_rows=zero_rows)

    def parameter_groups(self) -> Dict[str, List[Tensor]]:
        """Parámetros del backbone y del resto, para los dos grupos del optimizador"""
        backbone = self.backbone.parameters()
        ids = {id(p) for p in backbone}
        return {"backbone": backbone, "main": [p for p in self.parameters() if id(p) not in ids]}
