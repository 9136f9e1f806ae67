#Inferencia zero-shot: prototipos construidos sólo con los nombres de clase

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from src.data.point_cloud import PointCloud
from src.model.network import EPSegModel
from src.model.text_embeddings import TextEmbeddingTable

logger = logging.getLogger(__name__)


@dataclass
class ZeroShotResult:
    labels: np.ndarray
    probs: np.ndarray
    class_names: Sequence[str]


def zero_shot_infer(model: EPSegModel, query_cloud: PointCloud, class_names: Sequence[str],
                    table: TextEmbeddingTable) -> ZeroShotResult:
    """
    Segmenta una nube sin soporte.

    Args:
        model: Modelo entrenado con LGPE activo
        query_cloud: Nube a segmentar
        class_names: Clases de primer plano; la etiqueta 0 es el fondo
        table: Tabla de embeddings (UnknownClassError si falta un nombre sin fallback)

    Returns:
        ZeroShotResult con etiquetas duras en {0..N} y probabilidades (M, N+1)
    """
    if not model.ablation.lgpe:
        raise ValueError("La inferencia zero-shot necesita un modelo entrenado con LGPE")
    if not class_names:
        raise ValueError("Se necesita al menos un nombre de clase")
    out = model.forward_zero_shot(query_cloud, class_names, table)
    logger.info("Zero-shot sobre %d puntos con clases %s", len(query_cloud), list(class_names))
    return ZeroShotResult(labels=out.hard_labels(), probs=out.probs.data, class_names=["background"] + list(class_names))
