#Tipos de datos: nube de puntos y episodio N-way K-shot

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

UNLABELED = -1


@dataclass
class PointCloud:
    """Nube de M puntos con coordenadas, color y etiqueta por punto"""
    xyz: np.ndarray
    rgb: np.ndarray
    labels: np.ndarray
    class_names: Dict[int, str] = field(default_factory=dict)

    def __post_init__(self):
        self.xyz = np.asarray(self.xyz, dtype=np.float64).reshape(-1, 3)
        self.rgb = np.asarray(self.rgb, dtype=np.float64).reshape(-1, 3)
        self.labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        self.validate()

    def validate(self) -> None:
        """Comprueba los invariantes de la nube"""
        m = self.xyz.shape[0]
        if m < 1:
            raise ValueError("La nube debe tener al menos un punto")
        if self.rgb.shape[0] != m or self.labels.shape[0] != m:
            raise ValueError(f"Tamaños inconsistentes: xyz {m}, rgb {self.rgb.shape[0]}, labels {self.labels.shape[0]}")
        if not np.all(np.isfinite(self.xyz)):
            raise ValueError("Las coordenadas deben ser finitas")
        known = set(self.class_names)
        unknown = {int(l) for l in np.unique(self.labels)} - known - {UNLABELED}
        if unknown:
            raise ValueError(f"Etiquetas fuera de la tabla de clases: {sorted(unknown)}")

    def __len__(self) -> int:
        return self.xyz.shape[0]

    @property
    def features(self) -> np.ndarray:
        """Canales de entrada del backbone: xyz ⊕ rgb (M, 6)"""
        return np.concatenate([self.xyz, self.rgb], axis=1)

    def subset(self, index: np.ndarray) -> "PointCloud":
        return PointCloud(self.xyz[index], self.rgb[index], self.labels[index], dict(self.class_names))

    def unlabeled(self) -> "PointCloud":
        return PointCloud(self.xyz, self.rgb, np.full(len(self), UNLABELED), dict(self.class_names))

    def class_counts(self) -> Dict[int, int]:
        ids, counts = np.unique(self.labels, return_counts=True)
        return {int(i): int(c) for i, c in zip(ids, counts)}


@dataclass
class Episode:
    """
    Tarea N-way K-shot.

    El acceso al soporte está instrumentado: cada lectura incrementa
    support_reads, lo que permite comprobar que la inferencia zero-shot
    no toca datos de soporte. La query se guarda sin etiquetas; la verdad
    remapeada sólo sale por reveal_query_labels, que cuenta en label_reads.
    """
    n_way: int
    k_shot: int
    _support: List[List[PointCloud]]
    _support_masks: List[List[np.ndarray]]
    query: PointCloud
    _query_labels: np.ndarray
    class_names: List[str]
    class_ids: List[int] = field(default_factory=list)
    support_reads: int = 0
    label_reads: int = 0

    def __post_init__(self):
        self._query_labels = np.asarray(self._query_labels, dtype=np.int64).reshape(-1)
        if self._query_labels.shape[0] != len(self.query):
            raise ValueError(f"La query tiene {len(self.query)} puntos y {self._query_labels.shape[0]} etiquetas")
        if np.any(self.query.labels != UNLABELED):
            self.query = self.query.unlabeled()

    @property
    def support(self) -> List[List[Tuple[PointCloud, np.ndarray]]]:
        """Soporte agrupado por clase: lista de N listas de K pares (nube, máscara)"""
        self.support_reads += 1
        return [list(zip(clouds, masks)) for clouds, masks in zip(self._support, self._support_masks)]

    def reveal_query_labels(self) -> np.ndarray:
        """Verdad de la query en {0..N}; sólo para pérdidas y métricas"""
        self.label_reads += 1
        return self._query_labels

    def labeled_query(self) -> PointCloud:
        """Query con las etiquetas del episodio (0 = fondo) para exportaciones"""
        names = {0: "background", **{i + 1: name for i, name in enumerate(self.class_names)}}
        return PointCloud(self.query.xyz, self.query.rgb, self.reveal_query_labels(), names)

    @property
    def n_classes(self) -> int:
        """Número de clases de predicción (N + 1, con fondo)"""
        return self.n_way + 1
