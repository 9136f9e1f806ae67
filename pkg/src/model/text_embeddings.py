#Tabla de embeddings de texto por nombre de clase
#Formato de fichero: primera línea "EPT1 <D_text>", luego "<nombre> <v1> ... <vD>" por clase

import hashlib
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Union

import numpy as np

logger = logging.getLogger(__name__)

MAGIC = "EPT1"


class EmbeddingTableError(ValueError):
    """Fichero de tabla mal formado o dimensiones inconsistentes"""


class UnknownClassError(KeyError):
    """Nombre de clase ausente de la tabla sin fallback sintético"""


def normalize_name(name: str) -> str:
    return "_".join(name.strip().lower().split())


def synth_embedding(class_name: str, dim: int = 512, seed: int = 0) -> np.ndarray:
    """
    Vector unitario determinista para un nombre de clase.

    Args:
        class_name: Nombre (se normaliza mayúsculas/espacios)
        dim: Dimensión D_text
        seed: Semilla global de la tabla

    Returns:
        Vector (dim,) de norma 1
    """
    digest = hashlib.sha256(f"{seed}:{normalize_name(class_name)}".encode("utf-8")).digest()
    rng = np.random.default_rng(int.from_bytes(digest[:8], "little"))
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)


@dataclass
class TextEmbeddingTable:
    """Diccionario nombre -> vector D_text con la procedencia de cada entrada"""
    dim: int
    entries: Dict[str, np.ndarray] = field(default_factory=dict)
    provenance: Dict[str, str] = field(default_factory=dict)
    synthetic_fallback: bool = True
    seed: int = 0

    def add(self, name: str, vector: np.ndarray, provenance: str = "file") -> None:
        vector = np.asarray(vector, dtype=np.float64).reshape(-1)
        if vector.shape[0] != self.dim:
            raise EmbeddingTableError(f"'{name}' tiene dimensión {vector.shape[0]}, la tabla usa {self.dim}")
        key = normalize_name(name)
        self.entries[key] = vector
        self.provenance[key] = provenance

    def __contains__(self, name: str) -> bool:
        return normalize_name(name) in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def lookup(self, name: str) -> np.ndarray:
        """
        Devuelve el vector de una clase.

        Los nombres ausentes se sintetizan (y se guardan con procedencia
        "synthetic") si el fallback está activo; si no, UnknownClassError.
        """
        key = normalize_name(name)
        if key not in self.entries:
            if not self.synthetic_fallback:
                raise UnknownClassError(f"Clase desconocida en la tabla de embeddings: '{name}'")
            logger.debug("Embedding sintético para '%s'", key)
            self.add(key, synth_embedding(key, self.dim, self.seed), provenance="synthetic")
        return self.entries[key]

    def matrix(self, names: Iterable[str]) -> np.ndarray:
        """Vectores apilados en el orden dado: (len(names), D_text)"""
        names = list(names)
        if not names:
            return np.zeros((0, self.dim))
        return np.stack([self.lookup(n) for n in names])

    def names(self) -> List[str]:
        return list(self.entries)


def load_table(path: Union[str, Path], synthetic_fallback: bool = True, seed: int = 0) -> TextEmbeddingTable:
    """
    Lee una tabla en formato EPT1.

    Args:
        path: Ruta del fichero UTF-8
        synthetic_fallback: Sintetizar vectores para clases ausentes
        seed: Semilla de los vectores sintéticos

    Returns:
        TextEmbeddingTable con los vectores del fichero tal cual
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.strip() for line in fh if line.strip()]
    if not lines:
        raise EmbeddingTableError(f"{path}: fichero vacío")
    header = lines[0].split()
    if len(header) != 2 or header[0] != MAGIC:
        raise EmbeddingTableError(f"{path}: cabecera inválida '{lines[0]}'")
    try:
        dim = int(header[1])
    except ValueError as e:
        raise EmbeddingTableError(f"{path}: dimensión inválida '{header[1]}'") from e

    table = TextEmbeddingTable(dim=dim, synthetic_fallback=synthetic_fallback, seed=seed)
    for lineno, line in enumerate(lines[1:], start=2):
        name, *values = line.split()
        try:
            vector = np.array([float(v) for v in values])
        except ValueError as e:
            raise EmbeddingTableError(f"{path}:{lineno}: valor no numérico") from e
        if vector.shape[0] != dim:
            raise EmbeddingTableError(f"{path}:{lineno}: '{name}' tiene {vector.shape[0]} valores, se esperaban {dim}")
        table.add(name, vector, provenance="file")
    logger.info("Tabla de embeddings cargada: %d clases, D_text=%d", len(table), dim)
    return table


def save_table(table: TextEmbeddingTable, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{MAGIC} {table.dim}\n")
        for name, vector in table.entries.items():
            fh.write(name + " " + " ".join(repr(float(v)) for v in vector) + "\n")
