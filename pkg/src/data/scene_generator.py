#Generación determinista de escenas sintéticas: primitivas sobre un suelo
#Sustituye a los datasets de interiores a escala de escritorio

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .point_cloud import PointCloud

logger = logging.getLogger(__name__)

PRIMITIVE_KINDS = ("plane", "box", "sphere", "cylinder")
# Con dos particiones disjuntas, cada una conserva al menos 4 clases
MIN_FOREGROUND_CLASSES = 8

CLASS_NAMES = [
    "floor", "chair", "table", "sofa", "bookcase", "board", "door", "window",
    "column", "beam", "lamp", "plant", "monitor", "cabinet", "stool", "bin", "shelf",
]


@dataclass
class Primitive:
    """Primitiva geométrica con su clase, pose, tamaño y color"""
    kind: str
    class_id: int
    center: Tuple[float, float, float]
    size: Tuple[float, float, float]
    n_points: int
    color: Tuple[float, float, float] = (0.5, 0.5, 0.5)


@dataclass
class SceneSpec:
    """Especificación completa y determinista de una escena"""
    seed: int
    extent: Tuple[float, float] = (2.0, 2.0)
    primitives: List[Primitive] = field(default_factory=list)
    color_noise: float = 0.05
    class_names: Dict[int, str] = field(default_factory=dict)


@dataclass
class ClassSignature:
    """Atributos generativos fijos de una clase"""
    class_id: int
    name: str
    kind: str
    size: Tuple[float, float, float]
    color: Tuple[float, float, float]
    elevation: float

    def attributes(self) -> np.ndarray:
        """Vector de atributos: one-hot de forma, tamaño, color y altura"""
        one_hot = np.array([k == self.kind for k in PRIMITIVE_KINDS], dtype=float)
        return np.concatenate([one_hot, np.asarray(self.size), np.asarray(self.color), [self.elevation]])


def _sample_surface(kind: str, center: np.ndarray, size: np.ndarray, n: int,
                    rng: np.random.Generator) -> np.ndarray:
    """Muestrea n puntos sobre la superficie de la primitiva"""
    if kind == "plane":
        # Rectángulo horizontal de lados size[0] x size[1] a la altura del centro
        offsets = (rng.random((n, 2)) - 0.5) * size[:2]
        return np.column_stack([center[0] + offsets[:, 0], center[1] + offsets[:, 1], np.full(n, center[2])])
    if kind == "sphere":
        radius = size[0]
        direction = rng.normal(size=(n, 3))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        return center + radius * direction
    if kind == "cylinder":
        radius, height = size[0], size[2]
        angle = rng.random(n) * 2 * np.pi
        z = (rng.random(n) - 0.5) * height
        return np.column_stack([center[0] + radius * np.cos(angle), center[1] + radius * np.sin(angle), center[2] + z])
    if kind == "box":
        # Cara elegida proporcionalmente a su área
        half = size / 2
        areas = np.array([size[1] * size[2], size[0] * size[2], size[0] * size[1]])
        axis = rng.choice(3, size=n, p=areas / areas.sum())
        points = (rng.random((n, 3)) - 0.5) * size
        sign = np.where(rng.random(n) < 0.5, -1.0, 1.0)
        points[np.arange(n), axis] = sign * half[axis]
        return center + points
    raise ValueError(f"Tipo de primitiva no soportado: {kind}")


def generate_scene(spec: SceneSpec) -> PointCloud:
    """
    Genera la nube de una escena.

    Las primitivas se escriben en el orden del inventario; si se solapan en el
    espacio, las posteriores quedan detrás en el array (último escritor) y
    ninguna etiqueta se reescribe, de modo que los recuentos por clase son
    exactamente los del inventario.

    Args:
        spec: Especificación de la escena

    Returns:
        PointCloud con una etiqueta por primitiva generadora
    """
    if not spec.primitives:
        raise ValueError("El inventario de primitivas está vacío")

    rng = np.random.default_rng(spec.seed)
    xyz, rgb, labels = [], [], []
    for primitive in spec.primitives:
        points = _sample_surface(primitive.kind, np.asarray(primitive.center, dtype=float),
                                 np.asarray(primitive.size, dtype=float), primitive.n_points, rng)
        colors = np.clip(np.asarray(primitive.color) + rng.normal(0.0, spec.color_noise, size=(primitive.n_points, 3)), 0.0, 1.0)
        xyz.append(points)
        rgb.append(colors)
        labels.append(np.full(primitive.n_points, primitive.class_id))

    class_names = dict(spec.class_names) or {p.class_id: CLASS_NAMES[p.class_id % len(CLASS_NAMES)] for p in spec.primitives}
    return PointCloud(np.concatenate(xyz), np.concatenate(rgb), np.concatenate(labels), class_names)


def class_signatures(n_classes: int, seed: int = 0) -> List[ClassSignature]:
    """
    Construye firmas de clase deterministas.

    La clase 0 es siempre el suelo; las clases 1..n_classes son objetos.

    Args:
        n_classes: Número de clases de primer plano
        seed: Semilla del catálogo

    Returns:
        Lista de firmas (suelo incluido)
    """
    if n_classes + 1 > len(CLASS_NAMES):
        raise ValueError(f"Como máximo {len(CLASS_NAMES) - 1} clases de primer plano")
    rng = np.random.default_rng(seed)
    signatures = [ClassSignature(0, "floor", "plane", (1.0, 1.0, 0.0), (0.45, 0.42, 0.40), 0.0)]
    object_kinds = ("box", "sphere", "cylinder", "plane")
    for class_id in range(1, n_classes + 1):
        kind = object_kinds[(class_id - 1) % len(object_kinds)]
        size = tuple(float(v) for v in rng.uniform(0.15, 0.45, size=3))
        if kind in ("sphere", "cylinder"):
            # radio en size[0]
            size = (size[0] * 0.6, size[1] * 0.6, size[2])
        color = tuple(float(v) for v in rng.uniform(0.05, 0.95, size=3))
        elevation = float(rng.uniform(0.1, 0.9))
        signatures.append(ClassSignature(class_id, CLASS_NAMES[class_id], kind, size, color, elevation))
    return signatures


def random_scene_spec(seed: int, signatures: Sequence[ClassSignature], extent: float = 2.0,
                      cell: float = 1.0, floor_points: int = 768, object_points: int = 384,
                      max_objects_per_cell: int = 2) -> SceneSpec:
    """
    Escena con un suelo y entre 1 y max_objects_per_cell objetos por celda.

    Args:
        seed: Semilla de la escena
        signatures: Catálogo de clases (la posición 0 es el suelo)
        extent: Lado de la escena en metros
        cell: Lado de cada celda (coincide con el tamaño de bloque)

    Returns:
        SceneSpec determinista
    """
    rng = np.random.default_rng(seed)
    objects = list(signatures[1:])
    floor = signatures[0]
    primitives: List[Primitive] = []
    n_cells = max(1, int(round(extent / cell)))
    for i in range(n_cells):
        for j in range(n_cells):
            origin = np.array([i * cell, j * cell])
            primitives.append(Primitive("plane", floor.class_id, (origin[0] + cell / 2, origin[1] + cell / 2, 0.0),
                                        (cell, cell, 0.0), floor_points, floor.color))
            n_objects = int(rng.integers(1, max_objects_per_cell + 1))
            for sig in rng.choice(len(objects), size=n_objects, replace=False):
                signature = objects[int(sig)]
                jitter = rng.uniform(0.9, 1.1, size=3)
                size = tuple(float(v) for v in np.asarray(signature.size) * jitter)
                reach = size[0] if signature.kind in ("sphere", "cylinder") else max(size[0], size[1]) / 2
                margin = reach + 0.02
                xy = origin + rng.uniform(margin, cell - margin, size=2) if margin < cell / 2 else origin + cell / 2
                primitives.append(Primitive(signature.kind, signature.class_id,
                                            (float(xy[0]), float(xy[1]), signature.elevation),
                                            size, object_points, signature.color))
    names = {s.class_id: s.name for s in signatures}
    return SceneSpec(seed=seed, extent=(extent, extent), primitives=primitives, class_names=names)


def planted_text_embeddings(signatures: Sequence[ClassSignature], dim: int = 512, seed: int = 0,
                            noise: float = 0.05) -> Dict[str, np.ndarray]:
    """
    Embeddings de texto correlacionados con los atributos visuales de cada clase.

    T^c = normalize(A · atributos(c) + ruido), con A fija por semilla.

    Args:
        signatures: Catálogo de clases
        dim: Dimensión del embedding
        seed: Semilla de la proyección
        noise: Desviación del ruido añadido

    Returns:
        Diccionario nombre -> vector unitario
    """
    rng = np.random.default_rng(seed)
    attributes = np.stack([s.attributes() for s in signatures])
    attributes = (attributes - attributes.mean(axis=0)) / (attributes.std(axis=0) + 1e-9)
    projection = rng.normal(size=(attributes.shape[1], dim)) / np.sqrt(attributes.shape[1])
    table = {}
    for signature, attr in zip(signatures, attributes):
        vector = attr @ projection + rng.normal(0.0, noise, size=dim)
        table[signature.name] = vector / np.linalg.norm(vector)
    logger.debug("Tabla plantada con %d clases y dimensión %d", len(table), dim)
    return table


def generate_dataset(n_scenes: int, n_classes: int = MIN_FOREGROUND_CLASSES, seed: int = 0, extent: float = 2.0,
                     cell: float = 1.0) -> Tuple[Dict[str, PointCloud], List[ClassSignature]]:
    """
    Conjunto de escenas sintéticas con un catálogo de clases común.

    Returns:
        Tupla (nombre de escena -> nube, firmas de clase)
    """
    signatures = class_signatures(n_classes, seed)
    scenes = {}
    for i in range(n_scenes):
        spec = random_scene_spec(seed * 100003 + i, signatures, extent=extent, cell=cell)
        scenes[f"scene_{i:03d}.epc"] = generate_scene(spec)
    logger.info("Generadas %d escenas con %d clases de primer plano", n_scenes, n_classes)
    return scenes, signatures
