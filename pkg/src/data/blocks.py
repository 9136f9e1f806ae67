from typing import List, Optional

import numpy as np

from .point_cloud import PointCloud


def split_and_sample(cloud: PointCloud, block_size: float = 1.0, n_points: int = 2048,
                     rng: Optional[np.random.Generator] = None) -> List[PointCloud]:
    """
    Divide la nube en bloques XY alineados con los ejes y muestrea cada bloque.

    La rejilla está anclada en el origen: el bloque de un punto es
    floor(xy / block_size). Los bloques vacíos no se emiten.

    Args:
        cloud: Nube de entrada
        block_size: Lado del bloque en metros
        n_points: Puntos por bloque de salida
        rng: Generador aleatorio (semilla 0 si no se indica)

    Returns:
        Lista de bloques con exactamente n_points puntos cada uno, en orden de celda
    """
    if block_size <= 0:
        raise ValueError(f"block_size debe ser > 0, recibido {block_size}")
    if n_points < 1:
        raise ValueError(f"n_points debe ser >= 1, recibido {n_points}")
    rng = rng if rng is not None else np.random.default_rng(0)

    cells = np.floor(cloud.xyz[:, :2] / block_size).astype(np.int64)
    keys, inverse = np.unique(cells, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)

    blocks = []
    for b in range(len(keys)):
        members = np.flatnonzero(inverse == b)
        replace = members.size < n_points
        chosen = rng.choice(members, size=n_points, replace=replace)
        blocks.append(cloud.subset(chosen))
    return blocks


def recenter_block(cloud: PointCloud) -> PointCloud:
    """Traslada el bloque para que su esquina XY mínima quede en el origen"""
    shifted = cloud.xyz.copy()
    shifted[:, :2] -= shifted[:, :2].min(axis=0)
    return PointCloud(shifted, cloud.rgb.copy(), cloud.labels.copy(), dict(cloud.class_names))
