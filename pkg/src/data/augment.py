from typing import Optional

import numpy as np

from .point_cloud import PointCloud


def jitter_scale_augment(cloud: PointCloud, sigma: float = 0.0, scale: float = 1.0,
                         rng: Optional[np.random.Generator] = None) -> PointCloud:
    """
    Ruido gaussiano por punto y escala global: xyz' = scale * (xyz + z), z ~ N(0, sigma^2).

    Args:
        cloud: Nube original
        sigma: Desviación típica del ruido por coordenada
        scale: Factor de escala

    Returns:
        Nueva nube con colores y etiquetas sin cambios
    """
    if sigma < 0:
        raise ValueError(f"sigma debe ser >= 0, recibido {sigma}")
    if scale <= 0:
        raise ValueError(f"scale debe ser > 0, recibido {scale}")
    rng = rng if rng is not None else np.random.default_rng(0)
    noise = rng.normal(0.0, sigma, size=cloud.xyz.shape) if sigma > 0 else 0.0
    return PointCloud(scale * (cloud.xyz + noise), cloud.rgb.copy(), cloud.labels.copy(), dict(cloud.class_names))
