#Perfil de frecuencias de las features sobre la nube
#Orden de Morton de xyz, DFT por canal a lo largo de los puntos y magnitud media sobre canales

import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from src.data.point_cloud import PointCloud

logger = logging.getLogger(__name__)


def morton_order(xyz: np.ndarray, bits: int = 10) -> np.ndarray:
    """
    Permutación que ordena los puntos por código de Morton.

    Cada eje se cuantiza a 2^bits niveles entre su mínimo y su máximo; un eje
    constante queda en el nivel 0. Empates por índice original.
    """
    xyz = np.asarray(xyz, dtype=np.float64)
    low = xyz.min(axis=0)
    span = xyz.max(axis=0) - low
    levels = (1 << bits) - 1
    cells = np.where(span > 0, (xyz - low) / np.where(span > 0, span, 1.0) * levels, 0.0)
    cells = np.round(cells).astype(np.uint64)
    codes = np.zeros(xyz.shape[0], dtype=np.uint64)
    for b in range(bits):
        for axis in range(3):
            bit = (cells[:, axis] >> np.uint64(b)) & np.uint64(1)
            codes |= bit << np.uint64(3 * b + axis)
    return np.argsort(codes, kind="stable")


def spectrum_profile(features: np.ndarray, xyz: np.ndarray) -> pd.DataFrame:
    """
    Magnitud media por bin de frecuencia.

    Args:
        features: (M, D)
        xyz: (M, 3) para el orden de Morton

    Returns:
        DataFrame con columnas frequency_bin y magnitude (M//2 + 1 filas)
    """
    features = np.asarray(features, dtype=np.float64)
    ordered = features[morton_order(xyz)]
    magnitude = np.abs(np.fft.rfft(ordered, axis=0)).mean(axis=1)
    return pd.DataFrame({"frequency_bin": np.arange(magnitude.size), "magnitude": magnitude})


def high_band_fraction(profile: pd.DataFrame) -> float:
    """Fracción de la magnitud total en la mitad superior de los bins"""
    magnitude = profile["magnitude"].to_numpy()
    total = magnitude.sum()
    if total == 0:
        return 0.0
    return float(magnitude[magnitude.size // 2 + 1:].sum() / total) if magnitude.size > 1 else 0.0


def spectrum_export(features, cloud: PointCloud, path: Optional[Union[str, Path]] = None) -> pd.DataFrame:
    """Calcula el perfil de features (Tensor o array) sobre una nube y, si se indica, lo escribe en CSV"""
    values = getattr(features, "data", features)
    profile = spectrum_profile(values, cloud.xyz)
    if path is not None:
        profile.to_csv(path, index=False)
        logger.info("Espectro escrito en %s (%d bins)", path, len(profile))
    return profile


def export_features(features, cloud: PointCloud, path: Union[str, Path]) -> pd.DataFrame:
    """Escribe xyz, etiqueta y las D features de cada punto"""
    values = np.asarray(getattr(features, "data", features))
    df = pd.DataFrame(cloud.xyz, columns=["x", "y", "z"])
    df["label"] = cloud.labels
    feats = pd.DataFrame(values, columns=[f"f{i}" for i in range(values.shape[1])])
    df = pd.concat([df, feats], axis=1)
    df.to_csv(path, index=False)
    return df
