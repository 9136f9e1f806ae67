#Recuento de parámetros entrenables por módulo

import logging
from collections import OrderedDict
from pathlib import Path
from typing import Optional, Union

import pandas as pd

from src.autodiff import Module

logger = logging.getLogger(__name__)


def param_count_report(model: Module, path: Optional[Union[str, Path]] = None) -> pd.DataFrame:
    """
    Parámetros por módulo de primer nivel y total.

    Args:
        model: Cualquier Module
        path: CSV opcional donde escribir el informe

    Returns:
        DataFrame con columnas module y parameters; la última fila es "total"
    """
    counts = OrderedDict()
    for name, p in model.named_parameters():
        module = name.split(".", 1)[0]
        counts[module] = counts.get(module, 0) + int(p.size)
    report = pd.DataFrame({"module": list(counts) + ["total"],
                           "parameters": list(counts.values()) + [sum(counts.values())]})
    logger.info("Parámetros entrenables: %d", report["parameters"].iloc[-1])
    if path is not None:
        report.to_csv(path, index=False)
    return report
