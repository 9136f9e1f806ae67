#Checkpoint binario por secciones: magic "EPCK" y registros {módulo, tensor, forma, payload f64}
#Junto al checkpoint se guardan config.toml y, si existe, el CSV de métricas

import logging
import struct
from pathlib import Path
from typing import Dict, Tuple, Union

import numpy as np

from src.config import TrainConfig, load_config, save_config

logger = logging.getLogger(__name__)

MAGIC = b"EPCK"
STATE_MODULE = "state"
CHECKPOINT_NAME = "model.epck"
CONFIG_NAME = "config.toml"
METRICS_NAME = "metrics.csv"


class CheckpointError(ValueError):
    """Checkpoint corrupto, truncado o incompatible con el modelo"""


def _pack_str(text: str) -> bytes:
    raw = text.encode("utf-8")
    return struct.pack("<H", len(raw)) + raw


def encode_checkpoint(tensors: Dict[Tuple[str, str], np.ndarray]) -> bytes:
    """Serializa {(módulo, tensor): array} en orden de inserción"""
    chunks = [MAGIC, struct.pack("<I", len(tensors))]
    for (module, name), value in tensors.items():
        value = np.ascontiguousarray(value, dtype="<f8")
        chunks += [_pack_str(module), _pack_str(name), struct.pack("<B", value.ndim),
                   struct.pack(f"<{value.ndim}I", *value.shape), value.tobytes()]
    return b"".join(chunks)


def decode_checkpoint(data: bytes) -> Dict[Tuple[str, str], np.ndarray]:
    if data[:4] != MAGIC:
        raise CheckpointError("Magic inválido: no es un checkpoint EPCK")
    offset = 4

    def take(n: int) -> bytes:
        nonlocal offset
        if offset + n > len(data):
            raise CheckpointError(f"Checkpoint truncado en el byte {offset}")
        chunk = data[offset:offset + n]
        offset += n
        return chunk

    def take_str() -> str:
        (length,) = struct.unpack("<H", take(2))
        return take(length).decode("utf-8")

    (count,) = struct.unpack("<I", take(4))
    tensors = {}
    for _ in range(count):
        module, name = take_str(), take_str()
        (ndim,) = struct.unpack("<B", take(1))
        shape = struct.unpack(f"<{ndim}I", take(4 * ndim))
        size = int(np.prod(shape)) if ndim else 1
        tensors[(module, name)] = np.frombuffer(take(8 * size), dtype="<f8").reshape(shape).astype(np.float64)
    if offset != len(data):
        raise CheckpointError(f"{len(data) - offset} bytes sobrantes al final del checkpoint")
    return tensors


def model_tensors(model) -> Dict[Tuple[str, str], np.ndarray]:
    """Parámetros agrupados por módulo de primer nivel más el estado no entrenable"""
    tensors = {}
    for full_name, value in model.state_dict().items():
        module, _, name = full_name.partition(".")
        tensors[(module, name)] = value
    tensors[(STATE_MODULE, "fusion_t")] = np.array(model.fusion_t)
    return tensors


def save_checkpoint(model, path: Union[str, Path]) -> None:
    Path(path).write_bytes(encode_checkpoint(model_tensors(model)))
    logger.info("Checkpoint guardado en %s", path)


def load_checkpoint(model, path: Union[str, Path]) -> None:
    """Carga los parámetros de un fichero EPCK sobre un modelo ya construido"""
    tensors = decode_checkpoint(Path(path).read_bytes())
    state = {f"{module}.{name}": value for (module, name), value in tensors.items() if module != STATE_MODULE}
    try:
        model.load_state_dict(state)
    except (KeyError, ValueError) as e:
        raise CheckpointError(f"Checkpoint incompatible con el modelo: {e}") from e
    fusion_t = tensors.get((STATE_MODULE, "fusion_t"))
    model.fusion_t = float(fusion_t) if fusion_t is not None else 0.0


def build_model(config: TrainConfig):
    """Modelo inicializado con la semilla de la configuración"""
    from src.model.network import EPSegModel

    init_seed, _ = np.random.SeedSequence(config.seed).spawn(2)
    return EPSegModel(config.model, config.ablation, np.random.default_rng(init_seed))


def save_run(model, config: TrainConfig, out_dir: Union[str, Path], metrics=None) -> Path:
    """Escribe model.epck, config.toml y metrics.csv en out_dir"""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_checkpoint(model, out_dir / CHECKPOINT_NAME)
    save_config(config, out_dir / CONFIG_NAME)
    if metrics is not None:
        metrics.to_csv(out_dir / METRICS_NAME, index=False)
    return out_dir


def load_run(run_dir: Union[str, Path]):
    """Reconstruye (config, modelo) desde un directorio de ejecución o la ruta al .epck"""
    run_dir = Path(run_dir)
    if run_dir.is_file():
        run_dir = run_dir.parent
    config_path = run_dir / CONFIG_NAME
    if not config_path.exists():
        raise CheckpointError(f"No se encuentra {CONFIG_NAME} en {run_dir}")
    config = load_config(config_path)
    model = build_model(config)
    load_checkpoint(model, run_dir / CHECKPOINT_NAME)
    return config, model
