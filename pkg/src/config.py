#Configuración del modelo, las pérdidas, las ablaciones y el entrenamiento
#Se carga y guarda en TOML; los flags de la CLI sobreescriben los valores del fichero

from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, Tuple, Union

import toml


DRPE_MODES = ("logits", "keys")


class ConfigError(ValueError):
    """Clave desconocida o valor fuera de rango en la configuración"""


@dataclass
class ModelConfig:
    """Hiperparámetros de la red"""
    feature_dim: int = 64
    backbone_widths: Tuple[int, ...] = (64, 64, 64)
    backbone_k: int = 20
    leaky_slope: float = 0.2
    decoder_blocks: int = 3
    n_prototypes: int = 100
    n_registers: int = 3
    text_dim: int = 512
    lambda_star: Tuple[float, float, float, float] = (1.0, 0.5, 0.7, 0.6)
    schedule_rate: float = 0.5
    # t = iteración / t_unit
    t_unit: float = 5000.0
    gamma: float = 10000.0
    scale_euclid: float = 1.0
    scale_cosine: float = 3.141592653589793
    register_std: float = 0.02
    # "logits": q·R se suma al logit; "keys": R W_r se suma a la clave
    drpe_mode: str = "logits"


@dataclass
class LossWeights:
    con: float = 0.01
    align: float = 0.02
    tau: float = 0.5
    normalize_con: bool = True
    max_pairs_per_class: int = 64


@dataclass
class AblationConfig:
    """Interruptores de ablación; True = componente activo"""
    proera: bool = True
    lgpe: bool = True
    drpe: bool = True
    registers: bool = True
    prototype_tokens: bool = True
    r_e: bool = True
    r_c: bool = True
    l_con: bool = True
    l_align: bool = True
    # Sustituto paso-bajo: la salida de ProERA se reemplaza por su media de tokens
    proera_low_pass: bool = False

    def disable(self, *names: str) -> "AblationConfig":
        for name in names:
            key = name.lower()
            if key not in {f.name for f in fields(self)} or key == "proera_low_pass":
                raise ConfigError(f"Componente de ablación desconocido: {name}")
            setattr(self, key, False)
        return self


@dataclass
class TrainConfig:
    """Configuración completa de una ejecución"""
    iterations: int = 2000
    lr_main: float = 0.001
    decay_step_main: int = 5000
    decay_ratio_main: float = 0.5
    lr_backbone: float = 0.006
    decay_step_backbone: int = 1000
    decay_ratio_backbone: float = 0.5
    weight_decay: float = 1e-4
    betas: Tuple[float, float] = (0.9, 0.999)
    seed: int = 0
    n_way: int = 2
    k_shot: int = 1
    n_points: int = 512
    block_size: float = 1.0
    eval_episodes: int = 100
    test_fold: int = 0
    max_skip_fraction: float = 0.01
    synthetic_fallback: bool = True
    model: ModelConfig = field(default_factory=ModelConfig)
    loss: LossWeights = field(default_factory=LossWeights)
    ablation: AblationConfig = field(default_factory=AblationConfig)

    def validate(self) -> "TrainConfig":
        """Comprueba los invariantes; lanza ConfigError si alguno falla"""
        checks = [
            (self.lr_main > 0 and self.lr_backbone > 0, "las tasas de aprendizaje deben ser > 0"),
            (0 < self.decay_ratio_main < 1 and 0 < self.decay_ratio_backbone < 1,
             "los ratios de decaimiento deben estar en (0, 1)"),
            (self.decay_step_main > 0 and self.decay_step_backbone > 0, "los pasos de decaimiento deben ser > 0"),
            (self.iterations >= 0, "iterations debe ser >= 0"),
            (self.model.feature_dim % 2 == 0, "feature_dim debe ser par"),
            (self.model.backbone_k < self.n_points, "backbone_k debe ser menor que n_points"),
            (self.model.n_registers >= 0, "n_registers debe ser >= 0"),
            (self.model.decoder_blocks >= 1, "decoder_blocks debe ser >= 1"),
            (self.model.drpe_mode in DRPE_MODES, f"drpe_mode debe ser uno de {DRPE_MODES}"),
            (all(0.0 <= v <= 1.0 for v in self.model.lambda_star), "lambda_star debe estar en [0, 1]"),
            (self.loss.con >= 0 and self.loss.align >= 0 and self.loss.tau > 0,
             "los pesos de pérdida deben ser >= 0 y tau > 0"),
            (self.n_way >= 1 and self.k_shot >= 1, "n_way y k_shot deben ser >= 1"),
            (self.block_size > 0, "block_size debe ser > 0"),
        ]
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)
        return self

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


_SECTIONS = {"model": ModelConfig, "loss": LossWeights, "ablation": AblationConfig}


def _coerce(cls, values: Dict[str, Any], section: str):
    known = {f.name: f for f in fields(cls)}
    kwargs = {}
    for key, value in values.items():
        if key not in known:
            raise ConfigError(f"Clave desconocida en [{section}]: {key}")
        if isinstance(value, list):
            value = tuple(value)
        kwargs[key] = value
    return cls(**kwargs)


def config_from_dict(data: Dict[str, Any]) -> TrainConfig:
    """
    Construye un TrainConfig a partir de un diccionario anidado.

    Args:
        data: Diccionario con claves de nivel superior y secciones model/loss/ablation

    Returns:
        Configuración validada
    """
    top = {k: v for k, v in data.items() if k not in _SECTIONS}
    sections = {name: _coerce(cls, data.get(name, {}), name) for name, cls in _SECTIONS.items()}
    config = _coerce(TrainConfig, top, "train")
    config.model = sections["model"]
    config.loss = sections["loss"]
    config.ablation = sections["ablation"]
    return config.validate()


def load_config(path: Union[str, Path]) -> TrainConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return config_from_dict(toml.load(fh))


def save_config(config: TrainConfig, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        toml.dump(config.to_dict(), fh)
