#Línea de comandos: datagen, train, eval, zeroshot, spectrum, params
#Los flags sobreescriben los valores del fichero de configuración

import logging
from pathlib import Path
from typing import Any, Dict, Optional

import click
import numpy as np
import pandas as pd

from src.config import DRPE_MODES, TrainConfig, config_from_dict, load_config
from src.data.data_loader import CloudLoaderFactory
from src.data.data_manager import CorpusManager
from src.data.episode_sampler import BlockCorpus, EpisodeSamplingError, sample_episode
from src.data.epc_loader import write_cloud
from src.data.scene_generator import MIN_FOREGROUND_CLASSES, generate_dataset, planted_text_embeddings
from src.exploration.param_report import param_count_report
from src.exploration.spectrum import export_features, high_band_fraction, spectrum_export
from src.model.text_embeddings import TextEmbeddingTable, load_table, save_table
from src.training.checkpoint import build_model, load_run
from src.training.evaluator import evaluate
from src.training.trainer import train as run_training
from src.training.zero_shot import zero_shot_infer

logger = logging.getLogger("cli")

TABLE_NAME = "text_embeddings.ept"


def config_options(func):
    """Flags que reflejan los campos de TrainConfig"""
    options = [
        click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
                     help="Fichero TOML de configuración"),
        click.option("--iterations", type=int, default=None),
        click.option("--seed", type=int, default=None),
        click.option("--n-way", type=int, default=None),
        click.option("--k-shot", type=int, default=None),
        click.option("--n-points", type=int, default=None),
        click.option("--eval-episodes", type=int, default=None),
        click.option("--feature-dim", type=int, default=None),
        click.option("--decoder-blocks", type=int, default=None),
        click.option("--n-prototypes", type=int, default=None),
        click.option("--n-registers", type=int, default=None),
        click.option("--lambda-star", type=float, nargs=4, default=None, help="λ*1..λ*4"),
        click.option("--drpe-mode", type=click.Choice(DRPE_MODES), default=None,
                     help="logits: q·R en el logit; keys: R W_r sumado a la clave"),
        click.option("--disable", multiple=True,
                     help="Componente a desactivar (proera, lgpe, drpe, registers, prototype_tokens, r_e, r_c, "
                          "l_con, l_align); repetible"),
        click.option("--low-pass", is_flag=True, default=False,
                     help="Sustituye la salida de ProERA por su media de tokens"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def resolve_config(config_path: Optional[str], **overrides: Any) -> TrainConfig:
    """Fichero (o valores por defecto) + flags de la CLI"""
    base = load_config(config_path) if config_path else TrainConfig()
    data: Dict[str, Any] = base.to_dict()
    for key in ("iterations", "seed", "n_way", "k_shot", "n_points", "eval_episodes"):
        if overrides.get(key) is not None:
            data[key] = overrides[key]
    model_keys = {"feature_dim": "feature_dim", "decoder_blocks": "decoder_blocks",
                  "n_prototypes": "n_prototypes", "n_registers": "n_registers", "lambda_star": "lambda_star",
                  "drpe_mode": "drpe_mode"}
    for flag, key in model_keys.items():
        value = overrides.get(flag)
        if value is not None and value != ():
            data["model"][key] = list(value) if isinstance(value, tuple) else value
    config = config_from_dict(data)
    config.ablation.disable(*overrides.get("disable", ()))
    if overrides.get("low_pass"):
        config.ablation.proera_low_pass = True
    return config.validate()


def load_corpus(data_dir: Optional[str], config: TrainConfig) -> BlockCorpus:
    """Nubes del directorio (EPC y CSV); si no hay y está permitido, escenas sintéticas en memoria"""
    manager = CorpusManager()
    if data_dir:
        manager.load_directory(data_dir, "*.epc")
        manager.load_directory(data_dir, "*.csv")
    if not manager.get_loaded_files():
        if not config.synthetic_fallback:
            raise click.ClickException(f"No hay nubes en {data_dir}")
        logger.warning("Sin nubes de entrada: se generan escenas sintéticas")
        n_classes = max(MIN_FOREGROUND_CLASSES, 4 * config.n_way)
        scenes, _ = generate_dataset(16, n_classes, seed=config.seed, cell=config.block_size)
        for name, cloud in scenes.items():
            manager.add_cloud(name, cloud)
    try:
        return manager.build_corpus(config.block_size, config.n_points, config.seed, config.test_fold,
                                    min_fold_classes=2 * config.n_way)
    except EpisodeSamplingError as e:
        raise click.ClickException(str(e)) from e


def resolve_table(path: Optional[str], data_dir: Optional[str], config: TrainConfig) -> TextEmbeddingTable:
    if path is None and data_dir and (Path(data_dir) / TABLE_NAME).exists():
        path = str(Path(data_dir) / TABLE_NAME)
    if path:
        return load_table(path, synthetic_fallback=config.synthetic_fallback, seed=config.seed)
    return TextEmbeddingTable(dim=config.model.text_dim, synthetic_fallback=True, seed=config.seed)


@click.group()
@click.option("--log-level", default="INFO", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"]))
def cli(log_level: str):
    """Segmentación few-shot y zero-shot de nubes de puntos"""
    logging.basicConfig(level=getattr(logging, log_level), format="%(asctime)s %(name)s %(levelname)s %(message)s")


@cli.command()
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--scenes", type=int, default=16)
@click.option("--classes", "n_classes", type=int, default=MIN_FOREGROUND_CLASSES, help="Clases de primer plano")
@click.option("--seed", type=int, default=0)
@click.option("--extent", type=float, default=2.0)
@click.option("--text-dim", type=int, default=512)
@click.option("--noise", type=float, default=0.05, help="Ruido de los embeddings plantados")
def datagen(out_dir: str, scenes: int, n_classes: int, seed: int, extent: float, text_dim: int, noise: float):
    """Genera escenas sintéticas (.epc) y la tabla de embeddings plantada"""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    clouds, signatures = generate_dataset(scenes, n_classes, seed, extent)
    for name, cloud in clouds.items():
        write_cloud(cloud, out / name)
    table = TextEmbeddingTable(dim=text_dim, synthetic_fallback=False, seed=seed)
    for name, vector in planted_text_embeddings(signatures, text_dim, seed, noise).items():
        table.add(name, vector, provenance="file")
    save_table(table, out / TABLE_NAME)
    click.echo(f"{len(clouds)} escenas y {len(table)} embeddings escritos en {out}")


@cli.command()
@click.option("--data", "data_dir", type=click.Path(file_okay=False), default=None)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--text-embeddings", "table_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--no-progress", is_flag=True, default=False)
@config_options
def train(data_dir, out_dir, table_path, no_progress, config_path, **overrides):
    """Entrena un modelo y guarda checkpoint, config.toml y metrics.csv"""
    config = resolve_config(config_path, **overrides)
    corpus = load_corpus(data_dir, config)
    table = resolve_table(table_path, data_dir, config)
    _, metrics = run_training(config, corpus, table, out_dir, progress=not no_progress)
    if len(metrics):
        click.echo(f"L_total final: {metrics['L_total'].iloc[-1]:.4f}")
    click.echo(f"Ejecución guardada en {out_dir}")


@cli.command(name="eval")
@click.option("--run", "run_dir", required=True, type=click.Path(exists=True))
@click.option("--data", "data_dir", type=click.Path(file_okay=False), default=None)
@click.option("--episodes", type=int, default=None)
@click.option("--seed", type=int, default=0, help="Semilla de los episodios de test")
@click.option("--text-embeddings", "table_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--zero-shot", is_flag=True, default=False)
@click.option("--jitter", type=float, default=0.0, help="Ruido gaussiano sobre la query")
@click.option("--scale", type=float, default=1.0, help="Escala aplicada a la query")
@click.option("--workers", type=int, default=1)
@click.option("--report", "report_path", type=click.Path(dir_okay=False), default=None)
def eval_command(run_dir, data_dir, episodes, seed, table_path, zero_shot, jitter, scale, workers, report_path):
    """Evalúa un checkpoint por m-IoU sobre episodios de test"""
    config, model = load_run(run_dir)
    corpus = load_corpus(data_dir, config)
    table = resolve_table(table_path, data_dir, config)
    report = evaluate(model, corpus, episodes or config.eval_episodes, config.n_way, config.k_shot, table, seed,
                      jitter_sigma=jitter, scale=scale, workers=workers, zero_shot=zero_shot)
    report_path = report_path or str(Path(run_dir if Path(run_dir).is_dir() else Path(run_dir).parent)
                                     / "eval_report.jsonl")
    report.write_jsonl(report_path)
    click.echo(report.to_frame().to_string(index=False))
    click.echo(f"m-IoU: {report.miou:.4f} ({report.episodes} episodios, {report.wall_time:.1f} s)")


@cli.command()
@click.option("--run", "run_dir", required=True, type=click.Path(exists=True))
@click.option("--cloud", "cloud_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--classes", required=True, help="Nombres de clase separados por comas")
@click.option("--text-embeddings", "table_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
def zeroshot(run_dir, cloud_path, classes, table_path, out_path):
    """Segmenta una nube sólo con nombres de clase"""
    config, model = load_run(run_dir)
    with open(cloud_path, "rb") as fh:
        cloud = CloudLoaderFactory.get_loader(cloud_path).load_cloud(fh)
    table = resolve_table(table_path, str(Path(cloud_path).parent), config)
    names = [c.strip() for c in classes.split(",") if c.strip()]
    result = zero_shot_infer(model, cloud, names, table)
    df = pd.DataFrame(cloud.xyz, columns=["x", "y", "z"])
    df["label"] = cloud.labels
    df["prediction"] = result.labels
    df["predicted_class"] = [result.class_names[i] for i in result.labels]
    if out_path:
        df.to_csv(out_path, index=False)
    click.echo(df["predicted_class"].value_counts().to_string())


@cli.command()
@click.option("--run", "run_dir", required=True, type=click.Path(exists=True))
@click.option("--data", "data_dir", type=click.Path(file_okay=False), default=None)
@click.option("--seed", type=int, default=0)
@click.option("--stage", type=click.Choice(["decoder", "backbone"]), default="decoder")
@click.option("--text-embeddings", "table_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--features-out", type=click.Path(dir_okay=False), default=None,
              help="CSV opcional con las features en bruto")
def spectrum(run_dir, data_dir, seed, stage, table_path, out_path, features_out):
    """Exporta el perfil de frecuencias de las features de la query de un episodio de test"""
    config, model = load_run(run_dir)
    corpus = load_corpus(data_dir, config)
    table = resolve_table(table_path, data_dir, config)
    episode = sample_episode(corpus, config.n_way, config.k_shot, np.random.default_rng(seed), split="test")
    out = model.forward(episode, table)
    features = out.decoded.query if stage == "decoder" else out.query_features
    profile = spectrum_export(features, episode.query, out_path)
    if features_out:
        export_features(features, episode.labeled_query(), features_out)
    click.echo(f"{len(profile)} bins escritos en {out_path}; fracción de banda alta: {high_band_fraction(profile):.4f}")


@cli.command()
@click.option("--run", "run_dir", type=click.Path(exists=True), default=None)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
@config_options
def params(run_dir, out_path, config_path, **overrides):
    """Cuenta los parámetros entrenables por módulo"""
    if run_dir:
        _, model = load_run(run_dir)
    else:
        model = build_model(resolve_config(config_path, **overrides))
    report = param_count_report(model, out_path)
    click.echo(report.to_string(index=False))


if __name__ == "__main__":
    cli()
