#Entrenamiento episódico
#Cada iteración: episodio -> forward -> pérdidas -> backward -> paso AdamW con dos grupos

import logging
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np
import pandas as pd
from tqdm import tqdm

from src.autodiff import Graph, NonFiniteError, Tensor, backward, ops
from src.config import TrainConfig
from src.data.episode_sampler import BlockCorpus, sample_episode
from src.data.point_cloud import Episode
from src.model.lgpe import fusion_weights
from src.model.losses import LossDiagnostics, align_loss, con_loss, sample_contrastive_pairs, seg_loss, total_loss
from src.model.network import EPSegModel, ForwardOutput
from src.model.text_embeddings import TextEmbeddingTable

from .checkpoint import build_model, save_run
from .optimizer import AdamW, ParamGroup, StepDecaySchedule

logger = logging.getLogger(__name__)

METRIC_COLUMNS = ["iter", "L_seg", "L_con", "L_align", "L_total", "lr_main", "lr_backbone",
                  "lambda_1", "lambda_2", "lambda_3", "lambda_4"]


class TrainingAbortedError(ValueError):
    """Demasiados pasos saltados por valores no finitos"""

    def __init__(self, iteration: int, skipped: int, op: Optional[str]):
        super().__init__(f"Entrenamiento abortado en la iteración {iteration}: "
                         f"{skipped} pasos saltados (última operación no finita: {op})")
        self.iteration = iteration
        self.skipped = skipped
        self.op = op


class EpisodicTrainer:
    """Bucle de entrenamiento determinista para una semilla, configuración y corpus dados"""

    def __init__(self, config: TrainConfig, corpus: BlockCorpus, table: Optional[TextEmbeddingTable] = None,
                 model: Optional[EPSegModel] = None):
        self.config = config.validate()
        self.corpus = corpus
        self.model = model if model is not None else build_model(config)
        if table is None:
            table = TextEmbeddingTable(dim=config.model.text_dim, synthetic_fallback=True, seed=config.seed)
        self.table = table

        _, episode_seed = np.random.SeedSequence(config.seed).spawn(2)
        self.rng = np.random.default_rng(episode_seed)

        groups = self.model.parameter_groups()
        self.optimizer = AdamW(
            [ParamGroup("backbone", groups["backbone"],
                        StepDecaySchedule(config.lr_backbone, config.decay_step_backbone, config.decay_ratio_backbone)),
             ParamGroup("main", groups["main"],
                        StepDecaySchedule(config.lr_main, config.decay_step_main, config.decay_ratio_main))],
            betas=config.betas, weight_decay=config.weight_decay)

        self.diagnostics = LossDiagnostics()
        self.skipped = 0
        self.last_failed_op: Optional[str] = None
        self.metrics = pd.DataFrame(columns=METRIC_COLUMNS)

    def compute_losses(self, out: ForwardOutput, episode: Episode) -> Dict[str, Tensor]:
        cfg = self.config
        truth = episode.reveal_query_labels()
        seg = seg_loss(out.probs, truth)

        con = Tensor(0.0)
        if cfg.ablation.l_con:
            s_idx, q_idx, pair_labels = sample_contrastive_pairs(out.support_labels, truth,
                                                                 self.rng, cfg.loss.max_pairs_per_class)
            if pair_labels.size:
                con = con_loss(ops.gather_rows(out.support_features, s_idx),
                               ops.gather_rows(out.query_features, q_idx), pair_labels,
                               cfg.loss.tau, cfg.loss.normalize_con, self.diagnostics)
            else:
                self.diagnostics.degenerate_con += 1

        align = Tensor(0.0)
        if cfg.ablation.l_align and out.text_embeddings is not None:
            fg = ops.slice_rows(out.p_raw, 1, out.p_raw.shape[0])
            align = align_loss(fg, out.text_embeddings, self.model.align.weight)

        return {"seg": seg, "con": con, "align": align, "total": total_loss(seg, con, align, cfg.loss)}

    def step(self, iteration: int) -> Optional[Dict[str, float]]:
        """
        Una iteración de entrenamiento.

        Returns:
            Fila de métricas, o None si el paso se saltó por valores no finitos
        """
        cfg = self.config
        t = iteration / cfg.model.t_unit
        episode = sample_episode(self.corpus, cfg.n_way, cfg.k_shot, self.rng, split="train")
        self.optimizer.zero_grad()
        params = self.model.parameters()
        try:
            with Graph() as graph:
                out = self.model.forward(episode, self.table, t, self.rng)
                losses = self.compute_losses(out, episode)
            backward(graph, losses["total"], params)
            if not all(np.all(np.isfinite(p.grad)) for p in params if p.grad is not None):
                raise NonFiniteError("backward")
        except NonFiniteError as e:
            self.skipped += 1
            self.last_failed_op = e.op
            logger.warning("Iteración %d saltada: %s", iteration, e)
            if self.skipped > cfg.max_skip_fraction * max(cfg.iterations, 1):
                raise TrainingAbortedError(iteration, self.skipped, e.op) from e
            return None

        self.optimizer.step(iteration)
        lrs = self.optimizer.learning_rates(iteration)
        weights = fusion_weights(t, cfg.model.lambda_star, cfg.model.schedule_rate)
        row = {"iter": iteration, "L_seg": losses["seg"].item(), "L_con": losses["con"].item(),
               "L_align": losses["align"].item(), "L_total": losses["total"].item(),
               "lr_main": lrs["main"], "lr_backbone": lrs["backbone"]}
        row.update({f"lambda_{i + 1}": w for i, w in enumerate(weights)})
        return row

    def train(self, progress: bool = True) -> pd.DataFrame:
        """
        Ejecuta config.iterations iteraciones y congela t en el modelo.

        Returns:
            DataFrame de métricas con las columnas de METRIC_COLUMNS
        """
        rows: List[Dict[str, float]] = []
        iterator = tqdm(range(self.config.iterations), desc="Entrenando", disable=not progress)
        for iteration in iterator:
            row = self.step(iteration)
            if row is not None:
                rows.append(row)
                iterator.set_postfix(loss=f"{row['L_total']:.4f}")
        self.model.fusion_t = self.config.iterations / self.config.model.t_unit
        if self.diagnostics.degenerate_con:
            logger.warning("L_con degenerada (sin negativos) en %d episodios", self.diagnostics.degenerate_con)
        self.metrics = pd.DataFrame(rows, columns=METRIC_COLUMNS)
        logger.info("Entrenamiento terminado: %d iteraciones, %d saltadas", self.config.iterations, self.skipped)
        return self.metrics


def train(config: TrainConfig, corpus: BlockCorpus, table: Optional[TextEmbeddingTable] = None,
          out_dir: Optional[Union[str, Path]] = None, progress: bool = True):
    """
    Entrena un modelo y, si se indica out_dir, guarda checkpoint, config y métricas.

    Returns:
        Tupla (modelo, métricas)
    """
    trainer = EpisodicTrainer(config, corpus, table)
    metrics = trainer.train(progress=progress)
    if out_dir is not None:
        save_run(trainer.model, config, out_dir, metrics)
    return trainer.model, metrics
