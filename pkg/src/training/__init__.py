from .optimizer import AdamW, ParamGroup, StepDecaySchedule
from .checkpoint import CheckpointError, save_checkpoint, load_checkpoint, save_run, load_run, build_model
from .trainer import EpisodicTrainer, TrainingAbortedError, METRIC_COLUMNS, train
from .evaluator import ConfusionCounter, EvalReport, evaluate, fixed_episodes
from .zero_shot import ZeroShotResult, zero_shot_infer

__all__ = ['AdamW', 'ParamGroup', 'StepDecaySchedule', 'CheckpointError', 'save_checkpoint', 'load_checkpoint',
           'save_run', 'load_run', 'build_model', 'EpisodicTrainer', 'TrainingAbortedError', 'METRIC_COLUMNS',
           'train', 'ConfusionCounter', 'EvalReport', 'evaluate', 'fixed_episodes', 'ZeroShotResult',
           'zero_shot_infer']
