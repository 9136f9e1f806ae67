from .point_cloud import PointCloud, Episode
from .data_manager import CorpusManager
from .data_loader import CloudLoader, CloudLoaderFactory
from .csv_loader import CSVLoader
from .epc_loader import EPCLoader, CloudFormatError, read_cloud, write_cloud
from .scene_generator import SceneSpec, Primitive, generate_scene
from .blocks import split_and_sample
from .episode_sampler import BlockCorpus, EpisodeSamplingError, sample_episode
from .augment import jitter_scale_augment

__all__ = ['PointCloud', 'Episode', 'CorpusManager', 'CloudLoader', 'CloudLoaderFactory', 'CSVLoader',
           'EPCLoader', 'CloudFormatError', 'read_cloud', 'write_cloud', 'SceneSpec', 'Primitive',
           'generate_scene', 'split_and_sample', 'BlockCorpus', 'EpisodeSamplingError',
           'sample_episode', 'jitter_scale_augment']
