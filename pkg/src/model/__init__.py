from .backbone import Backbone, EdgeConvBlock, knn_graph
from .prototypes import MultiPrototype, PrototypeSet, farthest_point_sample, multi_prototype_sample, \
    class_average, class_averages
from .proera import ProERA, RegisterBank, init_registers
from .text_embeddings import TextEmbeddingTable, EmbeddingTableError, UnknownClassError, load_table, \
    save_table, synth_embedding
from .lgpe import LanguageGuidedPrototypes, TextProjection, fusion_weights, fuse_prototypes, project_text
from .drpe import DrpeCrossAttention, DrpeTensor, compute_drpe, sin_emb
from .decoder import Decoder, DecoderBlock, DecoderState, predict
from .losses import LossDiagnostics, seg_loss, con_loss, align_loss, total_loss, sample_contrastive_pairs
from .network import EPSegModel, ForwardOutput

__all__ = ['Backbone', 'EdgeConvBlock', 'knn_graph', 'MultiPrototype', 'PrototypeSet', 'farthest_point_sample',
           'multi_prototype_sample', 'class_average', 'class_averages', 'ProERA', 'RegisterBank',
           'init_registers', 'TextEmbeddingTable', 'EmbeddingTableError', 'UnknownClassError', 'load_table',
           'save_table', 'synth_embedding', 'LanguageGuidedPrototypes', 'TextProjection', 'fusion_weights',
           'fuse_prototypes', 'project_text', 'DrpeCrossAttention', 'DrpeTensor', 'compute_drpe', 'sin_emb',
           'Decoder', 'DecoderBlock', 'DecoderState', 'predict', 'LossDiagnostics', 'seg_loss', 'con_loss',
           'align_loss', 'total_loss', 'sample_contrastive_pairs', 'EPSegModel', 'ForwardOutput']
