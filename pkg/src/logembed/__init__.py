"""logembed: node embeddings that keep both neighborhood structure and
global PageRank status, with the matching link-prediction harness.

The training hot loops run on a compiled Cython core when it is available and
fall back to pure NumPy otherwise; `logembed.kernels.BACKEND` reports which
one is active.
"""

from .graph import (Graph, NoiseTable, build_noise_table, degree, from_edges,
                    load_edge_list, sample_negative, sample_negatives, save_edge_list)
from .kernels import BACKEND, COMPILED
from .model import (EmbeddingModel, final_representation, final_representation_matrix,
                    global_list_loss, init_model, load_embeddings, local_term,
                    pair_order_prob, save_embeddings, sigmoid, status_value_gine,
                    status_value_log)
from .status import (StatusLevels, StatusScores, assign_levels, pagerank, rank_nodes,
                     sample_level_list)
from .train import GineConfig, LogConfig, TrainStats, train_gine, train_log

__version__ = "0.1.0"
