from .types import CycleConfig, DecompConfig, Decomposition, Factor
from .family import CopyFamily, audit_family, build_family, pair_family, sample_embeddings
from .aux import AuxHypergraph, build_aux_hypergraph
from .factors import decompose_F_factors, decompose_matchings_sparse
from .transversals import array_boundedness, decompose_transversals, read_array, write_array
from .verify import VerifyReport, verify_decomposition
from .linker import Linkage, link_fragments
from .cycles import decompose_near_spanning_cycles
from .spanning import block_partition, block_size, extend_cycles
