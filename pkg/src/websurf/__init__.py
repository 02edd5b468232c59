"""Random-surfer / PageRank-selection Webgraph models and their theory.

Library layout:

* ``streams``     seeded random primitives (one Philox stream per trial)
* ``graphs``      graph generators and the edge-list file format
* ``pagerank``    power-iteration PageRank and the walk-endpoint law
* ``metrics``     depths, height, exact diameter, semi-diameter
* ``wtrees``      weighted-tree transformations and the branching tree
* ``theory``      rate functions, growth constants, exact tail oracles
* ``experiments`` seeded Monte Carlo harness with CSV/JSON output
* ``verify``      the acceptance checklist behind ``websurf verify``
"""

from .streams import SeedSpec, Stream, derive_stream_id
from .graphs import (
    ModelConfig,
    MultiDigraph,
    StepLaw,
    Variant,
    generate_generalized_tree,
    generate_graph,
    generate_pagerank_selection,
    generate_random_surfer,
    marked_spanning_tree,
    read_edge_list,
    write_edge_list,
)
from .wtrees import (
    ContinuousTree,
    WeightedTree,
    contract_zero_edges,
    generate_second_model,
    generate_third_model,
    simulate_branching,
    stopped_tree_law_check,
)

__version__ = "0.1.0"

__all__ = [
    "SeedSpec",
    "Stream",
    "derive_stream_id",
    "ModelConfig",
    "MultiDigraph",
    "StepLaw",
    "Variant",
    "generate_generalized_tree",
    "generate_graph",
    "generate_pagerank_selection",
    "generate_random_surfer",
    "marked_spanning_tree",
    "read_edge_list",
    "write_edge_list",
    "ContinuousTree",
    "WeightedTree",
    "contract_zero_edges",
    "generate_second_model",
    "generate_third_model",
    "simulate_branching",
    "stopped_tree_law_check",
    "__version__",
]
