"""Distance oracles, eccentricities and VC-dimension tools for minor-free graphs."""

from .graph_core import INF, UNREACHABLE, Graph, all_pairs, parse_spec, read_graph, \
    shortest_path_tree, sssp, write_graph
from .rdivision import RDivision, build_r_division, check_division, division_quality
from .set_systems import SetFamily, ball_system, lp_hat_system, sauer_shelah_bound, \
    sp_tree_system, vc_dimension, vc_search
from .undirected import UndirectedOracle, build_oracle, eccentricities, load_oracle, \
    wiener_index
from .directed import DirectedOracle, build_directed_oracle, directed_eccentricities
from .lower_bound import build_gadget, to_unweighted, verify_shattering

__version__ = "0.1.0"
