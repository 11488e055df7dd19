"""Random bipartite planar maps with prescribed face degrees.

Uniform plane trees with a given degree sequence, their uniform labellings,
the two bijections that turn them into pointed rooted bipartite maps, and
the Boltzmann and finite-size statistics built on top of them.
"""

__version__ = "0.1.0"

from .trees import DegreeSequence, PlaneTree, lukasiewicz_path, height_process, \
    modified_height, contour_process, white_contour
from .sampling import LabelledTree, sample_tree, label_tree, count_trees, count_labellings, \
    enumerate_trees, enumerate_labellings
from .bijections import js_forward, js_inverse, js_forward_labelled, js_inverse_labelled, \
    bdg_build_map, bdg_inverse
from .maps import PlanarMap, audit, sample_pointed, sample_uniform_map, label_distance_check, \
    distance_upper_bound_check
from .boltzmann import WeightSequence, Conditioning, classify, tilt_solve, \
    sample_conditioned_gw, sample_boltzmann_map
from .stats import h_diagnostics, contour_height_gap, lambda_linearity, two_point_identity, \
    ks_two_sample, bridge_maxgap_dichotomy

__all__ = [
    "DegreeSequence", "PlaneTree", "lukasiewicz_path", "height_process", "modified_height",
    "contour_process", "white_contour",
    "LabelledTree", "sample_tree", "label_tree", "count_trees", "count_labellings",
    "enumerate_trees", "enumerate_labellings",
    "js_forward", "js_inverse", "js_forward_labelled", "js_inverse_labelled",
    "bdg_build_map", "bdg_inverse",
    "PlanarMap", "audit", "sample_pointed", "sample_uniform_map", "label_distance_check",
    "distance_upper_bound_check",
    "WeightSequence", "Conditioning", "classify", "tilt_solve", "sample_conditioned_gw",
    "sample_boltzmann_map",
    "h_diagnostics", "contour_height_gap", "lambda_linearity", "two_point_identity",
    "ks_two_sample", "bridge_maxgap_dichotomy",
]
