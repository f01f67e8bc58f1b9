"""Incompatibility robustness of binary observables from their
anti-commutativity graph: graph generators, Majorana/Pauli realizations,
skew-spectral machinery, combinatorial invariants, a dense interior-point
SDP solver, and certified bounds on eta(G)."""

from .errors import (CapExceeded, IncompatError, InternalInconsistency,
                     SolverError, ValidationError)
from .graphs import (EdgeLabeling, FamilyMeta, Graph, cartesian_product,
                     check_transitivity, complement, connected_components,
                     f2_rank, from_json, from_json_dict, from_text,
                     gen_family, induced_subgraph, is_bipartite,
                     is_isomorphic, line_graph, new_graph, to_json,
                     to_json_dict, to_text, twin_reduce)
from .invariants import (FractionalColoring, ThetaResult, chromatic_number,
                         clique_number, fractional_chromatic,
                         independence_number, invariants_report,
                         lovasz_theta, max_clique, max_independent_set)
from .realization import (MajoranaMonomial, ObservableSet,
                          anticommutativity_graph, anticommutes,
                          degree_k_family, monomial, monomial_matrix,
                          realize_majorana, realize_minimal)
from .robustness import (Bound, ClosedForm, EtaSdpResult, OptimalityReport,
                         ParentPovm, PsiEstimate, ReportOptions, bounds_report,
                         closed_form, eta_cycle, eta_exact_sdp,
                         eta_line_skew, eta_lower_bipartite_energy,
                         eta_lower_fractional, eta_upper_lovasz,
                         eta_upper_signing, eta_upper_subgraph,
                         explicit_complete_parent,
                         optimal_incompatibility_check, path_interval,
                         psi_estimate, report_to_json)
from .spectral import (CertificateReport, Orientation, SpectralSummary,
                       adjacency_matrix, adjacency_summary, graph_energy,
                       matrix_certificates, max_skew_energy,
                       orientation_from_json_dict, orientation_to_json_dict,
                       singular_values, skew_energy, skew_matrix,
                       skew_summary, switching_classes)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
