"""KMS states of graph C*-algebras under the gauge dynamics, and their
classical and quantum symmetry."""

from .errors import (
    GraphError,
    KmsGraphError,
    NotStronglyConnectedError,
    ParseError,
    PreconditionError,
    SinkError,
)
from .graph import (
    DirectedGraph,
    PathWord,
    build_graph,
    disjoint_union,
    has_sink,
    is_strongly_connected,
    load_graph,
    make_circulant,
    orient,
    save_graph,
    strongly_connected_components,
    validate_path,
)
from .spectral import (
    SpectralReport,
    TaggedReal,
    circulant_spectrum,
    eigenspace_at,
    perron_data,
    spectral_radius,
    spectral_report,
)
from .kms import (
    Beta,
    KmsPolytope,
    KmsState,
    admissible_inverse_temperatures,
    check_toeplitz_subinvariance,
    critical_inverse_temperature,
    evaluate_state,
    factors_through,
    kms_simplex,
    unique_kms,
)
from .symmetry import (
    AutomorphismGroup,
    are_isomorphic,
    automorphism_group,
    invariant_kms_subpolytope,
    is_state_invariant,
    is_vertex_transitive,
    verify_union_aut_product,
)
from .quantum import (
    CoherentPartition,
    QSymVerdict,
    QuantumContext,
    coherent_partition,
    quantum_invariant_kms,
    qvt_verdict,
    strongly_connected_quantum_report,
)
from .lbcs import (
    ConstraintVertex,
    LinearBinarySystem,
    constraint_graph,
    format_lbcs,
    homogenize,
    mermin_peres,
    parse_lbcs,
    solve_f2,
)

__version__ = "0.1.0"
