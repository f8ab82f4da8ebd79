"""Entanglement groups of pure multipartite states."""

__version__ = "0.1.0"

from . import errors  # noqa: E402
from .dmalgebra import dm_generators, dm_report, lie_closure  # noqa: E402
from .entclass import (Fingerprint, enumerate_partitions, fingerprint,  # noqa: E402
                       maximal_entanglement_report, same_entanglement_type)
from .estimators import (EntanglementFingerprinter, EntanglementTypeClassifier,  # noqa: E402
                         StabilizerAnalyzer)
from .schmidt import bipartite_entanglement_dim, schmidt_decompose, schmidt_report  # noqa: E402
from .stabilizer import (all_entanglement_dims, check_no_sharing, entanglement_dim,  # noqa: E402
                         full_entanglement_dim, identity_component, search_discrete,
                         stabilizer_algebra, verify_discrete)
from .statecore import (Partition, PureState, make_state, named_state,  # noqa: E402
                        random_state)

__all__ = [
    "errors", "dm_generators", "dm_report", "lie_closure", "Fingerprint",
    "enumerate_partitions", "fingerprint", "maximal_entanglement_report",
    "same_entanglement_type", "EntanglementFingerprinter", "EntanglementTypeClassifier",
    "StabilizerAnalyzer", "bipartite_entanglement_dim", "schmidt_decompose", "schmidt_report",
    "all_entanglement_dims", "check_no_sharing", "entanglement_dim", "full_entanglement_dim",
    "identity_component", "search_discrete", "stabilizer_algebra", "verify_discrete",
    "Partition", "PureState", "make_state", "named_state", "random_state", "__version__",
]
