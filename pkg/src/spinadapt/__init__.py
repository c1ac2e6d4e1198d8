"""Spin-adapted fermionic excitation operators and their exact unitaries.

The package builds second-quantized excitation generators over spatial
orbitals, couples them into spin eigenoperators, exponentiates them in
closed form and by eigendecomposition, measures how Trotter-Suzuki
product formulas break total-spin symmetry, and grows adaptive ansatze
toward FCI ground states of small molecular Hamiltonians.
"""

from .adapt import (
    AdaptResult,
    AnsatzState,
    PreparedGenerator,
    adapt_vqe,
    ansatz_vector,
    apply_unitary,
    energy_and_gradient,
)
from .expm import (
    AntiHermitianEigen,
    ClosedFormSpec,
    PeriodicityReport,
    builtin_specs,
    closed_form_eval,
    eq26_spec,
    eq30_spec,
    eq31_spec,
    eq32_spec,
    exact_expm,
    identity_distance_scan,
    periodicity_test,
    sm_s9_spec,
    sm_s10_spec,
)
from .fermiops import (
    ANNIHILATE,
    CREATE,
    OperatorSum,
    annihilate,
    anti_hermitian,
    create,
    excitation,
    number,
    number_operator,
    s_squared_operator,
    sz_operator,
    to_matrix,
)
from .fock import (
    FockBasis,
    SymmetrySector,
    aufbau_reference,
    enumerate_basis,
    s2_sector_dimension,
)
from .hamiltonian import (
    MolecularHamiltonian,
    build_hamiltonian,
    fci_ground,
    parse_fcidump,
)
from .pauli import PauliSum, jordan_wigner, lcu_decompose
from .pools import (
    PoolSpec,
    SpinAdaptedGenerator,
    build_pool,
    singlet_double_cg,
    singlet_single,
    spin_double,
    spin_single,
    triplet_double_ppqr,
)
from .trotter import (
    TrotterScheme,
    error_scan,
    scheme,
    spin_violation_scan,
    term_split,
    trot1_st_spec,
    trot_closed_forms,
    trotterize,
)

__all__ = [
    "AdaptResult",
    "AnsatzState",
    "AntiHermitianEigen",
    "ANNIHILATE",
    "ClosedFormSpec",
    "CREATE",
    "FockBasis",
    "MolecularHamiltonian",
    "OperatorSum",
    "PauliSum",
    "PeriodicityReport",
    "PoolSpec",
    "PreparedGenerator",
    "SpinAdaptedGenerator",
    "SymmetrySector",
    "TrotterScheme",
    "adapt_vqe",
    "ansatz_vector",
    "apply_unitary",
    "aufbau_reference",
    "build_hamiltonian",
    "build_pool",
    "builtin_specs",
    "closed_form_eval",
    "energy_and_gradient",
    "enumerate_basis",
    "eq26_spec",
    "eq30_spec",
    "eq31_spec",
    "eq32_spec",
    "error_scan",
    "exact_expm",
    "excitation",
    "fci_ground",
    "identity_distance_scan",
    "jordan_wigner",
    "lcu_decompose",
    "annihilate",
    "anti_hermitian",
    "create",
    "number",
    "number_operator",
    "parse_fcidump",
    "periodicity_test",
    "s2_sector_dimension",
    "s_squared_operator",
    "sz_operator",
    "scheme",
    "singlet_double_cg",
    "singlet_single",
    "sm_s9_spec",
    "sm_s10_spec",
    "spin_double",
    "spin_single",
    "spin_violation_scan",
    "term_split",
    "to_matrix",
    "triplet_double_ppqr",
    "trot1_st_spec",
    "trot_closed_forms",
    "trotterize",
]
