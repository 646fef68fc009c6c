from .encodings import (ENCODINGS, LinearEncoding, ReferenceState, bk_matrix, bravyi_kitaev, encode,
                        get_encoding, hf_reference, jordan_wigner, transform)
from .fermion import (FermionOperator, IntegralValidationError, build_fermionic, ladder,
                      spin_orbital_integrals)
from .pauli import NonHermitianError, PauliSum, PauliTerm, QubitHamiltonian, pauli_product
from .reduce import (CapacityError, NotTaperableError, diagonal_minimum, exact_diagonalize,
                     taper_fixed_qubits, taper_reference, z_only_qubits)

__all__ = [
    "ENCODINGS", "LinearEncoding", "ReferenceState", "bk_matrix", "bravyi_kitaev", "encode",
    "get_encoding", "hf_reference", "jordan_wigner", "transform", "FermionOperator",
    "IntegralValidationError", "build_fermionic", "ladder", "spin_orbital_integrals",
    "NonHermitianError", "PauliSum", "PauliTerm", "QubitHamiltonian", "pauli_product",
    "CapacityError", "NotTaperableError", "diagonal_minimum", "exact_diagonalize",
    "taper_fixed_qubits", "taper_reference", "z_only_qubits",
]
