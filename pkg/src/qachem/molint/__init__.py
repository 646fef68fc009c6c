from .basis import (ANGSTROM_TO_BOHR, Atom, ContractedShell, Geometry, UnsupportedFeatureError,
                    build_basis, diatomic, load_sto3g, make_shell, parse_basis)
from .boys import boys
from .integrals import CoincidentNucleiError, IntegralSet, integrals, nuclear_repulsion
from .io import dump_integrals, load_integrals
from .scf import (ActiveSpaceError, ActiveSpaceIntegrals, MOIntegrals, SCFResult, active_space,
                  full_space, mo_transform, scf_rhf)

__all__ = [
    "ANGSTROM_TO_BOHR", "Atom", "ContractedShell", "Geometry", "UnsupportedFeatureError",
    "build_basis", "diatomic", "load_sto3g", "make_shell", "parse_basis", "boys",
    "CoincidentNucleiError", "IntegralSet", "integrals", "nuclear_repulsion",
    "dump_integrals", "load_integrals", "ActiveSpaceError", "ActiveSpaceIntegrals",
    "MOIntegrals", "SCFResult", "active_space", "full_space", "mo_transform", "scf_rhf",
]
