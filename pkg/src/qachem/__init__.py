"""Electronic-structure problems compiled to classical Ising spin glasses.

The pipeline runs: STO-3G integrals and RHF (``molint``), fermion-to-qubit
encodings (``qubitham``), the r-copy diagonal mapping (``isingmap``),
quadratization (``quad``), Chimera embedding (``chimera``) and sampling
(``anneal``). ``pipeline`` strings them together.
"""

__version__ = "0.1.0"
