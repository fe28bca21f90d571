"""Groebner bases over the mod 2 Steenrod algebra and minimal resolutions.

The algebra is handled in the lifted basis of square-free monomials in the
P~^i_j, ordered so that its associated graded is an exterior algebra. On top
of that sit a Buchberger engine for left submodules of free modules, and a
degree-by-degree minimal resolution with Ext charts and Yoneda products.
"""

from .f2linear import BitMatrix, EchelonBasis, kernel_basis, rank, replay, row_reduce
from .groebner import (
    GBEntry,
    GroebnerData,
    GroebnerError,
    buchberger,
    check_syzygy,
    reduce_full,
    reduce_once,
    syzygy_generators,
    syzygy_of_generators,
)
from .milnor import (
    MilnorElt,
    TruncationBound,
    adem_expand,
    filtration_v,
    milnor_product,
    milnor_to_pst,
    parse_milnor,
    pr,
    pst_to_milnor,
    sq_product,
)
from .order import AlgElt, FreeElt, ModMonomial, Monomial, PstMonomial, cmp_mod_monomial, cmp_monomial
from .resolution import (
    ExtChart,
    ModulePresentation,
    ResolutionError,
    ResolutionState,
    RunOptions,
    ext_chart,
    extend_resolution,
    lift_chain_map,
    load_checkpoint,
    load_module,
    minimal_generators,
    minimize_presentation,
    parse_module,
    products,
    resolve,
    save_checkpoint,
)

__version__ = "0.1.0"
