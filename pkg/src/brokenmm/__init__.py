"""Boolean and witnessing matrix multiplication via broken Strassen pseudo-products."""
from .gfmat import BitMatrix, InstanceStats, bool_mul_naive, gf2_mul_naive, gf2_mul_strassen
from .pseudomul import GF2, INT64, IntModRing, PseudoParams, pseudo_product
from .sketch import SketchConfig, bmm, bmm_estimate
from .witness import WitnessMatrix, wbmm, witness_estimate

__version__ = "0.1.0"
