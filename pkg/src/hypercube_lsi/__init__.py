"""Log-Sobolev curves, small-support hypercontractivity and uncertainty bounds on {0,1}^n."""
from ._backend import BACKEND
from . import cube, curves, gf2, hyper, mgl, seeds, serialize, uncertainty
from .cube import heat, wht, iwht, entropy, lp_norm, dirichlet
from .curves import b1, bp, cfun, cprime, h, h_inv, verify_plsi
from .mgl import mgl_bound, ode_decay, verify_mgl
from .hyper import bonami, hc_closed_p2, hc_firm, hc_ode, hc_verify
from .uncertainty import SubsetSpec, cos_angle, cos_angle_linear
from .gf2 import Gf2Matrix, analyze

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "__version__", "cube", "curves", "gf2", "hyper", "mgl", "seeds", "serialize",
    "uncertainty", "heat", "wht", "iwht", "entropy", "lp_norm", "dirichlet", "b1", "bp", "cfun",
    "cprime", "h", "h_inv", "verify_plsi", "mgl_bound", "ode_decay", "verify_mgl", "bonami",
    "hc_closed_p2", "hc_firm", "hc_ode", "hc_verify", "SubsetSpec", "cos_angle",
    "cos_angle_linear", "Gf2Matrix", "analyze",
]
