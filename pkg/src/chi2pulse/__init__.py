"""Phase-space propagation of pulsed multimode quantum light through chi(2) crystals."""

from .chi2 import (
    ConstantIndex,
    CrystalParams,
    FirstOrderMap,
    InteractionKernels,
    PumpPulse,
    Regime,
    SellmeierIndex,
    TwoBandIndex,
    build_kernels,
    first_order_map,
)
from .config import SweepConfig, parse_config, serialize_config, validate
from .errors import *  # noqa: F401,F403
from .phasespace import (
    GaussianState,
    OutputRelation,
    QuadratureMap,
    WignerGrid,
    WignerWindow,
    assemble_quadrature_map,
    fock_output_wigner,
    fock_wigner,
    gaussian_wigner_eval,
    propagate_gaussian,
    wigner_convolution_oracle,
)
from .spectral import FrequencyGrid, ModeFunction, gaussian_mode, gram_schmidt, inner_product, thz_to_omega
from .symplectic import bloch_messiah, gbmd, is_symplectic, symplectic_eigenvalues, symplectic_form, von_neumann_entropy

__version__ = "0.1.0"
