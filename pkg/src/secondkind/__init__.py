"""Spectra of curvature operators of the second kind, alpha-cones and the 3D curvature ODE."""
from .errors import (
    BadBracket,
    EmptySample,
    IntegrationUnstable,
    InvalidInput,
    NoConvergence,
    SecondKindError,
    ShapeMismatch,
    Undefined,
)
from .numerics import Bracket, bracketed_root, sym_eigenvalues, sym_eigenvalues_batch
from .tensor_core import CurvTensor, curvature_from_first_kind_eigs, kulkarni_nomizu, second_kind_matrix
from .spectra import (
    FirstKindEigs3,
    SchoutenSpectrum,
    SecondKindSpectrum,
    SpectrumEntry,
    lambda_pm,
    secular_roots,
    spectrum3d,
    spectrum_general,
)
from .oracle import compare, numeric_spectrum_3d, numeric_spectrum_general
from .cones import AlphaCondition, ConeReport, Mode, condition_report, f_alpha, h_alpha, pinching_bound
from .flow import FlowConfig, FlowState, FlowTrace, integrate, monotone_quantities, preservation_experiment

__version__ = "0.1.0"
