"""Numerical verification of a Gamma-function closed form for a triple complex
integral, together with the Gaussian moment and invariant-functional
identities that lead to it."""

from .errors import (
    BudgetExhaustedError,
    CoincidenceError,
    DomainError,
    NonFiniteSampleError,
    NonIntegrableError,
    PoleError,
    VarianceWarning,
    ZamintError,
)
from .gauss import (
    Spinor,
    SpinorTriple,
    gexpect,
    kernel_K,
    sample_cgauss,
    spinor_det,
    verify_prop1,
    verify_thm2,
)
from .params import (
    DomainCheck,
    DomainStatus,
    Estimate,
    IntegrationConfig,
    ParameterPoint,
    check_domain,
    nu_from_sigma,
    sigma_from_nu,
)
from .quad import DomainSpec, QuadRule, RngStream, cubature, mc_expect, qmc_expect
from .rep import (
    GroupElement,
    TestFunction,
    act,
    ell_gauss,
    ell_prime,
    ell_trilinear,
    fs_type,
    haar_su2,
    invariance_test,
    kernel_function,
    product,
    quadratic_form,
    radial_power,
    verify_cor1,
    verify_lemma3,
)
from .report import Report
from .special import (
    ClosedFormValue,
    cor1_constant,
    lemma3_constant,
    log_gamma,
    prop1_det_rhs,
    prop1_linear_rhs,
    prop1_radial_rhs,
    rhs_eq3,
    rhs_thm2,
)
from .zam import (
    chordal_gate,
    integrand_eq1,
    integrate_eq1_cubature,
    integrate_eq1_mc,
    verify_chain,
    verify_thm1,
)

__version__ = "0.1.0"
