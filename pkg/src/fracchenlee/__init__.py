"""Special fractional-order Chen-Lee system toolkit."""
from ._backend import BACKEND
from .frackernel import (
    FractionalOrder,
    KernelParams,
    caputo_derivative,
    gamma,
    kernel_g,
    rl_integral,
    tempered_integral,
)
from .integrator import (
    ControlMode,
    IntegratorConfig,
    KernelMode,
    Trajectory,
    convergence_report,
    euler_step,
    initial_condition,
    simulate,
)
from .stability import (
    EigenTriple,
    Stability,
    StabilityVerdict,
    char_poly,
    classify_e0,
    classify_e2m,
    discriminant,
    eigenvalues3,
    equilibria_special,
    jacobian,
    matignon_classify,
)
from .systems import (
    ControlSpec,
    ParamsCL,
    State,
    SystemSpec,
    eval_controlled,
    eval_full,
    eval_special,
    lipschitz_bound,
    matrix_form,
)

__version__ = "0.1.0"
