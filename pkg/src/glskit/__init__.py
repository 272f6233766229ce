"""glskit: numerical toolkit for bilateral grand Lebesgue spaces ``G(psi)``.

Modules
-------
psi          weight functions psi on (a, b) and the order ``nu << psi``
measure      measured partitions, grid functions, moment curves, Gaussian oracles
norm         the ``G(psi)`` norm, ``G0`` membership and the EGA modulus
rearrange    discrete Schwarz symmetrization and iterative polarization
compactness  finite-sample compactness certificates and the counterexamples
cli          the ``glskit`` command line front end
"""

__version__ = "0.1.0"

from .psi import (  # noqa: E402
    LogLinearTable,
    Order,
    PsiFunction,
    make_psi_builtin,
    order_relation,
    psi_eval,
    psi_from_table,
    read_psi_file,
    write_psi_file,
)
from .measure import (  # noqa: E402
    GridFunction,
    MeasuredPartition,
    MomentCurve,
    QuadratureError,
    distance_in_measure,
    exact_lp_norm,
    gaussian_band_curve,
    gaussian_moment_curve,
    gaussian_quantile_function,
    gaussian_tail_curve,
    indicator,
    lp_norm,
    lp_norms,
    read_gridfn,
    superlevel_restriction,
    write_gridfn,
)
from .norm import (  # noqa: E402
    EgaModulus,
    G0Result,
    G0Verdict,
    GlsNormResult,
    ScanConfig,
    ega_modulus,
    g0_membership,
    gls_norm,
)
from .rearrange import (  # noqa: E402
    Halfspace,
    PolarizationRun,
    canonical_order,
    gradient_seminorm,
    is_family_fixed_point,
    polarize,
    polarizer_family,
    schaftingen_run,
    schwarz_symmetrize,
)
from .compactness import (  # noqa: E402
    CompactnessReport,
    FunctionSequence,
    Verdict,
    gaussian_truncation_family,
    indicator_curve,
    lp_total_boundedness,
    remark_demos,
    theorem1_certify,
    theorem2_certify,
)
