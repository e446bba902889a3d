"""thermocone: resource-theoretic quantum thermodynamics at desk scale.

Subpackages follow the pipeline from simplex order theory to experiments:

* :mod:`thermocone.simplex` -- Gibbs contexts, beta-ordering, embedding,
  (thermo)majorisation curves, joins, matrix checks;
* :mod:`thermocone.approx` -- approximate / probabilistic / catalytic
  majorisation;
* :mod:`thermocone.cones` -- thermal-cone extreme points, tangent vectors,
  classification, Monte-Carlo volumes, Schmidt-spectrum sampling;
* :mod:`thermocone.memtp` -- memory-assisted Markovian thermal processes and
  their analytic convergence oracles;
* :mod:`thermocone.distill` -- exact single-shot distillation errors and
  second-order asymptotics with fluctuation-dissipation coefficients;
* :mod:`thermocone.qubit` -- coherent thermal cones of a single qubit;
* :mod:`thermocone.jaynes_cummings` -- catalytic Jaynes-Cummings simulator;
* :mod:`thermocone.cli` -- command-line front end emitting JSON/CSV artifacts.
"""

from .simplex import (
    GibbsContext,
    BetaOrder,
    ThermoCurve,
    as_distribution,
    beta_order,
    embed,
    gibbs_distribution,
    is_bistochastic,
    is_gibbs_preserving,
    majorisation_join,
    majorises,
    thermo_curve,
    thermomajorises,
    trivial_context,
)
from .approx import (
    ApproxResult,
    approx_majorise_optimal,
    catalyses,
    probabilistic_aux,
    trumping_witness,
    vidal_probability,
)
from .cones import (
    ConeResult,
    classify,
    cone_volumes,
    future_extreme_points,
    project_to_simplex,
    sample_schmidt_spectrum,
    tangent_vectors_thermal,
    tangent_vectors_zero_beta,
)
from .distill import (
    InfoTriple,
    SystemEnsemble,
    Subsystem,
    application_rates,
    dissipation_coefficient,
    exact_distillation_error,
    info_quantities,
    optimal_error_asymptotic,
    single_shot_bound,
)
from .memtp import (
    ProtocolSpec,
    beta_swap_matrix,
    compose_protocol,
    convergence_functions,
    cooling_with_memory,
    run_beta_swap_protocol,
    two_level_thermalise,
    work_extraction_with_memory,
)
from .jaynes_cummings import (
    AtomState,
    JCParams,
    catalytic_atom,
    coherent_state,
    evolve,
    g2,
    jc_unitary,
    squeezing_xi,
    wigner,
)
from .special import normal_cdf, normal_cdf_inv, reg_inc_beta

__version__ = "0.1.0"
