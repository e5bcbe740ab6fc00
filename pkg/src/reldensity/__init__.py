"""Natural density (relative measure) laboratory: densities of integer sets,
relative distribution functions, independence defects, and finite-N
versions of the classical limit theorems of probabilistic number theory."""

from .stats import PHI, EmpiricalCDF, EvaluableCDF, binomial_pmf, ks_distance, phi_cdf
from .sequences import RealSeq, frac, kronecker_seq
from .density import (ArithmeticProgression, BinaryDigitSet, BlockExample, Complement,
                      DensityEstimate, EventuallyPeriodic, Intersection, Predicate,
                      continuous_density, density_estimate, density_exact,
                      no_measure_witness, oscillation_probe)
from .independence import IndependenceReport, set_family_defect, sequence_independence_defect
from .distributions import (ARCSINE, DiscreteLaw, RelCDF, arcsine_cdf, cdf_convolve,
                            cosine_sum_cdf, relative_average, relative_cdf, rho,
                            rho_convolve, stieltjes_mean)
from .arithmetic import (SieveTable, binary_digit, digit_clt_cdf, erdos_kac_cdf,
                         hardy_ramanujan_fraction, omega_range, prime_reciprocal_sum, s2)
from .equidistribution import (map_independent, qmc_integrate, star_discrepancy_1d,
                               weyl_sum)
from .lacunary import (GapSequence, WeightSequence, hadamard_check, kac_clt_cdf,
                       kac_sigma2, lindeberg_bernoulli, rademacher,
                       rademacher_series_probe, salem_zygmund_cdf, weight_condition_check)

__version__ = "0.1.0"
