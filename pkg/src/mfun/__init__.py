"""Value-distribution toolkit for L-functions of modular forms.

Coefficient algebra for exp((iz/2) log L) and exp((iz/2) L'/L),
characteristic-function series with Euler products, Fourier inversion to
value-distribution densities, and averaging experiments over character
twists and form families.
"""

from .characters import CharacterGroup, build_group, chi_eval
from .coeffs import (CoeffCase, CoeffContext, SquareDecomposition, c_coeff,
                     c_coeff_n, frak_h, gen_coeff, j_set, l_coeff,
                     l_coeff_oracle, square_parts)
from .density import (ComplexGrid, Constant, DiskIndicator, Gaussian,
                      GridMeaning, GridParams, QuasiCharacter,
                      integrate_against, invert_to_density, load_grid,
                      local_decay_report, mtilde_grid, mtilde_local_quad,
                      save_grid)
from .errors import (CutoffError, FormatError, GuardError, MfunError,
                     PrecisionWarning, RegimeError)
from .forms import ModularForm, SatakePair, build_builtin, eta, load_form, satake
from .harness import (ComparisonRecord, FormFamily, avg_forms, avg_twists,
                      equidist_test, load_family, petersson_check)
from .lfun import EvalParams, conductor_bound, frak_L, g_eval, g_plus
from .mtilde import (MtildeParams, mtilde_euler, mtilde_harmonic, mtilde_local,
                     mtilde_series, mtilde_series_smooth, mtilde_sigma)

__version__ = "0.1.0"
