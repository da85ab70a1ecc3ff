"""slabres: scattering, guided modes and transmission anomalies of 2D periodic slabs."""

__version__ = "0.1.0"

from .anomaly import (DegenerateModel, FullBackgroundModel, GenericAnomalyModel,
                      figure_data, make_degenerate_model, make_full_background_model,
                      make_generic_model, model_eval, model_from_json,
                      model_to_json, model_transmittance, validate_model, zero_curves)
from .assembly import (Assembler, DiscreteSystem, Mesh, assemble_forms,
                       assemble_source, build_mesh, pencil_matrices)
from .errors import (ConfigError, ConvergenceError, DiscontinuityError,
                     GrazingOrderError, ModelConstraintError, OutsideDiamondError,
                     SingularSolveError, SlabresError)
from .fitter import (AnomalyFit, ExtremalCurve, ExtremalPoint, anomaly_report,
                     fit_anomaly, locate_extrema, trace_extremal_curve)
from .harmonics import (DiamondPoint, HarmonicExponent, dtn_apply, eta,
                        eta_derivatives, in_diamond)
from .modes import (DispersionTrace, EigenPoint, dispersion_coefficients,
                    find_guided_modes, smallest_eigenpair, trace_dispersion)
from .scatter import (ScatteringSolution, SweepTable, TransmittanceMap,
                      format_sweep_csv, reduced_smatrix, solve_scattering,
                      transmittance_sweep)
from .structure import (Disk, Inclusion, Medium, Rectangle, SlabStructure,
                        check_symmetries, load_config, material_at, sample_materials)

__all__ = [name for name in dir() if not name.startswith("_")]
