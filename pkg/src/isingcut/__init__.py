"""MAX-CUT to critical dense Ising reduction toolkit.

Construct cloud-gadget Ising instances whose interaction matrix sits in the
critical spectral window, evaluate their partition functions exactly by
independent routes, compute reduction certificates (T1, T2) with a gap
decision procedure, analyze the spectrum structurally, and probe critical
scaling with Glauber dynamics.
"""

from .graphs import (Graph, GraphParseError, MalformedLineError, LoopEdgeError,
                     DuplicateEdgeError, VertexRangeError, parse_graph,
                     graph_to_text, from_edges, complete_graph, cycle_graph,
                     complete_bipartite, random_regular, cut_size,
                     max_cut_exact, signs_to_string, signs_from_string)
from .gadget import (GadgetParams, IsingInstance, beta_from_bhat,
                     gamma_from_uhat, schedule_params, lab_params,
                     snap_bhat_integer, build_instance, materialize_dense)
from .partition import (brute_force_logZ, contribution, magnetization_logZ,
                        orthant_logZ, num_bias_vectors, cloud_biases,
                        log_binomial_table)
from .landscape import (entropy, g_mono, q_profile, q_derivative,
                        q_maximizer_scan, QScan, phi, phi_gradient,
                        neighbor_sums, maximize_phi_orthant, OrthantMax,
                        binomial_entropy_gap, qb_expansion_check)
from .spectral import (jacobi_eigenvalues, structured_spectrum, SpectrumReport,
                       dense_spectral_diameter, diameter_bound_check,
                       DiameterCheck, psd_shift)
from .reduction import (compute_T1, compute_T2, ReductionCertificate,
                        build_certificate, decide_gap, Decision, verify_small,
                        SmallVerifyReport)
from .dynamics import (CurieWeiss, Trajectory, glauber_run,
                       magnetization_exponent, ExponentFit, phase_occupancy,
                       PhaseOccupancy, autocorrelation_time, default_burn_in)

__version__ = "0.1.0"
