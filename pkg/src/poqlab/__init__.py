"""Desk-scale laboratory for a hidden-state proof-of-quantumness protocol.

Subpackage map:
  core      modular arithmetic, parameter derivation, labeled random streams
  fourier   functions on Z_m^n, transform, uniformity/linearity coefficients
  games     parity games, parity-balanced sets, the claw game and its bias
  lattice   discrete Gaussians, gadget trapdoors, encrypt/decrypt
  quantum   statevector simulator and the honest prover
  provers   the classical prover model and built-in test provers
  protocol  the encrypted game, share-the-prover experiments, transcripts
  attack    optimal-answer decoding and the distinguishing experiments
  cli       the poqlab command-line tool
"""

from .core import Params, Rng, derive_params, desk_params, find_prime
from .fourier import (Group, GroupFunction, SubsetOfGroup, convolve, dft,
                      donoho_stark_check, eta_set, linearity_eta,
                      uncertainty_bound_check, uncertainty_product,
                      uniformity_nu)
from .games import (DeterministicStrategy, ParityBalancedSet,
                    TimeOrderedStrategy, ghz4_closed_form, ghz_score,
                    ghz_value_bruteforce, j_bias_bruteforce,
                    j_bias_fourier_identity, j_sample_inputs, j_score,
                    max_eta_parity_balanced, parity_set_from_strategy,
                    reduce_ghz4_to_ghz3, strategy_from_parity_set)
from .lattice import (GaussianSampler, decrypt, encrypt, fake_encrypt,
                      gen_trap, invert, lwe_oracle, sample_gaussian)
from .protocol import (GameResult, ScoreStats, Transcript, experiment_s1,
                       experiment_s2, experiment_s3, run_experiment_s,
                       run_game_j, run_game_r)
from .provers import BlindProver, ClassicalProver, TrapdoorLeakProver
from .quantum import (ClawDescription, StateVector, apply_zc,
                      build_claw_state, honest_first_round, honest_j_sample,
                      honest_second_round, measure)
from .attack import (attack_plan, best_score, decode_error, experiment_e,
                     experiment_e_campaign, sampling_bound)

__all__ = [name for name in dir() if not name.startswith("_")]
