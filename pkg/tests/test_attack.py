import itertools

import numpy as np
import pytest

from poqlab.attack import (attack_plan, best_score, best_score_oracle,
                           decode_error, exact_max_mean, experiment_e,
                           experiment_e_campaign, sampled_max_mean,
                           sampling_bound)
from poqlab.core import Rng, desk_params
from poqlab.provers import BlindProver, TrapdoorLeakProver


# --- decoding ----------------------------------------------------------------

def test_decode_error_degenerate_cases():
    assert decode_error(np.zeros((4, 3)), np.zeros(4)) == 0
    assert decode_error(np.zeros((4, 3)), np.ones(4)) == 4


def _decode_oracle(b_matrix, w):
    """Exhaustive reference without column stripping."""
    c, k = b_matrix.shape
    best = c + 1
    for bits in itertools.product((0, 1), repeat=k):
        z = np.array(bits)
        best = min(best, int((((b_matrix @ z) % 2) != w).sum()))
    return best


def test_decode_error_matches_unstripped_oracle():
    gen = np.random.default_rng(0)
    for _ in range(50):
        b = gen.integers(0, 2, size=(8, 3))
        w = gen.integers(0, 2, size=8)
        assert decode_error(b, w) == _decode_oracle(b, w)
    # argmin actually achieves the reported error
    b = gen.integers(0, 2, size=(10, 4))
    w = gen.integers(0, 2, size=10)
    err, z = decode_error(b, w, return_argmin=True)
    assert int((((b @ z) % 2) != w).sum()) == err


def test_best_score_single_pair():
    x = np.array([1, 0, 1], dtype=np.int64)
    y = np.array([1, 1, 1], dtype=np.int64)
    b = np.array([0, 0, 0], dtype=np.int64)
    assert best_score(x, [(y, b)]) == 1.0


def test_best_score_matches_direct_max_d1():
    x = np.array([1, 1], dtype=np.int64)
    pairs = [(np.array([yb, 1], dtype=np.int64),
              np.zeros(2, dtype=np.int64)) for yb in (0, 1)]
    assert best_score(x, pairs) == best_score_oracle(x, pairs)


def test_best_score_exhaustive_up_to_d3():
    gen = np.random.default_rng(1)
    for d in (1, 2, 3):
        ys = [np.append((idx >> np.arange(d)) & 1, 1).astype(np.int64)
              for idx in range(1 << d)]
        for xb in range(1 << (d + 1)):
            x = ((xb >> np.arange(d + 1)) & 1).astype(np.int64)
            pairs = [(y, gen.integers(0, 2, size=d + 1)) for y in ys]
            got = best_score(x, pairs)
            want = best_score_oracle(x, pairs)
            assert abs(got - want) < 1e-12
            # max dominates the all-zero answer
            zero_avg = np.mean([
                1 if int((x * (y + 2 * b)).sum()) % 4 in (0, 1) else -1
                for y, b in pairs])
            assert got >= zero_avg - 1e-12
            assert -1 <= got <= 1


def test_best_score_empty_pairs():
    with pytest.raises(ValueError):
        best_score(np.array([1, 1]), [])


# --- sampling bound ----------------------------------------------------------

def test_sampling_bound_worked_values():
    assert round(sampling_bound(400_000, 2.0 ** 40, base="2"), 5) == 0.01886
    assert sampling_bound(400_000, 2.0 ** 40, base="e") < \
        sampling_bound(400_000, 2.0 ** 40, base="2")


def test_sampling_bound_decreases_in_alpha():
    vals = [sampling_bound(a, 2.0 ** 10) for a in (10, 100, 1000, 10_000)]
    assert all(x > y for x, y in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        sampling_bound(0, 4)


def test_sampled_max_deviation_within_bound():
    # score table with 2^8 rows and 2^10 columns, natural-log bound
    gen = np.random.default_rng(2)
    table = gen.uniform(-1, 1, size=(256, 1024))
    lam = exact_max_mean(table)
    alpha = 64
    reps = 200
    estimates = [sampled_max_mean(table, alpha, gen) for _ in range(reps)]
    assert abs(np.mean(estimates) - lam) <= sampling_bound(alpha, 256, base="e")


# --- distinguishing experiments -------------------------------------------------

PARAMS6 = desk_params(d=6)


def test_blind_prover_has_no_advantage():
    report = experiment_e_campaign(BlindProver(PARAMS6), PARAMS6, 400,
                                   Rng(5), alpha=64)
    assert abs(report.advantage) <= 3 * report.stderr


def test_leak_prover_distinguishes():
    report = experiment_e_campaign(TrapdoorLeakProver(PARAMS6), PARAMS6, 400,
                                   Rng(6), alpha=64)
    assert report.mean_r_real == 1.0
    assert report.advantage >= 0.25


def test_full_enumeration_equals_exhaustive_alpha():
    params = desk_params(d=4)
    leak = TrapdoorLeakProver(params)
    for rep in range(30):
        full = experiment_e(leak, params, Rng(7), rep, alpha=None)
        sampled = experiment_e(leak, params, Rng(7), rep, alpha=1 << params.d)
        assert full.rho == sampled.rho
        assert full.r == sampled.r and full.hidden_bit == sampled.hidden_bit


# --- the plan ------------------------------------------------------------------

def test_attack_plan_reproduces_worked_example():
    plan = attack_plan(40, 0.05, 400_000)
    assert plan.classical_ceiling < 0.1127
    assert plan.ceiling_4dp == 0.1127
    assert abs(plan.threshold - 0.1627) < 1e-12  # recomputed sum
    assert plan.published is not None
    assert plan.published["threshold"] == 0.1617  # figure as printed
    assert round(plan.slack_base2, 5) == 0.01886
    assert plan.weight_cap == 30
    assert plan.weight_tail <= 0.0012
    assert 53.5 <= plan.decode_work_log2 <= 55.5


def test_attack_plan_other_inputs_have_no_published_reference():
    plan = attack_plan(12, 0.1, 1000)
    assert plan.published is None
    assert plan.classical_ceiling == 2 * (3 / 4) ** 3
