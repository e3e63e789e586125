"""Acceptance suite: one test per release criterion.

Each test prints `ACCEPTANCE PASS/FAIL: <criterion>`; run with `pytest -s`
to see the lines. All fixtures are synthetic or hand-written, so this
module runs standalone against the library and CLI.
"""

import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from subsel import (
    GainState,
    GreedyConfig,
    RandomConfig,
    ScoreTable,
    SimilarityMatrix,
    SubmodularSpec,
    TokenProbRecord,
    diversity_score,
    evaluate,
    greedy_maximize,
    objective_value,
    pmi_utility,
    random_select,
    utility_diversity_select,
)
from subsel.cli import main
from subsel.oracle import brute_force_optimum
from subsel.submodular import GRAPH_CUT, LOG_DETERMINANT, VARIANTS

from conftest import cosine_kernel, monotone_instance, random_scores, random_similarity

BOUND = 0.6321205588285577
TABLE_FIXTURE_ROWS = [
    (900, 0.41, 0.49, 0.42),
    (1000, 0.41, 0.46, 0.47),
    (1100, 0.40, 0.44, 0.40),
    (1300, 0.42, 0.45, 0.47),
    (1500, 0.43, 0.47, 0.46),
    (1700, 0.48, 0.43, 0.45),
    (1900, 0.44, 0.45, 0.50),
]


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"\nACCEPTANCE FAIL: {name}")
        raise
    print(f"\nACCEPTANCE PASS: {name}")


def test_approximation_guarantee():
    name = (
        "approximation guarantee: certify ratio >= 1 - 1/e - 1e-9 on >= 200 "
        "randomized instances per variant (n <= 12, k <= 4), under 2 minutes"
    )
    with criterion(name):
        start = time.monotonic()
        for variant in VARIANTS:
            for n, k, trials, seed in ((10, 3, 100, 101), (12, 4, 100, 202)):
                code = main(
                    [
                        "certify", "--variant", variant, "--n", str(n), "--k", str(k),
                        "--trials", str(trials), "--seed", str(seed),
                    ]
                )
                assert code == 0, f"{variant} failed the 1 - 1/e bound at n={n}, k={k}"
        elapsed = time.monotonic() - start
        assert elapsed < 120.0, f"certification took {elapsed:.1f}s"


def test_oracle_equivalence_on_modular_objective(capsys):
    name = "oracle equivalence: modular graph-cut greedy matches brute force (ratio 1 +- 1e-9, 50 instances)"
    with criterion(name):
        rng = np.random.default_rng(7)
        for _ in range(50):
            n = int(rng.integers(5, 12))
            k = int(rng.integers(1, 5))
            S = cosine_kernel(rng, n)
            spec = SubmodularSpec(GRAPH_CUT, S, cut_penalty=0.0)
            result = greedy_maximize(spec, GreedyConfig(budget=k))
            _, opt = brute_force_optimum(lambda ids: evaluate(spec, ids), n, k)
            assert abs(result.objective / opt - 1.0) <= 1e-9


def test_lazy_naive_identity():
    name = "lazy/naive identity: same sequences and gains (1e-9) on all five variants, 100 instances, n <= 50, k <= 10"
    with criterion(name):
        rng = np.random.default_rng(13)
        for variant in VARIANTS:
            for _ in range(20):
                n = int(rng.integers(10, 51))
                k = int(rng.integers(1, 11))
                spec = monotone_instance(rng, variant, n=n)
                naive = greedy_maximize(spec, GreedyConfig(budget=k, mode="naive"))
                lazy = greedy_maximize(spec, GreedyConfig(budget=k, mode="lazy"))
                assert naive.selected == lazy.selected, variant
                np.testing.assert_allclose(naive.gains, lazy.gains, atol=1e-9)


def test_incremental_state_coherence():
    name = "incremental-state coherence: gain/commit trajectories match from-scratch eval within 1e-8"
    with criterion(name):
        rng = np.random.default_rng(19)
        for variant in VARIANTS:
            for _ in range(5):
                n = 10
                # d > n keeps the raw cosine Gram full-rank for the determinant kernel
                S = cosine_kernel(rng, n, d=12, clip=(variant != LOG_DETERMINANT))
                ridge = 1e-6
                spec = SubmodularSpec(
                    variant=variant,
                    S=S,
                    target_ids=frozenset({0, 3}),
                    existing_ids=frozenset({1}),
                    eta=0.7,
                    nu=0.4,
                    cut_penalty=0.3,
                    ridge=ridge,
                )
                state = GainState(spec)
                chosen = []
                for v in rng.permutation(n):
                    v = int(v)
                    gain = state.gain(v)
                    expected = evaluate(spec, chosen + [v]) - evaluate(spec, chosen)
                    assert abs(gain - expected) <= 1e-8, variant
                    state.add(v)
                    chosen.append(v)
                    assert abs(state.value - evaluate(spec, chosen)) <= 1e-8, variant


def test_pmi_identity():
    name = "pairwise log-ratio identity: pmi equals summed per-token log ratios; zero when base == cond (1e-9)"
    with criterion(name):
        rng = np.random.default_rng(23)
        for _ in range(100):
            t = int(rng.integers(1, 12))
            base = rng.uniform(0.01, 1.0, size=t)
            cond = rng.uniform(0.01, 1.0, size=t)
            rec = TokenProbRecord(0, 1, base, cond)
            independent = sum(math.log(c) - math.log(b) for b, c in zip(base, cond))
            assert abs(pmi_utility(rec) - independent) <= 1e-9
            same = TokenProbRecord(0, 1, base, base)
            assert abs(pmi_utility(same)) <= 1e-9


def test_dispersion_doubling_and_lambda_affinity():
    name = "dispersion doubling identity and objective lambda-affinity hold within 1e-9"
    with criterion(name):
        rng = np.random.default_rng(29)
        for _ in range(50):
            n = int(rng.integers(2, 10))
            S = random_similarity(rng, n)
            size = int(rng.integers(2, n + 1))
            ids = [int(i) for i in rng.choice(n, size=size, replace=False)]
            unordered = sum(1.0 - S.values[a, b] for x, a in enumerate(ids) for b in ids[x + 1 :])
            assert abs(diversity_score(S, ids) - 2.0 * unordered) <= 1e-9
            table = random_scores(rng, n)
            at_zero = objective_value(table, S, ids, 0.0)
            at_one = objective_value(table, S, ids, 1.0)
            at_half = objective_value(table, S, ids, 0.5)
            assert abs(at_zero + at_one - 2.0 * at_half) <= 1e-9


def test_hand_instances():
    name = "hand instances: balanced loop selects [0, 2]; facility-location selects [0, 2] with gains (2.0, 0.9)"
    with criterion(name):
        utilities = np.array([0.9, 0.8, 0.1])
        S_bal = SimilarityMatrix(np.array([[1.0, 0.99, 0.0], [0.99, 1.0, 0.0], [0.0, 0.0, 1.0]]))
        balanced = utility_diversity_select(utilities, S_bal, GreedyConfig(budget=2, lam=0.5))
        assert balanced.selected == (0, 2)
        S_fl = SimilarityMatrix(np.array([[1.0, 0.9, 0.1], [0.9, 1.0, 0.1], [0.1, 0.1, 1.0]]))
        fl = greedy_maximize(SubmodularSpec("facility-location", S_fl), GreedyConfig(budget=2))
        assert fl.selected == (0, 2)
        assert abs(fl.gains[0] - 2.0) <= 1e-9 and abs(fl.gains[1] - 0.9) <= 1e-9


def test_determinism(tmp_path):
    name = "determinism: byte-identical selection files across reruns; budget-1 frequencies within 3 sigma"
    with criterion(name):
        sim_path = tmp_path / "sim.txt"
        sim_path.write_text("SIM 3\n1 0.9 0.1\n1 0.1\n1\n")
        for method_args in (
            ["--method", "random", "--n", "30", "--seed", "5"],
            ["--method", "submodular", "--similarity", str(sim_path)],
            ["--method", "dpp", "--similarity", str(sim_path)],
        ):
            out_a, out_b = tmp_path / "a.txt", tmp_path / "b.txt"
            base = ["select", "--budget", "2"] + method_args
            assert main(base + ["--out", str(out_a)]) == 0
            assert main(base + ["--out", str(out_b)]) == 0
            assert out_a.read_bytes() == out_b.read_bytes()
        draws = 10_000
        counts = np.zeros(4, dtype=int)
        for seed in range(draws):
            counts[random_select(4, RandomConfig(seed=seed, budget=1)).selected[0]] += 1
        sigma = math.sqrt(draws * 0.25 * 0.75)
        assert np.all(np.abs(counts - draws / 4) <= 3 * sigma), counts


def test_table_fixture_round_trip(tmp_path, capsys):
    name = "comparison-table fixture: report reproduces every cell at 2-decimal precision"
    with criterion(name):
        lines = [f"RESULTS {3 * len(TABLE_FIXTURE_ROWS)}"]
        for budget, rnd, dpp, ours in TABLE_FIXTURE_ROWS:
            lines.append(f"random {budget} accuracy {rnd}")
            lines.append(f"dpp {budget} accuracy {dpp}")
            lines.append(f"ours {budget} accuracy {ours}")
        results = tmp_path / "results.txt"
        results.write_text("\n".join(lines) + "\n")
        assert main(["report", "--results", str(results)]) == 0
        table = capsys.readouterr().out
        rows = {line.split()[0]: line.split()[1:] for line in table.strip().splitlines()}
        assert rows["subset_size"] == ["random", "dpp", "ours"]
        for budget, rnd, dpp, ours in TABLE_FIXTURE_ROWS:
            assert rows[str(budget)] == [f"{rnd:.2f}", f"{dpp:.2f}", f"{ours:.2f}"]
