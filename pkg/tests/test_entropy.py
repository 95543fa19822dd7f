import json
import math
from math import comb

import numpy as np
import pytest
from scipy.special import zeta

from opentropy import (
    BudgetExceededError,
    DenseMatrix,
    Measure,
    OperatorSpec,
    Partition,
    ValidationError,
    b_map,
    entropy_rate,
    enumerate_path_weights,
    exact_entropy,
    exact_entropy_sb,
    h1_partition_entropy,
    invariance_suite,
    is_zero_entropy,
    partition_entropy,
    path_weights,
    truncate,
    truncation_entropy_series,
)
from opentropy.generators import (
    block_uniform_weights,
    measure_preserving_permutation,
    random_contraction,
    random_doubly_stochastic,
    random_partition,
    random_refinement,
    random_unitary,
    random_weights,
)

GEO = Measure.geometric(0.5)
LOG2 = math.log(2)


def _D(J, mu=GEO):
    return truncate(OperatorSpec("two_band_D", {}, mu), J)


# -- path weights ------------------------------------------------------------


def test_path_weights_diagonal():
    mu = np.array([0.2, 0.3, 0.5])
    d = np.array([0.9, 0.5j, -1])
    U = DenseMatrix(np.diag(d), mu)
    for n in (1, 2, 4):
        table = path_weights(U, None, n).as_dict()
        assert set(table) == {(j,) * (n + 1) for j in range(3)}
        for j in range(3):
            assert table[(j,) * (n + 1)] == pytest.approx(abs(d[j]) ** (2 * n) * mu[j])


def test_path_weights_koopman():
    mu = Measure.uniform(5)
    F = [1, 2, 3, 4, 0]
    Finv = np.argsort(F)
    U = truncate(OperatorSpec.koopman(F, mu), 5)
    n = 4
    table = path_weights(U, None, n).as_dict()
    assert len(table) == 5
    for s0 in range(5):
        path = [s0]
        for _ in range(n):
            path.append(int(Finv[path[-1]]))
        assert table[tuple(path)] == pytest.approx(0.2)


def test_path_weights_two_band_counts():
    # every surviving path carries (1/2)^n mu_{sigma(0)}; indices only move
    # down, so starts below n lose the paths that would leave {0, 1, ...}
    J, n = 12, 5
    U = _D(J)
    table = path_weights(U, None, n)
    mu = U.mu
    for s0 in range(J):
        ws = [w for p, w in table.as_dict().items() if p[0] == s0]
        assert len(ws) == sum(comb(n, i) for i in range(min(s0, n) + 1))
        assert np.allclose(ws, 0.5**n * mu[s0], rtol=1e-12)


def test_path_weights_lexicographic_and_mass(rng):
    mu = random_weights(4, rng)
    U = random_unitary(4, mu, rng)
    t = path_weights(U, [[0, 1], [2], [3]], 3)
    keys = [tuple(p) for p in t.paths]
    assert keys == sorted(keys)
    assert t.total_mass == pytest.approx(1.0, abs=1e-12)
    W = random_contraction(4, mu, rng)
    assert path_weights(W, [[0, 1], [2], [3]], 3).total_mass <= 1 + 1e-9


def test_path_weights_budget():
    U = DenseMatrix(np.full((4, 4), 0.25), np.full(4, 0.25))
    with pytest.raises(BudgetExceededError):
        path_weights(U, None, 6, budget=1000)
    with pytest.raises(BudgetExceededError):
        enumerate_path_weights(U, None, 6)
    with pytest.raises(ValidationError):
        path_weights(U, None, 0)


def test_dp_matches_literal_enumeration(rng):
    for _ in range(25):
        J = int(rng.integers(1, 5))
        chi = random_partition(J, rng)
        n = int(rng.integers(1, 4))
        mu = random_weights(J, rng)
        U = random_contraction(J, mu, rng, sparsity=0.4)
        dp = path_weights(U, chi, n).as_dict()
        lit = enumerate_path_weights(U, chi, n)
        assert set(dp) == set(lit)
        assert max((abs(dp[k] - lit[k]) for k in dp), default=0.0) < 1e-12


def test_sb_input_needs_weights():
    with pytest.raises(ValidationError):
        path_weights(np.eye(2), None, 1)
    t = path_weights(np.eye(2), None, 1, mu=[0.5, 0.5])
    assert t.total_mass == pytest.approx(1.0)


# -- partition entropies -------------------------------------------------------


def _two_band_oracle(mu, n):
    total = 0.0
    for j0, m in enumerate(mu):
        w = 0.5**n * m
        count = sum(comb(n, i) for i in range(min(j0, n) + 1))
        total -= count * w * math.log(w)
    return total


@pytest.mark.parametrize("n", [1, 2, 5, 8])
def test_two_band_partition_entropy_matches_boundary_oracle(n):
    U = _D(40)
    assert partition_entropy(U, None, n) == pytest.approx(_two_band_oracle(U.mu, n), abs=1e-12)


def test_two_band_partition_entropy_misses_unbounded_count():
    # n log 2 + S(mu) would need 2^n paths from every start
    U = _D(40)
    S = GEO.entropy(40)
    assert partition_entropy(U, None, 1) < LOG2 + S - 0.1
    rate = entropy_rate(U, None, 12)
    assert rate.value < 0


def test_diagonal_unitary_entropy_constant():
    mu = np.array([0.1, 0.2, 0.3, 0.4])
    U = DenseMatrix(np.diag(np.exp(1j * np.arange(4))), mu)
    vals = [partition_entropy(U, None, n) for n in range(1, 6)]
    assert np.allclose(vals, -np.sum(mu * np.log(mu)))
    assert entropy_rate(U, None, 6).value == pytest.approx(0.0, abs=1e-12)


def test_refinement_monotone(rng):
    for _ in range(30):
        J = int(rng.integers(1, 6))
        mu = random_weights(J, rng)
        U = random_contraction(J, mu, rng)
        chi = random_partition(J, rng, 3)
        kappa = random_refinement(chi, rng)
        for n in range(1, 4):
            assert partition_entropy(U, chi, n) <= partition_entropy(U, kappa, n) + 1e-9


def test_path_mass_decomposition(rng):
    # merging two blocks of kappa gives chi; merged path weights add up
    mu = random_weights(5, rng)
    U = random_contraction(5, mu, rng)
    kappa = Partition([[0], [1, 2], [3], [4]])
    chi = Partition([[0, 3], [1, 2], [4]])
    lab = {0: 0, 1: 1, 2: 0, 3: 2}  # kappa block -> chi block
    n = 3
    fine = path_weights(U, kappa, n).as_dict()
    coarse = path_weights(U, chi, n).as_dict()
    merged = {}
    for p, w in fine.items():
        key = tuple(lab[s] for s in p)
        merged[key] = merged.get(key, 0.0) + w
    assert set(merged) == set(coarse)
    for k in coarse:
        assert merged[k] == pytest.approx(coarse[k], abs=1e-10)


def test_h1_agrees_at_n_equal_one(rng):
    for _ in range(10):
        J = int(rng.integers(1, 6))
        mu = random_weights(J, rng)
        U = random_contraction(J, mu, rng)
        chi = random_partition(J, rng)
        assert h1_partition_entropy(U, chi, 1) == pytest.approx(partition_entropy(U, chi, 1), abs=1e-14)


def test_h1_koopman_agrees(rng):
    mu = Measure.explicit([0.1, 0.15, 0.15, 0.15, 0.15, 0.3])
    U = truncate(OperatorSpec.koopman([0, 2, 3, 4, 1, 5], mu), 6)
    for _ in range(5):
        chi = random_partition(6, rng, 3)
        for n in (1, 2, 4):
            assert h1_partition_entropy(U, chi, n) == pytest.approx(partition_entropy(U, chi, n), abs=1e-12)


def test_h1_diagonal_unitary_rate_zero():
    mu = np.array([0.25, 0.25, 0.5])
    U = DenseMatrix(np.diag(np.exp(1j * np.array([0.3, 1.0, 2.0]))), mu)
    vals = [h1_partition_entropy(U, [[0, 1], [2]], n) for n in range(1, 5)]
    assert np.allclose(vals, vals[0])


def test_h1_budget():
    U = DenseMatrix(np.full((3, 3), 1 / 3), np.full(3, 1 / 3))
    with pytest.raises(BudgetExceededError):
        h1_partition_entropy(U, None, 5, budget=100)


# -- closed form ---------------------------------------------------------------


def test_exact_permutation_zero(rng):
    for J in (1, 3, 6):
        B = np.eye(J)[rng.permutation(J)]
        assert exact_entropy_sb(B, random_weights(J, rng)).value == 0.0
    mu = Measure.uniform(4)
    U = truncate(OperatorSpec.koopman([1, 2, 3, 0], mu), 4)
    assert exact_entropy(U).value == 0.0


@pytest.mark.parametrize("n", [2, 3, 5, 7])
def test_exact_uniform_block(n, rng):
    assert exact_entropy_sb(np.full((n, n), 1 / n), random_weights(n, rng)).value == pytest.approx(
        math.log(n), abs=1e-10
    )


def test_exact_two_band_zero():
    for J in (1, 2, 7, 40):
        assert exact_entropy(_D(J)).value == 0.0


def test_exact_sb_trivial():
    mu = np.full(3, 1 / 3)
    assert exact_entropy_sb(np.zeros((3, 3)), mu).value == 0.0
    assert exact_entropy_sb(np.eye(3), mu).value == 0.0


def test_exact_block_operator():
    w = np.arange(1, 8, dtype=float)
    w /= w.sum()
    spec = OperatorSpec.block_balpha(sizes=[1, 2, 4], measure=Measure.explicit(w))
    W = truncate(spec, 7)
    expected = math.log(2) * w[1:3].sum() + math.log(4) * w[3:].sum()
    assert exact_entropy_sb(W.entries.real, W.mu).value == pytest.approx(expected, abs=1e-12)


def test_exact_matches_empirical_rate(rng):
    # for doubly stochastic B and uniform mu, h(n + 1) - h(n) approaches the closed form
    for _ in range(5):
        J = int(rng.integers(2, 5))
        B = random_doubly_stochastic(J, rng, terms=3)
        mu = np.full(J, 1 / J)
        exact = exact_entropy_sb(B, mu).value
        n = {2: 14, 3: 9, 4: 7}[J]
        h = [partition_entropy(B, None, k, mu=mu) for k in (n, n + 1)]
        assert abs((h[1] - h[0]) - exact) < 1e-3


def test_exact_entropy_contraction_flag():
    assert exact_entropy(_D(5)).diagnostics["contraction"] is False


def test_invariant_under_diagonal_phases(rng):
    mu = random_weights(5, rng)
    U = random_unitary(5, mu, rng)
    d1 = np.exp(2j * np.pi * rng.random(5))
    d2 = np.exp(2j * np.pi * rng.random(5))
    V = U.with_entries(np.diag(d1) @ U.entries @ np.diag(d2))
    assert np.allclose(b_map(V).entries, b_map(U).entries, atol=1e-12)
    assert exact_entropy(V).value == pytest.approx(exact_entropy(U).value, abs=1e-9)


# -- truncation series ---------------------------------------------------------


def test_series_diagonal_zero():
    spec = OperatorSpec.diagonal(0.8 ** np.arange(20), GEO)
    rep = truncation_entropy_series(spec, Jmax=20)
    assert all(v == 0.0 for _, v in rep.trace)
    assert rep.value == 0.0 and rep.diagnostics["monotone"]


def test_series_two_band_zero():
    rep = truncation_entropy_series(OperatorSpec("two_band_D", {}, GEO), Jmax=64)
    assert len(rep.trace) == 64
    assert all(v == 0.0 for _, v in rep.trace)
    assert not rep.diagnostics["divergent"]


@pytest.mark.parametrize("variant", ["proof", "literal"])
def test_series_block_condit1_diverges(variant):
    mu = Measure.condit1(variant)
    rep = truncation_entropy_series(OperatorSpec.block_balpha(rule="pow2", measure=mu), kmax=64)
    vals = np.array([v for _, v in rep.trace])
    assert rep.diagnostics["divergent"]
    assert rep.diagnostics["monotone"]
    assert [J for J, _ in rep.trace][:3] == [2, 6, 14]
    masses = np.array([mu.block_mass(m) for m in range(1, 65)])
    assert np.allclose(vals, np.cumsum(masses * np.arange(1, 65) * LOG2), atol=1e-10)
    if variant == "proof":
        C = 1 / zeta(1.5)
        assert np.allclose(vals, C * LOG2 * np.cumsum(np.arange(1, 65) ** -0.5), atol=1e-8)


def test_series_block_closed_form_matches_materialized():
    # the closed form for large blocks agrees with materializing them
    mu = Measure.condit1()
    spec = OperatorSpec.block_balpha(rule="pow2", measure=mu)
    big = truncation_entropy_series(spec, kmax=7, block_cap=256)
    small = truncation_entropy_series(spec, kmax=7, block_cap=1)
    assert small.diagnostics["closed_form_blocks"] == 7
    assert np.allclose([v for _, v in big.trace], [v for _, v in small.trace], atol=1e-12)
    dense = exact_entropy_sb(*[truncate(spec, 254).entries.real, mu.weights(254)]).value
    assert dense == pytest.approx(big.trace[-1][1], abs=1e-10)


def test_series_flat_is_not_divergent():
    rep = truncation_entropy_series(OperatorSpec.block_balpha(rule="constant", n=2, measure=GEO), Jmax=40)
    assert not rep.diagnostics["divergent"]
    assert rep.value == pytest.approx(LOG2 * (1 - 0.5**40), abs=1e-10)


def test_series_errors():
    with pytest.raises(ValidationError):
        truncation_entropy_series(OperatorSpec("two_band_D", {}, GEO), kmax=3)
    with pytest.raises(ValidationError):
        truncation_entropy_series(OperatorSpec("two_band_D", {}, GEO))


# -- rates -----------------------------------------------------------------------


def test_rate_koopman_zero():
    mu = Measure.uniform(6)
    U = truncate(OperatorSpec.koopman([1, 2, 3, 4, 5, 0], mu), 6)
    rep = entropy_rate(U, None, 8)
    assert rep.value == pytest.approx(0.0, abs=1e-12)
    assert all(v == pytest.approx(math.log(6)) for _, v in rep.trace)


@pytest.mark.parametrize("n", [2, 3])
def test_rate_uniform_block(n):
    B = np.full((n, n), 1 / n)
    mu = np.full(n, 1 / n)
    rep = entropy_rate(B, None, 8, mu=mu)
    assert rep.value == pytest.approx(exact_entropy_sb(B, mu).value, abs=1e-10)
    assert rep.diagnostics["linear"]


def test_rate_from_spec():
    spec = OperatorSpec.block_balpha(rule="constant", n=2, measure=GEO)
    rep = entropy_rate(spec, None, 6, J=8)
    assert rep.value == pytest.approx(LOG2 * GEO.prefix_mass(8), abs=1e-10)
    with pytest.raises(ValidationError):
        entropy_rate(spec, None, 6)


# -- zero entropy ---------------------------------------------------------------


def test_zero_entropy_examples():
    assert is_zero_entropy(np.eye(4)[[3, 0, 1, 2]])
    res = is_zero_entropy(np.full((2, 2), 0.5))
    assert not res and res.witness == (0, 0)
    B = b_map(_D(6), require_contraction=False)
    res = is_zero_entropy(B)
    assert res and res.dead_rows == tuple(range(6)) and res.dead_cols == tuple(range(6))


def test_zero_entropy_includes_boundary_indices():
    # dead first and last indices; a permutation lives in the middle
    B = np.zeros((4, 4))
    B[1, 2] = B[2, 1] = 1.0
    B[0, 0] = 0.3
    B[3, 3] = 0.6
    res = is_zero_entropy(B)
    assert res and set(res.dead_rows) == {0, 3}
    assert exact_entropy_sb(B, np.full(4, 0.25)).value == 0.0


# -- invariance suite -----------------------------------------------------------


def test_invariance_suite_trivial(rng):
    mu = np.full(3, 1 / 3)
    U = random_unitary(3, mu, rng)
    rep = invariance_suite(U, np.ones(3), np.ones(3), [0, 1, 2])
    assert rep["ok"] and rep["diagonal_gap"] == 0 and rep["conjugation_gap"] == 0


def test_invariance_suite_random(rng):
    for _ in range(20):
        J = int(rng.integers(2, 7))
        mu, labels = block_uniform_weights(J, rng)
        U = random_unitary(J, mu, rng)
        F = measure_preserving_permutation(labels, rng)
        rep = invariance_suite(U, np.exp(1j * rng.random(J)), np.exp(1j * rng.random(J)), F)
        assert rep["ok"], rep


def test_invariance_suite_cyclic_shift(rng):
    mu = np.full(4, 0.25)
    U = random_unitary(4, mu, rng)
    assert invariance_suite(U, np.ones(4), np.ones(4), [1, 2, 3, 0])["ok"]


def test_invariance_suite_rejects():
    U = DenseMatrix(np.eye(2), [0.4, 0.6])
    with pytest.raises(ValidationError):
        invariance_suite(U, [2, 1], [1, 1], [0, 1])
    with pytest.raises(ValidationError):
        invariance_suite(U, [1, 1], [1, 1], [1, 0])


def test_report_json():
    rep = truncation_entropy_series(OperatorSpec.block_balpha(rule="pow2", measure=Measure.condit1()), kmax=3)
    doc = json.loads(rep.to_json())
    assert set(doc) == {"value", "method", "trace", "diagnostics"}
    assert doc["method"] == "truncation-limit"
    assert doc["trace"][0][0] == 2
