import numpy as np
import pytest

from opentropy import (
    DenseMatrix,
    Measure,
    OperatorSpec,
    Partition,
    ValidationError,
    WeightedVector,
    compose,
    koopman_product_norm_sq,
    mu_norm_sq,
    norm_l2mu,
    partition_functional,
    sandwiched_norm_sq,
    truncate,
)
from opentropy.generators import random_partition, random_refinement, random_unitary, random_weights
from opentropy.mu_norm import koopman_product_matrix

MU3 = Measure.explicit([0.5, 0.25, 0.25])


def test_diagonal_mu_norm(rng):
    mu = random_weights(6, rng)
    g = rng.normal(size=6) + 1j * rng.normal(size=6)
    assert mu_norm_sq(DenseMatrix(np.diag(g), mu)) == pytest.approx(np.sum(mu * np.abs(g) ** 2), abs=1e-14)


def test_indicator_mu_norm():
    W = truncate(OperatorSpec.indicator([0, 2], MU3), 3)
    assert mu_norm_sq(W) == pytest.approx(0.75, abs=1e-15)


def _finest_functional_by_vectors(W):
    """sum_j mu_j ||W delta_j||^2 / ||delta_j||^2 straight from weighted vector norms."""
    total = 0.0
    for j in range(W.J):
        e = np.zeros(W.J)
        e[j] = 1.0
        x = WeightedVector(e, W.mu)
        y = WeightedVector(W.entries @ e, W.mu)
        total += W.mu[j] * (norm_l2mu(y) / norm_l2mu(x)) ** 2
    return total


def test_truncated_shifts():
    # T_r sends delta_j to delta_{j+1}: sum_j mu_j * mu_{j+1} / mu_j = 1 - mu_0 in the limit.
    # T_l sends delta_{j+1} to delta_j: sum_j mu_{j+1} * mu_j / mu_{j+1} = 1 in the limit.
    Tl = truncate(OperatorSpec("shift_left", {}, MU3), 3)
    Tr = truncate(OperatorSpec("shift_right", {}, MU3), 3)
    assert mu_norm_sq(Tl) == pytest.approx(0.75, abs=1e-15)
    assert mu_norm_sq(Tr) == pytest.approx(0.5, abs=1e-15)
    assert _finest_functional_by_vectors(Tl) == pytest.approx(0.75, abs=1e-15)
    assert _finest_functional_by_vectors(Tr) == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("J", [3, 5, 10, 30])
def test_shift_limits_geometric(J):
    mu = Measure.geometric(0.5)
    w = mu.weights(J)
    Tl = truncate(OperatorSpec("shift_left", {}, mu), J)
    Tr = truncate(OperatorSpec("shift_right", {}, mu), J)
    assert mu_norm_sq(Tl) == pytest.approx(np.sum(w[: J - 1]), abs=1e-15)
    assert mu_norm_sq(Tr) == pytest.approx(np.sum(w[1:]), abs=1e-15)
    assert mu.prefix_mass(J - 1) <= mu_norm_sq(Tl) + 1e-15 <= 1 + 1e-15
    # tails vanish: T_l -> 1, T_r -> 1 - mu_0
    assert abs(mu_norm_sq(Tl) - 1) <= 2 * 0.5 ** (J - 1)
    assert abs(mu_norm_sq(Tr) - (1 - w[0])) <= 0.5**J


def test_partition_functional_examples(rng):
    mu = random_weights(5, rng)
    W = DenseMatrix(rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5)), mu)
    assert partition_functional(W, Partition.finest(5)) == pytest.approx(mu_norm_sq(W), abs=1e-10)
    U = random_unitary(5, mu, rng)
    assert partition_functional(U, Partition.whole(5)) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValidationError):
        partition_functional(W, Partition.finest(4))
    with pytest.raises(ValidationError):
        partition_functional(W, [[0, 1], [1, 2, 3, 4]])


def test_partition_functional_refinement_chain(rng):
    for _ in range(30):
        J = int(rng.integers(1, 9))
        mu = random_weights(J, rng)
        W = DenseMatrix(rng.normal(size=(J, J)), mu)
        chi = Partition.whole(J)
        prev = partition_functional(W, chi)
        for _ in range(4):
            chi = random_refinement(chi, rng)
            cur = partition_functional(W, chi)
            assert cur <= prev + 1e-12
            assert cur >= mu_norm_sq(W) - 1e-12
            prev = cur


def test_sandwiched_examples(rng):
    mu = random_weights(4, rng)
    W = DenseMatrix(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)), mu)
    ones = np.ones(4)
    assert sandwiched_norm_sq(ones, W, ones) == pytest.approx(mu_norm_sq(W), abs=1e-12)
    g = rng.normal(size=4)
    I = W.with_entries(np.eye(4))
    assert sandwiched_norm_sq(g, I, g) == pytest.approx(np.sum(mu * g**4), abs=1e-12)
    g1 = rng.normal(size=4) + 1j * rng.normal(size=4)
    g2 = rng.normal(size=4)
    explicit = compose([W.with_entries(np.diag(g1)), W, W.with_entries(np.diag(g2))])
    assert sandwiched_norm_sq(g1, W, g2) == pytest.approx(mu_norm_sq(explicit), abs=1e-12)
    with pytest.raises(ValidationError):
        sandwiched_norm_sq(ones[:3], W, ones)


def test_two_sided_additivity(rng):
    for _ in range(20):
        J = int(rng.integers(1, 10))
        mu = random_weights(J, rng)
        W = DenseMatrix(rng.normal(size=(J, J)), mu)
        chi, kappa = random_partition(J, rng), random_partition(J, rng)
        total = sum(
            sandwiched_norm_sq(X.astype(float), W, Y.astype(float)) for X in chi.masks() for Y in kappa.masks()
        )
        assert total == pytest.approx(mu_norm_sq(W), abs=1e-10)


def test_koopman_product_examples(rng):
    mu = np.array([0.1, 0.3, 0.3, 0.3])
    F = [0, 2, 3, 1]
    assert koopman_product_norm_sq(F, [np.ones(4)], mu) == pytest.approx(1.0)
    # singletons along the orbit 1 -> 2 -> 3
    gs = [np.eye(4)[1], np.eye(4)[2], np.eye(4)[3]]
    assert koopman_product_norm_sq(F, gs, mu) == pytest.approx(mu[3])
    gs = [rng.normal(size=4) for _ in range(3)]
    ident = koopman_product_norm_sq([0, 1, 2, 3], gs, mu)
    assert ident == pytest.approx(np.sum(np.prod([g**2 for g in gs], axis=0) * mu))


def test_koopman_product_matches_explicit(rng):
    mu = np.array([0.2, 0.2, 0.2, 0.1, 0.3])
    F = [1, 2, 0, 3, 4]
    for n in range(1, 5):
        gs = [rng.normal(size=5) + 1j * rng.normal(size=5) for _ in range(n + 1)]
        explicit = mu_norm_sq(koopman_product_matrix(F, gs, mu))
        assert koopman_product_norm_sq(F, gs, mu) == pytest.approx(explicit, abs=1e-12)


def test_koopman_product_rejects_bad_permutation():
    with pytest.raises(ValidationError):
        koopman_product_norm_sq([1, 0], [np.ones(2)], [0.4, 0.6])
    with pytest.raises(ValidationError):
        koopman_product_norm_sq([1, 1], [np.ones(2)], [0.5, 0.5])


def test_partition_structure():
    p = Partition([[2, 0], [1]])
    assert p.blocks == ((0, 2), (1,))
    assert p.J == 3 and len(p) == 2
    assert list(p.labels()) == [0, 1, 0]
    assert Partition.finest(3).refines(p)
    assert not p.refines(Partition.finest(3))
    assert Partition.from_labels([1, 0, 1]).to_list() == [[1], [0, 2]]
    for bad in ([[0], [0, 1]], [[0], []], [[1, 2]]):
        with pytest.raises(ValidationError):
            Partition(bad)
