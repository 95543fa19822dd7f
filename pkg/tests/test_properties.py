"""Property tests over random operators, partitions and weights."""

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from opentropy import (
    DenseMatrix,
    Partition,
    a_table,

    b_map,
    ergodic_projector,
    exact_entropy_sb,
    is_zero_entropy,
    l1_operator_norm,
    mu_norm_sq,
    partition_entropy,
    partition_functional,
    validate_sb,
)
from opentropy.generators import (
    random_contraction,
    random_partition,
    random_refinement,
    random_sb,
    random_weights,
)

seeds = st.integers(0, 2**32 - 1)
sizes = st.integers(1, 7)
SETTINGS = settings(max_examples=60, deadline=None)


def _rng(seed):
    return np.random.default_rng(seed)


@SETTINGS
@given(seeds, sizes)
def test_b_image_is_semibistochastic(seed, J):
    rng = _rng(seed)
    mu = random_weights(J, rng)
    U = random_contraction(J, mu, rng)
    B = b_map(U)
    assert l1_operator_norm(B) <= 1 + 1e-12
    V = random_contraction(J, mu, rng)
    validate_sb(B @ b_map(V))


@SETTINGS
@given(seeds, sizes)
def test_partition_functional_bounds(seed, J):
    # the functional never exceeds the mu-norm on the finest partition and is at most 1 for contractions
    rng = _rng(seed)
    mu = random_weights(J, rng)
    W = random_contraction(J, mu, rng)
    total = mu_norm_sq(W)
    assert partition_functional(W, Partition.finest(J)) <= total + 1e-10
    chi = random_partition(J, rng)
    assert partition_functional(W, chi) >= -1e-15
    assert partition_functional(W, Partition.whole(J)) <= 1 + 1e-9


@SETTINGS
@given(seeds, sizes)
def test_a_sequences_nonincreasing(seed, J):
    B = random_sb(J, _rng(seed))
    a = a_table(B, 20)
    assert np.all(np.diff(a, axis=0) <= 1e-12)
    assert np.all(a >= -1e-15)


@SETTINGS
@given(seeds, sizes)
def test_projector_identities(seed, J):
    B = random_sb(J, _rng(seed))
    data = ergodic_projector(B, cesaro_n=0)
    assume(not data.diagnostics["rank_ambiguous"])
    P = data.projector
    assert np.allclose(P @ P, P, atol=1e-9)
    assert np.allclose(P @ B, P, atol=1e-9)
    assert np.allclose(B @ P, P, atol=1e-9)


@SETTINGS
@given(seeds, sizes)
def test_exact_entropy_bounds(seed, J):
    rng = _rng(seed)
    B = random_sb(J, rng)
    mu = random_weights(J, rng)
    h = exact_entropy_sb(B, mu).value
    assert -1e-12 <= h <= np.log(J) + 1e-9
    if is_zero_entropy(B):
        assert h <= 1e-9


@SETTINGS
@given(seeds, st.integers(1, 5), st.integers(1, 3))
def test_partition_entropy_refinement(seed, J, n):
    rng = _rng(seed)
    mu = random_weights(J, rng)
    U = random_contraction(J, mu, rng)
    chi = random_partition(J, rng)
    kappa = random_refinement(chi, rng)
    assert partition_entropy(U, chi, n) <= partition_entropy(U, kappa, n) + 1e-9


@SETTINGS
@given(seeds, sizes)
def test_diagonal_phase_invariance(seed, J):
    rng = _rng(seed)
    mu = random_weights(J, rng)
    U = random_contraction(J, mu, rng)
    d1 = np.exp(2j * np.pi * rng.random(J))
    d2 = np.exp(2j * np.pi * rng.random(J))
    V = DenseMatrix(np.diag(d1) @ U.entries @ np.diag(d2), mu)
    assert np.allclose(b_map(V).entries, b_map(U).entries, atol=1e-13)
