import numpy as np
import pytest

from schmidt_qfim import states, qfim, tools

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)


def random_hermitian(d, rng):
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (A + A.conj().T) / 2


def test_bell_state_qfi():
    bell = states.mes_state(2)
    H = np.kron(SIGMA_Z, np.eye(2)) + np.kron(np.eye(2), SIGMA_Z)
    assert qfim.qfi(bell, H) == pytest.approx(16)
    assert qfim.variance(bell, H) == pytest.approx(4)


def test_maximally_mixed_state_has_no_information():
    rho = states.DensityMatrix(np.eye(4) / 4, (2, 2))
    assert qfim.qfi(rho, np.kron(SIGMA_X, SIGMA_Z)) == pytest.approx(0, abs=1e-12)


def test_qfi_rejects_bad_generators():
    bell = states.mes_state(2)
    with pytest.raises(states.InvalidObservable):
        qfim.qfi(bell, np.triu(np.ones((4, 4))))
    with pytest.raises(states.InvalidArgument):
        qfim.qfi(bell, SIGMA_Z)


def test_pure_state_qfim_is_four_times_covariance():
    rng = np.random.default_rng(1)
    for _ in range(100):
        psi = tools.random_pure_state((2, 3), rng)
        ops = [random_hermitian(6, rng) for _ in range(3)]
        np.testing.assert_allclose(qfim.qfim(psi, ops),
                                   4 * qfim.covariance_matrix(psi, ops),
                                   atol=1e-8)


def test_qfim_is_convex_and_below_covariance():
    rng = np.random.default_rng(2)
    for _ in range(100):
        rho1 = tools.random_density_matrix((2, 2), rank=2, rng=rng)
        rho2 = tools.random_density_matrix((2, 2), rng=rng)
        p = rng.uniform()
        mixture = states.DensityMatrix(p * rho1.matrix + (1 - p) * rho2.matrix, (2, 2))
        ops = [random_hermitian(4, rng) for _ in range(3)]
        gap = p * qfim.qfim(rho1, ops) + (1 - p) * qfim.qfim(rho2, ops) - qfim.qfim(mixture, ops)
        assert np.linalg.eigvalsh(gap).min() > -1e-8
        gap = 4 * qfim.covariance_matrix(mixture, ops) - qfim.qfim(mixture, ops)
        assert np.linalg.eigvalsh(gap).min() > -1e-8


def test_qfim_is_symmetric_and_positive():
    rng = np.random.default_rng(3)
    rho = tools.random_density_matrix((3, 3), rank=4, rng=rng)
    F = qfim.qfim(rho, [random_hermitian(9, rng) for _ in range(5)])
    np.testing.assert_allclose(F, F.T)
    assert np.linalg.eigvalsh(F).min() > -1e-10


def test_qfim_blocks_match_full_qfim():
    rng = np.random.default_rng(4)
    rho = tools.random_density_matrix((2, 3), rank=3, rng=rng)
    basis_a, basis_b = states.gellmann_basis(2), states.gellmann_basis(3)
    blocks = qfim.qfim_blocks(rho, basis_a, basis_b)
    ops = [np.kron(g, np.eye(3)) for g in basis_a] + [np.kron(np.eye(2), h) for h in basis_b]
    np.testing.assert_allclose(blocks.full(), qfim.qfim(rho, ops), atol=1e-10)
    assert blocks.tr_norm_x == pytest.approx(qfim.trace_norm(blocks.x))
    assert blocks.min_eigenvalue() > -1e-10


def test_cut_blocks_for_multi_particle_party():
    rng = np.random.default_rng(5)
    rho = tools.random_density_matrix((2, 2, 2), rank=2, rng=rng)
    bases = [states.gellmann_basis(2, include_identity=True)] * 3
    cut = states.bipartition_from_party([0], 3)
    blocks = qfim.cut_blocks(rho, cut, bases)
    party_b = states.tensor_basis(bases[1:])
    ops_a = [np.kron(g, np.eye(4)) for g in bases[0]]
    ops_b = [np.kron(np.eye(2), h) for h in party_b]
    np.testing.assert_allclose(blocks.f_a, qfim.qfim(rho, ops_a), atol=1e-10)
    np.testing.assert_allclose(blocks.f_b, qfim.qfim(rho, ops_b), atol=1e-10)
    full = qfim.qfim(rho, ops_a + ops_b)
    np.testing.assert_allclose(blocks.x, full[:4, 4:], atol=1e-10)
    traces = qfim.cut_traces(rho, cut, bases)
    assert traces.tr_fa == pytest.approx(blocks.tr_fa)
    assert traces.tr_fb == pytest.approx(blocks.tr_fb)
    np.testing.assert_allclose(traces.x, blocks.x, atol=1e-10)


def test_cut_of_non_adjacent_particles():
    rng = np.random.default_rng(6)
    psi = tools.random_pure_state((2, 2, 2), rng)
    bases = [states.gellmann_basis(2, include_identity=True)] * 3
    cut = states.bipartition_from_party([1], 3)
    blocks = qfim.cut_blocks(psi, cut, bases)
    assert cut.party_a == (0, 2)
    ops_b = [np.kron(np.kron(np.eye(2), h), np.eye(2)) for h in bases[1]]
    np.testing.assert_allclose(blocks.f_b, qfim.qfim(psi, ops_b), atol=1e-10)


def test_transformed_blocks():
    rng = np.random.default_rng(7)
    rho = tools.random_density_matrix((2, 2), rng=rng)
    basis = states.gellmann_basis(2)
    blocks = qfim.qfim_blocks(rho, basis, basis)
    O_a, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    O_b, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    rotated = blocks.transformed(O_a, O_b)
    direct = qfim.qfim_blocks(rho, basis.transformed(O_a), basis.transformed(O_b))
    np.testing.assert_allclose(rotated.full(), direct.full(), atol=1e-10)
    assert rotated.tr_fa == pytest.approx(blocks.tr_fa)
    assert rotated.tr_norm_x == pytest.approx(blocks.tr_norm_x)


def test_trace_norm():
    assert qfim.trace_norm(np.diag([1.0, -2.0])) == pytest.approx(3)
    assert qfim.trace_norm(np.zeros((0, 3))) == 0.0


def test_qfi_is_additive_on_product_states():
    rng = np.random.default_rng(11)
    for _ in range(20):
        psi_a = tools.random_pure_state((2, ), rng)
        psi_b = tools.random_pure_state((3, ), rng)
        A = random_hermitian(2, rng)
        B = random_hermitian(3, rng)
        H = np.kron(A, np.eye(3)) + np.kron(np.eye(2), B)
        expected = qfim.qfi(psi_a, A) + qfim.qfi(psi_b, B)
        assert qfim.qfi(states.tensor(psi_a, psi_b), H) == pytest.approx(expected, abs=1e-8)


def test_qfim_transforms_covariantly():
    rng = np.random.default_rng(12)
    rho = tools.random_density_matrix((3, ), rank=2, rng=rng)
    ops = np.stack([random_hermitian(3, rng) for _ in range(4)])
    O = tools.random_orthogonal(4, rng)
    F = qfim.qfim(rho, ops)
    rotated = qfim.qfim(rho, np.einsum('kl,lij->kij', O, ops))
    np.testing.assert_allclose(rotated, O @ F @ O.T, atol=1e-8)
