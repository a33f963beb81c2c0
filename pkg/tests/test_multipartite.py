import numpy as np
import pytest
from scipy import special

from schmidt_qfim import multipartite, states, tools

SEVEN_QUBIT_VECTOR = '2x6,1;4x8,2x12,1;4x20,2x14,1'


@pytest.fixture(scope='module')
def seven_qubit_h():
    return multipartite.h_vector(states.seven_qubit_state())


def test_enumerate_bipartitions():
    cuts = multipartite.enumerate_bipartitions(3)
    assert [cut.label for cut in cuts] == ['13|2', '12|3', '1|23']
    cuts = multipartite.enumerate_bipartitions(7)
    assert len(cuts) == 63
    assert len(set(cuts)) == 63
    sizes = [cut.size_class for cut in cuts]
    assert sizes == sorted(sizes)
    assert [sizes.count(c) for c in (1, 2, 3)] == [7, 21, 35]
    assert multipartite.class_sizes(4) == [(1, 4), (2, 3)]
    with pytest.raises(states.UnsupportedSize):
        multipartite.enumerate_bipartitions(13)
    with pytest.raises(states.UnsupportedSize):
        multipartite.enumerate_bipartitions(1)


def test_seven_qubit_h_vector(seven_qubit_h):
    assert seven_qubit_h.grouped() == {
        1: {
            1.0: 6,
            -1.0: 1
        },
        2: {
            3.5: 8,
            1.0: 12,
            -1.0: 1
        },
        3: {
            3.5: 20,
            1.0: 14,
            -1.0: 1
        }
    }
    frame = seven_qubit_h.to_frame()
    assert list(frame.columns) == ['cut', 'size_class', 'h']
    assert frame.loc[frame['cut'] == '1|234567', 'h'].iloc[0] == pytest.approx(-1, abs=1e-8)


def test_seven_qubit_exact_vector_and_structure():
    vector = multipartite.pure_state_dim_vector(states.seven_qubit_state())
    assert str(vector) == SEVEN_QUBIT_VECTOR
    assert vector == multipartite.DimVectorCandidate.from_groups(7,
                                                                  SEVEN_QUBIT_VECTOR,
                                                                  feasible=True,
                                                                  local_dim=2,
                                                                  assignment=vector.assignment)
    structure = multipartite.structure_from_vector(vector)
    assert structure.k_separability == 3
    assert structure.depth == 4
    assert structure.partition == ((0, ), (1, 2), (3, 4, 5, 6))
    assert structure.label == '1|23|4567'


def test_seven_qubit_vector_is_tight(seven_qubit_h):
    psi = states.seven_qubit_state()
    vector = multipartite.DimVectorCandidate.from_groups(7, SEVEN_QUBIT_VECTOR)
    result = multipartite.check_dim_vector(psi, vector, h=seven_qubit_h)
    assert result.verdict == multipartite.FEASIBLE
    assert result.feasible
    lowered = list(multipartite.lowered_candidates(vector))
    assert len(lowered) == 5
    for candidate in lowered:
        outcome = multipartite.check_dim_vector(psi, candidate, h=seven_qubit_h)
        assert outcome.verdict == multipartite.INFEASIBLE
        assert outcome.certificate


def test_ghz_vectors():
    ghz = states.ghz_state(3, 3)
    assert multipartite.check_dim_vector(
        ghz, multipartite.DimVectorCandidate(3, (3, 3, 3))).verdict == multipartite.FEASIBLE
    result = multipartite.check_dim_vector(ghz, multipartite.DimVectorCandidate(3, (3, 3, 2)))
    assert result.verdict == multipartite.INFEASIBLE
    assert result.method == 'linear-program'
    assert len(result.certificate) == 3
    assert result.profile_count == 3
    structure = multipartite.structure_from_vector(multipartite.pure_state_dim_vector(ghz))
    assert structure.k_separability == 1
    assert structure.depth == 3


def test_bell_state_is_not_separable():
    result = multipartite.check_dim_vector(states.mes_state(2),
                                           multipartite.DimVectorCandidate(2, (1, )))
    assert result.verdict == multipartite.INFEASIBLE
    assert result.method == 'necessary-check'
    assert result.certificate == ('1|2', )


def test_mes_vectors():
    mes = states.mes_state(3)
    assert multipartite.check_dim_vector(mes, multipartite.DimVectorCandidate(2, (3, ))).feasible
    assert not multipartite.check_dim_vector(mes, multipartite.DimVectorCandidate(2,
                                                                                  (2, ))).feasible


@pytest.mark.parametrize('dims', [(2, 2, 2), (2, 2, 2, 2)])
def test_random_pure_states_are_consistent(dims):
    rng = np.random.default_rng(len(dims))
    for _ in range(50):
        psi = tools.random_pure_state(dims, rng)
        vector = multipartite.pure_state_dim_vector(psi)
        assert multipartite.check_dim_vector(psi, vector).verdict == multipartite.FEASIBLE
        assert multipartite.structure_from_vector(vector).k_separability == 1


def test_h_vector_is_below_rank_values():
    rng = np.random.default_rng(1)
    psi = tools.random_pure_state((2, 2, 3), rng)
    h = multipartite.h_vector(psi)
    for cut, value in zip(h.cuts, h.values):
        assert value <= multipartite.rank_value(states.schmidt_rank(psi, cut)) + 1e-8


def test_h_vector_threads_agree():
    ghz = states.ghz_state(4)
    serial = multipartite.h_vector(ghz)
    threaded = multipartite.h_vector(ghz, workers=3)
    np.testing.assert_allclose(serial.values, threaded.values)


def test_h_vector_validation():
    with pytest.raises(states.InvalidArgument):
        multipartite.h_vector(states.ghz_state(3), bases=[states.gellmann_basis(2)] * 3)
    with pytest.raises(states.UnsupportedSize):
        multipartite.h_vector(states.ghz_state(8))
    with pytest.raises(states.InvalidArgument):
        multipartite.h_vector(states.product_state((4, )))


def test_large_states_are_undecided():
    candidate = multipartite.DimVectorCandidate.from_groups(8, '2x127')
    result = multipartite.check_dim_vector(states.ghz_state(8), candidate)
    assert result.verdict == multipartite.UNDECIDED
    assert result.feasible is None
    assert result.method == 'cap'


def test_candidate_validation():
    with pytest.raises(states.InvalidVector):
        multipartite.DimVectorCandidate(3, (2, 2))
    with pytest.raises(states.InvalidVector):
        multipartite.DimVectorCandidate(3, (2, 0, 2))
    with pytest.raises(states.InvalidVector):
        multipartite.DimVectorCandidate(3, (3, 2, 2), local_dim=2)
    with pytest.raises(states.InvalidVector):
        multipartite.DimVectorCandidate.from_groups(4, '2,2,2;2,2,2,2')
    with pytest.raises(states.InvalidVector):
        multipartite.DimVectorCandidate.from_groups(3, 'a,b,c')
    with pytest.raises(states.InvalidVector):
        multipartite.DimVectorCandidate(3, (1, 1, 1)).lowered(0)
    with pytest.raises(states.InvalidVector):
        multipartite.check_dim_vector(states.ghz_state(4), multipartite.DimVectorCandidate(3,
                                                                                         (2, 2, 2)))


def test_candidate_forms_agree():
    text = multipartite.DimVectorCandidate.from_groups(4, '2,1,2,2;4,2x2')
    listed = multipartite.DimVectorCandidate.from_groups(4, [[1, 2, 2, 2], [2, 4, 2]])
    mapped = multipartite.DimVectorCandidate.from_groups(4, {1: {2: 3, 1: 1}, 2: [4, 2, 2]})
    assert text.values == listed.values == mapped.values == (2, 2, 2, 1, 4, 2, 2)
    assert text.by_class() == {1: (2, 2, 2, 1), 2: (4, 2, 2)}
    assert str(text) == '2x3,1;4,2x2'
    assert text.lowered(4).values == (2, 2, 2, 1, 3, 2, 2)


def test_profile_count():
    assert multipartite.profile_count(multipartite.DimVectorCandidate(3, (3, 3, 2))) == 3
    assert multipartite.profile_count(multipartite.DimVectorCandidate(3, (3, 3, 3))) == 1
    seven = multipartite.DimVectorCandidate.from_groups(7, SEVEN_QUBIT_VECTOR)
    expected = 7 * special.comb(21, 8, exact=True) * 13 * special.comb(35, 20, exact=True) * 15
    assert multipartite.profile_count(seven) == expected


def test_inconsistent_assignment():
    cuts = multipartite.enumerate_bipartitions(3)
    candidate = multipartite.DimVectorCandidate.from_assignment(3, zip(cuts, [2, 1, 1]))
    with pytest.raises(states.InvalidVector):
        multipartite.structure_from_vector(candidate)
    with pytest.raises(states.InvalidVector):
        multipartite.structure_from_vector(multipartite.DimVectorCandidate(3, (2, 2, 2)))


def test_group_by_size():
    cuts = multipartite.enumerate_bipartitions(3)
    assert multipartite.group_by_size([1.0, 1.0 + 1e-12, -1.0], cuts) == {1: {1.0: 2, -1.0: 1}}


@pytest.mark.parametrize('d', [2, 3])
def test_ghz_saturates_h(d):
    h = multipartite.h_vector(states.ghz_state(3, d))
    np.testing.assert_allclose(h.values, [d - 2 / d] * 3, atol=1e-8)


def test_product_state_vector():
    psi = states.product_state((2, 2, 2, 2))
    np.testing.assert_allclose(multipartite.h_vector(psi).values, -1, atol=1e-8)
    vector = multipartite.pure_state_dim_vector(psi)
    assert set(vector.values) == {1}
    structure = multipartite.structure_from_vector(vector)
    assert structure.k_separability == 4
    assert structure.depth == 1
    assert multipartite.pure_state_dim_vector(states.ghz_state(3)).values == (2, 2, 2)


def test_h_vector_is_basis_independent():
    rng = np.random.default_rng(2)
    rho = tools.random_density_matrix((2, 2, 2), rank=2, rng=rng)
    basis = states.gellmann_basis(2, include_identity=True)
    rotated = [basis.transformed(tools.random_orthogonal(4, rng)) for _ in range(3)]
    np.testing.assert_allclose(multipartite.h_vector(rho).values,
                               multipartite.h_vector(rho, bases=rotated).values,
                               atol=1e-8)


def test_raising_entries_keeps_feasibility():
    psi = states.seven_qubit_state()
    h = multipartite.h_vector(psi)
    raised = multipartite.DimVectorCandidate.from_groups(7, '2x7;4x9,2x12;4x21,2x14')
    assert multipartite.check_dim_vector(psi, raised, h=h).feasible


def test_rank_value_is_increasing():
    values = [multipartite.rank_value(r) for r in range(1, 17)]
    assert all(b > a for a, b in zip(values, values[1:]))
    assert multipartite.rank_value(1) == -1


def test_ghz_beyond_qubit_dimension():
    h = multipartite.h_vector(states.ghz_state(3, 6))
    np.testing.assert_allclose(h.values, [6 - 2 / 6] * 3, atol=1e-8)
    with pytest.raises(states.UnsupportedSize):
        multipartite.h_vector(states.ghz_state(3, 9))
