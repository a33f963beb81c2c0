import io
import json

import numpy as np
import pytest

from schmidt_qfim import states, tools

FACTORY_STATES = [
    states.mes_state(3),
    states.mes_state(4, 2),
    states.rho_s((0.5, 0.3, 0.2)),
    states.ghz_state(3, 3),
    states.seven_qubit_state(),
    states.product_state((2, 3), (1, 2)),
]


@pytest.mark.parametrize('state', FACTORY_STATES)
def test_state_file_round_trip(state):
    buffer = io.StringIO()
    tools.write_state(state, buffer)
    buffer.seek(0)
    loaded = tools.read_state(buffer)
    assert type(loaded) is type(state)
    assert loaded.dims == state.dims
    np.testing.assert_allclose(states.as_density(loaded).matrix,
                               states.as_density(state).matrix,
                               atol=1e-12)


def test_state_file_on_disk(tmp_path):
    filepath = str(tmp_path / 'mes.json')
    tools.write_state(states.mes_state(2), filepath)
    with open(filepath, 'r', encoding='utf-8') as f:
        document = json.load(f)
    assert document['kind'] == 'pure'
    assert document['dims'] == [2, 2]
    assert tools.read_state(filepath).dims == (2, 2)


@pytest.mark.parametrize('text', [
    'not json',
    '[]',
    '{"dims": [2], "kind": "pure"}',
    '{"dims": [2], "kind": "ket", "data": [[1, 0], [0, 0]]}',
    '{"dims": [2], "kind": "pure", "data": [1, 0]}',
    '{"dims": [2], "kind": "pure", "data": [[1, 0], [1, 0]]}',
    '{"dims": [3], "kind": "pure", "data": [[1, 0], [0, 0]]}',
    '{"dims": [2], "kind": "mixed", "data": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}',
])
def test_malformed_state_files(text):
    with pytest.raises(tools.StateFileError):
        tools.read_state(io.StringIO(text))


def test_missing_state_file(tmp_path):
    with pytest.raises(tools.StateFileError):
        tools.read_state(str(tmp_path / 'missing.json'))


def test_default_seed(monkeypatch):
    monkeypatch.delenv('QFIM_SEED', raising=False)
    assert tools.get_default_seed() == tools.DEFAULT_SEED
    monkeypatch.setenv('QFIM_SEED', '42')
    assert tools.get_default_seed() == 42
    assert tools.get_rng().integers(1000) == np.random.default_rng(42).integers(1000)
    monkeypatch.setenv('QFIM_SEED', 'forty-two')
    with pytest.raises(states.InvalidArgument):
        tools.get_default_seed()


def test_random_instances():
    rng = np.random.default_rng(0)
    U = tools.random_unitary(4, rng)
    np.testing.assert_allclose(U @ U.conj().T, np.eye(4), atol=1e-10)
    O = tools.random_orthogonal(5, rng)
    np.testing.assert_allclose(O @ O.T, np.eye(5), atol=1e-10)
    for r in range(1, 4):
        assert states.schmidt_rank(tools.random_schmidt_state(3, 4, r, rng)) == r
    with pytest.raises(states.InvalidRank):
        tools.random_schmidt_state(2, 2, 3, rng)
    rho = tools.random_density_matrix((2, 3), rank=2, rng=rng)
    assert np.linalg.matrix_rank(rho.matrix, tol=1e-10) == 2
    mixture, weights, components = tools.random_schmidt_mixture(3, 2, terms=4, rng=rng)
    assert mixture.dims == (3, 3)
    assert weights.sum() == pytest.approx(1)
    assert len(components) == 4


def test_parallel_map_keeps_order():
    items = list(range(50))
    assert tools.parallel_map(lambda x: x * x, items, workers=4) == [x * x for x in items]
    assert tools.parallel_map(str, items) == [str(x) for x in items]
