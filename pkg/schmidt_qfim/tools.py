# pylint: disable=invalid-name,too-many-arguments
import io
import os
import json
import typing
import concurrent.futures

import numpy as np
import tqdm
from scipy import stats

from . import states

DEFAULT_SEED = 20240901
STATE_FILE_KINDS = ('pure', 'mixed')


class StateFileError(states.InvalidArgument):
    """Raised for state files that cannot be parsed."""


def get_default_seed() -> int:
    """Get the default RNG seed, overridable with the QFIM_SEED environment variable."""
    value = os.environ.get('QFIM_SEED', str(DEFAULT_SEED))
    try:
        return int(value)
    except ValueError as exc:
        raise states.InvalidArgument(f'QFIM_SEED must be an integer, got {value!r}.') from exc


def get_rng(seed: typing.Union[int, np.random.Generator] = None) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(get_default_seed() if seed is None else seed)


def _encode(array: np.ndarray):
    if array.ndim == 1:
        return [[float(v.real), float(v.imag)] for v in array]
    return [_encode(row) for row in array]


def _decode(data, ndim: int) -> np.ndarray:
    array = np.asarray(data, dtype=float)
    if array.ndim != ndim + 1 or array.shape[-1] != 2:
        raise StateFileError(f'Expected {ndim}-dimensional data of [re, im] pairs, '
                             f'got array of shape {array.shape}.')
    return array[..., 0] + 1j * array[..., 1]


def state_to_dict(state: typing.Union[states.PureState, states.DensityMatrix]) -> dict:
    if isinstance(state, states.PureState):
        return {'dims': list(state.dims), 'kind': 'pure', 'data': _encode(state.amplitudes)}
    return {'dims': list(state.dims), 'kind': 'mixed', 'data': _encode(state.matrix)}


def state_from_dict(document: dict) -> typing.Union[states.PureState, states.DensityMatrix]:
    if not isinstance(document, dict) or not {'dims', 'kind', 'data'} <= set(document):
        raise StateFileError('A state document needs the keys "dims", "kind" and "data".')
    kind = document['kind']
    if kind not in STATE_FILE_KINDS:
        raise StateFileError(f'Unsupported state kind {kind!r}, expected one of {STATE_FILE_KINDS}.')
    try:
        dims = tuple(int(d) for d in document['dims'])
        data = _decode(document['data'], ndim=1 if kind == 'pure' else 2)
        if kind == 'pure':
            return states.PureState(data, dims)
        return states.DensityMatrix(data, dims)
    except StateFileError:
        raise
    except (TypeError, ValueError) as exc:
        raise StateFileError(f'Invalid state document: {exc}') from exc


def read_state(filepath_or_buffer: typing.Union[str, io.StringIO]):
    """Read a state from a JSON file.

    Args:
        filepath_or_buffer: The path to the file or any object
            with a `read` method (such as `io.StringIO`)
    """
    if hasattr(filepath_or_buffer, 'read'):
        text = filepath_or_buffer.read()
    else:
        if not os.path.isfile(filepath_or_buffer):
            raise StateFileError(f'Could not find state file at path: {filepath_or_buffer}')
        with open(filepath_or_buffer, 'r', encoding='utf-8') as f:
            text = f.read()
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFileError(f'State file is not valid JSON: {exc}') from exc
    return state_from_dict(document)


def write_state(state, filepath_or_buffer: typing.Union[str, io.StringIO]):
    """Write a PureState or DensityMatrix as JSON."""
    text = json.dumps(state_to_dict(state))
    if hasattr(filepath_or_buffer, 'write'):
        filepath_or_buffer.write(text)
        return
    with open(filepath_or_buffer, 'w', encoding='utf-8') as f:
        f.write(text)


def random_unitary(d: int, rng=None) -> np.ndarray:
    """Haar-random d x d unitary."""
    if d == 1:
        return np.ones((1, 1), dtype=np.complex128)
    return stats.unitary_group.rvs(d, random_state=get_rng(rng))


def random_orthogonal(n: int, rng=None) -> np.ndarray:
    """Haar-random n x n real orthogonal matrix, e.g. to recombine a basis."""
    if n == 1:
        return np.ones((1, 1))
    return stats.ortho_group.rvs(n, random_state=get_rng(rng))


def random_pure_state(dims: typing.Sequence[int], rng=None) -> states.PureState:
    rng = get_rng(rng)
    size = int(np.prod(dims))
    amplitudes = rng.normal(size=size) + 1j * rng.normal(size=size)
    return states.PureState(amplitudes / np.linalg.norm(amplitudes), tuple(dims))


def random_schmidt_state(d_a: int, d_b: int, r: int, rng=None) -> states.PureState:
    """Random pure state of Schmidt rank exactly r.

    Schmidt coefficients are drawn from a flat Dirichlet distribution and the
    Schmidt bases from Haar-random local unitaries.
    """
    if not 1 <= r <= min(d_a, d_b):
        raise states.InvalidRank(f'Schmidt rank {r} is not in 1..{min(d_a, d_b)}.')
    rng = get_rng(rng)
    coefficients = rng.dirichlet(np.ones(r))
    U, V = random_unitary(d_a, rng)[:, :r], random_unitary(d_b, rng)[:, :r]
    matrix = (U * np.sqrt(coefficients)) @ V.T
    return states.PureState(matrix.ravel() / np.linalg.norm(matrix), (d_a, d_b))


def random_density_matrix(dims: typing.Sequence[int], rank: int = None,
                          rng=None) -> states.DensityMatrix:
    """Random mixed state (induced measure) of the given rank, full rank by default."""
    rng = get_rng(rng)
    size = int(np.prod(dims))
    rank = size if rank is None else rank
    G = rng.normal(size=(size, rank)) + 1j * rng.normal(size=(size, rank))
    matrix = G @ G.conj().T
    matrix = matrix / np.trace(matrix).real
    return states.DensityMatrix((matrix + matrix.conj().T) / 2, tuple(dims))


def random_schmidt_mixture(d: int, r: int, terms: int = 3, rng=None):
    """Mixture of random Schmidt-rank-r pure states.

    Returns:
        The DensityMatrix, its mixing weights and its pure components.
    """
    rng = get_rng(rng)
    weights = rng.dirichlet(np.ones(terms))
    components = [random_schmidt_state(d, d, r, rng) for _ in range(terms)]
    matrix = sum(w * states.pure_to_density(psi).matrix for w, psi in zip(weights, components))
    return states.DensityMatrix((matrix + matrix.conj().T) / 2, (d, d)), weights, components


def parallel_map(fn, items, workers: int = 1, verbose: bool = False, desc: str = None) -> list:
    """Apply `fn` to every item, keeping input order.

    Args:
        fn: A function of one argument.
        items: The inputs.
        workers: Number of threads; 1 runs in the calling thread.
        verbose: Whether to show a progress bar.
        desc: Progress bar description.
    """
    items = list(items)
    if workers <= 1:
        return [fn(item) for item in tqdm.tqdm(items, desc=desc, disable=not verbose)]
    results: typing.List[typing.Any] = [None] * len(items)
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {executor.submit(fn, item): index for index, item in enumerate(items)}
        for future in tqdm.tqdm(concurrent.futures.as_completed(futures),
                                total=len(items),
                                desc=desc,
                                disable=not verbose):
            results[futures[future]] = future.result()
    return results
