# pylint: disable=invalid-name,too-many-arguments
"""Quantum states, operator bases and subsystem algebra."""
import typing
import itertools
import fractions
import dataclasses

import numpy as np

HERMITIAN_TOLERANCE = 1e-10
TRACE_TOLERANCE = 1e-10
POSITIVITY_TOLERANCE = 1e-10
NORM_TOLERANCE = 1e-10
BASIS_TOLERANCE = 1e-10
RANK_CUTOFF = 1e-10


class SchmidtQfimError(ValueError):
    """Base class for all input errors raised by this package."""


class InvalidDimension(SchmidtQfimError):
    pass


class InvalidArgument(SchmidtQfimError):
    pass


class InvalidRank(SchmidtQfimError):
    pass


class InvalidObservable(SchmidtQfimError):
    pass


class UnsupportedShape(SchmidtQfimError):
    pass


class UnsupportedSize(SchmidtQfimError):
    pass


class InvalidVector(SchmidtQfimError):
    pass


class UndefinedSensitivity(SchmidtQfimError):
    pass


class Unbounded(SchmidtQfimError):
    pass


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.complex128)
    array.flags.writeable = False
    return array


def as_matrix(M, name='matrix', square=True) -> np.ndarray:
    """Convert an array-like into a finite complex matrix.

    Args:
        M: Anything `np.asarray` understands.
        name: Used in error messages.
        square: Whether to require a square matrix.
    """
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim != 2:
        raise InvalidArgument(f'{name} must be two-dimensional, got shape {M.shape}.')
    if square and M.shape[0] != M.shape[1]:
        raise InvalidArgument(f'{name} must be square, got shape {M.shape}.')
    if not np.all(np.isfinite(M)):
        raise InvalidArgument(f'{name} contains NaN or Inf entries.')
    return M


def as_observable(H, dim: int = None, name='observable') -> np.ndarray:
    """Validate a Hermitian operator, optionally of a given dimension."""
    H = as_matrix(H, name=name)
    if np.abs(H - H.conj().T).max(initial=0) > HERMITIAN_TOLERANCE:
        raise InvalidObservable(f'{name} is not Hermitian.')
    if dim is not None and H.shape[0] != dim:
        raise InvalidArgument(f'{name} has dimension {H.shape[0]}, expected {dim}.')
    return H


def _check_dims(dims, size) -> typing.Tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise InvalidDimension(f'Subsystem dimensions must be positive, got {dims}.')
    if int(np.prod(dims)) != size:
        raise InvalidDimension(f'Dimensions {dims} do not multiply to {size}.')
    return dims


@dataclasses.dataclass(frozen=True)
class PureState:
    """A normalized state vector on a tensor product of subsystems.

    Args:
        amplitudes: Complex amplitudes, row-major over the subsystems (first subsystem
            most significant).
        dims: Local dimensions of the subsystems.
    """
    amplitudes: np.ndarray
    dims: typing.Tuple[int, ...]

    def __post_init__(self):
        amplitudes = np.asarray(self.amplitudes, dtype=np.complex128).ravel()
        if not np.all(np.isfinite(amplitudes)):
            raise InvalidArgument('Amplitudes contain NaN or Inf entries.')
        dims = _check_dims(self.dims, amplitudes.size)
        norm = np.linalg.norm(amplitudes)
        if abs(norm - 1) > NORM_TOLERANCE:
            raise InvalidArgument(f'State is not normalized (norm {norm:.12g}).')
        object.__setattr__(self, 'amplitudes', _frozen(amplitudes))
        object.__setattr__(self, 'dims', dims)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def n(self) -> int:
        return len(self.dims)

    def density(self) -> 'DensityMatrix':
        return pure_to_density(self)


@dataclasses.dataclass(frozen=True)
class DensityMatrix:
    """A Hermitian, unit-trace, positive semidefinite operator.

    Args:
        matrix: The operator as a square complex matrix.
        dims: Local dimensions of the subsystems.
    """
    matrix: np.ndarray
    dims: typing.Tuple[int, ...]

    def __post_init__(self):
        matrix = as_matrix(self.matrix, name='density matrix')
        dims = _check_dims(self.dims, matrix.shape[0])
        if np.abs(matrix - matrix.conj().T).max() > HERMITIAN_TOLERANCE:
            raise InvalidArgument('Density matrix is not Hermitian.')
        trace = np.trace(matrix).real
        if abs(trace - 1) > TRACE_TOLERANCE:
            raise InvalidArgument(f'Density matrix has trace {trace:.12g}, expected 1.')
        smallest = np.linalg.eigvalsh((matrix + matrix.conj().T) / 2).min()
        if smallest < -POSITIVITY_TOLERANCE:
            raise InvalidArgument(f'Density matrix has negative eigenvalue {smallest:.3g}.')
        object.__setattr__(self, 'matrix', _frozen(matrix))
        object.__setattr__(self, 'dims', dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        return len(self.dims)

    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))


def pure_to_density(psi: PureState) -> DensityMatrix:
    """Return the projector onto a pure state."""
    return DensityMatrix(np.outer(psi.amplitudes, psi.amplitudes.conj()), psi.dims)


def as_density(state: typing.Union[PureState, DensityMatrix]) -> DensityMatrix:
    if isinstance(state, PureState):
        return pure_to_density(state)
    if isinstance(state, DensityMatrix):
        return state
    raise InvalidArgument(f'Expected a PureState or DensityMatrix, got {type(state).__name__}.')


@dataclasses.dataclass(frozen=True)
class BasisSet:
    """An ordered, Hilbert-Schmidt orthonormal set of Hermitian operators.

    Args:
        elements: Array of shape (k, d, d).
        includes_identity: Whether the first element is the normalized identity.
    """
    elements: np.ndarray
    includes_identity: bool = False

    def __post_init__(self):
        elements = np.asarray(self.elements, dtype=np.complex128)
        if elements.ndim != 3 or elements.shape[1] != elements.shape[2]:
            raise InvalidArgument(f'Basis elements must have shape (k, d, d), got {elements.shape}.')
        if np.abs(elements - elements.conj().transpose(0, 2, 1)).max(initial=0) > 1e-12:
            raise InvalidArgument('Basis elements must be Hermitian.')
        gram = np.einsum('kij,lji->kl', elements, elements)
        if np.abs(gram - np.eye(len(elements))).max(initial=0) > BASIS_TOLERANCE:
            raise InvalidArgument('Basis elements are not Hilbert-Schmidt orthonormal.')
        object.__setattr__(self, 'elements', _frozen(elements))

    @property
    def dim(self) -> int:
        return self.elements.shape[1]

    def __len__(self):
        return self.elements.shape[0]

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, index):
        return self.elements[index]

    def gram(self) -> np.ndarray:
        return np.einsum('kij,lji->kl', self.elements, self.elements).real

    def transformed(self, O: np.ndarray) -> 'BasisSet':
        return basis_transform(self, O)

    def conjugate(self) -> 'BasisSet':
        """Element-wise complex conjugate (equivalently, transpose) of the basis."""
        return BasisSet(self.elements.conj(), includes_identity=self.includes_identity)


def gellmann_basis(d: int, include_identity: bool = False) -> BasisSet:
    """Generalized Gell-Mann matrices normalized to Tr(g_k g_l) = delta_kl.

    The order is: symmetric off-diagonal pairs, antisymmetric pairs (both with
    (k, l) lexicographic, k < l), then the diagonal generators. With
    `include_identity`, the identity divided by sqrt(d) comes first.

    Args:
        d: Local dimension, at least 2.
        include_identity: Whether to prepend the normalized identity.
    """
    if int(d) != d or d < 2:
        raise InvalidDimension(f'Gell-Mann basis needs d >= 2, got {d}.')
    d = int(d)
    elements = []
    if include_identity:
        elements.append(np.eye(d) / np.sqrt(d))
    pairs = list(itertools.combinations(range(d), 2))
    for k, l in pairs:
        g = np.zeros((d, d), dtype=np.complex128)
        g[k, l] = g[l, k] = 1 / np.sqrt(2)
        elements.append(g)
    for k, l in pairs:
        g = np.zeros((d, d), dtype=np.complex128)
        g[k, l] = -1j / np.sqrt(2)
        g[l, k] = 1j / np.sqrt(2)
        elements.append(g)
    for l in range(1, d):
        diagonal = np.zeros(d)
        diagonal[:l] = 1
        diagonal[l] = -l
        elements.append(np.diag(diagonal / np.sqrt(l * (l + 1))).astype(np.complex128))
    return BasisSet(np.array(elements), includes_identity=include_identity)


def basis_transform(basis: BasisSet, O: np.ndarray) -> BasisSet:
    """Recombine a basis with a real orthogonal matrix, g'_k = sum_l O_kl g_l."""
    O = np.asarray(O)
    if np.iscomplexobj(O):
        if np.abs(O.imag).max(initial=0) > 1e-12:
            raise InvalidArgument('Basis rotations must be real.')
        O = O.real
    if O.shape != (len(basis), len(basis)):
        raise InvalidArgument(f'Rotation has shape {O.shape}, basis has {len(basis)} elements.')
    if np.abs(O @ O.T - np.eye(len(basis))).max() > BASIS_TOLERANCE:
        raise InvalidArgument('Basis rotation is not orthogonal.')
    rotated = np.einsum('kl,lij->kij', O, basis.elements)
    includes_identity = basis.includes_identity and np.allclose(O[0], np.eye(len(basis))[0])
    return BasisSet(rotated, includes_identity=includes_identity)


def tensor_basis(bases: typing.Sequence[BasisSet]) -> BasisSet:
    """The tensor-product completion of single-particle bases.

    Elements are ordered like `np.kron`, i.e. the first basis varies slowest.
    """
    elements = np.ones((1, 1, 1), dtype=np.complex128)
    for basis in bases:
        elements = np.einsum('aij,bkl->abikjl', elements, basis.elements)
        n, m = elements.shape[:2]
        d = elements.shape[2] * elements.shape[3]
        elements = elements.reshape(n * m, d, d)
    return BasisSet(elements, includes_identity=all(b.includes_identity for b in bases))


def collective_operators(basis_a: BasisSet, basis_b: BasisSet, sign: int = 1) -> np.ndarray:
    """Stack G_i = g_i (x) 1 + sign * 1 (x) h_i for paired basis elements."""
    if len(basis_a) != len(basis_b):
        raise InvalidArgument(f'Bases have {len(basis_a)} and {len(basis_b)} elements.')
    if sign not in (1, -1):
        raise InvalidArgument(f'sign must be +1 or -1, got {sign}.')
    eye_a, eye_b = np.eye(basis_a.dim), np.eye(basis_b.dim)
    return np.array([
        np.kron(g, eye_b) + sign * np.kron(eye_a, h) for g, h in zip(basis_a, basis_b)
    ])


@dataclasses.dataclass(frozen=True)
class Bipartition:
    """A cut of n particles into two parties.

    `party_a` always holds particle 0. Particles are 0-based; `label`
    renders them 1-based the way cuts are usually written, e.g. '1|23'.
    """
    party_a: typing.Tuple[int, ...]
    party_b: typing.Tuple[int, ...]

    def __post_init__(self):
        party_a, party_b = tuple(sorted(self.party_a)), tuple(sorted(self.party_b))
        particles = party_a + party_b
        n = len(particles)
        if not party_a or not party_b:
            raise InvalidArgument('Both parties of a bipartition must be nonempty.')
        if sorted(particles) != list(range(n)):
            raise InvalidArgument(f'Parties {party_a} and {party_b} do not partition 0..{n - 1}.')
        if 0 not in party_a:
            party_a, party_b = party_b, party_a
        object.__setattr__(self, 'party_a', party_a)
        object.__setattr__(self, 'party_b', party_b)

    @classmethod
    def from_party(cls, party: typing.Iterable[int], n: int) -> 'Bipartition':
        return bipartition_from_party(party, n)

    @property
    def n(self) -> int:
        return len(self.party_a) + len(self.party_b)

    @property
    def index(self) -> int:
        return sum(2**(i - 1) for i in self.party_b)

    @property
    def size_class(self) -> int:
        """Number of particles in the smaller party."""
        return min(len(self.party_a), len(self.party_b))

    @property
    def label(self) -> str:
        return '|'.join(''.join(str(i + 1) for i in party)
                        for party in (self.party_a, self.party_b))

    def dims(self, dims: typing.Sequence[int]) -> typing.Tuple[int, int]:
        """Party dimensions given per-particle dimensions."""
        return (int(np.prod([dims[i] for i in self.party_a])),
                int(np.prod([dims[i] for i in self.party_b])))

    def __str__(self):
        return self.label


def bipartition_from_party(party: typing.Iterable[int], n: int) -> Bipartition:
    """Build the canonical bipartition in which `party` is one side."""
    party = set(int(i) for i in party)
    if not party or any(i < 0 or i >= n for i in party):
        raise InvalidArgument(f'Party {sorted(party)} is not a subset of 0..{n - 1}.')
    return Bipartition(tuple(sorted(party)), tuple(i for i in range(n) if i not in party))


def tensor(*items):
    """Tensor product of states or matrices.

    Args:
        items: All PureState, all DensityMatrix (PureStates are promoted),
            or plain matrices.
    """
    assert items, 'Nothing to tensor.'
    if all(isinstance(item, PureState) for item in items):
        amplitudes = np.ones(1, dtype=np.complex128)
        for item in items:
            amplitudes = np.kron(amplitudes, item.amplitudes)
        return PureState(amplitudes, sum((item.dims for item in items), ()))
    if any(isinstance(item, (PureState, DensityMatrix)) for item in items):
        items = [as_density(item) for item in items]
        matrix = np.ones((1, 1), dtype=np.complex128)
        for item in items:
            matrix = np.kron(matrix, item.matrix)
        return DensityMatrix(matrix, sum((item.dims for item in items), ()))
    result = np.ones((1, 1), dtype=np.complex128)
    for item in items:
        result = np.kron(result, as_matrix(item, square=False))
    return result


def _check_order(order, n) -> typing.List[int]:
    order = [int(i) for i in order]
    if sorted(order) != list(range(n)):
        raise InvalidArgument(f'{order} is not a permutation of 0..{n - 1}.')
    return order


def permute_subsystems(state, order):
    """Reorder tensor factors so that new subsystem k is old subsystem order[k]."""
    order = _check_order(order, state.n)
    dims = tuple(state.dims[i] for i in order)
    if isinstance(state, PureState):
        tensor_ = state.amplitudes.reshape(state.dims).transpose(order)
        return PureState(tensor_.ravel(), dims)
    state = as_density(state)
    tensor_ = state.matrix.reshape(state.dims + state.dims)
    tensor_ = tensor_.transpose(order + [state.n + i for i in order])
    return DensityMatrix(tensor_.reshape(state.dim, state.dim), dims)


def partial_trace(rho, keep: typing.Iterable[int]) -> DensityMatrix:
    """Reduced state on the subsystems in `keep` (0-based, returned in ascending order)."""
    rho = as_density(rho)
    keep = sorted(set(int(i) for i in keep))
    if not keep or keep[0] < 0 or keep[-1] >= rho.n:
        raise InvalidArgument(f'Cannot keep subsystems {keep} of a {rho.n}-partite state.')
    traced = [i for i in range(rho.n) if i not in keep]
    d_keep = int(np.prod([rho.dims[i] for i in keep]))
    d_traced = int(np.prod([rho.dims[i] for i in traced]))
    order = keep + traced
    tensor_ = rho.matrix.reshape(rho.dims + rho.dims)
    tensor_ = tensor_.transpose(order + [rho.n + i for i in order])
    tensor_ = tensor_.reshape(d_keep, d_traced, d_keep, d_traced)
    reduced = np.einsum('ajbj->ab', tensor_)
    return DensityMatrix((reduced + reduced.conj().T) / 2, tuple(rho.dims[i] for i in keep))


class SchmidtDecomposition(typing.NamedTuple):
    coefficients: np.ndarray
    left_basis: np.ndarray
    right_basis: np.ndarray


def _cut_matrix(psi: PureState, cut: Bipartition) -> np.ndarray:
    if cut.n != psi.n:
        raise InvalidArgument(f'Cut {cut.label} is for {cut.n} particles, state has {psi.n}.')
    d_a, d_b = cut.dims(psi.dims)
    order = list(cut.party_a + cut.party_b)
    return psi.amplitudes.reshape(psi.dims).transpose(order).reshape(d_a, d_b)


def _default_cut(psi, cut):
    if cut is not None:
        return cut
    if psi.n != 2:
        raise InvalidArgument('A cut is required for states with more than two subsystems.')
    return Bipartition((0, ), (1, ))


def schmidt_decompose(psi: PureState,
                      cut: Bipartition = None,
                      cutoff: float = RANK_CUTOFF) -> SchmidtDecomposition:
    """Schmidt decomposition psi = sum_k sqrt(lambda_k) |u_k>|v_k> across a cut.

    Args:
        psi: The state.
        cut: The bipartition. Defaults to (first | second) for bipartite states.
        cutoff: Coefficients lambda_k at or below this are dropped.

    Returns:
        The squared Schmidt coefficients in descending order, the left vectors
        as columns of a (d_a, k) matrix and the right vectors as columns of a
        (d_b, k) matrix.
    """
    matrix = _cut_matrix(psi, _default_cut(psi, cut))
    U, s, Vh = np.linalg.svd(matrix, full_matrices=False)
    coefficients = s**2
    keep = coefficients > cutoff
    return SchmidtDecomposition(coefficients[keep], U[:, keep], Vh[keep].T)


def schmidt_rank(psi: PureState, cut: Bipartition = None, cutoff: float = RANK_CUTOFF) -> int:
    return len(schmidt_decompose(psi, cut=cut, cutoff=cutoff).coefficients)


def product_state(dims: typing.Sequence[int], levels: typing.Sequence[int] = None) -> PureState:
    """Computational basis product state |i_1 ... i_n>, all zeros by default."""
    levels = [0] * len(dims) if levels is None else list(levels)
    if len(levels) != len(dims) or any(not 0 <= l < d for l, d in zip(levels, dims)):
        raise InvalidArgument(f'Levels {levels} are not valid for dimensions {tuple(dims)}.')
    amplitudes = np.zeros(int(np.prod(dims)), dtype=np.complex128)
    amplitudes[np.ravel_multi_index(levels, dims)] = 1
    return PureState(amplitudes, tuple(dims))


def mes_state(d: int, r: int = None) -> PureState:
    """The maximally entangled state (1/sqrt(r)) sum_{i<r} |ii> in d x d."""
    r = d if r is None else r
    if d < 1:
        raise InvalidDimension(f'Local dimension must be positive, got {d}.')
    if not 1 <= r <= d:
        raise InvalidRank(f'Schmidt rank {r} is not in 1..{d}.')
    amplitudes = np.zeros(d * d, dtype=np.complex128)
    amplitudes[[i * d + i for i in range(r)]] = 1 / np.sqrt(r)
    return PureState(amplitudes, (d, d))


def rho_s(p: typing.Sequence[float]) -> DensityMatrix:
    """Mixture of three rank-2 two-qutrit states that saturates the r=2 criterion."""
    p = np.asarray(p, dtype=float)
    if p.shape != (3, ) or np.any(p < 0) or abs(p.sum() - 1) > 1e-10:
        raise InvalidArgument(f'p must be a probability 3-vector, got {p.tolist()}.')
    ket = lambda a, b: np.eye(9)[3 * a + b]
    psis = [
        (ket(0, 0) - ket(1, 1)) / np.sqrt(2),
        (ket(1, 2) + ket(2, 0)) / np.sqrt(2),
        (ket(0, 2) + ket(2, 1)) / np.sqrt(2),
    ]
    matrix = sum(weight * np.outer(psi, psi) for weight, psi in zip(p, psis))
    return DensityMatrix(matrix.astype(np.complex128), (3, 3))


def ghz_state(n: int, d: int = 2) -> PureState:
    """(1/sqrt(d)) sum_i |i>^n."""
    if n < 2 or d < 2:
        raise InvalidDimension(f'GHZ state needs n >= 2 and d >= 2, got n={n}, d={d}.')
    amplitudes = np.zeros(d**n, dtype=np.complex128)
    stride = sum(d**k for k in range(n))
    amplitudes[[i * stride for i in range(d)]] = 1 / np.sqrt(d)
    return PureState(amplitudes, (d, ) * n)


def seven_qubit_state() -> PureState:
    """|+> (x) Bell (x) 4-qubit GHZ, up to normalization (|0>+|1>)(|00>+|11>)(|0000>+|1111>)."""
    plus = PureState(np.ones(2) / np.sqrt(2), (2, ))
    return tensor(plus, ghz_state(2, 2), ghz_state(4, 2))


def spin_operators(j) -> typing.Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Spin-j matrices (jx, jy, jz) in the jz eigenbasis ordered m = -j, ..., j.

    Args:
        j: Spin quantum number; 2j must be a nonnegative integer. Strings such
            as '3/2' are accepted.
    """
    try:
        j = fractions.Fraction(j).limit_denominator(1000) if isinstance(j, float) \
            else fractions.Fraction(j)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise InvalidArgument(f'Invalid spin {j!r}.') from exc
    if j < 0 or (2 * j).denominator != 1:
        raise InvalidArgument(f'2j must be a nonnegative integer, got j={j}.')
    j = float(j)
    m = np.arange(-j, j + 1)
    ladder = np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1))
    jplus = np.diag(ladder, k=-1).astype(np.complex128)
    jminus = jplus.conj().T
    jx = (jplus + jminus) / 2
    jy = (jplus - jminus) / 2j
    jz = np.diag(m).astype(np.complex128)
    return jx, jy, jz


def parse_spin(j) -> float:
    """Validate a spin quantum number and return it as a float."""
    jz = spin_operators(j)[2]
    return float((jz.shape[0] - 1) / 2)
