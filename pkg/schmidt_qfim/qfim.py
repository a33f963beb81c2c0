# pylint: disable=invalid-name,too-many-locals
"""Quantum Fisher information from the spectral decomposition of a state."""
import typing
import dataclasses

import numpy as np

from . import states

SUPPORT_CUTOFF = 1e-12
PAIR_CHUNK = 256


class Spectrum(typing.NamedTuple):
    """Eigendecomposition of a state restricted to the pairs that carry Fisher information.

    `weights[p]` is 2 (l_p - m_p)^2 / (l_p + m_p) for the ordered eigenvalue
    pair p; pairs whose sum falls below the support cutoff, or whose weight is
    exactly zero, are dropped.
    """
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    left: np.ndarray
    right: np.ndarray
    weights: np.ndarray


def spectrum(rho) -> Spectrum:
    rho = states.as_density(rho)
    eigenvalues, eigenvectors = np.linalg.eigh(rho.matrix)
    eigenvalues = np.clip(eigenvalues, 0, None)
    total = eigenvalues[:, np.newaxis] + eigenvalues[np.newaxis, :]
    difference = (eigenvalues[:, np.newaxis] - eigenvalues[np.newaxis, :])**2
    support = total > SUPPORT_CUTOFF * eigenvalues.sum()
    weights = np.zeros_like(total)
    weights[support] = 2 * difference[support] / total[support]
    left, right = np.nonzero(weights > 0)
    return Spectrum(eigenvalues, eigenvectors, left, right, weights[left, right])


def qfim_from_pairs(coordinates: np.ndarray,
                    weights: np.ndarray,
                    other: np.ndarray = None) -> np.ndarray:
    """Fisher information from transition coordinates.

    Args:
        coordinates: Shape (k, P), entry [j, p] = <l_p|H_j|m_p>.
        weights: Pair weights of shape (P,).
        other: Coordinates of a second operator list, for off-diagonal blocks.
    """
    other = coordinates if other is None else other
    return np.real((coordinates * weights) @ other.conj().T)


def _check_operators(ops, dim) -> np.ndarray:
    ops = [states.as_observable(H, name=f'operator {i}') for i, H in enumerate(ops)]
    if not ops:
        raise states.InvalidArgument('At least one operator is required.')
    for i, H in enumerate(ops):
        if H.shape[0] != dim:
            raise states.InvalidArgument(
                f'Operator {i} has dimension {H.shape[0]}, the state has {dim}.')
    return np.array(ops)


def _transition_coordinates(spec: Spectrum, ops: np.ndarray) -> np.ndarray:
    V = spec.eigenvectors
    return np.einsum('ip,kij,jp->kp', V[:, spec.left].conj(), ops, V[:, spec.right], optimize=True)


def qfi(rho, H) -> float:
    """Quantum Fisher information of `rho` for the unitary generated by `H`.

    Args:
        rho: A DensityMatrix (or PureState).
        H: Hermitian generator of the same dimension.
    """
    rho = states.as_density(rho)
    H = states.as_observable(H, name='generator')
    if H.shape[0] != rho.dim:
        raise states.InvalidArgument(f'Generator has dimension {H.shape[0]}, state has {rho.dim}.')
    return float(qfim(rho, [H])[0, 0])


def qfim(rho, ops) -> np.ndarray:
    """Quantum Fisher information matrix for a list of generators."""
    rho = states.as_density(rho)
    ops = _check_operators(ops, rho.dim)
    spec = spectrum(rho)
    F = qfim_from_pairs(_transition_coordinates(spec, ops), spec.weights)
    return (F + F.T) / 2


def _expectations(rho: states.DensityMatrix, ops: np.ndarray) -> np.ndarray:
    return np.real(np.einsum('ij,kji->k', rho.matrix, ops))


def covariance_matrix(rho, ops) -> np.ndarray:
    """Symmetrized covariance matrix 1/2 <{g_j, g_k}> - <g_j><g_k>."""
    rho = states.as_density(rho)
    ops = _check_operators(ops, rho.dim)
    means = _expectations(rho, ops)
    second = np.real(np.einsum('ab,jbc,kca->jk', rho.matrix, ops, ops, optimize=True))
    second = (second + second.T) / 2
    return second - np.outer(means, means)


def variance(state, H) -> float:
    """Variance of an observable, <H^2> - <H>^2."""
    rho = states.as_density(state)
    H = states.as_observable(H, dim=rho.dim)
    return float(covariance_matrix(rho, [H])[0, 0])


def variance_sum(state, ops) -> float:
    """Sum of variances of a list of observables."""
    return float(np.trace(covariance_matrix(state, ops)))


def trace_norm(M) -> float:
    """Sum of singular values."""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.svd(M, compute_uv=False).sum())


@dataclasses.dataclass(frozen=True)
class QfimBlocks:
    """QFIM of a bipartite state over local generators, split into blocks.

    The full matrix is [[f_a, x], [x.T, f_b]] over the operator list
    (g_k (x) 1 for k in bases_a) + (1 (x) h_l for l in bases_b). For
    multi-particle parties each side carries one basis per particle and the
    party basis is their tensor product.
    """
    f_a: np.ndarray
    f_b: np.ndarray
    x: np.ndarray
    bases_a: typing.Tuple[states.BasisSet, ...]
    bases_b: typing.Tuple[states.BasisSet, ...]

    @property
    def basis_a(self) -> states.BasisSet:
        return self.bases_a[0] if len(self.bases_a) == 1 else states.tensor_basis(self.bases_a)

    @property
    def basis_b(self) -> states.BasisSet:
        return self.bases_b[0] if len(self.bases_b) == 1 else states.tensor_basis(self.bases_b)

    @property
    def tr_fa(self) -> float:
        return float(np.trace(self.f_a))

    @property
    def tr_fb(self) -> float:
        return float(np.trace(self.f_b))

    @property
    def tr_norm_x(self) -> float:
        return trace_norm(self.x)

    def full(self) -> np.ndarray:
        return np.block([[self.f_a, self.x], [self.x.T, self.f_b]])

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.full()).min())

    def transformed(self, O_a: np.ndarray, O_b: np.ndarray) -> 'QfimBlocks':
        """Blocks after recombining the bases with orthogonal O_a and O_b."""
        assert len(self.bases_a) == len(self.bases_b) == 1, 'Only single-basis parties rotate.'
        return QfimBlocks(f_a=O_a @ self.f_a @ O_a.T,
                          f_b=O_b @ self.f_b @ O_b.T,
                          x=O_a @ self.x @ O_b.T,
                          bases_a=(self.bases_a[0].transformed(O_a), ),
                          bases_b=(self.bases_b[0].transformed(O_b), ))


class CutTraces(typing.NamedTuple):
    """Traces of the local blocks and the cross block for one cut."""
    tr_fa: float
    tr_fb: float
    x: np.ndarray


def _party_coordinates(M: np.ndarray, dims: typing.Sequence[int],
                       bases: typing.Sequence[states.BasisSet]) -> np.ndarray:
    """Coordinates Tr(g_{j1} (x) ... (x) g_{jk} M_p) without building party operators.

    Args:
        M: Stack of party operators, shape (P, D, D) with D the product of `dims`.
        dims: Particle dimensions inside the party.
        bases: One basis per particle.

    Returns:
        Array of shape (prod |basis|, P) in `np.kron` order.
    """
    P, k = M.shape[0], len(dims)
    T = M.reshape((P, ) + tuple(dims) * 2)
    T = T.transpose([0] + [axis for t in range(k) for axis in (1 + t, 1 + k + t)])
    T = T.reshape((P, ) + tuple(d * d for d in dims))
    for basis in bases:
        W = basis.elements.transpose(0, 2, 1).reshape(len(basis), -1)
        T = np.tensordot(T, W, axes=([1], [1]))
    return T.reshape(P, -1).T


def _check_bases(rho: states.DensityMatrix, bases) -> typing.Tuple[states.BasisSet, ...]:
    bases = tuple(bases)
    if len(bases) != rho.n:
        raise states.InvalidArgument(f'Got {len(bases)} bases for {rho.n} subsystems.')
    for i, (basis, d) in enumerate(zip(bases, rho.dims)):
        if basis.dim != d:
            raise states.InvalidArgument(f'Basis {i} has dimension {basis.dim}, subsystem has {d}.')
    return bases


def _cut_chunks(spec: Spectrum, dims, cut: states.Bipartition, bases):
    """Yield (coordinates_a, coordinates_b, weights) over chunks of support pairs."""
    d_a, d_b = cut.dims(dims)
    order = list(cut.party_a + cut.party_b)
    used, position = np.unique(np.concatenate([spec.left, spec.right]), return_inverse=True)
    left, right = np.split(position, 2)
    vectors = spec.eigenvectors[:, used].T.reshape((len(used), ) + tuple(dims))
    vectors = vectors.transpose([0] + [1 + i for i in order]).reshape(len(used), d_a, d_b)
    dims_a = [dims[i] for i in cut.party_a]
    dims_b = [dims[i] for i in cut.party_b]
    bases_a = [bases[i] for i in cut.party_a]
    bases_b = [bases[i] for i in cut.party_b]
    for start in range(0, len(spec.weights), PAIR_CHUNK):
        chunk = slice(start, start + PAIR_CHUNK)
        vl, vm = vectors[left[chunk]].conj(), vectors[right[chunk]]
        # <l|g (x) 1|m> = Tr(g Tr_b|m><l|), and likewise for party b.
        reduced_a = np.einsum('pib,pjb->pij', vm, vl)
        reduced_b = np.einsum('pai,paj->pij', vm, vl)
        yield (_party_coordinates(reduced_a, dims_a, bases_a),
               _party_coordinates(reduced_b, dims_b, bases_b), spec.weights[chunk])


def cut_blocks(rho, cut: states.Bipartition, bases, spec: Spectrum = None) -> QfimBlocks:
    """QFIM blocks across a cut with per-particle bases.

    Args:
        rho: The state.
        cut: The bipartition.
        bases: One BasisSet per subsystem of `rho`.
        spec: A precomputed `spectrum(rho)` to share between cuts.
    """
    rho = states.as_density(rho)
    bases = _check_bases(rho, bases)
    spec = spectrum(rho) if spec is None else spec
    sizes = [int(np.prod([len(bases[i]) for i in party])) for party in (cut.party_a, cut.party_b)]
    f_a, f_b, x = np.zeros((sizes[0], ) * 2), np.zeros((sizes[1], ) * 2), np.zeros(sizes)
    for coordinates_a, coordinates_b, weights in _cut_chunks(spec, rho.dims, cut, bases):
        f_a += qfim_from_pairs(coordinates_a, weights)
        f_b += qfim_from_pairs(coordinates_b, weights)
        x += qfim_from_pairs(coordinates_a, weights, coordinates_b)
    return QfimBlocks(f_a=(f_a + f_a.T) / 2,
                      f_b=(f_b + f_b.T) / 2,
                      x=x,
                      bases_a=tuple(bases[i] for i in cut.party_a),
                      bases_b=tuple(bases[i] for i in cut.party_b))


def cut_traces(rho, cut: states.Bipartition, bases, spec: Spectrum = None) -> CutTraces:
    """Like `cut_blocks`, but only keeps the traces of the local blocks.

    The local blocks of a large party (e.g. six qubits, 4096 generators) are
    never formed.
    """
    rho = states.as_density(rho)
    bases = _check_bases(rho, bases)
    spec = spectrum(rho) if spec is None else spec
    tr_fa = tr_fb = 0.0
    x = None
    for coordinates_a, coordinates_b, weights in _cut_chunks(spec, rho.dims, cut, bases):
        tr_fa += float(np.sum(weights * np.abs(coordinates_a)**2))
        tr_fb += float(np.sum(weights * np.abs(coordinates_b)**2))
        block = qfim_from_pairs(coordinates_a, weights, coordinates_b)
        x = block if x is None else x + block
    if x is None:
        sizes = [int(np.prod([len(bases[i]) for i in party])) for party in (cut.party_a, cut.party_b)]
        x = np.zeros(sizes)
    return CutTraces(tr_fa, tr_fb, x)


def qfim_blocks(rho, basis_a: states.BasisSet, basis_b: states.BasisSet) -> QfimBlocks:
    """Local and cross QFIM blocks of a bipartite state.

    Args:
        rho: A state with dims (d_a, d_b).
        basis_a: Generators for party a.
        basis_b: Generators for party b.
    """
    rho = states.as_density(rho)
    if rho.n != 2:
        raise states.InvalidArgument(f'Expected a bipartite state, got dims {rho.dims}.')
    return cut_blocks(rho, states.Bipartition((0, ), (1, )), (basis_a, basis_b))
