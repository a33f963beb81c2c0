# pylint: disable=invalid-name,too-many-locals,too-many-instance-attributes
"""Schmidt number criteria for bipartite states built from local QFIM blocks.

For a d x d state with Schmidt number at most r, and orthonormal local
generator bases, the local blocks satisfy

    tr F_a <= 4 (d - 1/r),    tr F_b <= 4 (d - 1/r),
    h = tr|X|/4 - sqrt((d - 1/r - tr F_a/4)(d - 1/r - tr F_b/4)) <= r - 1/r,

and the sum of collective QFIs satisfies sum_i F(g_i (x) 1 + 1 (x) h_i) <= 8 (d + r - 2/r).
A violation of any of these certifies Schmidt number larger than r.
"""
import typing
import dataclasses

import numpy as np

from . import states, qfim

VIOLATION_TOLERANCE = 1e-8


def local_bound(d: int, r: int) -> float:
    """Upper bound on tr F_a (and tr F_b) for Schmidt number r."""
    return 4 * (d - 1 / r)


def h_bound(r: int) -> float:
    return r - 1 / r


def sum_bound(d: int, r: int) -> float:
    """Upper bound on the sum of collective QFIs for Schmidt number r."""
    return 8 * (d + r - 2 / r)


def h_statistic(tr_fa: float,
                tr_fb: float,
                tr_norm_x: float,
                d_a: float,
                d_b: float,
                offset: float = 0.0) -> typing.Tuple[float, bool]:
    """The h statistic with party dimensions d_a, d_b.

    Args:
        tr_fa: Trace of the local block of party a.
        tr_fb: Trace of the local block of party b.
        tr_norm_x: Trace norm of the cross block.
        d_a: Dimension of party a.
        d_b: Dimension of party b.
        offset: Subtracted from both dimensions (1/r for the bipartite
            criterion, 0 for the per-cut multipartite statistic).

    Returns:
        The value and whether a factor under the square root was negative
        (beyond tolerance) and had to be clamped at zero.
    """
    factor_a = d_a - offset - tr_fa / 4
    factor_b = d_b - offset - tr_fb / 4
    clamped = min(factor_a, factor_b) < -VIOLATION_TOLERANCE
    value = tr_norm_x / 4 - np.sqrt(max(factor_a, 0.0) * max(factor_b, 0.0))
    return float(value), clamped


@dataclasses.dataclass(frozen=True)
class RankCheck:
    """All criteria evaluated for one Schmidt number hypothesis r."""
    r: int
    h: float
    local_bound: float
    h_bound: float
    sum_bound: float
    clamped: bool
    violated_local_a: bool
    violated_local_b: bool
    violated_h: bool
    violated_sum: bool
    violated_strong: bool

    @property
    def violated(self) -> bool:
        return any((self.violated_local_a, self.violated_local_b, self.violated_h,
                    self.violated_sum, self.violated_strong))


@dataclasses.dataclass(frozen=True)
class WitnessReport:
    """Result of `obs1_report`.

    `h_value` is h evaluated at r = certified_min_schmidt_number (capped at
    the largest r checked), which for saturating states equals r - 1/r.
    `obs2_sum` pairs the generators by index, `strong_sum` uses tr|X| instead
    of tr X and is never smaller.
    """
    d: int
    tr_fa: float
    tr_fb: float
    tr_norm_x: float
    h_value: float
    obs2_sum: float
    strong_sum: float
    per_r: typing.Tuple[RankCheck, ...]
    certified_min_schmidt_number: int

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _check_square(rho: states.DensityMatrix) -> int:
    if rho.n != 2 or rho.dims[0] != rho.dims[1]:
        raise states.UnsupportedShape(f'Expected a d x d bipartite state, got dims {rho.dims}.')
    return rho.dims[0]


def _default_bases(rho, basis_a, basis_b):
    basis_a = states.gellmann_basis(rho.dims[0]) if basis_a is None else basis_a
    basis_b = states.gellmann_basis(rho.dims[1]) if basis_b is None else basis_b
    return basis_a, basis_b


def certify(per_r: typing.Sequence[RankCheck]) -> int:
    violated = [check.r for check in per_r if check.violated]
    return 1 + max(violated) if violated else 1


def obs1_report(rho,
                basis_a: states.BasisSet = None,
                basis_b: states.BasisSet = None,
                max_r: int = None) -> WitnessReport:
    """Evaluate every criterion for r = 1, ..., max_r.

    Args:
        rho: A d x d bipartite state.
        basis_a: Generators for party a, traceless Gell-Mann by default.
        basis_b: Generators for party b, traceless Gell-Mann by default.
        max_r: Largest Schmidt number hypothesis to check, d by default.
    """
    rho = states.as_density(rho)
    d = _check_square(rho)
    basis_a, basis_b = _default_bases(rho, basis_a, basis_b)
    max_r = d if max_r is None else int(max_r)
    if not 1 <= max_r <= d:
        raise states.InvalidRank(f'max_r must be in 1..{d}, got {max_r}.')
    blocks = qfim.qfim_blocks(rho, basis_a, basis_b)
    tr_fa, tr_fb, tr_norm_x = blocks.tr_fa, blocks.tr_fb, blocks.tr_norm_x
    strong_sum = tr_fa + tr_fb + 2 * tr_norm_x
    obs2_sum = _paired_sum(blocks) if len(basis_a) == len(basis_b) else float('nan')
    per_r = []
    for r in range(1, max_r + 1):
        h, clamped = h_statistic(tr_fa, tr_fb, tr_norm_x, d, d, offset=1 / r)
        bound = sum_bound(d, r)
        per_r.append(
            RankCheck(r=r,
                      h=h,
                      local_bound=local_bound(d, r),
                      h_bound=h_bound(r),
                      sum_bound=bound,
                      clamped=clamped,
                      violated_local_a=tr_fa > local_bound(d, r) + VIOLATION_TOLERANCE,
                      violated_local_b=tr_fb > local_bound(d, r) + VIOLATION_TOLERANCE,
                      violated_h=h > h_bound(r) + VIOLATION_TOLERANCE,
                      violated_sum=bool(obs2_sum > bound + VIOLATION_TOLERANCE),
                      violated_strong=strong_sum > bound + VIOLATION_TOLERANCE))
    certified = certify(per_r)
    return WitnessReport(d=d,
                         tr_fa=tr_fa,
                         tr_fb=tr_fb,
                         tr_norm_x=tr_norm_x,
                         h_value=per_r[min(certified, max_r) - 1].h,
                         obs2_sum=obs2_sum,
                         strong_sum=strong_sum,
                         per_r=tuple(per_r),
                         certified_min_schmidt_number=certified)


def _paired_sum(blocks: qfim.QfimBlocks) -> float:
    return float(blocks.tr_fa + blocks.tr_fb + 2 * np.trace(blocks.x))


class CollectiveSum(typing.NamedTuple):
    total: float
    bounds: typing.Dict[int, float]

    def violated(self, r: int) -> bool:
        return self.total > self.bounds[r] + VIOLATION_TOLERANCE


def obs2_value(rho, basis_a: states.BasisSet = None,
               basis_b: states.BasisSet = None) -> CollectiveSum:
    """Sum of QFIs of the collective generators G_i = g_i (x) 1 + 1 (x) h_i.

    Generators are paired by index, so the result depends on how the two bases
    are aligned; `optimize_local_bases` gives the alignment that maximizes it.
    """
    rho = states.as_density(rho)
    d = _check_square(rho)
    basis_a, basis_b = _default_bases(rho, basis_a, basis_b)
    if len(basis_a) != len(basis_b):
        raise states.InvalidArgument(
            f'Bases must have equal size to pair generators, got {len(basis_a)} and {len(basis_b)}.')
    total = _paired_sum(qfim.qfim_blocks(rho, basis_a, basis_b))
    return CollectiveSum(total, {r: sum_bound(d, r) for r in range(1, d + 1)})


def optimize_local_bases(
        rho,
        basis_a: states.BasisSet = None,
        basis_b: states.BasisSet = None) -> typing.Tuple[states.BasisSet, states.BasisSet]:
    """Rotate both bases so that the cross block becomes diagonal and nonnegative.

    With X = U S W^T, party a is recombined with U^T and party b with W^T.
    """
    rho = states.as_density(rho)
    _check_square(rho)
    basis_a, basis_b = _default_bases(rho, basis_a, basis_b)
    if len(basis_a) != len(basis_b):
        raise states.InvalidArgument('Bases must have equal size.')
    x = qfim.qfim_blocks(rho, basis_a, basis_b).x
    U, _, Vh = np.linalg.svd(x)
    return basis_a.transformed(U.T), basis_b.transformed(Vh)


def nogo_bound(A, B, r: int) -> float:
    """Largest QFI of A (x) 1 + 1 (x) B reachable with Schmidt rank r."""
    if r < 1:
        raise states.InvalidArgument(f'r must be at least 1, got {r}.')
    mu_a = np.linalg.eigvalsh(states.as_observable(A, name='A'))
    mu_b = np.linalg.eigvalsh(states.as_observable(B, name='B'))
    if r == 1:
        return float((mu_a[-1] - mu_a[0])**2 + (mu_b[-1] - mu_b[0])**2)
    return float((mu_a[-1] + mu_b[-1] - mu_a[0] - mu_b[0])**2)


def global_qfi_bound(M) -> float:
    """Largest QFI of M over all states, (mu_max - mu_min)^2."""
    mu = np.linalg.eigvalsh(states.as_observable(M, name='M'))
    return float((mu[-1] - mu[0])**2)


def nogo_saturating_state(A, B, r: int) -> states.PureState:
    """A state that attains `nogo_bound(A, B, r)`.

    For r = 1 it is the product of balanced superpositions of extremal
    eigenvectors; for r >= 2 it is the Bell-type superposition of the two
    extremal product eigenvectors.
    """
    if r < 1:
        raise states.InvalidArgument(f'r must be at least 1, got {r}.')
    _, vectors_a = np.linalg.eigh(states.as_observable(A, name='A'))
    _, vectors_b = np.linalg.eigh(states.as_observable(B, name='B'))
    dims = (vectors_a.shape[0], vectors_b.shape[0])
    if r == 1:
        left = (vectors_a[:, 0] + vectors_a[:, -1]) / np.sqrt(2)
        right = (vectors_b[:, 0] + vectors_b[:, -1]) / np.sqrt(2)
        return states.PureState(np.kron(left, right), dims)
    amplitudes = (np.kron(vectors_a[:, -1], vectors_b[:, -1]) +
                  np.kron(vectors_a[:, 0], vectors_b[:, 0])) / np.sqrt(2)
    return states.PureState(amplitudes, dims)


def linear_entropy_lower_bound(rho, basis: states.BasisSet = None, party: int = 0) -> float:
    """tr F_party / 4 - (d_party - 1).

    This lower-bounds the average linear entropy 1 - tr(rho_party^2) of the
    marginals over any pure-state decomposition, with equality for pure states.
    """
    rho = states.as_density(rho)
    if rho.n != 2 or party not in (0, 1):
        raise states.InvalidArgument('Expected a bipartite state and party 0 or 1.')
    d = rho.dims[party]
    basis = states.gellmann_basis(d) if basis is None else basis
    other = states.gellmann_basis(rho.dims[1 - party])
    bases = (basis, other) if party == 0 else (other, basis)
    blocks = qfim.qfim_blocks(rho, *bases)
    tr_f = blocks.tr_fa if party == 0 else blocks.tr_fb
    return tr_f / 4 - (d - 1)


class TangleBound(typing.NamedTuple):
    value: float
    unclamped: float


def two_tangle_lower_bound(rho,
                           basis_a: states.BasisSet = None,
                           basis_b: states.BasisSet = None) -> TangleBound:
    """Lower bound max(tr F_a, tr F_b)/2 - 2(d - 1) on the 2-tangle.

    The value is clamped at zero; `unclamped` equals the 2-tangle
    2 (1 - tr rho_a^2) for pure states.
    """
    rho = states.as_density(rho)
    if rho.n != 2:
        raise states.InvalidArgument(f'Expected a bipartite state, got dims {rho.dims}.')
    basis_a, basis_b = _default_bases(rho, basis_a, basis_b)
    blocks = qfim.qfim_blocks(rho, basis_a, basis_b)
    unclamped = max(blocks.tr_fa / 2 - 2 * (rho.dims[0] - 1), blocks.tr_fb / 2 - 2 *
                    (rho.dims[1] - 1))
    return TangleBound(max(unclamped, 0.0), unclamped)


def _local_operators(rho: states.DensityMatrix, basis_a: states.BasisSet,
                     basis_b: states.BasisSet) -> np.ndarray:
    eye_a, eye_b = np.eye(rho.dims[0]), np.eye(rho.dims[1])
    return np.array([np.kron(g, eye_b) for g in basis_a] + [np.kron(eye_a, h) for h in basis_b])


def matrix_bound_gap(rho,
                     probabilities: typing.Sequence[float],
                     decomposition: typing.Sequence[states.PureState],
                     basis_a: states.BasisSet = None,
                     basis_b: states.BasisSet = None) -> float:
    """Smallest eigenvalue of 4 sum_k p_k Gamma_k - F_rho over the local generators.

    Args:
        rho: The mixed state.
        probabilities: Mixing weights p_k.
        decomposition: Pure states psi_k with rho = sum_k p_k |psi_k><psi_k|.
        basis_a: Generators for party a.
        basis_b: Generators for party b.
    """
    rho = states.as_density(rho)
    basis_a, basis_b = _default_bases(rho, basis_a, basis_b)
    probabilities = np.asarray(probabilities, dtype=float)
    if len(probabilities) != len(decomposition):
        raise states.InvalidArgument('Need one probability per pure state.')
    mixture = sum(p * states.pure_to_density(psi).matrix
                  for p, psi in zip(probabilities, decomposition))
    if np.abs(mixture - rho.matrix).max() > 1e-8:
        raise states.InvalidArgument('The decomposition does not reproduce the state.')
    ops = _local_operators(rho, basis_a, basis_b)
    bound = 4 * sum(p * qfim.covariance_matrix(psi, ops)
                    for p, psi in zip(probabilities, decomposition))
    return float(np.linalg.eigvalsh(bound - qfim.qfim(rho, ops)).min())


def covariance_bound_gap(rho,
                         basis_a: states.BasisSet = None,
                         basis_b: states.BasisSet = None) -> float:
    """Smallest eigenvalue of 4 Gamma_rho - F_rho over the local generators."""
    rho = states.as_density(rho)
    basis_a, basis_b = _default_bases(rho, basis_a, basis_b)
    ops = _local_operators(rho, basis_a, basis_b)
    return float(
        np.linalg.eigvalsh(4 * qfim.covariance_matrix(rho, ops) - qfim.qfim(rho, ops)).min())
