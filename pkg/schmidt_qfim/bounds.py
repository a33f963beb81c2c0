# pylint: disable=invalid-name,too-many-locals,too-many-arguments,too-many-instance-attributes
"""Largest sums of collective variances over states of bounded Schmidt rank.

A Schmidt-rank-r state of a d x d system is parametrized as

    psi = U diag(sqrt(lambda)) V^T,

with U, V d x r isometries and lambda on the probability simplex. The sum of
variances is maximized by projected gradient ascent that alternates between
the isometries (retracted with a polar decomposition) and the weights
(projected back onto the simplex), from several random starting points.
"""
import typing
import warnings
import itertools
import dataclasses

import numpy as np
from scipy import linalg, optimize

from . import states, tools

DEFAULT_RESTARTS = 32
DEFAULT_MAX_ITERS = 1000
WEIGHT_FLOOR = 1e-3
INITIAL_STEP = 0.1
MAX_STEP = 10.0
MIN_STEP = 1e-12
STALL_ITERATIONS = 5


@dataclasses.dataclass(frozen=True)
class OptimConfig:
    """Optimizer settings.

    Args:
        restarts: Number of random starting points per Schmidt rank.
        max_iters: Iteration cap for each ascent.
        tol: An ascent stops after a few iterations improving the objective by less than this.
        seed: Base seed; `tools.get_default_seed()` when None.
        aligned_only: Restrict Schmidt vectors to computational basis pairs |k>|d-1-k>
            (the j_z eigenbasis with opposite magnetic numbers for spin operators).
        workers: Threads used for restarts.
        verbose: Show progress.
    """
    restarts: int = DEFAULT_RESTARTS
    max_iters: int = DEFAULT_MAX_ITERS
    tol: float = 1e-12
    seed: typing.Optional[int] = None
    aligned_only: bool = False
    workers: int = 1
    verbose: bool = False

    def __post_init__(self):
        if self.restarts < 1:
            raise states.InvalidArgument(f'restarts must be at least 1, got {self.restarts}.')
        if self.max_iters < 1:
            raise states.InvalidArgument(f'max_iters must be at least 1, got {self.max_iters}.')
        if not self.tol > 0:
            raise states.InvalidArgument(f'tol must be positive, got {self.tol}.')
        if self.seed is None:
            object.__setattr__(self, 'seed', tools.get_default_seed())


@dataclasses.dataclass(frozen=True)
class SpinTriple:
    """Collective spin operators J_k = j_k (x) 1 + sign 1 (x) j_k for k in `components`."""
    j: float
    sign: str = '+'
    components: str = 'xy'

    def __post_init__(self):
        object.__setattr__(self, 'j', states.parse_spin(self.j))
        if self.sign not in ('+', '-'):
            raise states.InvalidArgument(f'sign must be "+" or "-", got {self.sign!r}.')
        components = ''.join(sorted(set(self.components)))
        if not components or not set(components) <= set('xyz'):
            raise states.InvalidArgument(
                f'components must be a nonempty subset of "xyz", got {self.components!r}.')
        object.__setattr__(self, 'components', components)

    @property
    def d(self) -> int:
        return int(round(2 * self.j)) + 1

    def operators(self) -> np.ndarray:
        return spin_collective_ops(self.j, self.components, self.sign)


@dataclasses.dataclass(frozen=True)
class BoundResult:
    """Best state found for one Schmidt rank.

    `variance_sum` is the sum of variances; `value` = 4 x variance_sum is the
    corresponding bound on the sum of QFIs.
    """
    r: int
    variance_sum: float
    state: states.PureState
    converged: bool
    restarts: int
    iterations: int

    @property
    def value(self) -> float:
        return 4 * self.variance_sum


def spin_collective_ops(j, components: str = 'xy', sign: str = '+') -> np.ndarray:
    """Stack of collective spin operators on two spin-j particles."""
    triple = SpinTriple(j, sign, components)
    local = dict(zip('xyz', states.spin_operators(triple.j)))
    eye = np.eye(triple.d)
    factor = 1 if triple.sign == '+' else -1
    return np.array(
        [np.kron(local[k], eye) + factor * np.kron(eye, local[k]) for k in triple.components])


def variance_cap(ops) -> float:
    """Sum of the largest possible variances, sum_k (mu_max - mu_min)^2 / 4."""
    total = 0.0
    for M in ops:
        mu = np.linalg.eigvalsh(states.as_observable(M))
        total += (mu[-1] - mu[0])**2 / 4
    return float(total)


def project_simplex(v: np.ndarray, z: float = 1) -> np.ndarray:
    """Euclidean projection onto the simplex {w >= 0, sum w = z}."""
    n = v.shape[0]
    u = np.sort(v)[::-1]
    cssv = np.cumsum(u) - z
    ind = np.arange(1, n + 1)
    cond = u - cssv / ind > 0
    rho = ind[cond][-1]
    theta = cssv[cond][-1] / float(rho)
    return np.maximum(v - theta, 0)


class _Objective:
    """Sum of variances and its gradient with respect to conj(psi)."""

    def __init__(self, ops: np.ndarray):
        self.ops = ops
        self.square_sum = np.einsum('kij,kjl->il', ops, ops)

    def __call__(self, psi: np.ndarray) -> typing.Tuple[float, np.ndarray]:
        applied = self.ops @ psi
        means = np.real(applied @ psi.conj())
        squared = self.square_sum @ psi
        value = float(np.real(np.vdot(psi, squared)) - np.sum(means**2))
        return value, squared - 2 * means @ applied


class _Point(typing.NamedTuple):
    weights: np.ndarray
    U: np.ndarray
    V: np.ndarray

    @property
    def psi(self) -> np.ndarray:
        return ((self.U * np.sqrt(self.weights)) @ self.V.T).ravel()


def _retract(M: np.ndarray) -> np.ndarray:
    return linalg.polar(M)[0]


def _line_search(objective, value, make, step):
    """Backtrack from `step` until `make(step)` improves the objective.

    Returns the new point, value, gradient and the next trial step, or None
    for the point when no ascent was found.
    """
    while step > MIN_STEP:
        point = make(step)
        candidate, gradient = objective(point.psi)
        if candidate > value:
            return point, candidate, gradient, min(2 * step, MAX_STEP)
        step /= 2
    return None, value, None, INITIAL_STEP


def _ascend(objective: _Objective, point: _Point, d: int, cfg: OptimConfig,
            fixed_vectors: bool = False):
    value, gradient = objective(point.psi)
    step_vectors = step_weights = INITIAL_STEP
    stalled = 0
    converged = False
    iteration = 0
    for iteration in range(1, cfg.max_iters + 1):
        previous = value
        moved = False
        s = np.sqrt(point.weights)
        if not fixed_vectors:
            G = gradient.reshape(d, d)
            grad_U = (G @ point.V.conj()) * s
            grad_V = (G.T @ point.U.conj()) * s
            current = point
            new, value, new_gradient, step_vectors = _line_search(
                objective, value, lambda t: current._replace(U=_retract(current.U + t * grad_U),
                                                             V=_retract(current.V + t * grad_V)),
                step_vectors)
            if new is not None:
                point, gradient, moved = new, new_gradient, True
        if len(point.weights) > 1:
            G = gradient.reshape(d, d)
            s = np.sqrt(point.weights)
            grad_s = 2 * np.real(np.einsum('ir,ij,jr->r', point.U.conj(), G, point.V.conj()))
            grad_weights = grad_s / (2 * np.maximum(s, WEIGHT_FLOOR))
            current = point
            new, value, new_gradient, step_weights = _line_search(
                objective, value,
                lambda t: current._replace(weights=project_simplex(current.weights +
                                                                   t * grad_weights)),
                step_weights)
            if new is not None:
                point, gradient, moved = new, new_gradient, True
        if not moved:
            converged = True
            break
        stalled = stalled + 1 if value - previous < cfg.tol else 0
        if stalled >= STALL_ITERATIONS:
            converged = True
            break
    return value, point, converged, iteration


def _random_isometry(d: int, r: int, rng: np.random.Generator) -> np.ndarray:
    Q, _ = np.linalg.qr(rng.normal(size=(d, r)) + 1j * rng.normal(size=(d, r)))
    return Q


def _extend(U: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Append one column orthonormal to the columns of U."""
    v = rng.normal(size=U.shape[0]) + 1j * rng.normal(size=U.shape[0])
    v = v - U @ (U.conj().T @ v)
    return np.column_stack([U, v / np.linalg.norm(v)])


def _check_ops(ops, d: int) -> np.ndarray:
    ops = np.array([states.as_observable(M, dim=d * d, name=f'operator {k}')
                    for k, M in enumerate(ops)])
    if len(ops) == 0:
        raise states.InvalidArgument('At least one operator is required.')
    return ops


def _aligned_starts(d: int, r: int) -> typing.Iterator[_Point]:
    eye = np.eye(d, dtype=np.complex128)
    flipped = eye[:, ::-1]
    alternating = np.array([(-1)**k for k in range(d)])
    for subset in itertools.combinations(range(d), r):
        subset = list(subset)
        for phases in (np.ones(d), alternating):
            yield _Point(np.full(r, 1 / r), eye[:, subset], (flipped * phases)[:, subset])


def _finish(r, d, best, restarts, cfg, label) -> BoundResult:
    value, point, converged, iterations = best
    if not converged:
        warnings.warn(f'{label}: best ascent did not converge within {cfg.max_iters} iterations.')
    psi = point.psi
    return BoundResult(r=r,
                       variance_sum=value,
                       state=states.PureState(psi / np.linalg.norm(psi), (d, d)),
                       converged=converged,
                       restarts=restarts,
                       iterations=iterations)


def bound_Br(ops, r: int, d: int, cfg: OptimConfig = None,
             previous: BoundResult = None) -> BoundResult:
    """Largest sum of variances of `ops` over Schmidt-rank-r states, from below.

    Args:
        ops: Collective Hermitian operators on the d x d system.
        r: Schmidt rank.
        d: Local dimension.
        cfg: Optimizer settings.
        previous: Result for rank r - 1. When omitted, ranks 1, ..., r - 1 are
            computed first so that results are non-decreasing in r.

    Returns:
        A BoundResult; multiply `variance_sum` by 4 (or use `value`) for the
        QFI bound.
    """
    if not 1 <= r <= d:
        raise states.InvalidRank(f'Schmidt rank {r} is not in 1..{d}.')
    cfg = OptimConfig() if cfg is None else cfg
    if previous is None and r > 1 and not cfg.aligned_only:
        previous = bound_table_for(ops, d, r - 1, cfg)[-1]
    return _bound_level(_check_ops(ops, d), r, d, cfg, previous)


def _bound_level(ops: np.ndarray, r: int, d: int, cfg: OptimConfig,
                 previous: typing.Optional[BoundResult]) -> BoundResult:
    objective = _Objective(ops)
    if cfg.aligned_only:
        runs = [_ascend(objective, start, d, cfg, fixed_vectors=True) for start in _aligned_starts(d, r)]
        best = max(runs, key=lambda run: run[0])
        return _finish(r, d, best, len(runs), cfg, f'aligned rank {r}')

    def restart(index):
        rng = np.random.default_rng([cfg.seed, r, index])
        if index == 0 and previous is not None:
            U, s, Vh = np.linalg.svd(previous.state.amplitudes.reshape(d, d))
            k = r - 1
            weights = np.append(s[:k]**2, 0.0)
            start = _Point(weights / weights.sum(), _extend(U[:, :k], rng),
                           _extend(Vh[:k].T, rng))
        else:
            start = _Point(rng.dirichlet(np.ones(r)), _random_isometry(d, r, rng),
                           _random_isometry(d, r, rng))
        return _ascend(objective, start, d, cfg)

    if cfg.verbose:
        print(f'Rank {r}: {cfg.restarts} restarts.')
    runs = tools.parallel_map(restart,
                              range(cfg.restarts),
                              workers=cfg.workers,
                              verbose=cfg.verbose,
                              desc=f'Rank {r}')
    # Ties go to the lowest restart index, so the merge does not depend on scheduling.
    best = max(runs, key=lambda run: run[0])
    result = _finish(r, d, best, cfg.restarts, cfg, f'rank {r}')
    if previous is not None and previous.variance_sum > result.variance_sum:
        return dataclasses.replace(previous, r=r, restarts=cfg.restarts)
    return result


def bound_table_for(ops, d: int, max_r: int = None, cfg: OptimConfig = None) -> typing.List[BoundResult]:
    """Results for r = 1, ..., max_r, each level seeded with the one below."""
    cfg = OptimConfig() if cfg is None else cfg
    max_r = d if max_r is None else max_r
    if not 1 <= max_r <= d:
        raise states.InvalidRank(f'Schmidt rank {max_r} is not in 1..{d}.')
    ops = _check_ops(ops, d)
    results: typing.List[BoundResult] = []
    for r in range(1, max_r + 1):
        results.append(_bound_level(ops, r, d, cfg, results[-1] if results else None))
    return results


def bound_table(j, components: str = 'xy', sign: str = '+', cfg: OptimConfig = None,
                max_r: int = None) -> typing.List[BoundResult]:
    """Per-rank results for two spin-j particles.

    Args:
        j: Spin quantum number.
        components: Subset of 'xyz'.
        sign: '+' for j_k (x) 1 + 1 (x) j_k, '-' for the difference.
        cfg: Optimizer settings.
        max_r: Largest Schmidt rank, 2j + 1 by default.
    """
    triple = SpinTriple(j, sign, components)
    return bound_table_for(triple.operators(), triple.d, max_r=max_r, cfg=cfg)


def _aligned_objective(s: np.ndarray, couplings: np.ndarray, m: np.ndarray, perp: int,
                       use_z: bool) -> float:
    value = perp / 2 * np.sum(2 * couplings * (s[:-1] + s[1:])**2)
    if use_z:
        weights = s**2
        value += 4 * np.sum(weights * m**2) - 4 * np.sum(weights * m)**2
    return float(value)


def spin_bound_aligned(j, r: int, components: str = 'xy', sign: str = '+') -> float:
    """Largest sum of variances over states sum_k sqrt(lambda_k) |m_k>|-m_k> with r terms.

    The maximum is taken over all r-subsets of levels. For sign '-' the Schmidt
    vectors of party b carry alternating phases, which adds the J_z variance
    4 sum lambda m^2 - 4 (sum lambda m)^2; for sign '+' the J_z variance of
    these states is zero.
    """
    triple = SpinTriple(j, sign, components)
    d, j = triple.d, triple.j
    if not 1 <= r <= d:
        raise states.InvalidRank(f'Schmidt rank {r} is not in 1..{d}.')
    m = np.arange(-j, j + 1)
    couplings = (j * (j + 1) - m[:-1] * (m[:-1] + 1)) / 2
    perp = len(set(triple.components) & set('xy'))
    use_z = 'z' in triple.components and triple.sign == '-'
    best = -np.inf
    for subset in itertools.combinations(range(d), r):
        subset = list(subset)

        def negative(x, subset=subset):
            s = np.zeros(d)
            s[subset] = x
            return -_aligned_objective(s, couplings, m, perp, use_z)

        quadratic = np.zeros((d, d))
        quadratic[np.arange(d - 1), np.arange(1, d)] = couplings
        quadratic = quadratic + quadratic.T + np.diag(np.append(couplings, 0) + np.append(0, couplings))
        _, vectors = np.linalg.eigh(quadratic[np.ix_(subset, subset)])
        starts = [np.full(r, 1 / np.sqrt(r)), np.abs(vectors[:, -1])]
        for x0 in starts:
            result = optimize.minimize(negative,
                                       x0,
                                       method='SLSQP',
                                       bounds=[(0, 1)] * r,
                                       constraints=[{
                                           'type': 'eq',
                                           'fun': lambda x: np.sum(x**2) - 1
                                       }],
                                       options={
                                           'ftol': 1e-12,
                                           'maxiter': 500
                                       })
            x = np.clip(result.x, 0, None)
            x = x / np.linalg.norm(x)
            best = max(best, -negative(x))
    return float(best)


def spin_bound_r2_analytic(j, components: str = 'xy') -> float:
    """Closed-form variance sum of J_x and J_y over j_z-aligned Schmidt-rank-2 states.

    This equals `spin_bound_aligned(j, 2)`. From j = 2 on, unaligned rank-2 states
    reach more, so `bound_Br` at r = 2 is only bounded below by it.
    """
    if set(components) != set('xy'):
        raise NotImplementedError(f'Unsupported components {components!r}, only "xy" is solved.')
    j = states.parse_spin(j)
    if float(j).is_integer():
        return float(2 * j**2 + 2 * j - 1 + np.sqrt(j**4 + 2 * j**3 + j**2 + 1))
    return float(-1 / 4 + 3 * j * (j + 1))


def global_spin_bound(j) -> float:
    """Largest variance sum of J_x and J_y over all states, 2j(2j + 1)."""
    j = states.parse_spin(j)
    return float(2 * j * (2 * j + 1))
