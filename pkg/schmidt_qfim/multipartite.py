# pylint: disable=invalid-name,too-many-locals,too-many-arguments
"""Entanglement-dimensionality vectors of multipartite states.

Every bipartition j of an n-particle state gets the statistic

    h_j = tr|X_j|/4 - sqrt((d_j - tr F_j/4)(d_jbar - tr F_jbar/4)),

with d_j the party dimensions and the party generators the tensor products
of complete single-particle bases. If the state is a mixture of pure states
whose Schmidt ranks across cut j are r_j, then h_j <= sum_k p_k f(r_j,k) with
f(r) = r - 2/r. A candidate vector v is rejected when no mixture of
class-respecting permutations of v satisfies all of these inequalities.
"""
import typing
import warnings
import dataclasses

import numpy as np
import pandas as pd
from scipy import optimize, special

from . import states, qfim, tools, witnesses

MAX_PARTICLES = 12
MAX_DENSE_PARTICLES = 7
MAX_DENSE_DIM = 512
FEASIBILITY_TOLERANCE = 1e-8

FEASIBLE = 'feasible'
INFEASIBLE = 'infeasible'
UNDECIDED = 'undecided'


def rank_value(r) -> float:
    """f(r) = r - 2/r, the largest h_j of a pure state with Schmidt rank r across j."""
    return r - 2 / r


def class_sizes(n: int) -> typing.List[typing.Tuple[int, int]]:
    """(size class, number of cuts) for every class, smallest party size first."""
    sizes = []
    for c in range(1, n // 2 + 1):
        count = int(special.comb(n, c, exact=True))
        sizes.append((c, count // 2 if 2 * c == n else count))
    return sizes


def enumerate_bipartitions(n: int) -> typing.List[states.Bipartition]:
    """All 2^(n-1) - 1 cuts of n particles, ordered by size class, then index."""
    if not 2 <= n <= MAX_PARTICLES:
        raise states.UnsupportedSize(f'Particle count must be in 2..{MAX_PARTICLES}, got {n}.')
    cuts = []
    for index in range(1, 2**(n - 1)):
        party_b = [i for i in range(1, n) if (index >> (i - 1)) & 1]
        cuts.append(states.bipartition_from_party(party_b, n))
    return sorted(cuts, key=lambda cut: (cut.size_class, cut.index))


def group_by_size(values: typing.Sequence[float],
                  cuts: typing.Sequence[states.Bipartition],
                  decimals: int = 8) -> typing.Dict[int, typing.Dict[float, int]]:
    """Count equal values within each size class.

    Returns:
        {size class: {value: multiplicity}} with values in descending order.
    """
    frame = pd.DataFrame({
        'size_class': [cut.size_class for cut in cuts],
        'value': np.round(np.asarray(values, dtype=float), decimals) + 0.0
    })
    grouped: typing.Dict[int, typing.Dict[float, int]] = {}
    for (size_class, value), count in frame.groupby(['size_class', 'value']).size().items():
        grouped.setdefault(int(size_class), {})[float(value)] = int(count)
    return {c: dict(sorted(g.items(), reverse=True)) for c, g in sorted(grouped.items())}


class HVector(typing.NamedTuple):
    cuts: typing.Tuple[states.Bipartition, ...]
    values: np.ndarray

    def grouped(self, decimals: int = 8):
        return group_by_size(self.values, self.cuts, decimals=decimals)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            'cut': [cut.label for cut in self.cuts],
            'size_class': [cut.size_class for cut in self.cuts],
            'h': self.values
        })


def _complete_bases(rho: states.DensityMatrix, bases) -> typing.List[states.BasisSet]:
    if bases is None:
        return [states.gellmann_basis(d, include_identity=True) for d in rho.dims]
    bases = list(bases)
    if len(bases) != rho.n:
        raise states.InvalidArgument(f'Got {len(bases)} bases for {rho.n} particles.')
    for i, (basis, d) in enumerate(zip(bases, rho.dims)):
        if basis.dim != d or len(basis) != d * d:
            raise states.InvalidArgument(
                f'Basis {i} must be a complete basis of {d * d} operators on dimension {d}.')
    return bases


def _check_dense(rho: states.DensityMatrix):
    if rho.n < 2:
        raise states.InvalidArgument('A multipartite state needs at least two particles.')
    if rho.n > MAX_DENSE_PARTICLES or rho.dim > MAX_DENSE_DIM:
        raise states.UnsupportedSize(f'Dense evaluation is capped at {MAX_DENSE_PARTICLES} '
                                     f'particles and dimension {MAX_DENSE_DIM}, got dims {rho.dims}.')


def h_vector(rho,
             bases: typing.Sequence[states.BasisSet] = None,
             cuts: typing.Sequence[states.Bipartition] = None,
             workers: int = 1,
             verbose: bool = False) -> HVector:
    """Evaluate h_j for every bipartition.

    States are held as dense matrices, so at most MAX_DENSE_PARTICLES particles and a
    total dimension of MAX_DENSE_DIM are accepted (GHZ(3, d) up to d = 8).

    Args:
        rho: A state of at least two particles.
        bases: One complete (d^2 element) basis per particle, Gell-Mann with
            identity by default.
        cuts: Cuts to evaluate, all of them by default.
        workers: Threads used across cuts.
        verbose: Show progress.
    """
    rho = states.as_density(rho)
    _check_dense(rho)
    bases = _complete_bases(rho, bases)
    cuts = tuple(enumerate_bipartitions(rho.n) if cuts is None else cuts)
    spec = qfim.spectrum(rho)

    def evaluate(cut):
        traces = qfim.cut_traces(rho, cut, bases, spec)
        d_a, d_b = cut.dims(rho.dims)
        value, clamped = witnesses.h_statistic(traces.tr_fa, traces.tr_fb,
                                               qfim.trace_norm(traces.x), d_a, d_b)
        if clamped:
            warnings.warn(f'Negative local factor clamped at cut {cut.label}.')
        return value

    values = tools.parallel_map(evaluate, cuts, workers=workers, verbose=verbose,
                                desc='Bipartitions')
    return HVector(cuts, np.array(values))


def _parse_group(text: str) -> typing.List[int]:
    values = []
    for item in text.split(','):
        item = item.strip()
        if not item:
            continue
        value, _, count = item.partition('x')
        try:
            values.extend([int(value)] * (int(count) if count else 1))
        except ValueError as exc:
            raise states.InvalidVector(f'Cannot parse vector element {item!r}.') from exc
    return values


@dataclasses.dataclass(frozen=True)
class DimVectorCandidate:
    """A candidate entanglement-dimensionality vector.

    Values are grouped by size class (class 1 first) and sorted in
    non-increasing order within each class. `assignment`, when present,
    records which cut carries which value (as produced for pure states).

    Args:
        n: Number of particles.
        values: The vector, 2^(n-1) - 1 integers.
        feasible: True, False, or None for undecided/unknown.
        local_dim: Optional local dimension used to bound the entries.
        assignment: Optional (cut, value) pairs.
    """
    n: int
    values: typing.Tuple[int, ...]
    feasible: typing.Optional[bool] = None
    local_dim: typing.Optional[int] = None
    assignment: typing.Optional[typing.Tuple[typing.Tuple[states.Bipartition, int], ...]] = None

    def __post_init__(self):
        if not 2 <= self.n <= MAX_PARTICLES:
            raise states.UnsupportedSize(f'Particle count must be in 2..{MAX_PARTICLES}, got {self.n}.')
        values = [int(v) for v in self.values]
        if len(values) != 2**(self.n - 1) - 1:
            raise states.InvalidVector(
                f'A vector for {self.n} particles has {2**(self.n - 1) - 1} entries, got {len(values)}.')
        canonical: typing.List[int] = []
        start = 0
        for c, count in class_sizes(self.n):
            group = values[start:start + count]
            start += count
            if any(v < 1 for v in group):
                raise states.InvalidVector(f'Entries must be at least 1, got {group}.')
            if self.local_dim is not None and max(group) > self.local_dim**c:
                raise states.InvalidVector(
                    f'Entries of size class {c} cannot exceed {self.local_dim**c}, got {max(group)}.')
            canonical.extend(sorted(group, reverse=True))
        object.__setattr__(self, 'values', tuple(canonical))

    @classmethod
    def from_groups(cls, n: int, groups, **kwargs) -> 'DimVectorCandidate':
        """Build from per-class groups.

        Args:
            n: Number of particles.
            groups: A string such as '2x6,1;4x8,2x12,1;4x20,2x14,1' (classes
                separated by ';', 'VxC' repeats V C times), a sequence of
                per-class lists, or a mapping {class: list or {value: count}}.
        """
        if isinstance(groups, str):
            parts = groups.split(';')
            if len(parts) == 1:
                return cls(n, tuple(_parse_group(parts[0])), **kwargs)
            groups = [_parse_group(part) for part in parts]
        if isinstance(groups, dict):
            ordered = []
            for c, _ in class_sizes(n):
                group = groups.get(c, [])
                if isinstance(group, dict):
                    group = [v for v, count in group.items() for _ in range(count)]
                ordered.append(list(group))
            groups = ordered
        groups = list(groups)
        if len(groups) != len(class_sizes(n)):
            raise states.InvalidVector(
                f'{n} particles have {len(class_sizes(n))} size classes, got {len(groups)} groups.')
        for (c, count), group in zip(class_sizes(n), groups):
            if len(group) != count:
                raise states.InvalidVector(f'Size class {c} needs {count} entries, got {len(group)}.')
        return cls(n, tuple(v for group in groups for v in group), **kwargs)

    @classmethod
    def from_assignment(cls, n: int, assignment, **kwargs) -> 'DimVectorCandidate':
        assignment = tuple(sorted(((cut, int(v)) for cut, v in assignment),
                                  key=lambda item: (item[0].size_class, item[0].index)))
        return cls(n, tuple(v for _, v in assignment), assignment=assignment, **kwargs)

    def by_class(self) -> typing.Dict[int, typing.Tuple[int, ...]]:
        grouped, start = {}, 0
        for c, count in class_sizes(self.n):
            grouped[c] = self.values[start:start + count]
            start += count
        return grouped

    def lowered(self, index: int) -> 'DimVectorCandidate':
        """The vector with entry `index` decreased by one."""
        values = list(self.values)
        if values[index] <= 1:
            raise states.InvalidVector(f'Entry {index} is already 1 and cannot be lowered.')
        values[index] -= 1
        return DimVectorCandidate(self.n, tuple(values), local_dim=self.local_dim)

    def __str__(self):
        parts = []
        for group in self.by_class().values():
            counts = pd.Series(group).value_counts().sort_index(ascending=False)
            parts.append(','.join(f'{v}x{k}' if k > 1 else f'{v}' for v, k in counts.items()))
        return ';'.join(parts)


@dataclasses.dataclass(frozen=True)
class FeasibilityResult:
    """Outcome of `check_dim_vector`.

    `certificate` lists cuts whose inequalities cannot hold together: the
    cuts with the largest h in one size class whose sum exceeds the sum of the
    largest f(v) values available to them.
    """
    verdict: str
    certificate: typing.Tuple[str, ...]
    profile_count: int
    method: str
    message: str = ''

    @property
    def feasible(self) -> typing.Optional[bool]:
        return {FEASIBLE: True, INFEASIBLE: False}.get(self.verdict)


def profile_count(candidate: DimVectorCandidate) -> int:
    """Number of distinct class-respecting permutations of the vector."""
    total = 1
    for group in candidate.by_class().values():
        remaining = len(group)
        for count in pd.Series(group).value_counts().values:
            total *= int(special.comb(remaining, int(count), exact=True))
            remaining -= int(count)
    return total


def _class_indices(cuts) -> typing.Dict[int, typing.List[int]]:
    indices: typing.Dict[int, typing.List[int]] = {}
    for i, cut in enumerate(cuts):
        indices.setdefault(cut.size_class, []).append(i)
    return indices


def necessary_check(h: HVector, candidate: DimVectorCandidate,
                    tol: float = FEASIBILITY_TOLERANCE) -> typing.Tuple[str, ...]:
    """Cuts whose h exceeds f of the largest entry of their size class."""
    largest = {c: max(group) for c, group in candidate.by_class().items()}
    return tuple(cut.label for cut, value in zip(h.cuts, h.values)
                 if value > rank_value(largest[cut.size_class]) + tol)


def _majorization_certificate(h_values, cut_labels, group, tol) -> typing.Tuple[str, ...]:
    order = np.argsort(-np.asarray(h_values), kind='stable')
    available = np.sort([rank_value(v) for v in group])[::-1]
    excess = np.cumsum(np.asarray(h_values)[order]) - np.cumsum(available) - tol
    failing = np.nonzero(excess > 0)[0]
    if len(failing) == 0:
        return tuple(cut_labels)
    return tuple(cut_labels[i] for i in order[:failing[0] + 1])


def _class_program(h_values: np.ndarray, group: typing.Sequence[int], tol: float):
    """Feasibility LP for one size class in transportation form.

    Variables x[j, t] give the probability that cut j carries distinct value
    t. Each row sums to one and column t sums to the multiplicity of value t,
    which describes exactly the mixtures of permutations of the group.
    """
    values, counts = np.unique(np.asarray(group), return_counts=True)
    m, T = len(h_values), len(values)
    f = np.array([rank_value(v) for v in values])
    A_eq = np.zeros((m + T, m * T))
    for j in range(m):
        A_eq[j, j * T:(j + 1) * T] = 1
    for t in range(T):
        A_eq[m + t, t::T] = 1
    b_eq = np.concatenate([np.ones(m), counts])
    A_ub = np.zeros((m, m * T))
    for j in range(m):
        A_ub[j, j * T:(j + 1) * T] = -f
    b_ub = -(np.asarray(h_values) - tol)
    return optimize.linprog(np.zeros(m * T),
                            A_ub=A_ub,
                            b_ub=b_ub,
                            A_eq=A_eq,
                            b_eq=b_eq,
                            bounds=(0, None),
                            method='highs')


def check_dim_vector(rho,
                     candidate: DimVectorCandidate,
                     h: HVector = None,
                     tol: float = FEASIBILITY_TOLERANCE,
                     verbose: bool = False) -> FeasibilityResult:
    """Decide whether `rho` can have entanglement-dimensionality vector `candidate`.

    An infeasible verdict rules out the candidate and every vector below it
    elementwise.

    Args:
        rho: The state.
        candidate: The vector to test.
        h: Precomputed `h_vector(rho)`.
        tol: Slack on every inequality.
        verbose: Print a line per size class.
    """
    rho = states.as_density(rho)
    if rho.n != candidate.n:
        raise states.InvalidVector(f'Vector is for {candidate.n} particles, state has {rho.n}.')
    count = profile_count(candidate)
    if h is None:
        try:
            _check_dense(rho)
        except states.UnsupportedSize as exc:
            return FeasibilityResult(UNDECIDED, (), count, 'cap', str(exc))
        h = h_vector(rho)
    failing = necessary_check(h, candidate, tol=tol)
    if failing:
        return FeasibilityResult(INFEASIBLE, failing, count, 'necessary-check',
                                 f'{len(failing)} cuts exceed the largest value of their class.')
    groups = candidate.by_class()
    labels = [cut.label for cut in h.cuts]
    for c, indices in _class_indices(h.cuts).items():
        group = groups[c]
        assert len(group) == len(indices), 'Cuts and vector entries disagree.'
        result = _class_program(h.values[indices], group, tol)
        if verbose:
            print(f'Size class {c}: {result.message}')
        if result.status == 2:
            certificate = _majorization_certificate(h.values[indices], [labels[i] for i in indices],
                                                    group, tol)
            return FeasibilityResult(INFEASIBLE, certificate, count, 'linear-program',
                                     f'No assignment exists for size class {c}.')
        if result.status != 0:
            return FeasibilityResult(UNDECIDED, (), count, 'linear-program',
                                     f'Solver failed on size class {c}: {result.message}')
    return FeasibilityResult(FEASIBLE, (), count, 'linear-program')


def pure_state_dim_vector(psi: states.PureState) -> DimVectorCandidate:
    """Exact vector of a pure state, one Schmidt rank per cut."""
    if not isinstance(psi, states.PureState):
        raise states.InvalidArgument('The exact vector is only defined for pure states.')
    cuts = enumerate_bipartitions(psi.n)
    ranks = [states.schmidt_rank(psi, cut) for cut in cuts]
    return DimVectorCandidate.from_assignment(psi.n,
                                              zip(cuts, ranks),
                                              feasible=True,
                                              local_dim=max(psi.dims))


class Structure(typing.NamedTuple):
    k_separability: int
    depth: int
    partition: typing.Tuple[typing.Tuple[int, ...], ...]

    @property
    def label(self) -> str:
        return '|'.join(''.join(str(i + 1) for i in party) for party in self.partition)


def structure_from_vector(candidate: DimVectorCandidate) -> Structure:
    """Product structure of a pure state from its exact vector.

    Particles belong to the same party unless some cut with value 1 separates
    them; every cut must have value 1 exactly when it does not split a party.
    """
    if candidate.assignment is None:
        raise states.InvalidVector('Structure extraction needs the cut assignment of a pure state.')
    n = candidate.n
    separable = [cut for cut, value in candidate.assignment if value == 1]
    signatures: typing.Dict[typing.Tuple[bool, ...], typing.List[int]] = {}
    for i in range(n):
        signatures.setdefault(tuple(i in cut.party_a for cut in separable), []).append(i)
    partition = tuple(sorted(tuple(party) for party in signatures.values()))
    for cut, value in candidate.assignment:
        splits = any(0 < len(set(party) & set(cut.party_a)) < len(party) for party in partition)
        if (value == 1) == splits:
            raise states.InvalidVector(f'Cut {cut.label} with value {value} is inconsistent with '
                                       'a product of the parties.')
    return Structure(k_separability=len(partition),
                     depth=max(len(party) for party in partition),
                     partition=partition)


def lowered_candidates(candidate: DimVectorCandidate) -> typing.Iterator[DimVectorCandidate]:
    """Every distinct vector obtained by lowering one entry by one."""
    seen = set()
    for index, value in enumerate(candidate.values):
        if value <= 1:
            continue
        lowered = candidate.lowered(index)
        if lowered.values not in seen:
            seen.add(lowered.values)
            yield lowered


__all__ = [
    'enumerate_bipartitions', 'h_vector', 'check_dim_vector', 'pure_state_dim_vector',
    'structure_from_vector', 'DimVectorCandidate', 'FeasibilityResult', 'HVector', 'group_by_size',
    'necessary_check', 'rank_value', 'class_sizes', 'profile_count', 'lowered_candidates'
]

