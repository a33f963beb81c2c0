# pylint: disable=invalid-name
"""Precision limits for multiparameter phase estimation."""
import typing
import warnings
import dataclasses

import numpy as np

from . import states, qfim, witnesses

PINV_RCOND = 1e-10
VARIANCE_EPSILON = 1e-12


@dataclasses.dataclass(frozen=True)
class EstimationScenario:
    """Parameters theta_i encoded by exp(-i sum_i theta_i G_i) on a probe state.

    Args:
        generators: The Hermitian generators G_i.
        probe: The state (a PureState is converted).
        readout: Optional observable measured to estimate a single parameter.
    """
    generators: typing.Tuple[np.ndarray, ...]
    probe: states.DensityMatrix
    readout: typing.Optional[np.ndarray] = None

    def __post_init__(self):
        probe = states.as_density(self.probe)
        generators = tuple(
            states.as_observable(G, dim=probe.dim, name=f'generator {i}')
            for i, G in enumerate(self.generators))
        if not generators:
            raise states.InvalidArgument('At least one generator is required.')
        object.__setattr__(self, 'probe', probe)
        object.__setattr__(self, 'generators', generators)
        if self.readout is not None:
            object.__setattr__(self, 'readout',
                               states.as_observable(self.readout, dim=probe.dim, name='readout'))

    @classmethod
    def collective(cls, probe, basis_a: states.BasisSet = None, basis_b: states.BasisSet = None):
        """Generators g_i (x) 1 + 1 (x) h_i for paired local bases (traceless Gell-Mann by default)."""
        probe = states.as_density(probe)
        if probe.n != 2:
            raise states.UnsupportedShape(f'Expected a bipartite probe, got dims {probe.dims}.')
        basis_a = states.gellmann_basis(probe.dims[0]) if basis_a is None else basis_a
        basis_b = states.gellmann_basis(probe.dims[1]) if basis_b is None else basis_b
        return cls(tuple(states.collective_operators(basis_a, basis_b)), probe)

    @property
    def parameters(self) -> int:
        return len(self.generators)

    def qfim(self) -> np.ndarray:
        return qfim.qfim(self.probe, self.generators)


@dataclasses.dataclass(frozen=True)
class QcrbReport:
    """Lower bounds on the summed variance of K unbiased estimators.

    `bound` is K^2 / sum_i F_ii. `trace_inverse` is tr(F^-1), infinite when
    some parameter combination carries no information, in which case
    `support_trace_inverse` is the trace of the pseudo-inverse and
    `identifiable` flags the parameters whose direction lies in the range of F.
    """
    bound: float
    trace_inverse: float
    support_trace_inverse: float
    identifiable: typing.Tuple[bool, ...]
    qfim: np.ndarray

    def to_dict(self) -> dict:
        return {
            'bound': self.bound,
            'trace_inverse': self.trace_inverse,
            'support_trace_inverse': self.support_trace_inverse,
            'identifiable': list(self.identifiable),
            'qfim': self.qfim.tolist()
        }


def qcrb_trace_bound(scenario: EstimationScenario) -> QcrbReport:
    F = scenario.qfim()
    K = scenario.parameters
    total = float(np.trace(F))
    if total <= 0:
        raise states.Unbounded('The probe carries no information about any parameter.')
    pinv = np.linalg.pinv(F, rcond=PINV_RCOND, hermitian=True)
    projector = F @ pinv
    identity = np.eye(K)
    identifiable = tuple(
        bool(np.linalg.norm(projector[:, i] - identity[:, i]) < 1e-6) for i in range(K))
    rank = np.linalg.matrix_rank(F, tol=PINV_RCOND * np.abs(F).max(), hermitian=True)
    if rank < K:
        warnings.warn(f'QFIM has rank {rank} < {K}; tr(F^-1) is infinite.')
        trace_inverse = np.inf
    else:
        trace_inverse = float(np.trace(pinv))
    return QcrbReport(bound=K**2 / total,
                      trace_inverse=trace_inverse,
                      support_trace_inverse=float(np.trace(pinv)),
                      identifiable=identifiable,
                      qfim=F)


def error_propagation_qfi_lb(rho, H, O, epsilon: float = VARIANCE_EPSILON) -> float:
    """Sensitivity |<[O, H]>|^2 / Var(O) of a readout O, a lower bound on F(H).

    Args:
        rho: The probe.
        H: Generator of the phase.
        O: Measured observable.
        epsilon: Readout variances at or below this are rejected.
    """
    rho = states.as_density(rho)
    H = states.as_observable(H, dim=rho.dim, name='generator')
    O = states.as_observable(O, dim=rho.dim, name='readout')
    spread = qfim.variance(rho, O)
    if spread <= epsilon:
        raise states.UndefinedSensitivity(
            f'Readout variance {spread:.3g} is too small to propagate an error.')
    slope = np.trace(rho.matrix @ (O @ H - H @ O))
    return float(np.abs(slope)**2 / spread)


def multiparam_precision_floor(d: int, r: int) -> float:
    """Smallest summed variance (d^2 - 1)^2 r / (8 (r^2 + d r - 2)) for su(d) phases and Schmidt number r."""
    if d < 2:
        raise states.InvalidDimension(f'd must be at least 2, got {d}.')
    if not 1 <= r <= d:
        raise states.InvalidRank(f'r must be in 1..{d}, got {r}.')
    return (d * d - 1)**2 * r / (8 * (r * r + d * r - 2))


def collective_precision_bound(rho,
                               basis_a: states.BasisSet = None,
                               basis_b: states.BasisSet = None,
                               optimize: bool = False) -> float:
    """K^2 / sum_i F(G_i) for the collective encoding G_i = g_i (x) 1 + 1 (x) h_i.

    Args:
        rho: A d x d probe.
        basis_a: Local generators of party a, traceless Gell-Mann by default.
        basis_b: Local generators of party b.
        optimize: Align the bases first so that the summed QFI is largest.
    """
    if optimize:
        basis_a, basis_b = witnesses.optimize_local_bases(rho, basis_a, basis_b)
    collective = witnesses.obs2_value(rho, basis_a, basis_b)
    if collective.total <= 0:
        raise states.Unbounded('The probe carries no information about any parameter.')
    K = len(basis_a) if basis_a is not None else states.as_density(rho).dims[0]**2 - 1
    return K**2 / collective.total
