"""Command line entry point: `schmidt-qfim <command> ...`.

Exit codes are 0 on success, 2 for unreadable input, 3 for invalid
parameters and 4 when a question is left undecided (for example because a
size cap was hit).
"""
# pylint: disable=invalid-name
import sys
import json
import typing
import argparse
import datetime
import dataclasses

import numpy as np
import pandas as pd

from . import __version__, states, witnesses, bounds, multipartite, tools

SCHEMA_VERSION = 1
EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INVALID = 3
EXIT_UNDECIDED = 4


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f'Cannot serialize {type(value).__name__}.')


@dataclasses.dataclass
class ReportDocument:
    """A JSON report of one command run.

    Serialization sorts keys, so the same command with the same seed gives the
    same text apart from `timestamp`.
    """
    command: str
    input: typing.Dict[str, typing.Any]
    parameters: typing.Dict[str, typing.Any]
    results: typing.Dict[str, typing.Any]
    seed: typing.Optional[int] = None
    schema_version: int = SCHEMA_VERSION
    tool_version: str = __version__
    timestamp: str = dataclasses.field(
        default_factory=lambda: datetime.datetime.now(datetime.timezone.utc).isoformat())

    def to_dict(self, include_timestamp: bool = True) -> dict:
        document = dataclasses.asdict(self)
        if not include_timestamp:
            del document['timestamp']
        return document

    def to_json(self, include_timestamp: bool = True) -> str:
        return json.dumps(self.to_dict(include_timestamp),
                          sort_keys=True,
                          indent=2,
                          default=_json_default)


def _describe(path: str, state) -> dict:
    return {
        'path': path,
        'dims': list(state.dims),
        'kind': 'pure' if isinstance(state, states.PureState) else 'mixed'
    }


def _emit(text: str, output: typing.Optional[str]):
    if output is None:
        print(text)
        return
    with open(output, 'w', encoding='utf-8') as f:
        f.write(text + '\n')


def _basis(kind: str, d: int) -> states.BasisSet:
    if kind != 'gellmann':
        raise NotImplementedError(f'Unsupported basis kind {kind!r}.')
    return states.gellmann_basis(d)


def cmd_witness(args) -> typing.Tuple[ReportDocument, int]:
    state = tools.read_state(args.state_file)
    rho = states.as_density(state)
    if rho.n != 2:
        raise states.UnsupportedShape(f'Expected a bipartite state, got dims {rho.dims}.')
    basis_a, basis_b = _basis(args.basis, rho.dims[0]), _basis(args.basis, rho.dims[1])
    if args.optimize_bases:
        basis_a, basis_b = witnesses.optimize_local_bases(rho, basis_a, basis_b)
    report = witnesses.obs1_report(rho, basis_a, basis_b, max_r=args.max_r)
    collective = witnesses.obs2_value(rho, basis_a, basis_b)
    max_r = report.per_r[-1].r
    results = report.to_dict()
    results['obs2'] = {
        'total': collective.total,
        'bounds': {r: collective.bounds[r] for r in range(1, max_r + 1)},
        'violated': {r: collective.violated(r) for r in range(1, max_r + 1)}
    }
    document = ReportDocument(command='witness',
                              input=_describe(args.state_file, state),
                              parameters={
                                  'basis': args.basis,
                                  'max_r': args.max_r,
                                  'optimize_bases': args.optimize_bases
                              },
                              results=results)
    return document, EXIT_OK


def cmd_bound(args) -> typing.Tuple[ReportDocument, int]:
    sign = args.sign or ('-' if 'z' in args.components else '+')
    triple = bounds.SpinTriple(args.spin, sign, args.components)
    cfg = bounds.OptimConfig(restarts=args.restarts,
                             max_iters=args.max_iters,
                             seed=args.seed,
                             workers=args.workers,
                             verbose=args.verbose)
    table = bounds.bound_table(triple.j, triple.components, triple.sign, cfg=cfg, max_r=args.r)
    rows = []
    for result in table:
        rows.append({
            'r': result.r,
            'variance_sum': result.variance_sum,
            'qfi_bound': result.value,
            'aligned_variance_sum': bounds.spin_bound_aligned(triple.j, result.r, triple.components,
                                                              triple.sign),
            'converged': result.converged,
            'restarts': result.restarts,
            'iterations': result.iterations
        })
    checks: typing.Dict[str, float] = {'variance_cap': bounds.variance_cap(triple.operators())}
    if triple.components == 'xy':
        checks['r2_analytic'] = bounds.spin_bound_r2_analytic(triple.j)
        checks['global'] = bounds.global_spin_bound(triple.j)
    document = ReportDocument(command='bound',
                              input={'spin': triple.j, 'd': triple.d},
                              parameters={
                                  'components': triple.components,
                                  'sign': triple.sign,
                                  'r': args.r,
                                  'restarts': cfg.restarts,
                                  'max_iters': cfg.max_iters
                              },
                              results={
                                  'table': rows,
                                  'analytic': checks
                              },
                              seed=cfg.seed)
    return document, EXIT_OK


def cmd_certify(args) -> typing.Tuple[ReportDocument, int]:
    state = tools.read_state(args.state_file)
    n = len(state.dims)
    if args.pure_exact:
        if not isinstance(state, states.PureState):
            raise states.InvalidArgument('--pure-exact needs a pure state file.')
        vector = multipartite.pure_state_dim_vector(state)
        structure = multipartite.structure_from_vector(vector)
        results = {
            'vector': str(vector),
            'groups': {c: list(group) for c, group in vector.by_class().items()},
            'cuts': {cut.label: value for cut, value in vector.assignment},
            'k_separability': structure.k_separability,
            'depth': structure.depth,
            'partition': structure.label
        }
        parameters = {'pure_exact': True}
        code = EXIT_OK
    else:
        rho = states.as_density(state)
        candidate = multipartite.DimVectorCandidate.from_groups(n, args.vector,
                                                               local_dim=max(state.dims))
        try:
            h = multipartite.h_vector(rho, workers=args.workers, verbose=args.verbose)
        except states.UnsupportedSize:
            h = None
        outcome = multipartite.check_dim_vector(rho, candidate, h=h)
        results = {
            'verdict': outcome.verdict,
            'method': outcome.method,
            'certificate': list(outcome.certificate),
            'profile_count': outcome.profile_count,
            'message': outcome.message
        }
        if h is not None:
            results['h_vector'] = {cut.label: value for cut, value in zip(h.cuts, h.values)}
            results['h_groups'] = {
                c: {repr(v): k for v, k in group.items()} for c, group in h.grouped().items()
            }
        parameters = {'vector': str(candidate), 'permutation_set': 'size-class'}
        code = EXIT_UNDECIDED if outcome.verdict == multipartite.UNDECIDED else EXIT_OK
    document = ReportDocument(command='certify',
                              input=_describe(args.state_file, state),
                              parameters=parameters,
                              results=results)
    return document, code


def figure1_frame(d_list: typing.Sequence[int]) -> pd.DataFrame:
    """Collective-QFI bounds 8(d + r - 2/r) next to the best sum reached by MES(d, r)."""
    rows = []
    for d in d_list:
        for r in range(1, d + 1):
            mes = states.mes_state(d, r)
            basis_a, basis_b = witnesses.optimize_local_bases(mes)
            rows.append({
                'd': d,
                'r': r,
                'bound': witnesses.sum_bound(d, r),
                'mes_sum': witnesses.obs2_value(mes, basis_a, basis_b).total
            })
    return pd.DataFrame(rows, columns=['d', 'r', 'bound', 'mes_sum'])


def cmd_figure1(args) -> int:
    try:
        d_list = [int(d) for d in args.d_list.split(',') if d.strip()]
    except ValueError as exc:
        raise states.InvalidArgument(f'Cannot parse --d-list {args.d_list!r}.') from exc
    if not d_list or min(d_list) < 2:
        raise states.InvalidDimension(f'Every d must be at least 2, got {args.d_list!r}.')
    text = figure1_frame(d_list).to_csv(index=False)
    _emit(text.rstrip('\n'), args.output)
    return EXIT_OK


def example_state(name: str, d: int = 3, r: int = None, p: typing.Sequence[float] = None,
                  n: int = 3):
    """The named factory state."""
    if name == 'bell':
        return states.mes_state(2)
    if name == 'mes':
        return states.mes_state(d, r)
    if name == 'product':
        return states.product_state((d, d))
    if name == 'rho-s':
        return states.rho_s((1 / 3, 1 / 3, 1 / 3) if p is None else p)
    if name == 'ghz':
        return states.ghz_state(n, d)
    if name == 'seven-qubit':
        return states.seven_qubit_state()
    raise NotImplementedError(f'Unsupported example {name!r}.')


def cmd_example(args) -> int:
    try:
        p = None if args.p is None else [float(v) for v in args.p.split(',')]
    except ValueError as exc:
        raise states.InvalidArgument(f'Cannot parse --p {args.p!r}.') from exc
    state = example_state(args.name, d=args.d, r=args.r, p=p, n=args.n)
    if args.output is None:
        print(json.dumps(tools.state_to_dict(state)))
    else:
        tools.write_state(state, args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='schmidt-qfim',
        description='Certify Schmidt numbers and entanglement dimensionality with QFIM criteria.')
    parser.add_argument('--version', action='version', version=__version__)
    subparsers = parser.add_subparsers(dest='command', required=True)

    witness = subparsers.add_parser('witness', help='Bipartite Schmidt number criteria.')
    witness.add_argument('state_file')
    witness.add_argument('--basis', default='gellmann', choices=['gellmann'])
    witness.add_argument('--max-r', type=int, default=None)
    witness.add_argument('--optimize-bases', action='store_true')
    witness.add_argument('--output', default=None)

    bound = subparsers.add_parser('bound', help='Collective spin variance bounds per Schmidt rank.')
    bound.add_argument('--spin', required=True)
    bound.add_argument('--components', default='xy', choices=['xy', 'xyz'])
    bound.add_argument('--sign',
                       default=None,
                       choices=['+', '-'],
                       help='Sign coupling the two spins, "-" for xyz and "+" for xy by default.')
    bound.add_argument('--r', type=int, default=None)
    bound.add_argument('--restarts', type=int, default=bounds.DEFAULT_RESTARTS)
    bound.add_argument('--max-iters', type=int, default=bounds.DEFAULT_MAX_ITERS)
    bound.add_argument('--seed', type=int, default=None)
    bound.add_argument('--workers', type=int, default=1)
    bound.add_argument('--verbose', action='store_true')
    bound.add_argument('--output', default=None)

    certify = subparsers.add_parser('certify', help='Entanglement-dimensionality vectors.')
    certify.add_argument('state_file')
    mode = certify.add_mutually_exclusive_group(required=True)
    mode.add_argument('--vector', help='For example "2x6,1;4x8,2x12,1;4x20,2x14,1".')
    mode.add_argument('--pure-exact', action='store_true')
    certify.add_argument('--workers', type=int, default=1)
    certify.add_argument('--verbose', action='store_true')
    certify.add_argument('--output', default=None)

    figure1 = subparsers.add_parser('figure1', help='CSV of collective QFI bounds and MES sums.')
    figure1.add_argument('--d-list', default='2,3,4,5')
    figure1.add_argument('--output', default=None)

    example = subparsers.add_parser('example', help='Write a factory state as JSON.')
    example.add_argument('name', choices=['bell', 'mes', 'product', 'rho-s', 'ghz', 'seven-qubit'])
    example.add_argument('--d', type=int, default=3)
    example.add_argument('--r', type=int, default=None)
    example.add_argument('--p', default=None, help='Comma separated weights for rho-s.')
    example.add_argument('--n', type=int, default=3)
    example.add_argument('--output', default=None)
    return parser


REPORT_COMMANDS = {'witness': cmd_witness, 'bound': cmd_bound, 'certify': cmd_certify}
PLAIN_COMMANDS = {'figure1': cmd_figure1, 'example': cmd_example}


def main(argv: typing.Sequence[str] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command in REPORT_COMMANDS:
            document, code = REPORT_COMMANDS[args.command](args)
            _emit(document.to_json(), args.output)
            return code
        return PLAIN_COMMANDS[args.command](args)
    except tools.StateFileError as exc:
        print(f'error: {exc}', file=sys.stderr)
        return EXIT_PARSE
    except states.UnsupportedSize as exc:
        print(f'undecided: {exc}', file=sys.stderr)
        return EXIT_UNDECIDED
    except (states.SchmidtQfimError, NotImplementedError) as exc:
        print(f'error: {exc}', file=sys.stderr)
        return EXIT_INVALID


if __name__ == '__main__':
    sys.exit(main())
