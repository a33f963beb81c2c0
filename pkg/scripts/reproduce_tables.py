"""This script reproduces the reference numbers: the spin-3/2 bound tables,
saturation of the bipartite criteria, and the seven-qubit example."""
# pylint: disable=invalid-name
import argparse
import time

import pandas as pd
import tqdm

import schmidt_qfim

SPIN_TABLES = [('xy', '+', [7, 11, 11.5601, 12]), ('xyz', '-', [7.5, 12, 13.3403, 15])]

if __name__ == '__main__':
    parser = argparse.ArgumentParser(description='Reproduce reference tables.')
    parser.add_argument('--restarts', type=int, default=schmidt_qfim.bounds.DEFAULT_RESTARTS)
    parser.add_argument('--workers', type=int, default=1)
    parser.add_argument('--seed', type=int, default=None)
    parser.add_argument('--skip-bounds', dest='bounds', action='store_false')
    args = parser.parse_args()

    if args.bounds:
        cfg = schmidt_qfim.bounds.OptimConfig(restarts=args.restarts,
                                              workers=args.workers,
                                              seed=args.seed)
        for components, sign, expected in SPIN_TABLES:
            start = time.time()
            table = schmidt_qfim.bounds.bound_table('3/2', components, sign, cfg=cfg)
            frame = pd.DataFrame({
                'r': [result.r for result in table],
                'variance_sum': [result.variance_sum for result in table],
                'expected': expected,
                'converged': [result.converged for result in table]
            })
            print(f'Spin 3/2, components {components}, sign {sign} '
                  f'({time.time() - start:.1f}s)')
            print(frame.to_string(index=False))

    rows = []
    cases = [(d, r) for d in range(2, 7) for r in range(2, d + 1)]
    for d, r in tqdm.tqdm(cases, desc='MES'):
        report = schmidt_qfim.witnesses.obs1_report(schmidt_qfim.states.mes_state(d, r))
        rows.append({
            'd': d,
            'r': r,
            'h': report.h_value,
            'expected': r - 1 / r,
            'certified': report.certified_min_schmidt_number
        })
    print(pd.DataFrame(rows).to_string(index=False))

    start = time.time()
    psi = schmidt_qfim.states.seven_qubit_state()
    h = schmidt_qfim.multipartite.h_vector(psi, workers=args.workers, verbose=True)
    vector = schmidt_qfim.multipartite.pure_state_dim_vector(psi)
    structure = schmidt_qfim.multipartite.structure_from_vector(vector)
    print(h.grouped())
    print(f'Vector {vector}, partition {structure.label}, '
          f'{structure.k_separability}-separable, depth {structure.depth} '
          f'({time.time() - start:.1f}s)')
