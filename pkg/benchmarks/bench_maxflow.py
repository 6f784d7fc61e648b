#!/usr/bin/env python3
"""Benchmark the compiled max-flow kernel against the pure-Python twin.

Times the full per-slice pipeline and the bare solver on phantom slice
graphs at the default operating point, plus bare-solver runs on synthetic
radial graphs of growing size.

Usage: python benchmarks/bench_maxflow.py [--repeats N]
"""

import argparse
import statistics
import time

import numpy as np

from radialcut._core import implementations
from radialcut.geometry import SeedPoint, Template, cast_rays, sample_node_grid
from radialcut.graph import GraphParams, build_graph, node_costs
from radialcut.phantom import PhantomSpec, generate
from radialcut.volume import extract_slice


def circle(cx, cy, r, m=24):
    ang = 2 * np.pi * np.arange(m) / m
    return np.stack([cx + r * np.cos(ang), cy + r * np.sin(ang)], axis=1)


def slice_graph(z=0, params=None):
    spec = PhantomSpec(noise_sigma=15.0)
    vol, _ = generate(spec)
    params = params or GraphParams()
    cx, cy = spec.centerline_at(z)
    template = Template(markers=circle(cx, cy, 2 * spec.radius_at(z)), z_index=z)
    seed = SeedPoint(position=np.array([cx, cy]), z_index=z)
    fan = cast_rays(seed, params.k, template)
    grid = sample_node_grid(fan, params.n, extract_slice(vol, z))
    costs = node_costs(grid, params.t_weight)
    return build_graph(grid, costs, params)


def random_radial_graph(k, n, rng):
    from radialcut.geometry import NodeGrid

    grid = NodeGrid(
        positions=np.zeros((k, n, 2)),
        grey=np.zeros((k, n)),
        seed_grey=0.0,
        seed_position=np.zeros(2),
    )
    costs = rng.uniform(0.001, 1.0, (k, n))
    return build_graph(grid, costs, GraphParams(k=k, n=n, delta=2))


def time_solver(solver, g, repeats):
    args = (
        g.num_nodes,
        np.ascontiguousarray(g.tails, np.int32),
        np.ascontiguousarray(g.heads, np.int32),
        np.ascontiguousarray(g.caps, np.float64),
        g.source,
        g.sink,
    )
    solver(*args)  # warmup
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        flow, _ = solver(*args)
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples), flow


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=9)
    args = parser.parse_args()

    impls = implementations()
    if "compiled" not in impls:
        print("compiled extension not built; run `pip install -e .` first")

    rng = np.random.default_rng(7)
    cases = [("phantom slice k=40 n=40", slice_graph())]
    for k, n in [(40, 40), (80, 80), (120, 120)]:
        cases.append((f"random radial k={k} n={n}", random_radial_graph(k, n, rng)))

    print(f"{'case':<28}{'arcs':>8}", end="")
    for name in impls:
        print(f"{name:>14}", end="")
    if len(impls) == 2:
        print(f"{'speedup':>10}", end="")
    print()

    for label, g in cases:
        print(f"{label:<28}{len(g.caps):>8}", end="")
        times = {}
        flows = {}
        for name, solver in impls.items():
            t, flow = time_solver(solver, g, args.repeats)
            times[name] = t
            flows[name] = flow
            print(f"{t * 1e3:>11.2f} ms", end="")
        if len(impls) == 2:
            print(f"{times['python'] / times['compiled']:>9.1f}x", end="")
            assert flows["python"] == flows["compiled"], "implementations disagree"
        print()


if __name__ == "__main__":
    main()
