"""Benchmark: numba kernels against the numpy fallbacks.

Runs the hot batch primitives and one end-to-end action sweep through
both kernel modules and prints the timing ratio.  Usage:

    python benchmarks/bench_accel.py [--trials N]

(The env flag GL2D_NUMBA only switches the dispatch at import time; this
script calls both kernel modules directly, so one process covers both.)
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from gl2d import _kernels_numba as knb
from gl2d import _kernels_numpy as knp
from gl2d import field
from gl2d.induction import InductionSpace, act, make_s, upper_elt
from gl2d.od import RingParams
from gl2d.weight import WeightParams


def timed(fn, *args, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_primitives(trials: int):
    F = field(7, 1, 2)
    ring_t = RingParams.make(F, e=2, ndigits=8)
    ring_e = RingParams.make(F, e=1, ndigits=8)
    em = ring_e.exact_model
    rng = np.random.default_rng(0)
    N = 8
    da = np.asarray(rng.integers(0, 49, (trials, N)), dtype=np.int16)
    db = np.asarray(rng.integers(0, 49, (trials, N)), dtype=np.int16)
    va = np.full(trials, N, dtype=np.int64)
    rows = []

    args = (da, va, db, va, F.MUL, F.ADD, ring_t.P0, ring_t.TWIST_NEG, ring_t.kappa)
    knb.tracked_mul_batch(*args)  # compile
    t_nb, r1 = timed(knb.tracked_mul_batch, *args)
    t_np, r2 = timed(knp.tracked_mul_batch, *args)
    assert np.array_equal(r1[0], r2[0])
    rows.append(("tracked_mul_batch", t_nb, t_np))

    A = np.asarray(rng.integers(0, em.pM, (trials, em.w, em.deg)), dtype=np.int64)
    B = np.asarray(rng.integers(0, em.pM, (trials, em.w, em.deg)), dtype=np.int64)
    eargs = (A, B, em._red, em._phi_cycle, em.p, em.pM, em.w)
    knb.exact_mul_batch(*eargs)
    t_nb, r1 = timed(knb.exact_mul_batch, *eargs)
    t_np, r2 = timed(knp.exact_mul_batch, *eargs)
    assert np.array_equal(r1, r2)
    rows.append(("exact_mul_batch", t_nb, t_np))

    M = np.asarray(rng.integers(0, 49, (trials // 4, 64)), dtype=np.int16)
    rargs = (F.MUL, F.SUB, F.INV)
    knb.gf_rref(M.copy(), *rargs)
    t_nb, _ = timed(lambda: knb.gf_rref(M.copy(), *rargs))
    t_np, _ = timed(lambda: knp.gf_rref(M.copy(), *rargs))
    rows.append(("gf_rref", t_nb, t_np))

    C = np.asarray(rng.integers(0, 49, (trials, 16)), dtype=np.int16)
    gid = np.asarray(rng.integers(0, 49, trials), dtype=np.int64)
    MATS = np.asarray(rng.integers(0, 49, (49, 16, 16)), dtype=np.int16)
    gargs = (C, gid, MATS, F.MUL, F.ADD)
    knb.gf_apply_matrix_groups(*gargs)
    t_nb, r1 = timed(knb.gf_apply_matrix_groups, *gargs)
    t_np, r2 = timed(knp.gf_apply_matrix_groups, *gargs)
    assert np.array_equal(r1, r2)
    rows.append(("gf_apply_matrix_groups", t_nb, t_np))
    return rows


def bench_action_sweep():
    """End-to-end: one generator acting on a depth-2 family element."""
    import gl2d.accel as accel

    F = field(7, 2, 1)
    ring = RingParams.make(F, e=1, ndigits=6)
    space = InductionSpace(ring, WeightParams(F, (3, 3)))
    f = make_s(space, 2, 4)
    gens = [upper_elt(ring, ring.from_digits([0, b])) for b in range(1, 25)]
    rows = []
    for name, mod in (("numba", knb), ("numpy", knp)):
        accel._kernels = mod
        space._action_cache.clear()
        act(gens[0], f)  # warm the sigma cache
        t0 = time.perf_counter()
        for g in gens:
            space._action_cache.clear()
            act(g, f)
        rows.append((f"action sweep 24x2401 terms [{name}]", time.perf_counter() - t0))
    accel._kernels = None
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=20000)
    args = ap.parse_args()
    print(f"batch size {args.trials}")
    print(f"{'kernel':28s} {'numba':>10s} {'numpy':>10s} {'ratio':>7s}")
    for name, t_nb, t_np in bench_primitives(args.trials):
        print(f"{name:28s} {t_nb * 1e3:9.2f}ms {t_np * 1e3:9.2f}ms {t_np / t_nb:6.1f}x")
    for name, t in bench_action_sweep():
        print(f"{name:48s} {t * 1e3:9.2f}ms")


if __name__ == "__main__":
    main()
