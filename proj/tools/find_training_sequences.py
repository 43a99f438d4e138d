#!/usr/bin/env python3
"""Pick the two default length-26 training sequences.

Draws a seeded pool of random +/-1 sequences, keeps the one with the best
single-user LS channel-estimation cost at order 5, then picks the partner that
minimises the worst joint LS cost over a range of amplitude ratios b.
The winners are hard-coded in src/baseband.cpp.
"""
import numpy as np

N_TR, Q_H, POOL, SEED = 26, 5, 3000, 2012
B_VALUES = (0.0, 0.25, 0.5, 1.0, 2.0, 4.0)


def conv_matrix(tsc, q):
    return np.array([[tsc[q + m - n] for n in range(q + 1)] for m in range(len(tsc) - q)], float)


def ls_cost(mat):
    g = mat.conj().T @ mat
    return float(np.real(np.trace(np.linalg.inv(g))))


def main():
    rng = np.random.default_rng(SEED)
    pool = rng.choice([-1.0, 1.0], size=(POOL, N_TR))
    mats = [conv_matrix(t, Q_H) for t in pool]
    single = np.array([ls_cost(m) for m in mats])
    o = int(np.argmin(single))
    best, p = np.inf, -1
    for i, m in enumerate(mats):
        if i == o:
            continue
        cost = max(ls_cost(mats[o] + 1j * b * m) for b in B_VALUES[1:])
        cost = max(cost, single[i])
        if cost < best:
            best, p = cost, i
    for name, idx in (("tsc_o", o), ("tsc_p", p)):
        print(name, "".join("0" if s > 0 else "1" for s in pool[idx]), "cost", single[idx])
    print("worst joint cost", best)


if __name__ == "__main__":
    main()
