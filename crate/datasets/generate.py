#!/usr/bin/env python3
"""Regenerate the bundled group, irrep and system-representation files.

Run from the repository root:  python3 datasets/generate.py
Every representation is checked for unitarity and the homomorphism
property before it is written.
"""

import itertools
import json
import os

import numpy as np

ROOT = os.path.dirname(os.path.abspath(__file__))


def cayley(elements, compose, eq):
    n = len(elements)
    table = []
    for g in elements:
        row = []
        for h in elements:
            gh = compose(g, h)
            row.append(next(i for i, k in enumerate(elements) if eq(k, gh)))
        table.append(row)
    return table


def check_rep(mult, mats):
    n = len(mult)
    for g in range(n):
        m = mats[g]
        assert np.allclose(m @ m.conj().T, np.eye(m.shape[0]), atol=1e-13)
        for h in range(n):
            assert np.allclose(m @ mats[h], mats[mult[g][h]], atol=1e-12)


def enc(m):
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def write(rel, obj):
    path = os.path.join(ROOT, rel)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w") as f:
        json.dump(obj, f, indent=1)
        f.write("\n")


def emit(key, name, mult, irreps, reps):
    write(f"groups/{key}.json", {"name": name, "order": len(mult), "mult": mult})
    out = []
    for label, mats in irreps:
        check_rep(mult, mats)
        out.append({"label": label, "dim": mats[0].shape[0], "matrices": [enc(m) for m in mats]})
    total = sum(e["dim"] ** 2 for e in out)
    assert total == len(mult), (key, total)
    write(f"irreps/{key}.json", {"group": name, "irreps": out})
    for rkey, label, mats in reps:
        check_rep(mult, mats)
        write(
            f"reps/{key}_{rkey}.json",
            {"group": name, "label": label, "dim": mats[0].shape[0], "matrices": [enc(m) for m in mats]},
        )


def c(x):
    return np.array(x, dtype=complex)


def shift(d, k):
    m = np.zeros((d, d), dtype=complex)
    for i in range(d):
        m[(i + k) % d, i] = 1
    return m


def cyclic(n):
    mult = [[(g + h) % n for h in range(n)] for g in range(n)]
    irreps = [
        (f"k{k}", [c([[np.exp(2j * np.pi * k * g / n)]]) for g in range(n)]) for k in range(n)
    ]
    return mult, irreps


def perm_matrix(p):
    d = len(p)
    m = np.zeros((d, d), dtype=complex)
    for i in range(d):
        m[p[i], i] = 1
    return m


def main():
    # Z_n
    trivial = lambda n: [c([[1]]) for _ in range(n)]
    mult, irreps = cyclic(2)
    x = c([[0, 1], [1, 0]])
    emit(
        "z2",
        "Z2",
        mult,
        irreps,
        [
            ("trivial", "trivial", trivial(2)),
            ("x", "qubit flip", [np.eye(2, dtype=complex), x]),
            ("sum", "trivial plus sign", [np.eye(2, dtype=complex), c([[1, 0], [0, -1]])]),
        ],
    )
    w3 = np.exp(2j * np.pi / 3)
    mult, irreps = cyclic(3)
    emit(
        "z3",
        "Z3",
        mult,
        irreps,
        [
            ("trivial", "trivial", trivial(3)),
            ("qubit", "qubit phase", [c([[1, 0], [0, w3**g]]) for g in range(3)]),
            ("shift", "qutrit shift", [shift(3, g) for g in range(3)]),
        ],
    )
    mult, irreps = cyclic(6)
    emit(
        "z6",
        "Z6",
        mult,
        irreps,
        [("x", "qubit flip", [np.linalg.matrix_power(x, g) for g in range(6)])],
    )

    # S3 as permutations of {0,1,2}, lexicographic order; (g h)(i) = g(h(i)).
    perms = list(itertools.permutations(range(3)))
    mult = cayley(perms, lambda g, h: tuple(g[h[i]] for i in range(3)), lambda a, b: a == b)
    pm = [perm_matrix(p) for p in perms]
    sign = [c([[round(np.linalg.det(m.real))]]) for m in pm]
    basis = np.array([[1, -1, 0], [1, 1, -2]], dtype=complex).T
    basis[:, 0] /= np.sqrt(2)
    basis[:, 1] /= np.sqrt(6)
    std = [basis.conj().T @ m @ basis for m in pm]
    emit(
        "s3",
        "S3",
        mult,
        [("trivial", trivial(6)), ("sign", sign), ("standard", std)],
        [
            ("trivial", "trivial", trivial(6)),
            ("sign", "sign", sign),
            ("standard", "standard", std),
            ("perm", "permutation", pm),
        ],
    )

    # D4: r^k s^e, order r^0..r^3, s, rs, r^2 s, r^3 s.
    r = c([[0, -1], [1, 0]])
    s = c([[1, 0], [0, -1]])
    d4 = [np.linalg.matrix_power(r, k) @ np.linalg.matrix_power(s, e) for e in range(2) for k in range(4)]
    mult = cayley(d4, lambda a, b: a @ b, lambda a, b: np.allclose(a, b))
    chars = []
    for a, b, label in [(1, 1, "trivial"), (1, -1, "a2"), (-1, 1, "b1"), (-1, -1, "b2")]:
        chars.append((label, [c([[a**k * b**e]]) for e in range(2) for k in range(4)]))
    emit("d4", "D4", mult, chars + [("standard", d4)], [("standard", "standard", d4)])

    # Q8: 1, -1, i, -i, j, -j, k, -k as SU(2) matrices.
    one = np.eye(2, dtype=complex)
    qi = c([[1j, 0], [0, -1j]])
    qj = c([[0, 1], [-1, 0]])
    qk = qi @ qj
    q8 = []
    for m in [one, qi, qj, qk]:
        q8 += [m, -m]
    mult = cayley(q8, lambda a, b: a @ b, lambda a, b: np.allclose(a, b))
    chars = []
    for a, b, label in [(1, 1, "trivial"), (1, -1, "ci"), (-1, 1, "cj"), (-1, -1, "ck")]:
        vals = []
        for base in [1, a, b, a * b]:
            vals += [c([[base]]), c([[base]])]
        chars.append((label, vals))
    emit("q8", "Q8", mult, chars + [("spinor", q8)], [("spinor", "spinor", q8)])

    # Discrete Heisenberg group over Z_3, index = 9 th + 3 a + v.
    n = 3
    inv2 = pow(2, -1, n)
    elems = [(t, a, v) for t in range(n) for a in range(n) for v in range(n)]

    def hmul(p, q):
        t1, a1, v1 = p
        t2, a2, v2 = q
        phi = ((a2 * v1 - a1 * v2) * inv2) % n
        return ((t1 + t2 + phi) % n, (a1 + a2) % n, (v1 + v2) % n)

    mult = cayley(elems, hmul, lambda a, b: a == b)
    w = np.exp(2j * np.pi / n)
    clock = np.diag([w**k for k in range(n)])
    irr = []
    for j in range(n):
        for k in range(n):
            irr.append((f"chi{j}{k}", [c([[w ** (j * a + k * v)]]) for (_, a, v) in elems]))
    weyl = {}
    for m in range(1, n):
        mats = []
        for (t, a, v) in elems:
            phase = w ** ((m * t + m * a * v * inv2) % n)
            mats.append(phase * shift(n, a) @ np.linalg.matrix_power(clock, (m * v) % n))
        weyl[m] = mats
        irr.append((f"weyl{m}", mats))
    emit("h3", "H(Z3)", mult, irr, [("weyl", "qutrit Weyl", weyl[1])])


if __name__ == "__main__":
    main()
