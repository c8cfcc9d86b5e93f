#!/usr/bin/env python3
"""Generate fully symmetric quadrature rules on the triangle and tetrahedron.

Each rule is a set of symmetry orbits in barycentric coordinates whose
weights and parameters satisfy the moment equations
    sum_k w_k lambda_k^alpha = d! prod(alpha_i!) / (|alpha| + d)!
for every sorted multi-index with |alpha| = q (lower degrees follow from
sum(lambda) = 1), with weights normalized to unit measure. Only rules with
positive weights and strictly interior points are accepted.

Two strategies are used per degree:
  1. known orbit structures from the literature, solved from random starts;
  2. node elimination: a collapsed-coordinate Gauss-Jacobi rule symmetrized
     over all vertex permutations is exact, positive and interior; orbits are
     removed one at a time and the remaining ones re-solved until no orbit
     can be dropped.

Results are cached per degree in a JSON file so interrupted runs resume.

Usage: gen_simplex_rules.py [--tri 12] [--tet 8] [--cache rules.json] > simplex_rule_tables.hpp
"""
import argparse
import itertools
import json
import math
import os
import sys

import numpy as np
from scipy.optimize import least_squares
from scipy.special import roots_jacobi

rng = np.random.default_rng(20240607)

# orbit kind -> (constant c, matrix A): representative = c + A @ params
KINDS = {
    2: {
        "S3": ([1 / 3, 1 / 3, 1 / 3], np.zeros((3, 0))),
        "S21": ([0, 0, 1], [[1], [1], [-2]]),
        "S111": ([0, 0, 1], [[1, 0], [0, 1], [-1, -1]]),
    },
    3: {
        "S4": ([0.25] * 4, np.zeros((4, 0))),
        "S31": ([0, 0, 0, 1], [[1], [1], [1], [-3]]),
        "S22": ([0, 0, 0.5, 0.5], [[1], [1], [-1], [-1]]),
        "S211": ([0, 0, 0, 1], [[1, 0], [1, 0], [0, 1], [-2, -1]]),
        "S1111": ([0, 0, 0, 1], [[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, -1, -1]]),
    },
}
SIZE = {"S3": 1, "S21": 3, "S111": 6, "S4": 1, "S31": 4, "S22": 6, "S211": 12, "S1111": 24}
UPPER = {"S21": [0.5], "S111": [1, 1], "S31": [1 / 3], "S22": [0.5], "S211": [0.5, 1], "S1111": [1, 1, 1]}

# Orbit structures of published positive interior rules, tried first.
HINTS = {
    2: {1: [[("S3", 1)]], 2: [[("S21", 1)]], 3: [[("S21", 2)]], 4: [[("S21", 2)]],
        5: [[("S3", 1), ("S21", 2)]], 6: [[("S21", 2), ("S111", 1)]], 7: [[("S21", 1), ("S111", 2)]],
        8: [[("S3", 1), ("S21", 3), ("S111", 1)]], 9: [[("S3", 1), ("S21", 4), ("S111", 1)]],
        10: [[("S3", 1), ("S21", 2), ("S111", 3)]]},
    3: {1: [[("S4", 1)]], 2: [[("S31", 1)]], 3: [[("S31", 1), ("S22", 1)]], 4: [[("S31", 2), ("S22", 1)]],
        5: [[("S31", 2), ("S22", 1)]], 6: [[("S31", 3), ("S211", 1)]]},
}


def partitions(q, parts):
    out = set()
    for c in itertools.combinations_with_replacement(range(q + 1), parts):
        if sum(c) == q:
            out.add(tuple(sorted(c, reverse=True)))
    return sorted(out)


def exact_moment(alpha, d):
    num = math.factorial(d) * math.prod(math.factorial(a) for a in alpha)
    return num / math.factorial(sum(alpha) + d)


class System:
    """Moment residual and Jacobian for a list of orbit kinds."""

    def __init__(self, dim, q, kinds):
        self.dim, self.kinds = dim, list(kinds)
        self.alphas = np.array(partitions(q, dim + 1), dtype=float)
        self.rhs = np.array([exact_moment(a.astype(int), dim) for a in self.alphas])
        self.perm = np.array(list(itertools.permutations(range(dim + 1))))
        self.npar = [np.asarray(KINDS[dim][k][1], dtype=float).shape[1] for k in self.kinds]
        self.nw = len(self.kinds)

    def unpack(self, x):
        ws = x[: self.nw]
        ps, i = [], self.nw
        for n in self.npar:
            ps.append(x[i: i + n])
            i += n
        return ws, ps

    def rep(self, k, p):
        c, a = KINDS[self.dim][k]
        return np.asarray(c, dtype=float) + np.asarray(a, dtype=float) @ np.asarray(p, dtype=float)

    def residual_and_jacobian(self, x):
        ws, ps = self.unpack(x)
        r = -self.rhs.copy()
        jac = np.zeros((len(self.rhs), len(x)))
        col = self.nw
        amat = self.alphas
        for j, (k, w, p) in enumerate(zip(self.kinds, ws, ps)):
            rep = self.rep(k, p)
            pts = rep[self.perm]  # [P, d+1]
            powers = pts[:, None, :] ** amat[None, :, :]  # [P, A, d+1]
            mono = np.prod(powers, axis=-1)  # [P, A]
            vals = SIZE[k] * mono.mean(axis=0)
            r += w * vals
            jac[:, j] = vals
            n = self.npar[j]
            if n:
                with np.errstate(divide="ignore", invalid="ignore"):
                    d = np.where(amat[None] > 0, amat[None] * pts[:, None, :] ** (amat[None] - 1), 0.0)
                # derivative of the monomial with respect to coordinate i
                others = np.empty_like(powers)
                for i in range(self.dim + 1):
                    others[..., i] = np.prod(np.delete(powers, i, axis=-1), axis=-1)
                dmono = d * others  # [P, A, d+1]
                amap = np.asarray(KINDS[self.dim][k][1], dtype=float)[self.perm]  # [P, d+1, n]
                jac[:, col: col + n] = SIZE[k] * w * np.einsum("pai,pin->an", dmono, amap) / len(self.perm)
            col += n
        return r / self.rhs, jac / self.rhs[:, None]

    def bounds(self):
        lo = [0.0] * self.nw
        hi = [np.inf] * self.nw
        for k, n in zip(self.kinds, self.npar):
            lo += [0.0] * n
            hi += UPPER.get(k, [])
        return np.array(lo), np.array(hi)

    def solve(self, x0, max_nfev=400):
        lo, hi = self.bounds()
        x0 = np.clip(x0, lo + 1e-12, np.where(np.isfinite(hi), hi - 1e-12, np.inf))
        sol = least_squares(lambda x: self.residual_and_jacobian(x)[0], x0,
                            jac=lambda x: self.residual_and_jacobian(x)[1], bounds=(lo, hi),
                            method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=max_nfev)
        return sol.x if self.valid(sol.x) else None

    def valid(self, x):
        r, _ = self.residual_and_jacobian(x)
        if np.max(np.abs(r)) > 1e-14:
            return False
        ws, ps = self.unpack(x)
        if np.any(ws <= 0):
            return False
        seen = set()
        for k, p in zip(self.kinds, ps):
            rep = self.rep(k, p)
            if rep.min() <= 1e-10:
                return False
            pts = {tuple(np.round(rep[list(s)], 10)) for s in self.perm}
            if len(pts) != SIZE[k] or seen & pts:
                return False
            seen |= pts
        return True


def random_start(dim, kinds):
    total = sum(SIZE[k] for k in kinds)
    x = list(rng.uniform(0.3, 1.0, len(kinds)) / total)
    for k in kinds:
        if k in ("S111",):
            x += list(rng.dirichlet(np.ones(3))[:2])
        elif k == "S1111":
            x += list(rng.dirichlet(np.ones(4))[:3])
        elif k == "S211":
            a = rng.uniform(0.02, 0.45)
            x += [a, rng.uniform(0.02, 1 - 2 * a - 0.02)]
        elif k in UPPER:
            x += [rng.uniform(0.02, UPPER[k][0] - 0.02)]
    return np.array(x)


def from_hint(dim, q, structure, tries):
    kinds = [k for k, n in structure for _ in range(n)]
    system = System(dim, q, kinds)
    for _ in range(tries):
        x = system.solve(random_start(dim, kinds))
        if x is not None:
            return kinds, x
    return None


def conical_rule(dim, q):
    """Collapsed-coordinate Gauss-Jacobi rule, exact to degree q, in barycentric form."""
    n = (q + 2) // 2

    def gj(alpha):
        x, w = roots_jacobi(n, alpha, 0.0)
        return (1 + x) / 2, w / 2 ** (alpha + 1)

    u, wu = gj(float(dim - 1))
    if dim == 2:
        v, wv = gj(0.0)
        pts, wts = [], []
        for a, wa in zip(u, wu):
            for b, wb in zip(v, wv):
                l1, l2 = a, b * (1 - a)
                pts.append((1 - l1 - l2, l1, l2))
                wts.append(wa * wb)
    else:
        v, wv = gj(1.0)
        t, wt = gj(0.0)
        pts, wts = [], []
        for a, wa in zip(u, wu):
            for b, wb in zip(v, wv):
                for c, wc in zip(t, wt):
                    l1, l2, l3 = a, b * (1 - a), c * (1 - a) * (1 - b)
                    pts.append((1 - l1 - l2 - l3, l1, l2, l3))
                    wts.append(wa * wb * wc)
    wts = np.array(wts) / np.sum(wts)
    return np.array(pts), wts


def classify(rep):
    """Orbit kind and parameters of a barycentric point."""
    r = sorted(rep)
    groups = []
    for v in r:
        if groups and abs(v - groups[-1][0]) < 1e-12:
            groups[-1][1] += 1
        else:
            groups.append([v, 1])
    mult = sorted(m for _, m in groups)
    rep_of = {m: v for v, m in groups}
    singles = [v for v, m in groups if m == 1]
    if len(rep) == 3:
        if mult == [3]:
            return "S3", []
        if mult == [1, 2]:
            return "S21", [rep_of[2]]
        return "S111", r[:2]
    if mult == [4]:
        return "S4", []
    if mult == [1, 3]:
        return "S31", [rep_of[3]]
    if mult == [2, 2]:
        return "S22", [groups[0][0]]
    if mult == [1, 1, 2]:
        return "S211", [rep_of[2], singles[0]]
    return "S1111", r[:3]


def eliminate(dim, q, log):
    """Node elimination starting from the symmetrized conical rule."""
    pts, wts = conical_rule(dim, q)
    merged = {}
    for pt, w in zip(pts, wts):
        key = tuple(np.round(sorted(pt), 11))
        if key in merged:
            merged[key][1] += w
        else:
            merged[key] = [pt, w]
    kinds, ws, params = [], [], []
    for pt, w in merged.values():
        k, p = classify(pt)
        kinds.append(k)
        ws.append(w / SIZE[k])
        params.extend(p)
    x = np.array(ws + params)
    system = System(dim, q, kinds)
    assert system.valid(x), "symmetrized conical rule is not exact"
    while True:
        ws, _ = system.unpack(x)
        order = np.argsort(ws * np.array([SIZE[k] for k in kinds]))
        neq = len(system.rhs)
        for j in order:
            trial = kinds[:j] + kinds[j + 1:]
            if len(trial) + sum(System(dim, q, trial).npar) < neq:
                continue
            tsys = System(dim, q, trial)
            ws, ps = system.unpack(x)
            x0 = np.concatenate([np.delete(ws, j)] + [p for i, p in enumerate(ps) if i != j])
            # redistribute the removed weight so the start stays normalized
            x0[: len(trial)] *= 1.0 / (1.0 - ws[j] * SIZE[kinds[j]])
            sol = tsys.solve(x0)
            if sol is not None:
                kinds, x, system = trial, sol, tsys
                log(f"  dim {dim} q {q}: {sum(SIZE[k] for k in kinds)} points")
                break
        else:
            return kinds, x


def find(dim, q, tries, log):
    best = None
    for st in HINTS[dim].get(q, []):
        res = from_hint(dim, q, st, tries)
        if res is not None:
            best = res
            break
    if best is None:
        best = eliminate(dim, q, log)
    return best


def to_json(dim, kinds, x):
    system = System(dim, 1, kinds)
    ws, ps = system.unpack(x)
    return [[k, float(w), [float(v) for v in p]] for k, w, p in zip(kinds, ws, ps)]


HEADER = """#pragma once

// Generated by tools/gen_simplex_rules.py. Do not edit by hand.
//
// Fully symmetric quadrature rules on the reference triangle and tetrahedron,
// stored as symmetry orbits in barycentric coordinates. Every orbit carries the
// weight of each of its points; weights sum to one over the whole rule.

#include <algorithm>
#include <array>
#include <stdexcept>
#include <vector>

namespace fealcore::detail {

enum class Orbit { s3, s21, s111, s4, s31, s22, s211, s1111 };

struct OrbitEntry {
    Orbit kind;
    double weight;
    std::array<double, 3> param;
};

/// All distinct barycentric points of an orbit (padded to four coordinates).
inline std::vector<std::array<double, 4>> expand_orbit(const OrbitEntry& e)
{
    const auto& p = e.param;
    std::array<double, 4> rep{};
    int n = 3;
    switch (e.kind) {
    case Orbit::s3: rep = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0}; break;
    case Orbit::s21: rep = {p[0], p[0], 1 - 2 * p[0], 0.0}; break;
    case Orbit::s111: rep = {p[0], p[1], 1 - p[0] - p[1], 0.0}; break;
    case Orbit::s4: rep = {0.25, 0.25, 0.25, 0.25}; n = 4; break;
    case Orbit::s31: rep = {p[0], p[0], p[0], 1 - 3 * p[0]}; n = 4; break;
    case Orbit::s22: rep = {p[0], p[0], 0.5 - p[0], 0.5 - p[0]}; n = 4; break;
    case Orbit::s211: rep = {p[0], p[0], p[1], 1 - 2 * p[0] - p[1]}; n = 4; break;
    case Orbit::s1111: rep = {p[0], p[1], p[2], 1 - p[0] - p[1] - p[2]}; n = 4; break;
    }
    std::sort(rep.begin(), rep.begin() + n);
    std::vector<std::array<double, 4>> out;
    do {
        out.push_back(rep);
    } while (std::next_permutation(rep.begin(), rep.begin() + n));
    return out;
}
"""


def emit(dim, q, rule):
    name = "triangle" if dim == 2 else "tetrahedron"
    total = sum(SIZE[k] for k, _, _ in rule)
    lines = [f"// degree {q}, {total} points",
             f"inline const std::vector<OrbitEntry> k_{name}_q{q} = {{"]
    for k, w, p in rule:
        pad = list(p) + [0.0] * (3 - len(p))
        lines.append(f"    {{Orbit::{k.lower()}, {w!r}, {{{pad[0]!r}, {pad[1]!r}, {pad[2]!r}}}}},")
    lines.append("};")
    return lines


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tri", type=int, default=12, help="highest triangle degree")
    ap.add_argument("--tet", type=int, default=8, help="highest tetrahedron degree")
    ap.add_argument("--cache", default="simplex_rules_cache.json", help="per-degree result cache")
    ap.add_argument("--tries", type=int, default=40, help="random starts per known structure")
    args = ap.parse_args()

    cache = {}
    if os.path.exists(args.cache):
        with open(args.cache) as f:
            cache = json.load(f)

    def log(msg):
        print(msg, file=sys.stderr, flush=True)

    out = [HEADER]
    for dim, maxdeg in ((2, args.tri), (3, args.tet)):
        name = "triangle" if dim == 2 else "tetrahedron"
        for q in range(1, maxdeg + 1):
            key = f"{dim}/{q}"
            if key not in cache:
                kinds, x = find(dim, q, args.tries, log)
                cache[key] = to_json(dim, kinds, x)
                with open(args.cache, "w") as f:
                    json.dump(cache, f, indent=1)
            rule = cache[key]
            log(f"dim {dim} q {q}: {sum(SIZE[k] for k, _, _ in rule)} points")
            out.extend(emit(dim, q, rule))
            out.append("")
        out.append(f"inline constexpr int k_max_{name}_degree = {maxdeg};")
        out.append("")
        out.append(f"inline const std::vector<OrbitEntry>& {name}_rule_table(int q)")
        out.append("{")
        out.append("    switch (q) {")
        for q in range(1, maxdeg + 1):
            out.append(f"    case {q}: return k_{name}_q{q};")
        out.append('    default: throw std::out_of_range("no symmetric rule of this degree");')
        out.append("    }")
        out.append("}")
        out.append("")
    out.append("} // namespace fealcore::detail")
    print("\n".join(out))


if __name__ == "__main__":
    main()
