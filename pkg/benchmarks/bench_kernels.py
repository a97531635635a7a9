"""Time the compiled search kernels against the pure-Python ones.

Both backends run the same workloads; their outputs are compared before any
timing is reported, so a speedup is never shown for diverging results.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json]
"""

import argparse
import json
import platform
import time

from mcayley import _ckernels, _pykernels
from mcayley.aut import colored
from mcayley.groups import make_named_group
from mcayley.perms import right_regular
from mcayley.repro.fixtures import fixture


def _aut_case(name, gamma, parts="none"):
    cd = colored(gamma, parts)
    args = (cd.n, cd.adjacency, list(cd.colors))
    return name, "automorphisms", args


def _iso_case(name, g, h):
    a, b = colored(g, "setwise"), colored(h, "setwise")
    return name, "isomorphism", (a.n, a.adjacency, list(a.colors), b.adjacency, list(b.colors))


def _closure_case(name, gens, bound):
    return name, "closure", (gens, len(gens[0]), bound)


def workloads():
    f1 = fixture("F1")
    s6 = [(1, 0, 2, 3, 4, 5), (1, 2, 3, 4, 5, 0)]
    gadget = fixture("cyclic-gadget(7)").build()
    return [
        _aut_case("F2 Aut (6 vertices)", fixture("F2").build()),
        _aut_case("F8 Aut (18 vertices)", fixture("F8").build()),
        _aut_case("F10 Aut, parts fixed (24 vertices)", fixture("F10").build(), "fixed"),
        _aut_case("cyclic-gadget(7) Aut (28 vertices)", gadget),
        _aut_case("cyclic-gadget(15) Aut (60 vertices)", fixture("cyclic-gadget(15)").build()),
        _iso_case("F1 pair, part-preserving iso", f1.build(), f1.build_partner()),
        _closure_case("S6 from two generators", s6, 720),
        _closure_case("R(Z3xZ3) on 4 parts", list(right_regular(make_named_group("Z3xZ3"), 4).generators), 9),
        _closure_case("S8 from two generators", [(1, 0, 2, 3, 4, 5, 6, 7), (1, 2, 3, 4, 5, 6, 7, 0)], 40320),
    ]


def _normalize(kind, result):
    if kind == "automorphisms":
        gens, base, sizes = result
        return sorted(map(tuple, gens)), list(base), list(sizes)
    if kind == "closure":
        return None if result is None else sorted(map(tuple, result))
    return None if result is None else tuple(result)


def _time(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--json", action="store_true")
    args = parser.parse_args()

    rows = []
    for name, kind, call in workloads():
        py_fn, c_fn = getattr(_pykernels, kind), getattr(_ckernels, kind)
        py_out, c_out = _normalize(kind, py_fn(*call)), _normalize(kind, c_fn(*call))
        # automorphism generators may differ; the group order and base must not
        if kind == "automorphisms":
            same = py_out[2] == c_out[2]
        elif kind == "isomorphism":
            same = (py_out is None) == (c_out is None)
        else:
            same = py_out == c_out
        if not same:
            raise SystemExit(f"backends disagree on {name}")
        py_t = _time(py_fn, call, args.repeat)
        c_t = _time(c_fn, call, args.repeat)
        rows.append({"workload": name, "kernel": kind, "python_s": py_t, "compiled_s": c_t,
                     "speedup": py_t / c_t if c_t else float("inf")})

    if args.json:
        print(json.dumps({"python": platform.python_version(), "rows": rows}, indent=2))
        return
    width = max(len(r["workload"]) for r in rows)
    print(f"{'workload':<{width}}  {'python':>10}  {'compiled':>10}  speedup")
    for r in rows:
        print(f"{r['workload']:<{width}}  {r['python_s'] * 1e3:>8.2f}ms  {r['compiled_s'] * 1e3:>8.2f}ms"
              f"  {r['speedup']:>6.1f}x")


if __name__ == "__main__":
    main()
