"""Test-vector files: emission from the library and checking against any producer."""

from __future__ import annotations

import numpy as np

from . import codec

DEFAULT_SUITES = [
    {"kind": "sfext", "params": {"graph": {"family": "cycle", "size": 4}, "d": 2, "n": 8, "m": 2}},
    {"kind": "sfext", "params": {"graph": {"family": "margulis", "size": 3}, "d": 8, "n": 4, "m": 1},
     "note": "margulis(3) has 9 vertices, so this suite only records walks"},
    {"kind": "lse", "params": {"n": 6, "m": 2, "master_seed": 0}},
    {"kind": "iaext", "params": {"n_data": 6, "t": 2, "m": 2, "master_seed": 0}},
    {"kind": "mod", "params": {"q": 7, "p": 3}},
]


def _fmt(bits, d=2):
    return codec.format_string(bits, d)


def _sfext(params):
    from .expander import graph_from_spec, walk
    from .sfext import SfextParams

    G = graph_from_spec(params["graph"])
    d, n, m = params["d"], params["n"], params["m"]
    if G.N != d**m:
        rng = np.random.default_rng(1)
        walks = []
        for _ in range(16):
            start = int(rng.integers(G.N))
            labels = tuple(int(v) for v in rng.integers(0, G.d, n))
            walks.append([start, _fmt(labels, G.d), walk(G, start, labels)])
        return {"walk": walks}
    ext = SfextParams(G, d, n, m, lam=0.5)
    extract = [[_fmt(codec.to_digits(i, d, n), d), _fmt(ext.extract(codec.to_digits(i, d, n)), d)]
               for i in range(d**n)]
    invert = [[_fmt(codec.to_digits(x, d, m), d), z,
               _fmt(ext.invert(codec.to_digits(x, d, m), z), d)]
              for x in range(d**m) for z in range(0, ext.seed_space, max(1, ext.seed_space // 8))]
    return {"extract": extract, "invert": invert}


def _lse(params):
    from .linext import lse_extract, toeplitz_family

    E = toeplitz_family(params["n"], params["m"], t=params.get("t"), master_seed=params["master_seed"])
    rng = np.random.default_rng(2)
    cases = []
    for _ in range(32):
        x = tuple(int(v) for v in rng.integers(0, 2, E.n))
        z = int(rng.integers(0, 1 << E.t))
        cases.append([_fmt(x), z, _fmt(lse_extract(E, x, z))])
    return {"extract": cases}


def _iaext(params):
    from .affext import InvertibleAffineExtractor, quadratic_bank
    from .linext import toeplitz_family

    E = toeplitz_family(params["n_data"], params["m"], t=params["t"], master_seed=params["master_seed"])
    I = InvertibleAffineExtractor(quadratic_bank(params["n_data"], 2), E)
    extract = [[_fmt(codec.to_digits(i, 2, I.n)), _fmt(I.extract(codec.to_digits(i, 2, I.n)))]
               for i in range(1 << I.n)]
    return {"extract": extract}


def _mod(params):
    from .sfext import mod_map, mod_preimages

    q, p = params["q"], params["p"]
    return {"map": [[x, mod_map(q, p, x)] for x in range(1, q + 1)],
            "preimages": [[y, list(mod_preimages(q, p, y))] for y in range(1, p + 1)]}


_EMITTERS = {"sfext": _sfext, "lse": _lse, "iaext": _iaext, "mod": _mod}


def emit(cfg=None):
    suites = (cfg or {}).get("suites", DEFAULT_SUITES)
    out = []
    for s in suites:
        out.append({"kind": s["kind"], "params": s["params"], **_EMITTERS[s["kind"]](s["params"])})
    return {"version": 1, "producer": "wiretap-kit", "suites": out}


def count(doc):
    return sum(len(v) for s in doc["suites"] for k, v in s.items() if isinstance(v, list))


def check(doc):
    """Recompute every case with the library; returns a list of mismatch descriptions."""
    from .expander import graph_from_spec, walk

    failures = []
    for s in doc["suites"]:
        kind, params = s["kind"], s["params"]
        if kind == "sfext":
            G = graph_from_spec(params["graph"])
            for start, labels, end in s.get("walk", []):
                if walk(G, start, codec.parse_string(labels, G.d)) != end:
                    failures.append(f"sfext walk {start} {labels}")
            if "extract" in s or "invert" in s:
                from .sfext import SfextParams

                d = params["d"]
                ext = SfextParams(G, d, params["n"], params["m"], lam=0.5)
                for y, x in s.get("extract", []):
                    if _fmt(ext.extract(codec.parse_string(y, d)), d) != x:
                        failures.append(f"sfext extract {y}")
                for x, z, y in s.get("invert", []):
                    got = ext.invert(codec.parse_string(x, d), z)
                    if _fmt(got, d) != y or _fmt(ext.extract(got), d) != x:
                        failures.append(f"sfext invert {x} {z}")
        elif kind == "lse":
            from .linext import lse_extract, toeplitz_family

            E = toeplitz_family(params["n"], params["m"], t=params.get("t"),
                                master_seed=params["master_seed"])
            for x, z, y in s["extract"]:
                if _fmt(lse_extract(E, codec.parse_string(x, 2), z)) != y:
                    failures.append(f"lse extract {x} {z}")
        elif kind == "iaext":
            from .affext import InvertibleAffineExtractor, quadratic_bank
            from .linext import toeplitz_family

            E = toeplitz_family(params["n_data"], params["m"], t=params["t"],
                                master_seed=params["master_seed"])
            I = InvertibleAffineExtractor(quadratic_bank(params["n_data"], 2), E)
            for y, x in s["extract"]:
                if _fmt(I.extract(codec.parse_string(y, 2))) != x:
                    failures.append(f"iaext extract {y}")
        elif kind == "mod":
            from .sfext import mod_map, mod_preimages

            q, p = params["q"], params["p"]
            for x, y in s.get("map", []):
                if mod_map(q, p, x) != y:
                    failures.append(f"mod map {x}")
            for y, pre in s.get("preimages", []):
                if list(mod_preimages(q, p, y)) != pre:
                    failures.append(f"mod preimages {y}")
        else:
            failures.append(f"unknown suite kind {kind!r}")
    return failures
