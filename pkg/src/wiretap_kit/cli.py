"""Command-line front end.

Exit codes: 0 all declared bounds hold, 1 a bound is violated, 2 bad input,
3 enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, codec
from .config import set_enumeration_cap
from .errors import BadHeader, BoundViolation, EnumerationCapExceeded, WiretapKitError

EXIT_OK, EXIT_BOUND, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3
FORMAT_VERSION = 1


class _Partial(Exception):
    """Carries a partial report out of a command that hit the cap."""

    def __init__(self, cause, report):
        super().__init__(str(cause))
        self.cause = cause
        self.report = report


def canonical(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(cfg):
    return hashlib.sha256(canonical(cfg).encode()).hexdigest()


def fs(v):
    v = Fraction(v)
    return f"{v.numerator}/{v.denominator}"


# ---------------------------------------------------------------------------
# Builders


def build_extractor(spec):
    """Return (invertible extractor, k, measured extractor error)."""
    from .affext import InvertibleAffineExtractor, affine_error, quadratic_bank
    from .expander import graph_from_spec
    from .linext import random_family, toeplitz_family
    from .sfext import RoundedSfextParams, SfextParams, sfext_measured_error

    kind = spec["kind"]
    if kind == "sfext":
        G = graph_from_spec(spec["graph"])
        ext = SfextParams(G, spec["d"], spec["n"], spec["m"], k=spec["k"])
        err = Fraction(spec["epsilon"]) if "epsilon" in spec else sfext_measured_error(ext, spec["k"])
        return ext, spec["k"], err
    if kind == "rounded":
        G = graph_from_spec(spec["graph"])
        ext = RoundedSfextParams(G, spec["d"], spec["n"], spec["m"], spec["m_prime"])
        return ext, spec["k"], Fraction(spec.get("epsilon", 1))
    if kind == "iaext":
        nd, t, m = spec["n_data"], spec["t"], spec["m"]
        if spec.get("family", "toeplitz") == "toeplitz":
            E = toeplitz_family(nd, m, t=t, master_seed=spec.get("master_seed", 0))
        else:
            E = random_family(nd, m, t, spec.get("master_seed", 0))
        I = InvertibleAffineExtractor(quadratic_bank(nd, spec.get("l", 2)), E)
        k = spec["k"]
        err = Fraction(spec["epsilon"]) if "epsilon" in spec else affine_error(I, I.n, k)
        return I, k, err
    raise WiretapKitError(f"unknown extractor kind {kind!r}")


def build_protocol(spec):
    from .wiretap import from_invertible_extractor, identity_protocol, one_time_pad

    kind = spec["kind"]
    if kind == "one-time-pad":
        return one_time_pad()
    if kind == "identity":
        return identity_protocol(spec.get("q", 2), spec.get("n", 1), spec.get("t", 1))
    ext, k, err = build_extractor(spec)
    return from_invertible_extractor(ext, k, err, name=kind)


def build_side_channel(spec):
    from .channels import SideChannelProtocol
    from .linext import random_family, toeplitz_family

    n, m = spec["n"], spec["m"]
    if spec.get("family", "toeplitz") == "toeplitz":
        E = toeplitz_family(n, m, t=spec.get("t"), master_seed=spec.get("master_seed", 0))
    else:
        E = random_family(n, m, spec["t"], spec.get("master_seed", 0))
    return SideChannelProtocol(E)


def build_adversary(spec, P):
    from .channels import (
        GeneralAdversary,
        decoder_probe_adversary,
        parity_adversary,
        projection_adversary,
    )

    kind = spec.get("kind", "table")
    if kind == "projection":
        return projection_adversary(P.n, P.t, spec["bits"])
    if kind == "parity":
        return parity_adversary(P.n, P.t, spec["bits"])
    if kind == "decoder-probe":
        return decoder_probe_adversary(P.E, spec.get("guess", 0))
    return GeneralAdversary.from_json(spec)


def build_network(spec):
    from .netsim import TOPOLOGIES, NetworkSpec

    topo = spec["topology"]
    q = spec.get("q", 2)
    if isinstance(topo, str):
        if topo not in TOPOLOGIES:
            raise WiretapKitError(f"unknown topology {topo!r}")
        return TOPOLOGIES[topo](q=q)
    return NetworkSpec.from_json({**topo, "q": topo.get("q", q)})


# ---------------------------------------------------------------------------
# Output


def write_outputs(out, stem, report, rows=None, header=None):
    if out is None:
        return
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{stem}.json").write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
    if rows is not None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        (out / f"{stem}.csv").write_text(buf.getvalue())


def _envelope(cfg, args, body):
    return {"version": FORMAT_VERSION, "config_hash": config_hash(cfg), "seed": args.seed, **body}


# ---------------------------------------------------------------------------
# Commands


def cmd_verify(cfg, args):
    from .wiretap import aont_error, equivocation, verify_resilience

    body, rows, ok = {}, [], True
    try:
        if "protocol" in cfg:
            P = build_protocol(cfg["protocol"])
            body["decodable"] = P.check_decodability()
            ok &= body["decodable"]
            rep = verify_resilience(P, cfg.get("t"), cfg.get("epsilon"), cfg.get("gamma"))
            body["resilience"] = rep.to_json()
            ok &= rep.passed
            for r in rep.subsets:
                for o in r.profile:
                    rows.append([" ".join(map(str, r.S)),
                                 codec.format_string(codec.to_digits(o.w, P.q, len(r.S)), P.q),
                                 fs(o.mass), fs(o.distance)])
            try:
                body["aont"] = aont_error(P, rep.t, rep).to_json()
            except BoundViolation as exc:
                body["aont"] = {"violation": str(exc)}
                ok = False
            value, floor, applicable = equivocation(P, rep.t, rep, check=False)
            eq_ok = not applicable or value >= floor - 1e-12
            body["equivocation"] = {"value": round(value, 12), "floor": round(floor, 12),
                                    "applicable": applicable, "holds": eq_ok}
            ok &= eq_ok
        if "side_channel" in cfg:
            from .channels import general_adversary_report

            SP = build_side_channel(cfg["side_channel"])
            alpha = Fraction(cfg.get("alpha", "1/8"))
            advs = []
            for spec in cfg.get("adversaries", []):
                r = general_adversary_report(SP, build_adversary(spec, SP), alpha=alpha)
                advs.append({"adversary": spec, **r.to_json()})
                ok &= r.leakage_bounded
            body["adversaries"] = advs
        if "affine" in cfg:
            from .affext import affine_error, shaltiel_check

            I, k, _ = build_extractor({**cfg["affine"], "epsilon": 1})
            eps = affine_error(I, I.n, k)
            measured, bound, vacuous, dim = shaltiel_check(I, k)
            target = Fraction(cfg["affine"].get("target", 1))
            body["affine"] = {"k": k, "error": fs(eps), "target": fs(target),
                              "shaltiel_measured": fs(measured), "shaltiel_bound": bound,
                              "shaltiel_vacuous": vacuous, "min_conditioned_dim": dim}
            ok &= eps <= target
    except EnumerationCapExceeded as exc:
        body["error"] = str(exc)
        raise _Partial(exc, _envelope(cfg, args, {"passed": False, **body}))
    report = _envelope(cfg, args, {"passed": bool(ok), **body})
    write_outputs(args.out, "verify", report, rows, ["S", "w", "mass", "distance"])
    print(f"verify: {'pass' if ok else 'FAIL'}"
          + (f" gamma={body['resilience']['gamma']} epsilon={body['resilience']['epsilon_measured']}"
             if "resilience" in body else ""))
    return report, EXIT_OK if ok else EXIT_BOUND


def _payload_symbols(data, q):
    width = math.ceil(8 / math.log2(q)) if q > 2 else 8
    out = []
    for b in data:
        out.extend(codec.to_digits(b, q, width))
    return out, width


def _symbols_payload(symbols, q, width):
    if len(symbols) % width:
        raise BadHeader("symbol stream length is not a whole number of bytes")
    out = bytearray()
    for i in range(0, len(symbols), width):
        v = codec.from_digits(symbols[i:i + width], q)
        if v > 255:
            raise BadHeader("decoded symbol group is not a byte")
        out.append(v)
    return bytes(out)


def _read_payload(args):
    if args.input and args.input != "-":
        return Path(args.input).read_bytes()
    return sys.stdin.buffer.read()


def _write_payload(args, data):
    if args.output and args.output != "-":
        Path(args.output).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()


def cmd_encode(cfg, args):
    data = _read_payload(args)
    rng = np.random.default_rng(args.seed)
    side = "side_channel" in cfg
    if side:
        SP = build_side_channel(cfg["side_channel"])
        q, m = 2, SP.m
    else:
        P = build_protocol(cfg["protocol"])
        q, m = P.q, P.m
    symbols, width = _payload_symbols(data, q)
    pad = (-len(symbols)) % m
    if pad and not cfg.get("pad", True):
        raise BadHeader("payload length is not a multiple of the message length")
    symbols += [0] * pad
    lines = []
    for i in range(0, len(symbols), m):
        x = tuple(symbols[i:i + m])
        if side:
            from .channels import general_encode

            main, sd = general_encode(SP, x, rng)
            lines.append(codec.format_string(main, 2) + " " + codec.format_string(sd, 2))
        else:
            from .wiretap import encode

            lines.append(codec.format_string(encode(P, x, rng), q))
    header = {"version": FORMAT_VERSION, "params_hash": config_hash(cfg),
              "seed_commitment": hashlib.sha256(str(args.seed).encode()).hexdigest(),
              "q": q, "m": m, "pad": pad, "width": width, "blocks": len(lines)}
    out = canonical(header) + "\n" + "".join(l + "\n" for l in lines)
    _write_payload(args, out.encode())
    return None, EXIT_OK


def cmd_decode(cfg, args):
    text = _read_payload(args).decode()
    head, _, rest = text.partition("\n")
    try:
        header = json.loads(head)
    except json.JSONDecodeError:
        raise BadHeader("missing or malformed header") from None
    if not isinstance(header, dict) or header.get("version") != FORMAT_VERSION:
        raise BadHeader("unsupported header version")
    if header.get("params_hash") != config_hash(cfg):
        raise BadHeader("params hash does not match the configuration")
    lines = [l for l in rest.split("\n") if l]
    if len(lines) != header.get("blocks"):
        raise BadHeader("block count disagrees with the header")
    q = header["q"]
    symbols = []
    if "side_channel" in cfg:
        from .channels import general_decode

        SP = build_side_channel(cfg["side_channel"])
        for l in lines:
            main, sd = l.split(" ")
            symbols.extend(general_decode(SP, codec.parse_string(main, 2), codec.parse_string(sd, 2)))
    else:
        from .wiretap import decode

        P = build_protocol(cfg["protocol"])
        for l in lines:
            symbols.extend(decode(P, codec.parse_string(l, q)))
    if header["pad"]:
        if any(symbols[-header["pad"]:]):
            raise BadHeader("padding symbols are not zero")
        symbols = symbols[:-header["pad"]]
    _write_payload(args, _symbols_payload(symbols, q, header["width"]))
    return None, EXIT_OK


def _netsim_run(job):
    from .netsim import wiretap_netcode_run

    net, code, P, edges = job
    return wiretap_netcode_run(net, code, P, edges).to_json()


def cmd_netsim(cfg, args):
    import itertools

    from .netsim import assign_random_code, butterfly_xor_code, min_cut

    net = build_network(cfg)
    if cfg.get("code", "random") == "xor":
        code = butterfly_xor_code(net)
    else:
        code = assign_random_code(net, np.random.default_rng(args.seed))
    P = build_protocol(cfg["protocol"])
    if "wiretap" in cfg:
        sets = [tuple(s) for s in cfg["wiretap"]]
    else:
        t = cfg.get("t", 1)
        sets = [s for j in range(t + 1) for s in itertools.combinations(range(len(net.edges)), j)]
    jobs = [(net, code, P, s) for s in sets]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            runs = list(pool.map(_netsim_run, jobs))
    else:
        runs = [_netsim_run(j) for j in jobs]
    ok = all(all(r["receivers"].values()) and r["passed"] for r in runs)
    body = {"network": net.to_json(), "code": code.to_json(),
            "min_cut": {str(r): min_cut(net, r) for r in net.receivers},
            "runs": runs, "passed": ok}
    report = _envelope(cfg, args, body)
    rows = [[" ".join(map(str, r["wiretap_edges"])), r["gamma"], r["epsilon_measured"],
             all(r["receivers"].values())] for r in runs]
    write_outputs(args.out, "netsim", report, rows, ["edges", "gamma", "epsilon", "decoded"])
    print(f"netsim: {'pass' if ok else 'FAIL'} ({len(runs)} wiretap sets)")
    return report, EXIT_OK if ok else EXIT_BOUND


def _spectrum(spec):
    from .expander import graph_from_spec, second_eigenvalue

    G = graph_from_spec(spec["graph"])
    r = second_eigenvalue(G, tol=spec["tol"])
    return {"graph": G.name, "N": G.N, "d": G.d, **r.to_json()}


def cmd_spectra(cfg, args):
    tol = cfg.get("tol", 1e-9)
    jobs = [{"graph": g, "tol": tol} for g in cfg["graphs"]]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            res = list(pool.map(_spectrum, jobs))
    else:
        res = [_spectrum(j) for j in jobs]
    report = _envelope(cfg, args, {"spectra": res})
    rows = [[r["graph"], r["N"], r["d"], repr(r["lambda"]), r["iterations"]] for r in res]
    write_outputs(args.out, "spectra", report, rows, ["graph", "N", "d", "lambda", "iterations"])
    for r in res:
        print(f"{r['graph']}: lambda={r['lambda']:.12f}")
    return report, EXIT_OK


def curve_rows(cfg):
    from .dists import hq
    from .expander import graph_from_spec, second_eigenvalue
    from .sfext import walk_rate

    q = cfg.get("q", 2)
    if "points" in cfg:
        grid = [float(v) for v in cfg["points"]]
    else:
        g = cfg.get("grid", {})
        start, stop, step = g.get("start", 0.0), g.get("stop", 1.0), g.get("step", 0.05)
        count = int(round((stop - start) / step)) + 1
        grid = [round(start + i * step, 12) for i in range(count)]
    walk = None
    if "walk" in cfg:
        w = cfg["walk"]
        G = graph_from_spec(w["graph"])
        lam = w.get("lambda", second_eigenvalue(G).lambda_estimate)
        walk = (G.d, lam)
    rows = []
    for delta in grid:
        if not 0 <= delta <= 1:
            raise WiretapKitError("grid points must lie in [0, 1]")
        rows.append([delta, "information-theoretic", max(0.0, 1 - delta)])
        rows.append([delta, "half-resilience", max(0.0, 1 - 2 * delta)])
        if walk is not None and delta < 1:
            rows.append([delta, "walk", max(0.0, walk_rate(delta, walk[0], walk[1]).rate)])
        rows.append([delta, "entropy", max(0.0, 1 - hq(delta, q))])
    return rows, walk


def cmd_curves(cfg, args):
    rows, walk = curve_rows(cfg)
    body = {"rows": [[d, c, round(r, 12)] for d, c, r in rows]}
    if walk is not None:
        body["walk"] = {"d": walk[0], "lambda": walk[1]}
    report = _envelope(cfg, args, body)
    write_outputs(args.out, "curves", report, [[d, c, repr(round(r, 12))] for d, c, r in rows],
                  ["delta", "curve", "rate"])
    if args.out is None:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["delta", "curve", "rate"])
        for d, c, r in rows:
            w.writerow([d, c, repr(round(r, 12))])
    return report, EXIT_OK


def cmd_vectors(cfg, args):
    from . import vectors

    if args.action == "emit":
        doc = vectors.emit(cfg if cfg else None)
        text = json.dumps(doc, sort_keys=True, indent=1) + "\n"
        if args.out:
            Path(args.out).mkdir(parents=True, exist_ok=True)
            (Path(args.out) / "vectors.json").write_text(text)
        else:
            sys.stdout.write(text)
        return doc, EXIT_OK
    if not args.path:
        raise WiretapKitError("vectors check needs a file")
    doc = json.loads(Path(args.path).read_text())
    failures = vectors.check(doc)
    for f in failures:
        print(f"mismatch: {f}")
    print(f"vectors: {'pass' if not failures else 'FAIL'} ({vectors.count(doc)} cases)")
    return None, EXIT_OK if not failures else EXIT_BOUND


COMMANDS = {
    "encode": cmd_encode,
    "decode": cmd_decode,
    "verify": cmd_verify,
    "netsim": cmd_netsim,
    "spectra": cmd_spectra,
    "curves": cmd_curves,
    "vectors": cmd_vectors,
}


def build_parser():
    p = argparse.ArgumentParser(prog="wiretap-kit", description="Invertible extractors and wiretap protocols.")
    p.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration file")
    common.add_argument("--seed", type=int, default=0, help="master seed (u64)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for independent runs")
    common.add_argument("--cap", type=int, help="enumeration cap (table entries)")
    common.add_argument("--out", help="output directory for JSON/CSV reports")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("verify", "netsim", "spectra", "curves"):
        sub.add_parser(name, parents=[common])
    for name in ("encode", "decode"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("--input", "-i", help="input file (default stdin)")
        sp.add_argument("--output", "-o", help="output file (default stdout)")
    sp = sub.add_parser("vectors", parents=[common])
    sp.add_argument("action", choices=["emit", "check"])
    sp.add_argument("path", nargs="?")
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        if args.seed < 0 or args.seed >= 1 << 64:
            raise WiretapKitError("seed must be an unsigned 64-bit integer")
        if args.jobs < 1:
            raise WiretapKitError("--jobs must be positive")
        if args.cap is not None:
            if args.cap <= 0:
                raise WiretapKitError("--cap must be positive")
            set_enumeration_cap(args.cap)
        cfg = json.loads(Path(args.config).read_text()) if args.config else {}
        _, code = COMMANDS[args.command](cfg, args)
        return code
    except _Partial as exc:
        write_outputs(args.out, f"{args.command}.partial", exc.report)
        print(f"error: {exc.cause}", file=sys.stderr)
        return EXIT_CAP
    except EnumerationCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except BoundViolation as exc:
        print(f"bound violated: {exc}", file=sys.stderr)
        return EXIT_BOUND
    except (WiretapKitError, OSError, json.JSONDecodeError, KeyError, ValueError, TypeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    finally:
        set_enumeration_cap(None)


if __name__ == "__main__":
    sys.exit(main())
