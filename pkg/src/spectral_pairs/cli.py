"""
JSON in, JSON out.

    spectral-pairs certify-finite '{"A": [0, 2], "L": ["0", "1/4"]}'
    echo '{"cmd": "dj-spectrum", "A": 4, "B": [0, 2], "L": [0, 1], "radius": 64}' | spectral-pairs
    echo '{"A": [0, 1, 8, 9]}' | spectral-pairs decompose -

Exit codes: 0 for conclusive answers (including refutations), 2 for malformed
requests, 3 for internal errors.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from typing import Any, Callable

import numpy as np

from . import finite_spectral, ifs_measures, interval_sets, multidim, validation
from .finite_spectral import NotSpectralError, OperationChain, StepI, StepII
from .ifs_measures import AffineIFS, HypothesisError

EXIT_OK, EXIT_SCHEMA, EXIT_INTERNAL = 0, 2, 3


class SchemaError(ValueError):
    pass


# ---------------------------------------------------------------------------
# serialization


def _fmt_float(x: float):
    if math.isnan(x) or math.isinf(x):
        return str(x)
    return float(f"{x:.12g}")


def to_jsonable(obj: Any):
    if hasattr(obj, "to_json"):
        return to_jsonable(obj.to_json())
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _fmt_float(obj.real), "im": _fmt_float(obj.imag)}
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(result: dict) -> str:
    return json.dumps(to_jsonable(result), sort_keys=True, indent=2)


# ---------------------------------------------------------------------------
# request parsing


class Request:
    def __init__(self, data: dict, allowed: set):
        unknown = set(data) - allowed - {"cmd"}
        if unknown:
            raise SchemaError(f"unknown fields: {sorted(unknown)}")
        self.data = data

    def get(self, key, default=None):
        return self.data.get(key, default)

    def need(self, key):
        if key not in self.data:
            raise SchemaError(f"missing field {key!r}")
        return self.data[key]

    def ints(self, key, default=None) -> list[int]:
        v = self.data.get(key, default)
        if v is None:
            raise SchemaError(f"missing field {key!r}")
        if not isinstance(v, list) or not all(isinstance(a, int) and not isinstance(a, bool) for a in v):
            raise SchemaError(f"{key!r} must be an array of integers")
        return v

    def integer(self, key, default=None) -> int:
        v = self.data.get(key, default)
        if not isinstance(v, int) or isinstance(v, bool):
            raise SchemaError(f"{key!r} must be an integer")
        return v

    def number(self, key, default=None) -> float:
        v = self.data.get(key, default)
        if isinstance(v, str):
            try:
                return float(Fraction(v))
            except ValueError:
                raise SchemaError(f"{key!r} must be a number") from None
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise SchemaError(f"{key!r} must be a number")
        return float(v)

    def rationals(self, key) -> list[Fraction]:
        v = self.need(key)
        if not isinstance(v, list):
            raise SchemaError(f"{key!r} must be an array")
        return [rational(x, key) for x in v]


def rational(x, key="value") -> Fraction:
    if isinstance(x, bool):
        raise SchemaError(f"{key!r}: booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except ValueError:
            raise SchemaError(f"{key!r}: cannot parse {x!r} as p/q") from None
    raise SchemaError(f"{key!r}: rationals are integers or \"p/q\" strings, got {x!r}")


def _ifs(req: Request) -> AffineIFS:
    A = req.need("A")
    B = req.need("B")
    try:
        if isinstance(A, list):
            return AffineIFS(tuple(tuple(r) for r in A), tuple(tuple(b) for b in B))
        return AffineIFS(A, tuple(B))
    except (TypeError, ValueError) as exc:
        raise SchemaError(str(exc)) from None


def _region(spec) -> multidim.BoxUnionRegion:
    if spec == "staircase":
        return multidim.staircase()
    if isinstance(spec, str) and spec.startswith("unit_cube"):
        return multidim.unit_cube(int(spec.split(":")[1]) if ":" in spec else 3)
    if isinstance(spec, dict):
        try:
            return multidim.BoxUnionRegion.from_json(spec)
        except (KeyError, ValueError, TypeError) as exc:
            raise SchemaError(f"bad region: {exc}") from None
    raise SchemaError("region must be \"staircase\", \"unit_cube:d\" or {cell_size, cells}")


def _spectrum(spec, measure=None):
    if not isinstance(spec, dict) or len(spec) != 1:
        raise SchemaError("spectrum must be a one-key object")
    (kind, body), = spec.items()
    if kind == "finite":
        return finite_spectral.RationalSpectrum([rational(p, "finite") for p in body])
    if kind == "quasi_lattice":
        return interval_sets.QuasiLattice(
            finite_spectral.RationalSpectrum([rational(p, "finite") for p in body.get("finite", ["0"])]),
            rational(body.get("step", "1"), "step"),
        )
    if kind == "generated":
        if not isinstance(measure, AffineIFS):
            raise SchemaError("generated spectra need an IFS measure")
        return ifs_measures.cycle_spectrum(measure, body["L"])
    if kind == "product":
        return multidim.product_spectrum([_spectrum(s) for s in body])
    if kind == "derived":
        if not isinstance(measure, multidim.BoxUnionRegion):
            raise SchemaError("derived spectra need a region")
        return multidim.derive_product_spectrum(measure)
    raise SchemaError(f"unknown spectrum kind {kind!r}")


def _measure(spec):
    if not isinstance(spec, dict) or len(spec) != 1:
        raise SchemaError("measure must be a one-key object")
    (kind, body), = spec.items()
    if kind == "ifs":
        return _ifs(Request(body, {"A", "B"}))
    if kind == "interval_union":
        return interval_sets.IntervalUnion(tuple(body))
    if kind == "region":
        return _region(body)
    raise SchemaError(f"unknown measure kind {kind!r}")


# ---------------------------------------------------------------------------
# handlers: each returns (status, provenance, payload)

HANDLERS: dict[str, tuple[set, Callable]] = {}


def command(name: str, fields: set):
    def deco(fn):
        HANDLERS[name] = (fields, fn)
        return fn

    return deco


@command("certify-finite", {"A", "L"})
def _certify(req):
    A = req.rationals("A")
    L = req.rationals("L")
    try:
        cert = finite_spectral.certify_finite_pair(A, L)
    except NotSpectralError as exc:
        return "refuted", "exact-hadamard-check", {"reason": str(exc)}
    return "ok", "exact-hadamard-check", {"certificate": cert}


@command("enumerate-spectra", {"A", "denominator_bound"})
def _enumerate(req):
    A = req.ints("A")
    spectra = finite_spectral.enumerate_spectra(A, req.get("denominator_bound"))
    status = "ok" if spectra else "none"
    return status, "cyclotomic-clique-search", {"count": len(spectra), "spectra": spectra}


@command("decompose", {"A"})
def _decompose(req):
    chain = finite_spectral.decompose_complementing(req.ints("A"))
    if chain is None:
        return "none", "block-dilation-peeling", {"chain": None}
    return "ok", "block-dilation-peeling", {"chain": chain, "replay": chain.replay()}


def _chain(req) -> OperationChain:
    steps = []
    for item in req.need("steps"):
        if not (isinstance(item, list) and len(item) == 2 and item[0] in ("StepI", "StepII") and isinstance(item[1], int) and item[1] >= 2):
            raise SchemaError("steps are [\"StepI\" | \"StepII\", d >= 2] pairs")
        steps.append(StepI(item[1]) if item[0] == "StepI" else StepII(item[1]))
    c = req.integer("base_length")
    if c < 1:
        raise SchemaError("base_length must be positive")
    return OperationChain(c, tuple(steps))


@command("spectrum-from-chain", {"base_length", "steps"})
def _from_chain(req):
    chain = _chain(req)
    return "ok", "twisted-tensor-synthesis", {"set": chain.replay(), "spectrum": finite_spectral.spectrum_from_chain(chain)}


@command("find-complement", {"A", "n"})
def _complement(req):
    cert = finite_spectral.find_complement(req.ints("A"), req.integer("n"))
    return ("ok" if cert else "none"), "exact-cover", {"certificate": cert}


@command("interval-spectra", {"A", "denominator_bound"})
def _interval_spectra(req):
    spectra = interval_sets.spectra_of_interval_union(req.ints("A"), req.get("denominator_bound"))
    return ("ok" if spectra else "none"), "quasi-lattice-spectra", {
        "spectra": spectra,
        "display": [str(s) for s in spectra],
    }


@command("tiles-line", {"A", "n_max"})
def _tiles(req):
    cert = interval_sets.tiles_real_line(req.ints("A"), req.get("n_max"))
    return ("ok" if cert else "none"), "tiling-by-complement", {"certificate": cert}


@command("as-ifs", {"A", "n_max"})
def _as_ifs(req):
    A = req.ints("A")
    found = interval_sets.as_affine_ifs(A, req.get("n_max"))
    if found is None:
        return "none", "self-affine-tile", {"ifs": None}
    ifs, C = found
    dist = interval_sets.attractor_matches(A, ifs.scale, ifs.digits)
    return "ok", "self-affine-tile", {"ifs": ifs, "complement": C, "hausdorff_after_20_steps": float(dist)}


@command("invariant-ft", {"A", "B", "x", "tol"})
def _ft(req):
    ifs = _ifs(req)
    tol = req.number("tol", 1e-12)
    if tol <= 0:
        raise SchemaError("tol must be positive")
    xs = req.need("x")
    pts = np.array([[float(rational(c)) if isinstance(c, str) else float(c) for c in x] if isinstance(x, list) else (float(rational(x)) if isinstance(x, str) else float(x)) for x in (xs if isinstance(xs, list) else [xs])])
    values = ifs_measures.invariant_ft(ifs, pts, tol)
    return "ok", "infinite-product", {"x": pts, "value": np.atleast_1d(values), "abs": np.abs(np.atleast_1d(values))}


@command("factor", {"A", "B", "a", "p"})
def _factor(req):
    ifs = _ifs(req)
    try:
        fac = ifs_measures.factor_convolution(ifs, req.integer("a"), req.integer("p"))
    except ValueError as exc:
        return "refuted", "radix-factorization", {"reason": str(exc)}
    if fac is None:
        return "none", "radix-factorization", {"factorization": None}
    xs = np.linspace(-10, 10, 101)
    return "ok", "radix-factorization", {"factorization": fac, "max_residual_on_samples": fac.residual(ifs, xs)}


def _radius(req, default):
    return Fraction(str(req.get("radius", default)))


@command("dj-spectrum", {"A", "B", "L", "radius", "max_len"})
def _cycle(req):
    ifs = _ifs(req)
    try:
        spec = ifs_measures.cycle_spectrum(ifs, req.ints("L"), req.get("max_len", 8))
    except NotSpectralError as exc:
        return "refuted", "cycle-spectrum", {"reason": str(exc)}
    radius = _radius(req, ifs.scale**3)
    return "ok", "cycle-spectrum", {"spectrum": spec, "radius": radius, "elements": spec.elements(radius)}


@command("thpro", {"a", "p", "n", "C", "L", "radius"})
def _digit_power(req):
    a, p = req.integer("a"), req.integer("p")
    n = req.ints("n")
    try:
        res = ifs_measures.digit_power_spectrum(a, p, n, req.need("C"), req.need("L"))
    except HypothesisError as exc:
        return "refuted", "digit-power-spectrum", {"reason": str(exc)}
    radius = _radius(req, 4)
    return "ok", "digit-power-spectrum", {"result": res, "radius": radius, "elements": res.spectrum.elements(radius)}


@command("compose", {"parts"})
def _compose(req):
    parts = req.need("parts")
    if not isinstance(parts, list) or not all(isinstance(q, list) and len(q) == 4 for q in parts):
        raise SchemaError("parts are [b, C, a, L] quadruples")
    parsed = [(rational(b, "b"), C, rational(a, "a"), L) for b, C, a, L in parts]
    try:
        D, spec = ifs_measures.compose_spectra(parsed)
    except HypothesisError as exc:
        return "refuted", "direct-sum-composition", {"reason": str(exc)}
    return "ok", "direct-sum-composition", {"set": D, "spectrum": spec}


def _matrix(v):
    if isinstance(v, list):
        return tuple(tuple(rational(c, "V") for c in row) for row in v)
    return rational(v, "V")


@command("transform", {"A", "B", "L", "V", "s", "radius"})
def _transform(req):
    ifs = _ifs(req)
    spec = ifs_measures.cycle_spectrum(ifs, req.ints("L"))
    s = req.get("s")
    try:
        measure, image = ifs_measures.affine_transform_pair(
            ifs, spec, _matrix(req.need("V")), None if s is None else [rational(c, "s") for c in s]
        )
    except ValueError as exc:
        return "refuted", "affine-group-action", {"reason": str(exc)}
    radius = _radius(req, ifs.scale**2)
    return "ok", "affine-group-action", {"measure": measure, "spectrum": image, "elements": image.elements(radius)}


@command("new-spectrum", {"A", "B", "L", "L_new", "radius"})
def _new(req):
    ifs = _ifs(req)
    try:
        old = ifs_measures.cycle_spectrum(ifs, req.ints("L"))
        new = ifs_measures.spectrum_from_old(ifs, old, req.ints("L_new"))
    except (HypothesisError, NotSpectralError) as exc:
        return "refuted", "new-spectrum-from-old", {"reason": str(exc)}
    radius = _radius(req, ifs.scale**3)
    return "ok", "new-spectrum-from-old", {"spectrum": new, "elements": new.elements(radius)}


@command("infinite-family", {"A", "B", "L", "count", "shifts", "radius"})
def _family(req):
    ifs = _ifs(req)
    try:
        fam = ifs_measures.infinite_spectra_family(ifs, req.ints("L"), req.integer("count", 3), req.get("shifts", "greedy"))
    except (HypothesisError, NotSpectralError) as exc:
        return "refuted", "infinite-spectra-family", {"reason": str(exc)}
    radius = _radius(req, ifs.scale**3)
    return "ok", "infinite-spectra-family", {
        "family": fam,
        "radius": radius,
        "prefixes": [s.elements(radius) for s in fam.spectra],
    }


@command("parseval", {"measure", "spectrum", "radius", "tol", "seed", "samples", "xs", "dump_csv"})
def _parseval(req):
    measure = _measure(req.need("measure"))
    spectrum = _spectrum(req.need("spectrum"), measure)
    radius = req.number("radius", 500)
    tol = req.number("tol", 1e-2)
    xs = req.get("xs")
    if xs is None:
        dim = getattr(measure, "dim", 1)
        xs = validation.sample_grid(req.integer("samples", 25), dim, req.get("seed"))
    report = validation.parseval_scan(measure, spectrum, np.asarray(xs, dtype=float), radius, tol)
    if req.get("dump_csv"):
        report.write_csv(req.get("dump_csv"))
    return ("ok" if report.passed else "refuted"), "parseval-partial-sums", {"report": report}


@command("orthogonal-family", {"A", "B", "radius", "cap", "step", "half_line"})
def _ortho(req):
    ifs = _ifs(req)
    step = req.get("step")
    fam = validation.greedy_orthogonal_family(
        ifs, req.number("radius", 1024), req.get("cap"), None if step is None else rational(step, "step"),
        half_line=bool(req.get("half_line", False)),
    )
    return "ok", "greedy-orthogonal-family", {"family": fam}


@command("deficiency", {"A", "B", "x", "radius", "threshold", "require_factorization", "factor"})
def _deficiency(req):
    ifs = _ifs(req)
    radius = req.number("radius", 256)
    x = req.get("x", "auto")
    factors = req.get("factor")
    if factors is not None:
        factors = (tuple(factors[0]), tuple(factors[1]))
    calibration = None
    if x == "auto":
        options = [factors] if factors else validation.digit_factorizations(ifs.digits)
        if not options:
            return "refuted", "deficiency-witness", {"reason": "digits do not factor"}
        x, gap = validation.calibrate_witness_point(ifs, radius, options[0][0])
        calibration = {"grid": "0.01..0.99 step 0.01", "factor_power_max": 0.9, "x": x, "gap": gap}
    try:
        w = validation.deficiency_witness(
            ifs, float(x), radius, req.number("threshold", 0.01), factors, bool(req.get("require_factorization", True))
        )
    except ValueError as exc:
        return "refuted", "deficiency-witness", {"reason": str(exc)}
    return ("ok" if w.valid else "none"), "deficiency-witness", {"witness": w, "calibration": calibration}


@command("product-spectrum", {"region", "slice"})
def _product(req):
    region = _region(req.get("region", "staircase"))
    sl = req.get("slice")
    if sl is not None:
        region = multidim.slice_region(region, sl["axis"], sl["index"])
    try:
        spec = multidim.derive_product_spectrum(region)
    except multidim.NonConstantSliceError as exc:
        return "refuted", "slice-product-spectrum", {"reason": str(exc)}
    return "ok", "slice-product-spectrum", {"spectrum": spec, "display": str(spec)}


@command("check-tiling", {"region", "periods", "offsets", "box"})
def _tiling(req):
    region = _region(req.get("region", "staircase"))
    periods = [[rational(c, "periods") for c in row] for row in req.need("periods")]
    offsets = req.get("offsets")
    if offsets is not None:
        offsets = [[rational(c, "offsets") for c in row] for row in offsets]
    box = req.get("box")
    try:
        report = multidim.check_translation_tiling(region, periods, offsets, None if box is None else [rational(b, "box") for b in box])
    except ValueError as exc:
        raise SchemaError(str(exc)) from None
    return ("ok" if report.tiles else "refuted"), "cell-count-tiling", {"report": report}


@command("lattice-search", {"region", "bound"})
def _lattice(req):
    region = _region(req.get("region", "staircase"))
    res = multidim.lattice_tiling_search(region, rational(req.get("bound", 4), "bound"))
    return ("ok" if res.lattices else "none"), "bounded-lattice-search", {"result": res}


@command("rearranged-cube", {"p", "resolution"})
def _cube(req):
    p = req.integer("p", 1)
    if p == 0:
        raise SchemaError("p must be a nonzero integer")
    res = multidim.rearranged_cube(p, req.integer("resolution", 64))
    return ("ok" if res.fold_ok else "refuted"), "fold-mod-z2", {"result": res}


@command("golden", set())
def _golden(req):
    from .golden import run_golden

    rows = run_golden(_threads())
    ok = all(r["passed"] for r in rows)
    return ("ok" if ok else "refuted"), "golden-suite", {"passed": sum(r["passed"] for r in rows), "total": len(rows), "checks": rows}


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("SPECTRAL_PAIRS_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------


def run(request: dict) -> tuple[dict, int]:
    """Dispatch one request; returns ``(result, exit_code)``."""
    if not isinstance(request, dict):
        return {"status": "error", "error": "request must be a JSON object"}, EXIT_SCHEMA
    cmd = request.get("cmd")
    if cmd not in HANDLERS:
        return {"status": "error", "error": f"unknown command {cmd!r}", "commands": sorted(HANDLERS)}, EXIT_SCHEMA
    fields, fn = HANDLERS[cmd]
    try:
        status, provenance, payload = fn(Request(request, fields))
    except SchemaError as exc:
        return {"cmd": cmd, "status": "error", "error": str(exc)}, EXIT_SCHEMA
    except Exception as exc:  # noqa: BLE001 - reported as an internal error
        return {"cmd": cmd, "status": "error", "error": f"{type(exc).__name__}: {exc}"}, EXIT_INTERNAL
    return {"cmd": cmd, "status": status, "provenance": provenance, "payload": payload}, EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="spectral-pairs", description="Spectral pairs toolkit (JSON in, JSON out).")
    parser.add_argument("cmd", nargs="?", help="subcommand; omit to read a request with a 'cmd' field")
    parser.add_argument("request", nargs="?", help="JSON parameters; '-' reads them from stdin")
    parser.add_argument("--out", help="write the JSON result here instead of stdout")
    parser.add_argument("--tol", type=float)
    parser.add_argument("--radius", type=float)
    parser.add_argument("--n-max", type=int, dest="n_max")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--dump-csv", dest="dump_csv", help="write raw scan data as CSV")
    parser.add_argument("--list", action="store_true", help="list subcommands")
    args = parser.parse_args(argv)
    if args.list:
        print("\n".join(sorted(HANDLERS)))
        return EXIT_OK
    raw = args.request
    if args.cmd is None or args.cmd == "-" or raw == "-":
        if args.cmd == "-":
            args.cmd = None
        raw = sys.stdin.read()
    try:
        request = json.loads(raw) if raw and raw.strip() else {}
    except json.JSONDecodeError as exc:
        result, code = {"status": "error", "error": f"invalid JSON: {exc}"}, EXIT_SCHEMA
    else:
        if args.cmd is not None and isinstance(request, dict):
            request.setdefault("cmd", args.cmd)
        fields = HANDLERS.get(request.get("cmd") if isinstance(request, dict) else None, (set(), None))[0]
        for flag in ("tol", "radius", "n_max", "seed", "dump_csv"):
            value = getattr(args, flag)
            if value is not None and isinstance(request, dict):
                if flag not in fields:
                    result, code = {"status": "error", "error": f"--{flag.replace('_', '-')} does not apply to {request.get('cmd')}"}, EXIT_SCHEMA
                    break
                request[flag] = value
        else:
            result, code = run(request)
    text = dumps(result)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
