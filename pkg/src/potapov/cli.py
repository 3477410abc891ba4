"""Command-line front end.

Machine output is JSON on stdout; diagnostics go to stderr. Exit codes:
0 result produced, 2 negative verdict, 3 certification failure, 4 bad input.
Every output embeds the command, its arguments and the parsed inputs so
that ``verify`` can re-run it and compare the results exactly.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import gallery
from .blaschke import bp_to_json, theta_from_json, theta_to_json
from .coprime import left_coprime_with_theta, right_coprime_with_theta
from .divisors_zn import cert_to_json, classify_b_alpha_n, classify_zn, nontriviality_witness
from .errors import CertificationFailure, NegativeVerdict, NotADivisor, PotapovError
from .factorize import inner_rational_to_bp, potapov_peel
from .fixtures import gen_fixture
from .funcspace import fn_from_json, fn_to_json
from .hardy import HardyTruncation, common_right_divisor, left_gcd, rationality_test
from .numerics import Tolerance

EXIT_OK, EXIT_NEGATIVE, EXIT_CERT, EXIT_INPUT = 0, 2, 3, 4


class Negative(Exception):
    """A handler produced a well-formed result whose verdict is negative."""

    def __init__(self, result):
        super().__init__("negative verdict")
        self.result = result


def _tol(args):
    return Tolerance(abs=args["tol"])


def _fn(inputs, key, args):
    F = fn_from_json(inputs[key])
    g = args.get("grid_log2")
    return F.with_grid(max(g, F.grid_log2)) if g else F


def _factorize(args, inputs):
    F = _fn(inputs, "input", args)
    tol = _tol(args)
    if "theta" in inputs:
        B, trace = potapov_peel(F, theta_from_json(inputs["theta"]), tol)
        return {"bp": bp_to_json(B), "trace": trace.to_json()}
    return {"bp": bp_to_json(inner_rational_to_bp(F, tol))}


def _divisors_zn(args, inputs):
    F = _fn(inputs, "input", args)
    tol = _tol(args)
    if args.get("alpha"):
        cert = classify_b_alpha_n(F, complex(*args["alpha"]), args["N"], tol)
    else:
        if F.den_zeros:
            raise ValueError("a divisor of z^N I must be a polynomial (no denominator zeros)")
        cert = classify_zn(F.numerator, args["N"], tol)
    out = cert_to_json(cert)
    out["nontriviality_witness"] = nontriviality_witness(cert, tol)
    return out


def _coprime(args, inputs):
    F = _fn(inputs, "input", args)
    theta = theta_from_json(inputs["theta"])
    test = left_coprime_with_theta if args["side"] == "left" else right_coprime_with_theta
    rep = test(F, theta, _tol(args))
    out = rep.to_json()
    if not rep.verdict:
        raise Negative(out)
    return out


def _rational(args, inputs):
    F = _fn(inputs, "input", args)
    theta = theta_from_json(inputs["theta"])
    K = args.get("K") or 2 * (F.degree() + theta.degree) + 4
    ok = rationality_test(F, theta, HardyTruncation(F.shape[0], K), _tol(args))
    out = {"rational": ok, "K": K, "theta": theta_to_json(theta)}
    if not ok:
        raise Negative(out)
    return out


def _gcd(args, inputs):
    A, B = _fn(inputs, "a", args), _fn(inputs, "b", args)
    tol = _tol(args)
    trunc = None
    if args.get("K"):
        trunc = HardyTruncation(A.shape[0] if args["side"] == "left" else A.shape[1], args["K"])
    if args["side"] == "left":
        D = left_gcd(A, B, trunc, tol)
    else:
        D = common_right_divisor(A, B, trunc, tol)
    return {"side": args["side"], "divisor": fn_to_json(D)}


def _gallery(args, inputs):
    fn = gallery.EXAMPLES[args["example"]]
    rep = fn(args["window"]) if args.get("window") is not None else fn()
    return rep


def _gen_fixture(args, inputs):
    return gen_fixture(args["d"], args["factors"], args["seed"], args["max_abs"])


HANDLERS = {
    "factorize": _factorize,
    "divisors-zn": _divisors_zn,
    "coprime": _coprime,
    "rational": _rational,
    "gcd": _gcd,
    "gallery": _gallery,
    "gen-fixture": _gen_fixture,
}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def execute(command, args, inputs):
    """Run one command; returns ``(exit_code, payload)``. Never raises for expected failures."""
    payload = {"command": command, "args": args, "inputs": inputs}
    try:
        payload["result"] = _jsonable(HANDLERS[command](args, inputs))
        code = EXIT_OK
    except Negative as neg:
        payload["result"] = _jsonable(neg.result)
        code = EXIT_NEGATIVE
    except NotADivisor as exc:
        payload["error"] = {"type": "NotADivisor", "message": str(exc), "witness": _jsonable(exc.witness())}
        code = EXIT_NEGATIVE
    except NegativeVerdict as exc:
        payload["error"] = {"type": type(exc).__name__, "message": str(exc)}
        code = EXIT_NEGATIVE
    except CertificationFailure as exc:
        payload["error"] = {"type": type(exc).__name__, "message": str(exc), "residual": exc.residual}
        code = EXIT_CERT
    except PotapovError as exc:
        payload["error"] = {"type": type(exc).__name__, "message": str(exc)}
        code = EXIT_CERT
    except (ValueError, KeyError, TypeError, IndexError) as exc:
        payload["error"] = {"type": "InputError", "message": str(exc)}
        code = EXIT_INPUT
    payload["exit_code"] = code
    return code, payload


def _load(path):
    if path == "-":
        return json.load(sys.stdin)
    with open(path) as fh:
        return json.load(fh)


def _complex_arg(s):
    parts = [float(p) for p in s.split(",")]
    if len(parts) == 1:
        parts.append(0.0)
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected RE or RE,IM")
    return parts


def build_parser():
    p = argparse.ArgumentParser(prog="potapov", description="Blaschke-Potapov factorization toolkit")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-8)
    common.add_argument("--grid-log2", type=int, default=None, help="minimum boundary grid size (log2) for input functions")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("factorize", parents=[common], help="Blaschke-Potapov form of a rational inner function")
    s.add_argument("--input", required=True)
    s.add_argument("--theta")

    s = sub.add_parser("divisors-zn", parents=[common], help="classify a divisor of z^N I (or b_alpha^N I)")
    s.add_argument("--input", required=True)
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--alpha", type=_complex_arg)

    s = sub.add_parser("coprime", parents=[common], help="coprimeness with theta I")
    side = s.add_mutually_exclusive_group(required=True)
    side.add_argument("--left", dest="side", action="store_const", const="left")
    side.add_argument("--right", dest="side", action="store_const", const="right")
    s.add_argument("--input", required=True)
    s.add_argument("--theta", required=True)

    s = sub.add_parser("rational", parents=[common], help="rationality test against a Blaschke product")
    s.add_argument("--input", required=True)
    s.add_argument("--theta", required=True)
    s.add_argument("--K", type=int)

    s = sub.add_parser("gcd", parents=[common], help="left gcd or common right inner divisor of two functions")
    side = s.add_mutually_exclusive_group(required=True)
    side.add_argument("--left", dest="side", action="store_const", const="left")
    side.add_argument("--right", dest="side", action="store_const", const="right")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--K", type=int)

    s = sub.add_parser("gallery", help="exact shift-operator examples")
    s.add_argument("--example", required=True, choices=sorted(gallery.EXAMPLES))
    s.add_argument("--window", type=int)

    s = sub.add_parser("verify", help="re-run a saved output and compare")
    s.add_argument("--input", required=True)

    s = sub.add_parser("gen-fixture", help="random Blaschke-Potapov product with its expansion and theta")
    s.add_argument("--kind", default="bp", choices=["bp"])
    s.add_argument("--d", type=int, default=3)
    s.add_argument("--factors", type=int, default=3)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--max-abs", dest="max_abs", type=float, default=0.9)
    return p


_FILE_ARGS = ("input", "theta", "a", "b")


def _emit(payload):
    json.dump(payload, sys.stdout, indent=1, sort_keys=True)
    sys.stdout.write("\n")


def main(argv=None):
    parser = build_parser()
    ns = parser.parse_args(argv)
    args = {k: v for k, v in vars(ns).items() if k != "command"}

    if ns.command == "verify":
        try:
            saved = _load(ns.input)
            code, payload = execute(saved["command"], saved["args"], saved["inputs"])
        except (OSError, ValueError, KeyError, TypeError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        same = (json.dumps(payload, sort_keys=True) == json.dumps(saved, sort_keys=True))
        _emit({"command": "verify", "verified": same, "exit_code": code})
        if not same:
            print("verify: re-run differs from the saved output", file=sys.stderr)
            return EXIT_CERT
        return EXIT_OK

    inputs = {}
    try:
        for key in _FILE_ARGS:
            path = args.pop(key, None)
            if path is not None:
                inputs[key] = _load(path)
    except (OSError, ValueError) as exc:
        print(f"error: cannot read input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    code, payload = execute(ns.command, args, inputs)
    if "error" in payload:
        print(f"{payload['error']['type']}: {payload['error']['message']}", file=sys.stderr)
    _emit(payload)
    return code


if __name__ == "__main__":
    sys.exit(main())
