"""Command-line interface: JSON in, JSON out.

Exit codes: 0 success, 1 certified failure (a certificate with pass=false),
2 invalid input, 3 numeric or genericity failure.
"""

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import canonical, consim, graph, homotopy, levi, quadric
from .cmatrix import complex_to_json, matrix_from_json, matrix_to_json
from .errors import CertificationError, NumericError, PreconditionError

__all__ = ["RunConfig", "main", "run", "dumps", "load_config"]

COMMANDS = ("classify", "bishop", "takagi", "consim", "homotopy", "certify", "surface", "levi", "corpus")

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

DEFAULTS = {
    "tol_abs": homotopy.CERT_TOL,
    "tol_rel": quadric.DEGENERATE_TOL,
    "samples": homotopy.DEFAULT_SAMPLES,
    "seed": 0,
    "output": None,
    "grid": 21,
    "epsilon": 0.5,
    "radius": 0.6,
    "model": "all-squares",
    "n": 2,
    "count": 200,
    "target": "normal-form",
}
_TYPES = {
    "tol_abs": float,
    "tol_rel": float,
    "samples": int,
    "seed": int,
    "output": str,
    "grid": int,
    "epsilon": float,
    "radius": float,
    "model": str,
    "n": int,
    "count": int,
    "target": str,
}


@dataclass(frozen=True)
class RunConfig:
    tol_abs: float = DEFAULTS["tol_abs"]
    tol_rel: float = DEFAULTS["tol_rel"]
    samples: int = DEFAULTS["samples"]
    seed: int = 0
    output: str = None

    def __post_init__(self):
        if not (self.tol_abs > 0 and self.tol_rel > 0):
            raise PreconditionError("tolerances must be positive")
        if self.samples < 101:
            raise PreconditionError("samples per segment must be >= 101")


class InputError(ValueError):
    pass


# --- deterministic JSON ---------------------------------------------------------------------


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if hasattr(obj, "to_json"):
        obj = obj.to_json()
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return "null"
        s = format(x, ".17g")
        return s if any(c in s for c in ".en") else s + ".0"
    if isinstance(obj, (complex, np.complexfloating)):
        return _encode(complex_to_json(obj), indent, level)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        obj = [v.to_json() if hasattr(v, "to_json") else v for v in obj]
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=2):
    """JSON text with every float written to 17 significant digits."""
    return _encode(obj, indent, 0) + "\n"


# --- config ---------------------------------------------------------------------------------


def load_config(path):
    """Parse a ``key = value`` file; ``#`` starts a comment, dashes in keys are allowed."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InputError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in _TYPES:
                raise InputError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                out[key] = _TYPES[key](value)
            except ValueError as exc:
                raise InputError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return out


def _settings(args):
    merged = dict(DEFAULTS)
    if args.config:
        merged.update(load_config(args.config))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


# --- commands -------------------------------------------------------------------------------


def _read_input(path):
    if path is None or path == "-":
        text = sys.stdin.read()
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc}") from exc


def _pair(obj):
    if not isinstance(obj, dict) or "A" not in obj or "B" not in obj:
        raise InputError("expected a pair object with keys 'A' and 'B'")
    return quadric.QuadricPair.from_json(obj)


def _cmd_classify(data, cfg):
    if isinstance(data, list):
        return [quadric.classify(_pair(p), cfg["tol_rel"]) for p in data], EXIT_OK
    return quadric.classify(_pair(data), cfg["tol_rel"]), EXIT_OK


def _cmd_bishop(data, cfg):
    pair = _pair(data)
    form = canonical.bishop_normal_form(pair)
    out = form.to_json()
    out["pair"] = canonical.bishop_pair(form).to_json()
    return out, EXIT_OK


def _cmd_takagi(data, cfg):
    B = matrix_from_json(data["B"] if isinstance(data, dict) else data, "B")
    fac = canonical.takagi_factorize(B)
    return {"U": matrix_to_json(fac.U), "sigma": [float(s) for s in fac.sigma]}, EXIT_OK


def _cmd_consim(data, cfg):
    A = matrix_from_json(data["A"] if isinstance(data, dict) else data, "A")
    form = consim.consim_diagonalize(A, seed=cfg["seed"])
    out = form.to_json()
    out["residual"] = float(form.residual)
    return out, EXIT_OK


def _cmd_homotopy(data, cfg):
    kw = dict(seed=cfg["seed"], samples=cfg["samples"], tol=cfg["tol_abs"])
    if isinstance(data, dict) and "source" in data:
        src = _pair(data["source"])
        if "target" in data:
            path = homotopy.connecting_path(src, _pair(data["target"]), **kw)
        else:
            path = homotopy.normal_form_path(src, **kw)
    else:
        if cfg["target"] != "normal-form":
            raise InputError("--target must be 'normal-form' unless the input names a target pair")
        path = homotopy.normal_form_path(_pair(data), **kw)
    cert = path.certificate or homotopy.certify(path, cfg["samples"], cfg["tol_abs"])
    out = {"path": path.to_json(), "certificate": cert.to_json(), "target": path.target.to_json()}
    return out, EXIT_OK if cert.passed else EXIT_FAILED


def _cmd_certify(data, cfg):
    if isinstance(data, dict) and "path" in data:
        data = data["path"]
    path = homotopy.HomotopyPath.from_json(data)
    cert = homotopy.certify(path, cfg["samples"], cfg["tol_abs"])
    return cert, EXIT_OK if cert.passed else EXIT_FAILED


def _cmd_surface(data, cfg):
    if not isinstance(data, dict):
        raise InputError("surface input must be an object")
    eps = float(data.get("epsilon", cfg["epsilon"]))
    if "path_file" in data:
        with open(data["path_file"], encoding="utf-8") as fh:
            obj = json.load(fh)
        path = homotopy.HomotopyPath.from_json(obj.get("path", obj) if isinstance(obj, dict) else obj)
    elif "pair" in data:
        path = homotopy.normal_form_path(
            _pair(data["pair"]), seed=cfg["seed"], samples=cfg["samples"], tol=cfg["tol_abs"]
        )
    else:
        raise InputError("surface input needs 'pair' or 'path_file'")
    surf = graph.build_isotoped_graph(path, eps)
    found = graph.find_complex_points(surf, float(data.get("radius", cfg["radius"])), cfg["grid"])
    out = found.to_json()
    out["epsilon"] = eps
    return out, EXIT_OK


def _cmd_levi(data, cfg):
    kind = {"all-squares": levi.ModelKind.ALL_SQUARES, "mixed": levi.ModelKind.MIXED_MODULUS}.get(cfg["model"])
    if kind is None:
        raise InputError("--model must be all-squares or mixed")
    n = cfg["n"]
    field = levi.model_field(kind, n)
    rng = np.random.default_rng(cfg["seed"])
    radius = np.sqrt(levi.ALL_SQUARES_RADIUS_SQ) if kind is levi.ModelKind.ALL_SQUARES else levi.MIXED_RADIUS
    count = cfg["count"] if cfg.get("count_given") else min(cfg["samples"], 200)
    reports = []
    for _ in range(count):
        z = rng.normal(size=n) + 1j * rng.normal(size=n)
        z *= 0.9 * radius * rng.uniform() / np.linalg.norm(z)
        psi = 0.5 * radius * (rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1))
        p = np.concatenate([z, [complex(field.graph(z)) + psi]])
        reports.append(levi.pseudoconvexity_report(field, p))
    return reports, EXIT_OK


def _cmd_corpus(data, cfg):
    out = []
    for k in range(cfg["count"]):
        n = 1 + k % 4
        want = quadric.PointType.ELLIPTIC if k % 2 == 0 else quadric.PointType.HYPERBOLIC
        pair = quadric.random_pair(n, cfg["seed"] + k, want=want)
        item = pair.to_json()
        item["seed"] = cfg["seed"] + k
        item["class"] = want.value
        out.append(item)
    return out, EXIT_OK


_HANDLERS = {
    "classify": _cmd_classify,
    "bishop": _cmd_bishop,
    "takagi": _cmd_takagi,
    "consim": _cmd_consim,
    "homotopy": _cmd_homotopy,
    "certify": _cmd_certify,
    "surface": _cmd_surface,
    "levi": _cmd_levi,
    "corpus": _cmd_corpus,
}
_NO_INPUT = {"levi", "corpus"}


def build_parser():
    p = argparse.ArgumentParser(
        prog="crpoints",
        description="Classification, normal forms and nondegenerate homotopies of quadric complex points.",
    )
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--input", help="input JSON file ('-' or omitted: stdin)")
    p.add_argument("--output", help="write JSON here instead of stdout")
    p.add_argument("--config", help="key = value file; flags override it")
    p.add_argument("--seed", type=int, help=f"RNG seed (default {DEFAULTS['seed']})")
    p.add_argument("--tol-abs", dest="tol_abs", type=float, help=f"certificate margin (default {DEFAULTS['tol_abs']})")
    p.add_argument(
        "--tol-rel", dest="tol_rel", type=float, help=f"degenerate band for classify (default {DEFAULTS['tol_rel']})"
    )
    p.add_argument("--samples", type=int, help=f"samples per segment, >= 101 (default {DEFAULTS['samples']})")
    p.add_argument("--grid", type=int, help=f"seeds per axis for surface (default {DEFAULTS['grid']})")
    p.add_argument("--epsilon", type=float, help=f"gluing radius for surface (default {DEFAULTS['epsilon']})")
    p.add_argument("--radius", type=float, help=f"search radius for surface (default {DEFAULTS['radius']})")
    p.add_argument("--model", choices=("all-squares", "mixed"), help="levi model (default all-squares)")
    p.add_argument("--n", type=int, help=f"dimension for levi (default {DEFAULTS['n']})")
    p.add_argument("--count", type=int, help=f"number of corpus pairs or levi points (default {DEFAULTS['count']})")
    p.add_argument("--target", help="homotopy target (default normal-form)")
    return p


def _error(kind, exc):
    obj = {"error": {"type": kind, "class": type(exc).__name__, "message": str(exc)}}
    residual = getattr(exc, "residual", None)
    if residual is not None:
        obj["error"]["residual"] = float(residual)
    return obj


def _emit(obj, output):
    text = dumps(obj)
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv=None):
    """Run one command; returns the exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    output = args.output
    try:
        cfg = _settings(args)
        output = cfg["output"]
        cfg["count_given"] = args.count is not None
        RunConfig(cfg["tol_abs"], cfg["tol_rel"], cfg["samples"], cfg["seed"], output)
        data = None if args.command in _NO_INPUT else _read_input(args.input)
        result, code = _HANDLERS[args.command](data, cfg)
    except CertificationError as exc:
        _emit(_error("certification", exc), output)
        return EXIT_FAILED
    except NumericError as exc:
        _emit(_error("numeric", exc), output)
        return EXIT_NUMERIC
    except (ValueError, KeyError, TypeError, OSError) as exc:
        _emit(_error("input", exc), output)
        return EXIT_INPUT
    _emit(result, output)
    return code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
