"""Command-line front end.

    rbcfb table1  --d 0.73 0.74 0.75 0.76 [--P 5 --P1 1] [--format csv|json]
    rbcfb corner  --bound scheme1 --d 0.75 [--rfb1 0.5] [--relaxed]
    rbcfb region  --region Theorem1 --pmf pmf.json [--rfb1 inf]
    rbcfb project --scheme Scheme1 --pmf pmf.json
    rbcfb verify  --scheme Scheme1 --trials 100 --seed 1

Any option can also come from a JSON document given with ``--config``
(keys as in ``FIELDS``; ``command`` selects the subcommand).  Command-line
values override the document.  Exit status: 0 success, 2 when verification
finds a mismatch it cannot explain, 1 on any error.
"""
import argparse
import json
import math
import sys
from dataclasses import dataclass, field

from . import bounds
from .polytope import VertexSet, enumerate_vertices, polytopes_equal
from .prefme import THEOREM_FOR_SCHEME, build_scheme_system, project_to_rates, scheme_atoms
from .prefme import verify_theorem
from .prob import VARIABLE_ORDER, DomainError, JointPmf, Scheme
from .regions import (RegionId, assignment_from_pmf, build_region, instantiate_region,
                      relaxed_feedback_constraint)

__all__ = ["ConfigError", "RunConfig", "dispatch", "main", "parse_config", "validate_config"]

COMMANDS = ("table1", "corner", "region", "project", "verify")
BOUNDS = ("liang", "scheme1", "wu", "cf")
FORMATS = ("csv", "json")

COMMON = {"command", "output", "format"}
ALLOWED = {
    "table1": COMMON | {"d", "P", "P1", "rfb1"},
    "corner": COMMON | {"bound", "d", "g01", "g02", "g12", "P", "P1", "rfb1", "relaxed",
                        "nhat"},
    "region": COMMON | {"region", "pmf", "rfb1", "rfb2", "relaxed"},
    "project": COMMON | {"scheme", "pmf", "rfb1", "rfb2", "swapped_2a_rows"},
    "verify": COMMON | {"scheme", "trials", "seed", "sizes", "rfb1", "rfb2",
                        "swapped_2a_rows", "independent_auxiliaries"},
}
REQUIRED = {
    "table1": ("d",),
    "corner": ("bound",),
    "region": ("region", "pmf"),
    "project": ("scheme", "pmf"),
    "verify": ("scheme",),
}
FIELDS = sorted(set().union(*ALLOWED.values()))


class ConfigError(ValueError):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class RunConfig:
    command: str
    output: str = None
    format: str = "json"
    d: tuple = ()
    g01: float = None
    g02: float = None
    g12: float = None
    P: float = 5.0
    P1: float = 1.0
    rfb1: float = math.inf
    rfb2: float = math.inf
    bound: str = None
    nhat: float = None
    relaxed: bool = False
    region: str = None
    pmf: str = None
    scheme: str = None
    swapped_2a_rows: bool = False
    independent_auxiliaries: bool = False
    trials: int = 100
    seed: int = 0
    sizes: dict = field(default_factory=dict)


def _number(v):
    if isinstance(v, bool):
        raise TypeError
    if isinstance(v, str) and v.strip().lower() in ("inf", "infinity"):
        return math.inf
    x = float(v)
    if math.isnan(x):
        raise ValueError
    return x


def validate_config(doc):
    """Check a config mapping; return RunConfig or raise ConfigError with every problem."""
    errors = []
    if not isinstance(doc, dict):
        raise ConfigError(["configuration must be a JSON object"])
    cmd = doc.get("command")
    if cmd is None:
        errors.append("missing required field 'command' (one of " + ", ".join(COMMANDS) + ")")
        for c in COMMANDS:
            errors.append(f"command {c!r} requires: " + ", ".join(REQUIRED[c]))
        raise ConfigError(errors)
    if cmd not in COMMANDS:
        raise ConfigError([f"unknown command {cmd!r}; expected one of {', '.join(COMMANDS)}"])
    for k in sorted(set(doc) - ALLOWED[cmd]):
        errors.append(f"unknown key {k!r} for command {cmd!r}")
    for k in REQUIRED[cmd]:
        if doc.get(k) is None:
            errors.append(f"missing required field {k!r} for command {cmd!r}")
    out = {"command": cmd}

    def num(key, lo=None, allow_inf=False, integer=False):
        if doc.get(key) is None:
            return
        try:
            x = _number(doc[key])
        except (TypeError, ValueError):
            errors.append(f"{key} must be a number, got {doc[key]!r}")
            return
        if math.isinf(x) and not allow_inf:
            errors.append(f"{key} must be finite")
            return
        if lo is not None and x < lo:
            errors.append(f"{key} must be >= {lo:g}, got {x:g}")
            return
        if integer:
            if x != int(x):
                errors.append(f"{key} must be an integer, got {doc[key]!r}")
                return
            x = int(x)
        out[key] = x

    def flag(key):
        if doc.get(key) is None:
            return
        if not isinstance(doc[key], bool):
            errors.append(f"{key} must be true or false")
            return
        out[key] = doc[key]

    def choice(key, options, parse=None):
        if doc.get(key) is None:
            return
        v = doc[key]
        try:
            out[key] = parse(v).value if parse else v
            if not parse and v not in options:
                raise DomainError
        except (DomainError, ValueError):
            errors.append(f"{key} must be one of {', '.join(options)}, got {v!r}")

    num("P", 0.0)
    num("P1", 0.0)
    num("rfb1", 0.0, allow_inf=True)
    num("rfb2", 0.0, allow_inf=True)
    num("nhat", 0.0, allow_inf=True)
    num("g01")
    num("g02")
    num("g12")
    num("trials", 1, integer=True)
    num("seed", 0, integer=True)
    if out.get("seed", 0) >= 2**64:
        errors.append("seed must fit in 64 bits")
    flag("relaxed")
    flag("swapped_2a_rows")
    flag("independent_auxiliaries")
    choice("format", FORMATS)
    choice("bound", BOUNDS)
    choice("scheme", [s.value for s in Scheme], Scheme.parse)
    choice("region", [r.value for r in RegionId], RegionId.parse)
    for key in ("output", "pmf"):
        if doc.get(key) is not None:
            if not isinstance(doc[key], str) or not doc[key]:
                errors.append(f"{key} must be a nonempty path string")
            else:
                out[key] = doc[key]

    if doc.get("d") is not None:
        ds = doc["d"] if isinstance(doc["d"], list) else [doc["d"]]
        if cmd == "corner" and isinstance(doc["d"], list) and len(ds) != 1:
            errors.append("corner takes a single d")
        if not ds:
            errors.append("d must be a nonempty list")
        vals = []
        for v in ds:
            try:
                x = _number(v)
            except (TypeError, ValueError):
                errors.append(f"d must be numeric, got {v!r}")
                continue
            if x in (0.0, 1.0):
                errors.append("d must differ from 0 and 1")
            elif not math.isfinite(x):
                errors.append("d must be finite")
            else:
                vals.append(x)
        out["d"] = tuple(vals)
    if cmd == "corner" and doc.get("bound") is not None:
        gains = [doc.get(k) is not None for k in ("g01", "g02", "g12")]
        if doc.get("d") is None and not all(gains):
            errors.append("corner needs d or all of g01, g02, g12")
        if doc.get("nhat") is not None and doc.get("bound") != "cf":
            errors.append("nhat applies to the cf bound only")
    if cmd == "region" and doc.get("relaxed") and doc.get("region") not in (None, "Theorem1"):
        errors.append("relaxed applies to region Theorem1 only")
    if doc.get("sizes") is not None:
        sz = doc["sizes"]
        if not isinstance(sz, dict):
            errors.append("sizes must be an object mapping variable names to sizes")
        else:
            clean = {}
            for k, v in sz.items():
                if k not in VARIABLE_ORDER:
                    errors.append(f"sizes: unknown variable {k!r}")
                elif isinstance(v, bool) or not isinstance(v, int) or v < 1:
                    errors.append(f"sizes: alphabet size of {k} must be a positive integer")
                else:
                    clean[k] = v
            out["sizes"] = clean
    if errors:
        raise ConfigError(errors)
    return RunConfig(**out)


def parse_config(text):
    """Parse a JSON config document (empty text counts as ``{}``)."""
    if not text.strip():
        doc = {}
    else:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError([f"malformed JSON: {e}"]) from None
    return validate_config(doc)


# ---------------------------------------------------------------- dispatch

def _dump(doc):
    return json.dumps(doc, indent=2) + "\n"


def _load_pmf(path):
    try:
        with open(path) as f:
            doc = json.load(f)
    except OSError as e:
        raise OSError(f"cannot read pmf file {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise DomainError(f"pmf file {path} is not valid JSON: {e}") from None
    return JointPmf.from_json(doc)


def _params(cfg, d=None):
    kw = dict(P=cfg.P, P1=cfg.P1, rfb1=cfg.rfb1)
    if d is not None:
        return bounds.GaussianRbcParams(d=d, **kw)
    return bounds.GaussianRbcParams(g01=cfg.g01, g02=cfg.g02, g12=cfg.g12, **kw)


def _vertices_csv(vs):
    lines = [",".join(vs.vars)]
    lines += [",".join(f"{c:.6f}" for c in p) for p in vs.points]
    return "\n".join(lines) + "\n"


def _inf(x):
    return "inf" if math.isinf(x) else x


def _run(cfg):
    """Returns (text, exit_status)."""
    if cfg.command == "table1":
        p = bounds.GaussianRbcParams(d=cfg.d[0], P=cfg.P, P1=cfg.P1, rfb1=cfg.rfb1)
        rows = bounds.table1(list(cfg.d), p)
        if cfg.format == "csv":
            return bounds.table1_csv(rows), 0
        return _dump(bounds.table1_json(rows, p)), 0

    if cfg.command == "corner":
        p = _params(cfg, cfg.d[0] if cfg.d else None)
        if cfg.bound == "wu":
            res = bounds.wu_rate(p)
        elif cfg.bound == "liang":
            res = bounds.liang_pdf_rate(p)
        elif cfg.bound == "cf":
            res = bounds.cf_rate(p, cfg.nhat)
        else:
            res = bounds.scheme1_rate(p, relaxed=cfg.relaxed)
        if cfg.format == "csv":
            return f"bound,rate\n{cfg.bound},{res.rate:.4f}\n", 0
        doc = {"bound": cfg.bound, "rate": round(res.rate, 10),
               "argmax": res.argmax.to_json(), "active_constraint": res.active_constraint,
               "params": {"g01": p.g01, "g02": p.g02, "g12": p.g12, "P": p.P, "P1": p.P1,
                          "rfb1": _inf(p.rfb1)}}
        return _dump(doc), 0

    if cfg.command == "region":
        pmf = _load_pmf(cfg.pmf)
        spec = build_region(cfg.region)
        if cfg.relaxed:
            spec = relaxed_feedback_constraint(spec)
        a = assignment_from_pmf(pmf, spec.atoms())
        sys_, ok = instantiate_region(spec, a, cfg.rfb1, cfg.rfb2)
        vs = enumerate_vertices(sys_)
        if cfg.format == "csv":
            return _vertices_csv(vs), 0
        doc = {"region": spec.id.value, "feedback_feasible": ok,
               "rfb1": _inf(cfg.rfb1), "rfb2": _inf(cfg.rfb2),
               "system": sys_.to_json(), "vertices": vs.to_json(),
               "assignment": a.to_json()}
        return _dump(doc), 0

    if cfg.command == "project":
        pmf = _load_pmf(cfg.pmf)
        scheme = Scheme.parse(cfg.scheme)
        spec = build_region(THEOREM_FOR_SCHEME[scheme])
        a = assignment_from_pmf(pmf, scheme_atoms(scheme, cfg.swapped_2a_rows) | spec.atoms())
        s = build_scheme_system(scheme, a, cfg.rfb1, cfg.rfb2, cfg.swapped_2a_rows)
        proj = project_to_rates(s)
        vs = enumerate_vertices(proj)
        if cfg.format == "csv":
            return _vertices_csv(vs), 0
        theo, ok = instantiate_region(spec, a, cfg.rfb1, cfg.rfb2)
        cmp = polytopes_equal(theo, proj)
        doc = {"scheme": scheme.value, "eliminated": list(s.eliminate),
               "constraints": s.sys.to_json(), "projection": proj.to_json(),
               "vertices": vs.to_json(),
               "theorem": {"region": spec.id.value, "feedback_feasible": ok,
                           "system": theo.to_json(), "comparison": cmp.to_json()}}
        return _dump(doc), 0

    report = verify_theorem(cfg.scheme, cfg.trials, cfg.seed, cfg.sizes, cfg.rfb1, cfg.rfb2,
                            cfg.swapped_2a_rows, cfg.independent_auxiliaries)
    status = 2 if report["summary"]["unexplained"] else 0
    return _dump(report), status


def dispatch(cfg):
    """Run the configured command and write its output; returns the exit status."""
    text, status = _run(cfg)
    if cfg.output:
        try:
            with open(cfg.output, "w") as f:
                f.write(text)
        except OSError as e:
            raise OSError(f"cannot write {cfg.output}: {e.strerror}") from None
    else:
        sys.stdout.write(text)
    return status


# ---------------------------------------------------------------- argv

def _parser():
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="JSON config document")
    common.add_argument("--output", help="write output here instead of stdout")
    common.add_argument("--format", choices=FORMATS)
    common.add_argument("--seed", type=int)
    common.add_argument("--trials", type=int)

    ap = argparse.ArgumentParser(prog="rbcfb", parents=[common],
                                 argument_default=argparse.SUPPRESS,
                                 description="Rate regions and bounds for relay broadcast "
                                             "channels with rate-limited feedback.")
    sub = ap.add_subparsers(dest="command")

    def channel(p):
        p.add_argument("--P", type=float)
        p.add_argument("--P1", type=float)
        p.add_argument("--rfb1")

    t = sub.add_parser("table1", parents=[common], argument_default=argparse.SUPPRESS,
                       help="corner rates of every bound for a list of relay positions")
    t.add_argument("--d", type=float, nargs="+")
    channel(t)

    c = sub.add_parser("corner", parents=[common], argument_default=argparse.SUPPRESS,
                       help="one corner-rate bound")
    c.add_argument("--bound", choices=BOUNDS)
    c.add_argument("--d", type=float)
    for g in ("g01", "g02", "g12"):
        c.add_argument(f"--{g}", type=float)
    c.add_argument("--nhat")
    c.add_argument("--relaxed", action="store_true")
    channel(c)

    r = sub.add_parser("region", parents=[common], argument_default=argparse.SUPPRESS,
                       help="instantiate a rate region for a pmf file")
    r.add_argument("--region")
    r.add_argument("--pmf")
    r.add_argument("--rfb1")
    r.add_argument("--rfb2")
    r.add_argument("--relaxed", action="store_true")

    for name, helptext in (("project", "project a scheme's constraints for a pmf file"),
                           ("verify", "compare projections with the theorem over seeded pmfs")):
        p = sub.add_parser(name, parents=[common], argument_default=argparse.SUPPRESS,
                           help=helptext)
        p.add_argument("--scheme")
        p.add_argument("--rfb1")
        p.add_argument("--rfb2")
        p.add_argument("--swapped-2a-rows", dest="swapped_2a_rows", action="store_true")
        if name == "project":
            p.add_argument("--pmf")
        else:
            p.add_argument("--independent-auxiliaries", dest="independent_auxiliaries",
                           action="store_true")
    return ap


def main(argv=None):
    ap = _parser()
    args = vars(ap.parse_args(argv))
    doc = {}
    try:
        if "config" in args:
            path = args.pop("config")
            try:
                with open(path) as f:
                    text = f.read()
            except OSError as e:
                raise OSError(f"cannot read config {path}: {e.strerror}") from None
            if text.strip():
                try:
                    doc = json.loads(text)
                except json.JSONDecodeError as e:
                    raise ConfigError([f"malformed JSON in {path}: {e}"]) from None
                if not isinstance(doc, dict):
                    raise ConfigError([f"{path}: configuration must be a JSON object"])
        if args.get("command") is None:
            args.pop("command", None)
        doc.update(args)
        cfg = validate_config(doc)
        return dispatch(cfg)
    except ConfigError as e:
        for msg in e.errors:
            print(f"rbcfb: config error: {msg}", file=sys.stderr)
        return 1
    except (OSError, DomainError, ValueError, ArithmeticError) as e:
        print(f"rbcfb: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
