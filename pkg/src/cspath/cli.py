"""Command-line front end.

Every numeric subcommand emits a table of convergence records (CSV or JSON).
Exit status: 0 on success, 2 for usage or parse errors, 3 when a numerical
procedure fails (divergence, truncation, quadrature, saddle search).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass, fields
from typing import Callable, Sequence

from .algebra import (BosonPolynomial, ClassicalSymbol, NumberPolynomial, classical_symbol, normal_order,
                      weyl_transform)
from .coeff import Coeff
from .dsl import lower
from .errors import InputError, NumericalError
from .hs import (constrained_partition, omega_propagator_quadrature, omega_propagator_series,
                 quadratic_coefficients)
from .lattice import (first_order_constant, lattice_propagator, matsubara_partition, polar_pitfall_partition,
                      polar_sum, richardson, transfer_partition)
from .oracle import FockTruncation, PropagatorSpec, coherent_overlap, partition_exact, propagator_fock
from .semiclassical import extract_coefficients, stationary_phase_propagator

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3

BH_TEXT = "-mu*n + (U/2)*n*(n-h)"

DEFAULTS = {
    "hamiltonian": BH_TEXT,
    "params": {"mu": "1/2", "U": "1"},
    "beta": 1.0,
    "time": 1.0,
    "za": "1",
    "zb": "1",
    "h": None,  # per-command default
    "slices": None,  # per-command default
    "nmax": None,
    "tol": 1e-12,
    "modes": 10000,
    "format": "csv",
    "out": None,
}

PARTITION_SLICES = [64, 128, 256, 512, 1024, 2048, 4096]
PROPAGATOR_SLICES = [64, 128, 256, 512]
SEMICLASSICAL_H = [0.2, 0.1, 0.05]

RECORD_FIELDS = ("route", "control", "control_value", "value_re", "value_im", "reference_re",
                 "reference_im", "reference_source", "abs_error", "rel_error", "runtime_ms", "label")


class UsageError(InputError):
    pass


# --------------------------------------------------------------------------
# configuration


def parse_complex(text: str) -> complex:
    """``"re+imi"`` style complex literals: ``1``, ``0.5-2i``, ``2i``."""
    s = str(text).strip().replace(" ", "")
    if not s:
        raise UsageError("empty complex value")
    try:
        return complex(s.replace("i", "j").replace("I", "j"))
    except ValueError:
        raise UsageError(f"cannot parse complex value {text!r} (use e.g. 1+0.5i)") from None


def format_complex(z: complex) -> str:
    z = complex(z)
    return f"{z.real!r}{'+' if z.imag >= 0 else '-'}{abs(z.imag)!r}i"


def parse_list(text, conv, name: str) -> list:
    if isinstance(text, (list, tuple)):
        return [conv(x) for x in text]
    items = [x for x in str(text).replace(" ", "").split(",") if x]
    out = []
    try:
        for it in items:
            if ":" in it:  # a:b doubles from a up to b
                lo, hi = (conv(v) for v in it.split(":"))
                v = lo
                while v <= hi:
                    out.append(v)
                    v *= 2
            else:
                out.append(conv(it))
    except ValueError:
        raise UsageError(f"cannot parse {name} list {text!r}") from None
    if not out:
        raise UsageError(f"empty {name} list")
    return out


def parse_params(items: Sequence[str]) -> dict:
    out = {}
    for item in items:
        for part in str(item).split(","):
            part = part.strip()
            if not part:
                continue
            if "=" not in part:
                raise UsageError(f"parameter binding {part!r} is not of the form name=value")
            k, v = (x.strip() for x in part.split("=", 1))
            if not k.isidentifier():
                raise UsageError(f"invalid parameter name {k!r}")
            try:
                Coeff.const(v)
            except (ValueError, ZeroDivisionError):
                raise UsageError(f"parameter {k} needs a numeric value, got {v!r}") from None
            out[k] = v
    return out


def read_config(path: str) -> dict:
    """Plain ``key = value`` file; ``#`` starts a comment; ``param`` may repeat."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc.strerror}") from None
    out: dict = {}
    params: list = []
    for no, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{no}: expected key = value")
        k, v = (x.strip() for x in line.split("=", 1))
        k = k.replace("-", "_")
        if k in ("param", "params"):
            params.append(v)
        elif k in DEFAULTS:
            out[k] = v
        else:
            raise UsageError(f"{path}:{no}: unknown key {k!r}")
    if params:
        out["params"] = parse_params(params)
    return out


@dataclass
class RunConfig:
    subcommand: str
    hamiltonian: str
    params: dict
    beta: float
    time: float
    za: complex
    zb: complex
    h: list
    slices: list
    nmax: int | None
    tol: float
    modes: int
    format: str
    out: str | None
    explicit_params: bool = False

    def meta(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "explicit_params"}
        d["za"], d["zb"] = format_complex(self.za), format_complex(self.zb)
        return d


def build_config(ns: argparse.Namespace) -> RunConfig:
    file_cfg = read_config(ns.config) if ns.config else {}
    flag = {k: getattr(ns, k) for k in DEFAULTS if getattr(ns, k, None) is not None}
    if ns.param:
        flag["params"] = parse_params(ns.param)
    merged = {**DEFAULTS, **file_cfg, **flag}
    explicit = "params" in flag or "params" in file_cfg
    if explicit:
        merged["params"] = {**(DEFAULTS["params"] if ns.command != "symbol" else {}), **merged["params"]}
    sub = ns.command
    text = str(merged["hamiltonian"])
    if not text.strip():
        raise UsageError("empty Hamiltonian text")
    try:
        beta = float(merged["beta"])
        T = float(merged["time"])
        tol = float(merged["tol"])
        modes = int(merged["modes"])
        nmax = None if merged["nmax"] in (None, "", "auto") else int(merged["nmax"])
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad numeric option: {exc}") from None
    if not (beta > 0 and math.isfinite(beta)):
        raise UsageError("--beta must be a positive number")
    if not math.isfinite(T) or T < 0:
        raise UsageError("--time must be a non-negative number")
    if not tol > 0:
        raise UsageError("--tol must be positive")
    if nmax is not None and nmax < 0:
        raise UsageError("--nmax must be non-negative")
    if modes < 1:
        raise UsageError("--modes must be positive")
    hv = merged["h"]
    if hv is None:
        hs = SEMICLASSICAL_H if sub == "semiclassical" else [1.0]
    else:
        hs = parse_list(hv, float, "h")
    if any(not (x > 0 and math.isfinite(x)) for x in hs):
        raise UsageError("--h values must be positive")
    sv = merged["slices"]
    if sv is None:
        slices = PARTITION_SLICES if sub == "partition" else PROPAGATOR_SLICES
    else:
        slices = parse_list(sv, int, "slices")
    if any(n < 1 for n in slices):
        raise UsageError("--slices must be positive integers")
    fmt = str(merged["format"]).lower()
    if fmt not in ("csv", "json"):
        raise UsageError("--format must be csv or json")
    return RunConfig(sub, text, dict(merged["params"]), beta, T, parse_complex(merged["za"]),
                     parse_complex(merged["zb"]), hs, sorted(set(slices)), nmax, tol, modes, fmt,
                     merged["out"], explicit)


# --------------------------------------------------------------------------
# records


@dataclass
class ConvergenceRecord:
    route: str
    control: str
    control_value: object
    value: complex
    reference: complex | None = None
    reference_source: str = ""
    runtime_ms: float = 0.0
    label: str = ""

    def row(self) -> dict:
        v = complex(self.value)
        r = None if self.reference is None else complex(self.reference)
        err = None if r is None else abs(v - r)
        rel = None if r is None or r == 0 else err / abs(r)
        return {
            "route": self.route, "control": self.control, "control_value": self.control_value,
            "value_re": v.real, "value_im": v.imag,
            "reference_re": None if r is None else r.real,
            "reference_im": None if r is None else r.imag,
            "reference_source": self.reference_source,
            "abs_error": err, "rel_error": rel,
            "runtime_ms": round(self.runtime_ms, 3), "label": self.label,
        }


def _timed(fn: Callable):
    t0 = time.perf_counter()
    v = fn()
    return v, (time.perf_counter() - t0) * 1e3


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def render(cfg: RunConfig, records: list, extra_meta: dict | None = None) -> str:
    rows = [r.row() for r in records]
    if cfg.format == "json":
        meta = cfg.meta()
        if extra_meta:
            meta.update(extra_meta)
        return json.dumps({"meta": meta, "records": rows}, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RECORD_FIELDS)
    for r in rows:
        w.writerow([_cell(r[k]) for k in RECORD_FIELDS])
    return buf.getvalue()


def _diag(msg: str):
    # diagnostics are plain text; NO_COLOR is honoured trivially since nothing is coloured
    print(f"cspath: {msg}", file=sys.stderr)


# --------------------------------------------------------------------------
# subcommands


def _lower_numeric(cfg: RunConfig) -> NumberPolynomial:
    p = lower(cfg.hamiltonian, cfg.params, symbolic=False)
    if isinstance(p, BosonPolynomial):
        if not p.is_number_conserving():
            raise UsageError("numeric routes need a Hamiltonian that is a function of n")
        p = p.to_number_polynomial()
    return p


def _truncation(cfg: RunConfig) -> FockTruncation:
    if cfg.nmax is not None:
        return FockTruncation(n_max=cfg.nmax, tol=cfg.tol)
    return FockTruncation(rtol=cfg.tol)


def cmd_symbol(cfg: RunConfig):
    h = Coeff.const(cfg.h[0])
    p = lower(cfg.hamiltonian, cfg.params if cfg.explicit_params else None, symbolic=True, h=h)
    rows = []
    if isinstance(p, BosonPolynomial):
        bos = normal_order(p, h)
        rows.append(("normal_order", str(bos)))
        w = weyl_transform(bos)
        rows.append(("weyl", str(w)))
        if bos.is_number_conserving():
            p = bos.to_number_polynomial()
        else:
            return rows, {}
    sym = classical_symbol(p, h)
    w = weyl_transform(normal_order(p, h), h)
    diff = sym - w
    rows.extend([
        ("hamiltonian", str(p)),
        ("classical_symbol", str(sym)),
        ("weyl", str(w)),
        ("recipe_minus_weyl", str(diff)),
        ("offset_is_constant", "yes" if diff.degree == 0 else "no"),
    ])
    return rows, {}


def cmd_partition(cfg: RunConfig):
    H = _lower_numeric(cfg)
    h = cfg.h[0]
    beta = cfg.beta
    trunc = _truncation(cfg)
    recs = []
    ex, ms = _timed(lambda: partition_exact(H, beta, h, trunc))
    ref = ex.value
    recs.append(ConvergenceRecord("exact", "n_max", ex.n_terms - 1, ref, ref, "fock-sum", ms))
    sym = classical_symbol(H, Coeff.const(h))
    cp, ms = _timed(lambda: constrained_partition(sym, beta, trunc))
    recs.append(ConvergenceRecord("constrained", "n_max", cp.n_terms - 1, cp.value, ref, "fock-sum", ms))
    vals = []
    for N in cfg.slices:
        v, ms = _timed(lambda: transfer_partition(H, beta, N, h, trunc=FockTruncation()).value)
        vals.append(v)
        recs.append(ConvergenceRecord("transfer", "N", N, v, ref, "fock-sum", ms))
    if len(vals) >= 2 and _is_doubling(cfg.slices):
        C = first_order_constant(cfg.slices, [v - ref for v in vals])
        order = min(2, len(vals) - 1)
        recs.append(ConvergenceRecord("transfer-richardson", "N", cfg.slices[-1],
                                      richardson(vals, order=order), ref, "fock-sum",
                                      label=f"order={order} fitted_C={C:.6g}"))
    c = [float(x) for x in sym.numeric_coeffs()]
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    if len(c) == 2 and c[1] > 0:
        s0, s1 = c
        v, ms = _timed(lambda: math.exp(-beta * s0) * matsubara_partition(beta, cfg.modes, omega=s1))
        recs.append(ConvergenceRecord("matsubara", "M", cfg.modes, v, ref, "fock-sum", ms))
        pit, ms = _timed(lambda: polar_sum(sym, beta).value)
        recs.append(ConvergenceRecord("pitfall", "n_max", "", pit, ref, "fock-sum", ms, "negative-control"))
    elif len(c) <= 3 and h == 1:
        c0, c1, c2 = quadratic_coefficients(PropagatorSpec(0, 0, 0.0, h, H, {}))
        U, mu = 2 * c2, -c1 - c2
        if U >= 0 and (U > 0 or mu > 0):
            pit, ms = _timed(lambda: polar_pitfall_partition(beta, mu, U).value * math.exp(-beta * c0))
            recs.append(ConvergenceRecord("pitfall", "n_max", "", pit, ref, "fock-sum", ms,
                                          "negative-control"))
    return recs, {}


def _is_doubling(Ns):
    return all(b == 2 * a for a, b in zip(Ns, Ns[1:]))


def _spec(cfg: RunConfig, H: NumberPolynomial, h: float | None = None, T: float | None = None):
    return PropagatorSpec(cfg.za, cfg.zb, cfg.time if T is None else T, cfg.h[0] if h is None else h,
                          H, {})


def cmd_propagator(cfg: RunConfig):
    H = _lower_numeric(cfg)
    spec = _spec(cfg, H)
    trunc = _truncation(cfg)
    recs = []
    f, ms = _timed(lambda: propagator_fock(spec, trunc))
    ref = f.value
    recs.append(ConvergenceRecord("fock", "n_max", f.n_terms - 1, ref, ref, "fock-sum", ms))
    if H.degree <= 2 and spec.T > 0:
        s, ms = _timed(lambda: omega_propagator_series(spec, trunc))
        label = "; ".join(s.notes)
        for note in s.notes:
            _diag(note)
        recs.append(ConvergenceRecord("series", "n_max", max(s.n_terms - 1, 0), s.value, ref, "fock-sum", ms,
                                      label))
        q, ms = _timed(lambda: omega_propagator_quadrature(spec))
        recs.append(ConvergenceRecord("quadrature", "nodes", q.n_terms, q.value, ref, "fock-sum", ms,
                                      "; ".join(q.notes)))
    ov, ms = _timed(lambda: propagator_fock(spec.replace(T=0.0), trunc).value)
    recs.append(ConvergenceRecord("overlap", "T", 0.0, ov, coherent_overlap(spec.z_b, spec.z_a, spec.h),
                                  "closed-form", ms, "identity evolution"))
    vals = []
    for N in cfg.slices:
        v, ms = _timed(lambda: lattice_propagator(spec, N))
        vals.append(v)
        recs.append(ConvergenceRecord("lattice", "N", N, v, ref, "fock-sum", ms))
    if len(vals) >= 2 and _is_doubling(cfg.slices):
        order = min(2, len(vals) - 1)
        recs.append(ConvergenceRecord("lattice-richardson", "N", cfg.slices[-1],
                                      complex(richardson(vals, order=order)), ref, "fock-sum",
                                      label=f"order={order}"))
    return recs, {}


def cmd_semiclassical(cfg: RunConfig):
    H = lower(cfg.hamiltonian, cfg.params, symbolic=False)
    if isinstance(H, BosonPolynomial):
        H = _lower_numeric(cfg)
    coeffs = extract_coefficients(H)
    general = lower(cfg.hamiltonian, None, symbolic=True)
    general = extract_coefficients(general) if isinstance(general, NumberPolynomial) else coeffs
    recs = []
    for name in ("a0", "a1", "b0", "b1", "b2"):
        val = getattr(coeffs, name)
        recs.append(ConvergenceRecord("coefficient", name, "", float(val.evaluate({})),
                                      label=str(getattr(general, name))))
    errs = []
    for h in sorted(cfg.h, reverse=True):
        spec = _spec(cfg, H, h=h)
        ex = propagator_fock(spec).value
        sp, ms = _timed(lambda: stationary_phase_propagator(spec))
        for note in sp.notes:
            _diag(note)
        err = abs(sp.value - ex) / abs(ex) if ex else abs(sp.value - ex)
        label = "; ".join(sp.notes)
        if errs and err > 0:
            label = (label + "; " if label else "") + f"error_ratio={errs[-1] / err:.6g}"
        errs.append(err)
        recs.append(ConvergenceRecord(sp.route, "h", h, sp.value, ex, "fock-sum", ms, label))
    z0 = PropagatorSpec(0j, 0j, cfg.time, min(cfg.h), H, {})
    sp, ms = _timed(lambda: stationary_phase_propagator(z0))
    recs.append(ConvergenceRecord(sp.route + "-z0", "h", min(cfg.h), sp.value, propagator_fock(z0).value,
                                  "fock-sum", ms, "quadratic exponent"))
    return recs, {"coefficients": {k: str(getattr(general, k)) for k in ("a0", "a1", "b0", "b1", "b2")}}


def cmd_pitfall(cfg: RunConfig):
    H = _lower_numeric(cfg)
    if cfg.h[0] != 1:
        raise UsageError("the pitfall sum is defined at h = 1")
    beta = cfg.beta
    ex = partition_exact(H, beta, 1.0, _truncation(cfg)).value
    c0, c1, c2 = quadratic_coefficients(PropagatorSpec(0, 0, 0.0, 1.0, H, {}))
    recs = []
    if c2 == 0:
        sym = classical_symbol(H, 1)
        v, ms = _timed(lambda: polar_sum(sym, beta).value)
    else:
        U, mu = 2 * c2, -c1 - c2
        v, ms = _timed(lambda: polar_pitfall_partition(beta, mu, U).value * math.exp(-beta * c0))
    recs.append(ConvergenceRecord("pitfall", "beta", beta, v, ex, "fock-sum", ms, "negative-control"))
    harm = ClassicalSymbol([0, 1])
    hv, ms = _timed(lambda: polar_sum(harm, beta).value)
    recs.append(ConvergenceRecord("pitfall-harmonic", "beta", beta, hv, 1 / (2 * math.sinh(beta / 2)),
                                  "closed-form", ms, "negative-control"))
    return recs, {}


COMMANDS = {
    "symbol": (cmd_symbol, "print the classical symbol and the Weyl-symbol cross-check"),
    "partition": (cmd_partition, "partition function by every route, with an N scan"),
    "propagator": (cmd_propagator, "coherent-state propagator by every route, with an N scan"),
    "semiclassical": (cmd_semiclassical, "stationary-phase propagator over an h scan"),
    "pitfall": (cmd_pitfall, "the polar-coordinate sum (a deliberately wrong result)"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cspath", description="Coherent-state path integrals "
                                     "for single-mode bosonic Hamiltonians, checked against Fock sums.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("shared options (flags override --config, which overrides defaults)")
    g.add_argument("--hamiltonian", metavar="TEXT", help=f"Hamiltonian expression (default: {BH_TEXT!r})")
    g.add_argument("--param", action="append", metavar="K=V",
                   help="bind a parameter, repeatable (numeric commands default to mu=1/2, U=1; "
                        "symbol keeps unbound parameters symbolic)")
    g.add_argument("--beta", type=float, help="inverse temperature (default: 1)")
    g.add_argument("--time", type=float, help="propagation time T (default: 1)")
    g.add_argument("--za", metavar="Z", help="initial coherent label, e.g. 1+0.5i (default: 1)")
    g.add_argument("--zb", metavar="Z", help="final coherent label (default: 1)")
    g.add_argument("--h", metavar="LIST", help="commutator scale; a comma list for semiclassical "
                                               "(default: 1, or 0.2,0.1,0.05 for semiclassical)")
    g.add_argument("--slices", metavar="LIST", help="slice counts, comma list or a:b doubling "
                                                    "(default: 64:4096 partition, 64:512 propagator)")
    g.add_argument("--nmax", metavar="N", help="fixed Fock cutoff (default: automatic)")
    g.add_argument("--tol", type=float, help="tolerance for truncated sums (default: 1e-12)")
    g.add_argument("--modes", type=int, help="Matsubara mode cutoff M (default: 10000)")
    g.add_argument("--format", choices=("csv", "json"), help="output format (default: csv)")
    g.add_argument("--out", metavar="PATH", help="write output to PATH instead of stdout")
    g.add_argument("--config", metavar="PATH", help="key = value file with any of the options above")
    for name, (_, help_) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_, description=help_)
    return parser


def _symbol_output(cfg: RunConfig, rows: list) -> str:
    if cfg.format == "json":
        return json.dumps({"meta": cfg.meta(), "symbol": dict(rows)}, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("quantity", "value"))
    w.writerows(rows)
    return buf.getvalue()


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = build_config(ns)
        fn = COMMANDS[cfg.subcommand][0]
        if cfg.subcommand == "symbol":
            rows, _ = fn(cfg)
            text = _symbol_output(cfg, rows)
        else:
            records, extra = fn(cfg)
            text = render(cfg, records, extra)
    except InputError as exc:
        _diag(f"error: {exc}")
        return EXIT_USAGE
    except NumericalError as exc:
        _diag(f"numerical failure: {exc}")
        return EXIT_NUMERIC
    if cfg.out:
        try:
            with open(cfg.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            _diag(f"error: cannot write {cfg.out}: {exc.strerror}")
            return EXIT_USAGE
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
