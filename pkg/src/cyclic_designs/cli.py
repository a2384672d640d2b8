"""Command-line front end.

Exit codes: 0 success, 1 semantic failure (certification failed, nothing
found), 2 bad input or usage.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, approx, basisgen, cyclic, designlib, diffsets, matcore, nogo, search, tomo
from .errors import ConstructionError, ContractViolation, DomainError, InvalidInputError

SEED_ENV = "CYCLIC_DESIGNS_SEED"


class UsageError(Exception):
    pass


class StageError(Exception):
    def __init__(self, stage: str, exc: Exception):
        super().__init__(f"stage '{stage}' failed: {exc}")
        self.stage, self.cause = stage, exc


@dataclass
class RunManifest:
    argv: list
    seed: int
    tol: float
    threads: int | None
    version: str
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    wall_clock_seconds: float = 0.0
    timestamp: str = ""


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _parse_ints(text: str) -> list[int]:
    try:
        text = text.strip()
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers like 1,2,4 or 2..12, got {text!r}") from None


def _read_json(path: str, ctx: "Context"):
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from None
    ctx.inputs[str(p)] = hashlib.sha256(text.encode()).hexdigest()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path} is not valid JSON: {exc}") from None


class Context:
    def __init__(self, args):
        self.args = args
        self.inputs: dict = {}
        self.outputs: dict = {}

    def emit(self, payload, suffix: str = "", text: str | None = None):
        """Write payload to --output (plus optional suffix) or print it."""
        body = text if text is not None else _dumps(payload)
        out = getattr(self.args, "output", None)
        if not out:
            sys.stdout.write(body)
            return
        path = Path(out)
        if suffix:
            path = path.with_name(path.stem + suffix + path.suffix)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(body)
        self.outputs[str(path)] = _digest(path)


# ----------------------------------------------------------------- helpers

def _basis_from_args(kind: str, dim: int | None, args) -> basisgen.SimplexDesignBasis:
    if kind == "qubit":
        return basisgen.qubit_basis()
    if kind == "golden":
        return basisgen.golden_basis()
    if kind == "qutrit":
        if args.phi is None:
            raise UsageError("--phi is required for the qutrit basis")
        return basisgen.qutrit_family(args.phi)
    if kind == "two-amplitude":
        if dim is None:
            raise UsageError("--dim is required for the two-amplitude basis")
        return basisgen.two_amplitude_basis(basisgen.skew_hadamard(dim))
    if kind == "numeric":
        if dim is None:
            raise UsageError("--dim is required for the numeric basis")
        return basisgen.numeric_basis(dim, seed=args.seed, restarts=args.restarts)
    if kind == "auto":
        if dim is None:
            raise UsageError("--dim is required")
        return basisgen.basis_for_dim(dim, seed=args.seed, restarts=args.restarts)
    raise UsageError(f"unknown basis kind {kind!r}")


def _certs(design: cyclic.CyclicDesign, ts) -> list[designlib.DesignCertificate]:
    return [cyclic.certify(design, t) for t in ts]


def _load_design_or_constellation(obj):
    """Accept a construct/search output, a bare design, or a constellation."""
    if isinstance(obj, dict) and "design" in obj:
        obj = obj["design"]
    if not isinstance(obj, dict):
        raise InvalidInputError("expected a JSON object")
    if "generator" in obj:
        return cyclic.CyclicDesign.from_json(obj)
    if "vectors" in obj:
        return designlib.Constellation.from_json(obj)
    raise InvalidInputError("input is neither a design nor a constellation")


def _state_from_json(obj) -> np.ndarray:
    if isinstance(obj, dict) and "vector" in obj:
        psi = np.array([complex(a, b) for a, b in obj["vector"]])
        psi = psi / np.linalg.norm(psi)
        return np.outer(psi, np.conj(psi))
    return matcore.matrix_from_json(obj)


def _default_dset(dim: int) -> diffsets.DifferenceSet:
    if dim == 2:
        return diffsets.make_difference_set(3, [0, 1])
    if dim == 3:
        return diffsets.make_difference_set(7, [1, 2, 4])
    if dim == 4:
        return diffsets.power_of_two_set(4)
    return diffsets.mian_chowla_set(dim)


# ----------------------------------------------------------------- commands

def cmd_construct(args, ctx: Context) -> int:
    m = args.method
    if m == "u1":
        design = cyclic.u1_design()
    elif m == "construction1":
        design = cyclic.construction_one_design(args.n)
    elif m == "qubit-family":
        if args.k is None:
            raise UsageError("--k is required for qubit-family")
        design = cyclic.qubit_family(args.k)
    elif m == "diffset":
        if args.dset is not None:
            if args.modulus is None:
                raise UsageError("--modulus is required with --dset")
            dset = diffsets.make_difference_set(args.modulus, args.dset)
        elif args.dim is not None:
            dset = _default_dset(args.dim)
        else:
            raise UsageError("diffset method needs --dset/--modulus or --dim")
        dim = args.dim if args.dim is not None else dset.size
        design = cyclic.assemble(_basis_from_args(args.basis, dim, args), dset)
    else:
        raise UsageError(f"unknown method {m!r}")
    certs = _certs(design, args.t)
    payload = {"design": design.to_json(), "certificates": [c.to_json() for c in certs]}
    if m == "construction1":
        payload["mub"] = cyclic.certify_bases_mub(design).max_violation
    ctx.emit(payload)
    return 0 if all(c.is_design for c in certs) else 1


def cmd_verify(args, ctx: Context) -> int:
    obj = _load_design_or_constellation(_read_json(args.input, ctx))
    if isinstance(obj, cyclic.CyclicDesign):
        certs = [cyclic.certify(obj, t) for t in args.t]
    else:
        certs = [designlib.certify_projective_design(obj, t) for t in args.t]
    ctx.emit({"certificates": [c.to_json() for c in certs]})
    return 0 if all(c.is_design for c in certs) else 1


def cmd_diffset(args, ctx: Context) -> int:
    a = args.action
    if a == "mian-chowla":
        ctx.emit({"n": args.n, "sequence": diffsets.mian_chowla(args.n)})
        return 0
    if a == "power2":
        ctx.emit(diffsets.power_of_two_set(args.d).to_json())
        return 0
    if a == "verify":
        ok, hist = diffsets.verify_difference_set(args.v, args.elements)
        out = diffsets.make_difference_set(args.v, args.elements).to_json()
        out["status"] = "verified" if ok else "rejected"
        out["histogram"] = {str(k): c for k, c in sorted(hist.items())}
        ctx.emit(out)
        return 0 if ok else 1
    if a == "search":
        res = diffsets.search_difference_set(args.v, args.K, args.budget)
        ctx.emit(res.to_json())
        return 0 if res.status == "found" else 1
    raise UsageError(f"unknown diffset action {a!r}")


def cmd_basis(args, ctx: Context) -> int:
    b = _basis_from_args(args.kind, args.dim, args)
    ctx.emit(b.to_json())
    return 0 if b.certified else 1


def cmd_search(args, ctx: Context) -> int:
    cfg = search.SearchConfig(args.dim, args.k, args.t, args.restarts, args.seed, args.max_iters,
                              args.accept, tuple(args.spectrum) if args.spectrum else None)
    res = search.search_cyclic(cfg)
    payload = res.to_json()
    payload["design"] = res.design().to_json()
    ctx.emit(payload)
    return 0 if res.status == "found" else 1


def cmd_scan(args, ctx: Context) -> int:
    cells = search.grid_scan(args.dims, args.ks, args.t, args.restarts, args.seed, args.max_iters, args.accept)
    ctx.emit(None, text=search.scan_to_csv(cells))
    return 0


def cmd_approx(args, ctx: Context) -> int:
    b = _basis_from_args(args.basis, args.dim, args)
    rep = approx.monte_carlo_epsilon(b, args.k, args.samples, args.seed)
    ctx.emit(rep.to_json(include_samples=args.include_samples))
    return 0


def cmd_tomo(args, ctx: Context) -> int:
    design = _load_design_or_constellation(_read_json(args.design, ctx))
    if not isinstance(design, cyclic.CyclicDesign):
        raise InvalidInputError("tomography needs a cyclic design file")
    if args.state:
        rho = _state_from_json(_read_json(args.state, ctx))
    else:
        rho = tomo.random_mixed_state(design.dim, np.random.default_rng(args.seed))
    shots = _parse_shots(args.shots)
    rep = tomo.run_tomography(design, rho, shots, args.seed, args.tau_int, args.tau_prep)
    ctx.emit(rep.to_json())
    if args.csv:
        Path(args.csv).write_text(tomo.probabilities_to_csv(rep.probabilities))
        ctx.outputs[args.csv] = _digest(Path(args.csv))
    return 0


def cmd_nogo(args, ctx: Context) -> int:
    a = args.action
    if a == "fh":
        ctx.emit(nogo.hadamard_merit_minimize(grid=args.grid).to_json())
        return 0
    if a == "simplex3":
        val, phi = nogo.simplex3_cost_minimum()
        ctx.emit({"min": val, "argmin_phi": phi,
                  "cost_at_pi": nogo.simplex3_cost(np.pi),
                  "printed_closed_form_at_pi": nogo.simplex3_cost_closed_form(np.pi)})
        return 0
    if a == "rank":
        r = nogo.moment_matrix_rank(args.dim)
        expected = args.dim * (args.dim + 1) // 2
        ctx.emit({"dim": args.dim, "rank": r, "expected": expected})
        return 0 if r == expected else 1
    if a == "qubit-moments":
        rep = nogo.qubit_moment_system(args.tmax)
        ctx.emit(rep.to_json())
        return 0
    raise UsageError(f"unknown nogo action {a!r}")


def _parse_shots(text):
    if text is None or str(text) == "exact":
        return "exact"
    try:
        n = int(text)
    except ValueError:
        raise UsageError(f"--shots must be an integer or 'exact', got {text!r}") from None
    if n < 1:
        raise UsageError("--shots must be positive")
    return n


def cmd_pipeline(args, ctx: Context) -> int:
    def stage(name, fn):
        try:
            return fn()
        except (UsageError, StageError):
            raise
        except Exception as exc:
            raise StageError(name, exc) from exc

    dim = args.dim
    basis = stage("basis", lambda: basisgen.basis_for_dim(dim, seed=args.seed, restarts=args.restarts))
    if not basis.certified:
        raise StageError("basis", ConstructionError(f"residual {basis.residual:.3e} above tolerance"))
    dset = stage("diffset", lambda: _default_dset(dim))
    design = stage("assemble", lambda: cyclic.assemble(basis, dset))
    cert = stage("certify", lambda: cyclic.certify(design, 2))
    rho = stage("state", lambda: tomo.random_mixed_state(dim, np.random.default_rng(args.seed)))
    shots = _parse_shots(args.shots)
    rep = stage("tomography", lambda: tomo.run_tomography(design, rho, shots, args.seed))
    ctx.emit({
        "dim": dim,
        "k": design.k,
        "basis": basis.meta.get("kind"),
        "basis_residual": basis.residual,
        "difference_set": dset.to_json(),
        "certificate": cert.to_json(),
        "shots": shots,
        "error_infinity": rep.error_infinity,
        "bound": rep.bound,
    })
    return 0 if cert.is_design else 1


# ----------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    env_seed = os.environ.get(SEED_ENV)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="certification tolerance (default 1e-10)")
    common.add_argument("--seed", type=int, default=int(env_seed) if env_seed else 0)
    common.add_argument("--threads", type=int, default=None, help="worker cap (computations are serial)")
    common.add_argument("-o", "--output", help="write JSON/CSV here (and a .manifest.json beside it)")

    p = argparse.ArgumentParser(prog="cyclic-designs", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", parents=[common], help="build a cyclic design")
    c.add_argument("--method", required=True, choices=["u1", "construction1", "qubit-family", "diffset"])
    c.add_argument("--n", type=int, default=1)
    c.add_argument("--k", type=int)
    c.add_argument("--dim", type=int)
    c.add_argument("--basis", default="auto", choices=["auto", "qubit", "golden", "qutrit", "two-amplitude", "numeric"])
    c.add_argument("--phi", type=float)
    c.add_argument("--restarts", type=int, default=20)
    c.add_argument("--dset", type=_parse_ints)
    c.add_argument("--modulus", type=int)
    c.add_argument("--t", type=_parse_ints, default=[2])
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", parents=[common], help="certify a design or constellation file")
    v.add_argument("input")
    v.add_argument("--t", type=_parse_ints, default=[2])
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("diffset", parents=[common], help="difference sets")
    dsub = d.add_subparsers(dest="action", required=True)
    x = dsub.add_parser("mian-chowla", parents=[common])
    x.add_argument("--n", type=int, required=True)
    x = dsub.add_parser("power2", parents=[common])
    x.add_argument("--d", type=int, required=True)
    x = dsub.add_parser("verify", parents=[common])
    x.add_argument("--v", type=int, required=True)
    x.add_argument("--elements", type=_parse_ints, required=True)
    x = dsub.add_parser("search", parents=[common])
    x.add_argument("--v", type=int, required=True)
    x.add_argument("--K", type=int, required=True)
    x.add_argument("--budget", type=int, default=10_000_000)
    d.set_defaults(func=cmd_diffset)

    b = sub.add_parser("basis", parents=[common], help="bases decohering to simplex 2-designs")
    b.add_argument("--kind", default="auto", choices=["auto", "qubit", "golden", "qutrit", "two-amplitude", "numeric"])
    b.add_argument("--dim", type=int)
    b.add_argument("--phi", type=float)
    b.add_argument("--restarts", type=int, default=20)
    b.set_defaults(func=cmd_basis)

    def search_flags(sp):
        sp.add_argument("--t", type=int, default=2)
        sp.add_argument("--restarts", type=int, default=50)
        sp.add_argument("--max-iters", type=int, default=2000)
        sp.add_argument("--accept", type=float, default=1e-8, help="acceptance threshold on epsilon")

    s = sub.add_parser("search", parents=[common], help="frame-potential search")
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--spectrum", type=_parse_ints)
    search_flags(s)
    s.set_defaults(func=cmd_search)

    sc = sub.add_parser("scan", parents=[common], help="search grid over dims x ks (CSV)")
    sc.add_argument("--dims", type=_parse_ints, required=True)
    sc.add_argument("--ks", type=_parse_ints, required=True)
    search_flags(sc)
    sc.set_defaults(func=cmd_scan, restarts=20)

    a = sub.add_parser("approx", parents=[common], help="random-phase epsilon statistics")
    a.add_argument("--dim", type=int)
    a.add_argument("--k", type=int, required=True)
    a.add_argument("--samples", type=int, default=2000)
    a.add_argument("--basis", default="auto", choices=["auto", "qubit", "golden", "qutrit", "two-amplitude", "numeric"])
    a.add_argument("--phi", type=float)
    a.add_argument("--restarts", type=int, default=20)
    a.add_argument("--include-samples", action="store_true")
    a.set_defaults(func=cmd_approx)

    t = sub.add_parser("tomo", parents=[common], help="simulate tomography with a design")
    t.add_argument("--design", required=True)
    t.add_argument("--state", help="JSON matrix, or {\"vector\": [[re, im], ...]}; random mixed state if omitted")
    t.add_argument("--shots", default="exact")
    t.add_argument("--csv", help="also write the probability table as CSV")
    t.add_argument("--tau-int", type=float, default=0.0)
    t.add_argument("--tau-prep", type=float, default=0.0)
    t.set_defaults(func=cmd_tomo)

    n = sub.add_parser("nogo", parents=[common], help="non-existence computations")
    nsub = n.add_subparsers(dest="action", required=True)
    x = nsub.add_parser("fh", parents=[common])
    x.add_argument("--grid", type=int, default=80)
    nsub.add_parser("simplex3", parents=[common])
    x = nsub.add_parser("rank", parents=[common])
    x.add_argument("--dim", type=int, required=True)
    x = nsub.add_parser("qubit-moments", parents=[common])
    x.add_argument("--tmax", type=int, required=True)
    n.set_defaults(func=cmd_nogo)

    pl = sub.add_parser("pipeline", parents=[common], help="basis -> difference set -> design -> tomography")
    pl.add_argument("--dim", type=int, required=True)
    pl.add_argument("--shots", default="exact")
    pl.add_argument("--restarts", type=int, default=20)
    pl.set_defaults(func=cmd_pipeline)
    return p


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    old_tol = matcore.DEFAULT_TOL
    if args.tol is not None:
        if not args.tol > 0:
            print("error: --tol must be positive", file=sys.stderr)
            return 2
        matcore.DEFAULT_TOL = args.tol
    ctx = Context(args)
    start = time.perf_counter()
    try:
        code = args.func(args, ctx)
    except (UsageError, InvalidInputError, ContractViolation, DomainError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2 if isinstance(exc.cause, (InvalidInputError, ContractViolation, DomainError)) else 1
    except ConstructionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    finally:
        matcore.DEFAULT_TOL = old_tol
    if getattr(args, "output", None):
        manifest = RunManifest(
            argv=argv, seed=args.seed, tol=args.tol if args.tol is not None else old_tol,
            threads=args.threads, version=__version__, inputs=ctx.inputs, outputs=ctx.outputs,
            wall_clock_seconds=time.perf_counter() - start,
            timestamp=datetime.now(timezone.utc).isoformat(),
        )
        out = Path(args.output)
        out.with_name(out.name + ".manifest.json").write_text(_dumps(asdict(manifest)))
    return code


if __name__ == "__main__":
    sys.exit(main())
