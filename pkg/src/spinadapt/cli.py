"""Command-line entry point: every scan and experiment as a subcommand.

Subcommands write CSV (`theta,value` with 17 significant digits) or plain
text reports.  Exit codes: 0 on success, 1 when a verification gate fails
(closed forms off tolerance, expectation mismatches, optimizer
stagnation), 2 on usage errors.  SPINADAPT_THREADS caps the worker count
for the theta-grid scans; results are byte-identical for any setting.
"""

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from . import pauli
from .adapt import PreparedGenerator, adapt_vqe
from .expm import (
    AntiHermitianEigen,
    builtin_specs,
    closed_form_eval,
    eq26_spec,
    identity_distance_scan,
    periodicity_test,
)
from .fermiops import (
    active_orbitals,
    map_spatial_orbitals,
    s_squared_operator,
    to_matrix,
)
from .fock import (
    SymmetrySector,
    aufbau_reference,
    enumerate_basis,
    s2_sector_dimension,
)
from .hamiltonian import build_hamiltonian, fci_ground, parse_fcidump
from .pools import PoolSpec, build_pool, singlet_double_cg, spin_single
from .trotter import (
    error_scan,
    scheme,
    spin_violation_scan,
    term_split,
    trot1_st_spec,
    trot_closed_forms,
)


def _threads():
    try:
        n = int(os.environ.get("SPINADAPT_THREADS", "0"))
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


def _thread_map(fn, items):
    workers = min(_threads(), max(len(items), 1))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _theta_grid(text):
    """Parse `start:stop:step` into an inclusive, drift-free grid."""
    try:
        start, stop, step = (float(p) for p in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be start:stop:step, got {text!r}")
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError(f"empty grid {text!r}")
    count = int(math.floor((stop - start) / step * (1 + 1e-12))) + 1
    return start + step * np.arange(count)


def _int_list(text, n):
    parts = text.split(",")
    if len(parts) != n:
        raise argparse.ArgumentTypeError(f"expected {n} comma-separated indices: {text!r}")
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"indices must be integers: {text!r}")


def _fmt(x):
    return f"{x:.17g}"


def _write_rows(path, header, rows):
    lines = [header] + [",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _add_generator_args(parser, default_double="1,1,3,5"):
    group = parser.add_argument_group("generator selection")
    group.add_argument(
        "--single",
        type=lambda t: _int_list(t, 2),
        help="spin-orbital single p,q (flat spinorbital indices)",
    )
    group.add_argument(
        "--double",
        type=lambda t: _int_list(t, 4),
        default=None if default_double is None else _int_list(default_double, 4),
        help="spin-adapted double P,Q,R,S (spatial indices; default %(default)s)",
    )
    group.add_argument(
        "--spin", type=int, choices=(0, 1), default=0,
        help="intermediate spin coupling of the double (default 0)",
    )
    group.add_argument("--n-spatial", type=int, default=6, help="ambient orbital count")


def _resolve_generator(args):
    if args.single is not None:
        p, q = args.single
        if p == q or min(p, q) < 0 or max(p, q) >= 2 * args.n_spatial:
            raise SystemExit(f"invalid spinorbital pair {args.single}")
        return spin_single(p, q), None
    P, Q, R, S = args.double
    if min(args.double) < 0 or max(args.double) >= args.n_spatial:
        raise SystemExit(f"orbital indices {args.double} out of range")
    gen = singlet_double_cg(P, Q, R, S, args.spin)
    return gen.body, gen


def _active_matrix(body):
    """Dense matrix of an operator on the Fock space of its own orbitals,
    plus the Frobenius scale factor to the ambient space."""
    active = active_orbitals(body)
    mapping = {orb: i for i, orb in enumerate(active)}
    basis = enumerate_basis(len(active))
    return to_matrix(map_spatial_orbitals(body, mapping), basis).toarray(), active


# --- subcommands -----------------------------------------------------------


def _cmd_pool_stats(args):
    if args.fcidump:
        ham = parse_fcidump(args.fcidump)
        n, n_elec, irreps = ham.n_spatial, ham.n_elec, ham.orb_irreps
        sz = ham.ms2 / 2.0
    else:
        n, n_elec, irreps, sz = args.n_spatial, args.n_elec, None, 0.0
        if irreps is None:
            irreps = (0,) * n
    levels = [
        ("N", frozenset({"N"}), SymmetrySector(n=n_elec)),
        ("N+Sz", frozenset({"N", "Sz"}), SymmetrySector(n=n_elec, sz=sz)),
        (
            "N+Sz+pg",
            frozenset({"N", "Sz", "pointgroup"}),
            SymmetrySector(n=n_elec, sz=sz, irrep=0),
        ),
        (
            "N+Sz+pg+S2",
            frozenset({"N", "Sz", "pointgroup", "S2"}),
            SymmetrySector(n=n_elec, sz=sz, irrep=0),
        ),
    ]
    rows = []
    for label, enforce, sector in levels:
        ops = build_pool(PoolSpec(n, irreps, enforce))
        basis = enumerate_basis(n, sector, orb_irreps=irreps)
        dim = len(basis)
        if "S2" in enforce:
            total_spin = abs(sz)
            dim = s2_sector_dimension(basis, total_spin)
        rows.append((label, len(ops), dim))
    _write_rows(args.out, "symmetry,pool_size,sector_dim", rows)
    return 0


def _closed_form_for(args):
    which = args.which
    if which == "eq26":
        if args.single is None:
            raise SystemExit("eq26 needs --single p,q (flat spinorbital indices)")
        p, q = args.single
        if p == q or min(p, q) < 0 or max(p, q) >= 2 * args.n_spatial:
            raise SystemExit(f"invalid spinorbital pair {args.single}")
        return eq26_spec(spin_single(p, q))
    need = 4 if which in ("sm_s9", "sm_s10") else 3
    idx = [args.p, args.q, args.r, args.s][:need]
    if any(v is None for v in idx):
        flags = " ".join(f"--{f}" for f in "pqrs"[:need])
        raise SystemExit(f"{which} needs {flags}")
    if len(set(idx)) != need or min(idx) < 0 or max(idx) >= args.n_spatial:
        raise SystemExit(f"indices {idx} must be distinct orbitals below {args.n_spatial}")
    if which in ("eq30", "eq31", "eq32"):
        return builtin_specs()[which](*idx)
    if which in ("sm_s9", "sm_s10"):
        return builtin_specs()[which](*idx)
    if which in ("trot1", "trot2"):
        return trot_closed_forms(*idx)[which]
    return trot1_st_spec(*idx)


def _cmd_closedform_verify(args):
    spec = _closed_form_for(args)
    rng = np.random.default_rng(args.seed)
    thetas = rng.uniform(0.0, args.theta_max, size=args.samples)
    n = args.n_spatial

    def sector_worst(sector):
        basis = enumerate_basis(n, sector)
        if len(basis) == 0:
            return np.zeros(len(thetas))
        mats = spec.materialize(basis)
        gen = to_matrix(spec.generator, basis, check_closure=True).toarray()
        eig = AntiHermitianEigen(gen)
        sq = np.empty(len(thetas))
        for i, t in enumerate(thetas):
            diff = closed_form_eval(spec, t, basis, mats) - eig.expm(t)
            sq[i] = np.sum(np.abs(diff) ** 2)
        return sq

    sectors = [
        SymmetrySector(n=num, sz=sz2 / 2.0)
        for num in range(2 * n + 1)
        for sz2 in range(-num, num + 1, 2)
    ]
    per_sector = _thread_map(sector_worst, sectors)
    defects = np.sqrt(np.sum(per_sector, axis=0))
    worst = float(defects.max())
    print(
        f"closed form {spec.name}: max Frobenius defect {worst:.3e} over "
        f"{args.samples} angles in [0, {_fmt(args.theta_max)}] "
        f"({n}-orbital Fock space)"
    )
    if worst > args.tol:
        print(f"FAIL: defect exceeds tolerance {args.tol:g}", file=sys.stderr)
        return 1
    return 0


def _split_for_args(args):
    _, gen = _resolve_generator(args)
    if gen is None:
        raise SystemExit("Trotter scans need a --double generator")
    return gen


def _chunks(thetas):
    """Split a grid across workers; per-theta values never mix between
    chunks, so output is identical for any worker count."""
    n = min(len(thetas), max(_threads(), 1))
    return np.array_split(thetas, max(n, 1))


def _cmd_trotter_error(args):
    gen = _split_for_args(args)
    sch = scheme(args.order, len(term_split(gen)))
    thetas = args.theta
    parts = _thread_map(lambda c: error_scan(gen, sch, c, args.n_spatial), _chunks(thetas))
    values = np.concatenate(parts)
    _write_rows(args.out, "theta,value", list(zip(thetas, values)))
    return 0


def _cmd_spin_violation(args):
    gen = _split_for_args(args)
    sch = None if args.exact else scheme(args.order, len(term_split(gen)))
    thetas = args.theta
    parts = _thread_map(
        lambda c: spin_violation_scan(gen, sch, c, args.n_spatial), _chunks(thetas)
    )
    values = np.concatenate(parts)
    _write_rows(args.out, "theta,value", list(zip(thetas, values)))
    return 0


def _cmd_identity_scan(args):
    body, _ = _resolve_generator(args)
    mat, active = _active_matrix(body)
    scale = 2.0 ** (args.n_spatial - len(active))
    values = identity_distance_scan(mat, args.theta) * scale
    _write_rows(args.out, "theta,value", list(zip(args.theta, values)))
    return 0


def _product_period(gen, order):
    """Exact period of the product formula: every stage is periodic, so the
    product period is the rational lcm of the stage periods."""
    groups = term_split(gen)
    sch = scheme(order, len(groups))
    stage_periods = []
    for idx, frac in sch.stages:
        mat, _ = _active_matrix(frac * groups[idx])
        rep = periodicity_test(mat)
        if not rep.periodic:
            return None
        stage_periods.append(rep.period)
    base = stage_periods[0]
    ratios = [Fraction(p / base).limit_denominator(10**6) for p in stage_periods]
    num = ratios[0].numerator
    den = ratios[0].denominator
    for r in ratios[1:]:
        num = num * r.numerator // math.gcd(num, r.numerator)
        den = math.gcd(den, r.denominator)
    return base * num / den


def _cmd_periodicity(args):
    if args.trot:
        _, gen = _resolve_generator(args)
        if gen is None:
            raise SystemExit("--trot needs a --double generator")
        period = _product_period(gen, args.trot)
        verdict = "periodic" if period is not None else "not_periodic"
        print(f"product formula order {args.trot}: {verdict}")
        if period is not None:
            print(f"period: {_fmt(period)}")
        rc = 0
    else:
        body, _ = _resolve_generator(args)
        mat, _ = _active_matrix(body)
        rep = periodicity_test(mat, d_max=args.d_max, tol=args.rational_tol)
        verdict = rep.verdict
        print(f"verdict: {rep.verdict}")
        print("eigenvalues (imag parts):", " ".join(_fmt(v) for v in rep.eigenvalues))
        if rep.period is not None:
            print(f"period: {_fmt(rep.period)}")
        for ratio, n_, m_, err in rep.certificate:
            print(f"ratio {_fmt(ratio)} ~ {n_}/{m_} scaled error {err:.3e}")
        rc = 0
    if args.expect and args.expect != verdict:
        print(f"FAIL: expected {args.expect}, got {verdict}", file=sys.stderr)
        return 1
    return rc


def _cmd_jw_dump(args):
    body, _ = _resolve_generator(args)
    psum = pauli.jordan_wigner(body, 2 * args.n_spatial)
    text = pauli.dumps(psum)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    return 0


def _cmd_adapt(args):
    ham = parse_fcidump(args.fcidump)
    sector = SymmetrySector(n=ham.n_elec, sz=ham.ms2 / 2.0)
    basis = enumerate_basis(ham.n_spatial, sector)
    Hmat = build_hamiltonian(ham, basis)
    fci_energy, _ = fci_ground(Hmat)
    enforce = {"N", "Sz", "pointgroup"}
    if args.pool == "sagsd":
        enforce.add("S2")
    ops = build_pool(PoolSpec(ham.n_spatial, ham.orb_irreps, frozenset(enforce)))
    prepared = [PreparedGenerator(op, basis) for op in ops]
    ref = basis.index_of[aufbau_reference(ham.n_spatial, ham.n_elec)]
    s2_mat = to_matrix(s_squared_operator(ham.n_spatial), basis)
    result = adapt_vqe(
        Hmat,
        prepared,
        ref,
        grad_tol=args.grad_tol,
        energy_tol=args.energy_tol,
        max_iters=args.max_iters,
        fci_energy=fci_energy,
        s2_mat=s2_mat,
    )
    rows = [
        (
            r["iter"],
            r["n_params"],
            float(r["energy"]),
            float(r["error_vs_fci"]),
            float(r["max_grad"]),
            float(r["s2_expval"]),
        )
        for r in result.trajectory
    ]
    _write_rows(args.out, "iter,n_params,energy,error_vs_fci,max_grad,s2_expval", rows)
    print(f"status: {result.status} ({len(rows)} iterations)", file=sys.stderr)
    if result.status == "stagnated":
        return 1
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="spinadapt",
        description="Spin-adapted excitation operators: scans and experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pool-stats", help="operator pool sizes and sector dimensions")
    p.add_argument("--fcidump", help="read NORB/NELEC/ORBSYM from this file")
    p.add_argument("--n-spatial", type=int, default=6)
    p.add_argument("--n-elec", type=int, default=6)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_pool_stats)

    p = sub.add_parser("closedform-verify", help="closed forms vs exact exponentials")
    p.add_argument(
        "--which",
        required=True,
        choices=(
            "eq26", "eq30", "eq31", "eq32", "sm_s9", "sm_s10",
            "trot1", "trot2", "trot1_st",
        ),
    )
    p.add_argument(
        "--single",
        type=lambda t: _int_list(t, 2),
        help="spinorbital pair p,q for the one-body form",
    )
    p.add_argument("--p", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--n-spatial", type=int, default=6)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--theta-max", type=float, default=4 * math.pi)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(fn=_cmd_closedform_verify)

    p = sub.add_parser("trotter-error", help="||exact - product formula||_F scan")
    p.add_argument("--order", type=int, choices=(1, 2, 4), default=1)
    p.add_argument("--theta", type=_theta_grid, default=_theta_grid("0:10:0.01"))
    _add_generator_args(p)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_trotter_error)

    p = sub.add_parser("spin-violation", help="||[S^2, product formula]||_F scan")
    p.add_argument("--order", type=int, choices=(1, 2, 4), default=1)
    p.add_argument("--exact", action="store_true", help="score the exact exponential")
    p.add_argument("--theta", type=_theta_grid, default=_theta_grid("0:10:0.01"))
    _add_generator_args(p)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_spin_violation)

    p = sub.add_parser("identity-scan", help="||I - exp(theta G)||_F scan")
    p.add_argument("--theta", type=_theta_grid, default=_theta_grid("0:100:0.05"))
    _add_generator_args(p)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_identity_scan)

    p = sub.add_parser("periodicity", help="is exp(theta G) periodic in theta?")
    _add_generator_args(p)
    p.add_argument("--trot", type=int, choices=(1, 2, 4), help="test the product formula instead")
    p.add_argument("--d-max", type=int, default=10**6)
    p.add_argument("--rational-tol", type=float, default=1e-9)
    p.add_argument("--expect", choices=("periodic", "not_periodic", "inconclusive"))
    p.set_defaults(fn=_cmd_periodicity)

    p = sub.add_parser("jw-dump", help="Pauli-string encoding of a generator")
    _add_generator_args(p)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_jw_dump)

    p = sub.add_parser("adapt", help="adaptive ansatz growth to the FCI ground state")
    p.add_argument("--fcidump", required=True)
    p.add_argument("--pool", choices=("gsd", "sagsd"), default="sagsd")
    p.add_argument("--grad-tol", type=float, default=1e-9)
    p.add_argument("--energy-tol", type=float, default=0.0)
    p.add_argument("--max-iters", type=int, default=250)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_adapt)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except SystemExit:
        raise
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
