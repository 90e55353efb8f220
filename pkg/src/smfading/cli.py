"""Command-line driver: SNR sweeps to CSV, coefficient printout, self-test.

Exit codes: 0 success, 1 usage error, 2 numeric failure, 3 self-test failure.
"""

import argparse
import io
import json
import math
import os
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__, asymptotics
from .errors import SmFadingError
from .exactperf import (SM, SSK, Mode, SnrPoint, SystemConfig, abep_bound,
                        abep_ssk_bound, pep_exact, sm_multipliers)
from .fading import BranchPair, EgkLinkParams, GeneralizedK, Nakagami
from .montecarlo import StopRule, simulate_ber

__all__ = ["SweepSpec", "CurveRow", "PerformanceCurve", "ERR", "COLUMNS",
           "snr_grid", "run_sweep", "write_csv", "read_csv", "selftest", "main"]

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_SELFTEST = 0, 1, 2, 3
COLUMNS = ("snr_db", "abep_asym", "abep_exact", "ber_sim", "ci_low", "ci_high")
OUTPUTS = ("asym", "exact", "sim")
ERR = "ERR"


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class SweepSpec:
    cfg: SystemConfig
    snr_db_start: float
    snr_db_stop: float
    snr_db_step: float
    outputs: frozenset
    seed: int = 0
    out_path: str = None
    stop: StopRule = field(default_factory=StopRule)
    jobs: int = 1

    def __post_init__(self):
        if not self.snr_db_step > 0:
            raise UsageError("SNR step must be positive")
        if self.snr_db_start > self.snr_db_stop:
            raise UsageError("SNR start must not exceed stop")
        if not self.outputs:
            raise UsageError("select at least one output (asym, exact, sim)")
        unknown = set(self.outputs) - set(OUTPUTS)
        if unknown:
            raise UsageError(f"unknown outputs: {', '.join(sorted(unknown))}")


@dataclass(frozen=True)
class CurveRow:
    """One SNR point; ``None`` marks an output that was not requested, ``ERR`` a failure."""

    snr_db: float
    abep_asym: object = None
    abep_exact: object = None
    ber_sim: object = None
    ci_low: object = None
    ci_high: object = None

    def values(self):
        return tuple(getattr(self, c) for c in COLUMNS)


@dataclass(frozen=True)
class PerformanceCurve:
    rows: tuple
    manifest: tuple = ()

    def has_errors(self):
        return any(v == ERR for row in self.rows for v in row.values())


def snr_grid(start, stop, step):
    """Inclusive grid ``start, start + step, ...`` up to ``stop`` (with rounding slack)."""
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(n)]


def _point(spec, snr_db):
    pt = SnrPoint(snr_db)
    vals = {}
    for out, col in (("asym", "abep_asym"), ("exact", "abep_exact")):
        if out in spec.outputs:
            mode = Mode.ASYMPTOTIC if out == "asym" else Mode.EXACT
            try:
                vals[col] = float(abep_bound(spec.cfg, pt, mode))
            except SmFadingError:
                vals[col] = ERR
    if "sim" in spec.outputs:
        try:
            est = simulate_ber(spec.cfg, pt, spec.stop, spec.seed)
            vals.update(ber_sim=float(est.ber), ci_low=float(est.ci95_low),
                        ci_high=float(est.ci95_high))
        except SmFadingError:
            vals.update(ber_sim=ERR, ci_low=ERR, ci_high=ERR)
    return CurveRow(snr_db, **vals)


def _manifest(spec, command):
    cfg = spec.cfg
    fading = {"family": type(cfg.fading).__name__, **asdict(cfg.fading)}
    modulation = {"type": type(cfg.modulation).__name__, **asdict(cfg.modulation)}
    config = {
        "command": command, "n_t": cfg.n_t, "n_r": cfg.n_r,
        "modulation": modulation, "fading": fading,
        "snr_db": [spec.snr_db_start, spec.snr_db_stop, spec.snr_db_step],
        "outputs": sorted(spec.outputs),
        "stop": {"min_bit_errors": spec.stop.min_bit_errors, "max_bits": spec.stop.max_bits},
    }
    return (f"smfading {__version__}",
            "config " + json.dumps(config, sort_keys=True),
            f"seed {spec.seed}")


def run_sweep(spec, command="sweep"):
    """Evaluate every SNR point; rows come back in grid order whatever ``jobs`` is.

    The CSV is written when ``spec.out_path`` is set.
    """
    grid = snr_grid(spec.snr_db_start, spec.snr_db_stop, spec.snr_db_step)
    if spec.jobs > 1:
        with ThreadPoolExecutor(spec.jobs) as pool:
            rows = tuple(pool.map(lambda x: _point(spec, x), grid))
    else:
        rows = tuple(_point(spec, x) for x in grid)
    curve = PerformanceCurve(rows, _manifest(spec, command))
    if spec.out_path:
        write_csv(curve, spec.out_path)
    return curve


def _fmt(v):
    if v is None:
        return ""
    if v == ERR:
        return ERR
    return format(float(v), ".17g")


def _parse(text):
    if text == "":
        return None
    if text == ERR:
        return ERR
    return float(text)


def format_csv(curve):
    buf = io.StringIO()
    for line in curve.manifest:
        buf.write(f"# {line}\n")
    buf.write(",".join(COLUMNS) + "\n")
    for row in curve.rows:
        buf.write(",".join(_fmt(v) for v in row.values()) + "\n")
    return buf.getvalue()


def write_csv(curve, path):
    """Atomic write: a temporary file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".smfading-", suffix=".csv", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(format_csv(curve))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_csv(path):
    """Parse a file written by :func:`write_csv` back into a curve."""
    manifest, rows = [], []
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    header_seen = False
    for line in lines:
        if line.startswith("#"):
            manifest.append(line[2:] if line.startswith("# ") else line[1:])
            continue
        if not header_seen:
            if tuple(line.split(",")) != COLUMNS:
                raise ValueError(f"unexpected CSV header: {line!r}")
            header_seen = True
            continue
        fields = line.split(",")
        rows.append(CurveRow(float(fields[0]), *(_parse(f) for f in fields[1:])))
    return PerformanceCurve(tuple(rows), tuple(manifest))


# --------------------------------------------------------------------------
# self-test
# --------------------------------------------------------------------------

@dataclass
class Check:
    name: str
    actual: float
    expected: float
    tol: float
    relative: bool = True

    @property
    def passed(self):
        gap = abs(self.actual - self.expected)
        scale = abs(self.expected) if self.relative else 1.0
        return bool(gap <= self.tol * scale)

    def line(self):
        kind = "rel" if self.relative else "abs"
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.name}: actual={self.actual:.10g} "
                f"expected={self.expected:.10g} tol={self.tol:g} ({kind})")


def _selftest_checks():
    ray = BranchPair.iid(Nakagami(1.0))
    for a in (1.0, 10.0, 100.0):
        yield Check(f"Rayleigh PEP at A={a:g}", pep_exact(ray, 1, a),
                    0.5 * (1.0 - math.sqrt(a / (1.0 + a))), 1e-7)
    exact100 = 0.5 * (1.0 - math.sqrt(100.0 / 101.0))
    yield Check("asymptotic Rayleigh PEP at A=100", asymptotics.asym_pep([0.5], 100.0),
                0.0025, 1e-9)
    yield Check("asymptotic/exact Rayleigh PEP ratio at A=100",
                asymptotics.asym_pep([0.5], 100.0) / exact100, 0.0025 / exact100, 1e-6)

    gk = GeneralizedK(1.5, 2.0)
    yield Check("EGK form with unit shaping equals Generalized-K form",
                asymptotics.c_egk(BranchPair.iid(gk.to_egk())).value,
                asymptotics.c_gk(BranchPair.iid(gk)).value, 1e-7)
    heavy = BranchPair(GeneralizedK(1.5, 1.0931), GeneralizedK(2.5, 3.0, 2.0))
    yield Check("Generalized-K Meijer G path equals 2F1 path",
                asymptotics.c_gk_meijer(heavy)[0], asymptotics.c_gk(heavy).value, 1e-7)
    yield Check("Generalized-K with m_s=1e4 approaches Nakagami",
                asymptotics.c_gk(BranchPair.iid(GeneralizedK(1.5, 1e4))).value,
                asymptotics.c_nakagami(BranchPair.iid(Nakagami(1.5))).value, 1e-3)
    egk = BranchPair.iid(EgkLinkParams(1.5, 4.0, 2.0, 1.0))
    yield Check("coefficient quadrature equals EGK closed form",
                asymptotics.c_numeric(egk).value, asymptotics.c_egk(egk).value, 1e-5)

    cfg = SystemConfig(8, 1, SSK(), Nakagami(1.0))
    pt = SnrPoint.from_gamma_bar(1e4)
    yield Check("exact/asymptotic SSK bound ratio at gamma_bar=1e4",
                abep_ssk_bound(cfg, pt, Mode.EXACT) / abep_ssk_bound(cfg, pt, Mode.ASYMPTOTIC),
                1.0, 1e-4)
    spatial, joint = sm_multipliers(8, 4)
    yield Check("spatial multiplier for 8 antennas, QPSK", float(spatial), 2.4, 0.0)
    yield Check("joint multiplier for 8 antennas, QPSK", float(joint), 12.8, 0.0)

    cfg2 = SystemConfig(2, 1, SSK(), Nakagami(1.0))
    est = simulate_ber(cfg2, 10.0, StopRule(2000, 10 ** 6), seed=1)
    ref = pep_exact(ray, 1, SnrPoint(10.0).gamma_bar)
    yield Check("simulated 2x1 SSK BER against exact PEP (4 sigma)", est.ber, ref,
                4.0 * est.std_error, relative=False)


def selftest(perturb_prefactor=0.0, stream=None):
    """Run the fast identity suite; returns True when every check passes."""
    stream = stream or sys.stdout
    saved = asymptotics.PREFACTOR_SCALE
    asymptotics.PREFACTOR_SCALE = 1.0 + perturb_prefactor
    ok = True
    start = time.perf_counter()
    try:
        for check in _selftest_checks():
            print(check.line(), file=stream)
            ok &= check.passed
    except SmFadingError as exc:
        print(f"FAIL numeric error: {exc}", file=stream)
        ok = False
    finally:
        asymptotics.PREFACTOR_SCALE = saved
    print(f"{'all checks passed' if ok else 'self-test FAILED'} "
          f"in {time.perf_counter() - start:.1f} s", file=stream)
    return ok


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _snr_arg(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected start:stop:step")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _outputs_arg(text):
    return frozenset(p.strip() for p in text.split(",") if p.strip())


def _add_fading(p):
    g = p.add_argument_group("fading")
    g.add_argument("--family", choices=("nakagami", "gk", "egk"), default="nakagami")
    g.add_argument("--m", type=float, help="fading severity")
    g.add_argument("--beta", type=float, help="fading shaping factor (egk)")
    g.add_argument("--ms", type=float, help="shadowing severity (gk, egk)")
    g.add_argument("--betas", type=float, help="shadowing shaping factor (egk)")
    g.add_argument("--omega", type=float, default=1.0, help="mean power per link")


def _add_sweep(p):
    p.add_argument("--nt", type=int, required=True)
    p.add_argument("--nr", type=int, required=True)
    _add_fading(p)
    p.add_argument("--snr", type=_snr_arg, required=True, metavar="START:STOP:STEP",
                   help="Es/N0 grid in dB")
    p.add_argument("--outputs", type=_outputs_arg, default=frozenset({"asym", "exact"}),
                   help="comma-separated subset of asym,exact,sim")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV path (default: standard output)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--min-errors", type=int, default=200)
    p.add_argument("--max-bits", type=int, default=10 ** 8)


def build_parser():
    parser = _Parser(prog="smfading", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"smfading {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ssk = sub.add_parser("ssk", help="SSK bound / simulation sweep")
    _add_sweep(ssk)
    sm = sub.add_parser("sm", help="SM with M-PSK bound / simulation sweep")
    _add_sweep(sm)
    sm.add_argument("--M", type=int, default=4, help="PSK order")
    sm.add_argument("--kappa0", type=float, default=1.0, help="constellation modulus")
    sm.add_argument("--kappa-mode", choices=("squared", "linear"), default="squared",
                    help="how kappa0 scales the SNR")

    coeff = sub.add_parser("coeff", help="print the high-SNR coefficient by every method")
    _add_fading(coeff)

    st = sub.add_parser("selftest", help="fast identity checks")
    st.add_argument("--perturb-prefactor", type=float, default=0.0, help=argparse.SUPPRESS)
    return parser


def _fading(args):
    fam = args.family
    need = {"nakagami": ("m",), "gk": ("m", "ms"), "egk": ("m", "beta", "ms", "betas")}[fam]
    missing = [f"--{n}" for n in need if getattr(args, n) is None]
    if missing:
        raise UsageError(f"family {fam} needs {', '.join(missing)}")
    if fam == "nakagami":
        return Nakagami(args.m, args.omega)
    if fam == "gk":
        return GeneralizedK(args.m, args.ms, args.omega)
    return EgkLinkParams(args.m, args.beta, args.ms, args.betas, args.omega)


def _sweep_spec(args):
    fading = _fading(args)
    if args.command == "sm":
        modulation = SM(args.M, args.kappa0, args.kappa_mode)
    else:
        modulation = SSK()
    cfg = SystemConfig(args.nt, args.nr, modulation, fading)
    start, stop, step = args.snr
    return SweepSpec(cfg, start, stop, step, args.outputs, args.seed, args.out,
                     StopRule(args.min_errors, args.max_bits), max(1, args.jobs))


def _gk_meijer_coefficient(pair):
    value, err = asymptotics.c_gk_meijer(pair)
    return asymptotics.AsymptoticCoefficient(value, asymptotics.Method.GK_CLOSED_FORM,
                                             err / abs(value))


def _coeff(args, out):
    pair = BranchPair.iid(_fading(args))
    methods = [("numeric", asymptotics.c_numeric)]
    if args.family in ("egk", "gk"):
        methods.append(("egk", asymptotics.c_egk))
    if args.family == "gk":
        methods.append(("gk", asymptotics.c_gk))
        methods.append(("gk-meijer", _gk_meijer_coefficient))
    if args.family == "nakagami":
        methods.append(("nakagami", asymptotics.c_nakagami))
    failed = False
    for name, fn in methods:
        try:
            c = fn(pair)
            print(f"{name:10s} {c.value:.17g}  tol={c.achieved_tol:.2g}", file=out)
        except SmFadingError as exc:
            print(f"{name:10s} ERR  {exc}", file=out)
            failed = True
    return EXIT_NUMERIC if failed else EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "selftest":
            return EXIT_OK if selftest(args.perturb_prefactor) else EXIT_SELFTEST
        if args.command == "coeff":
            return _coeff(args, sys.stdout)
        spec = _sweep_spec(args)
    except (UsageError, ValueError) as exc:
        print(f"smfading {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        curve = run_sweep(spec, args.command)
    except SmFadingError as exc:
        print(f"smfading {args.command}: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if not spec.out_path:
        sys.stdout.write(format_csv(curve))
    return EXIT_NUMERIC if curve.has_errors() else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
