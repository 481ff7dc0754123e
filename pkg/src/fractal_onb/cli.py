"""Command-line front end: config ingestion, dispatch, CSV/JSON/SVG emission.

Commands
--------
check-pair   spectrum / Hadamard-pair test for (R, B, L)
find-cycles  extreme cycles of (B, L) up to a period horizon
gen-basis    generate a basis (fractal or Walsh), Gram-check it, dump tables
walsh        dump the step-function value grid for a unitary matrix
transform    expand a signal of length N**n in the Walsh basis and back

Configs are TOML or JSON files holding either an IFS spec (``R``, ``B``,
optional ``L``) or a matrix spec (``matrix = {"N": n, "rows": [[[re, im],
...], ...]}``).  Exit codes: 0 pass, 1 usage or config error, 2 mathematical
check failure.  Given the same config and seed, re-runs emit byte-identical
files (floats are printed with 17 significant digits).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .basis_builder import gen_fractal_onb, gen_walsh_basis
from .cuntz_ops import verify_cuntz, walsh_rep
from .cycle_finder import find_extreme_cycles
from .errors import FractalONBError, LengthMismatch, NotASpectrum
from .filters import UnitaryMatrix, is_hadamard_pair, is_spectrum
from .ifs_measure import AffineIFS1D, attractor_grid, load_system_config
from .verifier import gram_matrix, parseval_curve

CSV_VERSION = "# fractal-onb v1"


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _fmt_word(word) -> str:
    return ";".join(_fmt(l) for l in word)


def write_csv(path: Path, header: str, rows) -> None:
    lines = [CSV_VERSION, header]
    lines += [",".join(str(c) for c in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def write_json(path: Path | None, obj) -> str:
    text = json.dumps(obj, indent=2, sort_keys=True)
    if path is not None:
        path.write_text(text + "\n")
    return text


def _svg_document(path_d: str, zero_y: float, title: str,
                  width: int = 400, height: int = 200, margin: int = 10) -> str:
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">\n'
        f'  <title>{title}</title>\n'
        f'  <line x1="{margin}" y1="{zero_y:.2f}" x2="{width - margin}" y2="{zero_y:.2f}" '
        f'stroke="#999" stroke-width="0.5"/>\n'
        f'  <path d="{path_d}" fill="none" stroke="#1f4e9c" stroke-width="1.5"/>\n'
        f'</svg>\n'
    )


def _scales(vals: np.ndarray, width=400, height=200, margin=10):
    lo = min(float(vals.min()), 0.0)
    hi = max(float(vals.max()), 0.0)
    span = hi - lo if hi > lo else 1.0

    def sx(t):
        return margin + t * (width - 2 * margin)

    def sy(v):
        return height - margin - (v - lo) / span * (height - 2 * margin)

    return sx, sy


def write_step_svg(path: Path, values, title: str = "") -> None:
    """Minimal hand-rolled step plot of the real part of a value table."""
    vals = np.real(np.asarray(values))
    sx, sy = _scales(vals)
    n = vals.size
    parts = [f"M {sx(0):.2f} {sy(vals[0]):.2f}"]
    for k in range(n):
        parts.append(f"H {sx((k + 1) / n):.2f}")
        if k + 1 < n:
            parts.append(f"V {sy(vals[k + 1]):.2f}")
    path.write_text(_svg_document(" ".join(parts), sy(0.0), title))


def write_curve_svg(path: Path, xs, ys, title: str = "") -> None:
    """Polyline plot of sampled values (x positions normalized to [0, 1])."""
    xs = np.asarray(xs, dtype=float)
    ys = np.real(np.asarray(ys))
    t = (xs - xs.min()) / max(xs.max() - xs.min(), 1e-300)
    sx, sy = _scales(ys)
    parts = [f"M {sx(t[0]):.2f} {sy(ys[0]):.2f}"]
    parts += [f"L {sx(u):.2f} {sy(v):.2f}" for u, v in zip(t[1:], ys[1:])]
    path.write_text(_svg_document(" ".join(parts), sy(0.0), title))


@dataclass
class RunConfig:
    """Parsed config plus command parameters."""

    ifs: AffineIFS1D | None = None
    L: list[float] | None = None
    matrix: UnitaryMatrix | None = None
    max_len: int = 4
    p_max: int = 12
    tol: float = 1e-9
    seed: int = 0
    probes: list[float] = field(default_factory=list)
    out_dir: Path = Path(".")
    fmt: str = "csv"

    def require_pair(self) -> tuple[AffineIFS1D, list[float]]:
        if self.ifs is None or self.L is None:
            raise ValueError("this command needs an IFS config with keys R, B, L")
        return self.ifs, self.L

    def require_matrix(self) -> UnitaryMatrix:
        if self.matrix is None:
            raise ValueError("this command needs a matrix config")
        return self.matrix


def load_run_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    raw = load_system_config(args.config)
    has_ifs = "R" in raw or "B" in raw
    has_matrix = "matrix" in raw
    if has_ifs == has_matrix:
        raise ValueError("config must hold exactly one of an IFS spec (R, B) "
                         "or a matrix spec")
    if has_ifs:
        cfg.ifs = AffineIFS1D(raw["R"], raw["B"])
        cfg.L = [float(v) for v in raw["L"]] if "L" in raw else None
    else:
        cfg.matrix = UnitaryMatrix.from_json(raw["matrix"])
    cfg.max_len = args.max_len
    cfg.p_max = args.p_max
    cfg.tol = args.tol
    cfg.seed = args.seed
    if args.probes:
        cfg.probes = [float(v) for v in args.probes.split(",")]
    cfg.out_dir = Path(args.out)
    cfg.fmt = args.format
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    return cfg


# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------

def cmd_check_pair(cfg: RunConfig) -> int:
    ifs, L = cfg.require_pair()
    check = is_spectrum(ifs.digits, ifs.R, L)
    report = check.to_dict()
    report["R"] = ifs.R
    report["B"] = list(ifs.digits)
    report["L"] = list(L)
    integral = all(float(v).is_integer() for v in (*ifs.digits, *L, ifs.R))
    if integral:
        report["hadamard_pair"] = is_hadamard_pair(ifs.digits, L, int(ifs.R))
    print(write_json(cfg.out_dir / "pair_check.json", report))
    return 0 if check.passed else 2


def cmd_find_cycles(cfg: RunConfig) -> int:
    ifs, L = cfg.require_pair()
    cycles = find_extreme_cycles(ifs.digits, L, ifs.R, p_max=cfg.p_max, tol=cfg.tol)
    report = {
        "cycles": [c.to_dict() for c in cycles],
        "complete_up_to_period": cfg.p_max,
        "tol": cfg.tol,
    }
    print(write_json(cfg.out_dir / "cycles.json", report))
    return 0


def _emit_fractal_basis(cfg: RunConfig) -> int:
    ifs, L = cfg.require_pair()
    cycles = find_extreme_cycles(ifs.digits, L, ifs.R, p_max=cfg.p_max, tol=cfg.tol)
    elements = gen_fractal_onb(ifs, L, cycles, cfg.max_len)
    rows = []
    for idx, el in enumerate(elements):
        for rank in range(el.coeffs.size):
            digits = np.base_repr(rank, ifs.N).zfill(el.depth) if el.depth else ""
            rows.append((idx, _fmt_word(el.word), _fmt(el.cycle_point), digits,
                         _fmt(el.coeffs[rank].real), _fmt(el.coeffs[rank].imag),
                         _fmt(el.freqs[rank])))
    write_csv(cfg.out_dir / "basis_elements.csv",
              "element,word,cycle,cylinder,coeff_re,coeff_im,frequency", rows)
    gram = gram_matrix(ifs, elements)
    report = gram.to_dict()
    report["elements"] = len(elements)
    report["max_len"] = cfg.max_len
    if cfg.probes:
        report["parseval"] = {
            _fmt(t): [[k, v] for k, v in parseval_curve(ifs, elements, t)]
            for t in cfg.probes
        }
    if cfg.fmt == "svg":
        grid = attractor_grid(ifs, 256)
        digit_rows = np.stack([ifs.digit_expansion(float(z)) for z in grid]).astype(np.uint8)
        for idx, el in enumerate(elements[:16]):
            ys = el.eval_on_digits(grid, digit_rows)
            write_curve_svg(cfg.out_dir / f"element_{idx:03d}.svg", grid, ys,
                            title=f"element {idx} word {el.word}")
    print(write_json(cfg.out_dir / "gram_report.json", report))
    return 0 if gram.passed else 2


def _emit_walsh_basis(cfg: RunConfig) -> int:
    A = cfg.require_matrix()
    elements = gen_walsh_basis(A, cfg.max_len)
    depth = cfg.max_len
    tables = np.stack([el.refine(depth) for el in elements])
    rows = []
    for idx, el in enumerate(elements):
        word = ";".join(str(i) for i in el.word)
        for k in range(tables.shape[1]):
            rows.append((idx, word, k,
                         _fmt(tables[idx, k].real), _fmt(tables[idx, k].imag)))
    write_csv(cfg.out_dir / "walsh_values.csv",
              "element,word,cell,value_re,value_im", rows)
    G = tables @ tables.conj().T / tables.shape[1]
    dev = float(np.max(np.abs(G - np.eye(len(elements)))))
    rep = walsh_rep(A)
    cuntz = verify_cuntz(rep, elements[:min(len(elements), 5)], tol=1e-10)
    report = {
        "elements": len(elements),
        "max_len": cfg.max_len,
        "grid_gram_deviation": dev,
        "pass": dev <= 1e-10,
        "cuntz": cuntz.to_dict(),
    }
    if cfg.fmt == "svg":
        for idx, el in enumerate(elements):
            write_step_svg(cfg.out_dir / f"walsh_{idx:03d}.svg", el.refine(depth),
                           title=f"word {el.word}")
    print(write_json(cfg.out_dir / "gram_report.json", report))
    return 0 if report["pass"] else 2


def cmd_gen_and_verify(cfg: RunConfig) -> int:
    if cfg.matrix is not None:
        return _emit_walsh_basis(cfg)
    return _emit_fractal_basis(cfg)


def cmd_walsh(cfg: RunConfig) -> int:
    A = cfg.require_matrix()
    elements = gen_walsh_basis(A, cfg.max_len)
    depth = cfg.max_len
    rows = []
    for idx, el in enumerate(elements):
        word = ";".join(str(i) for i in el.word)
        vals = el.refine(depth)
        for k, v in enumerate(vals):
            rows.append((idx, word, k, _fmt(v.real), _fmt(v.imag)))
    write_csv(cfg.out_dir / "walsh_grid.csv",
              "element,word,cell,value_re,value_im", rows)
    if cfg.fmt == "svg":
        for idx, el in enumerate(elements):
            write_step_svg(cfg.out_dir / f"walsh_{idx:03d}.svg", el.refine(depth),
                           title=f"word {el.word}")
    print(f"wrote {len(elements)} step functions on the {A.N ** depth}-cell grid")
    return 0


def _read_signal(path: Path) -> np.ndarray:
    values = []
    for line in path.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        cell = line.split(",")[-1]
        try:
            values.append(float(cell))
        except ValueError:
            continue  # header line
    return np.asarray(values, dtype=float)


def cmd_transform(cfg: RunConfig, signal_path: Path) -> int:
    A = cfg.require_matrix()
    signal = _read_signal(signal_path)
    n = cfg.max_len
    expected = A.N ** n
    if signal.size != expected:
        raise LengthMismatch(
            f"signal has {signal.size} samples, need N**n = {expected}")
    elements = gen_walsh_basis(A, n)
    tables = np.stack([el.refine(n) for el in elements])
    coeffs = tables.conj() @ signal / expected
    recon = coeffs @ tables
    err = float(np.max(np.abs(recon - signal)))
    rows = [(idx, ";".join(str(i) for i in el.word),
             _fmt(c.real), _fmt(c.imag))
            for idx, (el, c) in enumerate(zip(elements, coeffs))]
    write_csv(cfg.out_dir / "coefficients.csv", "element,word,coeff_re,coeff_im", rows)
    write_csv(cfg.out_dir / "reconstruction.csv", "index,signal,recon_re,recon_im",
              [(k, _fmt(signal[k]), _fmt(recon[k].real), _fmt(recon[k].imag))
               for k in range(expected)])
    report = {"n": n, "N": A.N, "roundtrip_error": err, "pass": err <= 1e-10}
    print(write_json(cfg.out_dir / "transform_report.json", report))
    return 0 if err <= 1e-10 else 2


# ----------------------------------------------------------------------
# entry point
# ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fractal-onb",
        description="Orthonormal bases on self-similar measures: generation "
                    "and numerical verification.")
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "check-pair": "test whether L is a spectrum for the scaled digit set",
        "find-cycles": "enumerate extreme cycles of (B, L)",
        "gen-basis": "generate a basis, Gram-check it, and dump tables",
        "walsh": "dump the Walsh step-function value grid",
        "transform": "analyze a signal in the Walsh basis and reconstruct it",
    }
    for name, help_text in specs.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="TOML or JSON config file")
        p.add_argument("--max-len", type=int, default=4, dest="max_len",
                       help="operator word length horizon")
        p.add_argument("--p-max", type=int, default=12, dest="p_max",
                       help="cycle period horizon")
        p.add_argument("--tol", type=float, default=1e-9,
                       help="tolerance for cycle extremity")
        p.add_argument("--seed", type=int, default=0, help="random seed")
        p.add_argument("--probes", default="",
                       help="comma-separated probe frequencies for Parseval mass")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--format", choices=("csv", "json", "svg"), default="csv",
                       help="extra artifact format (svg adds plots)")
        if name == "transform":
            p.add_argument("signal", help="CSV file with the input signal")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_run_config(args)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        if args.command == "check-pair":
            return cmd_check_pair(cfg)
        if args.command == "find-cycles":
            return cmd_find_cycles(cfg)
        if args.command == "gen-basis":
            return cmd_gen_and_verify(cfg)
        if args.command == "walsh":
            return cmd_walsh(cfg)
        if args.command == "transform":
            return cmd_transform(cfg, Path(args.signal))
    except LengthMismatch as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    except NotASpectrum as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 2
    except FractalONBError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
