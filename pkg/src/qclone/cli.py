"""Command-line front end: one subcommand per experiment.

Every run is seeded and emits CSV tables, a summary (JSON and/or key-value
CSV per --format), PNG figures (unless --no-figures), and a manifest.json
recording the resolved configuration, output files, and wall-clock duration.
Re-running with the manifest's configuration reproduces the data files byte
for byte.

A plain key=value config file can supply any flag (--config); values given on
the command line win. Exit codes: 0 success, 2 usage error, 3 contract
violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, plots
from .cloning import (
    HomModel,
    clone_reduced_analytic,
    coalescence_enhancement,
    estimated_clone_distribution,
    estimation_fidelity,
    fidelity_from_counts,
    hom_dip_curve,
    optimal_clone_fidelity,
    simulate_coincidences,
)
from .errors import KeyTooShort, QcloneError
from .mubs import gaussian_state, mub_set, verify_mub
from .pgm import read_pgm, write_pgm
from .qcore import basis_ket, fidelity_state
from .qkd import (
    QkdConfig,
    digits_per_byte,
    image_to_dits,
    otp_decrypt,
    otp_encrypt,
    probability_matrix,
    run_bb84,
    security_bound_coh,
)
from .tomography import linear_inversion, project_to_physical, simulate_measurements

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONTRACT = 3

BOOL_FLAGS = {"figure2", "figure3a", "figure3b", "figure4", "figure_s1", "no_figures"}


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


class Reporter:
    """Collects output files for one run and writes the manifest."""

    def __init__(self, args: argparse.Namespace):
        self.outdir = Path(args.out_dir)
        self.outdir.mkdir(parents=True, exist_ok=True)
        self.args = args
        self.files: list[str] = []
        self.figures = not args.no_figures
        self._t0 = time.perf_counter()

    def path(self, name: str) -> Path:
        self.files.append(name)
        return self.outdir / name

    def table(self, name: str, header, rows) -> None:
        write_csv(self.path(name), header, rows)

    def summary(self, stem: str, payload: dict) -> None:
        fmt = self.args.format
        if fmt in ("json", "both"):
            _write_atomic(
                self.path(f"{stem}.json"),
                json.dumps(payload, indent=2, sort_keys=True) + "\n",
            )
        if fmt in ("csv", "both"):
            self.table(
                f"{stem}.csv", ["key", "value"], sorted(payload.items())
            )

    def manifest(self, status: str) -> None:
        config = {
            k: (str(v) if isinstance(v, Path) else v)
            for k, v in vars(self.args).items()
            if k not in ("func", "command")
        }
        payload = {
            "command": self.args.command,
            "config": config,
            "version": __version__,
            "files": self.files,
            "duration_seconds": time.perf_counter() - self._t0,
            "status": status,
        }
        _write_atomic(
            self.outdir / "manifest.json",
            json.dumps(payload, indent=2, sort_keys=True) + "\n",
        )


def _events_int(text: str) -> int:
    """Accept plain or scientific notation for counts ('100000', '1e5')."""
    value = float(text)
    if value < 1 or value != int(value):
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(value)


def _dims_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad dimension list {text!r}") from None


def _cell_seed(seed: int, *key: int) -> np.random.SeedSequence:
    """Deterministic per-cell seed stream derived from the run seed."""
    return np.random.SeedSequence(entropy=seed, spawn_key=tuple(key))


# ---------------------------------------------------------------- clone-fidelity


def cmd_clone_fidelity(args, rep: Reporter):
    dims = args.dims if args.dims else ([2, 3, 4, 5, 6, 7] if args.figure2 else [7])
    events = args.events if args.events else 100_000
    hom = HomModel(args.visibility, args.coherence_width, args.delay)
    summary_rows = []
    per_d_mean = {}
    matrices = []
    for d in dims:
        basis = [basis_ket(d, i) for i in range(d)]
        sim = np.zeros((d, d))
        ana = np.zeros((d, d))
        fids = []
        for idx in range(d):
            rec = simulate_coincidences(
                basis[idx], basis, events, seed=_cell_seed(args.seed, d, idx), hom=hom
            )
            sim[:, idx] = estimated_clone_distribution(rec, idx)
            ana[:, idx] = np.diagonal(clone_reduced_analytic(basis[idx])).real
            fids.append(fidelity_from_counts(rec, idx))
            summary_rows.append(
                (d, idx, fids[-1], optimal_clone_fidelity(d), estimation_fidelity(d))
            )
        rep.table(
            f"clone_matrix_d{d}.csv",
            ["d", "input_state", "detected_state", "p_simulated", "p_analytic"],
            [
                (d, j, i, sim[i, j], ana[i, j])
                for j in range(d)
                for i in range(d)
            ],
        )
        per_d_mean[d] = float(np.mean(fids))
        matrices.append(sim)
    rep.table(
        "clone_fidelity_summary.csv",
        ["d", "input_state", "fidelity_simulated", "fidelity_clone_analytic",
         "fidelity_estimation_analytic"],
        summary_rows,
    )
    rep.summary(
        "clone_fidelity_run",
        {
            "events_per_state": events,
            "seed": args.seed,
            "visibility": hom.visibility,
            **{
                f"mean_fidelity_d{d}": per_d_mean[d]
                for d in dims
            },
            **{f"analytic_fidelity_d{d}": optimal_clone_fidelity(d) for d in dims},
        },
    )
    if rep.figures:
        plots.clone_fidelity_figure(
            rep.path("clone_fidelity.png"),
            dims,
            [per_d_mean[d] for d in dims],
            [optimal_clone_fidelity(d) for d in dims],
            [estimation_fidelity(d) for d in dims],
        )
        plots.matrix_grid_figure(
            rep.path("clone_matrices.png"),
            matrices,
            [f"d = {d}" for d in dims],
        )


# --------------------------------------------------------------------------- mub


def cmd_mub(args, rep: Reporter):
    d = args.dim if args.dim else 7
    events = args.events if args.events else 100_000
    ms = mub_set(d)
    report = verify_mub(ms, tol=args.tol)
    matrices = []
    diag_means = {}
    for alpha in range(1, d + 2):
        basis = ms.basis_kets(alpha)
        sim = np.zeros((d, d))
        ana = np.zeros((d, d))
        for n in range(d):
            rec = simulate_coincidences(
                basis[n], basis, events, seed=_cell_seed(args.seed, alpha, n)
            )
            sim[:, n] = estimated_clone_distribution(rec, n)
            red = clone_reduced_analytic(basis[n])
            bmat = np.array([k.amps for k in basis])
            ana[:, n] = np.einsum("ij,jk,ik->i", bmat.conj(), red, bmat).real
        rep.table(
            f"mub_matrix_alpha{alpha}.csv",
            ["alpha", "input_state", "detected_state", "p_simulated", "p_analytic"],
            [
                (alpha, n + 1, i + 1, sim[i, n], ana[i, n])
                for n in range(d)
                for i in range(d)
            ],
        )
        matrices.append(sim)
        diag_means[alpha] = float(np.diagonal(sim).mean())
    rep.summary(
        "mub_summary",
        {
            "dim": d,
            "events_per_state": events,
            "seed": args.seed,
            "analytic_fidelity": optimal_clone_fidelity(d),
            "verify_orthonormality_deviation": report.max_orthonormality_deviation,
            "verify_unbiasedness_deviation": report.max_unbiasedness_deviation,
            "verify_tol": report.tol,
            "verify_passed": report.passed,
            **{f"mean_diagonal_alpha{a}": diag_means[a] for a in diag_means},
        },
    )
    if rep.figures:
        plots.matrix_grid_figure(
            rep.path("mub_matrices.png"),
            matrices,
            [f"basis {a}" for a in range(1, d + 2)],
            suptitle=f"cloning probability matrices, d={d}",
        )


def cmd_mub_table(args, rep: Reporter):
    d = args.dim if args.dim else 7
    ms = mub_set(d)
    rows = []
    for alpha in range(1, ms.n_bases + 1):
        for n in range(1, d + 1):
            amps = ms.bases[alpha - 1, n - 1]
            for j in range(1, d + 1):
                rows.append((alpha, n, j, amps[j - 1].real, amps[j - 1].imag))
    rep.table("mub_table.csv", ["alpha", "n", "j", "re", "im"], rows)
    report = verify_mub(ms, tol=args.tol)
    rep.summary(
        "mub_table_summary",
        {
            "dim": d,
            "seed": args.seed,
            "n_bases": ms.n_bases,
            "verify_orthonormality_deviation": report.max_orthonormality_deviation,
            "verify_unbiasedness_deviation": report.max_unbiasedness_deviation,
            "verify_passed": report.passed,
        },
    )


# -------------------------------------------------------------------- tomography


def _density_rows(rho: np.ndarray):
    d = rho.shape[0]
    return [
        (r, c, rho[r, c].real, rho[r, c].imag) for r in range(d) for c in range(d)
    ]


def cmd_tomography(args, rep: Reporter):
    shots = args.shots if args.shots else 1_000_000
    g = gaussian_state()
    ms = mub_set(7)
    input_rho = g.density()
    clone_rho = clone_reduced_analytic(g)

    counts_before = simulate_measurements(input_rho, ms, shots, seed=args.seed)
    before = project_to_physical(linear_inversion(counts_before, ms))
    counts_after = simulate_measurements(clone_rho, ms, shots, seed=args.seed + 1)
    after = project_to_physical(linear_inversion(counts_after, ms))

    rep.table("tomography_before.csv", ["row", "col", "re", "im"], _density_rows(before))
    rep.table("tomography_after.csv", ["row", "col", "re", "im"], _density_rows(after))
    rep.summary(
        "tomography_summary",
        {
            "shots_per_basis": shots,
            "seed": args.seed,
            "before_fidelity_to_input": fidelity_state(before, input_rho),
            "after_fidelity_to_analytic_clone": fidelity_state(after, clone_rho),
            "after_fidelity_to_input": fidelity_state(after, input_rho),
            "analytic_clone_fidelity": optimal_clone_fidelity(7),
        },
    )
    if rep.figures:
        plots.tomography_figure(
            rep.path("tomography.png"),
            [
                ("input (reconstructed)", before),
                ("input (expected)", input_rho),
                ("clone (reconstructed)", after),
                ("clone (expected)", clone_rho),
            ],
        )


# --------------------------------------------------------------------------- hom


def cmd_hom(args, rep: Reporter):
    visibility = args.visibility if args.visibility is not None else (
        0.89 if args.figure_s1 else 1.0
    )
    hom = HomModel(visibility, args.coherence_width, 0.0)
    delays = np.linspace(args.delay_min, args.delay_max, args.delay_steps)
    dip = hom_dip_curve(hom, delays, args.base_rate)
    enhancement = np.column_stack(
        [
            delays,
            [
                coalescence_enhancement(
                    HomModel(visibility, args.coherence_width, float(t))
                )
                for t in delays
            ],
        ]
    )
    rep.table(
        "hom_curves.csv",
        ["delay", "coincidence_rate", "enhancement"],
        [
            (dip[k, 0], dip[k, 1], enhancement[k, 1])
            for k in range(len(delays))
        ],
    )
    rep.summary(
        "hom_summary",
        {
            "seed": args.seed,
            "visibility": visibility,
            "coherence_width": args.coherence_width,
            "base_rate": args.base_rate,
            "dip_minimum_fraction": 1.0 - visibility,
            "enhancement_peak": 1.0 + visibility,
        },
    )
    if rep.figures:
        plots.hom_figure(rep.path("hom.png"), dip, enhancement, visibility)


# --------------------------------------------------------------------------- qkd


def _cipher_image(symbols: np.ndarray, shape, d: int) -> np.ndarray:
    """Visualize a dit stream as a greyscale image, one pixel per dit."""
    k = digits_per_byte(d)
    scale = 255 // (d - 1)
    return (symbols.reshape(shape[0], shape[1] * k) * scale).astype(np.uint8)


def dits_to_image_lossy(msg) -> bytes:
    """Decode dits to bytes, clamping groups that decode above 255.

    Decryption with a noisy key can produce digit groups outside the byte
    range; clamping keeps the corrupted image renderable, which is the point
    of the demonstration.
    """
    d = msg.base
    k = digits_per_byte(d)
    groups = np.asarray(msg.symbols).reshape(-1, k)
    vals = np.zeros(len(groups), dtype=np.int64)
    for pos in range(k):
        vals = vals * d + groups[:, pos]
    return np.clip(vals, 0, 255).astype(np.uint8).tobytes()


def cmd_qkd(args, rep: Reporter):
    d = args.dim if args.dim else 7
    rounds = args.rounds if args.rounds else 100_000
    if not args.image:
        raise QcloneError("qkd requires --image pointing to an 8-bit P5 PGM")
    image = read_pgm(args.image)
    message = image_to_dits(image.tobytes(), d)

    results = {}
    matrix_rows = []
    decrypted_images = {}
    for label, eve in (("eve_off", False), ("eve_on", True)):
        cfg = QkdConfig(
            dim=d,
            n_rounds=rounds,
            eve_present=eve,
            channel_error_rate=args.error_rate,
            seed=args.seed,
        )
        t = run_bb84(cfg)
        key_alice = t.sifted_key_alice
        key_bob = t.sifted_key_bob
        if key_alice.size < message.symbols.size:
            raise KeyTooShort(
                f"sifted key ({key_alice.size} dits) shorter than message "
                f"({message.symbols.size} dits); increase --rounds or shrink the image"
            )
        cipher = otp_encrypt(message, key_alice)
        bob_plain = otp_decrypt(cipher, key_bob)
        bob_img = np.frombuffer(
            dits_to_image_lossy(bob_plain), dtype=np.uint8
        ).reshape(image.shape)
        write_pgm(rep.path(f"qkd_encrypted_{label}.pgm"),
                  _cipher_image(cipher.symbols, image.shape, d))
        write_pgm(rep.path(f"qkd_decrypted_bob_{label}.pgm"), bob_img)
        decrypted_images[label] = bob_img
        if eve:
            eve_plain = otp_decrypt(cipher, t.sifted_key_eve)
            eve_img = np.frombuffer(
                dits_to_image_lossy(eve_plain), dtype=np.uint8
            ).reshape(image.shape)
            write_pgm(rep.path("qkd_decrypted_eve.pgm"), eve_img)
            decrypted_images["eve"] = eve_img
        for ba in (0, 1):
            for bb in (0, 1):
                sim = probability_matrix(cfg, (ba, bb), "simulated", t)
                ana = probability_matrix(cfg, (ba, bb), "analytic")
                matrix_rows.extend(
                    (label, ba, bb, a, b, sim[b, a], ana[b, a])
                    for a in range(d)
                    for b in range(d)
                )
        results[label] = t
    rep.table(
        "qkd_matrices.csv",
        ["run", "alice_basis", "bob_basis", "alice_symbol", "bob_symbol",
         "p_simulated", "p_analytic"],
        matrix_rows,
    )
    try:
        bound = security_bound_coh(d)
    except QcloneError:
        bound = None
    rep.summary(
        "qkd_summary",
        {
            "dim": d,
            "rounds": rounds,
            "seed": args.seed,
            "channel_error_rate": args.error_rate,
            "qber_eve_off": results["eve_off"].qber,
            "qber_eve_on": results["eve_on"].qber,
            "mutual_information_bits_eve_off": results["eve_off"].mutual_information_ab,
            "mutual_information_bits_eve_on": results["eve_on"].mutual_information_ab,
            "sifted_length_eve_off": int(results["eve_off"].sifted.sum()),
            "sifted_length_eve_on": int(results["eve_on"].sifted.sum()),
            "security_bound": bound,
            "secure_eve_off": (
                None if bound is None else bool(results["eve_off"].qber < bound)
            ),
            "secure_eve_on": (
                None if bound is None else bool(results["eve_on"].qber < bound)
            ),
        },
    )
    if rep.figures:
        for label in ("eve_off", "eve_on"):
            t = results[label]
            cfg = QkdConfig(dim=d, n_rounds=rounds, eve_present=(label == "eve_on"),
                            channel_error_rate=args.error_rate, seed=args.seed)
            plots.matrix_grid_figure(
                rep.path(f"qkd_matrices_{label}.png"),
                [
                    probability_matrix(cfg, (ba, bb), "simulated", t)
                    for ba in (0, 1)
                    for bb in (0, 1)
                ],
                [f"bases A={ba} B={bb}" for ba in (0, 1) for bb in (0, 1)],
                suptitle=f"d={d}, {label}",
                vmax=1.0,
            )
        panels = [("original", image),
                  ("Bob, no attack", decrypted_images["eve_off"]),
                  ("Bob, attack", decrypted_images["eve_on"]),
                  ("Eve, attack", decrypted_images["eve"])]
        plots.image_panels_figure(rep.path("qkd_images.png"), panels)


# ------------------------------------------------------------------ parser/main


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None,
                        help="run seed (required; config file may supply it)")
    parser.add_argument("--out-dir", default="qclone_out", help="output directory")
    parser.add_argument("--format", choices=("csv", "json", "both"), default="both",
                        help="summary emission format (tables are always CSV)")
    parser.add_argument("--config", default=None,
                        help="key=value file supplying any flag; CLI overrides")
    parser.add_argument("--no-figures", action="store_true",
                        help="skip PNG rendering")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qclone",
        description="Optimal qudit-cloning experiments: simulation and reports.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("clone-fidelity",
                       help="cloning fidelities per dimension, computational basis")
    _add_common(p)
    p.add_argument("--dims", type=_dims_list, default=None,
                   help="comma-separated dimensions (default 7, or 2..7 with --figure2)")
    p.add_argument("--events", type=_events_int, default=None,
                   help="coincidence events per input state (default 1e5)")
    p.add_argument("--visibility", type=float, default=1.0)
    p.add_argument("--coherence-width", type=float, default=1.0)
    p.add_argument("--delay", type=float, default=0.0)
    p.add_argument("--figure2", action="store_true",
                   help="preset: dims 2..7, 1e5 events")
    p.set_defaults(func=cmd_clone_fidelity)

    p = sub.add_parser("mub", help="clone every element of every basis (prime d)")
    _add_common(p)
    p.add_argument("--dim", type=int, default=None, help="prime dimension (default 7)")
    p.add_argument("--events", type=_events_int, default=None)
    p.add_argument("--tol", type=float, default=1e-10,
                   help="verification tolerance")
    p.add_argument("--figure3a", action="store_true",
                   help="preset: d=7, 1e5 events")
    p.set_defaults(func=cmd_mub)

    p = sub.add_parser("mub-table", help="emit basis amplitudes as CSV")
    _add_common(p)
    p.add_argument("--dim", type=int, default=None, help="prime dimension (default 7)")
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_mub_table)

    p = sub.add_parser("tomography",
                       help="reconstruct the smooth seven-level state and its clone")
    _add_common(p)
    p.add_argument("--shots", type=_events_int, default=None,
                   help="shots per basis (default 1e6)")
    p.add_argument("--figure3b", action="store_true", help="preset: 1e6 shots")
    p.set_defaults(func=cmd_tomography)

    p = sub.add_parser("hom", help="interference dip and coalescence curves")
    _add_common(p)
    p.add_argument("--visibility", type=float, default=None,
                   help="interference visibility (default 1.0; 0.89 with --figureS1)")
    p.add_argument("--coherence-width", type=float, default=1.0)
    p.add_argument("--delay-min", type=float, default=-3.0)
    p.add_argument("--delay-max", type=float, default=3.0)
    p.add_argument("--delay-steps", type=int, default=61)
    p.add_argument("--base-rate", type=float, default=1000.0)
    p.add_argument("--figureS1", dest="figure_s1", action="store_true",
                   help="preset: visibility 0.89")
    p.set_defaults(func=cmd_hom)

    p = sub.add_parser("qkd",
                       help="two-basis key distribution with and without the attack")
    _add_common(p)
    p.add_argument("--dim", type=int, default=None, help="default 7")
    p.add_argument("--rounds", type=_events_int, default=None, help="default 1e5")
    p.add_argument("--error-rate", type=float, default=0.0,
                   help="channel depolarization probability")
    p.add_argument("--image", default=None, help="8-bit P5 PGM to encrypt")
    p.add_argument("--figure4", action="store_true",
                   help="preset: d=7, 1e5 rounds, noiseless channel")
    p.set_defaults(func=cmd_qkd)

    return parser


def _parse_config_file(path: str) -> list[str]:
    """Turn key=value lines into argv tokens (inserted before user flags)."""
    tokens: list[str] = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise QcloneError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        flag = "--" + key.replace("_", "-")
        if key in BOOL_FLAGS:
            if value.lower() in ("1", "true", "yes", "on"):
                tokens.append("--figureS1" if key == "figure_s1" else flag)
            elif value.lower() not in ("0", "false", "no", "off"):
                raise QcloneError(f"{path}:{lineno}: bad boolean {value!r}")
        else:
            tokens.extend([flag, value])
    return tokens


def _apply_config_file(argv: list[str]) -> list[str]:
    config_path = None
    for k, tok in enumerate(argv):
        if tok == "--config" and k + 1 < len(argv):
            config_path = argv[k + 1]
        elif tok.startswith("--config="):
            config_path = tok.split("=", 1)[1]
    if config_path is None:
        return argv
    tokens = _parse_config_file(config_path)
    # insert after the subcommand so explicit flags override file values
    return argv[:1] + tokens + argv[1:]


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config_file(argv)
    except (OSError, QcloneError) as exc:
        print(f"qclone: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    args = parser.parse_args(argv)
    if args.seed is None:
        print("qclone: --seed is required (flag or config file)", file=sys.stderr)
        return EXIT_USAGE
    rep = Reporter(args)
    try:
        args.func(args, rep)
    except QcloneError as exc:
        rep.manifest(status="incomplete")
        print(f"qclone: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    rep.manifest(status="complete")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
