"""Run driver and artifact writer.

Takes a validated :class:`~shellcalc.config.RunConfig`, drives the
stability engine and the counterexample model, and writes CSV/JSON
reports plus rendered figures into the configured output directory.

Every JSON artifact embeds the fully resolved config and the tool
version.  CSV files cannot carry that payload, so ``summary.json`` is
written unconditionally and serves as the provenance record for
CSV-only runs.  Nothing written here depends on wall-clock time or
worker count: identical config and seed give byte-identical files.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import __version__
from .config import RunConfig, build_packet
from .counterexample import (
    DecayResult,
    GramResult,
    decay_amplitude,
    gram_matrix,
    indefiniteness_witness,
    single_field_family,
)
from .kinematics import Mass
from .stability import StabilityReport, run_stability

FIGURE_DPI = 120
# fixed metadata keeps library version strings and timestamps out of the PNGs
FIGURE_METADATA = {"Software": "shellcalc"}

CS_THRESHOLD = 4.0


def _fmt(x: float) -> str:
    """Shortest round-trip decimal form; '.' separator by construction."""
    return repr(float(x))


def _write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _save_figure(fig, path: Path) -> None:
    fig.savefig(path, dpi=FIGURE_DPI, metadata=FIGURE_METADATA)
    plt.close(fig)


# ---------------------------------------------------------------------------
# stability artifacts
# ---------------------------------------------------------------------------

STABILITY_CSV_HEADER = [
    "n",
    "pairing_re",
    "pairing_im",
    "kl_norm",
    "bound_integral",
    "cs_lhs",
    "cs_rhs",
]


def stability_csv_rows(report: StabilityReport) -> list[list[str]]:
    rows = []
    for row in report.rows:
        rows.append(
            [
                str(row.n),
                _fmt(row.pairing_value.real),
                _fmt(row.pairing_value.imag),
                _fmt(row.kl_norm),
                _fmt(row.bound_integral),
                _fmt(CS_THRESHOLD),
                _fmt(row.kl_norm),
            ]
        )
    return rows


def stability_payload(report: StabilityReport) -> dict:
    return {
        "rows": [
            {
                "n": row.n,
                "pairing_re": row.pairing_value.real,
                "pairing_im": row.pairing_value.imag,
                "kl_norm": row.kl_norm,
                "bound_integral": row.bound_integral,
                "cs_lhs": CS_THRESHOLD,
                "cs_rhs": row.kl_norm,
            }
            for row in report.rows
        ],
        "verdict": report.verdict,
        "reason": report.reason,
    }


def _stability_figures(report: StabilityReport, directory: Path) -> list[Path]:
    if not report.rows:
        return []
    ns = [row.n for row in report.rows]
    norms = [row.kl_norm for row in report.rows]
    bound = report.rows[0].bound_integral

    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    ax.loglog(ns, norms, "o-", label="spectral norm")
    ax.axhline(bound, color="tab:gray", linestyle="--", label="dominating integral")
    ax.axhline(CS_THRESHOLD, color="tab:red", linestyle=":", label="Cauchy-Schwarz threshold 4")
    ax.set_xlabel("regulator index n")
    ax.set_ylabel("spectral norm")
    ax.set_title("Collapse of the off-shell remainder")
    ax.legend()
    fig.tight_layout()
    collapse = directory / "stability_collapse.png"
    _save_figure(fig, collapse)

    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    ax.semilogx(ns, [row.pairing_value.real for row in report.rows], "o-", label="Re pairing")
    ax.axhline(2.0, color="tab:red", linestyle=":", label="lower bound 2")
    ax.set_xlabel("regulator index n")
    ax.set_ylabel("pairing")
    ax.set_ylim(bottom=0.0)
    ax.set_title("Regulated pairing across the ladder")
    ax.legend()
    fig.tight_layout()
    pairing = directory / "stability_pairing.png"
    _save_figure(fig, pairing)
    return [collapse, pairing]


def run_stability_part(config: RunConfig) -> StabilityReport:
    mass = Mass(config.current_mass)
    packet = build_packet(config.packets[0], mass)
    return run_stability(
        config.current(),
        packet.spatial,
        mass,
        config.spectral_measure(),
        config.n_ladder,
        onshell_tol=config.onshell_zero,
    )


# ---------------------------------------------------------------------------
# counterexample artifacts
# ---------------------------------------------------------------------------

GRAM_CSV_HEADER = ["family", "index", "eigenvalue"]
DECAY_CSV_HEADER = ["estimate_re", "estimate_im", "stderr", "samples", "seed", "significance"]


@dataclass(frozen=True)
class CounterexamplePart:
    witness: GramResult
    single_field: tuple[GramResult, ...]
    decay: DecayResult

    @property
    def witness_found(self) -> bool:
        return bool(self.witness.min_eigenvalue < 0.0)

    def significance(self) -> float:
        if self.decay.stderr == 0.0:
            return 0.0
        return float(abs(self.decay.estimate) / self.decay.stderr)


def run_counterexample_part(config: RunConfig, *, workers: int = 1) -> CounterexamplePart:
    params = config.model_params()
    witness = gram_matrix(indefiniteness_witness(params), params)
    singles = tuple(
        gram_matrix(single_field_family(params, field_index=i), params) for i in (1, 2)
    )
    packets = [build_packet(spec, params.mass_of(spec["field"])) for spec in config.packets]
    decay = decay_amplitude(
        packets[0],
        packets[1],
        packets[2],
        params,
        mc_samples=config.mc_samples,
        seed=config.mc_seed,
        workers=workers,
    )
    return CounterexamplePart(witness=witness, single_field=singles, decay=decay)


def gram_csv_rows(part: CounterexamplePart) -> list[list[str]]:
    rows = []
    for result in (part.witness, *part.single_field):
        for i, value in enumerate(result.eigenvalues):
            rows.append([result.family_fixture_id, str(i), _fmt(value)])
    return rows


def decay_csv_rows(part: CounterexamplePart) -> list[list[str]]:
    d = part.decay
    return [
        [
            _fmt(d.estimate.real),
            _fmt(d.estimate.imag),
            _fmt(d.stderr),
            str(d.samples),
            str(d.seed),
            _fmt(part.significance()),
        ]
    ]


def _counterexample_figures(part: CounterexamplePart, directory: Path, gram_neg: float) -> list[Path]:
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    offset = 0
    ticks, labels = [], []
    for result in (part.witness, *part.single_field):
        xs = np.arange(len(result.eigenvalues)) + offset
        ax.stem(xs, result.eigenvalues)
        ticks.append(offset + (len(result.eigenvalues) - 1) / 2.0)
        labels.append(result.family_fixture_id.replace("-", "‐"))
        offset += len(result.eigenvalues) + 1
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.axhline(
        -gram_neg * part.witness.norm,
        color="tab:red",
        linestyle=":",
        label="indefiniteness threshold",
    )
    ax.set_xticks(ticks)
    ax.set_xticklabels(labels, fontsize=7)
    ax.set_ylabel("Gram eigenvalue")
    ax.set_title("State-family Gram spectra")
    ax.legend()
    fig.tight_layout()
    gram_fig = directory / "gram_eigenvalues.png"
    _save_figure(fig, gram_fig)

    d = part.decay
    fig, ax = plt.subplots(figsize=(4.5, 4.0))
    ax.bar([0.0], [abs(d.estimate)], width=0.5, label="|amplitude|")
    ax.errorbar([0.0], [abs(d.estimate)], yerr=[d.stderr], fmt="none", ecolor="black", capsize=4)
    ax.axhline(5.0 * d.stderr, color="tab:red", linestyle=":", label="5 sigma")
    ax.set_xticks([])
    ax.set_ylabel("decay amplitude magnitude")
    ax.set_title("Monte-Carlo decay amplitude")
    ax.legend()
    fig.tight_layout()
    decay_fig = directory / "decay_significance.png"
    _save_figure(fig, decay_fig)
    return [gram_fig, decay_fig]


# ---------------------------------------------------------------------------
# whole-run orchestration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RunArtifacts:
    summary: dict
    paths: tuple[Path, ...]


def run(config: RunConfig, *, workers: int = 1) -> RunArtifacts:
    """Execute the configured computations and write every artifact.

    Returns the summary document; raises the underlying computation error
    (quadrature non-convergence, pole proximity, ...) if any part fails.
    """
    directory = Path(config.output_directory)
    directory.mkdir(parents=True, exist_ok=True)
    provenance = {"version": __version__, "config": config.to_document()}
    formats = config.output_formats
    paths: list[Path] = []

    stability_verdict = None
    witness_found = None
    decay_significant = None

    if config.mode in ("stability", "both"):
        report = run_stability_part(config)
        stability_verdict = report.verdict
        if "csv" in formats:
            path = directory / "stability.csv"
            _write_csv(path, STABILITY_CSV_HEADER, stability_csv_rows(report))
            paths.append(path)
        if "json" in formats:
            path = directory / "stability.json"
            _write_json(path, {**provenance, "report": stability_payload(report)})
            paths.append(path)
        paths.extend(_stability_figures(report, directory))

    if config.mode in ("counterexample", "both"):
        part = run_counterexample_part(config, workers=workers)
        witness_found = bool(
            part.witness.min_eigenvalue < -config.gram_neg * part.witness.norm
        )
        decay_significant = bool(abs(part.decay.estimate) > 5.0 * part.decay.stderr)
        if "csv" in formats:
            gram_path = directory / "gram.csv"
            _write_csv(gram_path, GRAM_CSV_HEADER, gram_csv_rows(part))
            decay_path = directory / "decay.csv"
            _write_csv(decay_path, DECAY_CSV_HEADER, decay_csv_rows(part))
            paths.extend([gram_path, decay_path])
        if "json" in formats:
            gram_path = directory / "gram.json"
            _write_json(
                gram_path,
                {
                    **provenance,
                    "witness": part.witness.to_record(),
                    "single_field": [r.to_record() for r in part.single_field],
                },
            )
            decay_path = directory / "decay.json"
            _write_json(
                decay_path,
                {
                    **provenance,
                    "decay": {**part.decay.to_record(), "significance": part.significance()},
                },
            )
            paths.extend([gram_path, decay_path])
        paths.extend(_counterexample_figures(part, directory, config.gram_neg))

    summary = {
        "stability_verdict": stability_verdict,
        "indefinite_witness_found": witness_found,
        "decay_amplitude_significant": decay_significant,
    }
    summary_path = directory / "summary.json"
    _write_json(summary_path, {**provenance, "summary": summary})
    paths.append(summary_path)
    return RunArtifacts(summary=summary, paths=tuple(paths))


# ---------------------------------------------------------------------------
# convergence report
# ---------------------------------------------------------------------------

CONVERGENCE_CSV_HEADER = ["series", "step", "value_re", "value_im", "error"]


def convergence_rows(config: RunConfig, *, workers: int = 1) -> list[dict]:
    """Per-rung convergence data for the modes the config requests.

    Stability rungs report the spectral norm and pairing per regulator
    index; decay rungs report the single-width shell estimates next to
    the extrapolated value, so the width dependence is visible.
    """
    rows: list[dict] = []
    if config.mode in ("stability", "both"):
        report = run_stability_part(config)
        for row in report.rows:
            rows.append(
                {
                    "series": "kl_norm",
                    "step": str(row.n),
                    "value_re": row.kl_norm,
                    "value_im": 0.0,
                    "error": 0.0,
                }
            )
            rows.append(
                {
                    "series": "pairing",
                    "step": str(row.n),
                    "value_re": row.pairing_value.real,
                    "value_im": row.pairing_value.imag,
                    "error": 0.0,
                }
            )
    if config.mode in ("counterexample", "both"):
        params = config.model_params()
        packets = [build_packet(spec, params.mass_of(spec["field"])) for spec in config.packets]
        ladder = (0.08, 0.04, 0.02)
        for sigma in ladder:
            result = decay_amplitude(
                packets[0],
                packets[1],
                packets[2],
                params,
                mc_samples=config.mc_samples,
                seed=config.mc_seed,
                sigma_shell_ladder=(sigma,),
                workers=workers,
            )
            rows.append(
                {
                    "series": "decay_shell_width",
                    "step": _fmt(sigma),
                    "value_re": result.estimate.real,
                    "value_im": result.estimate.imag,
                    "error": result.stderr,
                }
            )
        result = decay_amplitude(
            packets[0],
            packets[1],
            packets[2],
            params,
            mc_samples=config.mc_samples,
            seed=config.mc_seed,
            sigma_shell_ladder=ladder,
            workers=workers,
        )
        rows.append(
            {
                "series": "decay_extrapolated",
                "step": "0",
                "value_re": result.estimate.real,
                "value_im": result.estimate.imag,
                "error": result.stderr,
            }
        )
    return rows


def write_convergence_report(config: RunConfig, *, workers: int = 1) -> tuple[Path, ...]:
    directory = Path(config.output_directory)
    directory.mkdir(parents=True, exist_ok=True)
    rows = convergence_rows(config, workers=workers)
    paths: list[Path] = []
    if "csv" in config.output_formats:
        path = directory / "convergence.csv"
        _write_csv(
            path,
            CONVERGENCE_CSV_HEADER,
            [
                [r["series"], r["step"], _fmt(r["value_re"]), _fmt(r["value_im"]), _fmt(r["error"])]
                for r in rows
            ],
        )
        paths.append(path)
    if "json" in config.output_formats:
        path = directory / "convergence.json"
        _write_json(
            path,
            {
                "version": __version__,
                "config": config.to_document(),
                "rows": rows,
            },
        )
        paths.append(path)
    return tuple(paths)
