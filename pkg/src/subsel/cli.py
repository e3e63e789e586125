"""Command-line entry point.

Subcommands wire the interchange files to the library operations:

    similarity        embeddings -> cosine similarity cache
    utility           scores -> scores with the combined utility column
    pairwise-utility  token-probability records -> per-pair utility values
    select            similarity/scores -> a budgeted selection file
    certify           randomized instances -> approximation-ratio report
    report            results file -> comparison table

Option precedence is flag > config file > built-in default; the config file
holds one `key=value` per line. Every command with a file output also writes
`<out>.manifest` recording the command line, the effective option values,
and SHA-256 digests of the files it consumed.

Exit codes: 0 success, 1 usage or input error, 2 numeric failure.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import shlex
import sys
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .baselines import RandomConfig, dpp_greedy_select, random_select
from .evaluation import format_comparison, load_results
from .formats import (
    FormatError,
    fmt_float,
    load_embeddings,
    load_scores,
    load_token_probs,
    write_scores,
    write_selection,
)
from .greedy import GreedyConfig, greedy_maximize, utility_diversity_select
from .model import EmbeddingMatrix, ScoreTable, ValidationError
from .oracle import SUBSET_GUARD, certify, certify_utility_diversity, report_line
from .scoring import (
    DISTANCE_MODES,
    LENGTH_NORMALIZED_EUCLIDEAN,
    UtilityParams,
    combined_utility,
    utility_for_record,
)
from .similarity import (
    CLIP_AT_ZERO,
    RAW,
    SHIFT_TO_UNIT,
    KernelTransform,
    apply_transform,
    cosine_similarity_matrix,
    load_similarity,
    write_similarity,
)
from .submodular import (
    FACILITY_LOCATION,
    LOG_DETERMINANT,
    VARIANTS,
    NotPositiveDefiniteError,
    SubmodularSpec,
)

__all__ = ["main", "entrypoint"]

METHODS = ("random", "dpp", "submodular", "utility-diversity")
GREEDY_MODES = ("naive", "lazy")
CERTIFY_KINDS = VARIANTS + ("utility-diversity",)
CERTIFY_DIM = 8

_TRANSFORM_ALIASES = {
    "raw": RAW,
    "clip": CLIP_AT_ZERO,
    "clip-at-zero": CLIP_AT_ZERO,
    "shift": SHIFT_TO_UNIT,
    "shift-to-unit": SHIFT_TO_UNIT,
}


class UsageError(ValueError):
    """Bad flag/config combination; maps to exit code 1."""


@dataclass(frozen=True)
class _Opt:
    flag: str
    conv: Callable
    default: object = None
    help: str = ""

    @property
    def key(self) -> str:
        return self.flag.lstrip("-")

    @property
    def dest(self) -> str:
        return self.key.replace("-", "_")


_COMMON = [_Opt("--config", str, help="key=value config file; flags override it")]

_OPTIONS: dict[str, list[_Opt]] = {
    "similarity": _COMMON
    + [
        _Opt("--embeddings", str, help="input embedding file"),
        _Opt("--transform", str, "raw", help="kernel transform: raw, clip, shift"),
        _Opt("--out", str, help="output similarity cache file"),
    ],
    "utility": _COMMON
    + [
        _Opt("--scores", str, help="input score file"),
        _Opt("--alpha", float, 0.5, help="weight of normalized perplexity in [0, 1]"),
        _Opt("--out", str, help="output score file with the utility column"),
    ],
    "pairwise-utility": _COMMON
    + [
        _Opt("--pairprobs", str, help="input token-probability file"),
        _Opt("--distance-mode", str, LENGTH_NORMALIZED_EUCLIDEAN, help=f"one of {DISTANCE_MODES}"),
        _Opt("--out", str, help="output per-pair utility file"),
    ],
    "select": _COMMON
    + [
        _Opt("--method", str, help=f"one of {METHODS}"),
        _Opt("--budget", int, help="number of examples to select"),
        _Opt("--out", str, help="output selection file"),
        _Opt("--similarity", str, help="similarity cache (dpp, submodular, utility-diversity)"),
        _Opt("--scores", str, help="score file with utility column (utility-diversity)"),
        _Opt("--n", int, help="ground-set size (random)"),
        _Opt("--seed", int, 0, help="random seed (random)"),
        _Opt("--variant", str, FACILITY_LOCATION, help=f"submodular variant: one of {VARIANTS}"),
        _Opt("--eta", float, 1.0, help="target-affinity weight (mutual-information)"),
        _Opt("--nu", float, 1.0, help="existing-set discount (conditional-gain)"),
        _Opt("--cut-penalty", float, 0.5, help="internal-similarity penalty (graph-cut)"),
        _Opt("--ridge", float, help="diagonal ridge for determinant kernels (default 1e-6)"),
        _Opt("--lambda", float, 0.5, help="utility/diversity trade-off (utility-diversity)"),
        _Opt("--mode", str, "lazy", help="greedy mode: naive or lazy"),
        _Opt("--transform", str, help="kernel transform; defaults: clip for submodular, raw otherwise"),
        _Opt("--target-ids", str, "", help="comma-separated target ids (mutual-information)"),
        _Opt("--existing-ids", str, "", help="comma-separated existing ids (conditional-gain)"),
    ],
    "certify": _COMMON
    + [
        _Opt("--variant", str, FACILITY_LOCATION, help=f"one of {CERTIFY_KINDS}"),
        _Opt("--n", int, 10, help="ground-set size per instance"),
        _Opt("--k", int, 3, help="budget per instance"),
        _Opt("--trials", int, 200, help="number of randomized instances"),
        _Opt("--seed", int, 0, help="seed for instance generation"),
        _Opt("--ridge", float, help="determinant ridge (default 1.0: keeps gains non-negative)"),
        _Opt("--out", str, help="optional report file (stdout is always written)"),
    ],
    "report": _COMMON
    + [
        _Opt("--results", str, help="input results file"),
        _Opt("--out", str, help="optional output file for the table"),
    ],
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subsel", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"subsel {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)
    for command, opts in _OPTIONS.items():
        sp = subs.add_parser(command)
        for opt in opts:
            sp.add_argument(opt.flag, dest=opt.dest, type=opt.conv, default=None, help=opt.help)
    return parser


def _load_config(path: str) -> dict[str, str]:
    config: dict[str, str] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                text = raw.strip()
                if not text or text.startswith("#"):
                    continue
                key, sep, value = text.partition("=")
                if not sep or not key.strip() or not value.strip():
                    raise UsageError(f"{path}:{lineno}: config lines read key=value")
                config[key.strip().replace("_", "-")] = value.strip()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}")
    return config


def _merge(args: argparse.Namespace, opts: Sequence[_Opt]) -> dict[str, object]:
    config: dict[str, str] = {}
    if getattr(args, "config", None):
        config = _load_config(args.config)
    merged: dict[str, object] = {}
    for opt in opts:
        value = getattr(args, opt.dest)
        if value is None and opt.key in config:
            try:
                value = opt.conv(config[opt.key])
            except ValueError:
                raise UsageError(f"config value for {opt.key} is not a valid {opt.conv.__name__}")
        if value is None:
            value = opt.default
        merged[opt.dest] = value
    return merged


def _require(merged: dict, dest: str, flag: str):
    value = merged.get(dest)
    if value is None:
        raise UsageError(f"missing required option {flag}")
    return value


def _transform_mode(name: str) -> KernelTransform:
    mode = _TRANSFORM_ALIASES.get(name)
    if mode is None:
        raise UsageError(f"unknown transform {name!r}, expected one of {sorted(set(_TRANSFORM_ALIASES))}")
    return KernelTransform(mode)


def _parse_id_list(text: str, what: str) -> frozenset[int]:
    if not text:
        return frozenset()
    try:
        return frozenset(int(tok) for tok in text.split(",") if tok.strip() != "")
    except ValueError:
        raise UsageError(f"{what} must be comma-separated integers, got {text!r}")


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _manifest_value(value: object) -> str:
    if isinstance(value, float):
        return fmt_float(value)
    return str(value)


def write_manifest(out_path: str, argv: Sequence[str], merged: dict[str, object], inputs: Sequence[str]) -> str:
    """Write `<out>.manifest` next to the command's primary output."""
    manifest_path = f"{out_path}.manifest"
    with open(manifest_path, "w", encoding="utf-8") as fh:
        fh.write(f"RUNMANIFEST {__version__}\n")
        fh.write(f"command subsel {shlex.join(argv)}\n")
        for key in sorted(merged):
            value = merged[key]
            if value is None or value == "":
                continue
            fh.write(f"param {key.replace('_', '-')} {_manifest_value(value)}\n")
        for path in inputs:
            fh.write(f"input {_sha256(path)} {path}\n")
    return manifest_path


def parse_manifest(path: str) -> dict[str, object]:
    """Inverse of write_manifest, for verification tooling."""
    out = {"params": {}, "inputs": [], "command": "", "version": ""}
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            text = raw.rstrip("\n")
            if text.startswith("RUNMANIFEST "):
                out["version"] = text.split(" ", 1)[1]
            elif text.startswith("command "):
                out["command"] = text.split(" ", 1)[1]
            elif text.startswith("param "):
                _, key, value = text.split(" ", 2)
                out["params"][key] = value
            elif text.startswith("input "):
                _, digest, file_path = text.split(" ", 2)
                out["inputs"].append((digest, file_path))
    return out


# -- commands ----------------------------------------------------------------


def _cmd_similarity(merged: dict, argv: Sequence[str]) -> int:
    emb_path = _require(merged, "embeddings", "--embeddings")
    out = _require(merged, "out", "--out")
    transform = _transform_mode(merged["transform"])
    merged["transform"] = transform.mode
    sim = apply_transform(cosine_similarity_matrix(load_embeddings(emb_path)), transform)
    write_similarity(sim, out)
    write_manifest(out, argv, merged, [emb_path])
    return 0


def _cmd_utility(merged: dict, argv: Sequence[str]) -> int:
    scores_path = _require(merged, "scores", "--scores")
    out = _require(merged, "out", "--out")
    alpha = merged["alpha"]
    if not (0.0 <= alpha <= 1.0):
        raise UsageError(f"--alpha must lie in [0, 1], got {alpha}")
    table = combined_utility(load_scores(scores_path), UtilityParams(alpha=alpha))
    write_scores(table, out)
    write_manifest(out, argv, merged, [scores_path])
    return 0


def _cmd_pairwise_utility(merged: dict, argv: Sequence[str]) -> int:
    probs_path = _require(merged, "pairprobs", "--pairprobs")
    out = _require(merged, "out", "--out")
    mode = merged["distance_mode"]
    if mode not in DISTANCE_MODES:
        raise UsageError(f"--distance-mode must be one of {DISTANCE_MODES}, got {mode!r}")
    params = UtilityParams(distance_mode=mode)
    records = load_token_probs(probs_path)
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(f"PAIRUTIL {len(records)} {mode}\n")
        for rec in records:
            fh.write(f"{rec.i} {rec.j} {fmt_float(utility_for_record(rec, params))}\n")
    write_manifest(out, argv, merged, [probs_path])
    return 0


def _select_similarity(merged: dict, default_transform: str) -> tuple:
    sim_path = _require(merged, "similarity", "--similarity")
    transform_name = merged["transform"] or default_transform
    transform = _transform_mode(transform_name)
    merged["transform"] = transform.mode
    return sim_path, apply_transform(load_similarity(sim_path), transform)


def _cmd_select(merged: dict, argv: Sequence[str]) -> int:
    method = _require(merged, "method", "--method")
    if method not in METHODS:
        raise UsageError(f"--method must be one of {METHODS}, got {method!r}")
    budget = _require(merged, "budget", "--budget")
    out = _require(merged, "out", "--out")
    inputs: list[str] = []
    if method == "random":
        n = _require(merged, "n", "--n")
        result = random_select(n, RandomConfig(seed=merged["seed"], budget=budget))
    elif method == "dpp":
        ridge = merged["ridge"] if merged["ridge"] is not None else 1e-6
        merged["ridge"] = ridge
        sim_path, sim = _select_similarity(merged, "raw")
        inputs.append(sim_path)
        result = dpp_greedy_select(sim, budget, ridge=ridge)
    elif method == "submodular":
        variant = merged["variant"]
        if variant not in VARIANTS:
            raise UsageError(f"--variant must be one of {VARIANTS}, got {variant!r}")
        if merged["mode"] not in GREEDY_MODES:
            raise UsageError(f"--mode must be one of {GREEDY_MODES}, got {merged['mode']!r}")
        ridge = merged["ridge"] if merged["ridge"] is not None else 1e-6
        merged["ridge"] = ridge
        sim_path, sim = _select_similarity(merged, "clip")
        inputs.append(sim_path)
        spec = SubmodularSpec(
            variant=variant,
            S=sim,
            target_ids=_parse_id_list(merged["target_ids"], "--target-ids"),
            existing_ids=_parse_id_list(merged["existing_ids"], "--existing-ids"),
            eta=merged["eta"],
            nu=merged["nu"],
            cut_penalty=merged["cut_penalty"],
            ridge=ridge,
        )
        result = greedy_maximize(spec, GreedyConfig(budget=budget, mode=merged["mode"]))
    else:
        lam = merged["lambda"]
        if not (0.0 <= lam <= 1.0):
            raise UsageError(f"--lambda must lie in [0, 1], got {lam}")
        scores_path = _require(merged, "scores", "--scores")
        table = load_scores(scores_path)
        if table.utility is None:
            raise UsageError(f"{scores_path} has no utility column; run `subsel utility` first")
        sim_path, sim = _select_similarity(merged, "raw")
        inputs.extend([scores_path, sim_path])
        result = utility_diversity_select(table, sim, GreedyConfig(budget=budget, lam=lam))
    write_selection(result, out)
    write_manifest(out, argv, merged, inputs)
    return 0


def _certify_instance(rng: np.random.Generator, n: int, kind: str) -> np.ndarray:
    emb = rng.normal(size=(n, CERTIFY_DIM))
    if kind == LOG_DETERMINANT:
        # strictly positive coordinates keep the cosine kernel PSD after the
        # (then inert) clip, so the ridged log-det stays monotone
        emb = np.abs(emb) + 1e-3
    return emb


def _cmd_certify(merged: dict, argv: Sequence[str]) -> int:
    kind = merged["variant"]
    if kind not in CERTIFY_KINDS:
        raise UsageError(f"--variant must be one of {CERTIFY_KINDS}, got {kind!r}")
    n, k, trials = merged["n"], merged["k"], merged["trials"]
    if k > n:
        raise UsageError(f"--k {k} exceeds --n {n}")
    if math.comb(n, k) > SUBSET_GUARD:
        raise UsageError(f"C({n}, {k}) exceeds the enumeration guard of {SUBSET_GUARD}")
    ridge = merged["ridge"] if merged["ridge"] is not None else 1.0
    merged["ridge"] = ridge
    rng = np.random.default_rng(merged["seed"])
    clip = KernelTransform(CLIP_AT_ZERO)
    lines: list[str] = []
    satisfied_count = 0
    for trial in range(trials):
        emb = EmbeddingMatrix(_certify_instance(rng, n, kind))
        sim = apply_transform(cosine_similarity_matrix(emb), clip)
        if kind == "utility-diversity":
            utilities = rng.uniform(0.0, 1.0, size=n)
            table = ScoreTable(np.full(n, 1.0), np.zeros(n), utilities)
            lam = float(rng.uniform(0.0, 1.0))
            report = certify_utility_diversity(table, sim, lam, k)
        else:
            spec = SubmodularSpec(
                variant=kind,
                S=sim,
                target_ids=frozenset(int(i) for i in rng.choice(n, size=min(3, n), replace=False)),
                existing_ids=frozenset(int(i) for i in rng.choice(n, size=min(2, n), replace=False)),
                eta=float(rng.uniform(0.0, 2.0)),
                nu=float(rng.uniform(0.0, 1.0)),
                cut_penalty=float(rng.uniform(0.0, 0.5)),  # monotone regime
                ridge=ridge,
            )
            report = certify(spec, k)
        satisfied_count += int(report.satisfied)
        lines.append(report_line(kind, report, extra=f"trial={trial} n={n} k={k}"))
    summary = f"CERTIFY {kind} trials={trials} satisfied={satisfied_count}/{trials}"
    for line in lines:
        print(line)
    print(summary)
    if merged["out"]:
        with open(merged["out"], "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines + [summary]) + "\n")
        write_manifest(merged["out"], argv, merged, [])
    if kind == "utility-diversity":
        return 0  # ratio is reported, not asserted
    return 0 if satisfied_count == trials else 1


def _cmd_report(merged: dict, argv: Sequence[str]) -> int:
    results_path = _require(merged, "results", "--results")
    table = format_comparison(load_results(results_path))
    print(table, end="")
    if merged["out"]:
        with open(merged["out"], "w", encoding="utf-8") as fh:
            fh.write(table)
        write_manifest(merged["out"], argv, merged, [results_path])
    return 0


_COMMANDS = {
    "similarity": _cmd_similarity,
    "utility": _cmd_utility,
    "pairwise-utility": _cmd_pairwise_utility,
    "select": _cmd_select,
    "certify": _cmd_certify,
    "report": _cmd_report,
}


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; keep 2 reserved for numeric failures
        code = exc.code or 0
        return 1 if code else 0
    try:
        merged = _merge(args, _OPTIONS[args.command])
        return _COMMANDS[args.command](merged, argv)
    except NotPositiveDefiniteError as exc:
        print(f"subsel: numeric failure: {exc}", file=sys.stderr)
        return 2
    except (UsageError, FormatError, ValidationError, ValueError, OSError) as exc:
        print(f"subsel: error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    raise SystemExit(main())
