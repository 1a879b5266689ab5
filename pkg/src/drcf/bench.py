"""Benchmark harness: perturbations, evaluation metrics and the seeded
experiment runner producing ranked method comparison tables."""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

import numpy as np

from .core import CfRequest, Dataset, ExplanationSet, SolverOptions, project
from .datasets import gen_toy, load_csv
from .diverse import BaselineWeights, diverse_counterfactuals, model_agnostic_diverse
from .errors import InfeasibleError, InputError, SolverError
from .linear import fit_pca
from .neural import fit_autoencoder, fit_ptsne
from .som import fit_som

METHODS = ("algo1", "modelagnos")
PROJECTOR_KINDS = ("linear", "som", "ae", "ptsne")


@dataclass(frozen=True)
class PerturbationSpec:
    kind: str = "none"  # none | shift | gaussian
    n_features: int = 3
    shift_const: float = 2.0
    noise_std: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("none", "shift", "gaussian"):
            raise InputError(f"unknown perturbation kind {self.kind!r}")
        if not np.isfinite(self.shift_const) or not np.isfinite(self.noise_std):
            raise InputError("perturbation parameters must be finite")

    def to_json_dict(self):
        return {
            "kind": self.kind,
            "n_features": self.n_features,
            "shift_const": self.shift_const,
            "noise_std": self.noise_std,
            "seed": self.seed,
        }


def perturb(x, spec: PerturbationSpec, rng=None):
    """Apply the configured perturbation to ``spec.n_features`` distinct
    random features; returns (x', perturbed feature indices)."""
    if spec.kind == "none":
        raise InputError("perturb requires kind != 'none'")
    x = np.asarray(x, dtype=np.float64)
    if spec.n_features >= x.shape[0]:
        raise InputError("n_features must be smaller than d")
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    feats = np.sort(rng.choice(x.shape[0], size=spec.n_features, replace=False))
    x_out = x.copy()
    if spec.kind == "shift":
        x_out[feats] += spec.shift_const
    else:
        x_out[feats] += rng.normal(0.0, spec.noise_std, size=spec.n_features)
    return x_out, tuple(int(j) for j in feats)


def metric_cf_sparse(es: ExplanationSet) -> float:
    """Mean fraction of features changed per member."""
    d = es.request.x_orig.shape[0]
    if not es.members:
        return 0.0
    return float(np.mean([len(cf.changed_features) / d for cf in es.members]))


def metric_cf_dist(es: ExplanationSet) -> float:
    """Mean distance between the achieved and requested mappings."""
    if not es.members:
        return 0.0
    return float(np.mean([cf.map_error for cf in es.members]))


def metric_cf_div(es: ExplanationSet) -> float:
    """Total feature overlap, summed over unordered member pairs."""
    k = es.k
    return float(sum(es.pairwise_div[i, j] for i in range(k) for j in range(i + 1, k)))


def metric_cf_div_per_pair(es: ExplanationSet) -> float:
    """Mean overlap per member pair (0 when fewer than two members)."""
    n_pairs = es.k * (es.k - 1) // 2
    return metric_cf_div(es) / n_pairs if n_pairs else 0.0


def metric_recall(es: ExplanationSet, perturbed_features) -> float:
    """Fraction of perturbed features recovered among all changed features."""
    perturbed = set(perturbed_features)
    if not perturbed:
        return 0.0
    changed = set()
    for cf in es.members:
        changed.update(cf.changed_features)
    return len(changed & perturbed) / len(perturbed)


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str = "toy"  # "toy" or a CSV path
    label_column: str = ""  # required for CSV datasets
    method: str = "linear"
    k: int = 3
    repetitions: int = 10
    samples_per_rep: int = 25
    perturbation: PerturbationSpec = field(default_factory=PerturbationSpec)
    C: float = 100.0
    solver_opts: SolverOptions = field(default_factory=SolverOptions)
    baseline: BaselineWeights = field(default_factory=BaselineWeights)
    hyperparams: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.method not in PROJECTOR_KINDS:
            raise InputError(f"method must be one of {PROJECTOR_KINDS}")
        if self.repetitions < 1:
            raise InputError("repetitions must be >= 1")
        if self.k < 1:
            raise InputError("k must be >= 1")

    def to_json_dict(self):
        return {
            "dataset": self.dataset,
            "label_column": self.label_column,
            "method": self.method,
            "k": self.k,
            "repetitions": self.repetitions,
            "samples_per_rep": self.samples_per_rep,
            "perturbation": self.perturbation.to_json_dict(),
            "C": self.C,
            "solver_opts": self.solver_opts.to_json_dict(),
            "baseline": {"C1": self.baseline.C1, "C2": self.baseline.C2, "C3": self.baseline.C3},
            "hyperparams": dict(self.hyperparams),
            "seed": self.seed,
        }

    @staticmethod
    def from_json_dict(obj: dict) -> "ExperimentConfig":
        return ExperimentConfig(
            dataset=obj.get("dataset", "toy"),
            label_column=obj.get("label_column", ""),
            method=obj.get("method", "linear"),
            k=obj.get("k", 3),
            repetitions=obj.get("repetitions", 10),
            samples_per_rep=obj.get("samples_per_rep", 25),
            perturbation=PerturbationSpec(**obj.get("perturbation", {})),
            C=obj.get("C", 100.0),
            solver_opts=SolverOptions.from_json_dict(obj.get("solver_opts", {})),
            baseline=BaselineWeights(**obj.get("baseline", {})),
            hyperparams=obj.get("hyperparams", {}),
            seed=obj.get("seed", 0),
        )


def resolve_dataset(cfg: ExperimentConfig) -> Dataset:
    if cfg.dataset == "toy":
        return gen_toy(seed=cfg.seed)
    if not cfg.label_column:
        raise InputError("CSV datasets require label_column")
    return load_csv(cfg.dataset, cfg.label_column)


def fit_projector(dataset: Dataset, method: str, hyperparams: dict | None = None, seed: int = 0):
    """Fit the requested projector variant with desk-scale defaults."""
    hp = dict(hyperparams or {})
    X, m = dataset.X, dataset.m
    if method == "linear":
        return fit_pca(X, hp.get("d_out", 2))
    if method == "som":
        return fit_som(
            X,
            hp.get("H", 8),
            hp.get("W", 8),
            epochs=hp.get("epochs", 20),
            lr0=hp.get("lr0", 0.5),
            radius0=hp.get("radius0"),
            seed=seed,
        )
    if method == "ae":
        return fit_autoencoder(
            X,
            hp.get("d_out", 2),
            hidden=tuple(hp.get("hidden", (16,))),
            epochs=hp.get("epochs", 300),
            lr=hp.get("lr", 1e-2),
            seed=seed,
        )
    if method == "ptsne":
        perp = hp.get("perplexity", min(30.0, (m - 1) / 3.0))
        return fit_ptsne(
            X,
            hp.get("d_out", 2),
            hidden=tuple(hp.get("hidden", (32, 32))),
            perplexity=perp,
            epochs=hp.get("epochs", 250),
            lr=hp.get("lr", 0.05),
            seed=seed,
        )
    raise InputError(f"unknown method {method!r}")


def _different_label_indices(labels: np.ndarray, idx: int) -> np.ndarray:
    diff = np.abs(labels - labels[idx])
    if len(np.unique(labels)) > 10:  # regression-style integer targets
        thresh = labels.std()
    else:
        thresh = 0
    out = np.flatnonzero(diff > thresh)
    return out


@dataclass(frozen=True)
class ResultsTable:
    """Per-method aggregated metrics with the raw per-run records kept for
    round-trip verification."""

    config: ExperimentConfig
    records: tuple  # dicts: rep, sample, method, cf_sparse, cf_div, cf_dist, recall
    summary: dict  # method -> metric -> {"mean": float, "std": float}
    ranking: dict  # method -> {"wins": int, "out_of": int}

    def to_json_dict(self):
        return {
            "config": self.config.to_json_dict(),
            "records": list(self.records),
            "summary": self.summary,
            "ranking": self.ranking,
        }


_METRIC_ORDER = ("cf_sparse", "cf_div", "cf_dist", "recall")
_HIGHER_BETTER = {"recall"}
_LABELS = {"cf_sparse": "CfSparse", "cf_div": "CfDiv", "cf_dist": "CfDist", "recall": "Recall"}


def _aggregate(cfg: ExperimentConfig, records) -> ResultsTable:
    metrics = [m for m in _METRIC_ORDER if any(r.get(m) is not None for r in records)]
    summary = {}
    for method in METHODS:
        vals = {m: [r[m] for r in records if r["method"] == method and r.get(m) is not None] for m in metrics}
        summary[method] = {
            m: {"mean": float(np.mean(v)), "std": float(np.std(v))} for m, v in vals.items() if v
        }
    ranking = {method: {"wins": 0, "out_of": len(metrics)} for method in METHODS}
    for m in metrics:
        means = {method: summary[method][m]["mean"] for method in METHODS if m in summary[method]}
        if not means:
            continue
        best = max(means.values()) if m in _HIGHER_BETTER else min(means.values())
        for method, v in means.items():
            if abs(v - best) <= 1e-12:
                ranking[method]["wins"] += 1
    return ResultsTable(cfg, tuple(records), summary, ranking)


def run_experiment(cfg: ExperimentConfig) -> ResultsTable:
    """Reproduce the evaluation protocol: per repetition, per sample, build a
    target mapping, run both methods with k diverse counterfactuals, and
    aggregate all metrics with mean, std and per-method ranking counts."""
    dataset = resolve_dataset(cfg)
    projector = fit_projector(dataset, cfg.method, cfg.hyperparams, cfg.seed)
    rng = np.random.default_rng(cfg.seed)
    X, labels, m = dataset.X, dataset.labels, dataset.m
    n_eval = min(cfg.samples_per_rep, m)
    perturbed_mode = cfg.perturbation.kind != "none"

    records = []
    attempts = failures = 0
    for rep in range(cfg.repetitions):
        sample_idx = rng.choice(m, size=n_eval, replace=False)
        for idx in sample_idx:
            idx = int(idx)
            x = X[idx]
            perturbed_features = None
            if perturbed_mode:
                x_pert, perturbed_features = perturb(x, cfg.perturbation, rng)
                y_cf = project(projector, x_pert)
            else:
                pool = _different_label_indices(labels, idx)
                if pool.size == 0:
                    continue
                other = int(rng.choice(pool))
                y_cf = project(projector, X[other])
            req = CfRequest(x_orig=x, y_cf=y_cf, C=cfg.C, opts=cfg.solver_opts)

            attempts += 1
            try:
                es_algo1 = diverse_counterfactuals(req, cfg.k, projector)
            except (InfeasibleError, SolverError):
                failures += 1
                if failures > 0.5 * max(attempts, 10):
                    raise SolverError(
                        f"systematic solver failure: {failures}/{attempts} requests failed "
                        f"(method={cfg.method}, perturbation={cfg.perturbation.kind})"
                    )
                continue
            es_base = model_agnostic_diverse(req, cfg.k, dataset, cfg.baseline, projector)

            for method, es in (("algo1", es_algo1), ("modelagnos", es_base)):
                rec = {
                    "rep": rep,
                    "sample": idx,
                    "method": method,
                    "cf_sparse": metric_cf_sparse(es),
                    "cf_div": metric_cf_div_per_pair(es),
                    "cf_dist": metric_cf_dist(es),
                    "recall": metric_recall(es, perturbed_features) if perturbed_mode else None,
                }
                records.append(rec)
    if not records:
        raise SolverError("no successful runs")
    return _aggregate(cfg, records)


def render_report(rt: ResultsTable):
    """Render an aligned text table plus machine-readable JSON/CSV twins.

    Returns (text, json_dict, csv_text); deterministic ordering throughout.
    """
    metrics = [m for m in _METRIC_ORDER if any(m in rt.summary[meth] for meth in METHODS)]
    header = ["method"] + [_LABELS[m] for m in metrics] + ["ranking"]
    rows = []
    for method in METHODS:
        row = [method]
        for m in metrics:
            cell = rt.summary[method].get(m)
            row.append(f"{cell['mean']:.4f} +- {cell['std']:.4f}" if cell else "-")
        row.append(f"{rt.ranking[method]['wins']}/{rt.ranking[method]['out_of']}")
        rows.append(row)

    widths = [max(len(header[i]), *(len(r[i]) for r in rows)) for i in range(len(header))]
    lines = [
        "  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip(),
        "  ".join("-" * w for w in widths),
    ]
    for r in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
    text = "\n".join(lines) + "\n"

    buf = io.StringIO()
    buf.write(",".join(["method"] + [_LABELS[m] + "_mean" for m in metrics] + [_LABELS[m] + "_std" for m in metrics] + ["wins", "out_of"]) + "\n")
    for method in METHODS:
        cells = [method]
        cells += [f"{rt.summary[method][m]['mean']:.6f}" if m in rt.summary[method] else "" for m in metrics]
        cells += [f"{rt.summary[method][m]['std']:.6f}" if m in rt.summary[method] else "" for m in metrics]
        cells += [str(rt.ranking[method]["wins"]), str(rt.ranking[method]["out_of"])]
        buf.write(",".join(cells) + "\n")

    return text, rt.to_json_dict(), buf.getvalue()


def write_report(rt: ResultsTable, out_prefix: str):
    """Write <prefix>.txt, <prefix>.json and <prefix>.csv."""
    text, obj, csv_text = render_report(rt)
    with open(out_prefix + ".txt", "w") as fh:
        fh.write(text)
    with open(out_prefix + ".json", "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")
    with open(out_prefix + ".csv", "w") as fh:
        fh.write(csv_text)
