"""Experiment files: JSON descriptions of a full simulation study.

An experiment file mirrors the simulation config plus a dataset spec and
optional sweep grid.  Files are validated against the JSON schema
shipped in ``ilvqsim/schema/experiment.schema.json`` before anything
runs, so every malformed config fails fast with a schema error.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

import jsonschema

from .datasets import CsvDatasetSpec, SyntheticDatasetSpec
from .gossip import ShareConfig
from .simnet import ConfigError, SimConfig
from .xuilvq import XuIlvqParams

__all__ = ["Experiment", "load_experiment", "experiment_from_dict", "schema"]

_SCHEMA_CACHE: dict | None = None


def schema() -> dict:
    """The experiment-file JSON schema shipped with the package."""
    global _SCHEMA_CACHE
    if _SCHEMA_CACHE is None:
        text = (
            resources.files("ilvqsim")
            .joinpath("schema", "experiment.schema.json")
            .read_text()
        )
        _SCHEMA_CACHE = json.loads(text)
    return _SCHEMA_CACHE


@dataclass(frozen=True)
class Experiment:
    """A validated experiment: simulation config plus dataset source."""

    sim: SimConfig
    dataset_spec: CsvDatasetSpec | SyntheticDatasetSpec | None
    t_values: tuple[float, ...] | None = None
    out_dir: str | None = None

    def with_overrides(
        self,
        seed: int | None = None,
        replications: int | None = None,
    ) -> "Experiment":
        sim = self.sim
        if seed is not None:
            sim = replace(sim, seed=seed)
        if replications is not None:
            sim = replace(sim, replications=replications)
        return replace(self, sim=sim)


def experiment_from_dict(payload: dict, base_dir: Path | None = None) -> Experiment:
    """Build an Experiment from a parsed JSON document.

    Raises:
        ConfigError: on schema violations or inconsistent values.
    """
    try:
        jsonschema.validate(payload, schema())
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"experiment file rejected by schema: {exc.message}") from exc

    share_payload = payload.get("share")
    share = (
        ShareConfig(
            share_prob=float(share_payload["t"]), fanout=int(share_payload["s"])
        )
        if share_payload is not None
        else None
    )
    learner_payload = payload.get("learner", {})
    try:
        learner = XuIlvqParams(
            age_old=learner_payload.get("age_old", 400),
            denoise_period=learner_payload.get("lambda", 600),
            k=learner_payload.get("k", 3),
            winner_rate=learner_payload.get("eta1"),
            neighbor_rate=learner_payload.get("eta2"),
        )
        sim = SimConfig(
            n_nodes=payload["n_nodes"],
            partition_sizes=tuple(payload["partition_sizes"]),
            protocol=payload.get("protocol", "none"),
            share=share,
            mode=payload.get("mode", "fully-ilvq"),
            learner_params=learner,
            perf_window=payload.get("perf_window", 50),
            seed=payload.get("seed", 0),
            replications=payload.get("replications", 1),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    dataset_payload = payload["dataset"]
    dataset_spec: CsvDatasetSpec | SyntheticDatasetSpec | None
    if dataset_payload["source"] == "csv":
        csv_path = Path(dataset_payload["path"])
        if base_dir is not None and not csv_path.is_absolute():
            csv_path = base_dir / csv_path
        columns = dataset_payload.get("feature_columns")
        dataset_spec = CsvDatasetSpec(
            path=str(csv_path),
            label_column=dataset_payload.get("label_column", "label"),
            feature_columns=tuple(columns) if columns else None,
        )
    elif dataset_payload["source"] == "synthetic":
        try:
            dataset_spec = SyntheticDatasetSpec(
                n_features=dataset_payload.get("n_features", 10),
                n_classes=dataset_payload.get("n_classes", 2),
                n_samples=dataset_payload.get("n_samples", 1250),
                separation=dataset_payload.get("separation", 3.0),
                seed=dataset_payload.get("seed", 0),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    else:  # bundled stand-in
        dataset_spec = None

    t_values = payload.get("t_values")
    return Experiment(
        sim=sim,
        dataset_spec=dataset_spec,
        t_values=tuple(float(t) for t in t_values) if t_values else None,
        out_dir=payload.get("out_dir"),
    )


def load_experiment(path) -> Experiment:
    """Load, schema-validate, and materialize an experiment file."""
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except FileNotFoundError:
        raise
    except json.JSONDecodeError as exc:
        raise ConfigError(f"experiment file is not valid JSON: {exc}") from exc
    return experiment_from_dict(payload, base_dir=path.parent)
