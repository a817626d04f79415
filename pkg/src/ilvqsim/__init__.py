"""Decentralised collaborative incremental learning at desk scale.

Building blocks: an incremental prototype learner (XuILVQ), two gossip
prototype-sharing protocols, a deterministic multi-node stream
simulator, the evaluation metrics, and a diffusion bound for how fast
shared knowledge can spread.
"""

from .prototypes import (
    DimensionMismatchError,
    Edge,
    Prototype,
    PrototypeGraph,
    Sample,
    UnknownPrototypeError,
    distance,
    neighbors,
)
from .xuilvq import LearnOutcome, XuIlvqModel, XuIlvqParams, compute_threshold
from .hybrid import GaussianNaiveBayes, HybridNodeModel, IncrementalClassifier
from .gossip import (
    Inbox,
    ShareConfig,
    drain_inbox,
    random_share_step,
    relative_threshold_step,
    update_perf,
    write_trace_csv,
)
from .metrics import (
    ConfusionCounts,
    comm_complexity,
    convergence_time,
    f1,
    prequential_f1,
    storage_complexity,
)
from .simnet import (
    AggregateResult,
    ConfigError,
    MessageRecord,
    NodeResult,
    RunResult,
    SimConfig,
    SweepRow,
    partition_for_config,
    partition_stream,
    read_sweep_csv,
    replicate,
    run_centralized,
    run_simulation,
    sweep_t,
    write_sweep_csv,
)
from .epidemic import SiParams, diffusion_check, si_closed_form, si_numeric
from .datasets import (
    CsvDatasetSpec,
    DatasetError,
    SyntheticDatasetSpec,
    load_csv,
    load_dataset,
    load_stand_in,
    stand_in_path,
    synth_dataset,
)
from .experiment import Experiment, experiment_from_dict, load_experiment
from .bench import BenchRow, read_bench_csv, run_bench, write_bench_csv

__version__ = "0.1.0"

__all__ = [
    "AggregateResult",
    "BenchRow",
    "ConfigError",
    "ConfusionCounts",
    "CsvDatasetSpec",
    "DatasetError",
    "DimensionMismatchError",
    "Edge",
    "Experiment",
    "GaussianNaiveBayes",
    "HybridNodeModel",
    "Inbox",
    "IncrementalClassifier",
    "LearnOutcome",
    "MessageRecord",
    "NodeResult",
    "Prototype",
    "PrototypeGraph",
    "RunResult",
    "Sample",
    "ShareConfig",
    "SiParams",
    "SimConfig",
    "SweepRow",
    "SyntheticDatasetSpec",
    "UnknownPrototypeError",
    "XuIlvqModel",
    "XuIlvqParams",
    "comm_complexity",
    "compute_threshold",
    "convergence_time",
    "diffusion_check",
    "distance",
    "drain_inbox",
    "experiment_from_dict",
    "f1",
    "load_csv",
    "load_dataset",
    "load_experiment",
    "load_stand_in",
    "neighbors",
    "partition_for_config",
    "partition_stream",
    "prequential_f1",
    "random_share_step",
    "read_bench_csv",
    "read_sweep_csv",
    "relative_threshold_step",
    "replicate",
    "run_bench",
    "run_centralized",
    "run_simulation",
    "si_closed_form",
    "si_numeric",
    "stand_in_path",
    "storage_complexity",
    "sweep_t",
    "synth_dataset",
    "update_perf",
    "write_bench_csv",
    "write_sweep_csv",
    "write_trace_csv",
]
