"""Multivariate entropy statistics for categorical data.

Shannon entropies, N-dimensional transmission (co-information), the
Ashby/Krippendorff Q, excess entropy Y, mutual redundancy R and interaction
information, plus exact synthetic distributions and a brute-force oracle.
"""

__version__ = "0.1.0"

from .distribution import (
    Alphabet,
    JointDistribution,
    build_from_counts,
    entropy,
    from_records,
    marginal,
    max_entropy,
    slice_condition,
)
from .measures import (
    IpfResult,
    MeasureReport,
    conditional_entropy,
    conditional_transmission,
    excess_entropy,
    interaction_information,
    ipf_fit,
    measure_report,
    mutual_redundancy,
    q_measure,
    redundancy_fraction,
    subset_entropy,
    transmission2,
    transmission_n,
)
from .ingest import (
    CategoricalDataset,
    MeasureSeries,
    WindowSpec,
    measure_series,
    read_delimited,
    window_datasets,
    write_dataset,
)

__all__ = [
    "Alphabet",
    "CategoricalDataset",
    "IpfResult",
    "JointDistribution",
    "MeasureReport",
    "MeasureSeries",
    "WindowSpec",
    "build_from_counts",
    "conditional_entropy",
    "conditional_transmission",
    "entropy",
    "excess_entropy",
    "from_records",
    "interaction_information",
    "ipf_fit",
    "marginal",
    "max_entropy",
    "measure_report",
    "measure_series",
    "mutual_redundancy",
    "q_measure",
    "read_delimited",
    "redundancy_fraction",
    "slice_condition",
    "subset_entropy",
    "transmission2",
    "transmission_n",
    "window_datasets",
    "write_dataset",
]
