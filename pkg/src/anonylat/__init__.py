"""anonylat: k-anonymisation algorithms, loss metrics and ML utility evaluation."""

from .anonymizers import (
    ANONYMISERS,
    AlgoParams,
    EquivalenceClass,
    Partition,
    cb_anonymise,
    generalised_table_from_partition,
    mondrian_anonymise,
    ola_anonymise,
    ola_search,
    tdg_anonymise,
    verify_k_anonymity,
)
from .hierarchy import (
    GeneralisationHierarchy,
    GeneralisedValue,
    build_interval_hierarchy,
    parse_hierarchy_file,
)
from .metrics import (
    LossValue,
    MetricKind,
    metric_aecs,
    metric_dm,
    metric_gweight,
    metric_prec,
    ncp_class,
    ncp_merge,
)
from .mlbridge import (
    EvalReport,
    encode_for_ml,
    evaluate,
    homogeneity_histogram,
    knn_classify,
    spearman_rank_correlation,
    zero_rule_predict,
)
from .tabular import (
    AttributeSchema,
    SplitSpec,
    Table,
    load_csv,
    merge_target_values,
    split_train_test,
)

__version__ = "0.1.0"

__all__ = [
    "ANONYMISERS",
    "AlgoParams",
    "AttributeSchema",
    "EquivalenceClass",
    "EvalReport",
    "GeneralisationHierarchy",
    "GeneralisedValue",
    "LossValue",
    "MetricKind",
    "Partition",
    "SplitSpec",
    "Table",
    "build_interval_hierarchy",
    "cb_anonymise",
    "encode_for_ml",
    "evaluate",
    "generalised_table_from_partition",
    "homogeneity_histogram",
    "knn_classify",
    "load_csv",
    "merge_target_values",
    "metric_aecs",
    "metric_dm",
    "metric_gweight",
    "metric_prec",
    "mondrian_anonymise",
    "ncp_class",
    "ncp_merge",
    "ola_anonymise",
    "ola_search",
    "parse_hierarchy_file",
    "spearman_rank_correlation",
    "split_train_test",
    "tdg_anonymise",
    "verify_k_anonymity",
    "zero_rule_predict",
]
