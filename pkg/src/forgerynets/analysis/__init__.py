from . import separability
from .separability import feature_dump_to_df, pooled_features, probe_matrix
