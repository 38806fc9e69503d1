from .elements import (FilterElement, SmootherElement, combine_filter, combine_smoother,
                       make_filter_elements, make_smoother_elements)
from .engine import ScanStats, associative_scan, depth_bound
from .parallel import FilterResult, SmootherResult, parallel_imkf, parallel_ims

__all__ = [
    "FilterElement", "SmootherElement", "combine_filter", "combine_smoother",
    "make_filter_elements", "make_smoother_elements", "ScanStats", "associative_scan",
    "depth_bound", "FilterResult", "SmootherResult", "parallel_imkf", "parallel_ims",
]
