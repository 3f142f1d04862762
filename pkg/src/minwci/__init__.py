"""Minimal 3-folds from weighted blow-ups of weighted complete intersections."""
from .pipeline import MinimalModelReport, verify
from .search import SearchConfig, generate_kodaira2_family, run_search
from .wci import WciFamily
from .wps import CyclicQuotient, classify_quotient, normalize_quotient

__all__ = ["CyclicQuotient", "MinimalModelReport", "SearchConfig", "WciFamily",
           "classify_quotient", "generate_kodaira2_family", "normalize_quotient",
           "run_search", "verify"]
