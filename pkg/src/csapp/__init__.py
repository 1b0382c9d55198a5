"""Compressed suffix array with block-coded psi for count queries."""
from .corpus import Text, load_byte_text, load_token_text, map_pattern
from .index import CsaIndex
from .psistore import PsiStore, build_psi_store
from .search import SearchRange, backward_search, count, factorize_rlz, naive_count

__all__ = [
    "CsaIndex",
    "PsiStore",
    "SearchRange",
    "Text",
    "backward_search",
    "build_psi_store",
    "count",
    "factorize_rlz",
    "load_byte_text",
    "load_token_text",
    "map_pattern",
    "naive_count",
]
__version__ = "0.1.0"
