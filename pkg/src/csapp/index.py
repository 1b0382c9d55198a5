"""A searchable index: compressed psi plus the source alphabet."""
from __future__ import annotations

from typing import Sequence

from .construction import build_psi, build_suffix_array, build_symbol_table
from .corpus import BYTE, Text
from .psistore import PsiStore
from .search import SearchRange, backward_search, count


class CsaIndex:
    def __init__(self, store: PsiStore, alphabet: Sequence[int], mode: str = BYTE):
        if len(alphabet) != store.sigma:
            raise ValueError("alphabet size does not match the store")
        self.store = store
        self.alphabet = tuple(alphabet)
        self.mode = mode
        self.alphabet_map = {s: i + 1 for i, s in enumerate(self.alphabet)}

    @classmethod
    def build(cls, text: Text, k: int = 128, L: int | None = None) -> CsaIndex:
        sa = build_suffix_array(text)
        psi = build_psi(sa)
        del sa
        store = PsiStore.build(psi, build_symbol_table(text), k, L)
        return cls(store, text.alphabet, text.mode)

    @property
    def n(self) -> int:
        return self.store.n

    @property
    def sigma(self) -> int:
        return self.store.sigma

    @property
    def k(self) -> int:
        return self.store.k

    @property
    def L(self) -> int:
        return self.store.L

    def count(self, pattern) -> int:
        return count(self, pattern)

    def search(self, symbols: Sequence[int]) -> SearchRange:
        """Backward search over dense symbol ids."""
        return backward_search(self.store, symbols)
