"""
Incremental GF(2) basis over Python integer bitmasks
"""

from typing import Dict, List, Tuple


class GF2Basis:
    """Row-echelon basis keyed by highest set bit, tracking how each row was combined"""

    def __init__(self):
        self._rows: Dict[int, Tuple[int, int]] = {}

    def __len__(self) -> int:
        return len(self._rows)

    def reduce(self, vector: int) -> Tuple[int, int]:
        """Return (residual, combo); residual == 0 iff vector lies in the span"""
        combo = 0
        while vector:
            pivot = vector.bit_length() - 1
            row = self._rows.get(pivot)
            if row is None:
                return vector, combo
            vector ^= row[0]
            combo ^= row[1]
        return 0, combo

    def add(self, vector: int, tag: int) -> bool:
        """Insert vector labelled by tag; False if it was already in the span"""
        residual, combo = self.reduce(vector)
        if residual == 0:
            return False
        self._rows[residual.bit_length() - 1] = (residual, combo ^ tag)
        return True

    def contains(self, vector: int) -> bool:
        return self.reduce(vector)[0] == 0


def bits_of(mask: int) -> List[int]:
    out = []
    index = 0
    while mask:
        if mask & 1:
            out.append(index)
        mask >>= 1
        index += 1
    return out
