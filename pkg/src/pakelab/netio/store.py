"""Server-side verifier persistence.

The on-disk format is one header line

  # pake-verifiers v1

then one record per line: id_a and id_b in decimal and the verifier in
lowercase hex, tab-separated. Records are keyed by the (id_a, id_b) pair,
so one client identity may hold verifiers with several servers. Parsing is
strict and every complaint carries a 1-based line number.

Failure counters (for throttling repeat guessers) are kept per id_a and
only in memory; restarting the service forgets them on purpose, since they
are rate-limit state, not credential state.
"""

from __future__ import annotations

from pathlib import Path
from typing import Dict, List, Tuple, Union

from ..core import VerifierRecord
from ..errors import DuplicateEntry, StoreParseError, UnknownIdentity

HEADER = "# pake-verifiers v1"


class VerifierStore:
    """In-memory map of (id_a, id_b) -> VerifierRecord with strict file round-trip."""

    def __init__(self):
        self._records: Dict[Tuple[int, int], VerifierRecord] = {}
        self._failures: Dict[int, int] = {}

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, key: Tuple[int, int]) -> bool:
        return key in self._records

    def __iter__(self):
        return iter(self._records.values())

    def add(self, record: VerifierRecord, replace: bool = False):
        key = (record.id_a, record.id_b)
        if key in self._records and not replace:
            raise DuplicateEntry(f"pair id_a={record.id_a}, id_b={record.id_b} "
                                 "is already enrolled")
        self._records[key] = record

    def lookup(self, id_a: int, id_b: int) -> VerifierRecord:
        try:
            return self._records[(id_a, id_b)]
        except KeyError:
            raise UnknownIdentity(
                f"no verifier on record for id_a={id_a}, id_b={id_b}") from None

    def records_for(self, id_a: int) -> List[VerifierRecord]:
        """All records whose client identity is id_a (MSG1 names only id_a)."""
        return [rec for (a, _), rec in sorted(self._records.items()) if a == id_a]

    # throttling bookkeeping; deliberately not persisted

    def note_failure(self, id_a: int) -> int:
        self._failures[id_a] = self._failures.get(id_a, 0) + 1
        return self._failures[id_a]

    def failure_count(self, id_a: int) -> int:
        return self._failures.get(id_a, 0)

    def clear_failures(self, id_a: int):
        self._failures.pop(id_a, None)

    def save(self, path: Union[str, Path]):
        lines = [HEADER]
        for key in sorted(self._records):
            rec = self._records[key]
            lines.append(f"{rec.id_a}\t{rec.id_b}\t{rec.v:x}")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: Union[str, Path]) -> "VerifierStore":
        text = Path(path).read_text(encoding="utf-8")
        lines = text.splitlines()
        if not lines or lines[0] != HEADER:
            raise StoreParseError(1, f"missing header {HEADER!r}")
        store = cls()
        for lineno, line in enumerate(lines[1:], start=2):
            if not line.strip():
                raise StoreParseError(lineno, "blank line")
            parts = line.split("\t")
            if len(parts) != 3:
                raise StoreParseError(
                    lineno, f"expected 3 tab-separated fields, got {len(parts)}")
            id_a = _parse_decimal(parts[0], lineno, "id_a")
            id_b = _parse_decimal(parts[1], lineno, "id_b")
            try:
                v = int(parts[2], 16)
            except ValueError:
                raise StoreParseError(
                    lineno, f"verifier {parts[2]!r} is not hex") from None
            if v < 1:
                raise StoreParseError(lineno, "verifier must be a positive residue")
            if (id_a, id_b) in store:
                raise StoreParseError(
                    lineno, f"duplicate entry for id_a={id_a}, id_b={id_b}")
            store.add(VerifierRecord(id_a=id_a, id_b=id_b, v=v))
        return store


def _parse_decimal(text: str, lineno: int, name: str) -> int:
    if not text.isdigit():
        raise StoreParseError(lineno, f"{name} {text!r} is not a decimal integer")
    return int(text)
