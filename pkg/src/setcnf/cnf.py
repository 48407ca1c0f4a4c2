"""CNF store: variable allocation with provenance, clause accumulation,
statistics, and DIMACS emission.

Clauses live in one flat literal buffer plus an offsets array, so
multi-million-clause instances stay compact and can be emitted fast.
Variable ids are dense (1..V) and assigned eagerly at first use; every
variable carries an origin describing what it stands for, which is the
decode contract (written as ``c var <id> = <origin>`` comments ahead of
the DIMACS header and as a ``.varmap`` sidecar).

The store rejects clauses with duplicate or complementary literals;
normalization is the emitter's job (see encoder).  FALSE is represented
by the empty clause, never by a reserved variable.

A formula is single-writer while being built and safe to share
read-only afterwards.
"""

from __future__ import annotations

import io
from array import array
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

# Variable origins are tuples; first field is the kind:
#   ("sv", set_name, element_label)            support variable
#   ("tot", constraint_id, node_id, position)  totalizer output
#   ("diff", constraint_id, element_label)     inequality witness
#   ("pos", player, position, group, week)     direct-encoding position
#   ("mem", player, group, week)               group-membership abstraction
Origin = tuple


class CnfError(Exception):
    pass


@dataclass
class EncodingStats:
    variables: int
    clauses: int
    histogram: dict[str, int]  # keys: "unit", "binary", "ternary", "other"
    per_constraint: list[tuple[str, int]]

    def __str__(self) -> str:
        h = self.histogram
        return (
            f"{self.variables} vars, {self.clauses} clauses "
            f"(u={h['unit']} b={h['binary']} t={h['ternary']} o={h['other']})"
        )


def format_origin(origin: Origin) -> str:
    return " ".join(str(part) for part in origin)


def parse_origin(text: str) -> Origin:
    parts = text.split()
    return tuple(int(p) if p.lstrip("-").isdigit() else p for p in parts)


class CnfFormula:
    """Append-only clause store with a provenance-tracking allocator."""

    def __init__(self):
        self._lits = array("i")
        self._ends = array("q")
        self._origins: list[Origin] = []
        self._support_ids: dict[tuple[str, int], int] = {}
        self._supports: dict[str, frozenset[int]] = {}
        self._spans: list[tuple[str, int]] = []  # (tag, first clause index)

    # -- variables ---------------------------------------------------------

    @property
    def num_vars(self) -> int:
        return len(self._origins)

    @property
    def num_clauses(self) -> int:
        return len(self._ends)

    def new_var(self, origin: Origin) -> int:
        self._origins.append(origin)
        return len(self._origins)

    def origin(self, var: int) -> Origin:
        return self._origins[var - 1]

    def origins(self) -> Sequence[Origin]:
        return self._origins

    def register_set(self, name: str, support: Sequence[int], labels: Sequence[str]) -> None:
        """Allocate support variables for a set, in element-index order."""
        if name in self._supports:
            raise CnfError(f"set {name} already registered")
        self._supports[name] = frozenset(support)
        for idx, lab in zip(support, labels):
            self._support_ids[(name, idx)] = self.new_var(("sv", name, lab))

    def support_var(self, set_name: str, element: int) -> int:
        """Variable for ``element in set``; idempotent for registered pairs.

        Raising on elements outside the support keeps the "not in
        support" branch of each encoding rule in the caller's hands.
        """
        try:
            return self._support_ids[(set_name, element)]
        except KeyError:
            raise CnfError(
                f"element index {element} not in support of {set_name}"
            ) from None

    # -- clauses -----------------------------------------------------------

    def begin_constraint(self, tag: str) -> None:
        self._spans.append((tag, len(self._ends)))

    def add_clause(self, lits: Iterable[int]) -> None:
        lits = tuple(lits)
        nv = len(self._origins)
        seen = set()
        for lit in lits:
            v = abs(lit)
            if lit == 0 or v > nv:
                raise CnfError(f"literal {lit} out of range")
            if v in seen:
                raise CnfError(f"duplicate or complementary literal on variable {v}")
            seen.add(v)
        self._lits.extend(lits)
        self._ends.append(len(self._lits))

    def add_empty_clause(self) -> None:
        self._ends.append(len(self._lits))

    def add_clauses_block(self, block: np.ndarray) -> None:
        """Bulk append of a fixed-width (m, k) int array of literals."""
        if block.size == 0:
            return
        block = np.ascontiguousarray(block, dtype=np.int32)
        m, k = block.shape
        av = np.abs(block)
        if (block == 0).any() or int(av.max()) > len(self._origins):
            raise CnfError("literal out of range in bulk block")
        if k > 1:
            s = np.sort(av, axis=1)
            if (s[:, 1:] == s[:, :-1]).any():
                raise CnfError("duplicate or complementary literal in bulk block")
        self._lits.frombytes(block.tobytes())
        end0 = len(self._lits) - m * k + k
        self._ends.frombytes(
            np.arange(end0, end0 + m * k, k, dtype=np.int64).tobytes()
        )

    @property
    def has_empty_clause(self) -> bool:
        ends = np.frombuffer(self._ends, dtype=np.int64)
        if len(ends) == 0:
            return False
        starts = np.concatenate(([0], ends[:-1]))
        return bool((ends == starts).any())

    def clause(self, i: int) -> tuple[int, ...]:
        start = self._ends[i - 1] if i > 0 else 0
        return tuple(self._lits[start : self._ends[i]])

    def clauses(self) -> Iterator[tuple[int, ...]]:
        start = 0
        for end in self._ends:
            yield tuple(self._lits[start:end])
            start = end

    def lits_array(self) -> np.ndarray:
        return np.frombuffer(self._lits, dtype=np.int32)

    def ends_array(self) -> np.ndarray:
        return np.frombuffer(self._ends, dtype=np.int64)

    # -- statistics ---------------------------------------------------------

    def stats(self) -> EncodingStats:
        ends = self.ends_array()
        widths = np.diff(ends, prepend=0)
        histogram = {
            "unit": int((widths == 1).sum()),
            "binary": int((widths == 2).sum()),
            "ternary": int((widths == 3).sum()),
            "other": int(((widths > 3) | (widths == 0)).sum()),
        }
        per_constraint = []
        for i, (tag, start) in enumerate(self._spans):
            stop = self._spans[i + 1][1] if i + 1 < len(self._spans) else len(ends)
            per_constraint.append((tag, stop - start))
        return EncodingStats(self.num_vars, self.num_clauses, histogram, per_constraint)

    # -- emission ------------------------------------------------------------

    def emit_dimacs(self, sink) -> None:
        """Write DIMACS CNF: variable-map comments, header, 0-terminated
        clauses.  Empty clauses come out as bare ``0`` lines.  Output is
        byte-identical across runs for the same formula."""
        write = sink.write
        for i, origin in enumerate(self._origins, start=1):
            write(f"c var {i} = {format_origin(origin)}\n".encode())
        write(f"p cnf {self.num_vars} {self.num_clauses}\n".encode())
        lits = self.lits_array()
        ends = self.ends_array()
        n, m = len(lits), len(ends)
        # Flat copy with a 0 terminator spliced in after every clause,
        # rendered in chunks: large instances make str(int) the hot path.
        out = np.zeros(n + m, dtype=np.int64)
        starts = np.concatenate(([0], ends[:-1]))
        keep = np.ones(n + m, dtype=bool)
        keep[ends + np.arange(m)] = False
        out[keep] = lits
        clause_last = ends + np.arange(m)  # positions of the 0 terminators
        newline = np.zeros(n + m, dtype=bool)
        newline[clause_last] = True
        chunk = 1_000_000
        pos = 0
        while pos < len(out):
            hi = min(pos + chunk, len(out))
            # never split a clause across chunks
            while hi < len(out) and not newline[hi - 1]:
                hi += 1
            flat = out[pos:hi].tolist()
            parts = []
            row_start = 0
            for b in np.flatnonzero(newline[pos:hi]).tolist():
                parts.append(" ".join(map(str, flat[row_start : b + 1])))
                row_start = b + 1
            write(("\n".join(parts) + "\n").encode())
            pos = hi

    def write_varmap(self, path) -> None:
        with open(path, "w") as f:
            for i, origin in enumerate(self._origins, start=1):
                f.write(f"{i} {format_origin(origin)}\n")


def read_varmap(path) -> dict[int, Origin]:
    origins: dict[int, Origin] = {}
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            head, _, rest = line.partition(" ")
            origins[int(head)] = parse_origin(rest)
    return origins


def dimacs_text(formula: CnfFormula) -> bytes:
    buf = io.BytesIO()
    formula.emit_dimacs(buf)
    return buf.getvalue()


def parse_dimacs(text: str) -> tuple[int, list[tuple[int, ...]]]:
    """Parse DIMACS CNF text into (num_vars, clauses).

    Comments may appear anywhere; clauses may span lines.  The header
    clause count is trusted only as a cross-check.
    """
    num_vars = None
    clauses: list[tuple[int, ...]] = []
    pending: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise CnfError(f"bad DIMACS header: {line!r}")
            num_vars = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(tuple(pending))
                pending = []
            else:
                pending.append(lit)
    if pending:
        raise CnfError("unterminated clause at end of DIMACS input")
    if num_vars is None:
        raise CnfError("missing DIMACS header")
    return num_vars, clauses
