"""Line-oriented counts file.

Grammar (one statement per line; ``#`` starts a comment; blank lines ignored)::

    format 1
    kind A | B
    set SetI | SetII | Tetrahedron
    order <outcome labels>      kind A: yy yn ny nn; kind B: b-triples 000 .. 111
    shots <int>
    repetitions <int>
    jobs <int>
    seed <int> | -
    device <free text>
    job <k>                     k = 1 .. jobs, in order
      kind A, 16 lines:  <i> <j> <c_yy> <c_yn> <c_ny> <c_nn>
      kind B,  8 lines:  <a-triple> <8 counts, one per b-triple>
    end

Counts are exact non-negative integers. Settings (kind A) appear in row-major
order i = 1..4, j = 1..4 and A-triples (kind B) in increasing binary order.
The canonical form is what :func:`serialize_counts` writes.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .stats import CountsError, CountsTable

FORMAT_VERSION = 1
ORDER_A = ("yy", "yn", "ny", "nn")
ORDER_B = tuple(f"{k:03b}" for k in range(8))
HEADER_KEYS = ("format", "kind", "set", "order", "shots", "repetitions", "jobs", "seed", "device")


class CountsFormatError(ValueError):
    """Malformed or inconsistent counts file, with the offending line."""

    def __init__(self, message: str, line: int | None = None, fieldname: str | None = None):
        self.line = line
        self.fieldname = fieldname
        where = []
        if line is not None:
            where.append(f"line {line}")
        if fieldname is not None:
            where.append(f"field {fieldname!r}")
        prefix = (", ".join(where) + ": ") if where else ""
        super().__init__(prefix + message)


def serialize_counts(table: CountsTable) -> str:
    order = ORDER_A if table.kind == "A" else ORDER_B
    lines = [
        f"format {FORMAT_VERSION}",
        f"kind {table.kind}",
        f"set {table.measurement_set}",
        "order " + " ".join(order),
        f"shots {table.shots}",
        f"repetitions {table.repetitions}",
        f"jobs {table.jobs}",
        f"seed {table.seed if table.seed is not None else '-'}",
        f"device {table.device}".rstrip(),
    ]
    for k, job in enumerate(table.counts, start=1):
        lines.append(f"job {k}")
        if table.kind == "A":
            for i in range(4):
                for j in range(4):
                    lines.append(f"{i + 1} {j + 1} " + " ".join(str(int(v)) for v in job[i, j]))
        else:
            for a in range(8):
                lines.append(f"{a:03b} " + " ".join(str(int(v)) for v in job[a]))
    lines.append("end")
    return "\n".join(lines) + "\n"


def counts_digest(table: CountsTable) -> str:
    """SHA-256 of the canonical serialization."""
    return hashlib.sha256(serialize_counts(table).encode("utf-8")).hexdigest()


def _int(tok: str, line: int, name: str, minimum: int | None = None) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise CountsFormatError(f"expected an integer, got {tok!r}", line, name) from None
    if minimum is not None and v < minimum:
        raise CountsFormatError(f"value {v} is below {minimum}", line, name)
    return v


def _statements(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield no, body


def parse_counts(text: str) -> CountsTable:
    stmts = list(_statements(text))
    pos = 0
    header: dict[str, tuple[int, str]] = {}
    while pos < len(stmts) and len(header) < len(HEADER_KEYS):
        no, body = stmts[pos]
        key, _, value = body.partition(" ")
        if key == "job":
            break
        if key not in HEADER_KEYS:
            raise CountsFormatError(f"unknown header key {key!r}", no, key)
        if key in header:
            raise CountsFormatError("duplicate header key", no, key)
        header[key] = (no, value.strip())
        pos += 1
    for key in HEADER_KEYS:
        if key not in header and key != "device":
            raise CountsFormatError(f"missing header key {key!r}", None, key)
    if header.get("format", (None, ""))[1] != str(FORMAT_VERSION):
        no, v = header["format"]
        raise CountsFormatError(f"unsupported format version {v!r} (expected {FORMAT_VERSION})", no, "format")

    no, kind = header["kind"]
    if kind not in ("A", "B"):
        raise CountsFormatError(f"unknown scenario kind {kind!r}", no, "kind")
    no, mset = header["set"]
    allowed = ("SetI", "SetII") if kind == "A" else ("Tetrahedron",)
    if mset not in allowed:
        raise CountsFormatError(f"unknown measurement set {mset!r} for kind {kind}", no, "set")
    expected_order = ORDER_A if kind == "A" else ORDER_B
    no, order = header["order"]
    if tuple(order.split()) != expected_order:
        raise CountsFormatError(f"order must be {' '.join(expected_order)!r}", no, "order")
    shots = _int(header["shots"][1], header["shots"][0], "shots", 1)
    reps = _int(header["repetitions"][1], header["repetitions"][0], "repetitions", 1)
    jobs = _int(header["jobs"][1], header["jobs"][0], "jobs", 1)
    no, seed_tok = header["seed"]
    seed = None if seed_tok == "-" else _int(seed_tok, no, "seed", 0)
    device = header.get("device", (None, ""))[1]

    rows = 16 if kind == "A" else 8
    width = 4 if kind == "A" else 8
    per = shots * reps
    data = np.zeros((jobs, 4, 4, 4) if kind == "A" else (jobs, 8, 8), dtype=np.int64)
    for k in range(1, jobs + 1):
        if pos >= len(stmts) or stmts[pos][1] == "end":
            line = stmts[pos][0] if pos < len(stmts) else None
            raise CountsFormatError(f"missing record for job {k} (header declares {jobs})", line, "job")
        no, body = stmts[pos]
        toks = body.split()
        if toks[0] != "job" or len(toks) != 2 or _int(toks[1], no, "job") != k:
            raise CountsFormatError(f"expected 'job {k}'", no, "job")
        pos += 1
        for r in range(rows):
            if pos >= len(stmts):
                raise CountsFormatError(f"job {k} is truncated", None, "job")
            no, body = stmts[pos]
            toks = body.split()
            if kind == "A":
                i, j = divmod(r, 4)
                if len(toks) != 2 + width:
                    raise CountsFormatError(f"expected 'i j' and {width} counts", no, "counts")
                if (_int(toks[0], no, "i"), _int(toks[1], no, "j")) != (i + 1, j + 1):
                    raise CountsFormatError(f"expected setting ({i + 1}, {j + 1})", no, "setting")
                vals = [_int(t, no, f"count {ORDER_A[c]}") for c, t in enumerate(toks[2:])]
                where = f"job {k}, setting ({i + 1}, {j + 1})"
                data[k - 1, i, j] = vals
            else:
                if len(toks) != 1 + width:
                    raise CountsFormatError(f"expected an A-triple and {width} counts", no, "counts")
                if toks[0] != ORDER_B[r]:
                    raise CountsFormatError(f"expected A-triple {ORDER_B[r]}", no, "triple")
                vals = [_int(t, no, f"count {ORDER_B[c]}") for c, t in enumerate(toks[1:])]
                where = f"job {k}, A-triple {ORDER_B[r]}"
                data[k - 1, r] = vals
            for c, v in enumerate(vals):
                if v < 0:
                    raise CountsFormatError(f"negative count {v} in {where}", no, f"count {expected_order[c]}")
            if kind == "A" and sum(vals) != per:
                raise CountsFormatError(
                    f"counts in {where} sum to {sum(vals)}, expected shots*repetitions = {per}", no, "counts"
                )
            pos += 1
        if kind == "B":
            total = int(data[k - 1].sum())
            if total != per:
                raise CountsFormatError(
                    f"counts in job {k} sum to {total}, expected shots*repetitions = {per}", no, "counts"
                )
    if pos >= len(stmts) or stmts[pos][1] != "end":
        line = stmts[pos][0] if pos < len(stmts) else None
        raise CountsFormatError("expected 'end' after the last job", line, "end")
    if pos + 1 < len(stmts):
        raise CountsFormatError("content after 'end'", stmts[pos + 1][0])
    try:
        return CountsTable(kind, mset, data, shots, reps, seed, device)
    except CountsError as exc:
        raise CountsFormatError(str(exc)) from exc


def read_counts(path) -> CountsTable:
    with open(path, encoding="utf-8") as fh:
        return parse_counts(fh.read())


def write_counts(table: CountsTable, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_counts(table))
