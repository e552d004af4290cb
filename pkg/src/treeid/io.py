"""On-disk formats: binary embeddings, TSV embeddings, tree JSON, report CSVs.

The binary embedding format is little-endian and fixed width:

    offset  size  field
    0       4     magic "SEMB"
    4       4     version, uint32 (currently 1)
    8       8     n_items, uint64
    16      4     dim, uint32
    20      -     n_items * dim float32 values, row major

Trees serialize to a canonical single-line JSON object whose keys always
appear in the same order, so write -> read -> write is byte identical.
Reports are plain CSVs with a header row and values at 6 significant digits.
"""

import csv
import json
import struct
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from .core import EmbeddingMatrix, IdentifierTree, validate_embeddings, validate_paths
from .metrics import EvalReport

MAGIC = b"SEMB"
VERSION = 1
_HEADER = struct.Struct("<4sIQI")

TREE_FORMAT = "treeid-v1"


class FileFormatError(ValueError):
    """Base class for all malformed-input errors raised by this module."""


class BadMagicError(FileFormatError):
    pass


class UnsupportedVersionError(FileFormatError):
    pass


class TruncatedPayloadError(FileFormatError):
    """Payload size does not match the header (short or trailing bytes)."""


class NonFinitePayloadError(FileFormatError):
    pass


class TsvFormatError(FileFormatError):
    """Malformed TSV row; the message names the 1-based line number."""


class TreeFormatError(FileFormatError):
    pass


@contextmanager
def _opened(sink, mode):
    if isinstance(sink, (str, Path)):
        with open(sink, mode) as f:
            yield f
    else:
        yield sink


def write_embeddings(m: EmbeddingMatrix, sink):
    """Write the binary embedding format to a path or binary file object."""
    arr = m.as_array()
    with _opened(sink, "wb") as f:
        f.write(_HEADER.pack(MAGIC, VERSION, m.n_items, m.dim))
        f.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())


def read_embeddings(source) -> EmbeddingMatrix:
    """Read the binary embedding format from a path or binary file object."""
    with _opened(source, "rb") as f:
        head = f.read(_HEADER.size)
        if len(head) < _HEADER.size:
            raise TruncatedPayloadError(f"header is {len(head)} bytes, need {_HEADER.size}")
        magic, version, n_items, dim = _HEADER.unpack(head)
        if magic != MAGIC:
            raise BadMagicError(f"bad magic {magic!r}, expected {MAGIC!r}")
        if version != VERSION:
            raise UnsupportedVersionError(f"unsupported version {version}, expected {VERSION}")
        payload = f.read()
    expected = n_items * dim * 4
    if len(payload) != expected:
        raise TruncatedPayloadError(f"payload is {len(payload)} bytes, expected {expected}")
    values = np.frombuffer(payload, dtype="<f4").astype(np.float32)
    m = EmbeddingMatrix(n_items=int(n_items), dim=int(dim), values=values)
    res = validate_embeddings(m)
    if not res.ok:
        raise NonFinitePayloadError("; ".join(res.violations))
    return m


def read_embeddings_tsv(source) -> EmbeddingMatrix:
    """Read a text table: per line an item ordinal then d reals, comma or whitespace separated.

    The leading ordinal is ignored; rows keep file order. Ragged rows or
    unparsable numbers raise TsvFormatError naming the line.
    """
    rows = []
    dim = None
    with _opened(source, "r") as f:
        for lineno, line in enumerate(f, start=1):
            fields = [tok for tok in line.replace(",", " ").split() if tok]
            if not fields:
                continue
            if len(fields) < 2:
                raise TsvFormatError(f"line {lineno}: need an id and at least one value")
            try:
                vals = [float(tok) for tok in fields[1:]]
            except ValueError as e:
                raise TsvFormatError(f"line {lineno}: {e}") from e
            if dim is None:
                dim = len(vals)
            elif len(vals) != dim:
                raise TsvFormatError(
                    f"line {lineno}: {len(vals)} values, expected {dim} like earlier rows"
                )
            rows.append(vals)
    if not rows:
        raise TsvFormatError("no data rows")
    return EmbeddingMatrix.from_array(np.asarray(rows, dtype=np.float32))


def write_embeddings_tsv(m: EmbeddingMatrix, sink):
    """Write the text table form: item ordinal then comma-separated values.

    Values carry 9 significant digits so a float32 round-trips exactly.
    """
    arr = m.as_array()
    with _opened(sink, "w") as f:
        for i in range(m.n_items):
            f.write(f"{i}\t" + ",".join(f"{v:.9g}" for v in arr[i]) + "\n")


def write_tree(t: IdentifierTree, sink):
    """Serialize a tree to canonical JSON (fixed key order, no whitespace)."""
    doc = {
        "format": TREE_FORMAT,
        "k": t.k,
        "depth": t.depth,
        "n_items": t.n_items,
        "pad_token": t.pad_token,
        "paths": t.paths.tolist(),
    }
    text = json.dumps(doc, separators=(",", ":"))
    with _opened(sink, "w") as f:
        f.write(text)
        f.write("\n")


def read_tree(source) -> IdentifierTree:
    """Parse tree JSON, rebuild the node arena from the paths, and revalidate."""
    with _opened(source, "r") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise TreeFormatError(f"invalid JSON: {e}") from e
    if not isinstance(doc, dict) or doc.get("format") != TREE_FORMAT:
        raise TreeFormatError(f"expected a {TREE_FORMAT} object")
    try:
        k = int(doc["k"])
        depth = int(doc["depth"])
        n_items = int(doc["n_items"])
        pad = int(doc["pad_token"])
        paths = np.asarray(doc["paths"], dtype=np.int32)
    except (KeyError, TypeError, ValueError) as e:
        raise TreeFormatError(f"malformed tree document: {e}") from e
    if k < 2:
        raise TreeFormatError(f"branching factor must be >= 2, got {k}")
    if pad != k:
        raise TreeFormatError(f"pad_token must equal k={k}, got {pad}")
    if paths.ndim != 2 or paths.shape != (n_items, depth):
        raise TreeFormatError(
            f"paths shape {paths.shape} does not match n_items={n_items}, depth={depth}"
        )
    res = validate_paths(k, depth, paths)
    if not res.ok:
        raise TreeFormatError("; ".join(res.violations))
    return IdentifierTree.from_paths(k, paths)


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def write_eval_report(report: EvalReport, sink):
    """Eval CSV: metric,cutoff,value with values at 6 significant digits."""
    with _opened(sink, "w") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["metric", "cutoff", "value"])
        for (metric, cutoff) in sorted(report.values):
            w.writerow([metric, cutoff, _fmt(report.values[(metric, cutoff)])])


def write_bench_rows(rows, sink):
    """Bench CSV: method,n_items,dim,k,seed,build_seconds,total_sse."""
    with _opened(sink, "w") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["method", "n_items", "dim", "k", "seed", "build_seconds", "total_sse"])
        for r in rows:
            w.writerow(
                [r.method, r.n_items, r.dim, r.k, r.seed, _fmt(r.build_seconds), _fmt(r.total_sse)]
            )


def write_report(report_or_rows, sink):
    """Write an EvalReport or a list of bench rows as CSV."""
    if isinstance(report_or_rows, EvalReport):
        write_eval_report(report_or_rows, sink)
    else:
        write_bench_rows(report_or_rows, sink)


def write_ranking(results, sink):
    """Ranking CSV: query,rank,item,score rows for every query's result list."""
    with _opened(sink, "w") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["query", "rank", "item", "score"])
        for qid, ranked in enumerate(results):
            for rank, (item, score) in enumerate(ranked, start=1):
                w.writerow([qid, rank, item, _fmt(float(score))])


def read_ranking(source) -> dict[int, list[int]]:
    """Read a ranking CSV back into query -> ordered item list."""
    per_query: dict[int, list[tuple[int, int]]] = {}
    with _opened(source, "r") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or header[:3] != ["query", "rank", "item"]:
            raise FileFormatError("ranking CSV must start with header query,rank,item[,score]")
        for row in reader:
            if not row:
                continue
            q, rank, item = int(row[0]), int(row[1]), int(row[2])
            per_query.setdefault(q, []).append((rank, item))
    return {q: [item for _, item in sorted(pairs)] for q, pairs in per_query.items()}


def read_truth(source) -> dict[int, set[int]]:
    """Read a truth CSV (header query,item) into query -> relevant item set."""
    truth: dict[int, set[int]] = {}
    with _opened(source, "r") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or header[:2] != ["query", "item"]:
            raise FileFormatError("truth CSV must start with header query,item")
        for row in reader:
            if not row:
                continue
            truth.setdefault(int(row[0]), set()).add(int(row[1]))
    return truth
