"""The label cube: per-dimension inverted indexes over normalized keys.

Conceptually the index is a multidimensional array with one axis per
dimension and one coordinate per label; materializing that array is
infeasible (the cell count is the product of the vocabulary sizes), so
cells are computed lazily by intersecting per-dimension posting lists.
Lookup cost depends on the label vocabulary, not the corpus size.

The index is immutable after :func:`build_index`; concurrent reads need
no locking. There is no incremental update — rebuild to change it.
"""

from __future__ import annotations

import json
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .corpus import Corpus
from .embedding import Encoder, LabelVectors
from .errors import (
    ChecksumMismatch,
    FormatVersionMismatch,
    IoFailure,
    NonPositiveCount,
    UnknownDocId,
)
from .labeling import CANONICAL_DIMENSIONS, DocLabels, Dimension

_MAGIC = b"HRIX"
_FORMAT_VERSION = 1


class Posting(NamedTuple):
    doc_id: str
    count: int


@dataclass(frozen=True)
class CellAddress:
    """One coordinate per participating dimension; addresses one cube cell."""

    coords: Mapping[Dimension, str]

    def __post_init__(self):
        if not self.coords:
            raise ValueError("cell address needs at least one coordinate")


@dataclass
class HypercubeIndex:
    """Forward and inverted views of the same document-to-label assignment.

    ``inverted[dim][key]`` is a posting list sorted strictly by doc id;
    ``forward[doc_id]`` holds the document's DocLabels (possibly empty);
    ``vocab[dim]`` is the key set of ``inverted[dim]``. The two views
    stay symmetric by construction: a posting (d, c) exists exactly when
    the forward labels of d carry count c for that (dim, key).
    """

    dimensions: tuple[Dimension, ...]
    inverted: dict[Dimension, dict[str, list[Posting]]]
    forward: dict[str, DocLabels]
    vocab: dict[Dimension, set[str]]
    label_vectors: LabelVectors | None = field(default=None)

    @property
    def doc_count(self) -> int:
        return len(self.forward)

    def label_key_count(self) -> int:
        return sum(len(keys) for keys in self.vocab.values())


def build_index(
    corpus: Corpus,
    labels: Mapping[str, DocLabels],
    dimensions: Iterable[Dimension] | None = None,
    encoder: Encoder | None = None,
) -> HypercubeIndex:
    """Index a corpus under a label assignment.

    Every labeled doc id must exist in the corpus. Documents without
    labels still get a forward entry (with zero labels) and appear in no
    posting list. When an encoder is given, label vectors for the whole
    vocabulary are computed now and stored with the index.
    """
    for doc_id in labels:
        if doc_id not in corpus:
            raise UnknownDocId(doc_id)

    if dimensions is None:
        extras = sorted(
            {dim for doc_labels in labels.values() for (dim, _key) in doc_labels.counts}
            - set(CANONICAL_DIMENSIONS)
        )
        dims = CANONICAL_DIMENSIONS + tuple(extras)
    else:
        dims = tuple(dimensions)
    dim_set = set(dims)

    inverted: dict[Dimension, dict[str, list[Posting]]] = {dim: {} for dim in dims}
    forward: dict[str, DocLabels] = {}
    for doc in corpus:
        doc_labels = labels.get(doc.id, DocLabels(doc_id=doc.id))
        forward[doc.id] = doc_labels
        for (dim, key), count in doc_labels.counts.items():
            if dim not in dim_set:
                raise ValueError(f"label dimension {dim!r} not among index dimensions {dims}")
            if count < 1:
                raise NonPositiveCount(f"({dim}, {key!r}) in doc {doc.id!r}")
            inverted[dim].setdefault(key, []).append(Posting(doc.id, count))

    for postings_by_key in inverted.values():
        for postings in postings_by_key.values():
            postings.sort(key=lambda p: p.doc_id)

    vocab = {dim: set(postings_by_key) for dim, postings_by_key in inverted.items()}
    ix = HypercubeIndex(dimensions=dims, inverted=inverted, forward=forward, vocab=vocab)
    if encoder is not None:
        from .embedding import build_label_vectors

        ix.label_vectors = build_label_vectors(vocab, encoder)
    return ix


def lookup(ix: HypercubeIndex, dim: Dimension, key: str) -> list[Posting]:
    """Posting list of one label; empty if the key (or dimension) is unseen.

    A hash lookup plus a list reference — cost independent of corpus
    size.
    """
    return ix.inverted.get(dim, {}).get(key, [])


def cell_documents(ix: HypercubeIndex, address: CellAddress | Mapping[Dimension, str]) -> list[str]:
    """Documents occupying the cube cell at the given coordinates.

    The sorted intersection of the coordinate posting lists; any
    coordinate with an empty posting list empties the cell.
    """
    coords = address.coords if isinstance(address, CellAddress) else address
    if not coords:
        raise ValueError("cell address needs at least one coordinate")
    id_sets = []
    for dim, key in coords.items():
        postings = lookup(ix, dim, key)
        if not postings:
            return []
        id_sets.append({p.doc_id for p in postings})
    id_sets.sort(key=len)
    common = set.intersection(*id_sets)
    return sorted(common)


def verify_symmetry(ix: HypercubeIndex) -> None:
    """Full cross-walk of the forward <-> inverted invariant; raises on violation."""
    seen_pairs = 0
    for dim, postings_by_key in ix.inverted.items():
        if set(postings_by_key) != ix.vocab.get(dim, set()):
            raise AssertionError(f"vocab out of sync for dimension {dim}")
        for key, postings in postings_by_key.items():
            ids = [p.doc_id for p in postings]
            if ids != sorted(ids) or len(set(ids)) != len(ids):
                raise AssertionError(f"posting list for ({dim}, {key!r}) not strictly sorted")
            for posting in postings:
                forward_count = ix.forward[posting.doc_id].counts.get((dim, key))
                if forward_count != posting.count:
                    raise AssertionError(
                        f"posting ({dim}, {key!r}, {posting.doc_id}) count {posting.count} "
                        f"!= forward count {forward_count}"
                    )
                seen_pairs += 1
    forward_pairs = sum(len(labels.counts) for labels in ix.forward.values())
    if forward_pairs != seen_pairs:
        raise AssertionError(f"forward holds {forward_pairs} label pairs, inverted holds {seen_pairs}")


def _canonical_json(obj: object) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def _forward_payload(ix: HypercubeIndex) -> dict:
    payload: dict[str, dict] = {}
    for doc_id, doc_labels in ix.forward.items():
        labels: dict[str, dict[str, int]] = {}
        surfaces: dict[str, dict[str, list[str]]] = {}
        for (dim, key), count in doc_labels.counts.items():
            labels.setdefault(dim, {})[key] = count
            surfaces.setdefault(dim, {})[key] = sorted(doc_labels.surfaces.get((dim, key), {key}))
        payload[doc_id] = {"labels": labels, "surfaces": surfaces}
    return payload


def save_index(ix: HypercubeIndex, path: str | Path) -> None:
    """Write the index as a single-file container.

    Layout: magic, a length-prefixed JSON header, one length-prefixed
    JSON section per dimension plus a forward section (and a vectors
    section when label vectors are attached), then a trailing CRC-32
    over everything before it. Keys are written sorted and postings
    doc-id sorted, so identical indexes produce identical bytes.
    """
    sections: list[tuple[str, bytes]] = []
    for dim in ix.dimensions:
        postings_by_key = {
            key: [[p.doc_id, p.count] for p in postings]
            for key, postings in ix.inverted.get(dim, {}).items()
        }
        sections.append((f"inverted:{dim}", _canonical_json(postings_by_key)))
    sections.append(("forward", _canonical_json(_forward_payload(ix))))
    if ix.label_vectors is not None:
        vectors_payload = {
            "encoder": ix.label_vectors.encoder_name,
            "dim": ix.label_vectors.dim,
            "by_dimension": {
                dim: {"keys": keys, "matrix": [[float(x) for x in row] for row in matrix]}
                for dim, (keys, matrix) in ix.label_vectors.by_dimension.items()
            },
        }
        sections.append(("vectors", _canonical_json(vectors_payload)))

    header = {
        "version": _FORMAT_VERSION,
        "dimensions": list(ix.dimensions),
        "doc_count": ix.doc_count,
        "label_key_count": ix.label_key_count(),
        "sections": [name for name, _payload in sections],
    }
    body = bytearray()
    body += _MAGIC
    header_bytes = _canonical_json(header)
    body += len(header_bytes).to_bytes(4, "big")
    body += header_bytes
    for _name, payload in sections:
        body += len(payload).to_bytes(4, "big")
        body += payload
    body += zlib.crc32(bytes(body)).to_bytes(4, "big")
    try:
        Path(path).write_bytes(bytes(body))
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def load_index(path: str | Path) -> HypercubeIndex:
    """Read a container written by :func:`save_index`.

    The CRC is verified before anything is parsed, so truncation or
    corruption anywhere surfaces as ChecksumMismatch; an unknown magic
    or version surfaces as FormatVersionMismatch.
    """
    try:
        blob = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    if len(blob) < len(_MAGIC) + 8:
        raise ChecksumMismatch(f"{path}: file too short to be an index container")
    body, crc_bytes = blob[:-4], blob[-4:]
    if zlib.crc32(body) != int.from_bytes(crc_bytes, "big"):
        raise ChecksumMismatch(f"{path}: CRC-32 verification failed")
    if body[: len(_MAGIC)] != _MAGIC:
        raise FormatVersionMismatch(f"{path}: not an index container")
    offset = len(_MAGIC)

    def read_section() -> bytes:
        nonlocal offset
        if offset + 4 > len(body):
            raise ChecksumMismatch(f"{path}: section table overruns file")
        length = int.from_bytes(body[offset : offset + 4], "big")
        offset += 4
        if offset + length > len(body):
            raise ChecksumMismatch(f"{path}: section overruns file")
        payload = body[offset : offset + length]
        offset += length
        return payload

    header = json.loads(read_section().decode("utf-8"))
    if header.get("version") != _FORMAT_VERSION:
        raise FormatVersionMismatch(
            f"{path}: container version {header.get('version')!r}, reader supports {_FORMAT_VERSION}"
        )
    dimensions = tuple(header["dimensions"])
    inverted: dict[Dimension, dict[str, list[Posting]]] = {dim: {} for dim in dimensions}
    forward: dict[str, DocLabels] = {}
    label_vectors: LabelVectors | None = None

    for name in header["sections"]:
        payload = json.loads(read_section().decode("utf-8"))
        if name.startswith("inverted:"):
            dim = name.split(":", 1)[1]
            inverted[dim] = {
                key: [Posting(doc_id, count) for doc_id, count in postings]
                for key, postings in payload.items()
            }
        elif name == "forward":
            for doc_id, entry in payload.items():
                doc_labels = DocLabels(doc_id=doc_id)
                for dim, by_key in entry["labels"].items():
                    for key, count in by_key.items():
                        doc_labels.counts[(dim, key)] = count
                        doc_labels.surfaces[(dim, key)] = set(entry["surfaces"][dim][key])
                forward[doc_id] = doc_labels
        elif name == "vectors":
            label_vectors = LabelVectors(
                encoder_name=payload["encoder"],
                dim=payload["dim"],
                by_dimension={
                    dim: (
                        list(entry["keys"]),
                        np.asarray(entry["matrix"], dtype=np.float64).reshape(
                            len(entry["keys"]), payload["dim"]
                        ),
                    )
                    for dim, entry in payload["by_dimension"].items()
                },
            )
        else:
            raise FormatVersionMismatch(f"{path}: unknown section {name!r}")

    vocab = {dim: set(postings_by_key) for dim, postings_by_key in inverted.items()}
    return HypercubeIndex(
        dimensions=dimensions,
        inverted=inverted,
        forward=forward,
        vocab=vocab,
        label_vectors=label_vectors,
    )
