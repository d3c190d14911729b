"""Protein sequence datasets: parsing, labeling, splitting, synthesis."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, replace

from .errors import ConfigError, DataError
from .rng import SplitMix64

#: The 20 canonical amino-acid letters, in alphabetical order.
ALPHABET = "ACDEFGHIKLMNPQRSTVWY"
_ALPHABET_SET = frozenset(ALPHABET)

_SPLITS = ("train", "test", "unassigned")


@dataclass(frozen=True)
class ProteinSequence:
    """A validated residue string with an identifier and optional label."""

    id: str
    residues: str
    label: str | None = None

    def __post_init__(self):
        if not self.id:
            raise DataError("sequence id must be nonempty")
        if any(ch.isspace() or ch in "/\\" for ch in self.id):
            raise DataError(
                f"sequence id {self.id!r} contains whitespace or path separators"
            )
        if not self.residues:
            raise DataError(f"sequence {self.id!r} has no residues")
        for pos, ch in enumerate(self.residues, start=1):
            if ch not in _ALPHABET_SET:
                raise DataError(
                    f"sequence {self.id!r}: invalid residue {ch!r} at position {pos}"
                )

    def __len__(self) -> int:
        return len(self.residues)


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    path: str
    label: str | None
    split: str = "unassigned"

    def __post_init__(self):
        if self.split not in _SPLITS:
            raise DataError(f"entry {self.id!r}: invalid split {self.split!r}")


@dataclass(frozen=True)
class DatasetManifest:
    """Binds sequence ids to file paths, labels, and split assignment."""

    entries: tuple[ManifestEntry, ...]
    class_names: tuple[str, ...]
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        object.__setattr__(self, "class_names", tuple(self.class_names))
        seen = set()
        for e in self.entries:
            if e.id in seen:
                raise DataError(f"duplicate id {e.id!r} in manifest")
            seen.add(e.id)
            if e.label is not None and e.label not in self.class_names:
                raise DataError(
                    f"entry {e.id!r}: label {e.label!r} not in class list"
                )
        if len(set(self.class_names)) != len(self.class_names):
            raise DataError("duplicate class names")
        assigned = [e for e in self.entries if e.split != "unassigned"]
        if assigned and len(assigned) != len(self.entries):
            raise DataError("split must be total: some entries are unassigned")

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "classes": list(self.class_names),
            "entries": [
                {"id": e.id, "path": e.path, "label": e.label, "split": e.split}
                for e in self.entries
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "DatasetManifest":
        try:
            entries = tuple(
                ManifestEntry(e["id"], e["path"], e["label"], e["split"])
                for e in doc["entries"]
            )
            return cls(entries, tuple(doc["classes"]), int(doc["seed"]))
        except (KeyError, TypeError) as exc:
            raise DataError(f"malformed manifest document: {exc}") from exc

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def loads(cls, text: str) -> "DatasetManifest":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DataError(f"manifest is not valid JSON: {exc}") from exc
        return cls.from_dict(doc)


@dataclass(frozen=True)
class SplitSpec:
    test_fraction: float
    seed: int = 0
    stratified: bool = True

    def __post_init__(self):
        if not 0.0 < self.test_fraction < 1.0:
            raise ConfigError("test_fraction must be strictly between 0 and 1")


def _decode(source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return data


def parse_fasta(source) -> list[ProteinSequence]:
    """Parse FASTA text (str, bytes, or file-like) into validated sequences.

    The id is the first whitespace-delimited token of each header; sequence
    lines may wrap and are uppercased. Raises DataError on sequence data
    before the first header, duplicate ids, or non-canonical residues.
    """
    text = _decode(source)
    records: list[tuple[str, list[str]]] = []
    seen: set[str] = set()
    current: list[str] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith(">"):
            header = line[1:].strip()
            if not header:
                raise DataError(f"line {lineno}: empty FASTA header")
            seq_id = header.split()[0]
            if seq_id in seen:
                raise DataError(f"line {lineno}: duplicate id {seq_id!r}")
            seen.add(seq_id)
            current = []
            records.append((seq_id, current))
        else:
            if current is None:
                raise DataError(
                    f"line {lineno}: sequence data before first '>' header"
                )
            current.append(line.upper())
    return [ProteinSequence(seq_id, "".join(parts)) for seq_id, parts in records]


def write_fasta(sequences: list[ProteinSequence]) -> str:
    """Serialize sequences back to FASTA text (inverse of parse_fasta)."""
    out = []
    for seq in sequences:
        out.append(f">{seq.id}\n{seq.residues}\n")
    return "".join(out)


def parse_labels_csv(source) -> dict[str, str]:
    """Parse a CSV with 'id' and 'label' columns into an id->label map."""
    text = _decode(source)
    reader = csv.DictReader(io.StringIO(text))
    fields = [f.strip() for f in (reader.fieldnames or [])]
    if "id" not in fields or "label" not in fields:
        raise DataError("labels CSV must have 'id' and 'label' columns")
    labels: dict[str, str] = {}
    for row in reader:
        row = {(k or "").strip(): (v or "") for k, v in row.items()}
        seq_id = row["id"].strip()
        label = row["label"].strip()
        if not seq_id:
            raise DataError("labels CSV contains an empty id")
        if seq_id in labels:
            raise DataError(f"duplicate id {seq_id!r} in labels CSV")
        if not label:
            raise DataError(f"empty label for id {seq_id!r}")
        labels[seq_id] = label
    return labels


def _round_half_up(x: float) -> int:
    import math

    return int(math.floor(x + 0.5))


def per_class_test_counts(class_sizes: list[int], test_fraction: float) -> list[int]:
    """Test-set size per class: max(1, round-half-up(fraction * n))."""
    return [max(1, _round_half_up(test_fraction * n)) for n in class_sizes]


def stratified_split(manifest: DatasetManifest, spec: SplitSpec) -> DatasetManifest:
    """Assign every entry to train or test, stratified per class.

    Within each class the members are shuffled with a SplitMix64 generator
    seeded by spec.seed, and the first t_c land in the test set. The result
    is a total partition, deterministic for a fixed manifest order and seed.
    """
    if any(e.label is None for e in manifest.entries):
        raise DataError("stratified_split requires every entry to be labeled")
    by_class: dict[str, list[int]] = {c: [] for c in manifest.class_names}
    for idx, e in enumerate(manifest.entries):
        by_class[e.label].append(idx)

    assignment = ["train"] * len(manifest.entries)
    rng = SplitMix64(spec.seed)
    for cname in manifest.class_names:
        members = by_class[cname]
        n = len(members)
        if n < 2:
            raise DataError(f"class {cname!r} has fewer than 2 members")
        t = max(1, _round_half_up(spec.test_fraction * n))
        if t >= n:
            raise DataError(
                f"class {cname!r}: test_fraction {spec.test_fraction} leaves "
                "an empty train set"
            )
        if spec.stratified:
            order = list(members)
            rng.shuffle(order)
            chosen = order[:t]
        else:
            chosen = members[:t]
        for idx in chosen:
            assignment[idx] = "test"

    entries = tuple(
        replace(e, split=assignment[i]) for i, e in enumerate(manifest.entries)
    )
    return DatasetManifest(entries, manifest.class_names, spec.seed)


def synth_dataset(
    n_classes: int,
    per_class: int,
    length_range: tuple[int, int],
    motif_length: int,
    seed: int,
) -> list[ProteinSequence]:
    """Generate a labeled synthetic dataset with one implanted motif per class.

    Each class gets a distinct random motif; each sequence is uniform-random
    residues with the class motif implanted at a random position. Fully
    deterministic given the seed.
    """
    lo, hi = length_range
    if n_classes < 2:
        raise ConfigError("need at least 2 classes")
    if motif_length < 3:
        raise ConfigError("motif_length must be >= 3")
    if lo > hi:
        raise ConfigError(f"length_range {length_range} is inverted")
    if lo < motif_length:
        raise ConfigError("minimum length must be >= motif_length")

    rng = SplitMix64(seed)
    motifs: list[str] = []
    for _ in range(n_classes):
        for _attempt in range(100):
            motif = "".join(rng.choice(ALPHABET) for _ in range(motif_length))
            if motif not in motifs:
                motifs.append(motif)
                break
        else:
            raise DataError("could not draw distinct class motifs in 100 tries")

    sequences: list[ProteinSequence] = []
    for k in range(n_classes):
        label = f"class{k}"
        motif = motifs[k]
        for i in range(per_class):
            length = rng.randint(lo, hi)
            residues = [rng.choice(ALPHABET) for _ in range(length)]
            pos = rng.randint(0, length - motif_length)
            residues[pos : pos + motif_length] = motif
            sequences.append(
                ProteinSequence(f"{label}_{i:04d}", "".join(residues), label)
            )
    return sequences


def manifest_from_sequences(
    sequences: list[ProteinSequence],
    labels: dict[str, str] | None = None,
    paths: dict[str, str] | None = None,
    seed: int = 0,
) -> DatasetManifest:
    """Build an unassigned manifest from sequences plus optional label map."""
    entries = []
    class_names: list[str] = []
    for seq in sequences:
        label = seq.label
        if labels is not None:
            if seq.id not in labels:
                raise DataError(f"no label for sequence {seq.id!r}")
            label = labels[seq.id]
        if label is not None and label not in class_names:
            class_names.append(label)
        path = paths.get(seq.id, "") if paths else ""
        entries.append(ManifestEntry(seq.id, path, label))
    return DatasetManifest(tuple(entries), tuple(class_names), seed)
