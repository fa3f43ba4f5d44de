"""Benchmark construction: ingest, filtering, chronological splits, frozen packages."""

from __future__ import annotations

import fnmatch
import hashlib
import json
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .resources import DEFAULT_ALLOW_LIST

_log = logging.getLogger(__name__)

CANONICAL_SEED = 20260331
REPEATED_SEEDS = tuple(range(100, 110))
DEFAULT_SEEDS = (CANONICAL_SEED,) + REPEATED_SEEDS

PACKAGE_FILES = ("histories.tsv", "items.tsv", "splits.json", "meta.json")
# meta fields that are excluded from the content digest
_UNDIGESTED_META = ("digest", "created_at")


class BenchmarkError(Exception):
    pass


class ParseError(BenchmarkError):
    def __init__(self, path, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = path
        self.line_no = line_no


class ReferentialIntegrityError(BenchmarkError):
    def __init__(self, occupation_id: str, user_id: str | None = None):
        where = f" (user {user_id!r})" if user_id is not None else ""
        super().__init__(f"unknown occupation id {occupation_id!r}{where}")
        self.occupation_id = occupation_id


class DegenerateBenchmarkError(BenchmarkError):
    pass


class DigestMismatchError(BenchmarkError):
    pass


@dataclass(frozen=True)
class OccupationRecord:
    occupation_id: str
    title: str
    description: str = ""
    skill_terms: tuple[str, ...] = ()

    def __post_init__(self):
        seen = []
        for s in self.skill_terms:
            s = s.strip().lower()
            if s and s not in seen:
                seen.append(s)
        object.__setattr__(self, "skill_terms", tuple(seen))


@dataclass(frozen=True)
class UserHistory:
    user_id: str
    sequence: tuple[str, ...]

    def __len__(self):
        return len(self.sequence)


@dataclass(frozen=True)
class FilterConfig:
    """Benchmark filters. ``allow_list=None`` keeps every occupation.

    Allow-list entries match an occupation id exactly, or its lowercased title
    (shell-style wildcards allowed, e.g. ``*developer*``).
    """

    allow_list: frozenset[str] | None = None
    min_sequence_length: int = 3
    min_item_user_support: int = 25

    def __post_init__(self):
        if self.min_sequence_length < 3:
            raise ValueError("min_sequence_length must be >= 3")
        if self.min_item_user_support < 1:
            raise ValueError("min_item_user_support must be >= 1")
        if self.allow_list is not None:
            object.__setattr__(self, "allow_list", frozenset(a.strip().lower() for a in self.allow_list if a.strip()))

    def allows(self, item: OccupationRecord) -> bool:
        if self.allow_list is None:
            return True
        if item.occupation_id.lower() in self.allow_list:
            return True
        title = " ".join(item.title.lower().split())
        return any(fnmatch.fnmatchcase(title, pat) for pat in self.allow_list)

    def to_json(self) -> dict:
        return {
            "allow_list": None if self.allow_list is None else sorted(self.allow_list),
            "min_sequence_length": self.min_sequence_length,
            "min_item_user_support": self.min_item_user_support,
        }

    def digest(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


def default_filter_config(**kw) -> FilterConfig:
    """Filters with the shipped (illustrative) ICT allow-list."""
    return FilterConfig(allow_list=frozenset(DEFAULT_ALLOW_LIST), **kw)


def load_allow_list(path) -> frozenset[str]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return frozenset(ln.strip() for ln in lines if ln.strip() and not ln.lstrip().startswith("#"))


@dataclass(frozen=True)
class SplitSpec:
    user_id: str
    test_index: int
    seed: int

    @property
    def validation_index(self) -> int:
        return self.test_index - 1

    @property
    def train_end(self) -> int:
        # exclusive end of the training prefix
        return self.validation_index


@dataclass
class AuditReport:
    dropped_occupations: list[tuple[str, str]] = field(default_factory=list)
    dropped_users: list[tuple[str, str]] = field(default_factory=list)
    rounds: int = 0

    def lines(self) -> list[str]:
        out = [f"occupation\t{i}\t{r}" for i, r in self.dropped_occupations]
        out += [f"user\t{u}\t{r}" for u, r in self.dropped_users]
        return out


@dataclass(frozen=True)
class BenchmarkPackage:
    histories: tuple[UserHistory, ...]
    items: tuple[OccupationRecord, ...]
    splits: Mapping[int, tuple[SplitSpec, ...]]
    metadata: Mapping[str, object]

    @property
    def item_ids(self) -> list[str]:
        return [it.occupation_id for it in self.items]

    def history_of(self, user_id: str) -> UserHistory:
        for h in self.histories:
            if h.user_id == user_id:
                return h
        raise KeyError(user_id)

    @property
    def seeds(self) -> list[int]:
        return sorted(self.splits)


# ---------------------------------------------------------------- ingest


def _read_lines(path):
    with open(path, encoding="utf-8") as fh:
        for no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if line.strip():
                yield no, line


def parse_items(path) -> list[OccupationRecord]:
    items, seen = [], set()
    for no, line in _read_lines(path):
        parts = line.split("\t")
        if len(parts) != 4:
            raise ParseError(path, no, f"expected 4 tab-separated fields, got {len(parts)}")
        occ_id, title, desc, skills = (p.strip() for p in parts)
        if not occ_id:
            raise ParseError(path, no, "empty occupation id")
        if occ_id in seen:
            raise ParseError(path, no, f"duplicate occupation id {occ_id!r}")
        seen.add(occ_id)
        items.append(OccupationRecord(occ_id, title, desc, tuple(skills.split("|")) if skills else ()))
    return items


def parse_histories(path) -> list[UserHistory]:
    out, seen = [], set()
    for no, line in _read_lines(path):
        parts = line.split("\t")
        if len(parts) != 2:
            raise ParseError(path, no, f"expected 2 tab-separated fields, got {len(parts)}")
        user_id, seq = parts[0].strip(), parts[1].strip()
        if not user_id:
            raise ParseError(path, no, "empty user id")
        if user_id in seen:
            raise ParseError(path, no, f"duplicate user id {user_id!r}")
        occs = tuple(s.strip() for s in seq.split(",")) if seq else ()
        if any(not s for s in occs):
            raise ParseError(path, no, "empty occupation id in sequence")
        seen.add(user_id)
        out.append(UserHistory(user_id, occs))
    return out


def ingest(histories_path, items_path) -> tuple[list[UserHistory], list[OccupationRecord]]:
    items = parse_items(items_path)
    histories = parse_histories(histories_path)
    known = {it.occupation_id for it in items}
    for h in histories:
        for occ in h.sequence:
            if occ not in known:
                raise ReferentialIntegrityError(occ, h.user_id)
    return histories, items


# ---------------------------------------------------------------- filters


def apply_filters(
    histories: Sequence[UserHistory], items: Sequence[OccupationRecord], config: FilterConfig
) -> tuple[list[UserHistory], list[OccupationRecord], AuditReport]:
    """Allow-list first, then support and length filters iterated to a joint fixpoint."""
    audit = AuditReport()
    allowed = set()
    for it in items:
        if config.allows(it):
            allowed.add(it.occupation_id)
        else:
            audit.dropped_occupations.append((it.occupation_id, "allow_list"))

    seqs = {h.user_id: [o for o in h.sequence if o in allowed] for h in histories}
    order = [h.user_id for h in histories]
    alive_users = set(order)

    while True:
        audit.rounds += 1
        support: dict[str, set] = {o: set() for o in allowed}
        for u in alive_users:
            for o in seqs[u]:
                support[o].add(u)
        weak = sorted(o for o in allowed if len(support[o]) < config.min_item_user_support)
        for o in weak:
            audit.dropped_occupations.append((o, "min_item_user_support"))
        allowed.difference_update(weak)
        if weak:
            for u in alive_users:
                seqs[u] = [o for o in seqs[u] if o in allowed]
        short = [u for u in order if u in alive_users and len(seqs[u]) < config.min_sequence_length]
        for u in short:
            audit.dropped_users.append((u, "min_sequence_length"))
        alive_users.difference_update(short)
        if not weak and not short:
            break

    out_h = [UserHistory(u, tuple(seqs[u])) for u in order if u in alive_users]
    out_i = [it for it in items if it.occupation_id in allowed]
    if not out_h or not out_i:
        raise DegenerateBenchmarkError("benchmark degenerate: no users or occupations survive filtering")
    _log.info("filters kept %d users, %d occupations in %d rounds", len(out_h), len(out_i), audit.rounds)
    return out_h, out_i, audit


# ---------------------------------------------------------------- splits


def _split_key(seed: int, user_id: str) -> int:
    h = hashlib.blake2b(f"{seed}\x1f{user_id}".encode(), digest_size=8)
    return int.from_bytes(h.digest(), "little")


def generate_split(history: UserHistory, seed: int) -> SplitSpec:
    n = len(history.sequence)
    if n < 3:
        raise ValueError(f"user {history.user_id!r}: sequence length {n} < 3")
    rng = np.random.Generator(np.random.Philox(key=_split_key(seed, history.user_id)))
    test_index = int(rng.integers(2, n))
    return SplitSpec(history.user_id, test_index, seed)


def generate_splits(histories: Iterable[UserHistory], seeds: Iterable[int]) -> dict[int, tuple[SplitSpec, ...]]:
    histories = list(histories)
    return {int(s): tuple(generate_split(h, s) for h in histories) for s in seeds}


# ---------------------------------------------------------------- packages


def build_package(
    histories: Sequence[UserHistory],
    items: Sequence[OccupationRecord],
    seeds: Iterable[int] = DEFAULT_SEEDS,
    source: str = "unknown",
    filters: FilterConfig | None = None,
    extra: Mapping[str, object] | None = None,
    created_at: str | None = "now",
) -> BenchmarkPackage:
    seeds = sorted(int(s) for s in seeds)
    known = {it.occupation_id for it in items}
    for h in histories:
        if len(h.sequence) < 3:
            raise BenchmarkError(f"user {h.user_id!r} has fewer than 3 occupations")
        for o in h.sequence:
            if o not in known:
                raise ReferentialIntegrityError(o, h.user_id)
    meta = {
        "source": source,
        "filters": (filters or FilterConfig()).to_json(),
        "filter_digest": (filters or FilterConfig()).digest(),
        "created_at": datetime.now(timezone.utc).isoformat(timespec="seconds") if created_at == "now" else created_at,
        "seeds": seeds,
        "canonical_seed": CANONICAL_SEED,
        "counts": _counts(histories, items),
    }
    if extra:
        meta.update(extra)
    return BenchmarkPackage(tuple(histories), tuple(items), generate_splits(histories, seeds), meta)


def _counts(histories, items) -> dict:
    n_inter = sum(len(h.sequence) for h in histories)
    return {
        "users": len(histories),
        "occupations": len(items),
        "interactions": n_inter,
        "avg_sequence_length": round(n_inter / len(histories), 6) if histories else 0.0,
    }


def _serialize(package: BenchmarkPackage) -> dict[str, bytes]:
    hist = "".join(f"{h.user_id}\t{','.join(h.sequence)}\n" for h in package.histories)
    items = "".join(
        f"{it.occupation_id}\t{it.title}\t{it.description}\t{'|'.join(it.skill_terms)}\n" for it in package.items
    )
    splits = {
        str(seed): [{"user_id": s.user_id, "test_index": s.test_index} for s in package.splits[seed]]
        for seed in sorted(package.splits)
    }
    meta = {k: v for k, v in package.metadata.items() if k not in _UNDIGESTED_META}
    return {
        "histories.tsv": hist.encode("utf-8"),
        "items.tsv": items.encode("utf-8"),
        "splits.json": (json.dumps(splits, sort_keys=True, separators=(",", ":")) + "\n").encode("utf-8"),
        "meta.json": (json.dumps(meta, sort_keys=True, indent=1) + "\n").encode("utf-8"),
    }


def _digest(blobs: Mapping[str, bytes]) -> str:
    h = hashlib.sha256()
    for name in PACKAGE_FILES:
        h.update(blobs[name])
    return h.hexdigest()


def package_digest(package: BenchmarkPackage) -> str:
    return _digest(_serialize(package))


def check_consistency(package: BenchmarkPackage) -> None:
    counts = package.metadata.get("counts")
    if counts is not None and dict(counts) != _counts(package.histories, package.items):
        raise BenchmarkError("metadata counts do not match package contents")
    ids = [it.occupation_id for it in package.items]
    if len(set(ids)) != len(ids):
        raise BenchmarkError("duplicate occupation ids")
    lengths = {h.user_id: len(h.sequence) for h in package.histories}
    for seed, specs in package.splits.items():
        if len(specs) != len(lengths):
            raise BenchmarkError(f"seed {seed}: split count does not match user count")
        for s in specs:
            n = lengths.get(s.user_id)
            if n is None or not 2 <= s.test_index < n:
                raise BenchmarkError(f"seed {seed}: illegal split for user {s.user_id!r}")


def freeze(package: BenchmarkPackage, directory) -> str:
    """Write the four package files and return the content digest."""
    check_consistency(package)
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    blobs = _serialize(package)
    digest = _digest(blobs)
    meta = dict(package.metadata)
    meta["digest"] = digest
    blobs = dict(blobs)
    blobs["meta.json"] = (json.dumps(meta, sort_keys=True, indent=1) + "\n").encode("utf-8")
    for name in PACKAGE_FILES:
        (directory / name).write_bytes(blobs[name])
    if load(directory).metadata["digest"] != digest:
        raise DigestMismatchError(f"verification read of {directory} failed")
    return digest


def load(directory, verify: bool = True) -> BenchmarkPackage:
    directory = Path(directory)
    histories = parse_histories(directory / "histories.tsv")
    items = parse_items(directory / "items.tsv")
    meta = json.loads((directory / "meta.json").read_text(encoding="utf-8"))
    raw = json.loads((directory / "splits.json").read_text(encoding="utf-8"))
    splits = {
        int(seed): tuple(SplitSpec(d["user_id"], int(d["test_index"]), int(seed)) for d in specs)
        for seed, specs in raw.items()
    }
    package = BenchmarkPackage(tuple(histories), tuple(items), splits, meta)
    if verify:
        stored = meta.get("digest")
        actual = package_digest(package)
        if stored != actual:
            raise DigestMismatchError(f"{directory}: stored digest {stored} != recomputed {actual}")
    return package
