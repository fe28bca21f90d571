"""Minimal resolutions, Ext charts and Yoneda products over the Steenrod algebra.

The resolution is built horizontally: internal degrees ascend, and within one
degree t every homological degree s is brought up to t before moving on.

Level s keeps a Groebner basis of the graph {(d y, y) : y in F_s} inside
F_{s-1} + F_s, with every F_{s-1} slot ordered above every F_s slot. Entries
whose F_{s-1} part vanishes then form a Groebner basis of ker d_s, and the
F_{s-1} parts of the remaining entries a Groebner basis of im d_s. Level 0
holds a Groebner basis of the relation module M in F_0 = A^r.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .groebner import GroebnerData, combine, mul_mask
from .milnor import MilnorElt, milnor_to_masks, parse_milnor
from .order import (
    FreeElt,
    encode,
    mask_deg,
    monomials_of_degree,
    reslot,
    term_mask,
    term_slot,
)
from .f2linear import BitMatrix, replay, row_reduce

log = logging.getLogger(__name__)

# F_s slots inside a level-s graph basis start here; F_{s-1} slots sit below.
OFFSET = 1 << 30
FORMAT_VERSION = 1
ORDERING_ID = "fdeg-reversed/lex-ascending-rank/lower-slot-larger"


class ResolutionError(RuntimeError):
    pass


# ---------- presentations ----------


@dataclass
class ModulePresentation:
    """N = A{v_1..v_r} / (relations); slot i of a relation is v_{i+1}."""

    r: int
    gen_degrees: list[int]
    relations: list[frozenset] = field(default_factory=list)
    name: str = ""

    def __post_init__(self):
        if len(self.gen_degrees) != self.r:
            raise ValueError("need one degree per generator")
        for x in self.relations:
            if len({self.term_degree(t) for t in x}) > 1:
                raise ValueError("relations must be homogeneous")

    def term_degree(self, t: int) -> int:
        return mask_deg(term_mask(t)) + self.gen_degrees[term_slot(t)]

    def relation_degree(self, x: frozenset) -> int:
        return self.term_degree(max(x))

    def canonical_text(self) -> str:
        lines = [f"rank {self.r}", "degrees " + " ".join(map(str, self.gen_degrees))]
        for x in self.relations:
            lines.append("relation " + format_module_element(x))
        return "\n".join(lines) + "\n"


def format_module_element(x: Iterable[int]) -> str:
    """Terms as ``P(R)*vK`` sums in the Milnor basis, deterministic order."""
    by_slot: dict[int, list[int]] = {}
    for t in x:
        by_slot.setdefault(term_slot(t), []).append(term_mask(t))
    parts = []
    from .milnor import masks_to_milnor

    for slot in sorted(by_slot):
        milnor = MilnorElt()
        milnor.terms = masks_to_milnor(by_slot[slot])
        for r in milnor.sorted_terms():
            parts.append("P(" + ",".join(map(str, r)) + f")*v{slot + 1}")
    return " + ".join(parts) if parts else "0"


_VTERM = re.compile(r"^(.*?)\*?\s*v(\d+)$")


def parse_module_element(text: str, r: int) -> frozenset:
    """Parse ``Sq(2)*v1 + P(1,1)*v2 + v3`` into packed terms."""
    acc: set = set()
    text = text.strip()
    if text in ("", "0"):
        return frozenset()
    for summand in text.split("+"):
        summand = summand.strip()
        m = _VTERM.match(summand)
        if not m:
            raise ValueError(f"term {summand!r} does not end in a generator v<k>")
        k = int(m.group(2)) - 1
        if not 0 <= k < r:
            raise ValueError(f"generator v{k + 1} out of range")
        coeff = m.group(1).strip().rstrip("*").strip() or "1"
        elt = parse_milnor(coeff)
        for mask in milnor_to_masks(elt.terms):
            acc ^= {encode(k, mask)}
    return frozenset(acc)


def parse_module(text: str, name: str = "") -> ModulePresentation:
    """Read the line format ``rank``, ``degrees`` and ``relation`` (``#`` comments)."""
    r = None
    degrees = None
    rel_text: list[str] = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        if key == "rank":
            r = int(rest)
        elif key == "degrees":
            degrees = [int(x) for x in rest.split()]
        elif key == "relation":
            rel_text.append(rest)
        else:
            raise ValueError(f"unknown module file keyword {key!r}")
    if r is None or degrees is None:
        raise ValueError("module file needs 'rank' and 'degrees'")
    rels = [parse_module_element(t, r) for t in rel_text]
    return ModulePresentation(r, degrees, [x for x in rels if x], name)


def trivial_module(max_degree: int = 1 << 10) -> ModulePresentation:
    """F_2 = A / A_+, presented by the indecomposables Sq^{2^i}."""
    rels = []
    n = 1
    while n <= max_degree:
        rels.append(frozenset(encode(0, m) for m in milnor_to_masks([(n,)])))
        n *= 2
    return ModulePresentation(1, [0], rels, "F2")


BUILTIN_MODULES: dict[str, Callable[[], ModulePresentation]] = {
    "F2": trivial_module,
    # H^*(HZ) = A / A Sq^1
    "HZ": lambda: ModulePresentation(1, [0], [frozenset((encode(0, m),)) for m in milnor_to_masks([(1,)])], "HZ"),
}


def load_module(source: str) -> ModulePresentation:
    """A builtin module by name, or a module file."""
    if source in BUILTIN_MODULES:
        return BUILTIN_MODULES[source]()
    path = Path(source)
    return parse_module(path.read_text(), name=path.stem)


def minimize_presentation(p: ModulePresentation) -> ModulePresentation:
    """Drop generators that the relations express through the others.

    Unit-coefficient parts of the relations are row reduced (pivots on the
    highest generator index, so earlier generators survive), the same row
    operations are replayed on the full relations, and each eliminated
    generator is substituted away, lowest degree first.
    """
    rels = [x for x in p.relations if x]
    r = p.r
    # Column c of the matrix is generator r-1-c, so lowest column = highest index.
    rows = []
    for x in rels:
        bits = 0
        for t in x:
            if term_mask(t) == 0:
                bits |= 1 << (r - 1 - term_slot(t))
        rows.append(bits)
    red, pivots, ops = row_reduce(BitMatrix(len(rows), r, rows))
    if not pivots:
        return ModulePresentation(r, list(p.gen_degrees), rels, p.name)
    xs = replay(ops, [set(x) for x in rels])
    eliminated: dict[int, frozenset] = {}
    for row, col in enumerate(pivots):
        g = r - 1 - col
        eliminated[g] = frozenset(set(xs[row]) ^ {encode(g, 0)})
    others = [frozenset(x) for i, x in enumerate(xs) if i >= len(pivots)]

    def substitute(x: frozenset) -> frozenset:
        x = set(x)
        while True:
            hit = [t for t in x if term_slot(t) in eliminated]
            if not hit:
                return frozenset(x)
            for t in hit:
                x ^= {t}
                x ^= mul_mask(term_mask(t), eliminated[term_slot(t)])

    for g in sorted(eliminated, key=lambda g: p.gen_degrees[g]):
        eliminated[g] = substitute(eliminated[g])
    kept = [g for g in range(r) if g not in eliminated]
    renumber = {g: k for k, g in enumerate(kept)}
    new_rels = []
    for x in others:
        y = substitute(x)
        if y:
            new_rels.append(frozenset(reslot(t, renumber[term_slot(t)] - term_slot(t)) for t in y))
    return ModulePresentation(len(kept), [p.gen_degrees[g] for g in kept], new_rels, p.name)


def minimal_generators(xs: Sequence, trunc=None, deg_cap: int | None = None, *,
                       slot_degrees: Sequence[int] | None = None, **options) -> list:
    """Subset of ``xs`` generating the same submodule, with redundant ones dropped."""
    elts = [x.raw if isinstance(x, FreeElt) else frozenset(x) for x in xs]
    elts_nz = [(i, x) for i, x in enumerate(elts) if x]
    if not elts_nz:
        return []
    sdeg = dict(enumerate(slot_degrees)) if slot_degrees is not None else _zero_degrees(elts)
    deg = lambda x: mask_deg(term_mask(max(x))) + sdeg[term_slot(max(x))]  # noqa: E731
    if deg_cap is None:
        deg_cap = trunc.n if trunc is not None else max(deg(x) for _, x in elts_nz)
    order = sorted(elts_nz, key=lambda ix: deg(ix[1]))
    H = GroebnerData(sdeg, deg_cap, **options)
    keep = []
    dropped = []
    for i, x in order:
        H.run(deg(x))
        rem = H.reduce(x)
        if rem:
            H.add(rem, ("input", i))
            keep.append(i)
        else:
            dropped.append(x)
    H.run()
    for x in dropped:
        if H.reduce(x):
            raise ResolutionError("dropped generator is not in the span of the kept ones")
    keep.sort()
    return [xs[i] for i in keep]


def _zero_degrees(elts):
    return {term_slot(t): 0 for x in elts for t in x}


# ---------- resolution state ----------


@dataclass
class Level:
    gens: list[int] = field(default_factory=list)
    diffs: list[frozenset] = field(default_factory=list)
    gb: GroebnerData | None = None
    frontier: int = -1
    log: list[dict] = field(default_factory=list)  # per-degree additions, for checkpoints


@dataclass
class RunOptions:
    literal_pairs: bool = False
    triple: bool = False
    threads: int = 1

    def hash_items(self) -> dict:
        return {"literal_pairs": self.literal_pairs, "triple": self.triple}


class ResolutionState:
    """A minimal resolution of a module, valid up to a per-level frontier."""

    def __init__(self, module: ModulePresentation, options: RunOptions | None = None):
        self.options = options or RunOptions()
        self.input_module = module
        self.module = minimize_presentation(module)
        self.levels: list[Level] = []
        self.t_cap = -1
        self.chain_maps: dict[tuple, "ChainMap"] = {}

    # --- configuration identity ---

    def config_text(self) -> str:
        return json.dumps(
            {
                "format": FORMAT_VERSION,
                "ordering": ORDERING_ID,
                "module": self.input_module.canonical_text(),
                **self.options.hash_items(),
            },
            sort_keys=True,
        )

    def config_hash(self) -> str:
        return hashlib.sha256(self.config_text().encode()).hexdigest()[:16]

    # --- structure access ---

    @property
    def s_max(self) -> int:
        return len(self.levels) - 1

    def frontier(self) -> int:
        """Largest t such that every level is complete through t."""
        if not self.levels:
            return -1
        return min(lv.frontier for lv in self.levels)

    def gens(self, s: int) -> list[int]:
        return self.levels[s].gens

    def generators_at(self, s: int, t: int) -> list[int]:
        return [j for j, d in enumerate(self.levels[s].gens) if d == t]

    def diff(self, s: int, j: int) -> frozenset:
        """d_s(v_{s,j}) in F_{s-1} (F_0 = A^r for s = 1); undefined for s = 0."""
        return self.levels[s].diffs[j]

    def _slot_degree_fn(self, s: int):
        if s == 0:
            degs = self.levels[0].gens
            return degs.__getitem__
        lower, upper = self.levels[s - 1].gens, self.levels[s].gens

        def sdeg(slot: int) -> int:
            return lower[slot] if slot < OFFSET else upper[slot - OFFSET]

        return sdeg

    def _new_level(self, s: int) -> Level:
        lv = Level()
        if s == 0:
            lv.gens = list(self.module.gen_degrees)
            lv.diffs = [frozenset() for _ in lv.gens]
        self.levels.append(lv)
        o = self.options
        lv.gb = GroebnerData(self._slot_degree_fn(s), self.t_cap, literal_pairs=o.literal_pairs,
                             triple=o.triple, threads=o.threads)
        return lv

    def kernel_entries(self, s: int, t: int) -> list[frozenset]:
        """Groebner basis entries of ker d_s (M for s = 0) of degree exactly t, in F_s slots."""
        gb = self.levels[s].gb
        out = []
        for e in gb.entries:
            if e.degree != t:
                continue
            if s == 0:
                out.append(e.elt)
            elif e.slot >= OFFSET:
                out.append(frozenset(reslot(x, -OFFSET) for x in e.elt))
        return out

    # --- the horizontal construction ---

    def _step(self, s: int, t: int) -> dict:
        lv = self.levels[s]
        gb = lv.gb
        rec = {"t": t, "gens": [], "diffs": [], "entries": []}
        first_new = len(gb.entries)
        if gb.next_degree() is not None and gb.next_degree() < t:
            raise ResolutionError(f"level {s} has unprocessed pairs below degree {t}")
        if gb.next_degree() == t:
            gb.process_degree(t)
        if s == 0:
            for k, x in enumerate(self.module.relations):
                if self.module.relation_degree(x) == t:
                    rem = gb.reduce(x)
                    if rem:
                        gb.add(rem, ("input", k), check_growth=True)
        else:
            by_lead: dict[int, frozenset] = {}
            for k in self.kernel_entries(s - 1, t):
                # the F_s part only records how k was reduced; keep the F_{s-1} part
                rem = {x for x in gb.reduce(k) if term_slot(x) < OFFSET}
                while rem and max(rem) in by_lead:
                    rem ^= by_lead[max(rem)]
                if rem:
                    by_lead[max(rem)] = frozenset(rem)
            cands = [by_lead[lead] for lead in sorted(by_lead, reverse=True)]
            for c in cands:
                j = len(lv.gens)
                lv.gens.append(t)
                lv.diffs.append(c)
                gb.add(c | {encode(OFFSET + j, 0)}, ("gen", j), check_growth=True)
                rec["gens"].append(t)
                rec["diffs"].append(_dump_terms(c))
        for e in gb.entries[first_new:]:
            rec["entries"].append([_dump_terms(e.elt), list(e.origin)])
        lv.frontier = t
        return rec

    def extend(self, s_max: int, t_max: int, on_barrier: Callable[["ResolutionState", int], None] | None = None,
               progress: Callable[[dict], None] | None = None) -> "ResolutionState":
        """Bring every level s <= s_max up to internal degree t_max."""
        if t_max > self.t_cap:
            self.t_cap = t_max
            for lv in self.levels:
                lv.gb.raise_cap(t_max)
        while len(self.levels) <= s_max:
            self._new_level(len(self.levels))
        start = min(lv.frontier for lv in self.levels[: s_max + 1]) + 1
        for t in range(start, t_max + 1):
            t0 = time.perf_counter()
            counts = []
            for s in range(s_max + 1):
                lv = self.levels[s]
                if lv.frontier >= t:
                    continue
                before = len(lv.gens)
                lv.log.append(self._step(s, t))
                counts.append((s, len(lv.gens) - before, len(lv.gb.entries)))
            if progress is not None:
                progress({"t": t, "new_gens": sum(c[1] for c in counts if c[0] > 0),
                          "gb_entries": sum(c[2] for c in counts),
                          "elapsed": round(time.perf_counter() - t0, 3)})
            if on_barrier is not None:
                on_barrier(self, t)
        return self

    # --- invariants ---

    def check_complex(self) -> None:
        """d_{s-1} d_s = 0 on generators, and d_1 lands in M."""
        for s in range(1, len(self.levels)):
            for j, x in enumerate(self.levels[s].diffs):
                if s == 1:
                    if self.levels[0].gb.reduce(x):
                        raise ResolutionError(f"d_1(v_1_{j}) is not a relation")
                else:
                    if combine(x, self.levels[s - 1].diffs):
                        raise ResolutionError(f"d d (v_{s}_{j}) != 0")

    def check_graph(self) -> None:
        """Every basis entry (x, y) of level s >= 1 satisfies x = d(y); level 0 contains M."""
        for k, x in enumerate(self.module.relations):
            if self.module.relation_degree(x) <= self.levels[0].frontier and self.levels[0].gb.reduce(x):
                raise ResolutionError(f"relation {k} does not reduce to zero at level 0")
        for e in self.levels[0].gb.entries:
            if any(term_slot(t) >= OFFSET for t in e.elt):
                raise ResolutionError("level 0 basis entry leaves F_0")
        for s in range(1, len(self.levels)):
            diffs = self.levels[s].diffs
            for i, e in enumerate(self.levels[s].gb.entries):
                low = frozenset(t for t in e.elt if term_slot(t) < OFFSET)
                high = [reslot(t, -OFFSET) for t in e.elt if term_slot(t) >= OFFSET]
                if any(term_slot(t) >= len(diffs) for t in high) or combine(high, diffs) != low:
                    raise ResolutionError(f"basis entry {i} of level {s} is not in the graph of d")

    def check_minimal(self) -> None:
        for s in range(1, len(self.levels)):
            for j, x in enumerate(self.levels[s].diffs):
                if any(term_mask(t) == 0 for t in x):
                    raise ResolutionError(f"d(v_{s}_{j}) has a unit coefficient")


# ---------- checkpoints ----------


def _dump_terms(x: Iterable[int]) -> list[list[int]]:
    return [[term_slot(t), term_mask(t)] for t in sorted(x, reverse=True)]


def _load_terms(z) -> frozenset:
    return frozenset(encode(s, m) for s, m in z)


_DIGEST_SUFFIX = len(',"sha":"') + 16 + len('"}')


def record_line(rec: dict) -> bytes:
    """One checkpoint record as a JSON line sealed with a digest of its body."""
    body = json.dumps(rec, separators=(",", ":"))
    sha = hashlib.sha256(body.encode()).hexdigest()[:16]
    return (body[:-1] + f',"sha":"{sha}"}}\n').encode()


def parse_record_line(line: bytes) -> dict:
    body = line[:-_DIGEST_SUFFIX] + b"}"
    try:
        rec = json.loads(line)
        sha = rec.pop("sha", None)
    except (ValueError, AttributeError):
        raise ResolutionError("checkpoint record is not valid JSON") from None
    if sha != hashlib.sha256(body).hexdigest()[:16]:
        raise ResolutionError("checkpoint record does not match its digest")
    return rec


def read_manifest(path: str | os.PathLike) -> dict | None:
    m = Path(path) / "manifest.json"
    if not m.exists():
        return None
    return json.loads(m.read_text())


def save_checkpoint(state: ResolutionState, path: str | os.PathLike) -> None:
    """Write ``level_<s>.jsonl`` (one record per degree) and then ``manifest.json``.

    Level files are append-only, one digest-sealed JSON record per degree. The manifest records how many records and
    bytes of each file are valid, and is replaced atomically, so a run killed
    mid-write leaves a checkpoint at the previous degree barrier.
    """
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    old = read_manifest(path)
    if old is not None and old.get("config_hash") != state.config_hash():
        raise ResolutionError("checkpoint directory holds a different configuration")
    old_lines = old["lines"] if old else []
    old_bytes = old["bytes"] if old else []
    lines, sizes = [], []
    for s, lv in enumerate(state.levels):
        f = path / f"level_{s}.jsonl"
        n = old_lines[s] if s < len(old_lines) else 0
        size = old_bytes[s] if s < len(old_bytes) else 0
        if n > len(lv.log) or not f.exists():
            n = size = 0
        with open(f, "r+b" if f.exists() else "wb") as fh:
            fh.truncate(size)
            fh.seek(size)
            for rec in lv.log[n:]:
                fh.write(record_line(rec))
            fh.flush()
            os.fsync(fh.fileno())
            size = fh.tell()
        lines.append(len(lv.log))
        sizes.append(size)
    manifest = {
        "format": FORMAT_VERSION,
        "config_hash": state.config_hash(),
        "config": json.loads(state.config_text()),
        "frontiers": [lv.frontier for lv in state.levels],
        "lines": lines,
        "bytes": sizes,
        "t_cap": state.t_cap,
    }
    tmp = path / "manifest.json.tmp"
    tmp.write_text(json.dumps(manifest, indent=1, sort_keys=True))
    os.replace(tmp, path / "manifest.json")


def load_checkpoint(path: str | os.PathLike, module: ModulePresentation | None = None,
                    options: RunOptions | None = None, check: bool = True) -> ResolutionState:
    """Rebuild a state from a checkpoint; refuses a mismatching configuration.

    Record digests are always verified. With ``check`` the rebuilt complex is
    also checked for d^2 = 0 and minimality.
    """
    path = Path(path)
    manifest = read_manifest(path)
    if manifest is None:
        raise ResolutionError(f"no checkpoint at {path}")
    if manifest.get("format") != FORMAT_VERSION:
        raise ResolutionError("unsupported checkpoint format")
    cfg = manifest["config"]
    if module is None:
        module = parse_module(cfg["module"], name=cfg.get("name", ""))
    if options is None:
        options = RunOptions(cfg["literal_pairs"], cfg["triple"])
    state = ResolutionState(module, options)
    if state.config_hash() != manifest["config_hash"]:
        raise ResolutionError("checkpoint was written with a different configuration")
    state.t_cap = manifest["t_cap"]
    for s, (frontier, size) in enumerate(zip(manifest["frontiers"], manifest["bytes"])):
        lv = state._new_level(s)
        with open(path / f"level_{s}.jsonl", "rb") as fh:
            data = fh.read(size)
        for line in data.splitlines():
            rec = parse_record_line(line)
            lv.log.append(rec)
            for d, diff in zip(rec["gens"], rec["diffs"]):
                lv.gens.append(d)
                lv.diffs.append(_load_terms(diff))
            for terms, origin in rec["entries"]:
                lv.gb.add(_load_terms(terms), tuple(origin))
        lv.frontier = frontier
        lv.gb.drop_pairs_upto(frontier)
    if check:
        state.check_complex()
        state.check_minimal()
    return state


# ---------- Ext ----------


@dataclass(frozen=True)
class ChartEntry:
    s: int
    t: int
    index: int  # position among the generators of F_s
    k: int  # position within bidegree (s, t)
    name: str

    @property
    def canonical(self) -> str:
        return f"{self.s}_{self.t}_{self.k}"


@dataclass
class ExtChart:
    entries: list[ChartEntry]
    products: dict[tuple[str, str], list[str]] = field(default_factory=dict)

    def dims(self) -> dict[tuple[int, int], int]:
        out: dict[tuple[int, int], int] = {}
        for e in self.entries:
            out[(e.s, e.t)] = out.get((e.s, e.t), 0) + 1
        return out

    def by_name(self) -> dict[str, ChartEntry]:
        out = {}
        for e in self.entries:
            out[e.name] = e
            out[e.canonical] = e
        return out

    def to_tsv(self) -> str:
        rows = ["s\tt\tindex\tname"]
        for e in sorted(self.entries, key=lambda e: (e.t, e.s, e.k)):
            rows.append(f"{e.s}\t{e.t}\t{e.k}\t{e.name}")
        return "\n".join(rows) + "\n"


def is_trivial_module(state: ResolutionState) -> bool:
    m = state.module
    if m.r != 1 or m.gen_degrees != [0]:
        return False
    gb = state.levels[0].gb
    upto = state.levels[0].frontier
    return all(not gb.staircase([0], d, monomials_of_degree) for d in range(1, upto + 1))


def ext_chart(state: ResolutionState, s_max: int | None = None, t_max: int | None = None) -> ExtChart:
    frontier = state.frontier()
    if t_max is None:
        t_max = frontier
    if s_max is None:
        s_max = state.s_max
    if t_max > frontier or s_max > state.s_max:
        raise ResolutionError(f"requested range (s<={s_max}, t<={t_max}) is beyond the frontier "
                              f"(s<={state.s_max}, t<={frontier})")
    trivial = is_trivial_module(state)
    entries = []
    for s in range(s_max + 1):
        seen: dict[int, int] = {}
        for j, t in enumerate(state.gens(s)):
            if t > t_max:
                continue
            k = seen.get(t, 0)
            seen[t] = k + 1
            name = f"{s}_{t}_{k}"
            if trivial and s == 1 and t & (t - 1) == 0:
                name = f"h{t.bit_length() - 1}"
            elif trivial and s == 0 and t == 0:
                name = "1"
            entries.append(ChartEntry(s, t, j, k, name))
    return ExtChart(entries)


# ---------- chain maps and products ----------


@dataclass
class ChainMap:
    """Lift of an Ext class g at (s_g, t_g) to f_k : F_{s_g + k} -> F_k (target resolution)."""

    s: int
    t: int
    index: int
    values: list[list[frozenset | None]] = field(default_factory=list)

    def value(self, k: int, j: int) -> frozenset:
        return self.values[k][j]


def lift_chain_map(state: ResolutionState, g: ChartEntry, k_max: int, t_max: int | None = None,
                   target: ResolutionState | None = None) -> ChainMap:
    """Extend (or create) the cached chain map of ``g`` through F_{s_g+k_max} in degrees <= t_max.

    f_0 sends the generator of g to the unit of F_0 = A and every other
    generator to zero; f_k(v) solves d f_k(v) = f_{k-1}(d v) by reducing
    against the graph basis of the target.
    """
    target = target or state
    if target.module.r != 1 or target.module.gen_degrees != [0]:
        raise ResolutionError("chain maps need a target resolution of a cyclic module in degree 0")
    t_max = state.frontier() if t_max is None else t_max
    key = (id(target), g.s, g.index)
    cm = state.chain_maps.get(key)
    if cm is None:
        cm = ChainMap(g.s, g.t, g.index)
        state.chain_maps[key] = cm
    if g.s + k_max > state.s_max or k_max > target.s_max:
        raise ResolutionError("chain map range exceeds the resolution")
    if t_max > state.frontier() or t_max - g.t > target.frontier():
        raise ResolutionError("chain map degree range exceeds the frontier")
    unit = frozenset((encode(0, 0),))
    for k in range(k_max + 1):
        if len(cm.values) <= k:
            cm.values.append([])
        vals = cm.values[k]
        src_gens = state.gens(g.s + k)
        while len(vals) < len(src_gens):
            vals.append(None)
        for j, deg in enumerate(src_gens):
            if deg > t_max or vals[j] is not None:
                continue
            if k == 0:
                vals[j] = unit if j == g.index else frozenset()
                continue
            x = combine(state.diff(g.s + k, j), cm.values[k - 1])
            if not x:
                vals[j] = frozenset()
                continue
            rem = target.levels[k].gb.reduce(x)
            if any(term_slot(term) < OFFSET for term in rem):
                raise ResolutionError(f"cannot lift chain map of {g.name} at F_{g.s + k} generator {j}")
            y = frozenset(reslot(term, -OFFSET) for term in rem)
            if combine(y, target.levels[k].diffs) != x:
                raise ResolutionError(f"lifted chain map of {g.name} does not commute with d")
            vals[j] = y
    return cm


def product(state: ResolutionState, g: ChartEntry, h: ChartEntry, chart: ExtChart | None = None,
            target: ResolutionState | None = None) -> list[ChartEntry]:
    """Yoneda product g * h as a list of chart generators (empty = zero).

    The coefficient on a generator v of F_{s_g + s_h} is the coefficient of
    the generator of h (with unit coefficient) in f_{s_h}(v).
    """
    target = target or state
    s, t = g.s + h.s, g.t + h.t
    if s > state.s_max or t > state.frontier():
        raise ResolutionError(f"product {g.name}*{h.name} lands outside the computed range")
    cm = lift_chain_map(state, g, h.s, t, target=target)
    unit_h = encode(h.index, 0)
    chart = chart or ext_chart(state, t_max=state.frontier())
    lookup = {(e.s, e.index): e for e in chart.entries}
    out = []
    for j in state.generators_at(s, t):
        if unit_h in cm.value(h.s, j):
            out.append(lookup[(s, j)])
    return out


def products(state: ResolutionState, gens: Sequence[str], t_max: int | None = None,
             chart: ExtChart | None = None, target: ResolutionState | None = None
             ) -> dict[tuple[str, str], list[str]]:
    """Products of each named generator with every generator of the target chart in range.

    With a separate ``target`` (a resolution of F_2) this is the action of
    Ext(F_2, F_2) on Ext(N, F_2).
    """
    target = target or state
    frontier = state.frontier()
    if t_max is not None and t_max > frontier:
        raise ResolutionError(f"t_max {t_max} is beyond the frontier {frontier}")
    t_max = frontier if t_max is None else t_max
    chart = chart or ext_chart(state, t_max=frontier)
    target_chart = chart if target is state else ext_chart(target)
    names = chart.by_name()
    table: dict[tuple[str, str], list[str]] = {}
    for name in gens:
        if name not in names:
            raise ResolutionError(f"unknown generator {name}")
        g = names[name]
        for h in target_chart.entries:
            if g.s + h.s > state.s_max or g.t + h.t > t_max or h.s > target.s_max:
                continue
            table[(g.name, h.name)] = [e.name for e in product(state, g, h, chart, target)]
    return table


def products_tsv(table: dict[tuple[str, str], list[str]]) -> str:
    rows = ["g1\tg2\tresult"]
    for (a, b), res in table.items():
        rows.append(f"{a}\t{b}\t{'+'.join(res)}")
    return "\n".join(rows) + "\n"


def extend_resolution(state: ResolutionState, s_max: int, t_max: int, **kw) -> ResolutionState:
    return state.extend(s_max, t_max, **kw)


def resolve(module: ModulePresentation | str = "F2", s_max: int = 5, t_max: int = 12,
            options: RunOptions | None = None) -> ResolutionState:
    if isinstance(module, str):
        module = load_module(module)
    state = ResolutionState(module, options)
    return state.extend(s_max, t_max)
