"""Minimal homeomorphisms presented computably.

Two presentations: odometers (add-with-carry over an eventually periodic
base sequence, least significant digit first) and ordered Bratteli-Vershik
diagrams (successor map: flip the first non-maximal edge, reset the prefix
below it to the minimal path).  Both evaluate on eventually periodic points
and on clopens, exactly.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction

from .errors import (
    CapExceededError,
    InputFormatError,
    UnsupportedSystemError,
)
from .space import Clopen, Point, ProductSpace, SpacePresentation


class System:
    """Common surface of the two presentations."""

    kind = "abstract"
    space: SpacePresentation

    def signature(self):
        return self.space.signature()

    def min_point(self) -> Point:
        raise NotImplementedError

    def image_point(self, x: Point, k: int) -> Point:
        raise NotImplementedError

    def image_clopen(self, a: Clopen, k: int) -> Clopen:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


# ---------------------------------------------------------------------------
# odometers


class Odometer(System):
    """Adding machine on a product of finite cyclic alphabets."""

    kind = "odometer"

    def __init__(self, prefix=(), period=(2,)):
        self.space = ProductSpace(prefix, period)

    @property
    def prefix(self):
        return self.space.prefix

    @property
    def period(self):
        return self.space.period

    def capacity(self, depth: int) -> int:
        return self.space.word_count(depth)

    def value(self, word: tuple) -> int:
        v = 0
        mult = 1
        for i, d in enumerate(word):
            v += d * mult
            mult *= self.space.size_at(i)
        return v

    def digits(self, v: int, depth: int) -> tuple:
        out = []
        for i in range(depth):
            b = self.space.size_at(i)
            out.append(v % b)
            v //= b
        return tuple(out)

    def min_point(self) -> Point:
        return Point(self.space, (), (0,))

    def image_point(self, x: Point, k: int) -> Point:
        if k == 0:
            return x
        sp = self.space
        # window deep enough that the leftover carry is -1, 0 or +1
        L = max(len(x.head), len(sp.prefix)) + 1
        while self.capacity(L) <= abs(k):
            L += 1
        w = x.prefix_word(L)
        t = self.value(w) + k
        cap = self.capacity(L)
        carry, r = divmod(t, cap)  # floor division: carry in {-1, 0, +1}
        new_head = self.digits(r, L)
        # tail of x starting at position L, as a rotated cycle
        rot = (L - len(x.head)) % len(x.tail)
        tail = x.tail[rot:] + x.tail[:rot]
        if carry == 0:
            return Point(sp, new_head, tail)
        # scan the periodic tail for the first digit that absorbs the carry
        span = math.lcm(len(tail), len(sp.period))
        expanded = list((tail * (span // len(tail) + 1))[:span])
        hit = None
        for j in range(span):
            b = sp.size_at(L + j)
            if carry > 0 and expanded[j] < b - 1:
                hit = j
                break
            if carry < 0 and expanded[j] > 0:
                hit = j
                break
        if hit is None:
            # all-max tail rolls over to zeros; all-zero tail borrows to max
            if carry > 0:
                return Point(sp, new_head, (0,))
            max_tail = tuple(sp.size_at(L + j) - 1 for j in range(len(sp.period)))
            return Point(sp, new_head, max_tail)
        changed = []
        for j in range(hit):
            changed.append(sp.size_at(L + j) - 1 if carry < 0 else 0)
        changed.append(expanded[hit] + (1 if carry > 0 else -1))
        rot2 = (hit + 1) % len(tail)
        new_tail = tail[rot2:] + tail[:rot2]
        return Point(sp, new_head + tuple(changed), new_tail)

    def image_clopen(self, a: Clopen, k: int) -> Clopen:
        # adding k permutes depth-d words by value shift mod capacity:
        # the carry past depth d is a bijection of tails, so no splitting
        if k == 0 or a.is_empty():
            return a
        d = a.depth
        if d == 0:
            return a
        cap = self.capacity(d)
        shifted = [self.digits((self.value(w) + k) % cap, d) for w in a.words]
        return Clopen.make(self.space, d, shifted)

    def to_json(self) -> dict:
        return {"odometer": {"prefix": list(self.prefix), "period": list(self.period)}}

    def __repr__(self):
        return f"Odometer(prefix={self.prefix}, period={self.period})"


def invariant_measure(sys: System, a: Clopen) -> Fraction:
    """Measure of a clopen under the unique invariant measure (odometers only)."""
    if not isinstance(sys, Odometer):
        raise UnsupportedSystemError(
            "exact invariant measure is only available for odometers"
        )
    if a.is_empty():
        return Fraction(0)
    return Fraction(len(a.words), sys.capacity(a.depth))


# ---------------------------------------------------------------------------
# ordered Bratteli-Vershik diagrams


class BVDiagram:
    """Ordered diagram data: vertex counts per level, ordered edges, period.

    Level 0 is a single root vertex.  Described levels are 1..L; levels
    beyond L repeat the patterns of levels period_start..L cyclically.
    Edges are given as (src, dst, order) triples over global vertex ids,
    root = 0, level-l vertices numbered consecutively after all shallower
    ones.  `order` is the position of the edge among the incoming edges of
    dst (the total order defining the Vershik successor).
    """

    def __init__(self, vertices, edges, period_start):
        self.counts = [int(n) for n in vertices]
        self.period_start = int(period_start)
        self.described = len(self.counts)
        if self.described < 1:
            raise InputFormatError("bv: need at least one level of vertices")
        if any(n < 1 for n in self.counts):
            raise InputFormatError("bv: every level needs at least one vertex")
        if not (1 <= self.period_start <= self.described):
            raise InputFormatError(
                f"bv: period_start must be in [1, {self.described}]"
            )
        # global id ranges per level
        self.level_start = [0, 1]
        for n in self.counts:
            self.level_start.append(self.level_start[-1] + n)
        # bucket edges by destination level and validate
        per_level = [[] for _ in range(self.described + 1)]  # index by level 1..L
        for idx, triple in enumerate(edges):
            if len(triple) != 3:
                raise InputFormatError(f"bv: edges[{idx}] must be [src, dst, order]")
            src, dst, order = (int(t) for t in triple)
            lv = self._level_of_vertex(dst, idx)
            if lv < 1:
                raise InputFormatError(f"bv: edges[{idx}]: destination is the root")
            if self._level_of_vertex(src, idx) != lv - 1:
                raise InputFormatError(
                    f"bv: edges[{idx}]: source must be one level above destination"
                )
            per_level[lv].append((src, dst, order))
        # canonical per-level edge lists, sorted by (dst, order)
        self.edges_by_level = [None]
        for lv in range(1, self.described + 1):
            lst = sorted(per_level[lv], key=lambda e: (e[1], e[2]))
            if not lst:
                raise InputFormatError(f"bv: level {lv} has no edges")
            self.edges_by_level.append(lst)
            # incoming orders must be exactly 0..indeg-1
            byd = {}
            for src, dst, order in lst:
                byd.setdefault(dst, []).append(order)
            lo = self.level_start[lv]
            hi = self.level_start[lv + 1]
            for v in range(lo, hi):
                orders = byd.get(v, [])
                if sorted(orders) != list(range(len(orders))) or not orders:
                    raise InputFormatError(
                        f"bv: vertex {v} has incoming orders {sorted(orders)}, "
                        f"expected 0..indeg-1 (nonempty)"
                    )
            # no dead ends: every vertex one level up must have an outgoing edge
            srcs = {src for src, _, _ in lst}
            up_lo = self.level_start[lv - 1]
            up_hi = self.level_start[lv]
            for v in range(up_lo, up_hi):
                if v not in srcs:
                    raise InputFormatError(f"bv: vertex {v} has no outgoing edge")
        self._edge_cache = {}
        self._in_cache = {}
        self._out_cache = {}
        # periodic continuation must chain: counts at the wrap must agree
        if self.counts[self.described - 1] != self.count_at(self.period_start - 1):
            raise InputFormatError(
                "bv: periodic continuation mismatch: last level has "
                f"{self.counts[-1]} vertices but level {self.period_start - 1} has "
                f"{self.count_at(self.period_start - 1)}"
            )

    def _level_of_vertex(self, v, idx):
        if v == 0:
            return 0
        for lv in range(1, self.described + 1):
            if self.level_start[lv] <= v < self.level_start[lv + 1]:
                return lv
        raise InputFormatError(f"bv: edges[{idx}]: vertex id {v} out of range")

    # -- virtual (periodically continued) level structure -------------------

    @property
    def period_len(self) -> int:
        return self.described - self.period_start + 1

    def pattern_level(self, level: int) -> int:
        if level <= self.described:
            return level
        return self.period_start + (level - self.period_start) % self.period_len

    def count_at(self, level: int) -> int:
        if level == 0:
            return 1
        return self.counts[self.pattern_level(level) - 1]

    def level_edges(self, level: int) -> list:
        """Canonical (src_local, dst_local, order) triples for a level."""
        pat = self.pattern_level(level)
        if pat not in self._edge_cache:
            lo_src = self.level_start[pat - 1]
            lo_dst = self.level_start[pat]
            self._edge_cache[pat] = [
                (src - lo_src, dst - lo_dst, order)
                for src, dst, order in self.edges_by_level[pat]
            ]
        return self._edge_cache[pat]

    def incoming(self, level: int, v_local: int) -> list:
        """Edge symbol indices into a local vertex, sorted by order."""
        key = (self.pattern_level(level), v_local)
        if key not in self._in_cache:
            out = []
            for sym, (_, dst, order) in enumerate(self.level_edges(level)):
                if dst == v_local:
                    out.append((order, sym))
            self._in_cache[key] = [sym for _, sym in sorted(out)]
        return self._in_cache[key]

    def outgoing(self, level: int, src_local: int) -> tuple:
        """Edge symbol indices out of a local vertex, ascending."""
        key = (self.pattern_level(level), src_local)
        if key not in self._out_cache:
            self._out_cache[key] = tuple(
                sym for sym, (src, _, _) in enumerate(self.level_edges(level)) if src == src_local
            )
        return self._out_cache[key]

    def edge(self, level: int, sym: int) -> tuple:
        return self.level_edges(level)[sym]

    def indegree(self, level: int, v_local: int) -> int:
        return sum(1 for _, dst, _ in self.level_edges(level) if dst == v_local)

    def is_max_edge(self, level: int, sym: int) -> bool:
        src, dst, order = self.edge(level, sym)
        return order == self.indegree(level, dst) - 1

    def is_min_edge(self, level: int, sym: int) -> bool:
        return self.edge(level, sym)[2] == 0

    def path_counts(self, level: int) -> list:
        """Number of finite paths from the root into each level vertex."""
        counts = [1]
        for lv in range(1, level + 1):
            nxt = [0] * self.count_at(lv)
            for src, dst, _ in self.level_edges(lv):
                nxt[dst] += counts[src]
            counts = nxt
        return counts

    def incidence_matrix(self, level: int) -> list:
        """m[u][v] = number of edges from level-(l-1) vertex u to level-l vertex v."""
        m = [[0] * self.count_at(level) for _ in range(self.count_at(level - 1))]
        for src, dst, _ in self.level_edges(level):
            m[src][dst] += 1
        return m


class PathSpace(SpacePresentation):
    """Edge-path tree of a Bratteli diagram; symbols are per-level edge indices."""

    __slots__ = ("diagram", "_sig")

    def __init__(self, diagram: BVDiagram):
        self.diagram = diagram
        d = diagram
        self._sig = (
            "bv",
            tuple(d.counts),
            tuple(tuple(e) for lv in range(1, d.described + 1) for e in d.edges_by_level[lv]),
            d.period_start,
        )

    def signature(self) -> tuple:
        return self._sig

    def terminal_vertex(self, word: tuple) -> int:
        v = 0
        for i, sym in enumerate(word):
            src, dst, _ = self.diagram.edge(i + 1, sym)
            if src != v:
                from .errors import InadmissibleWordError

                raise InadmissibleWordError(word, junction=i)
            v = dst
        return v

    def next_symbols(self, word: tuple) -> tuple:
        v = 0
        for i, sym in enumerate(word):
            edges = self.diagram.level_edges(i + 1)
            if sym >= len(edges) or edges[sym][0] != v:
                return ()
            v = edges[sym][1]
        return self.diagram.outgoing(len(word) + 1, v)

    def word_count(self, depth: int) -> int:
        return sum(self.diagram.path_counts(depth))

    def size_bound(self, depth: int) -> int:
        return len(self.diagram.level_edges(depth + 1))

    def point_probe(self, head_len: int, tail_len: int) -> int:
        return head_len + 2 * math.lcm(tail_len, self.diagram.period_len) + tail_len


class BVSystem(System):
    """Vershik map of a properly ordered Bratteli diagram."""

    kind = "bv"

    def __init__(self, diagram: BVDiagram, check_order: bool = True):
        self.diagram = diagram
        self.space = PathSpace(diagram)
        if check_order:
            report = self.proper_ordering_report()
            if report["verdict"] != "properly-ordered":
                raise InputFormatError(
                    f"bv: diagram is not properly ordered: {report['reason']}"
                )

    # -- extremal paths ------------------------------------------------------

    def _extreme_word_into(self, level: int, v_local: int, which: str) -> tuple:
        """The minimal or maximal finite path into a vertex, as symbols."""
        word = []
        v = v_local
        for lv in range(level, 0, -1):
            inc = self.diagram.incoming(lv, v)
            sym = inc[0] if which == "min" else inc[-1]
            word.append(sym)
            v = self.diagram.edge(lv, sym)[0]
        return tuple(reversed(word))

    def min_word_into(self, level: int, v_local: int) -> tuple:
        return self._extreme_word_into(level, v_local, "min")

    def max_word_into(self, level: int, v_local: int) -> tuple:
        return self._extreme_word_into(level, v_local, "max")

    def extreme_words(self, depth: int, which: str) -> set:
        """All all-min (or all-max) words of a depth: one per vertex."""
        return {
            self._extreme_word_into(depth, v, which)
            for v in range(self.diagram.count_at(depth))
        }

    def _thread(self, which: str):
        """Backward-stable vertex thread of the extremal path at each level.

        Returns (verdict, data): verdict "unique" with the per-level vertex
        list over levels 1..settle, or "multiple" with two witness vertices.
        """
        d = self.diagram
        vmax = max(d.count_at(l) for l in range(d.period_start, d.described + 1))
        settle = d.period_start + d.period_len * (vmax + 2)
        # sets of level-k vertices lying on extremal paths from level `deep`
        deep = settle + d.period_len * (vmax + 2)
        sets = {deep: set(range(d.count_at(deep)))}
        for lv in range(deep, 0, -1):
            prev = set()
            for v in sets[lv]:
                inc = d.incoming(lv, v)
                sym = inc[0] if which == "min" else inc[-1]
                prev.add(d.edge(lv, sym)[0])
            sets[lv - 1] = prev
        for k in range(d.period_start - 1, d.period_start - 1 + d.period_len):
            if len(sets[k]) > 1:
                return "multiple", (k, sorted(sets[k])[:2])
        thread = [sorted(sets[k])[0] if sets[k] else 0 for k in range(0, settle + 1)]
        return "unique", thread

    def proper_ordering_report(self) -> dict:
        vm, dm = self._thread("min")
        vx, dx = self._thread("max")
        if vm == "multiple":
            level, pair = dm
            return {
                "verdict": "failed",
                "reason": f"two distinct minimal paths pass through level-{level} "
                f"vertices {pair[0]} and {pair[1]}",
            }
        if vx == "multiple":
            level, pair = dx
            return {
                "verdict": "failed",
                "reason": f"two distinct maximal paths pass through level-{level} "
                f"vertices {pair[0]} and {pair[1]}",
            }
        return {"verdict": "properly-ordered", "reason": ""}

    def _extreme_point(self, which: str) -> Point:
        verdict, thread = self._thread(which)
        if verdict != "unique":
            raise InputFormatError("diagram has no unique extremal path")
        d = self.diagram
        # in the periodic regime the thread repeats with the pattern period
        start = d.period_start
        T = d.period_len
        syms = []
        for lv in range(1, start + T):
            v = thread[lv]
            inc = d.incoming(lv, v)
            syms.append(inc[0] if which == "min" else inc[-1])
        head = tuple(syms[: start - 1])
        tail = tuple(syms[start - 1 : start - 1 + T])
        return Point(self.space, head, tail)

    def min_point(self) -> Point:
        return self._extreme_point("min")

    def max_point(self) -> Point:
        return self._extreme_point("max")

    # -- successor on words ---------------------------------------------------

    def word_succ(self, word: tuple) -> tuple | None:
        """Vershik successor of a finite path; None when the word is maximal."""
        d = self.diagram
        for j, sym in enumerate(word):
            lv = j + 1
            if not d.is_max_edge(lv, sym):
                src, dst, order = d.edge(lv, sym)
                inc = d.incoming(lv, dst)
                nxt = inc[inc.index(sym) + 1]
                new_src = d.edge(lv, nxt)[0]
                prefix = self.min_word_into(j, new_src) if j > 0 else ()
                return prefix + (nxt,) + word[j + 1 :]
        return None

    def word_pred(self, word: tuple) -> tuple | None:
        d = self.diagram
        for j, sym in enumerate(word):
            lv = j + 1
            if not d.is_min_edge(lv, sym):
                src, dst, order = d.edge(lv, sym)
                inc = d.incoming(lv, dst)
                prv = inc[inc.index(sym) - 1]
                new_src = d.edge(lv, prv)[0]
                prefix = self.max_word_into(j, new_src) if j > 0 else ()
                return prefix + (prv,) + word[j + 1 :]
        return None

    # -- dynamics on points -----------------------------------------------------

    def _step_point(self, x: Point, forward: bool) -> Point:
        d = self.diagram
        probe = self.space.point_probe(len(x.head), len(x.tail))
        w = x.prefix_word(probe)
        wanted = d.is_max_edge if forward else d.is_min_edge
        for j in range(probe):
            if not wanted(j + 1, w[j]):
                stepped = self.word_succ(w[: j + 1]) if forward else self.word_pred(w[: j + 1])
                rot = (probe - len(x.head)) % len(x.tail)
                tail = x.tail[rot:] + x.tail[:rot]
                return Point(self.space, stepped + w[j + 1 :], tail)
        # the whole expansion is extremal, hence the point is the extremal path
        return self.min_point() if forward else self.max_point()

    def image_point(self, x: Point, k: int) -> Point:
        for _ in range(abs(k)):
            x = self._step_point(x, forward=(k > 0))
        return x

    # -- dynamics on clopens -------------------------------------------------------

    def _step_words(self, words: set, depth: int, forward: bool) -> Clopen:
        """Image of a union of depth-d cylinders under the (co)Vershik map."""
        d = self.diagram
        step = self.word_succ if forward else self.word_pred
        extreme = "max" if forward else "min"
        out: set = set()
        regular = set()
        frontier = set()
        bound = self.extreme_words(depth, extreme)
        for w in words:
            (frontier if w in bound else regular).add(w)
        for w in regular:
            out.add(step(w))
        out_depth = depth
        if frontier:
            cap = depth + d.period_len * (max(d.count_at(l) for l in range(1, d.described + 1)) + 3) + 4
            cur = frontier
            D = depth
            while True:
                bound_D = self.extreme_words(D, extreme)
                if cur == bound_D:
                    # image of the full extremal bundle: complement of the
                    # stepped images of every non-extremal word
                    all_words = set(self.space.words_at_depth(D))
                    block = all_words - {step(w) for w in all_words - bound_D}
                    out |= block
                    out_depth = max(out_depth, D)
                    break
                if not cur:
                    break
                if D >= cap:
                    raise CapExceededError(
                        "extremal-bundle image did not stabilize; diagram is not "
                        "properly ordered or the cap is too small"
                    )
                # split one level deeper: non-extremal extensions step as words,
                # extremal extensions stay in the frontier
                nxt_bound = self.extreme_words(D + 1, extreme)
                nxt = set()
                for w in cur:
                    for u in self.space.extensions(w, D + 1):
                        if u in nxt_bound:
                            nxt.add(u)
                        else:
                            out_depth = max(out_depth, D + 1)
                            out.add(step(u))
                cur = nxt
                D += 1
        # normalize mixed depths
        final = set()
        for w in out:
            final.update(self.space.extensions(w, out_depth))
        return Clopen.make(self.space, out_depth, final)

    def image_clopen(self, a: Clopen, k: int) -> Clopen:
        if k == 0 or a.is_empty() or a.is_full():
            return a
        cur = a
        for _ in range(abs(k)):
            depth = max(cur.depth, 1)
            cur = self._step_words(cur.refined_words(depth), depth, forward=(k > 0))
        return cur

    def to_json(self) -> dict:
        d = self.diagram
        edges = []
        for lv in range(1, d.described + 1):
            edges.extend([list(e) for e in d.edges_by_level[lv]])
        return {
            "bv": {
                "vertices": list(d.counts),
                "edges": edges,
                "period_start": d.period_start,
            }
        }

    def __repr__(self):
        return f"BVSystem(counts={self.diagram.counts}, period_start={self.diagram.period_start})"


# ---------------------------------------------------------------------------
# minimality evidence


def _matrix_mul(a, b):
    n, mid, m = len(a), len(b), len(b[0])
    out = [[0] * m for _ in range(n)]
    for i in range(n):
        for k in range(mid):
            if a[i][k]:
                aik = a[i][k]
                for j in range(m):
                    out[i][j] += aik * b[k][j]
    return out


def minimality_evidence(sys: System, horizon: int = 64) -> dict:
    """Minimality report: certified for odometers, matrix evidence for BV."""
    if horizon < 1:
        raise InputFormatError("horizon must be >= 1")
    if isinstance(sys, Odometer):
        return {"verdict": "certified", "detail": "odometer: orbit of 0 is dense by carry arithmetic"}
    if not isinstance(sys, BVSystem):
        raise UnsupportedSystemError(f"unknown system kind {sys.kind!r}")
    d = sys.diagram
    # telescoped incidence over one full period of the periodic regime
    prod = None
    for lv in range(d.period_start, d.described + 1):
        m = d.incidence_matrix(lv)
        prod = m if prod is None else _matrix_mul(prod, m)
    n = len(prod)
    if n != len(prod[0]):
        # counts validated to wrap, so this cannot happen; guard anyway
        raise InputFormatError("bv: telescoped incidence is not square")
    wielandt = n * n - 2 * n + 2 if n > 1 else 1
    power = prod
    t = 1
    limit = min(horizon, max(wielandt, 1))
    while t <= limit:
        if all(all(e > 0 for e in row) for row in power):
            order = sys.proper_ordering_report()
            if order["verdict"] != "properly-ordered":
                return {"verdict": "failed", "witness": order["reason"]}
            return {
                "verdict": "evidence-to-horizon",
                "detail": f"telescoped incidence is primitive (positive at power {t}); "
                f"unique minimal and maximal paths verified",
            }
        power = _matrix_mul(power, prod)
        t += 1
    # not primitive within the bound: find an unreachable pair if reducible
    reach = [[1 if i == j or prod[i][j] else 0 for j in range(n)] for i in range(n)]
    for _ in range(n):
        reach = [[1 if reach[i][j] or any(reach[i][k] and reach[k][j] for k in range(n)) else 0 for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            if not reach[i][j]:
                return {
                    "verdict": "failed",
                    "witness": f"vertex pair ({i}, {j}) unreachable in the telescoped diagram",
                }
    return {
        "verdict": "failed",
        "witness": "telescoped incidence is irreducible but not primitive "
        "(cyclic class structure)",
    }


# ---------------------------------------------------------------------------
# descriptors


def load_system(obj) -> System:
    """Build a system from a JSON-style descriptor dict."""
    if not isinstance(obj, dict) or len(obj) != 1:
        raise InputFormatError(
            "descriptor must be exactly one of {'odometer': ...} or {'bv': ...}"
        )
    if "odometer" in obj:
        body = obj["odometer"]
        if not isinstance(body, dict):
            raise InputFormatError("odometer: body must be an object")
        prefix = body.get("prefix", [])
        period = body.get("period")
        if period is None:
            raise InputFormatError("odometer: missing 'period'")
        return Odometer(prefix, period)
    if "bv" in obj:
        body = obj["bv"]
        for key in ("vertices", "edges", "period_start"):
            if key not in body:
                raise InputFormatError(f"bv: missing {key!r}")
        diagram = BVDiagram(body["vertices"], body["edges"], body["period_start"])
        return BVSystem(diagram)
    raise InputFormatError(f"unknown system kind {set(obj)!r}")


def system_from_file(path: str) -> System:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputFormatError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return load_system(obj)


def stationary_bv(matrix, check_order: bool = True) -> BVSystem:
    """Stationary diagram from a square incidence matrix.

    matrix[u][v] = number of edges from level vertex u to next-level vertex v.
    Incoming edges are ordered by source index.  A single top level connects
    the root to every vertex by one edge.  check_order=False admits diagrams
    without unique extremal paths, for evidence reporting only.
    """
    n = len(matrix)
    vertices = [n, n]
    edges = []
    for v in range(n):
        edges.append([0, 1 + v, 0])
    # level 2: repeatable pattern
    incoming_count = [0] * n
    for u in range(n):
        for v in range(n):
            for _ in range(matrix[u][v]):
                edges.append([1 + u, 1 + n + v, incoming_count[v]])
                incoming_count[v] += 1
    if any(c == 0 for c in incoming_count):
        raise InputFormatError("stationary matrix leaves a vertex with no incoming edge")
    return BVSystem(BVDiagram(vertices, edges, 2), check_order=check_order)
