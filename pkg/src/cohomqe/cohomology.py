"""
Betti numbers of a union of linear pieces.

Unions of products of linear subspaces can carry odd cohomology (a cycle of
lines has ``b_1 = 1``), so their Grothendieck class alone does not give Betti
numbers.  This module computes them exactly.

Method.  For the closed cover of ``Y`` by its pieces, the Mayer-Vietoris
spectral sequence has ``E_1^{p,q} = ⊕_{|S|=p+1} H^q(X_S)`` with every
``X_S`` a product of projective spaces, so ``E_1^{p,q}`` is pure of weight
``q`` and the sequence degenerates at ``E_2``.  Restriction maps send each
monomial ``h^a`` in the hyperplane classes to itself or to zero, so the
``E_1`` page splits over monomials: the summand for ``a`` is the cochain
complex of the nerve of the pieces restricted to intersections ``X_S`` with
``dim_b X_S >= a_b`` in every block.

Hence ``b_k(Y) = sum over p + 2|a| = k of dim H^p(Γ_a)``.

Two chain models for ``Γ_a`` are provided: the crosscut complex on the
minimal admissible intersections, and a product cell complex built from
per-group order complexes (see :class:`ProductCells`), which is far smaller
for joins.  Both are reduced by unit-pivot elimination before ranks are taken.
"""
from __future__ import annotations

import heapq
import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from math import comb, gcd
from typing import Sequence

from . import linalg
from .errors import InvalidArgument, PieceLimitExceeded
from .motivic import DEFAULT_PIECE_CAP, formula_to_pieces
from .polyring import IntPoly, pseudo

DEFAULT_FACE_CAP = 500_000


class _Groups:
    """Finest split of each block's coordinates into groups that no piece equation straddles."""

    def __init__(self, pieces):
        blocks = pieces[0].blocks
        self.blocks = blocks
        self.groups: list[tuple[int, tuple[int, ...]]] = []
        for b, n in enumerate(blocks.dims):
            parent = list(range(n + 1))

            def find(i):
                while parent[i] != i:
                    parent[i] = parent[parent[i]]
                    i = parent[i]
                return i

            used = set()
            for p in pieces:
                for row in p.systems[b]:
                    nz = [j for j, x in enumerate(row) if x]
                    used.update(nz)
                    for j in nz[1:]:
                        parent[find(j)] = find(nz[0])
            free = [j for j in range(n + 1) if j not in used]
            for j in free[1:]:
                parent[find(j)] = find(free[0])
            comps = defaultdict(list)
            for j in range(n + 1):
                comps[find(j)].append(j)
            for coords in sorted(comps.values()):
                self.groups.append((b, tuple(coords)))

    def coarsen(self, pieces) -> None:
        """Merge groups of a block that partition the pieces the same way."""
        merged: dict = {}
        for g, (b, coords) in enumerate(self.groups):
            labels: dict = {}
            pattern = []
            for p in pieces:
                part = _restrict(p, b, coords)
                pattern.append(labels.setdefault(part, len(labels)))
            merged.setdefault((b, tuple(pattern)), []).extend(coords)
        self.groups = sorted((b, tuple(sorted(c))) for (b, _), c in merged.items())

    def split(self, piece) -> list[linalg.Basis]:
        """Constraint basis of ``piece`` on each group, in group-local coordinates."""
        return [_restrict(piece, b, coords) for b, coords in self.groups]


def _restrict(piece, b: int, coords) -> linalg.Basis:
    return tuple(tuple(row[j] for j in coords) for row in piece.systems[b]
                 if any(row[j] for j in coords))


@dataclass
class Lattice:
    """Nonempty intersections of the pieces, with the data the Betti computation needs."""

    elements: list[tuple[int, ...]]
    dims: list[tuple[int, ...]]
    support: list[int]          # bitmask of pieces containing the element
    child_dims: list[set]       # dims of elements x ∩ P one step below
    piece_index: list[int]      # element index of each piece
    nblocks: int
    extra: dict = field(default_factory=dict)


class Arrangement:
    def __init__(self, pieces: Sequence, face_cap: int = DEFAULT_FACE_CAP):
        pieces = [p for p in pieces if not p.is_empty()]
        self.pieces = pieces
        self.face_cap = face_cap
        if not pieces:
            self.lattice = None
            return
        self._groups = _Groups(pieces)
        G = len(self._groups.groups)
        self._ids: list[dict] = [dict() for _ in range(G)]
        self._bases: list[list] = [[] for _ in range(G)]
        self._inter: list[dict] = [dict() for _ in range(G)]
        self._mask: list[dict] = [dict() for _ in range(G)]
        self._tuples = [tuple(self._intern(g, s) for g, s in enumerate(self._groups.split(p)))
                        for p in pieces]
        # distinct components of pieces per group, with the mask of pieces having them
        self._components: list[dict] = [defaultdict(int) for _ in range(G)]
        for i, t in enumerate(self._tuples):
            for g, sid in enumerate(t):
                self._components[g][sid] |= 1 << i
        self.lattice = self._build()

    # -- per-group interned subspaces ------------------------------------------------
    def _intern(self, g: int, basis) -> int:
        ids = self._ids[g]
        if basis not in ids:
            ids[basis] = len(self._bases[g])
            self._bases[g].append(basis)
        return ids[basis]

    def _meet(self, g: int, a: int, b: int) -> int:
        if a == b:
            return a
        key = (a, b) if a < b else (b, a)
        memo = self._inter[g]
        if key not in memo:
            memo[key] = self._intern(g, linalg.span_sum(self._bases[g][a], self._bases[g][b]))
        return memo[key]

    def _contain_mask(self, g: int, sid: int) -> int:
        memo = self._mask[g]
        if sid not in memo:
            basis = self._bases[g][sid]
            m = 0
            for cid, pm in self._components[g].items():
                if linalg.contains(basis, self._bases[g][cid]):
                    m |= pm
            memo[sid] = m
        return memo[sid]

    def _dims(self, t: tuple[int, ...]) -> tuple[int, ...] | None:
        cone = [0] * len(self.pieces[0].blocks)
        for g, sid in enumerate(t):
            b, coords = self._groups.groups[g]
            cone[b] += len(coords) - len(self._bases[g][sid])
        if any(c == 0 for c in cone):
            return None
        return tuple(c - 1 for c in cone)

    def _support(self, t) -> int:
        m = (1 << len(self.pieces)) - 1
        for g, sid in enumerate(t):
            m &= self._contain_mask(g, sid)
            if not m:
                break
        return m

    def _build(self) -> Lattice:
        index: dict[tuple, int] = {}
        elements, dims, support, child_dims = [], [], [], []
        queue = []

        def add(t, d):
            if t in index:
                return index[t]
            index[t] = len(elements)
            elements.append(t)
            dims.append(d)
            support.append(self._support(t))
            child_dims.append(set())
            queue.append(index[t])
            return index[t]

        piece_index = [add(t, self._dims(t)) for t in self._tuples]
        G = len(self._tuples[0])
        head = 0
        while head < len(queue):
            i = queue[head]
            head += 1
            x, sup = elements[i], support[i]
            seen = set()
            for pi, pt in enumerate(self._tuples):
                if sup >> pi & 1:
                    continue
                y = tuple(self._meet(g, x[g], pt[g]) for g in range(G))
                if y in seen:
                    continue
                seen.add(y)
                d = self._dims(y)
                if d is None:
                    continue
                add(y, d)
                child_dims[i].add(d)
        return Lattice(elements, dims, support, child_dims, piece_index, len(self.pieces[0].blocks))

    # -- homology ------------------------------------------------------------------------
    def cells(self):
        """Regions of monomial exponents ``a`` on which the admissible set is constant.

        Yields ``(threshold, weight_poly)`` where ``threshold`` is the per-block
        dimension bound defining the admissible elements and ``weight_poly`` is
        ``sum T^{2|a|}`` over the exponents in the region.
        """
        lat = self.lattice
        per_block = []
        for b in range(lat.nblocks):
            vals = sorted({d[b] for d in lat.dims})
            intervals, lo = [], 0
            for v in vals:
                intervals.append((lo, v))
                lo = v + 1
            per_block.append(intervals)
        for combo in itertools.product(*per_block):
            weight = IntPoly([1])
            for lo, hi in combo:
                weight = weight * IntPoly([1 if (k % 2 == 0 and k // 2 >= lo) else 0
                                           for k in range(2 * hi + 1)])
            yield tuple(hi for _, hi in combo), weight

    def crosscut_complex(self, threshold) -> list[frozenset]:
        """Facets of the crosscut complex for the elements with ``dims >= threshold``."""
        lat = self.lattice

        def ok(d):
            return all(x >= t for x, t in zip(d, threshold))

        atoms = [i for i, d in enumerate(lat.dims)
                 if ok(d) and not any(ok(c) for c in lat.child_dims[i])]
        facets = []
        for pi, ei in enumerate(lat.piece_index):
            if not ok(lat.dims[ei]):
                continue
            facets.append(frozenset(a for a in atoms if lat.support[a] >> pi & 1))
        return facets

    def poincare(self, max_degree: int | None = None) -> IntPoly:
        """Poincare polynomial; with ``max_degree`` only coefficients up to that degree."""
        if self.lattice is None:
            return IntPoly()
        total = IntPoly()
        cache: dict = {}
        for threshold, weight in self.cells():
            low = next(k for k, c in enumerate(weight.coeffs) if c)
            if max_degree is not None and low > max_degree:
                continue
            need = None if max_degree is None else max_degree - low
            facets = self.crosscut_complex(threshold)
            if not facets:
                continue
            key = (frozenset(facets), need)
            if key not in cache:
                cache[key] = simplicial_betti(facets, self.face_cap, need)
            total = total + IntPoly(cache[key]) * weight
        if max_degree is not None:
            total = IntPoly(total.coeffs[:max_degree + 1])
        return total


def dual_facets(facets) -> list[frozenset]:
    """Facets of the Dowker dual: one per vertex, listing the facets that contain it."""
    member = defaultdict(set)
    for i, f in enumerate(facets):
        for v in f:
            member[v].add(i)
    return _maximal({frozenset(s) for s in member.values()})


def _face_estimate(facets, top: int | None) -> int:
    total = 0
    for f in facets:
        n = len(f)
        hi = n if top is None else min(n, top + 1)
        total += sum(comb(n, k) for k in range(1, hi + 1))
    return total


def strong_collapse(facets) -> list[frozenset]:
    """Remove dominated vertices until none is left; preserves the homotopy type.

    Vertex ``v`` is dominated by ``w`` when every facet containing ``v``
    also contains ``w``; its link is then a cone with apex ``w``.
    """
    facets = _maximal(set(facets))
    while True:
        verts = sorted(set().union(*facets)) if facets else []
        member = {v: 0 for v in verts}
        for i, f in enumerate(facets):
            for v in f:
                member[v] |= 1 << i
        victim = None
        for v in verts:
            mv = member[v]
            for w in verts:
                if w != v and member[w] & mv == mv:
                    victim = v
                    break
            if victim is not None:
                break
        if victim is None:
            return facets
        facets = _maximal({f - {victim} for f in facets})


def _maximal(facets) -> list[frozenset]:
    ordered = sorted(facets, key=len, reverse=True)
    keep: list[frozenset] = []
    for f in ordered:
        if not any(f <= g for g in keep):
            keep.append(f)
    return sorted(keep, key=lambda f: sorted(f))


def simplicial_betti(facets, face_cap: int = DEFAULT_FACE_CAP,
                     max_degree: int | None = None) -> list[int]:
    """Rational Betti numbers of the complex generated by ``facets``.

    With ``max_degree`` only ``b_0 .. b_max_degree`` are returned, which needs
    faces up to dimension ``max_degree + 1``.  The complex or its Dowker dual
    is used, whichever has fewer faces in that range after strong collapse.
    """
    top = None if max_degree is None else max_degree + 1
    primal = strong_collapse(facets)
    if _face_estimate(primal, top) > 64:
        dual = strong_collapse(dual_facets(primal))
        if _face_estimate(dual, top) < _face_estimate(primal, top):
            primal = dual
    faces_by_dim: dict[int, set] = defaultdict(set)
    count = 0
    for f in primal:
        verts = sorted(f)
        hi = len(verts) if top is None else min(len(verts), top + 1)
        for k in range(1, hi + 1):
            layer = faces_by_dim[k - 1]
            for sub in itertools.combinations(verts, k):
                if sub not in layer:
                    layer.add(sub)
                    count += 1
                    if count > face_cap:
                        raise PieceLimitExceeded(
                            f"crosscut complex exceeds {face_cap} faces", limit=face_cap)
    if not faces_by_dim:
        return []
    return _cell_betti(faces_by_dim, _simplex_boundary, max_degree)


def _simplex_boundary(s: tuple) -> dict:
    if len(s) == 1:
        return {}
    return {s[:j] + s[j + 1:]: -1 if j % 2 else 1 for j in range(len(s))}


def sparse_rank(rows: list[dict]) -> int:
    """Exact rank of an integer matrix given as sparse rows, by fraction-free elimination."""
    pivots: dict[int, dict] = {}
    rank = 0
    for row in rows:
        r = dict(row)
        while r:
            col = min(r)
            if col not in pivots:
                g = 0
                for v in r.values():
                    g = gcd(g, v)
                if g > 1:
                    r = {c: v // g for c, v in r.items()}
                pivots[col] = r
                rank += 1
                break
            p = pivots[col]
            a, b = p[col], r[col]
            new = {c: a * v for c, v in r.items()}
            for c, v in p.items():
                nv = new.get(c, 0) - b * v
                if nv:
                    new[c] = nv
                else:
                    new.pop(c, None)
            r = new
    return rank


class ProductCells:
    """Cellular model of the admissible posets as a subcomplex of a product.

    Every intersection is a tuple of per-group subspaces, so the admissible
    poset maps by a closure operator onto tuples of per-group subspaces that
    lie inside some piece.  Chains of such tuples triangulate a union of
    products of per-group order complexes, whose cells are tuples of
    per-group chains.  A cell is kept when its tops fit inside one piece and
    the bottoms meet the dimension threshold in every block.
    """

    def __init__(self, pieces: Sequence, face_cap: int = DEFAULT_FACE_CAP):
        pieces = [p for p in pieces if not p.is_empty()]
        self.face_cap = face_cap
        self.cells_list: list[tuple[int, ...]] = []
        if not pieces:
            self.groups = None
            return
        self.groups = _Groups(pieces)
        self.groups.coarsen(pieces)
        gl = self.groups.groups
        self.nblocks = len(pieces[0].blocks)
        split = [self.groups.split(p) for p in pieces]
        self.chains = []      # per group: list of (elements bottom-first, level, dim)
        down = []             # per group: element -> set of elements below or equal
        comp_ids = []         # per piece: per group element id
        for g, (b, coords) in enumerate(gl):
            elems: list = []
            ids: dict = {}

            def intern(basis):
                if basis not in ids:
                    ids[basis] = len(elems)
                    elems.append(basis)
                return ids[basis]

            for sp in split:
                intern(sp[g])
            frontier = list(range(len(elems)))
            while frontier:
                new = []
                for i in frontier:
                    for j in range(len(elems)):
                        k0 = len(elems)
                        k = intern(linalg.span_sum(elems[i], elems[j]))
                        if k == k0:
                            new.append(k)
                frontier = new
            n = len(elems)
            below = [[linalg.contains(elems[x], elems[y]) for y in range(n)] for x in range(n)]
            # below[x][y]: subspace x lies inside subspace y
            cd = [len(coords) - len(e) for e in elems]
            chains = []

            def extend(chain):
                chains.append((tuple(chain), cd[chain[0]], len(chain) - 1))
                last = chain[-1]
                for y in range(n):
                    if y != last and below[last][y]:
                        extend(chain + [y])

            for x in range(n):
                extend([x])
            self.chains.append(chains)
            down.append([frozenset(x for x in range(n) if below[x][y]) for y in range(n)])
            comp_ids.append([ids[sp[g]] for sp in split])
        self._group_block = [b for b, _ in gl]
        tops = set()
        for pi in range(len(pieces)):
            tops.update(itertools.product(*(down[g][comp_ids[g][pi]] for g in range(len(gl)))))
        by_top = [defaultdict(list) for _ in gl]
        for g, chains in enumerate(self.chains):
            for ci, (ch, _, _) in enumerate(chains):
                by_top[g][ch[-1]].append(ci)
        cells = []
        for t in tops:
            for cell in itertools.product(*(by_top[g][t[g]] for g in range(len(gl)))):
                if self._levels(cell) is not None:
                    cells.append(cell)
                    if len(cells) > face_cap:
                        raise PieceLimitExceeded(f"product cell model exceeds {face_cap} cells",
                                                 limit=face_cap)
        self.cells_list = cells

    def _levels(self, cell) -> tuple[int, ...] | None:
        cone = [0] * self.nblocks
        for g, ci in enumerate(cell):
            cone[self._group_block[g]] += self.chains[g][ci][1]
        if any(c == 0 for c in cone):
            return None
        return tuple(c - 1 for c in cone)

    def _dim(self, cell) -> int:
        return sum(self.chains[g][ci][2] for g, ci in enumerate(cell))

    def _boundary(self, cell):
        out = {}
        sign = 1
        for g, ci in enumerate(cell):
            ch, _, dim = self.chains[g][ci]
            if dim:
                lookup = self._chain_index[g]
                for i in range(len(ch)):
                    face = list(cell)
                    face[g] = lookup[ch[:i] + ch[i + 1:]]
                    out[tuple(face)] = sign * (-1 if i % 2 else 1)
            if dim % 2:
                sign = -sign
        return out

    def poincare(self, max_degree: int | None = None) -> IntPoly:
        if self.groups is None:
            return IntPoly()
        self._chain_index = [{ch: i for i, (ch, _, _) in enumerate(chains)}
                             for chains in self.chains]
        info = [(c, self._levels(c), self._dim(c)) for c in self.cells_list]
        per_block = []
        for b in range(self.nblocks):
            vals = sorted({lv[b] for _, lv, _ in info})
            intervals, lo = [], 0
            for v in vals:
                intervals.append((lo, v))
                lo = v + 1
            per_block.append(intervals)
        total = IntPoly()
        for combo in itertools.product(*per_block):
            weight = IntPoly([1])
            for lo, hi in combo:
                weight = weight * IntPoly([1 if (k % 2 == 0 and k // 2 >= lo) else 0
                                           for k in range(2 * hi + 1)])
            low = 2 * sum(lo for lo, _ in combo)
            if max_degree is not None and low > max_degree:
                continue
            need = None if max_degree is None else max_degree - low
            threshold = tuple(hi for _, hi in combo)
            by_dim: dict[int, list] = defaultdict(list)
            for c, lv, d in info:
                if all(x >= t for x, t in zip(lv, threshold)) and (need is None or d <= need + 1):
                    by_dim[d].append(c)
            if not by_dim:
                continue
            total = total + IntPoly(_cell_betti(by_dim, self._boundary, need)) * weight
        if max_degree is not None:
            total = IntPoly(total.coeffs[:max_degree + 1])
        return total


def _cell_betti(by_dim: dict, boundary, need: int | None) -> list[int]:
    cells = {c: d for d, cs in by_dim.items() for c in cs}
    bd = {c: boundary(c) for c in cells}
    reduce_chain_complex(cells, bd)
    top = max(by_dim)
    index = {k: {} for k in range(top + 1)}
    for c, d in sorted(cells.items()):
        index[d][c] = len(index[d])
    ranks = {0: 0, top + 1: 0}
    for k in range(1, top + 1):
        lower = index[k - 1]
        rows = [{lower[f]: v for f, v in bd[c].items()} for c in index[k]]
        ranks[k] = sparse_rank(rows)
    betti = [len(index[k]) - ranks[k] - ranks[k + 1] for k in range(top + 1)]
    if need is not None:
        betti = betti[:need + 1]
    return betti


def reduce_chain_complex(cells: dict, bd: dict) -> None:
    """Shrink a chain complex in place without changing its homology.

    Repeatedly cancels a pair ``(face, cell)`` whose incidence is a unit,
    correcting the other cofaces of the face by Gaussian elimination.  Pairs
    with the least fill-in go first, so collapses come for free.
    """
    cob: dict = {c: set() for c in cells}
    for c, faces in bd.items():
        for f in faces:
            cob[f].add(c)
    heap = [(len(bd[c]), c) for c in cells if bd[c]]
    heapq.heapify(heap)
    while heap:
        size, s = heapq.heappop(heap)
        if s not in cells or not bd[s]:
            continue
        if size != len(bd[s]):
            heapq.heappush(heap, (len(bd[s]), s))
            continue
        units = [f for f, v in bd[s].items() if v in (1, -1)]
        if not units:
            continue
        t = min(units, key=lambda f: len(cob[f]))
        cst = bd[s][t]
        col = bd.pop(s)
        for f in col:
            cob[f].discard(s)
        for r in cob.pop(s):
            del bd[r][s]
        del cells[s]
        del col[t]
        for x in cob.pop(t):
            row = bd[x]
            k = row.pop(t) * cst      # cst is +-1, so this is row[t] / cst
            for f, v in col.items():
                nv = row.get(f, 0) - k * v
                if nv:
                    if f not in row:
                        cob[f].add(x)
                    row[f] = nv
                else:
                    row.pop(f, None)
                    cob[f].discard(x)
            heapq.heappush(heap, (len(row), x))
        for f in bd.pop(t):
            cob[f].discard(t)
        del cells[t]


def pieces_poincare(pieces: Sequence, face_cap: int = DEFAULT_FACE_CAP,
                    max_degree: int | None = None, method: str = "cells") -> IntPoly:
    """Poincare polynomial of the union of the pieces, optionally truncated.

    ``method`` picks the chain model: ``"cells"`` (product cells, the default)
    or ``"crosscut"`` (crosscut complexes on minimal intersections).
    """
    if method == "cells":
        return ProductCells(pieces, face_cap).poincare(max_degree)
    if method == "crosscut":
        return Arrangement(pieces, face_cap).poincare(max_degree)
    raise InvalidArgument(f"unknown method {method!r}; use 'cells' or 'crosscut'")


def formula_poincare(f, max_degree: int | None = None, cap: int | None = None,
                     face_cap: int = DEFAULT_FACE_CAP, method: str = "cells") -> IntPoly:
    """Poincare polynomial of the realization of a quantifier-free formula."""
    pieces = formula_to_pieces(f.quantifier_free(), DEFAULT_PIECE_CAP if cap is None else cap)
    return pieces_poincare(pieces, face_cap, max_degree, method)


def formula_pseudo_poincare(f, **kw) -> IntPoly:
    """``sum_i b_{2i} T^i`` of the realization of a quantifier-free formula."""
    return pseudo(formula_poincare(f, **kw))
