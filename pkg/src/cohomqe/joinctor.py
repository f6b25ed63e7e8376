"""
Join parameters and the quantifier-free join formulas.

Layout of a joined block: the block of dimension ``m_j`` is cut into
``2 d_{j-1} + 2`` consecutive slots of ``f_j + 1`` coordinates each, and slot
``t`` holds the copy of the ``j``-th bound block indexed by ``t``.  The
``N_j`` joined blocks at level ``j`` are ordered lexicographically by their
index tuple ``(i_1, ..., i_{j-1})``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import prod
from typing import Sequence

from .errors import BlockMismatch, InvalidArgument
from .formula import (
    FALSE,
    TRUE,
    And,
    ProperFormula,
    _Const,
    block_rename_map,
    iter_atoms,
    node_count,
    rename_tree,
    validate_proper,
)
from .polyring import BlockSignature


@dataclass(frozen=True)
class JoinParams:
    e: tuple[int, ...]
    f: tuple[int, ...]
    N: tuple[int, ...]    # N_1..N_n
    d: tuple[int, ...]    # d_0..d_n
    mj: tuple[int, ...]   # m_1..m_n
    msig: tuple[BlockSignature, ...]  # level signatures 0..n

    @property
    def m(self) -> int:
        return len(self.e)

    @property
    def n(self) -> int:
        return len(self.f)

    def slot_counts(self) -> list[int]:
        """Number of slots ``2 d_{j-1} + 2`` in a level-``j`` block, for j = 1..n."""
        return [2 * self.d[j] + 2 for j in range(self.n)]

    def table(self) -> list[dict]:
        rows = [{"i": 0, "N": None, "d": self.d[0], "m": None, "msig": list(self.msig[0].dims)}]
        for j in range(1, self.n + 1):
            rows.append({"i": j, "N": self.N[j - 1], "d": self.d[j], "m": self.mj[j - 1],
                         "msig": list(self.msig[j].dims)})
        return rows

    def to_dict(self) -> dict:
        return {
            "e": list(self.e), "f": list(self.f), "N": list(self.N), "d": list(self.d),
            "m": list(self.mj), "msig": [list(s.dims) for s in self.msig], "table": self.table(),
        }


@dataclass(frozen=True)
class SizeStats:
    conjunct_count: int
    atom_count: int
    variable_count: int
    circuit_size_bound: int
    input_size: int

    def to_dict(self) -> dict:
        return {
            "conjunct_count": self.conjunct_count, "atom_count": self.atom_count,
            "variable_count": self.variable_count, "circuit_size_bound": self.circuit_size_bound,
            "input_size": self.input_size,
        }


def join_params(e: Sequence[int], f: Sequence[int]) -> JoinParams:
    e, f = tuple(int(x) for x in e), tuple(int(x) for x in f)
    if not f:
        raise InvalidArgument("at least one bound block is required")
    if any(x < 0 for x in e + f):
        raise InvalidArgument("block dimensions must be nonnegative")
    d = [sum(e)]
    N: list[int] = []
    mj: list[int] = []
    for j, fj in enumerate(f, start=1):
        Nj = 1 if j == 1 else 2 * N[-1] * (d[j - 2] + 1)
        m = 2 * (d[j - 1] + 1) * (fj + 1) - 1
        N.append(Nj)
        mj.append(m)
        d.append(d[j - 1] + Nj * m)
    msig = [BlockSignature(e)]
    for Nj, m in zip(N, mj):
        msig.append(BlockSignature(msig[-1].dims + (m,) * Nj))
    return JoinParams(e, f, tuple(N), tuple(d), tuple(mj), tuple(msig))


def params_for(psi: ProperFormula) -> JoinParams:
    return join_params(psi.free_dims, psi.bound_dims)


def joined_signature(params: JoinParams) -> BlockSignature:
    return params.msig[-1]


def _tuple_rank(prefix: Sequence[int], radices: Sequence[int]) -> int:
    r = 0
    for i, base in zip(prefix, radices):
        r = r * base + i
    return r


def join_index_tuples(params: JoinParams):
    return itertools.product(*(range(s) for s in params.slot_counts()))


def join_mapping(params: JoinParams, idx: Sequence[int]) -> list[tuple[int, int]]:
    """Where each block of the input lands for the conjunct indexed by ``idx``."""
    radices = params.slot_counts()
    mapping = [(i, 0) for i in range(params.m)]
    level_start = params.m
    for j in range(params.n):
        block = level_start + _tuple_rank(idx[:j], radices[:j])
        mapping.append((block, idx[j] * (params.f[j] + 1)))
        level_start += params.N[j]
    return mapping


def _check_shape(psi: ProperFormula, params: JoinParams):
    if psi.prefix is not None and len(psi.prefix) != psi.bound_count:
        raise BlockMismatch("prefix does not match bound blocks")
    if psi.free_dims != params.e or psi.bound_dims != params.f:
        raise BlockMismatch(
            f"formula blocks {psi.free_dims}/{psi.bound_dims} do not match join parameters "
            f"{params.e}/{params.f}")


def build_join_formula(psi: ProperFormula, params: JoinParams | None = None) -> ProperFormula:
    """The conjunction of all renamed copies of ``psi`` over every join index tuple."""
    if params is None:
        params = params_for(psi)
    _check_shape(psi, params)
    target = joined_signature(params)
    if isinstance(psi.tree, _Const):
        return ProperFormula(target, params.m, psi.tree)
    conjuncts = []
    for idx in join_index_tuples(params):
        cmap = block_rename_map(psi.blocks, target, join_mapping(params, idx))
        conjuncts.append(rename_tree(psi.tree, target, cmap))
    return ProperFormula(target, params.m, And(conjuncts))


def _conjoin(trees, target: BlockSignature, free_count: int) -> ProperFormula:
    trees = list(trees)
    if any(t == FALSE for t in trees):
        return ProperFormula(target, free_count, FALSE)
    trees = [t for t in trees if t != TRUE]
    if not trees:
        return ProperFormula(target, free_count, TRUE)
    return ProperFormula(target, free_count, And(trees))


def relative_join_formula(psi: ProperFormula, p: int) -> ProperFormula:
    """Fibrewise ``p``-fold join over the single free block."""
    if psi.free_count != 1 or psi.bound_count != 1:
        raise BlockMismatch("relative join needs exactly one free and one bound block")
    if p < 0:
        raise InvalidArgument("p must be nonnegative", p=p)
    if p == 0:
        return psi.quantifier_free()
    base, n = psi.blocks.dims
    target = BlockSignature((base, (p + 1) * (n + 1) - 1))
    trees = []
    for t in range(p + 1):
        cmap = block_rename_map(psi.blocks, target, [(0, 0), (1, t * (n + 1))])
        trees.append(rename_tree(psi.tree, target, cmap))
    return _conjoin(trees, target, 1)


def multijoin_formula(psis: Sequence[ProperFormula]) -> ProperFormula:
    """Join of single-block formulas ``psi_0, ..., psi_p`` inside one projective space."""
    psis = list(psis)
    if not psis:
        raise InvalidArgument("need at least one formula")
    for psi in psis:
        if len(psi.blocks) != 1:
            raise BlockMismatch("multi-join inputs must have a single block")
    if len(psis) == 1:
        return psis[0].quantifier_free()
    target = BlockSignature((sum(psi.blocks.dims[0] + 1 for psi in psis) - 1,))
    trees, off = [], 0
    for psi in psis:
        cmap = block_rename_map(psi.blocks, target, [(0, off)])
        trees.append(rename_tree(psi.tree, target, cmap))
        off += psi.blocks.dims[0] + 1
    return _conjoin(trees, target, 0)


def join_size_stats(psi: ProperFormula, params: JoinParams | None = None) -> SizeStats:
    if params is None:
        params = params_for(psi)
    _check_shape(psi, params)
    K = prod(2 * params.d[j] + 2 for j in range(params.n))
    atoms = sum(1 for _ in iter_atoms(psi.tree))
    nvars = sum(x + 1 for x in params.e) + sum(Nj * (m + 1) for Nj, m in zip(params.N, params.mj))
    size = node_count(psi.tree)
    return SizeStats(K, K * atoms, nvars, K * size, size)


def check_join_output(psi: ProperFormula, params: JoinParams) -> ProperFormula:
    """Build the join formula and validate it; handy for tests and the CLI."""
    out = build_join_formula(psi, params)
    validate_proper(out)
    return out
