"""Layered dynamic program over a finite abelian group with side constraints.

Both the shortest-vector and the integer-programming solvers reduce to the
same recurrence: choose one integer digit per layer, accumulate a group
element ``gamma`` (residues modulo the nontrivial Smith invariants), a
side-constraint vector ``eta`` (partial sums of the columns of R) and a
separable cost. This module runs that recurrence layer by layer, keeping
only reachable states, and supports backtracking and enumeration of every
optimal digit sequence.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from . import dpkernel

__all__ = ["Layer", "GroupDpTable", "GroupTransform", "group_transform", "run_group_dp",
           "max_table_states"]

DEFAULT_MAX_STATES = 4_000_000


def max_table_states() -> int:
    """Per-layer state cap, overridable through ``DELTAFPT_MAX_TABLE``."""
    raw = os.environ.get("DELTAFPT_MAX_TABLE")
    return int(raw) if raw else DEFAULT_MAX_STATES


@dataclass(frozen=True)
class Layer:
    """Transition data for one variable.

    ``lo``/``hi`` bound each component of ``eta`` after this layer; states
    outside are pruned.
    """

    digits: tuple[int, ...]
    costs: tuple[int, ...]
    gamma_step: tuple[int, ...]
    eta_step: tuple[int, ...]
    lo: tuple[int, ...]
    hi: tuple[int, ...]


def _mixed_radix(moduli):
    strides = []
    size = 1
    for mod in reversed(moduli):
        strides.append(size)
        size *= mod
    return tuple(reversed(strides)), size


@dataclass
class GroupDpTable:
    moduli: tuple[int, ...]
    box: tuple[int, ...]
    layers: tuple[Layer, ...]
    track_nonzero: bool
    use_max: bool
    tables: list = field(default_factory=list)
    backend: str = "python"

    def __post_init__(self):
        self._gstrides, self.order = _mixed_radix(self.moduli)
        self._widths = tuple(2 * b + 1 for b in self.box)
        estr = []
        size = 1
        for w in self._widths:
            estr.append(size)
            size *= w
        self._estrides = tuple(estr)
        self.eta_size = size
        self._dicts = None

    # -- state codec ---------------------------------------------------
    def gamma_index(self, residues) -> int:
        return sum((r % mod) * st for r, mod, st in zip(residues, self.moduli, self._gstrides))

    def gamma_residues(self, index: int) -> tuple[int, ...]:
        return tuple((index // st) % mod for st, mod in zip(self._gstrides, self.moduli))

    def encode(self, residues, eta, flag=0) -> int:
        code = sum((e + b) * st for e, b, st in zip(eta, self.box, self._estrides))
        return ((self.gamma_index(residues) * self.eta_size + code) << 1) | flag

    def decode(self, key: int):
        flag = key & 1
        g, code = divmod(key >> 1, self.eta_size)
        eta = tuple((code // st) % w - b for st, w, b in zip(self._estrides, self._widths, self.box))
        return self.gamma_residues(g), eta, flag

    def in_box(self, eta) -> bool:
        return all(-b <= e <= b for e, b in zip(eta, self.box))

    # -- results -------------------------------------------------------
    @property
    def n_layers(self) -> int:
        return len(self.layers)

    @property
    def size(self) -> int:
        """Number of materialised states over all layers."""
        return sum(len(t[0]) for t in self.tables)

    @property
    def dense_size(self) -> int:
        """Size of the full index space layers x group x eta-box x flag."""
        return self.n_layers * self.order * self.eta_size * 2

    def final_states(self):
        keys, vals = self.tables[-1][0], self.tables[-1][1]
        for key, val in zip(keys, vals):
            yield key, val

    def _combine(self, prev, cost):
        if self.use_max:
            return prev if prev >= cost else cost
        return prev + cost

    def backtrack(self, key: int) -> tuple[int, ...]:
        """Digits along the stored backpointers ending at ``key`` in the last layer."""
        digits = []
        for layer in range(self.n_layers, 0, -1):
            keys, _, bp_prev, bp_digit = self.tables[layer]
            pos = _bisect(keys, key)
            digits.append(self.layers[layer - 1].digits[bp_digit[pos]])
            key = bp_prev[pos]
        return tuple(reversed(digits))

    def value_at(self, layer: int, key: int):
        return self._lookup()[layer].get(key)

    def _lookup(self):
        if self._dicts is None:
            self._dicts = [dict(zip(t[0], t[1])) for t in self.tables]
        return self._dicts

    def paths_within(self, key: int, bound, limit: int | None = None):
        """Yield every digit sequence reaching ``key`` in the final layer whose
        accumulated value is at most ``bound``.

        Sequences come out in no particular order; ``limit`` caps the count.
        Exact because a state's stored value is the minimum over all paths.
        """
        dicts = self._lookup()
        if dicts[-1].get(key) is None or dicts[-1][key] > bound:
            return
        emitted = 0

        def walk(layer, key, room):
            if layer == 0:
                if dicts[0].get(key) is not None and dicts[0][key] <= room:
                    yield ()
                return
            layer_data = self.layers[layer - 1]
            res, eta, flag = self.decode(key)
            prev = dicts[layer - 1]
            for z, cost in zip(layer_data.digits, layer_data.costs):
                if self.use_max:
                    if cost > room:
                        continue
                    proom = room
                else:
                    proom = room - cost
                peta = tuple(e - s * z for e, s in zip(eta, layer_data.eta_step))
                if not self.in_box(peta):
                    continue
                pres = tuple(r - z * s for r, s in zip(res, layer_data.gamma_step))
                if not self.track_nonzero:
                    flags = (0,)
                elif z == 0:
                    flags = (flag,)
                else:
                    flags = (0, 1) if flag else ()
                for pf in flags:
                    pk = self.encode(pres, peta, pf)
                    pv = prev.get(pk)
                    if pv is None or pv > proom:
                        continue
                    for head in walk(layer - 1, pk, proom):
                        yield head + (z,)

        for path in walk(self.n_layers, key, bound):
            yield path
            emitted += 1
            if limit is not None and emitted >= limit:
                return


def _bisect(keys, key):
    lo, hi = 0, len(keys)
    while lo < hi:
        mid = (lo + hi) // 2
        if keys[mid] < key:
            lo = mid + 1
        else:
            hi = mid
    if lo == len(keys) or keys[lo] != key:
        raise KeyError(key)
    return lo


def _gamma_transitions(table: GroupDpTable, layer: Layer) -> np.ndarray:
    """``out[d, g]`` = index of ``g + digits[d] * gamma_step`` in the group."""
    order = table.order
    k = len(table.moduli)
    if k == 0:
        return np.zeros((len(layer.digits), 1), dtype=object)
    idx = np.arange(order, dtype=object)
    mods = np.array(table.moduli, dtype=object)
    strides = np.array(table._gstrides, dtype=object)
    res = (idx[:, None] // strides[None, :]) % mods[None, :]
    z = np.array(layer.digits, dtype=object)
    step = np.array(layer.gamma_step, dtype=object)
    new = (res[None, :, :] + z[:, None, None] * step[None, None, :]) % mods[None, None, :]
    return (new * strides[None, None, :]).sum(axis=2)


def run_group_dp(moduli, box, layers, *, track_nonzero=False, use_max=False,
                 ub=None, max_states=None, backend=None) -> GroupDpTable:
    """Run the layered recurrence from the zero state and return all tables.

    ``ub`` prunes any partial value above it (valid only for nonnegative
    costs). ``max_states`` defaults to :func:`max_table_states`.
    """
    table = GroupDpTable(tuple(moduli), tuple(box), tuple(layers), track_nonzero, use_max,
                         backend=dpkernel.backend_name(backend))
    if max_states is None:
        max_states = max_table_states()
    m = len(table.box)
    start = table.encode((0,) * len(table.moduli), (0,) * m, 0)
    table.tables.append(([start], [0], [-1], [-1]))
    key_bound = table.order * table.eta_size * 2 + 2
    val_bound = 0
    for layer in table.layers:
        c = max(abs(v) for v in layer.costs)
        val_bound = max(val_bound, c) if use_max else val_bound + c
    magnitude = max(key_bound, val_bound, abs(ub) if ub is not None else 0)
    for layer in table.layers:
        keys, vals = table.tables[-1][0], table.tables[-1][1]
        gnext = _gamma_transitions(table, layer)
        if magnitude < dpkernel.INT64_LIMIT:
            gnext = gnext.astype(np.int64)
        steps = [tuple(s * z for s in layer.eta_step) for z in layer.digits]
        out = dpkernel.relax_layer(
            keys, vals, gnext, layer.digits, layer.costs, steps,
            layer.lo, layer.hi, table.box,
            track_nonzero=track_nonzero, use_max=use_max, ub=ub,
            max_states=max_states, magnitude=magnitude, backend=table.backend,
        )
        table.tables.append(out)
    return table


@dataclass(frozen=True)
class GroupTransform:
    """Smith-form data for a nonsingular basis block ``h_b``.

    ``v`` lies in the lattice of ``h_b`` iff ``p_rows @ v`` vanishes modulo
    ``moduli`` (only invariants > 1 are kept). ``adj`` is the signed
    adjugate with ``h_b @ adj == delta * I`` and ``delta = |det h_b|``;
    ``r`` is ``h_n @ adj``.
    """

    delta: int
    adj: "IntMatrix"
    moduli: tuple[int, ...]
    g_rows: tuple[tuple[int, ...], ...]
    p_rows: tuple[tuple[int, ...], ...]
    r: tuple[tuple[int, ...], ...]

    def residues(self, vec) -> tuple[int, ...]:
        return tuple(sum(a * b for a, b in zip(row, vec)) % mod
                     for row, mod in zip(self.p_rows, self.moduli))

    def g_column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.g_rows)

    def r_column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.r)


def group_transform(h_b, h_n=None) -> GroupTransform:
    from .errors import SingularMatrixError
    from .exactmat import adjugate, det, snf

    dlt = det(h_b)
    if dlt == 0:
        raise SingularMatrixError("basis block is singular")
    adj = adjugate(h_b)
    if dlt < 0:
        adj, dlt = -adj, -dlt
    sres = snf(h_b)
    keep = [i for i, v in enumerate(sres.diagonal) if v > 1]
    moduli = tuple(sres.diagonal[i] for i in keep)
    p_rows = tuple(sres.p.row(i) for i in keep)
    g_rows = tuple(tuple(v % mod for v in row) for row, mod in zip(p_rows, moduli))
    r = () if h_n is None else (h_n @ adj).rows
    return GroupTransform(dlt, adj, moduli, g_rows, p_rows, r)
