# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled layer relaxation for the group dynamic program (int64 only).

Same contract as ``_dpkernel_py.relax_layer``; callers must check that
every key and value fits in a signed 64-bit integer before using it.
"""

import numpy as np

from libc.stdint cimport int64_t
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector
from libcpp.algorithm cimport sort
from cython.operator cimport dereference as deref, preincrement as inc

from .errors import TableTooLargeError


cdef struct Entry:
    int64_t val
    int64_t prev
    int64_t digit


cdef inline int64_t ent_val(unordered_map[int64_t, Entry].iterator it):
    return deref(it).second.val


cdef inline int64_t deref_key(unordered_map[int64_t, Entry].iterator it):
    return deref(it).first


def relax_layer(const int64_t[::1] prev_keys, const int64_t[::1] prev_vals,
                const int64_t[:, ::1] gamma_next, const int64_t[::1] digits,
                const int64_t[::1] costs, const int64_t[:, ::1] eta_steps,
                const int64_t[::1] lo, const int64_t[::1] hi, const int64_t[::1] box,
                bint track_nonzero, bint use_max, int64_t ub, int64_t max_states):
    cdef Py_ssize_t m = box.shape[0]
    cdef Py_ssize_t ndig = digits.shape[0]
    cdef Py_ssize_t nprev = prev_keys.shape[0]
    cdef vector[int64_t] widths = vector[int64_t](m)
    cdef vector[int64_t] strides = vector[int64_t](m)
    cdef vector[int64_t] eta = vector[int64_t](m)
    cdef int64_t e_size = 1
    cdef Py_ssize_t i, p, di
    for i in range(m):
        widths[i] = 2 * box[i] + 1
        strides[i] = e_size
        e_size *= widths[i]

    cdef unordered_map[int64_t, Entry] table
    table.reserve(<size_t>(nprev * 2 + 16))
    cdef unordered_map[int64_t, Entry].iterator it
    cdef Entry ent
    cdef int64_t key, val, flag, rest, g, code, e, new_code, nv, nf, nk, c
    cdef bint ok

    for p in range(nprev):
        key = prev_keys[p]
        val = prev_vals[p]
        flag = key & 1
        rest = key >> 1
        g = rest // e_size
        code = rest % e_size
        for i in range(m):
            eta[i] = (code // strides[i]) % widths[i] - box[i]
        for di in range(ndig):
            new_code = 0
            ok = True
            for i in range(m):
                e = eta[i] + eta_steps[di, i]
                if e < lo[i] or e > hi[i]:
                    ok = False
                    break
                new_code += (e + box[i]) * strides[i]
            if not ok:
                continue
            c = costs[di]
            if use_max:
                nv = val if val >= c else c
            else:
                nv = val + c
            if nv > ub:
                continue
            nf = flag
            if track_nonzero and digits[di] != 0:
                nf = 1
            nk = ((gamma_next[di, g] * e_size + new_code) << 1) | nf
            it = table.find(nk)
            if it == table.end():
                ent.val = nv
                ent.prev = key
                ent.digit = di
                table[nk] = ent
                if <int64_t>table.size() > max_states:
                    raise TableTooLargeError(
                        f"dynamic program exceeded {max_states} states in one layer")
            elif nv < ent_val(it):
                ent.val = nv
                ent.prev = key
                ent.digit = di
                table[nk] = ent

    cdef vector[int64_t] keys
    keys.reserve(table.size())
    it = table.begin()
    while it != table.end():
        keys.push_back(deref_key(it))
        inc(it)
    sort(keys.begin(), keys.end())

    cdef Py_ssize_t nout = keys.size()
    out_keys = np.empty(nout, dtype=np.int64)
    out_vals = np.empty(nout, dtype=np.int64)
    out_prev = np.empty(nout, dtype=np.int64)
    out_dig = np.empty(nout, dtype=np.int64)
    cdef int64_t[::1] ok_ = out_keys
    cdef int64_t[::1] ov = out_vals
    cdef int64_t[::1] op = out_prev
    cdef int64_t[::1] od = out_dig
    for p in range(nout):
        ent = table[keys[p]]
        ok_[p] = keys[p]
        ov[p] = ent.val
        op[p] = ent.prev
        od[p] = ent.digit
    return out_keys, out_vals, out_prev, out_dig
