"""Pure-Python layer relaxation for the group dynamic program.

Reference implementation of ``_dpkernel.relax_layer``; both must produce
identical tables. Works with unbounded Python ints, so it is also the path
taken whenever values could overflow 64 bits.
"""

from .errors import TableTooLargeError


def relax_layer(prev_keys, prev_vals, gamma_next, digits, costs, eta_steps,
                lo, hi, box, track_nonzero, use_max, ub, max_states):
    """Push every state of the previous layer through every digit.

    State keys pack ``((gamma * E + eta_code) << 1) | nonzero_flag`` with
    ``eta_code`` the mixed-radix code of ``eta + box``. Previous states are
    visited in the given (ascending) order and digits in index order; a slot
    is overwritten only by a strictly smaller value, which makes the chosen
    backpointer deterministic.

    Returns ``(keys, vals, prev_keys, digit_indices)`` sorted by key.
    """
    m = len(box)
    widths = [2 * b + 1 for b in box]
    strides = []
    e_size = 1
    for w in widths:
        strides.append(e_size)
        e_size *= w
    table = {}
    for key, val in zip(prev_keys, prev_vals):
        flag = key & 1
        rest = key >> 1
        g, code = divmod(rest, e_size)
        eta = [(code // strides[i]) % widths[i] - box[i] for i in range(m)]
        for di, z in enumerate(digits):
            new_eta_code = 0
            ok = True
            step = eta_steps[di]
            for i in range(m):
                e = eta[i] + step[i]
                if e < lo[i] or e > hi[i]:
                    ok = False
                    break
                new_eta_code += (e + box[i]) * strides[i]
            if not ok:
                continue
            c = costs[di]
            if use_max:
                nv = val if val >= c else c
            else:
                nv = val + c
            if ub is not None and nv > ub:
                continue
            nf = flag | (1 if (track_nonzero and z != 0) else 0)
            nk = ((gamma_next[di][g] * e_size + new_eta_code) << 1) | nf
            cur = table.get(nk)
            if cur is None:
                table[nk] = (nv, key, di)
                if max_states is not None and len(table) > max_states:
                    raise TableTooLargeError(
                        f"dynamic program exceeded {max_states} states in one layer"
                    )
            elif nv < cur[0]:
                table[nk] = (nv, key, di)
    keys = sorted(table)
    vals = [table[k][0] for k in keys]
    bp_prev = [table[k][1] for k in keys]
    bp_digit = [table[k][2] for k in keys]
    return keys, vals, bp_prev, bp_digit
