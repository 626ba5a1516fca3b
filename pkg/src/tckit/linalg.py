"""Dense-enough Gaussian elimination over F_p for small kernels."""

from __future__ import annotations


def nullspace_mod_p(columns: list[dict[int, int]], nrows: int, p: int) -> list[dict[int, int]]:
    """Basis of {v : sum_j v_j * columns[j] = 0} over F_p.

    ``columns[j]`` maps row index to entry.  Vectors are returned as sparse
    dicts keyed by column index, each with a 1 at its free column.
    """
    ncols = len(columns)
    rows: list[dict[int, int]] = [dict() for _ in range(nrows)]
    for j, col in enumerate(columns):
        for i, a in col.items():
            if a % p:
                rows[i][j] = a % p
    pivots: dict[int, dict[int, int]] = {}  # pivot column -> normalized row
    for row in rows:
        row = {j: a for j, a in row.items() if a}
        for pc, prow in pivots.items():
            a = row.get(pc)
            if a:
                for j, b in prow.items():
                    v = (row.get(j, 0) - a * b) % p
                    if v:
                        row[j] = v
                    else:
                        row.pop(j, None)
        if not row:
            continue
        pc = min(row)
        inv = pow(row[pc], -1, p)
        row = {j: (a * inv) % p for j, a in row.items()}
        # keep pivot rows fully reduced against each other
        for oc, orow in pivots.items():
            a = orow.get(pc)
            if a:
                for j, b in row.items():
                    v = (orow.get(j, 0) - a * b) % p
                    if v:
                        orow[j] = v
                    else:
                        orow.pop(j, None)
        pivots[pc] = row
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        vec = {f: 1}
        for pc, prow in pivots.items():
            a = prow.get(f)
            if a:
                vec[pc] = (-a) % p
        basis.append(vec)
    return basis


def rank_mod_p(columns: list[dict[int, int]], nrows: int, p: int) -> int:
    return len(columns) - len(nullspace_mod_p(columns, nrows, p))
