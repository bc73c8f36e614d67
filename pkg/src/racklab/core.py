"""Finite racks on {0, ..., n-1}.

A rack is stored both as an n x n operation table (table[x][y] = x > y)
and as the tuple of right translations (maps[y][x] = x > y); column y of
the table is the translation map of y.  A table defines a rack iff every
column is a bijection and the translations satisfy the conjugation rule

    f[(y)f_z] = f_z^-1 f_y f_z   for all y, z,

which is equivalent to right self-distributivity
(x > y) > z = (x > z) > (y > z).  Both checks are exposed; constructors
validate eagerly so invalid racks are unrepresentable downstream.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .perms import compose, identity, inverse, is_permutation


class RackError(Exception):
    pass


class MalformedTableError(RackError):
    """Wrong shape or out-of-range entry; distinct from an axiom violation."""


class NotARackError(RackError):
    def __init__(self, report):
        self.report = report
        first = report.violations[0] if report.violations else None
        super().__init__(f"not a rack: first violation {first}")


class NotAGroupError(RackError):
    def __init__(self, kind, witness):
        self.kind = kind
        self.witness = witness
        super().__init__(f"not a group: {kind} at {witness}")


class NotAbelianError(RackError):
    pass


class NotAutomorphismError(RackError):
    pass


class RackParseError(RackError):
    def __init__(self, message, line, col):
        self.line = line
        self.col = col
        super().__init__(f"line {line}, col {col}: {message}")


@dataclass(frozen=True)
class Violation:
    kind: str      # "NotBijective" | "ConjugationFail" | "SelfDistributivityFail"
    witness: tuple  # (y,) for NotBijective, else (x, y, z)


@dataclass(frozen=True)
class AxiomReport:
    n: int
    is_rack: bool
    is_quandle: bool
    violations: tuple


def table_order(table) -> int:
    """Validate shape and entry range of an operation table; return its order."""
    try:
        n = len(table)
    except TypeError:
        raise MalformedTableError("table is not a sequence") from None
    if n == 0:
        raise MalformedTableError("empty table")
    for x, row in enumerate(table):
        if len(row) != n:
            raise MalformedTableError(f"row {x} has length {len(row)}, expected {n}")
        for y, v in enumerate(row):
            if not isinstance(v, int) or not 0 <= v < n:
                raise MalformedTableError(f"entry ({x},{y}) = {v!r} out of range 0..{n - 1}")
    return n


def _columns(table, n):
    # column y of the table is the translation map f_y
    return [tuple(table[x][y] for x in range(n)) for y in range(n)]


def _bijection_violations_checked(table, n) -> list:
    return [Violation("NotBijective", (y,))
            for y, col in enumerate(_columns(table, n)) if not is_permutation(col, n)]


def bijection_violations(table) -> list:
    """Columns of the table that are not bijections."""
    return _bijection_violations_checked(table, table_order(table))


_VECTOR_CHECK_MIN_ORDER = 64


def _conjugation_violations_slow(table, n) -> list:
    maps = _columns(table, n)
    invs = [inverse(m) for m in maps]
    out = []
    for y in range(n):
        for z in range(n):
            lhs = maps[table[y][z]]
            rhs = compose(compose(invs[z], maps[y]), maps[z])
            if lhs != rhs:
                x = next(i for i in range(n) if lhs[i] != rhs[i])
                out.append(Violation("ConjugationFail", (x, y, z)))
    return out


def _conjugation_violations_fast(table, n) -> list:
    # maps_arr[y] is the translation of y; witnesses match the slow scan exactly
    maps_arr = np.array(table, dtype=np.int32).T.copy()
    out = []
    for z in range(n):
        p = maps_arr[z]
        p_inv = np.empty(n, dtype=np.int32)
        p_inv[p] = np.arange(n, dtype=np.int32)
        lhs = maps_arr[maps_arr[z]]          # row y: translation of (y)f_z
        rhs = p[maps_arr[:, p_inv]]          # row y: f_z^-1 f_y f_z
        neq = lhs != rhs
        for y in np.nonzero(neq.any(axis=1))[0]:
            out.append(Violation("ConjugationFail", (int(np.argmax(neq[y])), int(y), z)))
    out.sort(key=lambda v: (v.witness[1], v.witness[2]))
    return out


def conjugation_violations(table) -> list:
    """First witness (x, y, z) per failing (y, z) pair, scanned in row-major order.

    Requires bijective columns; call bijection_violations first.
    """
    n = table_order(table)
    if n >= _VECTOR_CHECK_MIN_ORDER:
        return _conjugation_violations_fast(table, n)
    return _conjugation_violations_slow(table, n)


def self_distributivity_violations(table) -> list:
    """First witness (x, y, z) per failing (y, z) pair of (x>y)>z = (x>z)>(y>z)."""
    n = table_order(table)
    out = []
    for y in range(n):
        for z in range(n):
            for x in range(n):
                if table[table[x][y]][z] != table[table[x][z]][table[y][z]]:
                    out.append(Violation("SelfDistributivityFail", (x, y, z)))
                    break
    return out


def axiom_report(table, method="conjugation") -> AxiomReport:
    """Check the rack axioms of a well-formed table.

    method "conjugation" uses the translation conjugation rule (skipped when
    some column is not bijective); "self-distributive" checks the triple
    identity directly.  Both accept exactly the same tables.
    """
    n = table_order(table)
    violations = _bijection_violations_checked(table, n)
    if method == "conjugation":
        if not violations:
            if n >= _VECTOR_CHECK_MIN_ORDER:
                violations += _conjugation_violations_fast(table, n)
            else:
                violations += _conjugation_violations_slow(table, n)
    elif method == "self-distributive":
        violations += self_distributivity_violations(table)
    else:
        raise ValueError(f"unknown method {method!r}")
    is_rack = not violations
    is_quandle = is_rack and all(table[x][x] == x for x in range(n))
    return AxiomReport(n=n, is_rack=is_rack, is_quandle=is_quandle,
                       violations=tuple(violations))


class Rack:
    """Immutable rack; construction runs the full O(n^3) axiom check."""

    __slots__ = ("n", "maps", "table")

    def __init__(self, maps):
        maps = tuple(tuple(m) for m in maps)
        n = len(maps)
        if n == 0:
            raise MalformedTableError("empty map family")
        for y, m in enumerate(maps):
            if len(m) != n:
                raise MalformedTableError(f"map {y} has length {len(m)}, expected {n}")
        table = tuple(tuple(maps[y][x] for y in range(n)) for x in range(n))
        report = axiom_report(table)
        if not report.is_rack:
            raise NotARackError(report)
        self.n = n
        self.maps = maps
        self.table = table

    @classmethod
    def from_table(cls, table):
        n = table_order(table)
        return cls(_columns(table, n))

    def op(self, x, y):
        return self.table[x][y]

    @property
    def is_quandle(self):
        return all(self.table[x][x] == x for x in range(self.n))

    def relabel(self, phi) -> "Rack":
        """The isomorphic rack with x renamed to phi[x]."""
        if not is_permutation(phi, self.n):
            raise ValueError("relabeling must be a permutation of the ground set")
        psi = inverse(phi)
        table = tuple(tuple(phi[self.table[psi[x]][psi[y]]] for y in range(self.n))
                      for x in range(self.n))
        return Rack.from_table(table)

    def __eq__(self, other):
        return isinstance(other, Rack) and self.maps == other.maps

    def __hash__(self):
        return hash(self.maps)

    def __repr__(self):
        return f"Rack(n={self.n}, maps={self.maps})"


def rack_from_table(table):
    """Rack if the table satisfies the axioms, else the full AxiomReport.

    Malformed input (wrong shape, out-of-range entry) raises
    MalformedTableError instead of being reported as an axiom violation.
    """
    report = axiom_report(table)
    if report.is_rack:
        return Rack.from_table(table)
    return report


# ---------------------------------------------------------------------------
# standard families

def trivial_rack(n: int) -> Rack:
    """x > y = x: every translation is the identity."""
    if n < 1:
        raise ValueError("order must be positive")
    return Rack([identity(n)] * n)


def permutation_rack(perm) -> Rack:
    """All translations equal to a single permutation; valid for any choice."""
    perm = tuple(perm)
    if not is_permutation(perm):
        raise ValueError("not a permutation")
    return Rack([perm] * len(perm))


def dihedral_quandle(n: int) -> Rack:
    """x > y = 2y - x mod n (the cyclic Alexander quandle with negation)."""
    if n < 1:
        raise ValueError("order must be positive")
    table = [[(2 * y - x) % n for y in range(n)] for x in range(n)]
    return Rack.from_table(table)


def _group_check(table):
    """Return (identity, inverses) of a group table; raise NotAGroupError."""
    n = table_order(table)
    e = None
    for c in range(n):
        if all(table[c][b] == b for b in range(n)) and all(table[a][c] == a for a in range(n)):
            e = c
            break
    if e is None:
        raise NotAGroupError("NoIdentity", ())
    inv = [None] * n
    for a in range(n):
        for b in range(n):
            if table[a][b] == e and table[b][a] == e:
                inv[a] = b
                break
        if inv[a] is None:
            raise NotAGroupError("NoInverse", (a,))
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if table[table[a][b]][c] != table[a][table[b][c]]:
                    raise NotAGroupError("NotAssociative", (a, b, c))
    return e, inv


def conjugation_quandle(group_table) -> Rack:
    """x > y = y^-1 x y over a (checked) group multiplication table."""
    n = table_order(group_table)
    _, inv = _group_check(group_table)
    table = [[group_table[group_table[inv[y]][x]][y] for y in range(n)] for x in range(n)]
    return Rack.from_table(table)


def alexander_quandle(add_table, tau) -> Rack:
    """x > y = (x - y)tau + y over a (checked) abelian group and automorphism tau."""
    n = table_order(add_table)
    _, neg = _group_check(add_table)
    for a in range(n):
        for b in range(n):
            if add_table[a][b] != add_table[b][a]:
                raise NotAbelianError(f"{a}+{b} != {b}+{a}")
    tau = tuple(tau)
    if not is_permutation(tau, n):
        raise NotAutomorphismError("tau is not a permutation of the group")
    for a in range(n):
        for b in range(n):
            if tau[add_table[a][b]] != add_table[tau[a]][tau[b]]:
                raise NotAutomorphismError(f"tau({a}+{b}) != tau({a})+tau({b})")
    table = [[add_table[tau[add_table[x][neg[y]]]][y] for y in range(n)] for x in range(n)]
    return Rack.from_table(table)


def cyclic_group_table(n: int):
    """Addition table of Z_n."""
    if n < 1:
        raise ValueError("order must be positive")
    return tuple(tuple((a + b) % n for b in range(n)) for a in range(n))


def symmetric_group_table(k: int):
    """Multiplication table of Sym(k) with elements in lexicographic order.

    Product a*b composes left to right, matching the package convention.
    """
    elems = list(itertools.permutations(range(k)))
    index = {p: i for i, p in enumerate(elems)}
    return tuple(tuple(index[compose(a, b)] for b in elems) for a in elems)


def dihedral_group_table(m: int):
    """Multiplication table of the dihedral group of order 2m (m >= 1)."""
    if m < 1:
        raise ValueError("m must be positive")
    # element 2i is the rotation r^i, 2i+1 the reflection r^i s
    def mul(a, b):
        i, s = divmod(a, 2)
        j, t = divmod(b, 2)
        if s == 0:
            return 2 * ((i + j) % m) + t
        return 2 * ((i - j) % m) + (1 - t)
    n = 2 * m
    return tuple(tuple(mul(a, b) for b in range(n)) for a in range(n))


def direct_product_table(t1, t2):
    """Multiplication table of the direct product, pairs ordered (a, b) -> a*len(t2)+b."""
    n1, n2 = table_order(t1), table_order(t2)
    def mul(x, y):
        a1, b1 = divmod(x, n2)
        a2, b2 = divmod(y, n2)
        return t1[a1][a2] * n2 + t2[b1][b2]
    return tuple(tuple(mul(x, y) for y in range(n1 * n2)) for x in range(n1 * n2))


# ---------------------------------------------------------------------------
# subracks, isomorphism, canonical form

def is_subrack(rack: Rack, subset) -> bool:
    """True iff the nonempty subset is closed under the operation."""
    ys = set(subset)
    if not ys:
        raise ValueError("subset must be nonempty")
    if not all(isinstance(y, int) and 0 <= y < rack.n for y in ys):
        raise ValueError("subset must lie in the ground set")
    return all(rack.table[z][y] in ys for y in ys for z in ys)


def find_isomorphism(r1: Rack, r2: Rack):
    """A permutation phi with (x > y)phi = (x)phi > (y)phi, or None.

    Backtracking over images with partial-homomorphism forcing; images are
    pre-filtered by out-degree profile of the rack graphs.
    """
    if r1.n != r2.n:
        return None
    n = r1.n
    t1, t2 = r1.table, r2.table
    deg1 = [len({t1[x][y] for y in range(n)} - {x}) for x in range(n)]
    deg2 = [len({t2[x][y] for y in range(n)} - {x}) for x in range(n)]
    if sorted(deg1) != sorted(deg2):
        return None

    def close(phi, used):
        # propagate forced images until fixpoint; False on conflict
        changed = True
        while changed:
            changed = False
            assigned = [x for x in range(n) if phi[x] is not None]
            for x in assigned:
                for y in assigned:
                    z = t1[x][y]
                    w = t2[phi[x]][phi[y]]
                    if phi[z] is None:
                        if w in used:
                            return False
                        phi[z] = w
                        used.add(w)
                        changed = True
                    elif phi[z] != w:
                        return False
        return True

    def extend(phi, used):
        try:
            x = phi.index(None)
        except ValueError:
            return True
        for c in range(n):
            if c in used or deg2[c] != deg1[x]:
                continue
            trial = list(phi)
            trial_used = set(used)
            trial[x] = c
            trial_used.add(c)
            if close(trial, trial_used) and extend(trial, trial_used):
                phi[:] = trial
                return True
        return False

    phi = [None] * n
    if extend(phi, set()):
        return tuple(phi)
    return None


def canonical_form(rack: Rack):
    """Lexicographically minimal operation table over all relabelings.

    Equal canonical tables characterise isomorphic racks.  Full n! scan with
    row-level pruning; intended for n <= 8.
    """
    n = rack.n
    table = rack.table
    best = None
    for psi in itertools.permutations(range(n)):
        phi = inverse(psi)
        rows = []
        better = False
        worse = False
        for x in range(n):
            row = tuple(phi[table[psi[x]][psi[y]]] for y in range(n))
            if best is not None and not better:
                if row > best[x]:
                    worse = True
                    break
                if row < best[x]:
                    better = True
            rows.append(row)
        if worse:
            continue
        if best is None or better:
            best = tuple(rows)
    return best


# ---------------------------------------------------------------------------
# ".rack" text format: line 1 is n, lines 2..n+1 the table rows

def parse_rack_table(text):
    """Parse the text format into a table; RackParseError carries line/col."""
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise RackParseError("empty input", 1, 1)
    head = lines[0].split()
    if len(head) != 1:
        raise RackParseError(f"expected a single order, got {len(head)} tokens", 1, 1)
    try:
        n = int(head[0])
    except ValueError:
        raise RackParseError(f"order {head[0]!r} is not an integer", 1, 1) from None
    if n < 1:
        raise RackParseError(f"order must be positive, got {n}", 1, 1)
    if len(lines) - 1 != n:
        raise RackParseError(f"expected {n} rows, found {len(lines) - 1}", len(lines), 1)
    table = []
    for x in range(n):
        tokens = lines[1 + x].split()
        if len(tokens) != n:
            raise RackParseError(f"row has {len(tokens)} entries, expected {n}", 2 + x, 1)
        row = []
        for col, tok in enumerate(tokens):
            try:
                v = int(tok)
            except ValueError:
                raise RackParseError(f"entry {tok!r} is not an integer", 2 + x, col + 1) from None
            if not 0 <= v < n:
                raise RackParseError(f"entry {v} out of range 0..{n - 1}", 2 + x, col + 1)
            row.append(v)
        table.append(tuple(row))
    return tuple(table)


def format_rack(rack: Rack) -> str:
    lines = [str(rack.n)]
    lines += [" ".join(str(v) for v in row) for row in rack.table]
    return "\n".join(lines) + "\n"


def load_rack(path) -> Rack:
    """Parse and validate a .rack file; raises RackParseError or NotARackError."""
    with open(path, encoding="utf-8") as fh:
        table = parse_rack_table(fh.read())
    result = rack_from_table(table)
    if isinstance(result, AxiomReport):
        raise NotARackError(result)
    return result
