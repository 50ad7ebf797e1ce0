"""Finite S3-modules over Z/p^j: Smith normal form, isotypic decomposition and the
synthetic models of the sequence 0 -> E -> E_1+E_2+E_3 -> P -> 0.

Conventions: sigma fixes place 1 and swaps 2, 3; tau cycles 1 -> 2 -> 3.
Matrices act on column vectors and are lists of rows of Python ints.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

from .errors import BadAction, HypothesisNotMet

Matrix = list[list[int]]


# -- linear algebra over Z/p^j ------------------------------------------------


def identity(n: int) -> Matrix:
    return [[int(i == k) for k in range(n)] for i in range(n)]


def matmul(A: Matrix, B: Matrix, m: int) -> Matrix:
    if not A or not B:
        return [[0] * (len(B[0]) if B else 0) for _ in A]
    cols = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) % m for col in cols] for row in A]


def matvec(A: Matrix, v: Sequence[int], m: int) -> list[int]:
    return [sum(a * b for a, b in zip(row, v)) % m for row in A]


def transpose(A: Matrix) -> Matrix:
    return [list(r) for r in zip(*A)] if A else []


def hstack(*blocks: Matrix) -> Matrix:
    return [sum((list(b[i]) for b in blocks), []) for i in range(len(blocks[0]))]


def reduce_mod(A: Matrix, m: int) -> Matrix:
    return [[x % m for x in row] for row in A]


def _val(x: int, p: int, j: int) -> int:
    if x == 0:
        return j
    v = 0
    while x % p == 0 and v < j:
        x //= p
        v += 1
    return v


@dataclass
class SNF:
    """U A V = D over Z/p^j, D diagonal with entries p^vals[k] (vals[k] < j)."""

    U: Matrix
    V: Matrix
    D: Matrix
    vals: list[int]

    @property
    def unit_rank(self) -> int:
        return sum(1 for v in self.vals if v == 0)


def smith_normal_form(A: Matrix, p: int, j: int) -> SNF:
    m = p ** j
    rows = len(A)
    cols = len(A[0]) if rows else 0
    D = reduce_mod(A, m)
    U = identity(rows)
    V = identity(cols)
    vals: list[int] = []
    t = 0
    while t < min(rows, cols):
        best = None
        for r in range(t, rows):
            for c in range(t, cols):
                v = _val(D[r][c], p, j)
                if v < j and (best is None or v < best[0]):
                    best = (v, r, c)
                    if v == 0:
                        break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, r, c = best
        D[t], D[r] = D[r], D[t]
        U[t], U[r] = U[r], U[t]
        for row in D:
            row[t], row[c] = row[c], row[t]
        for row in V:
            row[t], row[c] = row[c], row[t]
        pv = p ** v
        inv = pow(D[t][t] // pv, -1, m)
        D[t] = [x * inv % m for x in D[t]]
        U[t] = [x * inv % m for x in U[t]]
        for r2 in range(rows):
            if r2 != t and D[r2][t]:
                c2 = D[r2][t] // pv
                D[r2] = [(x - c2 * y) % m for x, y in zip(D[r2], D[t])]
                U[r2] = [(x - c2 * y) % m for x, y in zip(U[r2], U[t])]
        for c2 in range(cols):
            if c2 != t and D[t][c2]:
                k = D[t][c2] // pv
                for row in D:
                    row[c2] = (row[c2] - k * row[t]) % m
                for row in V:
                    row[c2] = (row[c2] - k * row[t]) % m
        vals.append(v)
        t += 1
    return SNF(U, V, D, vals)


def inverse_mod(A: Matrix, p: int, j: int) -> Matrix:
    """Inverse of a square matrix invertible over Z/p^j."""
    m = p ** j
    n = len(A)
    M = [list(r) + identity(n)[i] for i, r in enumerate(reduce_mod(A, m))]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] % p), None)
        if piv is None:
            raise ValueError("matrix is not invertible mod p")
        M[c], M[piv] = M[piv], M[c]
        inv = pow(M[c][c], -1, m)
        M[c] = [x * inv % m for x in M[c]]
        for r in range(n):
            if r != c and M[r][c]:
                k = M[r][c]
                M[r] = [(x - k * y) % m for x, y in zip(M[r], M[c])]
    return [row[n:] for row in M]


def submodule_structure(G: Matrix, p: int, j: int) -> list[int]:
    """Cyclic orders of the submodule spanned by the columns of G, largest first."""
    if not G or not G[0]:
        return []
    snf = smith_normal_form(G, p, j)
    return sorted((p ** (j - v) for v in snf.vals), reverse=True)


def kernel_generators(A: Matrix, p: int, j: int) -> Matrix:
    """Columns generating {x : A x = 0} over Z/p^j."""
    n = len(A[0])
    snf = smith_normal_form(A, p, j)
    gens = []
    for k in range(n):
        v = snf.vals[k] if k < len(snf.vals) else j
        scale = p ** (j - v)
        col = [snf.V[r][k] * scale % p ** j for r in range(n)]
        if any(col):
            gens.append(col)
    return transpose(gens) if gens else [[] for _ in range(n)]


def in_span(G: Matrix, v: Sequence[int], p: int, j: int) -> bool:
    m = p ** j
    if not G or not G[0]:
        return all(x % m == 0 for x in v)
    snf = smith_normal_form(G, p, j)
    w = matvec(snf.U, v, m)
    for k, x in enumerate(w):
        if k < len(snf.vals):
            if x % p ** snf.vals[k]:
                return False
        elif x % m:
            return False
    return True


def same_span(G1: Matrix, G2: Matrix, p: int, j: int) -> bool:
    cols1, cols2 = transpose(G1), transpose(G2)
    return all(in_span(G2, c, p, j) for c in cols1) and all(in_span(G1, c, p, j) for c in cols2)


def intersect(G1: Matrix, G2: Matrix, p: int, j: int) -> Matrix:
    """Generators (columns) of span(G1) cap span(G2)."""
    m = p ** j
    k1 = len(G1[0])
    B = hstack(G1, [[(-x) % m for x in row] for row in G2])
    K = kernel_generators(B, p, j)
    if not K or not K[0]:
        return [[] for _ in G1]
    top = K[:k1]
    return matmul(G1, top, m)


# -- S3 and its modules ---------------------------------------------------------

# elements tau^a sigma^b, encoded (a, b); sign is (-1)^b
S3_ELEMENTS = [(a, b) for b in (0, 1) for a in range(3)]


@dataclass(frozen=True)
class S3Module:
    p: int
    j: int
    sigma: tuple[tuple[int, ...], ...]
    tau: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.p <= 3:
            raise BadAction("need p > 3 so that 6 is invertible")
        m = self.p ** self.j
        object.__setattr__(self, "sigma", tuple(tuple(x % m for x in r) for r in self.sigma))
        object.__setattr__(self, "tau", tuple(tuple(x % m for x in r) for r in self.tau))
        n = self.rank
        S, T = self.S, self.T
        I = identity(n)
        if len(S) != n or any(len(r) != n for r in S) or len(T) != n or any(len(r) != n for r in T):
            raise BadAction("sigma and tau must be square of equal size")
        if matmul(S, S, m) != I:
            raise BadAction("sigma^2 != 1")
        if matmul(T, matmul(T, T, m), m) != I:
            raise BadAction("tau^3 != 1")
        if matmul(S, matmul(T, S, m), m) != matmul(T, T, m):
            raise BadAction("sigma tau sigma != tau^2")

    @property
    def modulus(self) -> int:
        return self.p ** self.j

    @property
    def rank(self) -> int:
        return len(self.sigma)

    @property
    def S(self) -> Matrix:
        return [list(r) for r in self.sigma]

    @property
    def T(self) -> Matrix:
        return [list(r) for r in self.tau]

    def element(self, a: int, b: int) -> Matrix:
        m = self.modulus
        g = identity(self.rank)
        for _ in range(a % 3):
            g = matmul(self.T, g, m)
        if b % 2:
            g = matmul(g, self.S, m)
        return g

    def idempotents(self) -> dict[str, Matrix]:
        m = self.modulus
        n = self.rank
        inv6 = pow(6, -1, m)
        e1 = [[0] * n for _ in range(n)]
        ec = [[0] * n for _ in range(n)]
        for a, b in S3_ELEMENTS:
            g = self.element(a, b)
            sgn = -1 if b else 1
            for r in range(n):
                for c in range(n):
                    e1[r][c] += g[r][c]
                    ec[r][c] += sgn * g[r][c]
        e1 = [[x * inv6 % m for x in r] for r in e1]
        ec = [[x * inv6 % m for x in r] for r in ec]
        I = identity(n)
        ee = [[(I[r][c] - e1[r][c] - ec[r][c]) % m for c in range(n)] for r in range(n)]
        return {"triv": e1, "sign": ec, "std": ee}

    def span(self, gens: Matrix) -> Matrix:
        """Generators of the S3-submodule generated by the columns of ``gens``."""
        m = self.modulus
        cols = []
        for a, b in S3_ELEMENTS:
            cols.extend(transpose(matmul(self.element(a, b), gens, m)))
        return transpose(cols)

    def reduce(self) -> "S3Module":
        return S3Module(self.p, 1, self.sigma, self.tau)


def isotypic_type(M: S3Module, gens: Matrix | None = None) -> tuple[int, int, int]:
    """(n_triv, n_sign, n_std) of M, or of the S3-submodule generated by ``gens``.

    Multiplicities count free summands: the number of unit invariant factors of e.N
    for each central idempotent e.
    """
    m = M.modulus
    N = identity(M.rank) if gens is None else M.span(gens)
    counts = []
    for key in ("triv", "sign", "std"):
        img = matmul(M.idempotents()[key], N, m)
        counts.append(smith_normal_form(img, M.p, M.j).unit_rank if img and img[0] else 0)
    n_std, rem = divmod(counts[2], 2)
    if rem:
        raise BadAction("standard component has odd rank")
    return counts[0], counts[1], n_std


def isotypic_decompose(M: S3Module) -> tuple[int, int, int]:
    t = isotypic_type(M)
    if t[0] + t[1] + 2 * t[2] != M.rank:
        raise BadAction(f"module is not free over the idempotent decomposition: {t}")
    return t


def regular_module(p: int, j: int) -> S3Module:
    # basis indexed by S3_ELEMENTS, left multiplication
    idx = {g: k for k, g in enumerate(S3_ELEMENTS)}

    def left(h):
        M = [[0] * 6 for _ in range(6)]
        for g in S3_ELEMENTS:
            M[idx[_s3_mul(h, g)]][idx[g]] = 1
        return M

    return S3Module(p, j, _tup(left((0, 1))), _tup(left((1, 0))))


def _s3_mul(g, h):
    # (tau^a sigma^b)(tau^c sigma^d) = tau^(a + (-1)^b c) sigma^(b+d)
    a, b = g
    c, d = h
    return ((a + (c if b == 0 else -c)) % 3, (b + d) % 2)


def permutation_module(p: int, j: int) -> S3Module:
    """The natural 3-dimensional module V = 1 + eps."""
    sigma = [[1, 0, 0], [0, 0, 1], [0, 1, 0]]
    tau = [[0, 0, 1], [1, 0, 0], [0, 1, 0]]
    return S3Module(p, j, _tup(sigma), _tup(tau))


def standard_module(p: int, j: int) -> S3Module:
    """eps on the basis e+ = 2e1 - e2 - e3, e- = e2 - e3."""
    m = p ** j
    h = pow(2, -1, m)
    sigma = [[1, 0], [0, m - 1]]
    tau = [[-h, -h], [3 * h, -h]]
    return S3Module(p, j, _tup(sigma), _tup(tau))


def local_module(p: int, j: int) -> S3Module:
    """Rank-3 model of the local quotient, 1 + 1 + chi."""
    sigma = [[1, 0, 0], [0, 1, 0], [0, 0, -1]]
    return S3Module(p, j, _tup(sigma), _tup(identity(3)))


def _tup(M: Matrix) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(r) for r in M)


# -- the degenerate model ----------------------------------------------------------


@dataclass
class DegenerateModel:
    p: int
    j: int
    i: int
    E: S3Module
    Ebar: S3Module  # E_1 + E_2 + E_3, basis tau^m (x) a, tau^m (x) b for m = 0, 1, 2
    P: S3Module
    phi: Matrix  # E -> Ebar, 6 x 2
    quotient: Matrix  # Ebar -> P, 4 x 6

    @property
    def modulus(self) -> int:
        return self.p ** self.j

    def inclusion(self, k: int) -> Matrix:
        """E_k -> Ebar, 6 x 2."""
        if k not in (1, 2, 3):
            raise ValueError("k must be 1, 2 or 3")
        M = [[0, 0] for _ in range(6)]
        M[2 * (k - 1)][0] = 1
        M[2 * (k - 1) + 1][1] = 1
        return M

    def pi(self, k: int) -> Matrix:
        """E_k -> P."""
        return matmul(self.quotient, self.inclusion(k), self.modulus)

    def unit_image_valuation(self) -> int:
        """v_p of the E_1-component of the image of the sigma-fixed generator of E."""
        comp = self.phi[0][0]
        return _val(comp, self.p, self.j)

    def exactness(self) -> dict[str, bool]:
        p, j, m = self.p, self.j, self.modulus
        zero = all(x == 0 for row in matmul(self.quotient, self.phi, m) for x in row)
        surj = smith_normal_form(self.quotient, p, j).unit_rank == self.P.rank
        inj = smith_normal_form(self.phi, p, j).unit_rank == self.E.rank
        ker = kernel_generators(self.quotient, p, j)
        exact_mid = same_span(ker, self.phi, p, j)
        return {"composite_zero": zero, "surjective": surj, "injective": inj, "exact_middle": exact_mid}


def _induced_action(p: int, j: int) -> tuple[Matrix, Matrix]:
    """sigma, tau on Ind_<sigma>^S3 W, W = <a, b> with sigma a = a, sigma b = -b."""
    sigma = [[0] * 6 for _ in range(6)]
    tau = [[0] * 6 for _ in range(6)]
    for mm in range(3):
        # tau (tau^m (x) w) = tau^(m+1) (x) w
        for w in range(2):
            tau[2 * ((mm + 1) % 3) + w][2 * mm + w] = 1
        # sigma (tau^m (x) w) = tau^(-m) (x) sigma w
        tgt = (-mm) % 3
        sigma[2 * tgt][2 * mm] = 1
        sigma[2 * tgt + 1][2 * mm + 1] = -1
    return sigma, tau


def build_degenerate_model(p: int, j: int, i: int) -> DegenerateModel:
    if p <= 3 or j < 1 or i < 0:
        raise ValueError("need p > 3, j >= 1, i >= 0")
    m = p ** j
    E = standard_module(p, j)
    sig, tau = _induced_action(p, j)
    Ebar = S3Module(p, j, _tup(sig), _tup(tau))
    # psi: E -> W, sigma-equivariant, e+ -> p^i a, e- -> b; phi(x) = sum_m tau^m (x) psi(tau^-m x)
    psi = [[pow(p, i, m) if i < j else 0, 0], [0, 1]]
    phi = [[0, 0] for _ in range(6)]
    for mm in range(3):
        tinv = E.element(-mm, 0)
        block = matmul(psi, tinv, m)
        for w in range(2):
            for c in range(2):
                phi[2 * mm + w][c] = block[w][c]
    snf = smith_normal_form(phi, p, j)
    if snf.unit_rank != 2:
        raise AssertionError("E -> Ebar is not a split injection")
    Q = snf.U[2:]
    section = [row[2:] for row in inverse_mod(snf.U, p, j)]
    P = S3Module(
        p, j,
        _tup(matmul(Q, matmul(sig, section, m), m)),
        _tup(matmul(Q, matmul(tau, section, m), m)),
    )
    return DegenerateModel(p=p, j=j, i=i, E=E, Ebar=Ebar, P=P, phi=phi, quotient=Q)


def image_intersection(model: DegenerateModel, k: int, k2: int) -> list[int]:
    """Cyclic orders of im(E_k) cap im(E_k2) inside P (empty list: trivial group)."""
    if k == k2:
        raise ValueError("need two different indices")
    p, j = model.p, model.j
    G = intersect(model.pi(k), model.pi(k2), p, j)
    return [o for o in submodule_structure(G, p, j) if o > 1]


def triple_intersection(model: DegenerateModel) -> list[int]:
    p, j = model.p, model.j
    G = intersect(model.pi(1), model.pi(2), p, j)
    if G and G[0]:
        G = intersect(G, model.pi(3), p, j)
    return [o for o in submodule_structure(G, p, j) if o > 1]


@dataclass
class InertiaVerdict:
    R_type: tuple[int, int, int]
    S_type: tuple[int, int, int]
    spans_P: bool

    @property
    def passed(self) -> bool:
        return self.R_type == (1, 0, 1) and self.S_type == (0, 1, 0) and self.spans_P


def inertia_span_check(model: DegenerateModel) -> InertiaVerdict:
    """S3-spans R, S of the images of the two generators of E_1 in P."""
    if model.i < model.j:
        raise HypothesisNotMet(f"degeneracy index i = {model.i} is below j = {model.j}")
    p, j, m = model.p, model.j, model.modulus
    pi1 = model.pi(1)
    xi = [[row[0]] for row in pi1]
    eta = [[row[1]] for row in pi1]
    R = model.P.span(xi)
    S = model.P.span(eta)
    both = hstack(R, S)
    spans = smith_normal_form(both, p, j).unit_rank == model.P.rank
    return InertiaVerdict(isotypic_type(model.P, xi), isotypic_type(model.P, eta), spans)


def sweep(primes: Sequence[int] = (5, 7), i_range: Sequence[int] = range(4),
          j_range: Sequence[int] = range(1, 4)) -> list[dict]:
    """Intersection and inertia checks over a grid of models."""
    out = []
    for p, i, j in product(primes, i_range, j_range):
        model = build_degenerate_model(p, j, i)
        want = [p ** min(i, j)] if min(i, j) > 0 else []
        pairs = {f"{a}{b}": image_intersection(model, a, b) for a, b in ((1, 2), (1, 3), (2, 3))}
        triple = triple_intersection(model)
        row = {
            "p": p, "i": i, "j": j,
            "expected": want,
            "pairs": pairs,
            "triple": triple,
            "intersections_ok": all(v == want for v in pairs.values()) and triple == want,
            "exactness": model.exactness(),
            "P_type": list(isotypic_decompose(model.P)),
        }
        if i >= j:
            v = inertia_span_check(model)
            row["inertia"] = {"R": list(v.R_type), "S": list(v.S_type), "spans_P": v.spans_P, "passed": v.passed}
        else:
            row["inertia"] = None
        out.append(row)
    return out
