"""Right F_p[G]-modules given by one invertible matrix per group generator.

Vectors are rows; g sends v to v @ A_g.  Matrices for arbitrary elements are
composed along BFS words and cached.  Construction verifies that the
generator matrices define a genuine action (fully for small groups, against
the attached presentation otherwise).

Simple subquotients are labeled by a fingerprint (dim, trace vector on the
p'-conjugacy-class representatives): enough to tell apart the handful of
simples occurring at desk scale without Brauer character machinery.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .errors import (DimensionMismatch, InputError, NotASubgroup,
                     NotInvolution, TooLarge)
from .fp import Presentation
from .groups import FiniteGroup

FULL_ACTION_CHECK_LIMIT = 256
SPIN_DIM_LIMIT = 12


class GModule:
    def __init__(self, group: FiniteGroup, p: int, mats, check: bool = True):
        self.group = group
        self.p = p
        self.mats = [la.asmod(m, p) for m in mats]
        if len(self.mats) != len(group.gen_indices):
            raise DimensionMismatch("one matrix per group generator required")
        dims = {m.shape for m in self.mats}
        if len(dims) > 1 or any(m.shape[0] != m.shape[1] for m in self.mats):
            raise DimensionMismatch("matrices must be square of equal size")
        self.dim = self.mats[0].shape[0] if self.mats else 0
        self._mat_cache: dict[int, np.ndarray] = {0: la.identity(self.dim)}
        if check:
            self._verify_action()

    def _verify_action(self):
        for m in self.mats:
            if la.rank(m, self.p) != self.dim:
                raise InputError("generator matrix not invertible mod p")
        G = self.group
        if G.presentation is not None:
            for rel in G.presentation.relators:
                acc = la.identity(self.dim)
                for letter in rel:
                    m = self.mats[abs(letter) - 1]
                    if letter < 0:
                        m = self._invert(m)
                    acc = la.matmul(acc, m, self.p)
                if (acc != la.identity(self.dim)).any():
                    raise InputError("matrices violate a defining relation")
        elif G.order <= FULL_ACTION_CHECK_LIMIT:
            for x in range(G.order):
                for gi, g in enumerate(G.gen_indices):
                    lhs = self.mat_of(G.mul(x, g))
                    rhs = la.matmul(self.mat_of(x), self.mats[gi], self.p)
                    if (lhs != rhs).any():
                        raise InputError("matrices do not define an action")
        else:
            raise InputError(
                "large group without presentation: cannot verify action")

    def _invert(self, m: np.ndarray) -> np.ndarray:
        sol = la.solve_right(m, la.identity(self.dim), self.p)
        assert sol is not None
        return sol

    def mat_of(self, elem: int) -> np.ndarray:
        got = self._mat_cache.get(elem)
        if got is not None:
            return got
        parent, gi = self.group._parents[elem]
        m = la.matmul(self.mat_of(parent), self.mats[gi], self.p)
        self._mat_cache[elem] = m
        return m

    def act(self, v: np.ndarray, elem: int) -> np.ndarray:
        return la.matmul(v.reshape(1, -1), self.mat_of(elem), self.p)[0]

    def restrict_to(self, H: FiniteGroup, embedding: list[int]) -> "GModule":
        """Module over H whose generators act through `embedding` into G."""
        mats = [self.mat_of(embedding[g]) for g in H.gen_indices]
        return GModule(H, self.p, mats)

    def dual(self) -> "GModule":
        mats = [self._invert(m).T for m in self.mats]
        return GModule(self.group, self.p, mats, check=False)

    def fingerprint(self) -> tuple:
        """(dim, traces of p'-class representatives) — simple-module label."""
        traces = []
        for cl in self.group.conjugacy_classes():
            if cl.element_order % self.p != 0:
                traces.append(int(np.trace(self.mat_of(cl.representative)) % self.p))
        return (self.dim, tuple(traces))


@dataclass
class LoewyData:
    """Radical filtration, listed socle-first (display order).

    layers[j] are the simple labels of rad^{L-1-j} M / rad^{L-j} M, so the
    last entry is the head; display() joins the layers bottom-to-top with
    arrows the way the extension structure is usually drawn.
    arrows[j] holds (label_lower, label_upper) pairs between layers j, j+1
    coming from indecomposable two-layer subquotients.
    """
    layers: list[list[tuple]]
    arrows: list[list[tuple]]
    label_names: dict[tuple, str] = field(default_factory=dict)

    def name(self, lab: tuple) -> str:
        return self.label_names.get(lab, f"S{lab[0]}#{abs(hash(lab)) % 97}")

    def layer_str(self, layer: list[tuple]) -> str:
        return " + ".join(sorted(self.name(lab) for lab in layer))

    def display(self) -> str:
        return " -> ".join(self.layer_str(layer) for layer in self.layers)

    @property
    def total_dim(self) -> int:
        return sum(lab[0] for layer in self.layers for lab in layer)


# -- submodule machinery -------------------------------------------------------


def spin(M: GModule, seeds: np.ndarray) -> np.ndarray:
    """Smallest submodule containing the given row vectors (rref basis)."""
    basis, _ = la.rref(np.atleast_2d(seeds), M.p)
    while True:
        nxt = [basis]
        for m in M.mats:
            nxt.append(la.matmul(basis, m, M.p))
        newb, _ = la.rref(np.concatenate(nxt), M.p)
        if newb.shape[0] == basis.shape[0]:
            return newb
        basis = newb


def _canonical_vectors(dim: int, p: int):
    """One scaled representative per projective point of F_p^dim."""
    for v in la.all_vectors(dim, p):
        nz = np.nonzero(v)[0]
        if nz.size and v[nz[0]] == 1:
            yield v


def all_submodules(M: GModule) -> list[np.ndarray]:
    """Every submodule (as rref basis), including 0 and M.

    Cyclic submodules from spinning each projective vector, closed under
    pairwise sums.  Guarded by SPIN_DIM_LIMIT.
    """
    if M.dim > SPIN_DIM_LIMIT:
        raise TooLarge(f"submodule enumeration infeasible for dim {M.dim}")
    found: dict[bytes, np.ndarray] = {}
    zero = np.zeros((0, M.dim), dtype=np.int64)
    found[la.span_key(zero, M.p)] = zero
    for v in _canonical_vectors(M.dim, M.p):
        sub = spin(M, v)
        found.setdefault(la.span_key(sub, M.p), sub)
    while True:
        items = list(found.values())
        added = False
        for i in range(len(items)):
            for j in range(i + 1, len(items)):
                s = np.concatenate([items[i], items[j]])
                red, _ = la.rref(s, M.p)
                key = la.span_key(red, M.p)
                if key not in found:
                    found[key] = red
                    added = True
        if not added:
            return sorted(found.values(), key=lambda b: (b.shape[0], b.tobytes()))


def radical(M: GModule) -> np.ndarray:
    """rad M = intersection of the maximal submodules (rref basis)."""
    subs = [s for s in all_submodules(M) if s.shape[0] < M.dim]
    maximal = []
    for s in subs:
        if not any(t is not s and s.shape[0] < t.shape[0]
                   and _contains(t, s, M.p) for t in subs):
            maximal.append(s)
    if not maximal:
        return np.zeros((0, M.dim), dtype=np.int64)
    inter = maximal[0]
    for s in maximal[1:]:
        inter = _intersect(inter, s, M.p)
    return inter


def socle(M: GModule) -> np.ndarray:
    subs = [s for s in all_submodules(M) if s.shape[0] > 0]
    minimal = [s for s in subs
               if not any(t.shape[0] > 0 and t.shape[0] < s.shape[0]
                          and _contains(s, t, M.p) for t in subs)]
    if not minimal:
        return np.zeros((0, M.dim), dtype=np.int64)
    acc = minimal[0]
    for s in minimal[1:]:
        acc, _ = la.rref(np.concatenate([acc, s]), M.p)
    return acc


def _contains(big: np.ndarray, small: np.ndarray, p: int) -> bool:
    red, piv = la.rref(big, p)
    return all(la.row_space_contains(red, piv, v, p) for v in small)


def _intersect(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    if a.shape[0] == 0 or b.shape[0] == 0:
        return np.zeros((0, a.shape[1]), dtype=np.int64)
    stacked = np.concatenate([a, b])
    rels = la.nullspace(stacked.T, p)  # combos summing to zero
    vecs = la.matmul(rels[:, :a.shape[0]], a, p) if rels.shape[0] else \
        np.zeros((0, a.shape[1]), dtype=np.int64)
    red, _ = la.rref(vecs, p)
    return red


def submodule_module(M: GModule, basis: np.ndarray) -> GModule:
    """Action of G on the submodule spanned by `basis`, in basis coordinates."""
    if basis.shape[0] == 0:
        return GModule(M.group, M.p, [np.zeros((0, 0), dtype=np.int64)
                                      for _ in M.mats], check=False)
    mats = []
    for m in M.mats:
        img = la.matmul(basis, m, M.p)
        coeff = la.solve_right(basis, img, M.p)
        if coeff is None:
            raise InputError("basis does not span a submodule")
        mats.append(coeff)
    return GModule(M.group, M.p, mats, check=False)


def quotient_module(M: GModule, basis: np.ndarray) -> tuple[GModule, np.ndarray]:
    """(M / <basis>, projection matrix dim x qdim)."""
    k = basis.shape[0]
    red, piv = la.rref(basis, M.p) if k else (basis, [])
    compl = [c for c in range(M.dim) if c not in piv]
    full = np.zeros((M.dim, M.dim), dtype=np.int64)
    if k:
        full[:len(piv)] = red
    for r, c in enumerate(compl):
        full[len(piv) + r, c] = 1
    # coordinates: v -> coefficients of v in rows of `full`; quotient keeps the tail
    to_coords = la.solve_right(full, la.identity(M.dim), M.p)
    assert to_coords is not None
    proj = to_coords[:, len(piv):]
    qmats = []
    for m in M.mats:
        act_rows = la.matmul(full[len(piv):], m, M.p)
        qmats.append(la.matmul(act_rows, proj, M.p))
    return GModule(M.group, M.p, qmats, check=False), proj


def _semisimple_factors(M: GModule) -> list[tuple]:
    """Labels of the simple summands of a semisimple module."""
    out = []
    current = M
    while current.dim > 0:
        best = None
        for v in _canonical_vectors(current.dim, current.p):
            sub = spin(current, v)
            if best is None or sub.shape[0] < best.shape[0] or (
                    sub.shape[0] == best.shape[0] and sub.tobytes() < best.tobytes()):
                best = sub
            if sub.shape[0] == 1:
                break
        assert best is not None
        out.append(submodule_module(current, best).fingerprint())
        current, _ = quotient_module(current, best)
    return sorted(out)


def loewy_layers(M: GModule, label_names: dict | None = None) -> LoewyData:
    """Radical filtration with socle-first layer list; see LoewyData."""
    if M.dim == 0:
        return LoewyData([], [], label_names or {})
    filtration = [la.identity(M.dim)]  # bases of rad^j M inside M
    current = M
    basis_in_M = la.identity(M.dim)
    while True:
        rad_local = radical(current)
        if rad_local.shape[0] == 0:
            break
        basis_in_M = la.matmul(rad_local, basis_in_M, M.p)
        filtration.append(basis_in_M)
        current = submodule_module(M, basis_in_M)
    layers_topdown = []
    for j in range(len(filtration)):
        upper = filtration[j]
        lower = filtration[j + 1] if j + 1 < len(filtration) else \
            np.zeros((0, M.dim), dtype=np.int64)
        sub = submodule_module(M, upper)
        lower_in_upper = la.solve_right(upper, lower, M.p) if lower.shape[0] else \
            np.zeros((0, upper.shape[0]), dtype=np.int64)
        assert lower_in_upper is not None
        layer_mod, _ = quotient_module(sub, lower_in_upper)
        layers_topdown.append(_semisimple_factors(layer_mod))
    layers = list(reversed(layers_topdown))
    arrows = _loewy_arrows(M, filtration, layers)
    return LoewyData(layers, arrows, label_names or {})


def _loewy_arrows(M: GModule, filtration, layers) -> list[list[tuple]]:
    """Edges between consecutive (socle-first) layers.

    For each two-layer subquotient rad^j/rad^{j+2}: if it does not split as
    (head part) + (socle part), connect every head label to every socle
    label of a common indecomposable summand.  Coarse but deterministic.
    """
    arrows: list[list[tuple]] = []
    L = len(layers)
    for j in range(L - 1):
        # socle-first index j corresponds to rad^(L-2-j) / rad^(L-j)
        top_idx = L - 2 - j
        upper = filtration[top_idx]
        lower = filtration[top_idx + 2] if top_idx + 2 < len(filtration) else \
            np.zeros((0, M.dim), dtype=np.int64)
        sub = submodule_module(M, upper)
        lower_in_upper = la.solve_right(upper, lower, M.p) if lower.shape[0] else \
            np.zeros((0, upper.shape[0]), dtype=np.int64)
        two_layer, _ = quotient_module(sub, lower_in_upper)
        pairs = []
        for piece_basis in indecomposable_summands(two_layer):
            piece = submodule_module(two_layer, piece_basis)
            pl = loewy_plain_layers(piece)
            if len(pl) == 2:
                for low in pl[0]:
                    for high in pl[1]:
                        if (low, high) not in pairs:
                            pairs.append((low, high))
        arrows.append(sorted(pairs))
    return arrows


def loewy_plain_layers(M: GModule) -> list[list[tuple]]:
    """Socle-first layer labels without arrow analysis (no recursion risk)."""
    if M.dim == 0:
        return []
    filtration = [la.identity(M.dim)]
    basis_in_M = la.identity(M.dim)
    current = M
    while True:
        rad_local = radical(current)
        if rad_local.shape[0] == 0:
            break
        basis_in_M = la.matmul(rad_local, basis_in_M, M.p)
        filtration.append(basis_in_M)
        current = submodule_module(M, basis_in_M)
    out = []
    for j in range(len(filtration)):
        upper = filtration[j]
        lower = filtration[j + 1] if j + 1 < len(filtration) else \
            np.zeros((0, M.dim), dtype=np.int64)
        sub = submodule_module(M, upper)
        lower_in_upper = la.solve_right(upper, lower, M.p) if lower.shape[0] else \
            np.zeros((0, upper.shape[0]), dtype=np.int64)
        layer_mod, _ = quotient_module(sub, lower_in_upper)
        out.append(_semisimple_factors(layer_mod))
    return list(reversed(out))


# -- endomorphisms, idempotents, Fitting ---------------------------------------


def endomorphism_basis(M: GModule) -> np.ndarray:
    """Basis (rows, row-major-vectorized) of End_{F_p[G]}(M)."""
    n = M.dim
    if n == 0:
        return np.zeros((0, 0), dtype=np.int64)
    blocks = []
    ident = la.identity(n)
    for A in M.mats:
        # rows: equations (XA - AX)_{ij} = 0; columns: vec(X) row-major.
        # d/dX_kl: delta_{ik} A_{lj} - delta_{jl} A_{ik}  (Kronecker form)
        eqs = (np.kron(ident, A.T) - np.kron(A, ident)) % M.p
        blocks.append(eqs)
    system = np.concatenate(blocks, axis=0)
    basis = la.nullspace(system, M.p)
    for row in basis[: min(4, basis.shape[0])]:
        X = row.reshape(n, n)
        for A in M.mats:
            assert ((X @ A - A @ X) % M.p == 0).all(), "endomorphism check failed"
    return basis


def _endo_idempotents(M: GModule, limit: int = 1 << 20):
    """Yield nontrivial idempotents in End(M), exhausting the algebra."""
    basis = endomorphism_basis(M)
    k = basis.shape[0]
    n = M.dim
    if M.p ** k > limit:
        yield from _idempotents_by_minpoly(M, basis)
        return
    ident = la.identity(n)
    for coeffs in la.all_vectors(k, M.p):
        if not coeffs.any():
            continue
        E = la.asmod(np.tensordot(coeffs, basis, axes=(0, 0)).reshape(n, n), M.p)
        if (E == ident).all():
            continue
        if (la.matmul(E, E, M.p) == E).all():
            yield E


def _poly_mulmod(a, b, p):
    out = np.zeros(len(a) + len(b) - 1, dtype=np.int64)
    for i, x in enumerate(a):
        if x:
            out[i:i + len(b)] = (out[i:i + len(b)] + x * np.asarray(b)) % p
    return [int(v) for v in out]


def _poly_divmod(a, b, p):
    a = [int(x) % p for x in a]
    b = [int(x) % p for x in b]
    while b and b[-1] == 0:
        b.pop()
    q = [0] * max(1, len(a) - len(b) + 1)
    r = list(a)
    inv_lead = la.inv_scalar(b[-1], p)
    while len(r) >= len(b) and any(r):
        while r and r[-1] == 0:
            r.pop()
        if len(r) < len(b):
            break
        f = (r[-1] * inv_lead) % p
        shift = len(r) - len(b)
        q[shift] = f
        for i, c in enumerate(b):
            r[shift + i] = (r[shift + i] - f * c) % p
    while r and r[-1] == 0:
        r.pop()
    return q, r


def _poly_gcd(a, b, p):
    a, b = list(a), list(b)
    while any(b):
        _, r = _poly_divmod(a, b, p)
        a, b = b, r if r else [0]
    if any(a):
        lead = next(x for x in reversed(a) if x)
        a = [(x * la.inv_scalar(lead, p)) % p for x in a]
    return a


def _poly_xgcd(a, b, p):
    """(g, u, v) with u a + v b = g, g monic gcd."""
    r0, r1 = list(a), list(b)
    s0, s1 = [1], [0]
    t0, t1 = [0], [1]
    while any(r1):
        q, r = _poly_divmod(r0, r1, p)
        r0, r1 = r1, r if r else [0]
        s0, s1 = s1, _poly_sub(s0, _poly_mulmod(q, s1, p), p)
        t0, t1 = t1, _poly_sub(t0, _poly_mulmod(q, t1, p), p)
    if any(r0):
        lead = next(x for x in reversed(r0) if x)
        inv = la.inv_scalar(lead, p)
        r0 = [(x * inv) % p for x in r0]
        s0 = [(x * inv) % p for x in s0]
        t0 = [(x * inv) % p for x in t0]
    return r0, s0, t0


def _poly_sub(a, b, p):
    n = max(len(a), len(b))
    out = [0] * n
    for i in range(n):
        av = a[i] if i < len(a) else 0
        bv = b[i] if i < len(b) else 0
        out[i] = (av - bv) % p
    return out


def _poly_eval_matrix(poly, E, p):
    n = E.shape[0]
    out = np.zeros((n, n), dtype=np.int64)
    power = la.identity(n)
    for c in poly:
        if c:
            out = (out + c * power) % p
        power = la.matmul(power, E, p)
    return out


def _min_poly(E: np.ndarray, p: int):
    n = E.shape[0]
    powers = [la.identity(n).reshape(-1)]
    cur = la.identity(n)
    for _ in range(n * n):
        cur = la.matmul(cur, E, p)
        stack = np.stack(powers)
        sol = la.solve_right(stack, cur.reshape(1, -1), p)
        if sol is not None:
            coeffs = [int(-x % p) for x in sol[0]] + [1]
            return coeffs
        powers.append(cur.reshape(-1))
    raise AssertionError("minimal polynomial not found")


def _idempotents_by_minpoly(M: GModule, basis: np.ndarray):
    """Coprime-factor splitting of minimal polynomials of algebra elements."""
    p = M.p
    n = M.dim
    rng = np.random.default_rng(20240601)
    for _ in range(200):
        coeffs = rng.integers(0, p, size=basis.shape[0])
        E = la.asmod(np.tensordot(coeffs, basis, axes=(0, 0)).reshape(n, n), p)
        mp = _min_poly(E, p)
        # coprime split of the minimal polynomial via gcd(mp, x^(p^i) - x)
        xq = [0, 1]
        for _ in range(1, len(mp)):
            xq = _poly_powmod(xq, p, mp, p)
            g = _poly_gcd(mp, _poly_sub(xq, [0, 1], p), p)
            if 1 < len(g) < len(mp):
                f1 = g
                f2, _ = _poly_divmod(mp, g, p)
                gg, u, _v = _poly_xgcd(f1, f2, p)
                if len(gg) == 1 and gg[0] == 1:
                    e = _poly_eval_matrix(_poly_mulmod(u, f1, p), E, p)
                    if (la.matmul(e, e, p) == e).all() and e.any() and \
                            (e != la.identity(n)).any():
                        yield e
                break


def _poly_powmod(a, e, mod, p):
    out = [1]
    base = _poly_divmod(a, mod, p)[1] or [0]
    while e:
        if e & 1:
            out = _poly_divmod(_poly_mulmod(out, base, p), mod, p)[1] or [0]
        base = _poly_divmod(_poly_mulmod(base, base, p), mod, p)[1] or [0]
        e >>= 1
    return out


def fitting_decompose(M: GModule, endo: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Iterate the endomorphism until ker and image stabilize; return bases.

    The result is a G-stable direct sum decomposition M = ker + im.
    """
    p = M.p
    E = la.asmod(endo, p)
    power = E
    prev_rank = -1
    for _ in range(M.dim + 1):
        r = la.rank(power, p)
        if r == prev_rank:
            break
        prev_rank = r
        power = la.matmul(power, E, p)
    image, _ = la.rref(power, p)
    kernel = la.nullspace(power.T, p)
    assert image.shape[0] + kernel.shape[0] == M.dim
    combined = np.concatenate([kernel, image]) if kernel.size or image.size else kernel
    assert la.rank(combined, p) == M.dim, "kernel+image not a direct sum"
    return kernel, image


def indecomposable_summands(M: GModule) -> list[np.ndarray]:
    """Bases (in M coordinates) of an indecomposable direct sum decomposition."""
    if M.dim == 0:
        return []
    for E in _endo_idempotents(M):
        ker, img = fitting_decompose(M, E)
        if ker.shape[0] == 0 or img.shape[0] == 0:
            continue
        out = []
        for part in (ker, img):
            sub = submodule_module(M, part)
            for inner in indecomposable_summands(sub):
                out.append(la.matmul(inner, part, M.p))
        return out
    return [la.identity(M.dim)]


def is_indecomposable(M: GModule) -> bool:
    if M.dim == 0:
        return False
    for E in _endo_idempotents(M):
        ker, img = fitting_decompose(M, E)
        if ker.shape[0] and img.shape[0]:
            return False
    return True


# -- induction ------------------------------------------------------------------


def induce(Mprime: GModule, G: FiniteGroup) -> GModule:
    """Induced module along a subgroup inclusion (right cosets as basis).

    Mprime.group must be literally a subgroup of G: same degree, every
    element present in G's table.
    """
    H = Mprime.group
    embed = G.element_subgroup(H)
    if embed is None:
        raise NotASubgroup("module group is not a subgroup of G")
    h_of_g = {embed[i]: i for i in range(H.order)}
    # right cosets Hg, reps chosen minimal by G element index
    rep_of: dict[int, int] = {}
    reps: list[int] = []
    for x in range(G.order):
        if x in rep_of:
            continue
        members = sorted(G.mul(embed[h], x) for h in range(H.order))
        for m in members:
            rep_of[m] = len(reps)
        reps.append(members[0])
    ncos = len(reps)
    m = Mprime.dim
    dim = m * ncos
    mats = []
    for g in G.gen_indices:
        big = np.zeros((dim, dim), dtype=np.int64)
        for i, rep in enumerate(reps):
            t = G.mul(rep, g)
            j = rep_of[t]
            # rep * g = h * reps[j]  with h in H
            h = G.mul(t, int(G.inv[reps[j]]))
            hm = h_of_g.get(h)
            assert hm is not None, "coset bookkeeping broke"
            block = Mprime.mat_of(hm)
            big[i * m:(i + 1) * m, j * m:(j + 1) * m] = block
        mats.append(big)
    return GModule(G, Mprime.p, mats, check=G.order <= FULL_ACTION_CHECK_LIMIT)


# -- section 2.1 utilities -------------------------------------------------------


def invariant_vectors(M: GModule, elements) -> np.ndarray:
    """Common fixed row-space of the listed group elements."""
    if not elements:
        return la.identity(M.dim)
    blocks = [(M.mat_of(e) - la.identity(M.dim)) % M.p for e in elements]
    return la.nullspace(np.concatenate(blocks, axis=1).T, M.p)


def involution_pairing(v1, v2, h: tuple[int, ...], p: int) -> int:
    """<v1, v2>_h = sum_i v1[i] * v2[h(i)] for a basis involution h."""
    n = len(h)
    if sorted(h) != list(range(n)):
        raise NotInvolution("h is not a permutation")
    if any(h[h[i]] != i for i in range(n)):
        raise NotInvolution("h^2 != identity")
    v1 = la.asmod(np.asarray(v1), p)
    v2 = la.asmod(np.asarray(v2), p)
    if len(v1) != n or len(v2) != n:
        raise DimensionMismatch("vector length must match h")
    return int(sum(v1[i] * v2[h[i]] for i in range(n)) % p)


def frobenius_check(G: FiniteGroup, p: int, samples: int = 25, seed: int = 7) -> bool:
    """<ab, c> == <a, bc> on sampled group-algebra triples, h = inversion.

    The pairing takes the coefficient of the identity; associativity of the
    convolution product makes this an exact identity, checked numerically.
    """
    rng = np.random.default_rng(seed)
    n = G.order
    h = tuple(int(G.inv[i]) for i in range(n))

    def convolve(a, b):
        out = np.zeros(n, dtype=np.int64)
        for i in np.nonzero(a)[0]:
            for j in np.nonzero(b)[0]:
                out[G.mul(int(i), int(j))] += a[i] * b[j]
        return out % p

    for _ in range(samples):
        a, b, c = (la.asmod(rng.integers(0, p, size=n) *
                            (rng.random(n) < 0.2), p) for _ in range(3))
        lhs = involution_pairing(convolve(a, b), c, h, p)
        rhs = involution_pairing(a, convolve(b, c), h, p)
        if lhs != rhs:
            return False
    return True


def hopf_tensor(M: GModule, N: GModule) -> GModule:
    """Diagonal tensor product: g acts as A_g (x) B_g."""
    if M.group is not N.group or M.p != N.p:
        raise DimensionMismatch("tensor factors must share group and prime")
    mats = [la.asmod(np.kron(a, b), M.p) for a, b in zip(M.mats, N.mats)]
    return GModule(M.group, M.p, mats, check=False)


def trivial_module(G: FiniteGroup, p: int, dim: int = 1) -> GModule:
    return GModule(G, p, [la.identity(dim) for _ in G.gen_indices], check=False)


def regular_module(G: FiniteGroup, p: int) -> GModule:
    """Right regular representation as permutation matrices."""
    mats = []
    for g in G.gen_indices:
        m = np.zeros((G.order, G.order), dtype=np.int64)
        for x in range(G.order):
            m[x, G.mul(x, g)] = 1
        mats.append(m)
    return GModule(G, p, mats, check=False)


# -- Fox derivative blocks --------------------------------------------------------


def fox_matrix(P: Presentation, M: GModule) -> np.ndarray:
    """Linear map M^d -> M^s of lift-change on relator tails.

    Block (i, j) is the free derivative of relator i by generator j pushed
    through the module action; computed by evaluating each relator on lifted
    generators (x_j, m_j) in the split extension, which avoids convention
    slips.  Returns an (s*dim) x (d*dim) matrix acting on row vectors:
    tails = m_vec @ fox.T arranged per relator.
    """
    if len(P.relators) == 0:
        return np.zeros((0, P.ngens * M.dim), dtype=np.int64)
    if M.group is not None and len(M.mats) != P.ngens:
        raise DimensionMismatch("module must have one matrix per presentation generator")
    d, m, p = P.ngens, M.dim, M.p
    inv_mats = [M._invert(A) for A in M.mats]
    out = np.zeros((len(P.relators) * m, d * m), dtype=np.int64)
    for j in range(d):
        for b in range(m):
            # lift x_j by basis vector e_b, others by zero; evaluate all relators
            for i, rel in enumerate(P.relators):
                vec = np.zeros(m, dtype=np.int64)
                for letter in rel:
                    gi = abs(letter) - 1
                    if letter > 0:
                        # (g, v)(x_gi, m_gi) = (g x_gi, v A + m_gi)
                        vec = la.matmul(vec.reshape(1, -1), M.mats[gi], p)[0]
                        if gi == j:
                            vec[b] = (vec[b] + 1) % p
                    else:
                        vec = la.matmul(vec.reshape(1, -1), inv_mats[gi], p)[0]
                        if gi == j:
                            vec = (vec - inv_mats[gi][b]) % p
                out[i * m:(i + 1) * m, j * m + b] = vec
    return out


def coboundary_tails(P: Presentation, M: GModule) -> np.ndarray:
    """Row space basis of the achievable tail changes (image of fox_matrix)."""
    fox = fox_matrix(P, M)
    basis, _ = la.rref(fox.T, M.p)
    return basis


def parse_module_file(text: str, group: FiniteGroup) -> GModule:
    """Text format: `p: 2`, `dim: 5`, then one matrix per group generator,
    each as `dim` lines of digit strings (columns run left to right)."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines[0].lower().startswith("p:") or not lines[1].lower().startswith("dim:"):
        raise InputError("module file must start with 'p:' and 'dim:' headers")
    p = int(lines[0].split(":", 1)[1])
    dim = int(lines[1].split(":", 1)[1])
    rows = lines[2:]
    need = dim * len(group.gen_indices)
    if len(rows) != need:
        raise InputError(f"expected {need} matrix rows, found {len(rows)}")
    mats = []
    for gi in range(len(group.gen_indices)):
        block = rows[gi * dim:(gi + 1) * dim]
        mat = np.array([[int(ch) for ch in row] for row in block],
                       dtype=np.int64)
        if mat.shape != (dim, dim):
            raise InputError(f"matrix {gi} is not {dim}x{dim}")
        mats.append(mat)
    return GModule(group, p, mats)


def format_module_file(M: GModule) -> str:
    out = [f"p: {M.p}", f"dim: {M.dim}"]
    for mat in M.mats:
        for row in mat:
            out.append("".join(str(int(x)) for x in row))
    return "\n".join(out) + "\n"


@dataclass
class ModuleMap:
    """A linear map commuting with both module actions (verified)."""
    matrix: np.ndarray
    source: GModule
    target: GModule

    def __post_init__(self):
        self.matrix = la.asmod(self.matrix, self.source.p)
        if self.matrix.shape != (self.source.dim, self.target.dim):
            raise DimensionMismatch("matrix shape must be source dim x target dim")
        for A, B in zip(self.source.mats, self.target.mats):
            lhs = la.matmul(A, self.matrix, self.source.p)
            rhs = la.matmul(self.matrix, B, self.source.p)
            if (lhs != rhs).any():
                raise InputError("map does not commute with the actions")

    def is_surjective(self) -> bool:
        return la.rank(self.matrix.T, self.source.p) == self.target.dim

    def apply(self, v: np.ndarray) -> np.ndarray:
        return la.matmul(np.atleast_2d(v), self.matrix, self.source.p)[0]
