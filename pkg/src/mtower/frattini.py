"""Characteristic p-Frattini levels: dihedral closed form, split towers by
iterated Frattini quotients of a free group, and the general case by
relator-tail second-cohomology search.

Every constructed level is normalized to a canonical "pair model": elements
are pairs (base element, kernel vector) with

    (g, v) * (h, w) = (g h, v A_h + w + psi(g, h))

where psi is the 2-cocycle read off a chosen section (kernel written on the
right of the section: s(g) s(h) = s(gh) psi(g, h)).  The pair model makes
element indexing independent of coset-enumeration internals, so serialized
levels and downstream orbit reports are byte-stable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .errors import (ActionLiftFailed, Budget, Collapse, InputError,
                     NotPPrime, OrderExceeded)
from .fp import (CosetTable, Presentation, commutator_word, free_reduce,
                 invert_word, schreier_generators, todd_coxeter, word_pow)
from .gmodules import (GModule, coboundary_tails, indecomposable_summands,
                       induce, submodule_module, trivial_module)
from .groups import (ConjClass, FiniteGroup, find_isomorphism,
                     subgroup_from_indices)
from .perms import Perm


@dataclass
class FrattiniLevel:
    total: FiniteGroup
    base: FiniteGroup
    p: int
    proj: np.ndarray                 # total element -> base element
    section: np.ndarray              # base element -> total element (set-theoretic)
    kernel_elems: list[int]          # total elements, ordered by kernel vector
    kernel_coords: dict[int, np.ndarray]
    kernel_module: GModule           # over base, in base-generator order
    psi: np.ndarray                  # cocycle (n_base, n_base, dim)
    name: str = ""

    @property
    def kernel_dim(self) -> int:
        return self.kernel_module.dim

    def lifts(self, g: int) -> list[int]:
        s = int(self.section[g])
        return [self.total.mul(s, k) for k in self.kernel_elems]

    def preimage(self, elements) -> list[int]:
        keep = set(int(x) for x in elements)
        return [x for x in range(self.total.order) if int(self.proj[x]) in keep]


# -- pair model construction -----------------------------------------------------


def pair_model_group(base: FiniteGroup, module: GModule, psi: np.ndarray,
                     name: str = "") -> tuple[FiniteGroup, dict]:
    """Extension of `base` by `module` along cocycle `psi` as a FiniteGroup.

    Points of the permutation domain are pairs g * p^m + int(v); generators
    are the lifts (gen, 0) of the base generators followed by the kernel
    basis (1, e_j).  Requires psi normalized: psi[0,:] = psi[:,0] = 0.
    """
    p, m = module.p, module.dim
    nb = base.order
    P = p ** m
    npts = nb * P
    if (psi[0] != 0).any() or (psi[:, 0] != 0).any():
        raise InputError("cocycle not normalized at the identity")

    vecs = np.stack([la.int_vec(k, m, p) for k in range(P)]) if m else \
        np.zeros((1, 0), dtype=np.int64)

    def translation(h: int, w: np.ndarray) -> Perm:
        img = np.empty(npts, dtype=np.int64)
        for g in range(nb):
            gh = base.mul(g, h)
            moved = (vecs @ module.mat_of(h) + w + psi[g, h]) % p if m else vecs
            tgt = (moved * (p ** np.arange(m))).sum(axis=1) if m else \
                np.zeros(1, dtype=np.int64)
            img[g * P:(g + 1) * P] = gh * P + tgt
        return Perm(tuple(int(x) for x in img))

    gens = [translation(g, np.zeros(m, dtype=np.int64)) for g in base.gen_indices]
    for j in range(m):
        e = np.zeros(m, dtype=np.int64)
        e[j] = 1
        gens.append(translation(0, e))
    total = FiniteGroup(gens, max_order=npts + 1, name=name)
    if total.order != npts:
        raise Collapse(f"pair model closed at {total.order}, expected {npts}")

    # element <-> pair bookkeeping via the image of point 0 (regular action)
    elem_of_point = np.empty(npts, dtype=np.int64)
    for e in range(npts):
        elem_of_point[int(total.elements[e][0])] = e
    proj = np.empty(npts, dtype=np.int64)
    coords = {}
    for e in range(npts):
        pt = int(total.elements[e][0])
        proj[e] = pt // P
        coords[e] = vecs[pt % P].copy()
    section = np.array([int(elem_of_point[g * P]) for g in range(nb)],
                       dtype=np.int64)
    kernel = [int(elem_of_point[k]) for k in range(P)]
    info = dict(proj=proj, section=section, kernel=kernel,
                coords={e: coords[e] for e in kernel})
    return total, info


def level_from_pair_model(base: FiniteGroup, module: GModule, psi: np.ndarray,
                          p: int, name: str = "") -> FrattiniLevel:
    total, info = pair_model_group(base, module, psi, name=name)
    lvl = FrattiniLevel(
        total=total, base=base, p=p, proj=info["proj"], section=info["section"],
        kernel_elems=info["kernel"], kernel_coords=info["coords"],
        kernel_module=module, psi=psi, name=name)
    _check_level(lvl)
    return lvl


def _check_level(lvl: FrattiniLevel) -> None:
    tot, base = lvl.total, lvl.base
    assert tot.order == base.order * lvl.p ** lvl.kernel_dim
    # projection is a homomorphism (table check on generator columns)
    for x in range(tot.order):
        for g in tot.gen_indices:
            if int(lvl.proj[tot.mul(x, g)]) != base.mul(int(lvl.proj[x]),
                                                        int(lvl.proj[g])):
                raise AssertionError("projection not a homomorphism")
    # conjugation on the kernel realizes the module action
    for gi, g in enumerate(base.gen_indices):
        s = int(lvl.section[g])
        for k in lvl.kernel_elems:
            got = tot.mul(tot.mul(int(tot.inv[s]), k), s)
            want = (lvl.kernel_coords[k] @ lvl.kernel_module.mats[gi]) % lvl.p
            if (lvl.kernel_coords[got] != want).any():
                raise AssertionError("kernel conjugation != module action")


def extract_cocycle(total: FiniteGroup, base: FiniteGroup, proj: np.ndarray,
                    section: np.ndarray, kernel_coords: dict[int, np.ndarray],
                    p: int, dim: int) -> np.ndarray:
    """psi(g,h) = s(gh)^-1 s(g) s(h) in kernel coordinates."""
    nb = base.order
    psi = np.zeros((nb, nb, dim), dtype=np.int64)
    for g in range(nb):
        sg = int(section[g])
        for h in range(nb):
            prod = total.mul(sg, int(section[h]))
            k = total.mul(int(total.inv[int(section[base.mul(g, h)])]), prod)
            psi[g, h] = kernel_coords[k]
    return psi


# -- dihedral closed form ----------------------------------------------------------


def _dihedral_decode(G: FiniteGroup, elem: int, n: int) -> tuple[int, int]:
    arr = G.elements[elem]
    a = int(arr[0])
    flip = 0 if int(arr[(0 + 1) % n]) == (a + 1) % n else 1
    return a, flip


def _dihedral_elem(G: FiniteGroup, n: int, a: int, flip: int) -> int:
    if flip:
        img = [(-i + a) % n for i in range(n)]
    else:
        img = [(i + a) % n for i in range(n)]
    got = G.lookup(np.array(img, dtype=np.int32))
    assert got is not None
    return got


def dihedral_level(p: int, k: int, max_order: int = 1 << 20) -> list[FrattiniLevel]:
    """Tower D_{p^{j+1}} -> D_{p^j} for j = 1..k (p odd).

    k = 0 returns the degenerate level: D_p over itself with trivial kernel.
    """
    from .groups import dihedral_group

    if p == 2 or p < 3:
        raise InputError("dihedral tower needs an odd prime")
    if 2 * p ** (k + 1) > max_order:
        raise OrderExceeded("dihedral level past group-order budget")
    if k == 0:
        D = dihedral_group(p)
        zero = np.zeros((D.order, D.order, 0), dtype=np.int64)
        module = GModule(D, p, [np.zeros((0, 0), dtype=np.int64)] * 2, check=False)
        return [FrattiniLevel(
            total=D, base=D, p=p, proj=np.arange(D.order, dtype=np.int64),
            section=np.arange(D.order, dtype=np.int64), kernel_elems=[0],
            kernel_coords={0: np.zeros(0, dtype=np.int64)},
            kernel_module=module, psi=zero, name=f"D{p}ident")]
    levels = []
    base = dihedral_group(p)
    for j in range(1, k + 1):
        lvl = dihedral_step(base, p)
        levels.append(lvl)
        base = lvl.total
    return levels


def dihedral_step(base: FiniteGroup, p: int) -> FrattiniLevel:
    """One closed-form level D_{np} -> D_n over the given dihedral base.

    The base must act on n points in the standard rotation/reflection form
    (point images decode as i -> +-i + a); the total is the standard
    dihedral group of order 2np.
    """
    from .groups import dihedral_group

    nb = base.degree
    if base.order != 2 * nb or nb % p:
        raise InputError("base is not a standard dihedral group of p-power rotation")
    nt = nb * p
    Dt = dihedral_group(nt)
    proj = np.empty(Dt.order, dtype=np.int64)
    for e in range(Dt.order):
        a, f = _dihedral_decode(Dt, e, nt)
        proj[e] = _dihedral_elem(base, nb, a % nb, f)
    section = np.empty(base.order, dtype=np.int64)
    for e in range(base.order):
        a, f = _dihedral_decode(base, e, nb)
        section[e] = _dihedral_elem(Dt, nt, a, f)
    kernel = [_dihedral_elem(Dt, nt, c * nb, 0) for c in range(p)]
    coords = {kernel[c]: np.array([c], dtype=np.int64) for c in range(p)}
    module = GModule(base, p, [np.array([[1]]), np.array([[p - 1]])],
                     check=False)
    psi = extract_cocycle(Dt, base, proj, section, coords, p, 1)
    lvl = FrattiniLevel(Dt, base, p, proj, section, kernel, coords, module,
                        psi, name=f"D{nt}->D{nb}")
    _check_level(lvl)
    return lvl


# -- split case ---------------------------------------------------------------------


@dataclass
class SplitTower:
    level: FrattiniLevel             # G1 -> G0
    h_lift_images: list[int]         # chosen images of the P1 generators under h
    p1_presentation: Presentation    # on the d free generators
    g0: FiniteGroup
    g1: FiniteGroup


def _semidirect_group(H: FiniteGroup, n_u: int, u_mul, u_act, u_gens,
                      name: str) -> FiniteGroup:
    """P x| H on pairs (h, u): (h1,u1)(h2,u2) = (h1 h2, act(u1, h2) * u2).

    u_mul(u1, u2), u_act(u, h) and the list u_gens describe the normal part
    abstractly; points are h * n_u + u.
    """
    npts = H.order * n_u

    def translation(h2: int, u2: int) -> Perm:
        img = np.empty(npts, dtype=np.int64)
        for h in range(H.order):
            hh = H.mul(h, h2)
            for u in range(n_u):
                v = u_mul(u_act(u, h2), u2)
                img[h * n_u + u] = hh * n_u + v
        return Perm(tuple(int(x) for x in img))

    gens = [translation(0, u) for u in u_gens]
    gens += [translation(hg, 0) for hg in H.gen_indices]
    G = FiniteGroup(gens, max_order=npts + 1, name=name)
    if G.order != npts:
        raise Collapse(f"semidirect product closed at {G.order}, expected {npts}")
    return G


def split_level(d: int, p: int, H: FiniteGroup, H_mats: list[np.ndarray],
                max_cosets: int = 1 << 20) -> SplitTower:
    """One Frattini level of P0 x| H for elementary abelian P0 = (Z/p)^d.

    P1 = F / Phi(Phi(F)) is enumerated from the Schreier generators of
    Phi(F) = ker(F -> P0); the H-action on P0 is lifted to P1 by taking the
    lexicographically first generator-image assignment satisfying both the
    P1 relations and H's relation (H must be cyclic here).
    """
    if len(H.gen_indices) != 1:
        raise ActionLiftFailed("action lift implemented for cyclic complements")
    h_order = H.element_order(H.gen_indices[0])
    A_h = la.asmod(H_mats[0], p)

    free = Presentation(d, ())
    p0_rels = tuple([word_pow((i + 1,), p) for i in range(d)] +
                    [commutator_word((i + 1,), (j + 1,))
                     for i in range(d) for j in range(i + 1, d)])
    T0 = todd_coxeter(Presentation(d, p0_rels), (), max_cosets)
    sgens = schreier_generators(free, T0)
    p1_rels = []
    for i, s in enumerate(sgens):
        p1_rels.append(free_reduce(word_pow(s, p)))
        for t in sgens[i + 1:]:
            w = commutator_word(s, t)
            if w:
                p1_rels.append(w)
    P1_pres = Presentation(d, tuple(r for r in p1_rels if r))
    T1 = todd_coxeter(P1_pres, (), max_cosets)
    dprime = len(sgens)
    if T1.n != p ** (d + dprime):
        raise Collapse(f"P1 closed at {T1.n}, expected {p ** (d + dprime)}")

    # P0 as translation group on F_p^d vectors; generator i = e_i
    P0 = _vector_group(d, p)
    # kernel coordinates inside T1, in the Schreier-generator basis
    kernel_cosets, kcoords = _table_kernel_coords(
        T1, lambda c: _p0_elem_of_word(P0, T1.rep_words[c], d, p), dprime, p,
        basis_words=sgens)
    mats0 = []
    for i in range(d):
        rows = []
        for s in sgens:
            w = invert_word((i + 1,)) + s + (i + 1,)
            rows.append(kcoords[_coset_in_kernel(T1, w)])
        mats0.append(np.stack(rows))
    M0_over_P0 = GModule(P0, p, mats0, check=False)
    psi_p1 = _cocycle_from_table(T1, P0, kcoords, d, p,
                                 lambda g: _p0_word(P0, g, d, p))
    P1, info1 = pair_model_group(P0, M0_over_P0, psi_p1, name="P1")

    # x-only BFS words inside P1 (generators 0..d-1 of the pair model)
    xwords = _restricted_words(P1, list(range(d)))

    # lift the H generator: images of the P1 generators over (e_i) A_h
    targets = [int(la.vec_int(A_h[i], p)) for i in range(d)]  # P0 elем index = vec int
    cand_lists = []
    for i in range(d):
        s = int(info1["section"][targets[i]])
        cands = sorted(P1.mul(s, k) for k in info1["kernel"])
        cand_lists.append(cands)
    alpha_images = _find_action_lift(P1, P1_pres, cand_lists, h_order, d)
    if alpha_images is None:
        raise ActionLiftFailed("no compatible lift of the complement action")
    alpha = _endomorphism_from_images(P1, alpha_images, list(range(d)))

    # alpha powers for each element of (cyclic) H
    h_gen = H.gen_indices[0]
    pow_of = {}
    e = 0
    acc = np.arange(P1.order, dtype=np.int64)
    alpha_arr = np.array(alpha, dtype=np.int64)
    for _ in range(h_order):
        pow_of[e] = acc.copy()
        e = H.mul(e, h_gen)
        acc = alpha_arr[acc]
    assert e == 0

    mats0_powers = {}
    e = 0
    accm = la.identity(d)
    for _ in range(h_order):
        mats0_powers[e] = accm.copy()
        e = H.mul(e, h_gen)
        accm = la.matmul(accm, A_h, p)

    G0 = _semidirect_group(
        H, P0.order, lambda u1, u2: P0.mul(u1, u2),
        lambda u, h2: _vector_elem(P0, (  # u acted by h2's matrix
            _vector_of(P0, u, d, p) @ mats0_powers[h2]) % p),
        [_vector_elem(P0, v) for v in np.eye(d, dtype=np.int64)], name="G0split")
    G1 = _semidirect_group(
        H, P1.order, lambda u1, u2: P1.mul(u1, u2),
        lambda u, h2: int(pow_of[h2][u]),
        [P1.gen_indices[i] for i in range(d)], name="G1split")
    assert G0.order == H.order * P0.order and G1.order == H.order * P1.order

    # projection/section/kernel over the pair point layout (h*nu + u)
    proj = np.empty(G1.order, dtype=np.int64)
    for eidx in range(G1.order):
        pt = int(G1.elements[eidx][0])
        h_part, u_part = divmod(pt, P1.order)
        u0 = int(info1["proj"][u_part])
        proj[eidx] = _pair_elem(G0, P0.order, h_part, u0)
    section = np.empty(G0.order, dtype=np.int64)
    for eidx in range(G0.order):
        pt = int(G0.elements[eidx][0])
        h_part, u0 = divmod(pt, P0.order)
        u1 = int(info1["section"][u0])
        section[eidx] = _pair_elem(G1, P1.order, h_part, u1)
    m = dprime
    kernel, coords = [], {}
    for k in info1["kernel"]:
        eidx = _pair_elem(G1, P1.order, 0, k)
        kernel.append(eidx)
        coords[eidx] = info1["coords"][k].copy()
    kernel.sort(key=lambda e2: la.vec_int(coords[e2], p))
    basis_elems = [next(e2 for e2 in kernel
                        if la.vec_int(coords[e2], p) == p ** j) for j in range(m)]

    gen_mats = []
    for g in G0.gen_indices:
        s = int(section[g])
        rows = []
        for k in basis_elems:
            got = G1.mul(G1.mul(int(G1.inv[s]), k), s)
            rows.append(coords[got])
        gen_mats.append(np.stack(rows))
    _attach_g0_presentation(G0, d, p, h_order, A_h)
    M0 = GModule(G0, p, gen_mats)
    psi = extract_cocycle(G1, G0, proj, section, coords, p, m)
    lvl = FrattiniLevel(G1, G0, p, proj, section, kernel, coords, M0, psi,
                        name=f"split d={d} p={p}")
    _check_level(lvl)
    _attach_g1_presentation(G1, P1_pres, xwords, alpha_images, d, p, h_order)
    return SplitTower(lvl, alpha_images, P1_pres, G0, G1)


def _vector_group(d: int, p: int) -> FiniteGroup:
    gens = []
    n = p ** d
    for i in range(d):
        img = [(la.vec_int((la.int_vec(k, d, p) +
                            np.eye(d, dtype=np.int64)[i]) % p, p)) for k in range(n)]
        gens.append(Perm(tuple(img)))
    G = FiniteGroup(gens, max_order=n + 1, name=f"(Z/{p})^{d}")
    assert G.order == n
    return G


def _vector_of(P0: FiniteGroup, elem: int, d: int, p: int) -> np.ndarray:
    return la.int_vec(int(P0.elements[elem][0]), d, p)


def _vector_prime(P0: FiniteGroup, d: int) -> int:
    n = P0.order
    for p in (2, 3, 5, 7, 11, 13):
        if p ** d == n:
            return p
    raise AssertionError("not a vector group")


def _vector_elem(P0: FiniteGroup, v: np.ndarray) -> int:
    # P0 points are base-p vector codes; an element maps point 0 to its own code
    v = np.asarray(v, dtype=np.int64)
    target = la.vec_int(v, _vector_prime(P0, len(v)))
    for e in range(P0.order):
        if int(P0.elements[e][0]) == target:
            return e
    raise AssertionError("vector element not found")


def _pair_elem(G: FiniteGroup, n_u: int, h: int, u: int) -> int:
    pt = h * n_u + u
    for e in range(G.order):
        if int(G.elements[e][0]) == pt:
            return e
    raise AssertionError("pair element not found")


def _p0_word(P0: FiniteGroup, g: int, d: int, p: int) -> tuple[int, ...]:
    v = _vector_of(P0, g, d, p)
    out: list[int] = []
    for i in range(d):
        out.extend([i + 1] * int(v[i]))
    return tuple(out)


def _p0_elem_of_word(P0: FiniteGroup, word, d: int, p: int) -> int:
    v = np.zeros(d, dtype=np.int64)
    for letter in word:
        v[abs(letter) - 1] += 1 if letter > 0 else -1
    v %= p
    return _vector_elem(P0, v)


def _coset_in_kernel(T: CosetTable, word) -> int:
    return T.act_word(0, free_reduce(word))


def _table_kernel_coords(T: CosetTable, proj_of_coset, expected_dim: int, p: int,
                         basis_words=None):
    """Kernel cosets (proj == identity) with F_p coordinates.

    Coordinates are taken against `basis_words` (words whose cosets span the
    kernel) when given, else against a greedy basis in coset order.
    """
    kernel = [c for c in range(T.n) if proj_of_coset(c) == 0]
    assert len(kernel) == p ** expected_dim, (len(kernel), expected_dim)
    coords: dict[int, np.ndarray] = {0: np.zeros(expected_dim, dtype=np.int64)}
    if basis_words is not None:
        assert len(basis_words) == expected_dim
        for j, w in enumerate(basis_words):
            grown = dict(coords)
            for known, vec in coords.items():
                cur = known
                for e in range(1, p):
                    cur = T.act_word(cur, w)
                    v = vec.copy()
                    v[j] = e
                    assert cur not in grown, "kernel basis words not independent"
                    grown[cur] = v
            coords = grown
    else:
        basis: list[int] = []
        for c in kernel:
            if c in coords:
                continue
            j = len(basis)
            basis.append(c)
            grown = dict(coords)
            for known, vec in coords.items():
                cur = known
                for e in range(1, p):
                    cur = T.act_word(cur, T.rep_words[c])
                    v = vec.copy()
                    v[j] = e
                    grown[cur] = v
            coords = grown
        assert len(basis) == expected_dim
    assert len(coords) == len(kernel)
    return kernel, coords


def _cocycle_from_table(T: CosetTable, base: FiniteGroup, kcoords, d: int, p: int,
                        word_of_base):
    nb = base.order
    m = len(next(iter(kcoords.values())))
    psi = np.zeros((nb, nb, m), dtype=np.int64)
    words = [tuple(word_of_base(g)) for g in range(nb)]
    for g in range(nb):
        for h in range(nb):
            gh = base.mul(g, h)
            w = invert_word(words[gh]) + words[g] + words[h]
            psi[g, h] = kcoords[_coset_in_kernel(T, w)]
    return psi


def _restricted_words(G: FiniteGroup, gen_positions: list[int]) -> list[tuple[int, ...]]:
    """BFS words for every element using only the listed generators."""
    words: list[tuple[int, ...] | None] = [None] * G.order
    words[0] = ()
    queue = [0]
    head = 0
    while head < len(queue):
        x = queue[head]
        head += 1
        for gp in gen_positions:
            y = G.mul(x, G.gen_indices[gp])
            if words[y] is None:
                words[y] = words[x] + (gp + 1,)
                queue.append(y)
    if any(w is None for w in words):
        raise AssertionError("listed generators do not generate")
    return [w for w in words if w is not None]


def _find_action_lift(P1: FiniteGroup, P1_pres: Presentation,
                      cand_lists: list[list[int]], h_order: int,
                      d: int) -> list[int] | None:
    def rec(pos, images):
        if pos == d:
            for rel in P1_pres.relators:
                cur = 0
                for letter in rel:
                    g = images[abs(letter) - 1]
                    cur = P1.mul(cur, g if letter > 0 else int(P1.inv[g]))
                if cur != 0:
                    return None
            alpha = _endomorphism_from_images(P1, images, list(range(d)))
            if alpha is None:
                return None
            cur = list(range(P1.order))
            for _ in range(h_order):
                cur = [alpha[c] for c in cur]
            if all(cur[i] == i for i in range(P1.order)):
                return images
            return None
        for c in cand_lists[pos]:
            got = rec(pos + 1, images + [c])
            if got is not None:
                return got
        return None

    return rec(0, [])


def _endomorphism_from_images(G: FiniteGroup, images: list[int],
                              gen_positions: list[int]) -> list[int] | None:
    """Map defined on BFS words over the listed generators; None if not bijective."""
    words = _restricted_words(G, gen_positions)
    out = [0] * G.order
    # rebuild in BFS order so parents are defined first
    order_of = sorted(range(G.order), key=lambda e: len(words[e]))
    pos_of = {gp: i for i, gp in enumerate(gen_positions)}
    for e in order_of:
        w = words[e]
        if not w:
            continue
        parent = 0
        for letter in w[:-1]:
            parent = G.mul(parent, G.gen_indices[gen_positions[pos_of[letter - 1]]])
        out[e] = G.mul(out[parent], images[pos_of[w[-1] - 1]])
    if len(set(out)) != G.order:
        return None
    for e in range(G.order):
        for gp in gen_positions:
            g = G.gen_indices[gp]
            if out[G.mul(e, g)] != G.mul(out[e], images[pos_of[gp]]):
                return None
    return out


def _attach_g0_presentation(G0: FiniteGroup, d: int, p: int, h_order: int,
                            A_h: np.ndarray) -> None:
    rels = [word_pow((i + 1,), p) for i in range(d)]
    rels += [commutator_word((i + 1,), (j + 1,))
             for i in range(d) for j in range(i + 1, d)]
    rels.append(word_pow((d + 1,), h_order))
    for i in range(d):
        img: list[int] = []
        for jcol in range(d):
            img.extend([jcol + 1] * int(A_h[i, jcol]))
        rels.append(free_reduce((-(d + 1), i + 1, d + 1) + invert_word(tuple(img))))
    G0.presentation = Presentation(d + 1, tuple(r for r in rels if r))


def _attach_g1_presentation(G1: FiniteGroup, P1_pres: Presentation,
                            xwords: list[tuple[int, ...]], alpha_images: list[int],
                            d: int, p: int, h_order: int) -> None:
    # generators x_1..x_d, h; P1 relators + h^order + action relators
    rels = list(P1_pres.relators) + [word_pow((d + 1,), h_order)]
    for i in range(d):
        # h^-1 x_i h = alpha(x_i), written as a word in the x generators
        target_word = xwords[alpha_images[i]]
        rels.append(free_reduce((-(d + 1), i + 1, d + 1) + invert_word(target_word)))
    G1.presentation = Presentation(d + 1, tuple(r for r in rels if r))


# -- relator-tail H^2 ----------------------------------------------------------------


def extension_presentation(P: Presentation, M: GModule,
                           tails: np.ndarray) -> Presentation:
    """Generators x_1..x_d, z_1..z_m; relators carry the given tails."""
    d, m, p = P.ngens, M.dim, M.p
    rels: list[tuple[int, ...]] = []
    for i, r in enumerate(P.relators):
        tail: list[int] = []
        for j in range(m):
            tail.extend([-(d + j + 1)] * int(tails[i, j]))
        rels.append(free_reduce(tuple(r) + tuple(tail)))
    for j in range(m):
        rels.append(word_pow((d + j + 1,), p))
        for k in range(j + 1, m):
            rels.append(commutator_word((d + j + 1,), (d + k + 1,)))
    for i in range(d):
        A = M.mats[i]
        for j in range(m):
            img: list[int] = []
            for k in range(m):
                img.extend([d + k + 1] * int(A[j, k]))
            rels.append(free_reduce(
                (-(i + 1), d + j + 1, i + 1) + invert_word(tuple(img))))
    return Presentation(d + m, tuple(r for r in rels if r))


def try_extension_order(P: Presentation, M: GModule, tails: np.ndarray,
                        max_cosets: int) -> tuple[int, CosetTable]:
    ext = extension_presentation(P, M, tails)
    T = todd_coxeter(ext, (), max_cosets)
    return T.n, T


def h2_classes(P: Presentation, M: GModule, max_cosets: int = 1 << 18,
               max_candidates: int = 4096) -> tuple[int, list[np.ndarray]]:
    """(dim H^2(G, M), valid relator-tail class representatives).

    Trivial one-dimensional modules take the one-shot route through the
    universal tail extension; otherwise cokernel representatives of the
    lift-change map are validated one by one through coset enumeration
    (a candidate is valid iff the presented group reaches |G| * p^dim).
    """
    G = M.group
    p, m, s, d = M.p, M.dim, len(P.relators), P.ngens
    if m == 1 and all((mat == la.identity(1)).all() for mat in M.mats):
        data = universal_tail_extension(P, G, p, max_cosets)
        classes = _trivial_h2_class_reps(data, p)
        return data["h2_dim"], classes

    B = coboundary_tails(P, M)  # rows, length s*m
    red, piv = la.rref(B, p) if B.size else (B, [])
    free_cols = [c for c in range(s * m) if c not in piv]
    ncand = p ** len(free_cols)
    if ncand > max_candidates:
        raise Budget(f"{ncand} tail candidates exceed max_candidates")
    expected = G.order * p ** m
    valid: list[np.ndarray] = []
    for k in range(ncand):
        flat = np.zeros(s * m, dtype=np.int64)
        fv = la.int_vec(k, len(free_cols), p)
        for c, v in zip(free_cols, fv):
            flat[c] = v
        tails = flat.reshape(s, m)
        n, _ = try_extension_order(P, M, tails, max_cosets)
        if n == expected:
            valid.append(tails)
        elif n > expected:
            raise AssertionError("extension larger than |G| p^m; bad presentation")
    count = len(valid)
    dim = 0
    while p ** dim < count:
        dim += 1
    if p ** dim != count:
        raise AssertionError(f"valid tail classes not a p-power: {count}")
    return dim, valid


def universal_tail_extension(P: Presentation, G: FiniteGroup, p: int,
                             max_cosets: int) -> dict:
    """Enumerate E = F / R^p [R, F] and linearize its kernel over G.

    Returns table, kernel cosets with coordinates, the relator-image matrix
    Z (s x s0), the coboundary functional space, and dim H^2(G, F_p).
    """
    d, s = P.ngens, len(P.relators)
    rels: list[tuple[int, ...]] = []
    for r in P.relators:
        rels.append(free_reduce(word_pow(r, p)))
        for i in range(d):
            w = commutator_word(r, (i + 1,))
            if w:
                rels.append(w)
    Epres = Presentation(d, tuple(rels))
    T = todd_coxeter(Epres, (), max_cosets)
    if T.n % G.order:
        raise AssertionError("universal tail extension order not divisible by |G|")
    size = T.n // G.order
    s0 = 0
    while p ** s0 < size:
        s0 += 1
    assert p ** s0 == size, "kernel not elementary abelian p"
    kernel, coords = _table_kernel_coords(
        T, lambda c: G.eval_signed_word(T.rep_words[c]), s0, p)
    Z = np.stack([coords[_coset_in_kernel(T, r)] for r in P.relators]) if s else \
        np.zeros((0, s0), dtype=np.int64)
    # coboundary functionals: mu with Z mu^T in the Fox image
    B = coboundary_tails(P, trivial_module(G, p))  # rows of length s
    red, piv = la.rref(B, p) if B.size else (B, [])
    inB = []
    for mu in la.all_vectors(s0, p):
        t = (Z @ mu) % p
        if la.row_space_contains(red, piv, t, p) if B.size else not t.any():
            inB.append(mu)
    Bhat, _ = la.rref(np.stack(inB), p)
    h2_dim = s0 - Bhat.shape[0]
    return dict(table=T, presentation=Epres, base_presentation=P, group=G,
                kernel=kernel, coords=coords, Z=Z, s0=s0,
                cobound_tails=(red, piv), Bhat=Bhat, h2_dim=h2_dim, p=p)


def _trivial_h2_class_reps(data: dict, p: int) -> list[np.ndarray]:
    """One tail vector (s x 1) per H^2 class, zero class first."""
    Z, s0 = data["Z"], data["s0"]
    red, piv = data["cobound_tails"]
    Bhat = data["Bhat"]
    bred, bpiv = la.rref(Bhat, p)
    reps = [np.zeros((Z.shape[0], 1), dtype=np.int64)]
    seen = {la.span_key(np.zeros((1, Z.shape[0]), dtype=np.int64), p): None}
    mus: list[np.ndarray] = []
    for mu in la.all_vectors(s0, p):
        if not mu.any() or la.row_space_contains(bred, bpiv, mu, p):
            continue
        if any(_same_h2_class(mu, prev, bred, bpiv, p) for prev in mus):
            continue
        mus.append(mu)
        reps.append(((Z @ mu) % p).reshape(-1, 1))
        if len(reps) == p ** data["h2_dim"]:
            break
    assert len(reps) == p ** data["h2_dim"]
    return reps


def _same_h2_class(mu, prev, bred, bpiv, p) -> bool:
    return la.row_space_contains(bred, bpiv, (mu - prev) % p, p)


def build_extension(P: Presentation, M: GModule, tails: np.ndarray,
                    max_cosets: int = 1 << 18, name: str = "") -> FrattiniLevel:
    """Concrete extension of M.group by M along the given relator tails.

    The enumerated group is re-normalized to the pair model; Collapse is
    raised when the tails are not cocycle tails.
    """
    G = M.group
    p, m = M.p, M.dim
    expected = G.order * p ** m
    n, T = try_extension_order(P, M, tails, max_cosets)
    if n < expected:
        raise Collapse(f"extension closed at {n} < {expected}; invalid tails")
    d = P.ngens
    # section words: G BFS words pushed through the x-letters
    kernel, kcoords = _table_kernel_coords(
        T, lambda c: G.eval_signed_word(
            tuple(x for x in T.rep_words[c] if abs(x) <= d)), m, p,
        basis_words=[(d + j + 1,) for j in range(m)])
    # psi(g,h) = s(gh)^-1 s(g) s(h) evaluated through x-words
    nb = G.order
    psi = np.zeros((nb, nb, m), dtype=np.int64)
    gwords = [tuple(gi + 1 for gi in G.words[g]) for g in range(nb)]
    for g in range(nb):
        for h in range(nb):
            w = invert_word(gwords[G.mul(g, h)]) + gwords[g] + gwords[h]
            c = T.act_word(0, w)
            psi[g, h] = kcoords[c]
    lvl = level_from_pair_model(G, M, psi, p, name=name)
    lvl.total.presentation = extension_presentation(P, M, tails)
    return lvl


# -- verification -----------------------------------------------------------------


@dataclass
class OrderLiftReport:
    order_violations: list[tuple[int, int, int]]   # (base elem, lift, lift order)
    class_failures: list[tuple[int, int]]          # (base class rep, count above)

    @property
    def ok(self) -> bool:
        return not self.order_violations and not self.class_failures


def verify_order_lifting(L: FrattiniLevel) -> OrderLiftReport:
    """Every p-divisible-order element must lift to order p * ord on every
    lift; every p' class must have exactly one p' class above it."""
    p = L.p
    violations = []
    for g in range(L.base.order):
        og = L.base.element_order(g)
        if og % p:
            continue
        for lift in L.lifts(g):
            ol = L.total.element_order(lift)
            if ol != p * og:
                violations.append((g, lift, ol))
    failures = []
    tot_classes = L.total.conjugacy_classes()
    for cl in L.base.conjugacy_classes():
        if cl.element_order % p == 0:
            continue
        above = [tc for tc in tot_classes
                 if tc.element_order % p and
                 int(L.proj[tc.representative]) in set(cl.members)]
        if len(above) != 1:
            failures.append((cl.representative, len(above)))
    return OrderLiftReport(violations, failures)


def minimal_generating_tuple(G: FiniteGroup) -> list[int]:
    for a in range(1, G.order):
        for b in range(a + 1, G.order):
            if G.closure_size([a, b]) == G.order:
                return [a, b]
    return list(G.gen_indices)


def verify_frattini(L: FrattiniLevel, gens: list[int] | None = None) -> bool:
    """Exhaustively check that every kernel translate of a generating-set
    lift still generates the total group."""
    base_gens = gens if gens is not None else minimal_generating_tuple(L.base)
    lift_sets = [L.lifts(g) for g in base_gens]
    n = L.total.order

    def rec(pos, chosen):
        if pos == len(lift_sets):
            return L.total.closure_size(chosen) == n
        return all(rec(pos + 1, chosen + [x]) for x in lift_sets[pos])

    return rec(0, [])


def lift_class(L: FrattiniLevel, c: ConjClass) -> ConjClass:
    if c.element_order % L.p == 0:
        raise NotPPrime("class order divisible by p")
    members = set(c.members)
    found = [tc for tc in L.total.conjugacy_classes()
             if tc.element_order % L.p and
             int(L.proj[tc.representative]) in members]
    if len(found) != 1:
        raise AssertionError(f"expected unique p' class above, found {len(found)}")
    return found[0]


def restriction_splits(L: FrattiniLevel, subgroup_elems: list[int]) -> bool:
    """Does the pullback of the cover over the given base subgroup split?

    Splitting is witnessed by a complement: lifts of a generating pair of
    the subgroup whose closure has the subgroup's order.
    """
    S = sorted(subgroup_elems)
    sset = set(S)
    sub_gens = None
    for a in S:
        if a == 0:
            continue
        for b in S:
            if b <= a:
                continue
            clo = L.base.subgroup_closure([a, b], cap=len(S))
            if len(clo) == len(S) and set(clo) == sset:
                sub_gens = [a, b]
                break
        if sub_gens:
            break
    if sub_gens is None:
        for a in S:
            if len(L.base.subgroup_closure([a], cap=len(S))) == len(S):
                sub_gens = [a]
                break
    assert sub_gens is not None, "subgroup has no small generating set"
    lift_sets = [L.lifts(g) for g in sub_gens]

    def rec(pos, chosen):
        if pos == len(lift_sets):
            return L.total.closure_size(chosen) == len(S)
        return any(rec(pos + 1, chosen + [x]) for x in lift_sets[pos])

    return rec(0, [])


# -- Sylow plumbing and the general-case module pipeline ---------------------------


def _is_p_power(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def p_sylow(G: FiniteGroup, p: int) -> tuple[int, ...]:
    """Element indices of a p-Sylow subgroup (deterministic normalizer growth)."""
    target = 1
    n = G.order
    while n % p == 0:
        n //= p
        target *= p
    S = (0,)
    gens: list[int] = []
    while len(S) < target:
        sset = set(S)
        for x in range(1, G.order):
            if x in sset or not _is_p_power(G.element_order(x), p):
                continue
            if all(G.conj(g, x) in sset for g in (gens or [0])):
                S2 = G.subgroup_closure(gens + [x])
                if _is_p_power(len(S2), p):
                    gens = gens + [x]
                    S = S2
                    break
        else:
            raise AssertionError("sylow growth stalled")
    return S


def normalizer(G: FiniteGroup, subgroup_elems) -> tuple[int, ...]:
    sset = set(int(x) for x in subgroup_elems)
    sub_gens = _small_generating_set(G, sorted(sset))
    out = [x for x in range(G.order)
           if all(G.conj(g, x) in sset for g in sub_gens)]
    return tuple(out)


def _small_generating_set(G: FiniteGroup, elems: list[int]) -> list[int]:
    gens: list[int] = []
    have = {0}
    for x in elems:
        if x in have:
            continue
        gens.append(x)
        have = set(G.subgroup_closure(gens))
        if len(have) == len(elems):
            return gens
    return gens or [0]


@dataclass
class SplitData:
    rank: int
    prime: int
    basis: list[int]               # kernel generators inside the concrete group
    complement_gen: int
    action: np.ndarray             # matrix of the complement generator on the basis


def split_structure(N: FiniteGroup, p: int) -> SplitData:
    """Detect N = P0 x| <h> with P0 the (normal, elementary abelian) p-Sylow."""
    S = p_sylow(N, p)
    if set(normalizer(N, S)) != set(range(N.order)):
        raise InputError("p-Sylow is not normal; not the split case")
    if any(N.element_order(x) == p * p for x in S):
        raise InputError("p-Sylow not elementary abelian")
    index = N.order // len(S)
    h = None
    for x in range(1, N.order):
        if N.element_order(x) == index and \
                all(N.power(x, e) not in set(S) or N.power(x, e) == 0
                    for e in range(1, index)):
            h = x
            break
    if h is None:
        raise ActionLiftFailed("no cyclic complement found")
    basis: list[int] = []
    have = {0}
    for x in sorted(S):
        if x in have:
            continue
        basis.append(x)
        have = set(N.subgroup_closure(basis))
    d = len(basis)
    coord_of = _elementary_coords(N, basis, p)
    rows = [coord_of[N.conj(b, h)] for b in basis]
    return SplitData(d, p, basis, h, np.stack(rows))


def _elementary_coords(G: FiniteGroup, basis: list[int], p: int) -> dict[int, np.ndarray]:
    d = len(basis)
    coords = {0: np.zeros(d, dtype=np.int64)}
    for j, b in enumerate(basis):
        grown = dict(coords)
        for known, vec in coords.items():
            cur = known
            for e in range(1, p):
                cur = G.mul(cur, b)
                v = vec.copy()
                v[j] = e
                grown[cur] = v
        coords = grown
    return coords


@dataclass
class FrattiniModuleData:
    induced: GModule                  # Ind of the normalizer module, over G
    summand_bases: list[np.ndarray]   # indecomposable decomposition, sorted
    normalizer_module: GModule        # over the concrete normalizer subgroup
    split_tower: SplitTower           # tower over the Sylow normalizer model
    normalizer_iso: list[int]         # abstract G0 element -> Nsub element

    @property
    def summand_dims(self) -> list[int]:
        return [b.shape[0] for b in self.summand_bases]


def frattini_module(G: FiniteGroup, p: int, max_cosets: int = 1 << 18) -> FrattiniModuleData:
    """Induce the Sylow-normalizer's Frattini module up to G and decompose.

    When the induced module is indecomposable it is the level-0 module of G
    itself; otherwise general_level filters the summands by cohomology and
    cover checks.
    """
    from .groups import cyclic_group

    S = p_sylow(G, p)
    N = normalizer(G, S)
    if len(N) == G.order:
        raise InputError("p-Sylow normal in G; use the split construction")
    n_gens = _small_generating_set(G, list(N))
    Nsub = subgroup_from_indices(G, n_gens, name="sylow-normalizer")
    data = split_structure(Nsub, p)
    H = cyclic_group(Nsub.element_order(data.complement_gen))
    tower = split_level(data.rank, p, H, [data.action], max_cosets)
    iso = find_isomorphism(tower.g0, Nsub)
    if iso is None:
        raise AssertionError("split model does not match the normalizer")
    iso_inv = {iso[e]: e for e in range(len(iso))}
    mats = [tower.level.kernel_module.mat_of(iso_inv[g]) for g in Nsub.gen_indices]
    Mprime = GModule(Nsub, p, mats, check=False)
    ind = induce(Mprime, G)
    bases = indecomposable_summands(ind)
    bases.sort(key=lambda b: (b.shape[0], b.tobytes()))
    return FrattiniModuleData(ind, bases, Mprime, tower, iso)


def _homomorphism_onto(level_src: FrattiniLevel, level_dst: FrattiniLevel) -> bool:
    """Is there a surjection total_src -> total_dst over the common base?

    Generator lifts of the base generators are searched; the z generators'
    images follow from words in the lifted generators (the source cover is
    Frattini, so its generator lifts generate).
    """
    src, dst = level_src.total, level_dst.total
    base = level_src.base
    assert level_dst.base is base
    d = len(base.gen_indices)
    cand = []
    for gi, g in enumerate(base.gen_indices):
        cand.append(level_dst.lifts(g))
    src_pres = src.presentation
    assert src_pres is not None
    xwords = _restricted_words(src, list(range(d)))

    def assignment_works(images: list[int]) -> bool:
        full = list(images)
        for j in range(d, len(src.gen_indices)):
            w = xwords[src.gen_indices[j]]
            cur = 0
            for letter in w:
                cur = dst.mul(cur, full[letter - 1])
            full.append(cur)
        for rel in src_pres.relators:
            cur = 0
            for letter in rel:
                g = full[abs(letter) - 1]
                cur = dst.mul(cur, g if letter > 0 else int(dst.inv[g]))
            if cur != 0:
                return False
        return dst.closure_size(full) == dst.order

    def rec(pos, images):
        if pos == d:
            return assignment_works(images)
        return any(rec(pos + 1, images + [c]) for c in cand[pos])

    return rec(0, [])


@dataclass
class GeneralLevel:
    level: FrattiniLevel
    module: GModule
    h2_dim: int
    tail: np.ndarray
    schur_levels: list[FrattiniLevel]   # nonsplit trivial-module covers of the base
    module_data: FrattiniModuleData


def general_level(G: FiniteGroup, p: int, max_cosets: int = 1 << 18) -> GeneralLevel:
    """G_1 -> G for a p-perfect G with non-normal Sylow, via relator tails.

    The Frattini module is selected among the indecomposable summands of the
    induced normalizer module: the summand must carry a one-or-more
    dimensional H^2 with a nonsplit class whose extension passes the order
    lifting check and covers every Z/p Schur cover of G (versality).
    """
    from .groups import is_p_perfect

    if not is_p_perfect(G, p):
        raise InputError("base group must be p-perfect")
    if G.presentation is None:
        raise InputError("base group needs an attached presentation")
    data = frattini_module(G, p, max_cosets)
    # trivial-module Schur covers of G (for the versality check)
    triv = trivial_module(G, p)
    tdim, tclasses = h2_classes(G.presentation, triv, max_cosets)
    schur_levels = []
    for cls in tclasses:
        if not cls.any():
            continue
        schur_levels.append(build_extension(G.presentation, triv, cls,
                                            max_cosets, name="schur-cover"))

    errors = []
    for b in data.summand_bases:
        M = submodule_module(data.induced, b)
        try:
            dim, classes = h2_classes(G.presentation, M, max_cosets)
        except Budget as e:
            errors.append((b.shape[0], str(e)))
            continue
        nonsplit = [c for c in classes if c.any()]
        if not nonsplit:
            continue
        tail = nonsplit[0]
        lvl = build_extension(G.presentation, M, tail, max_cosets,
                              name=f"G1({G.name or 'G'})")
        if not verify_order_lifting(lvl).ok:
            continue
        if not all(_homomorphism_onto(lvl, sl) for sl in schur_levels):
            continue
        return GeneralLevel(lvl, M, dim, tail, schur_levels, data)
    raise AssertionError(f"no summand yields the Frattini cover: {errors}")


def transport_level(lvl: FrattiniLevel, iso: list[int],
                    new_base: FiniteGroup) -> FrattiniLevel:
    """Relabel a level over an isomorphic concrete base group.

    iso maps old base elements to new base elements; the kernel module and
    cocycle are transported and the pair model rebuilt canonically.
    """
    old = lvl.base
    iso_inv = {iso[e]: e for e in range(old.order)}
    mats = [lvl.kernel_module.mat_of(iso_inv[g]) for g in new_base.gen_indices]
    M = GModule(new_base, lvl.p, mats, check=False)
    nb = new_base.order
    psi = np.zeros((nb, nb, lvl.kernel_dim), dtype=np.int64)
    for g in range(nb):
        for h in range(nb):
            psi[g, h] = lvl.psi[iso_inv[g], iso_inv[h]]
    return level_from_pair_model(new_base, M, psi, lvl.p,
                                 name=lvl.name + "-transported")
