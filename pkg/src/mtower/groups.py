"""Concrete finite groups as BFS-indexed permutation tables.

Element identity is an index into a canonical table: BFS order from the
identity, generators applied in input order.  All higher layers speak in
indices, never raw permutations.  Products use the package-wide left-to-right
convention from perms.py.

The multiplication table is materialized when the order is at most
MUL_TABLE_LIMIT; above that, products are composed on the fly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InputError, OrderExceeded
from .perms import Perm

MUL_TABLE_LIMIT = 4096


@dataclass(frozen=True)
class ConjClass:
    representative: int
    members: tuple[int, ...]
    element_order: int

    @property
    def size(self) -> int:
        return len(self.members)


class FiniteGroup:
    def __init__(self, gens: list[Perm], max_order: int = 1 << 20, name: str = ""):
        if not gens:
            raise InputError("need at least one generator")
        degree = gens[0].degree
        if any(g.degree != degree for g in gens):
            raise InputError("generators must share a degree")
        self.degree = degree
        self.name = name
        self.gen_arrays = [g.as_array() for g in gens]
        self.presentation = None  # optionally attached by builders

        ident = np.arange(degree, dtype=np.int32)
        elements = [ident]
        index = {ident.tobytes(): 0}
        words: list[tuple[int, ...]] = [()]
        parents: list[tuple[int, int]] = [(-1, -1)]  # (parent element, generator)
        head = 0
        while head < len(elements):
            cur = elements[head]
            for gi, garr in enumerate(self.gen_arrays):
                img = garr[cur]
                key = img.tobytes()
                if key not in index:
                    if len(elements) >= max_order:
                        raise OrderExceeded(
                            f"closure exceeded max_order={max_order}")
                    index[key] = len(elements)
                    elements.append(img)
                    words.append(words[head] + (gi,))
                    parents.append((head, gi))
            head += 1
        self.elements = np.stack(elements)
        self._index = index
        self.order = len(elements)
        self.words = words
        self._parents = parents
        self.gen_indices = [index[g.tobytes()] for g in self.gen_arrays]

        self.mul_table = self._build_table() if self.order <= MUL_TABLE_LIMIT else None
        self.inv = self._build_inverses()
        self._orders: np.ndarray | None = None
        self._classes: list[ConjClass] | None = None
        self._class_of: np.ndarray | None = None

    # -- construction helpers -------------------------------------------------

    def _build_table(self) -> np.ndarray:
        n = self.order
        gencol = []
        for garr in self.gen_arrays:
            col = np.empty(n, dtype=np.int32)
            for i in range(n):
                col[i] = self._index[garr[self.elements[i]].tobytes()]
            gencol.append(col)
        table = np.empty((n, n), dtype=np.int32)
        table[:, 0] = np.arange(n, dtype=np.int32)
        # column of element j = column of its BFS parent pushed through one generator
        for j in range(1, n):
            parent, gi = self._parents[j]
            table[:, j] = gencol[gi][table[:, parent]]
        return table

    def _build_inverses(self) -> np.ndarray:
        inv = np.empty(self.order, dtype=np.int32)
        for i in range(self.order):
            arr = self.elements[i]
            back = np.empty(self.degree, dtype=np.int32)
            back[arr] = np.arange(self.degree, dtype=np.int32)
            inv[i] = self._index[back.tobytes()]
        return inv

    # -- basic operations ------------------------------------------------------

    def mul(self, a: int, b: int) -> int:
        if self.mul_table is not None:
            return int(self.mul_table[a, b])
        img = self.elements[b][self.elements[a]]
        return self._index[img.tobytes()]

    def conj(self, x: int, c: int) -> int:
        """c^-1 x c."""
        return self.mul(self.mul(int(self.inv[c]), x), c)

    def commutator(self, a: int, b: int) -> int:
        return self.mul(self.mul(int(self.inv[a]), int(self.inv[b])), self.mul(a, b))

    def power(self, a: int, e: int) -> int:
        if e < 0:
            return self.power(int(self.inv[a]), -e)
        out = 0
        base = a
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    def element_order(self, a: int) -> int:
        if self._orders is None:
            self._orders = np.zeros(self.order, dtype=np.int32)
        cached = int(self._orders[a])
        if cached:
            return cached
        n = 1
        x = a
        while x != 0:
            x = self.mul(x, a)
            n += 1
        self._orders[a] = n
        return n

    def lookup(self, perm_images: np.ndarray) -> int | None:
        return self._index.get(np.asarray(perm_images, dtype=np.int32).tobytes())

    def perm(self, i: int) -> Perm:
        return Perm(tuple(int(x) for x in self.elements[i]))

    def eval_word(self, word, start: int = 0) -> int:
        """Evaluate a generator-index word (ints >= 0) by right multiplication."""
        cur = start
        for gi in word:
            cur = self.mul(cur, self.gen_indices[gi])
        return cur

    def eval_signed_word(self, word, start: int = 0) -> int:
        """Word letters are +-(i+1) for generator i / its inverse."""
        cur = start
        for letter in word:
            g = self.gen_indices[abs(letter) - 1]
            cur = self.mul(cur, g if letter > 0 else int(self.inv[g]))
        return cur

    # -- structure -------------------------------------------------------------

    def conjugacy_classes(self) -> list[ConjClass]:
        if self._classes is not None:
            return self._classes
        seen = np.zeros(self.order, dtype=bool)
        raw = []
        for start in range(self.order):
            if seen[start]:
                continue
            orbit = [start]
            seen[start] = True
            q = [start]
            while q:
                x = q.pop()
                for c in self.gen_indices:
                    y = self.conj(x, c)
                    if not seen[y]:
                        seen[y] = True
                        orbit.append(y)
                        q.append(y)
            orbit.sort()
            raw.append(orbit)
        raw.sort(key=lambda orb: (self.element_order(orb[0]), len(orb), orb[0]))
        self._classes = [
            ConjClass(orb[0], tuple(orb), self.element_order(orb[0])) for orb in raw
        ]
        self._class_of = np.empty(self.order, dtype=np.int32)
        for ci, cl in enumerate(self._classes):
            for m in cl.members:
                self._class_of[m] = ci
        return self._classes

    def class_of(self, x: int) -> int:
        self.conjugacy_classes()
        return int(self._class_of[x])

    def subgroup_closure(self, seeds, cap: int | None = None) -> tuple[int, ...]:
        """Sorted element indices of <seeds>; stops early past `cap` if given."""
        seen = {0}
        frontier = [0]
        gens = [s for s in seeds if s != 0]
        for s in gens:
            if s not in seen:
                seen.add(s)
                frontier.append(s)
        head = 0
        while head < len(frontier):
            x = frontier[head]
            head += 1
            for s in gens:
                y = self.mul(x, s)
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
                    if cap is not None and len(seen) > cap:
                        return tuple(sorted(seen))
        return tuple(sorted(seen))

    def generates_whole(self, seeds) -> bool:
        return self.closure_size(seeds) == self.order

    def closure_size(self, seeds) -> int:
        """|<seeds>|, via vectorized table BFS when the table exists."""
        if self.mul_table is None:
            return len(self.subgroup_closure(seeds))
        gens = np.unique(np.asarray([s for s in seeds if s != 0], dtype=np.int32))
        if gens.size == 0:
            return 1
        table = self.mul_table
        seen = np.zeros(self.order, dtype=bool)
        seen[0] = True
        seen[gens] = True
        frontier = np.concatenate([np.zeros(1, dtype=np.int32), gens])
        while frontier.size:
            prods = table[frontier[:, None], gens[None, :]].ravel()
            fresh = prods[~seen[prods]]
            if fresh.size == 0:
                break
            fresh = np.unique(fresh)
            seen[fresh] = True
            frontier = fresh
        return int(seen.sum())

    def center(self) -> tuple[int, ...]:
        out = []
        for x in range(self.order):
            if all(self.mul(x, g) == self.mul(g, x) for g in self.gen_indices):
                out.append(x)
        return tuple(out)

    def derived_subgroup(self) -> tuple[int, ...]:
        """Normal closure of the generator commutators."""
        seeds = set()
        for a in self.gen_indices:
            for b in self.gen_indices:
                seeds.add(self.commutator(a, b))
        seeds.discard(0)
        current = set(self.subgroup_closure(seeds))
        while True:
            extra = set()
            for x in current:
                for c in self.gen_indices:
                    y = self.conj(x, c)
                    if y not in current:
                        extra.add(y)
            if not extra:
                return tuple(sorted(current))
            current = set(self.subgroup_closure(current | extra))

    def abelianization_order(self) -> int:
        return self.order // len(self.derived_subgroup())

    def element_subgroup(self, other: "FiniteGroup") -> list[int] | None:
        """Map other's elements into self by permutation identity, or None."""
        if other.degree != self.degree:
            return None
        out = []
        for i in range(other.order):
            j = self.lookup(other.elements[i])
            if j is None:
                return None
            out.append(j)
        return out


def group_from_generators(gens: list[Perm], max_order: int = 1 << 20,
                          name: str = "") -> FiniteGroup:
    return FiniteGroup(gens, max_order=max_order, name=name)


def conjugacy_classes(G: FiniteGroup) -> list[ConjClass]:
    return G.conjugacy_classes()


def is_p_perfect(G: FiniteGroup, p: int) -> bool:
    """True iff G has no Z/p quotient, i.e. p does not divide |G/[G,G]|."""
    return G.abelianization_order() % p != 0


def is_center_free(G: FiniteGroup) -> bool:
    return len(G.center()) == 1


def subgroup_from_indices(G: FiniteGroup, gen_indices, name: str = "") -> FiniteGroup:
    """Standalone FiniteGroup on the same points generated by G-elements."""
    return FiniteGroup([G.perm(i) for i in gen_indices], max_order=G.order, name=name)


def find_isomorphism(src: FiniteGroup, dst: FiniteGroup) -> list[int] | None:
    """Element map src->dst realizing an isomorphism, or None.

    Backtracks over generator images filtered by element order; a candidate
    assignment is accepted when phi(x*g) == phi(x)*phi(g) holds for every
    element x and generator g (sufficient by induction on BFS words) and the
    image hits all of dst.
    """
    if src.order != dst.order:
        return None
    gen_orders = [src.element_order(g) for g in src.gen_indices]
    dst_by_order: dict[int, list[int]] = {}
    for o in set(gen_orders):
        dst_by_order[o] = [x for x in range(dst.order) if dst.element_order(x) == o]

    def build(images: list[int]) -> list[int] | None:
        phi = [0] * src.order
        for i in range(1, src.order):
            parent, gi = src._parents[i]
            phi[i] = dst.mul(phi[parent], images[gi])
        if len(set(phi)) != src.order:
            return None
        for x in range(src.order):
            for gi, g in enumerate(src.gen_indices):
                if phi[src.mul(x, g)] != dst.mul(phi[x], images[gi]):
                    return None
        return phi

    def rec(pos: int, images: list[int]) -> list[int] | None:
        if pos == len(gen_orders):
            return build(images)
        for cand in dst_by_order[gen_orders[pos]]:
            got = rec(pos + 1, images + [cand])
            if got is not None:
                return got
        return None

    return rec(0, [])


def find_homomorphism_lift(src: FiniteGroup, relators, dst: FiniteGroup,
                           image_candidates: list[list[int]]) -> list[list[int]]:
    """All generator-image tuples in dst satisfying src's signed relators.

    `relators` are signed words over src's generators; candidates are given
    per generator.  Returns every consistent assignment, in lexicographic
    candidate order.
    """
    hits = []

    def eval_rel(images, word) -> int:
        cur = 0
        for letter in word:
            g = images[abs(letter) - 1]
            cur = dst.mul(cur, g if letter > 0 else int(dst.inv[g]))
        return cur

    def rec(pos, images):
        if pos == len(image_candidates):
            if all(eval_rel(images, r) == 0 for r in relators):
                hits.append(list(images))
            return
        for cand in image_candidates[pos]:
            rec(pos + 1, images + [cand])

    rec(0, [])
    return hits


# -- builtin groups -----------------------------------------------------------


def cyclic_group(n: int) -> FiniteGroup:
    return FiniteGroup([Perm(tuple((i + 1) % n for i in range(n)))], name=f"Z{n}")


def klein_four() -> FiniteGroup:
    a = Perm.from_cycles([[0, 1], [2, 3]], 4)
    b = Perm.from_cycles([[0, 2], [1, 3]], 4)
    return FiniteGroup([a, b], name="K4")


def dihedral_group(n: int) -> FiniteGroup:
    """D_n of order 2n: rotation (0..n-1), reflection i -> -i mod n."""
    if n < 3:
        raise InputError("dihedral needs n >= 3")
    rot = Perm(tuple((i + 1) % n for i in range(n)))
    ref = Perm(tuple((-i) % n for i in range(n)))
    G = FiniteGroup([rot, ref], name=f"D{n}")
    from .fp import Presentation  # local import to avoid a cycle

    G.presentation = Presentation(2, ((1,) * n, (2, 2), (1, 2, 1, 2)), names=("r", "s"))
    return G


@lru_cache(maxsize=None)
def alternating_group(n: int) -> FiniteGroup:
    """A_4 or A_5 with generators a, b satisfying a^2 = b^3 = (ab)^n/... = 1.

    Generators are the first pair (by element index in the full alternating
    group) with orders (2, 3) whose product has order 3 (A_4) or 5 (A_5);
    this pins the standard presentation <a,b | a^2, b^3, (ab)^k>.
    """
    if n not in (4, 5):
        raise InputError("only A4 and A5 are built in")
    k = 3 if n == 4 else 5
    threecycle = Perm.from_cycles([[0, 1, 2]], n)
    if n == 4:
        other = Perm.from_cycles([[1, 2, 3]], n)
    else:
        other = Perm.from_cycles([[2, 3, 4]], n)
    full = FiniteGroup([threecycle, other], name=f"A{n}")
    assert full.order == (12 if n == 4 else 60)
    for a in range(full.order):
        if full.element_order(a) != 2:
            continue
        for b in range(full.order):
            if full.element_order(b) != 3:
                continue
            if full.element_order(full.mul(a, b)) != k:
                continue
            if not full.generates_whole([a, b]):
                continue
            G = FiniteGroup([full.perm(a), full.perm(b)], name=f"A{n}")
            from .fp import Presentation

            G.presentation = Presentation(
                2, ((1, 1), (2, 2, 2), (1, 2) * k), names=("a", "b"))
            return G
    raise AssertionError("no standard generating pair found")


def special_linear_2(p: int) -> FiniteGroup:
    """SL_2(F_p) acting on the p^2 - 1 nonzero row vectors of F_p^2."""
    pts = [(x, y) for x in range(p) for y in range(p) if (x, y) != (0, 0)]
    idx = {v: i for i, v in enumerate(pts)}

    def mat_perm(a, b, c, d):
        img = []
        for (x, y) in pts:
            img.append(idx[((x * a + y * c) % p, (x * b + y * d) % p)])
        return Perm(tuple(img))

    t = mat_perm(1, 1, 0, 1)
    s = mat_perm(0, p - 1, 1, 0)
    return FiniteGroup([t, s], name=f"SL2_{p}")
