"""Batch driver: build cover levels, run braid-orbit analyses, emit reports.

Commands
  mt level           components/cusps/genus for (group, classes, p) at level k
  mt dihedral        the odd-prime dihedral tower shadow
  mt schur           Z/p Schur quotients and their kernel slices
  mt gcomplete       class-completeness verdicts
  mt frattini-verify cover properties of the constructed level

Exit codes: 0 ok, 2 budget/input, 3 empty Nielsen class, 4 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import cache as cache_mod
from . import linalg as la
from .errors import (BudgetError, EmptyNielsenClass, InputError,
                     InvariantViolation, MTError)
from .fp import parse_presentation, todd_coxeter, coset_group
from .frattini import (FrattiniLevel, dihedral_step, general_level,
                       split_level, split_structure, transport_level,
                       verify_frattini, verify_order_lifting, p_sylow,
                       normalizer)
from .gcomplete import is_gcomplete, is_p_gcomplete
from .gmodules import loewy_layers, radical
from .groups import (FiniteGroup, alternating_group, cyclic_group,
                     dihedral_group, find_isomorphism, klein_four)
from .hurwitz import (analyze_component, check_goup, level_compare,
                      sh_incidence)
from .nielsen import (NielsenSpec, Reducer, enumerate_reduced, lift_tuples,
                      lifted_spec, mbar4_orbits, orbit_dump)
from .perms import parse_group_file
from .schur import (abelian_test, check_modassume,
                    enumerate_schur_quotients, p3_census, vd_set)

VERSION = 1


def label_classes(G: FiniteGroup) -> list[str]:
    labels = []
    seen: dict[int, int] = {}
    for cl in G.conjugacy_classes():
        n = seen.get(cl.element_order, 0)
        seen[cl.element_order] = n + 1
        labels.append(f"{cl.element_order}{chr(ord('A') + n)}")
    return labels


def class_id(G: FiniteGroup, label: str) -> int:
    labels = label_classes(G)
    if label not in labels:
        raise InputError(f"unknown class label {label!r}; have {labels}")
    return labels.index(label)


def load_group(args) -> tuple[FiniteGroup, str]:
    if getattr(args, "group_file", None):
        text = Path(args.group_file).read_text()
        G = FiniteGroup(parse_group_file(text),
                        max_order=args.budget_elements, name="file-group")
        return G, f"file:{Path(args.group_file).name}:{G.order}"
    if getattr(args, "presentation_file", None):
        P = parse_presentation(Path(args.presentation_file).read_text())
        T = todd_coxeter(P, (), args.budget_cosets)
        G = coset_group(T, name="presented-group")
        G.presentation = P
        return G, f"pres:{Path(args.presentation_file).name}:{G.order}"
    name = (args.group or "").upper()
    if name == "A4":
        return alternating_group(4), "A4"
    if name == "A5":
        return alternating_group(5), "A5"
    if name == "K4":
        return klein_four(), "K4"
    m = re.fullmatch(r"D(\d+)", name)
    if m:
        return dihedral_group(int(m.group(1))), name
    m = re.fullmatch(r"Z(\d+)", name)
    if m:
        return cyclic_group(int(m.group(1))), name
    raise InputError(f"unknown group {args.group!r}; builtins: A4 A5 K4 Dn Zn")


def build_level(G: FiniteGroup, p: int, budget_cosets: int,
                step: int = 1) -> FrattiniLevel:
    """One cover level over the concrete group, route chosen by structure:
    dihedral closed form, split construction, or the relator-tail search."""
    if p > 2 and G.order == 2 * G.degree and G.degree % p == 0:
        try:
            return dihedral_step(G, p)
        except (InputError, AssertionError):
            pass
    if step >= 2:
        raise BudgetError("level budget: k <= 1 for nondihedral groups")
    S = p_sylow(G, p)
    if len(normalizer(G, S)) == G.order:
        data = split_structure(G, p)
        H = cyclic_group(G.element_order(data.complement_gen))
        tower = split_level(data.rank, p, H, [data.action], budget_cosets)
        iso = find_isomorphism(tower.g0, G)
        if iso is None:
            raise InvariantViolation("split model does not match the group")
        return transport_level(tower.level, iso, G)
    return general_level(G, p, budget_cosets).level


def build_level_model(G: FiniteGroup, p: int, budget_cosets: int) -> FrattiniLevel:
    """Like build_level, but keeps the construction's own base model so the
    total carries a small generator-aligned presentation (needed for the
    universal-extension work in the Schur analysis)."""
    if p > 2 and G.order == 2 * G.degree and G.degree % p == 0:
        try:
            return dihedral_step(G, p)
        except (InputError, AssertionError):
            pass
    S = p_sylow(G, p)
    if len(normalizer(G, S)) == G.order:
        data = split_structure(G, p)
        H = cyclic_group(G.element_order(data.complement_gen))
        tower = split_level(data.rank, p, H, [data.action], budget_cosets)
        return tower.level
    return general_level(G, p, budget_cosets).level


def _component_payload(spec, orbits, reducer, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(analyze_component, spec, orb, reducer)
                       for orb in orbits]
            return [f.result() for f in futures]
    return [analyze_component(spec, orb, reducer) for orb in orbits]


def run_level_analysis(G: FiniteGroup, gdesc: str, class_labels: list[str],
                       p: int, k: int, budget_elements: int,
                       budget_cosets: int, threads: int) -> dict:
    """The full level-k report payload (byte-stable JSON-ready dict).

    Level 0 is enumerated outright; higher levels are seeded by lifting one
    representative per lower orbit through the cover, which reaches every
    orbit upstairs.
    """
    ids = tuple(class_id(G, lab) for lab in class_labels)
    spec = NielsenSpec(G, ids, p)
    reducer = Reducer(spec)
    reduced = enumerate_reduced(spec, budget=budget_elements, reducer=reducer)
    if not reduced:
        raise EmptyNielsenClass(f"Ni({gdesc}, {class_labels}) is empty")
    orbits = mbar4_orbits(spec, reduced, reducer)
    reports = _component_payload(spec, orbits, reducer, threads)
    incidence = sh_incidence(reports, reducer)
    payload = {
        "group": gdesc,
        "order": G.order,
        "p": p,
        "classes": class_labels,
        "class_label_map": {lab: i for i, lab in
                            enumerate(label_classes(G)) if lab in class_labels},
        "levels": [{
            "k": 0,
            "components": [r.to_dict() for r in reports],
        }],
        "sh_incidence": {"0": incidence.to_csv()},
        "orbit_dumps": {"0": [orbit_dump(G, r.orbit) for r in reports]},
        "comparisons": [],
    }
    level_data = [(spec, reducer, reports)]
    L_chain: list[FrattiniLevel] = []
    current = G
    for step in range(1, k + 1):
        L = build_level(current, p, budget_cosets, step)
        frat_ok = verify_frattini(L)
        if not frat_ok:
            raise InvariantViolation("constructed level is not a Frattini cover")
        lspec = lifted_spec(L, level_data[-1][0])
        lreducer = Reducer(lspec)
        seeds = []
        for rep in level_data[-1][2]:
            seeds.extend(lift_tuples(L, rep.orbit[0], lspec, lreducer,
                                     frattini_verified=True))
        seeds = sorted(set(seeds))
        if not seeds:
            raise EmptyNielsenClass(f"nothing lies over level {step - 1}")
        uorbits = mbar4_orbits(lspec, seeds, lreducer)
        ureports = _component_payload(lspec, uorbits, lreducer, threads)
        uincidence = sh_incidence(ureports, lreducer)
        payload["levels"].append({
            "k": step,
            "total_order": L.total.order,
            "kernel_dim": L.kernel_dim,
            "components": [r.to_dict() for r in ureports],
        })
        payload["sh_incidence"][str(step)] = uincidence.to_csv()
        payload["orbit_dumps"][str(step)] = [
            orbit_dump(L.total, r.orbit) for r in ureports]
        for li, lrep in enumerate(level_data[-1][2]):
            for ui, urep in enumerate(ureports):
                try:
                    cmp = level_compare(lrep, urep, L, level_data[-1][1], li, ui)
                except MTError:
                    continue
                d = cmp.to_dict()
                d["verdict"] = check_goup(cmp)
                d["level"] = step
                payload["comparisons"].append(d)
        level_data.append((lspec, lreducer, ureports))
        L_chain.append(L)
        current = L.total
    return payload


def _emit(payload: dict, report_dir: Path, cache_dir: Path | None,
          key: str | None) -> None:
    report_dir.mkdir(parents=True, exist_ok=True)
    files = {}
    body = dict(payload)
    incidences = body.pop("sh_incidence", {})
    dumps = body.pop("orbit_dumps", {})
    files["components.json"] = json.dumps(body, sort_keys=True, indent=2) + "\n"
    for lvl, csv in incidences.items():
        files[f"sh_incidence_L{lvl}.csv"] = csv
    for lvl, dump in dumps.items():
        files[f"orbits_L{lvl}.json"] = json.dumps(dump, indent=1) + "\n"
    for name, text in files.items():
        (report_dir / name).write_text(text)
        if cache_dir is not None and key is not None:
            cache_mod.cache_put(cache_dir, key, name, text.encode())


def _restore_from_cache(cache_dir: Path, key: str, report_dir: Path) -> bool:
    names = cache_mod.cache_list(cache_dir, key)
    if not names:
        return False
    report_dir.mkdir(parents=True, exist_ok=True)
    for name in names:
        payload = cache_mod.cache_get(cache_dir, key, name)
        assert payload is not None
        (report_dir / name).write_bytes(payload)
    return True


def cmd_level(args) -> int:
    G, gdesc = load_group(args)
    labels = [s.strip() for s in args.classes.split(",")]
    cache_dir = Path(args.cache) if args.cache else cache_mod.default_cache_dir()
    key = cache_mod.job_key({
        "cmd": "level", "group": gdesc, "classes": labels, "p": args.p,
        "k": args.k, "version": VERSION})
    report_dir = Path(args.report)
    if not args.no_cache and _restore_from_cache(cache_dir, key, report_dir):
        print(f"cache hit {key[:12]} -> {report_dir}")
        return 0
    payload = run_level_analysis(G, gdesc, labels, args.p, args.k,
                                 args.budget_elements, args.budget_cosets,
                                 args.threads)
    _emit(payload, report_dir, None if args.no_cache else cache_dir, key)
    top = payload["levels"][-1]["components"]
    print(f"level {args.k}: {len(top)} component(s); "
          f"genera {[c['genus'] for c in top]} -> {report_dir}")
    return 0


def cmd_dihedral(args) -> int:
    if args.p == 2:
        raise InputError("dihedral tower needs an odd prime")
    G = dihedral_group(args.p)
    args.group = None
    cache_dir = Path(args.cache) if args.cache else cache_mod.default_cache_dir()
    key = cache_mod.job_key({
        "cmd": "dihedral", "p": args.p, "k": args.k, "version": VERSION})
    report_dir = Path(args.report)
    if not args.no_cache and _restore_from_cache(cache_dir, key, report_dir):
        print(f"cache hit {key[:12]} -> {report_dir}")
        return 0
    labels = [label_classes(G)[next(
        i for i, c in enumerate(G.conjugacy_classes()) if c.element_order == 2)]] * 4
    payload = run_level_analysis(G, f"D{args.p}", labels, args.p, args.k,
                                 args.budget_elements, args.budget_cosets,
                                 args.threads)
    _emit(payload, report_dir, None if args.no_cache else cache_dir, key)
    top = payload["levels"][-1]["components"]
    print(f"dihedral level {args.k}: sizes {[c['orbit_size'] for c in top]}, "
          f"genera {[c['genus'] for c in top]} -> {report_dir}")
    return 0


def cmd_schur(args) -> int:
    G, gdesc = load_group(args)
    out: dict = {"group": gdesc, "p": args.p, "quotients": []}
    if args.k == 0:
        quots = enumerate_schur_quotients(G, args.p, args.budget_cosets)
        for q in quots:
            out["quotients"].append({
                "order": q.total.order,
                "kernel_gen": str(q.total.perm(q.center_gen)),
            })
    else:
        L = build_level_model(G, args.p, args.budget_cosets)
        quots = enumerate_schur_quotients(L.total, args.p, args.budget_cosets)
        rad_basis = radical(L.kernel_module)
        coord_to_elem = {la.vec_int(L.kernel_coords[e], args.p): e
                         for e in L.kernel_elems}
        rad_elems = [coord_to_elem[la.vec_int(v, args.p)] for v in rad_basis]
        antecedents = enumerate_schur_quotients(L.base, args.p,
                                                args.budget_cosets)
        from .schur import antecedent_test
        for qi, q in enumerate(quots):
            vd = vd_set(q, L)
            a, b, c = check_modassume(q, L)
            slice_rep = abelian_test(q, L, rad_elems)
            census = p3_census(q, L)
            ante = [ai for ai, prev in enumerate(antecedents)
                    if antecedent_test(prev, q, L)]
            out["quotients"].append({
                "order": q.total.order,
                "kernel_gen": qi,
                "vd_size": len(vd.members),
                "vd_is_submodule": vd.is_submodule,
                "modassume": [a, b, c],
                "abelian": slice_rep.abelian,
                "invariants": slice_rep.invariants,
                "top_type": slice_rep.top_type,
                "p3_census": census,
                "antecedent_of": ante,
            })
    report_dir = Path(args.report)
    report_dir.mkdir(parents=True, exist_ok=True)
    text = json.dumps(out, sort_keys=True, indent=2) + "\n"
    (report_dir / "schur.json").write_text(text)
    print(f"{len(out['quotients'])} Schur quotient(s) -> {report_dir}")
    return 0


def cmd_gcomplete(args) -> int:
    G, gdesc = load_group(args)
    if args.classes:
        ids = [class_id(G, lab.strip()) for lab in args.classes.split(",")]
        verdict = is_gcomplete(G, ids)
    else:
        verdict = is_p_gcomplete(G, args.p)
    out = verdict.to_dict(G)
    out["group"] = gdesc
    out["p"] = args.p
    report_dir = Path(args.report)
    report_dir.mkdir(parents=True, exist_ok=True)
    (report_dir / "gcomplete.json").write_text(
        json.dumps(out, sort_keys=True, indent=2) + "\n")
    print(json.dumps(out, sort_keys=True))
    return 0


def cmd_frattini_verify(args) -> int:
    G, gdesc = load_group(args)
    L = build_level(G, args.p, args.budget_cosets)
    rep = verify_order_lifting(L)
    frat = verify_frattini(L)
    ld = loewy_layers(L.kernel_module)
    out = {
        "group": gdesc,
        "p": args.p,
        "total_order": L.total.order,
        "kernel_dim": L.kernel_dim,
        "order_lifting_ok": rep.ok,
        "order_violations": len(rep.order_violations),
        "class_failures": len(rep.class_failures),
        "frattini": frat,
        "loewy_display": ld.display(),
        "loewy_layer_dims": [[lab[0] for lab in layer] for layer in ld.layers],
    }
    report_dir = Path(args.report)
    report_dir.mkdir(parents=True, exist_ok=True)
    (report_dir / "frattini.json").write_text(
        json.dumps(out, sort_keys=True, indent=2) + "\n")
    print(json.dumps(out, sort_keys=True))
    return 0 if rep.ok and frat else 4


def make_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="mt", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    def common(sp, classes=False):
        sp.add_argument("--group", help="builtin name (A4, A5, K4, Dn, Zn)")
        sp.add_argument("--group-file", help="permutation list file")
        sp.add_argument("--presentation-file", help="presentation file")
        if classes:
            sp.add_argument("--classes", help="comma list of class labels, e.g. 3A,3A,3A,3A")
        sp.add_argument("--p", type=int, required=True)
        sp.add_argument("--k", type=int, default=0)
        sp.add_argument("--report", default="mt-report")
        sp.add_argument("--cache", default=None)
        sp.add_argument("--no-cache", action="store_true")
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--budget-elements", type=int, default=1 << 20)
        sp.add_argument("--budget-cosets", type=int, default=1 << 18)

    sp = sub.add_parser("level", help="braid-orbit component analysis")
    common(sp, classes=True)
    sp.set_defaults(func=cmd_level)

    sp = sub.add_parser("dihedral", help="odd-prime dihedral tower shadow")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--k", type=int, default=0)
    sp.add_argument("--report", default="mt-report")
    sp.add_argument("--cache", default=None)
    sp.add_argument("--no-cache", action="store_true")
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--budget-elements", type=int, default=1 << 20)
    sp.add_argument("--budget-cosets", type=int, default=1 << 18)
    sp.set_defaults(func=cmd_dihedral)

    sp = sub.add_parser("schur", help="Z/p Schur quotient analysis")
    common(sp)
    sp.set_defaults(func=cmd_schur)

    sp = sub.add_parser("gcomplete", help="completeness verdicts")
    common(sp, classes=True)
    sp.set_defaults(func=cmd_gcomplete)

    sp = sub.add_parser("frattini-verify", help="cover property checks")
    common(sp)
    sp.set_defaults(func=cmd_frattini_verify)
    return top


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except EmptyNielsenClass as e:
        print(f"empty Nielsen class: {e}", file=sys.stderr)
        return 3
    except (BudgetError, InputError) as e:
        print(f"budget/input: {e}", file=sys.stderr)
        return 2
    except (InvariantViolation, AssertionError) as e:
        print(f"internal invariant violation: {e}", file=sys.stderr)
        return 4
    except MTError as e:
        print(f"error: {e}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
