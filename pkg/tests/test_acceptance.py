"""The sixteen acceptance criteria, each at its stated tolerance.

Every test records a single pass/fail line (printed in the terminal summary)
before asserting, so a failing criterion still reports what it observed.
"""

import time
from fractions import Fraction
from itertools import combinations

from linlat.cli import render_document
from linlat.errors import LemmaViolation, PreconditionViolated
from linlat.families import Family, comparability_structure
from linlat.gfq import make_field
from linlat.lattice import build_lattice, enumerate_level, general_linear_group
from linlat.lym import (
    alpha,
    alpha_exhaustive,
    basis_map_count,
    basis_map_pairs,
    boolean_family,
    cyclic_interval,
    double_chain,
    interval_chain_alpha_check,
    lym_check,
    maximal_chains,
)
from linlat.oracle import exhaustive_optimum, free_table
from linlat.posets import is_free, named_poset, parse_forbidden
from linlat.qarith import bn_bound, chain_identity_sides, gm_bound, plane_structure_condition, q_binomial, sigma_q
from linlat.search import SearchProblem, solve, solve_restricted_two_levels
from linlat.transforms import build_ma
from linlat.verify import pushdown_suite, verify_theorem


def _q_factorial(n, q):
    # [n]_q! as a product of exact quotients, independent of the library routine
    out = Fraction(1)
    for i in range(1, n + 1):
        out *= Fraction(q ** i - 1, q - 1)
    return out


def _search(L, forbid, induced, workers=1):
    prob = SearchProblem(L, parse_forbidden(forbid), induced=induced, mode="enumerate-extremal")
    return prob, solve(prob, workers)


def test_c01_qbinomial_matches_enumeration(criterion):
    t0 = time.monotonic()
    mismatches = []
    checked = 0
    for q in (2, 3):
        f = make_field(q)
        for n in range(6):
            for k in range(n + 1):
                checked += 1
                if len(enumerate_level(n, k, f)) != q_binomial(n, k, q):
                    mismatches.append((n, k, q))
    elapsed = time.monotonic() - t0
    ok = not mismatches and elapsed < 10
    criterion(1, "q-binomial / enumeration agreement", ok, f"{checked} levels, mismatches {mismatches}", elapsed)
    assert ok


def test_c02_maximal_chain_counts(criterion):
    t0 = time.monotonic()
    counts = {}
    for n, q in [(2, 2), (3, 2), (2, 3), (3, 3)]:
        counts[(n, q)] = sum(1 for _ in maximal_chains(build_lattice(n, q)))
    elapsed = time.monotonic() - t0
    ok = all(c == _q_factorial(n, q) for (n, q), c in counts.items()) and counts[(3, 2)] == 21 and elapsed < 1
    criterion(2, "maximal chains equal [n]_q!", ok, f"counts {counts}", elapsed)
    assert ok


def test_c03_chain_identity(criterion):
    t0 = time.monotonic()
    bad = []
    for n in (3, 5, 7):
        for q in (2, 3):
            left, right = chain_identity_sides(n, q)
            if not (left == right == _q_factorial(n, q)):
                bad.append((n, q))
    elapsed = time.monotonic() - t0
    ok = not bad and elapsed < 1
    criterion(3, "chain double-count identity", ok, f"6 cases, failures {bad}", elapsed)
    assert ok


def test_c04_vlambda_n3_q2(criterion):
    t0 = time.monotonic()
    L = build_lattice(3, 2)
    P = parse_forbidden("V:2,L:2")
    results = {}
    for induced in (True, False):
        _, report = _search(L, "V:2,L:2", induced)
        results[induced] = (report, exhaustive_optimum(L, P, induced))
    rep, (best, masks) = results[True]
    levels = [L.level_mask(1), L.level_mask(2)]
    others = [Family(L, m) for m in rep.extremal_masks if m not in levels]
    checks = {
        "optimum 7": rep.optimum == 7 == q_binomial(3, 1, 2),
        "search equals oracle": all(r.optimum == o[0] and r.extremal_masks == o[1] for r, o in results.values()),
        "both levels extremal": all(m in rep.extremal_masks for m in levels),
        "non-level extremals exist": bool(others),
        "profiles 4+3": all(sorted(F.level_counts()) == [0, 0, 3, 4] and F.support() == [1, 2] for F in others),
        "3 pairs + 1 isolated": all(comparability_structure(F) == (3, 1) for F in others),
        "induced equals weak": results[True][0].optimum == results[False][0].optimum,
    }
    elapsed = time.monotonic() - t0
    ok = all(checks.values()) and elapsed < 30
    detail = f"optimum {rep.optimum}, {len(rep.extremal_masks)} extremal ({len(others)} non-level); " + ", ".join(
        k for k, v in checks.items() if not v
    )
    criterion(4, "{V_2, Lambda_2} at n=3, q=2", ok, detail.rstrip("; "), elapsed)
    assert ok, checks


def test_c05_vlambda_n3_q3(criterion):
    t0 = time.monotonic()
    L = build_lattice(3, 3)
    prob, report = _search(L, "V:2,L:2", True)
    verdict = verify_theorem("thm_1.4", n=3, q=3)
    elapsed = time.monotonic() - t0
    ok = (
        len(L) == 28
        and prob.dim_range == (0, 3)
        and report.optimum == 13
        and report.extremal_masks == sorted([L.level_mask(1), L.level_mask(2)])
        and verdict.passed
        and elapsed < 300
    )
    criterion(5, "{V_2, Lambda_2} at n=3, q=3", ok, f"optimum {report.optimum}, {len(report.extremal_masks)} extremal", elapsed)
    assert ok


def test_c06_two_level_plane(criterion):
    t0 = time.monotonic()
    obs = {}
    for q in (2, 3):
        tl = solve_restricted_two_levels(q, 2, 2)
        sign = q * q - 3 * q + 1
        obs[q] = (tl.optimum, tl.levels_only, tl.structure_condition, sign)
    elapsed = time.monotonic() - t0
    ok = (
        obs[2][0] == 7 and not obs[2][1] and not obs[2][2] and obs[2][3] < 0
        and obs[3][0] == 13 and obs[3][1] and obs[3][2] and obs[3][3] > 0
        and plane_structure_condition(2, 2, 2) is False
        and elapsed < 300
    )
    detail = "; ".join(f"q={q}: optimum {o}, levels only {lv}" for q, (o, lv, _, _) in obs.items())
    criterion(6, "two-level restriction of L(3,q)", ok, detail, elapsed)
    assert ok


def test_c07_even_n2_unique_middle(criterion):
    t0 = time.monotonic()
    outcomes = {}
    for q in (2, 3):
        L = build_lattice(2, q)
        for induced in (False, True):
            best, masks = exhaustive_optimum(L, parse_forbidden("V:2,L:2"), induced)
            _, report = _search(L, "V:2,L:2", induced)
            same = report.optimum == best and report.extremal_masks == masks
            outcomes[(q, "induced" if induced else "weak")] = (
                same and best == q + 1 == q_binomial(2, 1, q) and masks == [L.level_mask(1)],
                best,
                len(masks),
            )
    elapsed = time.monotonic() - t0
    ok = all(o[0] for o in outcomes.values()) and elapsed < 1
    detail = "; ".join(
        f"q={q} {kind}: optimum {b}, {c} extremal [{'ok' if good else 'FAILED'}]"
        for (q, kind), (good, b, c) in outcomes.items()
    )
    criterion(7, "n=2 middle level is the unique maximum", ok, detail, elapsed)
    assert ok, detail


def test_c08_y_forks(criterion):
    t0 = time.monotonic()
    L = build_lattice(3, 2)
    _, report = _search(L, "Y:2,Y':2", True)
    best, masks = exhaustive_optimum(L, parse_forbidden("Y:2,Y':2"), True)
    elapsed = time.monotonic() - t0
    ok = report.optimum == best == 14 == sigma_q(3, 2, 2) and report.extremal_masks == masks and elapsed < 60
    criterion(8, "induced {Y_2, Y'_2} at n=3, q=2", ok, f"search {report.optimum}, oracle {best}", elapsed)
    assert ok


def test_c09_cyclic_interval_alpha(criterion):
    t0 = time.monotonic()
    grid = {}
    for n in (3, 4, 5):
        H = cyclic_interval(n).realized
        for k in (1, 2):
            P = parse_forbidden(f"Y:{k},Y':{k}")
            grid[(n, k)] = (alpha_exhaustive(H, P, True), alpha(H, P, True))
    elapsed = time.monotonic() - t0
    bad = {key: v for key, v in grid.items() if not (v[0] == v[1] == key[0] * key[1])}
    ok = not bad and elapsed < 120
    detail = "; ".join(f"n={n} k={k}: {v[0]} vs kn={n * k}" for (n, k), v in grid.items())
    criterion(9, "alpha*(I_n, {Y_k, Y'_k}) = kn", ok, detail, elapsed)
    assert ok, detail


def test_c10_double_chain(criterion):
    t0 = time.monotonic()
    H = double_chain(6).realized
    obs = {}
    for name in ("V:2", "L:2", "B", "Y:2", "C:3"):
        P = named_poset(name)
        v = interval_chain_alpha_check(2, 6, P)
        obs[name] = (v.brute_force, alpha_exhaustive(H, [P]), P.m + P.height - 2)
    elapsed = time.monotonic() - t0
    ok = all(a == b == c for a, b, c in obs.values()) and elapsed < 30
    criterion(10, "double chain alpha = |P| + h(P) - 2", ok, ", ".join(f"{k}: {v[0]}" for k, v in obs.items()), elapsed)
    assert ok


def test_c11_pushdown_suite(criterion):
    t0 = time.monotonic()
    res = pushdown_suite(n=4, q=2, k=2, l=2, count=200, seed=0)
    cases = res["cases"]
    checks = ("size_kept", "below_floor", "free_embedding", "free_counting")
    above = all(any(c["profile"][3:]) for c in cases)
    good = [c for c in cases if not c["hall_failure"] and all(c[key] for key in checks)]
    elapsed = time.monotonic() - t0
    ok = res["hall_failures"] == 0 and len(good) == 200 and above and elapsed < 120
    criterion(11, "pushdown property suite", ok, f"{len(good)}/200 pass, {res['hall_failures']} Hall failures", elapsed)
    assert ok


def test_c12_ma_bound(criterion):
    t0 = time.monotonic()
    L = build_lattice(3, 2)
    lam = [named_poset("L:2")]
    families = checked = violations = undefined = 0
    undefined_ok = True
    for size in range(1, 6):
        for combo in combinations(range(len(L)), size):
            F = Family.from_indices(L, combo)
            if not is_free(F, lam, True):
                continue
            families += 1
            for A in combo:
                s = L.dims[A]
                if s == 0:
                    continue
                if 0 in F:
                    # the zero subspace has no point to pin, so M(A) is undefined
                    undefined += 1
                    try:
                        build_ma(F, A, 2)
                        undefined_ok = False
                    except PreconditionViolated:
                        pass
                    continue
                checked += 1
                try:
                    ma = build_ma(F, A, 2)
                except LemmaViolation:
                    violations += 1
                    continue
                if len(ma.members) < (2 ** s - 1) - (2 ** (s - 1) - 1):
                    violations += 1
    elapsed = time.monotonic() - t0
    ok = violations == 0 and undefined_ok and checked > 0 and elapsed < 120
    detail = f"{families} families, {checked} (F, A) pairs, {violations} violations, {undefined} pairs with the zero subspace in F"
    criterion(12, "|M(A)| >= [s]_q - (l-1)[s-1]_q", ok, detail, elapsed)
    assert ok


def test_c13_basis_maps(criterion):
    t0 = time.monotonic()
    bad = []
    orders = {}
    for n in (2, 3):
        L = build_lattice(n, 2)
        orders[n] = sum(1 for _ in general_linear_group(n, 2))
        for H in (boolean_family(n), cyclic_interval(n).realized, double_chain(n).realized):
            hits = basis_map_pairs(H, 2, L)
            for i in range(len(L)):
                if hits[i] != basis_map_count(L.dims[i], H, n, 2):
                    bad.append((n, i))
    elapsed = time.monotonic() - t0
    ok = orders == {2: 6, 3: 168} and not bad and elapsed < 10
    criterion(13, "basis-map double count", ok, f"bases {orders}, mismatches {len(bad)}", elapsed)
    assert ok


def test_c14_lym_sweep(criterion):
    t0 = time.monotonic()
    L = build_lattice(3, 2)
    V2 = [named_poset("V:2")]
    H = cyclic_interval(3).realized
    a = alpha(H, V2)
    a_bf = alpha_exhaustive(H, V2)
    elements, table = free_table(L, V2, False)
    families = violations = 0
    worst = Fraction(0)
    for s in range(len(table)):
        if not table[s]:
            continue
        families += 1
        v = lym_check(Family(L, s), H, V2, alpha_value=a)
        worst = max(worst, v.lhs)
        violations += not v.holds
    elapsed = time.monotonic() - t0
    ok = a == a_bf and violations == 0 and elapsed < 300
    criterion(14, "LYM-type inequality over V_2-free families", ok, f"{families} families, alpha {a}, max lhs {worst}, {violations} violations", elapsed)
    assert ok


def test_c15_bound_corollaries(criterion):
    t0 = time.monotonic()
    mismatch = []
    for name in ("B", "V:2", "Y:2"):
        P = named_poset(name)
        for n in (2, 4):
            for q in (2, 3):
                middle = len(enumerate_level(n, n // 2, make_field(q)))
                bn = (Fraction(P.m + P.height, 2) - 1) * middle
                if bn_bound(P, n, q) != (bn, bn.numerator // bn.denominator):
                    mismatch.append(("bn", name, n, q))
                for k in (2, 3):
                    gm = Fraction(P.m + (3 * k - 5) * 2 ** (k - 2) * (P.height - 1) - 1, 2 ** (k - 1)) * middle
                    if gm_bound(P, n, q, k).exact != gm:
                        mismatch.append(("gm", k, name, n, q))
    optima = []
    for q in (2, 3):
        optima.append((solve(SearchProblem(build_lattice(3, q), parse_forbidden("V:2,L:2"), True)).optimum, "V:2", 3, q))
        optima.append((solve_restricted_two_levels(q, 2, 2).optimum, "V:2", 3, q))
        optima.append((exhaustive_optimum(build_lattice(2, q), parse_forbidden("V:2,L:2"), True)[0], "V:2", 2, q))
    optima.append((solve(SearchProblem(build_lattice(3, 2), parse_forbidden("Y:2,Y':2"), True)).optimum, "Y:2", 3, 2))
    above = []
    for value, name, n, q in optima:
        P = named_poset(name)
        bounds = [bn_bound(P, n, q).exact] + [gm_bound(P, n, q, k).exact for k in (2, 3)]
        if value > min(bounds):
            above.append((value, name, n, q))
    elapsed = time.monotonic() - t0
    ok = not mismatch and not above and elapsed < 1
    criterion(15, "bound corollaries", ok, f"24 bn/gm grid points, {len(optima)} optima checked, mismatches {mismatch}, above bound {above}", elapsed)
    assert ok


def test_c16_determinism(criterion):
    t0 = time.monotonic()
    docs = {}
    L = build_lattice(3, 2)
    for workers in (1, 4):
        for label, forbid in (("c4", "V:2,L:2"), ("c8", "Y:2,Y':2")):
            prob, report = _search(L, forbid, True, workers)
            docs[(label, workers)] = render_document("search", prob.config(), report.to_json())
        res = pushdown_suite(n=4, q=2, k=2, l=2, count=200, seed=0, workers=workers)
        config = {"n": 4, "q": 2, "k": 2, "l": 2, "count": 200, "seed": 0}
        docs[("c11", workers)] = render_document("pushdown", config, res)
    same = {label: docs[(label, 1)] == docs[(label, 4)] for label in ("c4", "c8", "c11")}
    elapsed = time.monotonic() - t0
    ok = all(same.values())
    criterion(16, "reports identical with 1 and 4 workers", ok, ", ".join(f"{k}: {'identical' if v else 'DIFFERENT'}" for k, v in same.items()), elapsed)
    assert ok
