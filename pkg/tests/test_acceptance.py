"""Acceptance criteria 1-8.  Each test records and prints one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the summary) or
``python3 tests/test_acceptance.py``.
"""

import io
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

import conftest  # noqa: E402
from colfw.cli import main  # noqa: E402
from colfw.pipeline import load_file, load_source  # noqa: E402
from colfw.substitution import erase, simple_type_check, subst_canonical  # noqa: E402
from colfw.syntax import BASE, Arrow, Pi, alpha_equal, atom, truncate, var  # noqa: E402
from colfw.typecheck import check_signature  # noqa: E402
from colfw.unfolding import DefTable, eq_at_depth  # noqa: E402
from colfw.validity import validity_report  # noqa: E402
from conftest import CORPUS, FIXTURES, corpus_files  # noqa: E402
from generators import SIMPLE_CONSTANTS, random_canonical, random_signature, random_simple_type  # noqa: E402
from oracles import TraceOracle, oracle_subst  # noqa: E402

BIG = 1 << 30
CTX = {"a": BASE, "g": Arrow(BASE, BASE)}


def record(n: int, ok: bool, detail: str) -> None:
    conftest.ACCEPTANCE[n] = (ok, detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_criterion_1_corpus():
    start = time.perf_counter()
    failures = []
    files = corpus_files()
    for path in files:
        if cli("validity", path)[0] != 0:
            failures.append(f"{path.name} validity")
        for k in (0, 1, 2, 4, 8):
            code, out, err = cli("check", path, "--depth", k)
            if (code, out, err) != (0, "", ""):
                failures.append(f"{path.name}@{k}")
    elapsed = time.perf_counter() - start
    ok = len(files) == 9 and not failures and elapsed < 10
    record(1, ok, f"{len(files)} files x 5 depths in {elapsed:.2f}s; failures: {failures or 'none'}")


NEGATIVE = {
    "noncontractive": "non-contractive",
    "badnat": "invalid-cycle",
    "underapplied": "family-under-applied",
    "arity": "spine-arity",
    "shape": "shape-mismatch",
}


def test_criterion_2_negative_suite():
    import json

    wrong = []
    for name, expected in NEGATIVE.items():
        code, out, _ = cli("check", FIXTURES / f"{name}.colf", "--json")
        got = [i["code"] for i in json.loads(out)["items"]]
        if code != 1 or got != [expected]:
            wrong.append(f"{name}: exit {code}, {got}")
    record(2, not wrong, f"{len(NEGATIVE)} fixtures; mismatches: {wrong or 'none'}")


def test_criterion_3_substitution_oracle():
    rng = random.Random(3)
    cases = agree = undefined = 0
    bad = []
    while cases < 1500:
        tx = random_simple_type(rng, 3)
        tau = random_simple_type(rng, 3)
        n = random_canonical(rng, CTX, tx, 12)
        m = random_canonical(rng, {**CTX, "x": tx}, tau, 12)
        delta = {**CTX, **SIMPLE_CONSTANTS}
        if not simple_type_check({**delta, "x": tx}, m, tau, BIG):
            continue
        cases += 1
        got = subst_canonical(n, "x", tx, m, BIG)
        expected = oracle_subst(n, "x", m)
        if got is None:
            undefined += 1
            if expected is not None and simple_type_check(delta, expected, tau, BIG):
                bad.append((n, m))
        elif expected is not None and alpha_equal(got, expected):
            agree += 1
        else:
            bad.append((n, m))
    record(3, not bad, f"{cases} cases, {agree} agree, {undefined} undefined, {len(bad)} disagree")


def test_criterion_4_commutation():
    rng = random.Random(4)
    cases = defined = 0
    counter = []
    while cases < 700:
        k = rng.randint(0, 6)
        t1 = random_simple_type(rng, 2)
        t2 = random_simple_type(rng, 2)
        tau = random_simple_type(rng, 2)
        n1 = random_canonical(rng, CTX, t1, 8)
        n2 = random_canonical(rng, {**CTX, "x": t1}, t2, 8)
        m = random_canonical(rng, {**CTX, "x": t1, "z": t2}, tau, 12)
        if rng.random() < 0.3:
            # stubs in place of deep subterms
            m = truncate(m, BIG, rng.randint(1, 6))
        cases += 1
        inner = subst_canonical(n2, "z", t2, m, k)
        left = None if inner is None else subst_canonical(n1, "x", t1, inner, k)
        if left is None:
            continue
        defined += 1
        n2x = subst_canonical(n1, "x", t1, n2, BIG)
        mx = subst_canonical(n1, "x", t1, m, k)
        right = None if n2x is None or mx is None else subst_canonical(n2x, "z", t2, mx, k)
        if right is None or not eq_at_depth(left, right, k):
            counter.append((k, n1, n2, m))
    record(4, not counter and defined >= 500,
           f"{cases} triples, {defined} defined at depths 0-6, {len(counter)} counterexamples")


def test_criterion_5_depth_coherence():
    violations = []
    checked = 0
    for path in corpus_files():
        sig = load_file(path).signature
        defs = DefTable(sig)
        for d in sig.definitions:
            for k in range(0, 8):
                checked += 1
                if not eq_at_depth(truncate(defs.body(d.name, k + 1), k + 1, k), defs.body(d.name, k), k):
                    violations.append(f"{d.name}@{k}")
        passes = [not check_signature(sig, k, defs) for k in range(0, 9)]
        for k in range(0, 8):
            if passes[k + 1] and not passes[k]:
                violations.append(f"{path.name} check@{k}")
    record(5, not violations, f"{checked} expansions, checks at depths 0-8; violations: {violations or 'none'}")


def _verdicts(sig):
    oracle = TraceOracle(sig, max_constants=12)
    return [(d.name, d.valid, oracle.valid(d.name)) for d in validity_report(sig).definitions]


def test_criterion_6_validity_oracle():
    rng = random.Random(6)
    sigs = [load_file(p).signature for p in corpus_files()]
    for _ in range(200):
        loaded = load_source(random_signature(rng).text)
        assert not loaded.diagnostics
        sigs.append(loaded.signature)
    total = invalid = 0
    disagree = []
    for sig in sigs:
        for name, graph, oracle in _verdicts(sig):
            total += 1
            invalid += not graph
            if graph != oracle:
                disagree.append(name)
    record(6, not disagree,
           f"{len(sigs)} signatures, {total} definitions ({invalid} invalid), {len(disagree)} disagreements")


def test_criterion_7_spot_values():
    erased = str(erase(Pi("x", atom("a"), atom("a2", var("x")))))
    unfolded = cli("unfold", CORPUS / "cobin.colf", "w2", "--depth", 3)[1].strip()
    defs = DefTable(load_file(CORPUS / "cobin.colf").signature)
    w1, w2 = defs.body("w1", 4), defs.body("w2", 4)
    eq1, eq2 = eq_at_depth(w1, w2, 1), eq_at_depth(w1, w2, 2)
    ok = erased == "* -> *" and unfolded == "b1 (b0 (b1 _))" and eq1 and not eq2
    record(7, ok, f"erase = {erased}; unfold w2 3 = {unfolded}; w1 =_1 w2: {eq1}; w1 =_2 w2: {eq2}")


def test_criterion_8_sigma6():
    sig = load_file(CORPUS / "sigma6.colf").signature
    diags = check_signature(sig, 6)
    typed = all(sig[n].type == atom("ctm") for n in ("tmI", "tmY"))
    report = validity_report(sig)
    z = validity_report(load_file(FIXTURES / "sigma6_z.colf").signature)
    z_codes = [d.code for d in z.diagnostics]
    z_bad = [d for d in z.definitions if d.name == "tmZ" and not d.valid]
    no_progress = bool(z_bad) and "progress" not in (z_bad[0].witness or ())
    ok = not diags and typed and report.ok and z_codes == ["invalid-cycle"] and no_progress
    record(8, ok, f"I, Y check at depth 6: {not diags and typed}; Z rejected: {z_codes}")


if __name__ == "__main__":
    sys.setrecursionlimit(20000)
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
