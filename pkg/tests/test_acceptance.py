"""Acceptance criteria 1-8, each printed as one PASS/FAIL line."""
import time
from fractions import Fraction

from tbl import bmw, verify
from tbl import tangles as tg
from tbl.exactla import Operator, matmul
from tbl.qfield import limit_q1, quantum_int
from tbl.rep import F_eval, functor_image


def _failed(records):
    return [r.id for r in records if not r.passed]


def test_criterion_1_presentation(acceptance_line):
    t0 = time.perf_counter()
    records = [r for m in (1, 2, 3) for r in verify.check_presentation(m)]
    elapsed = time.perf_counter() - t0
    bad = _failed(records)
    ok = not bad and elapsed < 120
    acceptance_line(1, "tangle presentation and rotated forms, m=1,2,3", ok,
                    f"{len(records)} claims, {elapsed:.1f}s, failed={bad}")
    assert ok


def test_criterion_2_local_identities(acceptance_line):
    records = [r for m in (1, 2, 3) for r in verify.check_local(m)]
    bad = _failed(records)
    loops = [verify.run_claim("local.loop_value", m=m).certificate["value"] for m in (1, 2, 3)]
    ok = not bad
    acceptance_line(2, "local R-matrix identities and loop value 1-[2m+1], m=1,2,3", ok,
                    f"{len(records)} claims, loops={loops}, failed={bad}")
    assert ok


def test_criterion_3_bmw_action(acceptance_line):
    records = [r for n in (3, 4) for m in (1, 2) for r in verify.check_bmw_action(n, m)]
    bad = _failed(records)
    ok = not bad
    acceptance_line(3, "BMW relations for beta', gamma' at r=-q^(2m+1), n=3,4, m=1,2", ok,
                    f"{len(records)} claims, failed={bad}")
    assert ok


def test_criterion_4_yang_baxter(acceptance_line):
    records = [verify.run_claim("yb.braid", k=k, h=h) for k in range(4) for h in range(4)]
    records += [verify.run_claim("yb.matsumoto", n=n) for n in (3, 4)]
    records += [verify.run_claim(c, n=n) for n in (2, 3) for c in ("yb.central", "yb.idempotent")]
    records.append(verify.run_claim("yb.example"))
    bad = _failed(records)
    label = bmw.format_yb(bmw.yb_labels((3, 2, 1, 3, 4), 5))
    ok = not bad and label == "Y3(1) Y2(2) Y1(3) Y3(1) Y4(3)"
    nodes = records[0].certificate["nodes"]
    acceptance_line(4, "Yang-Baxter braid identity, reduced-word independence on S_4, "
                       "centrality and idempotence, labelled example", ok,
                    f"braid nodes={nodes}, S_4 nodes={verify.run_claim('yb.matsumoto', n=4).certificate['nodes']}, "
                    f"example='{label}', failed={bad}")
    assert ok


def test_criterion_5_kernel_elements(acceptance_line):
    records = [verify.run_claim("yb.kernel", m=m) for m in (1, 2)]
    records += [verify.run_claim("yb.trace_factor", m=m) for m in (1, 2, 3, 4)]
    bad = _failed(records)
    ok = not bad
    acceptance_line(5, "F(Y_2)=0 at m=1, F(Y_3)=0 at m=2, trace factor vanishes only at its own rank",
                    ok, f"{len(records)} claims, failed={bad}")
    assert ok


def test_criterion_6_dimensions(acceptance_line):
    spans = [bmw.word_basis(n, n).dim for n in (1, 2, 3, 4)]
    rows = []
    ok = spans == [1, 3, 15, 105]
    for n, m, want_ker in ((2, 1, 1), (3, 1, 10)):
        d = verify.rank_data(n, m)
        total = bmw.double_factorial(2 * n - 1)
        ker = total - d.rank
        rows.append(f"(n,m)=({n},{m}) rank={d.rank} ideal={d.ideal} ker={ker}")
        ok = ok and d.method == "exact" and d.rank + d.ideal == total and ker == d.ideal == want_ker
        ok = ok and verify.run_claim("sft.kernel", n=n, m=m).passed
    acceptance_line(6, "word-span ranks 1,3,15,105 and rank + ideal = (2n-1)!! for (2,1), (3,1)", ok,
                    f"spans={spans}; " + "; ".join(rows))
    assert ok


def test_criterion_7_round_trips(acceptance_line):
    notes, ok = [], True
    for m in (1, 2):
        image = functor_image(m)
        ident = Operator.identity(image.dim ** 2, (2, 2))
        inv_ok = matmul(image.beta, image.beta_inv) == ident == matmul(image.beta_inv, image.beta)
        xop_ok = F_eval(tg.compose(tg.X, tg.XOP), image) == ident == F_eval(tg.compose(tg.XOP, tg.X), image)
        ok = ok and inv_ok and xop_ok
        notes.append(f"m={m} R R^-1={inv_ok} X;Xop={xop_ok}")
    bend = verify.run_claim("bending.roundtrip", m=1, samples=60)
    bend_count = bend.certificate["samples"]
    ok = ok and bend.passed and bend_count >= 100
    limits = [limit_q1(quantum_int(k)) for k in range(-6, 13)]
    lim_ok = limits == [Fraction(k) for k in range(-6, 13)]
    ok = ok and lim_ok
    acceptance_line(7, "R R^-1 = 1, X;Xop = 1, bend round-trips, q->1 limits of [k]", ok,
                    f"{'; '.join(notes)}; bends={bend_count} ok={bend.passed}; limits ok={lim_ok}")
    assert ok


def test_criterion_8_negative_controls(acceptance_line):
    cfg = dict(ms=(1,), ns=(2, 3), bend_samples=5)
    counts = {}
    for mut in ("R", "E", "Y"):
        records = verify.run_suite(verify.SuiteConfig(mutate=mut, **cfg))
        counts[mut] = len(_failed(records))
    clean = verify.run_suite(verify.SuiteConfig(**cfg))
    ok = all(c > 0 for c in counts.values()) and not _failed(clean)
    acceptance_line(8, "sign mutations of R, E and Y_i(k) each break the suite", ok,
                    f"failures per mutation={counts}, unmutated failures={len(_failed(clean))}")
    assert ok
