"""Acceptance criteria, one test per criterion.

Each test records a pass/fail line that the terminal summary prints.
"""

import contextlib
import io as _io
import time

import numpy as np
import pytest

from conftest import record
from hypframe import exemplars as exm
from hypframe import sampling
from hypframe.cli import main
from hypframe.frames import (
    FrameSet,
    certify_minimality,
    derivative_persistence_check,
    frame_combination_many,
    verify_jordan_frame,
)
from hypframe.majorize import diag_operator, hlp_transfer, majorization_slack_many, random_ds_matrix
from hypframe.suite import ds_sweep, rank_additivity_cases
from hypframe.system import eigenvalues, eigenvalues_many, semi_inner_many

SEED = 0


def _run_suite_cli():
    buf = _io.StringIO()
    t0 = time.perf_counter()
    with contextlib.redirect_stdout(buf):
        code = main(["suite", "--all", "--seed", str(SEED), "--samples", "1000", "--format", "json"])
    return code, buf.getvalue(), time.perf_counter() - t0


@pytest.fixture(scope="module")
def suite_run():
    return _run_suite_cli()


def _jordan_exemplars():
    for ex in exm.catalog():
        for F in ex.known_frames:
            if F.kind == "jordan":
                yield ex, F


def test_criterion_01_e3_on_r4_spectrum():
    sys = exm.get("ex4_4").system
    x = np.array([1.0, 0.0, 0.0, 0.0])
    eigenvalues(sys, x)
    times = []
    for _ in range(200):
        t0 = time.perf_counter()
        lam = eigenvalues(sys, x).values
        times.append(time.perf_counter() - t0)
    err = float(np.max(np.abs(lam - [0.75, 0.0, 0.0])))
    t = float(np.median(times))
    ok = err <= 1e-9 and t < 1e-3
    record(1, "lambda(e1) = (3/4, 0, 0) in (R^4, E_3, 1)", ok, f"error {err:.1e}, median {t * 1e3:.3f} ms")
    assert ok


def test_criterion_02_e2_jordan_frame():
    sys = exm.get("exR3E2").system
    rep = verify_jordan_frame(sys, FrameSet(np.array([[1.5, 0, 0], [-0.5, 1, 1]]), "jordan"))
    gram_err = float(np.max(np.abs(rep.gram - np.eye(2))))
    ok = rep.verified and not rep.theorem_violation and gram_err <= 1e-8 and rep.k == rep.n == 2
    record(2, "{(3/2,0,0), (-1/2,1,1)} is a Jordan frame of (R^3, E_2, 1)", ok, f"Gram error {gram_err:.1e}")
    assert ok


def test_criterion_03_semi_inner_products():
    worst = 0.0
    for ex_id, w in (("ex3_3", [1.0, 1.0, 1.0]), ("ex3_4", [2.0, 1.0, 1.0])):
        sys = exm.get(ex_id).system
        X = sampling.gaussian(SEED, f"accept-ip:{ex_id}:x", 200, 3)
        Y = sampling.gaussian(SEED, f"accept-ip:{ex_id}:y", 200, 3)
        got = semi_inner_many(sys, X, Y)
        expect = (X * Y) @ np.array(w)
        rel = np.abs(got - expect) / np.maximum(np.abs(expect), 1e-300)
        worst = max(worst, float(rel.max()))
    ok = worst <= 1e-7
    record(3, "semi-inner products of x1x2x3 and x1^2x2x3 match the diagonal forms", ok, f"max rel error {worst:.1e}")
    assert ok


def test_criterion_04_four_forms_no_rank_one():
    t0 = time.perf_counter()
    res = exm.no_rank_one_search(exm.get("ex3_6"), 100_000, seed=SEED)
    t = time.perf_counter() - t0
    exact = all(s["trivial_only"] for s in res["subsystems"]) and len(res["subsystems"]) == 4
    ok = exact and res["rank_one_hits"] == 0 and t < 5.0
    record(4, "four linear forms: no rank-one point (exact 3x3 subsystems + 1e5 samples)", ok,
           f"dets {[s['det'] for s in res['subsystems']]}, min rank {res['min_rank']}, {t:.2f} s")
    assert ok


SUITE_FAMILIES = ("subadditivity", "difference-majorization", "cone-monotonicity", "subduality",
                  "interlacing", "expansion")


def test_criterion_05_theorem_suite(suite_run):
    import json

    code, out, t = suite_run
    doc = json.loads(out)
    fam = [c for c in doc["checks"] if c["id"].split("/", 1)[-1] in SUITE_FAMILIES]
    bad = [c["id"] for c in fam if c["verdict"] != "pass"]
    n_ex = len(doc["config"]["exemplars"])
    ok = code == 0 and not bad and len(fam) >= len(SUITE_FAMILIES) * (n_ex - 1) and t < 60.0
    worst = min(c["margin"] for c in fam if c["id"].split("/", 1)[-1] != "subduality")
    record(5, "randomized theorem suite on all exemplars, 1000 samples", ok,
           f"{len(fam)} family checks, {len(bad)} failed, worst slack {worst:.1e}, {t:.1f} s")
    assert ok, bad


def test_criterion_06_rank_additivity():
    results = {}
    for ex_id in ("ex3_3", "sym3", "exR3E2"):
        ex = exm.get(ex_id)
        F = next(f for f in ex.known_frames if f.kind == "jordan")
        results[ex_id] = 100 - rank_additivity_cases(ex.system, F, SEED, 100)
    ok = all(v == 100 for v in results.values())
    record(6, "rank additivity on frame-derived orthogonal families", ok,
           ", ".join(f"{k} {v}/100" for k, v in results.items()))
    assert ok


def test_criterion_07_frame_combinations():
    worst = 0.0
    count = 0
    for ex, F in _jordan_exemplars():
        R = sampling.gaussian(SEED, f"accept-comb:{ex.id}", 500, len(F.elements)) * 3.0
        err = frame_combination_many(ex.system, F, R)
        worst = max(worst, float(err.max()))
        count += 1
    ok = worst <= 1e-7
    record(7, "lambda(sum r_i c_i) = r sorted, 500 weights per Jordan frame", ok,
           f"{count} frames, max error {worst:.1e}")
    assert ok


def test_criterion_08_ds_transform_sweep():
    worst = np.inf
    fails = 0
    for ex, F in _jordan_exemplars():
        w, f = ds_sweep(ex.system, F, SEED, 200, 100, stream="accept-ds")
        worst = min(worst, w)
        fails += f
    ok = worst >= -1e-7 and fails == 0
    record(8, "lambda(T x) majorized by lambda(x) for 200 (F, A, D) configurations x 100 samples", ok,
           f"worst slack {worst:.1e}, {fails} maps failing the DS test")
    assert ok


def test_criterion_09_hlp_transfer():
    gen = sampling.rng(SEED, "accept-hlp")
    worst_fit = worst_sum = 0.0
    for _ in range(1000):
        n = int(gen.integers(2, 8))
        v = gen.normal(size=n) * 3.0
        u = random_ds_matrix(gen, n) @ v
        D, _ = hlp_transfer(u, v)
        worst_fit = max(worst_fit, float(np.max(np.abs(D @ v - u))))
        worst_sum = max(worst_sum, float(np.max(np.abs(D.sum(axis=0) - 1))), float(np.max(np.abs(D.sum(axis=1) - 1))))
    ok = worst_fit <= 1e-8 and worst_sum <= 1e-9
    record(9, "hlp_transfer on 1000 majorization pairs", ok, f"|Dv-u| {worst_fit:.1e}, sums {worst_sum:.1e}")
    assert ok


def test_criterion_10_schur_on_sym3():
    ex = exm.get("sym3")
    sys = ex.system
    Dg = diag_operator(sys, ex.known_frames[0])
    X = sampling.gaussian(SEED, "accept-schur", 500, sys.dim)
    diag_err = max(
        float(np.max(np.abs(Dg @ x - exm.vec_sym(np.diag(np.diag(exm.unvec_sym(x, 3))))))) for x in X
    )
    slack = float(majorization_slack_many(eigenvalues_many(sys, X @ Dg.T), eigenvalues_many(sys, X)).min())
    oracle = eigenvalues_many(sys, X, path="oracle")
    path_err = float(np.max(np.abs(eigenvalues_many(sys, X) - oracle)))
    ok = diag_err <= 1e-12 and slack >= -1e-7 and path_err <= 1e-7
    record(10, "S^3: Diag is diagonal extraction, Schur majorization, poly vs Jacobi", ok,
           f"diag {diag_err:.1e}, slack {slack:.1e}, paths {path_err:.1e}")
    assert ok


def test_criterion_11_minimality():
    issued = {}
    for n in range(2, 7):
        cert = certify_minimality(exm.get(f"exR{n}E{n}").system, FrameSet(np.eye(n), "scaled"), seed=SEED)
        issued[n] = cert["issued"]
    persist = []
    for n in range(1, 7):
        for k in range(1, n + 1):
            sys = exm.get(f"exR{n}E{k}").system
            persist.append(derivative_persistence_check(sys, FrameSet(np.eye(n), "scaled"), 0)["verified"])
            if k == n:
                for m in range(0, n):
                    persist.append(derivative_persistence_check(sys, FrameSet(np.eye(n), "scaled"), m)["verified"])
    ex32, ex34 = exm.get("ex3_2"), exm.get("ex3_4")
    refused = [
        not certify_minimality(ex32.system, ex32.rejected_frames[0][0], seed=SEED)["issued"],
        not certify_minimality(ex34.system, FrameSet(np.eye(3)[1:], "scaled"), seed=SEED)["issued"],
    ]
    ok = all(issued.values()) and all(persist) and all(refused)
    record(11, "minimality certificates, derivative persistence, refusals", ok,
           f"certificates {sum(issued.values())}/5, persistence {sum(persist)}/{len(persist)}, refusals {sum(refused)}/2")
    assert ok


def test_criterion_12_determinism(suite_run):
    code1, out1, _ = suite_run
    code2, out2, _ = _run_suite_cli()
    ok = out1 == out2 and code1 == code2
    record(12, "suite --all twice with the same seed is byte-identical", ok, f"{len(out1)} bytes")
    assert ok
