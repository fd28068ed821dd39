"""Randomized theorem suite over the exemplar catalog.

Every check is keyed by a stable id ``<exemplar>/<check>`` and produces a
record ``{id, citation, verdict, margin, seed, samples, theorem}``.
``margin`` is the worst observed slack of the inequality being checked
(non-negative, or above ``-tolerance``, means it held).  ``theorem`` marks
checks whose failure contradicts a proved statement; exploratory and
inconclusive checks never fail the run.
"""

from __future__ import annotations

import json
import zlib
from dataclasses import dataclass

import numpy as np

from . import exemplars as exm
from . import sampling
from .frames import (
    certify_minimality,
    derivative_persistence_check,
    frame_combination_many,
    frame_coordinates,
    jordan_conditions,
    jordan_product,
    no_jordan_frame_in_derivative_check,
    orthogonal_sum_check,
    scaled_to_jordan_check,
    verify_jordan_frame,
    verify_scaled_frame,
)
from .majorize import (
    adjoint_S_search,
    build_T,
    diag_operator,
    ds_matrix_from_maps,
    ds_violation,
    eds_implies_lds_check,
    eigen_matrix,
    gram_matrix,
    hlp_completion,
    hlp_transfer,
    majorization_slack_many,
    majorization_test,
    mix_tuple,
    random_ds_matrix,
    verify_ds_map,
    verify_e_ds_tuple,
)
from .system import (
    automorphism_characterization_check,
    classify_idempotent,
    cone_samples,
    eigenvalues_many,
    interlacing_gap_many,
    is_system_automorphism,
    probe_completeness,
    rank_of_spectra,
    redirect,
    semi_inner_many,
    verify_hyperbolic,
)

SLACK = 1e-7


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    samples: int = 1000
    tol: dict | None = None

    def to_dict(self):
        return {"seed": self.seed, "samples": self.samples, "tol": self.tol or {}}


def _record(cid, citation, verdict, margin, seed, samples, theorem=True, detail=None):
    if isinstance(verdict, (bool, np.bool_)):
        verdict = "pass" if verdict else "fail"
    rec = {
        "id": cid,
        "citation": citation,
        "verdict": verdict,
        "margin": None if margin is None else float(margin),
        "seed": seed,
        "samples": samples,
        "theorem": theorem,
    }
    if detail is not None:
        rec["detail"] = detail
    return rec


def _gen(seed, name) -> np.random.Generator:
    return sampling.rng(seed, name)


# -- property sweeps on one system ----------------------------------------------------


def sweep_subadditivity(sys, seed, count, stream="sub"):
    X = sampling.gaussian(seed, stream + ":x", count, sys.dim)
    Y = sampling.gaussian(seed, stream + ":y", count, sys.dim)
    lx, ly = eigenvalues_many(sys, X), eigenvalues_many(sys, Y)
    return float(majorization_slack_many(eigenvalues_many(sys, X + Y), lx + ly).min())


def sweep_difference(sys, seed, count, stream="diff"):
    X = sampling.gaussian(seed, stream + ":x", count, sys.dim)
    Y = sampling.gaussian(seed, stream + ":y", count, sys.dim)
    lx, ly = eigenvalues_many(sys, X), eigenvalues_many(sys, Y)
    return float(majorization_slack_many(lx - ly, eigenvalues_many(sys, X - Y)).min())


def sweep_monotonicity(sys, seed, count, stream="mono"):
    X = cone_samples(sys, seed, stream + ":x", count)
    Z = cone_samples(sys, seed, stream + ":z", count)
    return float((eigenvalues_many(sys, X + Z) - eigenvalues_many(sys, X)).min())


def sweep_subduality(sys, seed, count, stream="subdual"):
    X = cone_samples(sys, seed, stream + ":x", count)
    Y = cone_samples(sys, seed, stream + ":y", count)
    ip = np.einsum("ij,jk,ik->i", X, sys.gram, Y)
    nx = np.linalg.norm(eigenvalues_many(sys, X), axis=1)
    ny = np.linalg.norm(eigenvalues_many(sys, Y), axis=1)
    return float((ip / (nx * ny)).min())


def sweep_expansion(sys, seed, count, stream="expand"):
    """min over samples of <lambda(x), lambda(y)> - <x, y> and of -| ||x|| - ||lambda(x)|| |."""
    X = sampling.gaussian(seed, stream + ":x", count, sys.dim)
    Y = sampling.gaussian(seed, stream + ":y", count, sys.dim)
    lx, ly = eigenvalues_many(sys, X), eigenvalues_many(sys, Y)
    ip = np.einsum("ij,jk,ik->i", X, sys.gram, Y)
    upper = np.sum(lx * ly, axis=1) - ip
    normx = np.sqrt(np.maximum(np.einsum("ij,jk,ik->i", X, sys.gram, X), 0.0))
    norm_gap = -np.abs(normx - np.linalg.norm(lx, axis=1))
    return float(min(upper.min(), norm_gap.min()))


def sweep_interlacing(sys, seed, count, stream="interlace"):
    X = sampling.gaussian(seed, stream, count, sys.dim)
    return float(-interlacing_gap_many(sys, X).max())


def sweep_ip_paths(sys, seed, count, stream="ip-paths"):
    X = sampling.gaussian(seed, stream + ":x", count, sys.dim)
    Y = sampling.gaussian(seed, stream + ":y", count, sys.dim)
    spectral = semi_inner_many(sys, X, Y)
    gram = np.einsum("ij,jk,ik->i", X, sys.gram, Y)
    rel = np.abs(spectral - gram) / (1.0 + np.abs(gram))
    return float(-rel.max())


def sweep_rank_subadditivity(sys, seed, count, stream="rank-sub"):
    """Mix Gaussian points with boundary points so that ranks below n occur."""
    X = sampling.gaussian(seed, stream + ":x", count, sys.dim)
    Y = sampling.gaussian(seed, stream + ":y", count, sys.dim)
    lx = eigenvalues_many(sys, X)
    X = X - lx[:, -1:] * sys.direction[None, :]
    rx = rank_of_spectra(sys, eigenvalues_many(sys, X))
    ry = rank_of_spectra(sys, eigenvalues_many(sys, Y))
    rs = rank_of_spectra(sys, eigenvalues_many(sys, X + Y))
    return int((rx + ry - rs).min())


def sweep_oracle(sys, seed, count, stream="oracle"):
    X = sampling.gaussian(seed, stream, count, sys.dim)
    return float(-np.abs(eigenvalues_many(sys, X) - eigenvalues_many(sys, X, path="oracle")).max())


def rank_additivity_cases(sys, F, seed, count, stream="rank-add"):
    """Orthogonal cone elements from disjoint groups of a Jordan frame; returns failures."""
    C = F.elements
    k = len(C)
    gen = _gen(seed, stream)
    fails = 0
    for _ in range(count):
        labels = gen.integers(0, max(2, k), size=k)
        weights = gen.uniform(0.1, 3.0, size=k)
        parts = [(weights[labels == g]) @ C[labels == g] for g in np.unique(labels)]
        P = np.array(parts)
        rs = rank_of_spectra(sys, eigenvalues_many(sys, P))
        total = rank_of_spectra(sys, eigenvalues_many(sys, P.sum(axis=0)))[0]
        fails += int(total != rs.sum())
    return fails


def frame_embedding_margin(sys, F, seed, count, stream="embed"):
    """Worst defects (algebra, det) of the frame-span copy of R^n.

    ``algebra`` covers commutativity, the unit e and power associativity
    (relative to the size of the operands); ``det`` compares the product of
    frame coordinates with the product of eigenvalues, relatively.
    """
    C = F.elements
    gen = _gen(seed, stream)
    algebra = det = 0.0
    e = sys.direction
    for _ in range(count):
        a, b = gen.normal(size=(2, len(C)))
        x, y = a @ C, b @ C
        xy, yx = jordan_product(sys, F, x, y), jordan_product(sys, F, y, x)
        xx = jordan_product(sys, F, x, x)
        lhs = jordan_product(sys, F, jordan_product(sys, F, xx, x), x)
        rhs = jordan_product(sys, F, xx, xx)
        scale = 1.0 + np.abs(np.r_[a, b]).max() ** 4
        algebra = max(
            algebra,
            np.abs(xy - yx).max() / scale,
            np.abs(jordan_product(sys, F, x, e) - x).max() / scale,
            np.abs(lhs - rhs).max() / scale,
        )
        coords, _ = frame_coordinates(sys, F, x)
        lam = eigenvalues_many(sys, x[None])[0]
        det = max(det, abs(np.prod(coords) - np.prod(lam)) / max(np.prod(np.abs(lam)), 1e-300))
    return float(algebra), float(det)


def random_ds_configuration(sys, F, gen):
    """(A, D) with A an e-doubly stochastic mix of the frame and D a random DS matrix."""
    n = len(F.elements)
    D0 = random_ds_matrix(gen, n)
    A = mix_tuple(F.elements, D0, sys)
    return A, random_ds_matrix(gen, n)


def ds_sweep(sys, F, seed, configs, samples, stream="ds-sweep"):
    """Theorem sweep for T built from frames, e-DS tuples and DS matrices."""
    gen = _gen(seed, stream)
    worst = np.inf
    map_fail = 0
    for i in range(configs):
        A, D = random_ds_configuration(sys, F, gen)
        T = build_T(sys, F, A, D)
        if not verify_ds_map(sys, T, samples, seed + i).holds:
            map_fail += 1
        res = majorization_test(sys, T, samples, seed + i, stream=f"{stream}:{i}")
        worst = min(worst, res["worst_slack"])
    return float(worst), map_fail


# -- per-exemplar check list -----------------------------------------------------------


def _seed_for(seed: int, cid: str) -> int:
    return (int(seed) * 1_000_003 + zlib.crc32(cid.encode())) % (2**63)


def exemplar_checks(ex, cfg: RunConfig) -> list[dict]:
    sys = ex.system
    N = cfg.samples
    out = []

    def add(name, citation, fn, theorem=True):
        cid = f"{ex.id}/{name}"
        seed = _seed_for(cfg.seed, cid)
        verdict, margin, samples, *detail = fn(seed)
        out.append(_record(cid, citation, verdict, margin, seed, samples, theorem, detail[0] if detail else None))

    def slack_check(sweep, count=N, tol=SLACK):
        def run(seed):
            m = sweep(sys, seed, count)
            return m >= -tol, m, count

        return run

    add("hyperbolic", "no non-real roots found on Gaussian samples",
        lambda s: (lambda v: (v.holds, -v.worst, N))(verify_hyperbolic(sys, N, s)))
    add("subadditivity", "lambda(x+y) majorized by lambda(x)+lambda(y)", slack_check(sweep_subadditivity))
    add("difference-majorization", "lambda(x)-lambda(y) majorized by lambda(x-y)", slack_check(sweep_difference))
    add("cone-monotonicity", "y-x in the cone implies lambda(x) <= lambda(y)", slack_check(sweep_monotonicity))
    add("subduality", "<x,y> >= 0 on the cone", slack_check(sweep_subduality, tol=1e-8))
    add("expansion", "<x,y> <= <lambda(x),lambda(y)> and ||x|| = ||lambda(x)||", slack_check(sweep_expansion))
    add("ip-paths", "spectral and Gram semi-inner products agree", slack_check(sweep_ip_paths))
    add("rank-subadditivity", "rank(x+y) <= rank(x)+rank(y)",
        lambda s: (lambda m: (m >= 0, m, N))(sweep_rank_subadditivity(sys, s, N)))
    if sys.degree >= 2:
        add("interlacing", "eigenvalues of p' interlace those of p", slack_check(sweep_interlacing))
    if sys.oracle is not None:
        add("oracle-consistency", "polynomial and direct eigenvalue paths agree",
            slack_check(sweep_oracle, count=min(N, 200)))

    def completeness(seed):
        v = probe_completeness(sys, min(N, 500), seed)
        if ex.complete:
            return v.holds, v.worst, min(N, 500)
        return ("pass" if not v.holds else "inconclusive"), v.worst, min(N, 500)

    add("completeness-probe", "declared completeness is consistent with a zero-spectrum search", completeness)

    for fi, F in enumerate(ex.known_frames):
        tag = f"frame{fi}"

        def scaled(seed, F=F):
            r = verify_scaled_frame(sys, F)
            return r.verified and not r.theorem_violation, r.margins["sum_interior"], None, "; ".join(r.violations) or None

        add(f"{tag}/scaled", "rank-one cone elements with interior sum; k >= n", scaled)

        def to_jordan(seed, F=F):
            r = scaled_to_jordan_check(sys, F)
            return r["agree"], float(r["k"] - r["n"]), None

        add(f"{tag}/scaled-to-jordan", "k = n iff Jordan frame for the direction d = sum", to_jordan)

        def persistence(seed, F=F):
            ok = all(derivative_persistence_check(sys, F, m)["verified"] for m in range(0, sys.degree))
            return ok, None, None

        add(f"{tag}/derivative-persistence", "scaled frames persist in every derivative system", persistence)

        def direction_change(seed, F=F):
            X = cone_samples(sys, seed, "direction", 5)
            ok = True
            for d in X:
                red = redirect(sys, d)
                ok &= bool(np.all(rank_of_spectra(red, eigenvalues_many(red, F.elements)) == 1))
            return ok, None, 5

        add(f"{tag}/rank-one-any-direction", "rank does not depend on the interior direction", direction_change)

        def minimal(seed, F=F):
            cert = certify_minimality(sys, F, seed=seed, num_samples=min(N * 10, 10_000))
            if sys.degree < 2:
                return not cert["issued"], None, None
            return cert["issued"], None, cert["strict_containment"]["samples_used"]

        add(f"{tag}/minimality", "a scaled frame certifies minimality of p and p'", minimal)

        if F.kind != "jordan":
            continue

        def jordan(seed, F=F):
            r = verify_jordan_frame(sys, F)
            return r.verified and not r.theorem_violation, -r.margins["gram_identity"], None

        add(f"{tag}/jordan", "Jordan frames are orthonormal with k = n", jordan)

        def combination(seed, F=F):
            count = max(1, N // 2)
            R = sampling.gaussian(seed, "combination", count, len(F)) * 3.0
            err = frame_combination_many(sys, F, R)
            return bool(err.max() <= SLACK), -float(err.max()), count

        add(f"{tag}/combination", "lambda(sum r_i c_i) is r sorted decreasingly", combination)

        def embedding(seed, F=F):
            count = max(1, N // 20)
            algebra, det = frame_embedding_margin(sys, F, seed, count)
            return algebra <= 1e-9 and det <= 1e-6, -max(algebra, det), count

        add(f"{tag}/embedding", "frame span is a copy of R^n with the coordinatewise product", embedding)

        def rank_add(seed, F=F):
            count = max(1, N // 10)
            fails = rank_additivity_cases(sys, F, seed, count)
            return fails == 0, float(-fails), count

        add(f"{tag}/rank-additivity", "rank is additive on orthogonal cone elements", rank_add)

        def orth_sum(seed, F=F):
            gen = _gen(seed, "orth-sum")
            ok = True
            for _ in range(5):
                k = int(gen.integers(1, len(F) + 1))
                idx = np.sort(gen.choice(len(F), size=k, replace=False))
                ok &= orthogonal_sum_check(sys, F.elements[idx], ex.complete)["holds"]
            return ok, None, 5

        add(f"{tag}/orthogonal-sum", "orthogonal primitive idempotents sum to an idempotent", orth_sum)

        def ladder(seed, F=F):
            gen = _gen(seed, "ladder")
            ok = jordan_conditions(sys, F.elements, ex.complete)["holds"]
            for _ in range(10):
                w = gen.uniform(0.2, 2.0, size=len(F))
                ok &= jordan_conditions(sys, w[:, None] * F.elements, ex.complete)["holds"]
            return ok, None, 11

        add(f"{tag}/implication-ladder", "primitive / sum to e / orthogonal implications", ladder)

        def tuples(seed, F=F):
            gen = _gen(seed, "tuples")
            ok = True
            worst = np.inf
            n = len(F)
            for _ in range(5):
                A, D = random_ds_configuration(sys, F, gen)
                ok &= verify_e_ds_tuple(sys, A)["verified"]
                r = eds_implies_lds_check(sys, A, ex.complete)
                ok &= r["holds"]
                worst = min(worst, r["worst_slack"])
                G, g_ok = gram_matrix(sys, A)
                ok &= g_ok
                em = eigen_matrix(sys, A)
                ok &= em["column_stochastic"] and em["rigidity_holds"]
                ok &= hlp_completion(sys, A)["holds"]
                T = build_T(sys, F, A, D)
                _, m_ok = ds_matrix_from_maps(sys, A, mix_tuple(F.elements, random_ds_matrix(gen, n), sys), T)
                ok &= m_ok
            uni = np.tile(sys.direction / n, (n, 1))
            ok &= eigen_matrix(sys, uni)["uniform"]
            _, g_ok = gram_matrix(sys, F.elements)
            ok &= g_ok and verify_jordan_frame(sys, F.elements).verified
            return ok, worst, 5

        add(f"{tag}/doubly-stochastic-tuples", "e-DS tuples are lambda-DS; Gram DS; eigen-matrix column-stochastic", tuples)

        def transform(seed, F=F):
            configs = max(1, N // 100)
            worst, map_fail = ds_sweep(sys, F, seed, configs, 100)
            return worst >= -SLACK and map_fail == 0, worst, configs * 100

        add(f"{tag}/ds-transform", "lambda(T x) majorized by lambda(x) for DS T built from frames", transform)

        def schur(seed, F=F):
            Dg = diag_operator(sys, F)
            cross = float(np.abs(Dg - build_T(sys, F, F.elements, np.eye(len(F)))).max())
            res = majorization_test(sys, Dg, max(1, N // 2), seed, stream="schur")
            return res["holds"] and cross <= 1e-10, res["worst_slack"], max(1, N // 2)

        add(f"{tag}/schur", "lambda(Diag x) majorized by lambda(x)", schur)

        def adjoint(seed, F=F):
            gen = _gen(seed, "adjoint")
            A, _ = random_ds_configuration(sys, F, gen)
            res = adjoint_S_search(sys, F, A, max(1, N // 5), seed)
            return "exploratory", res["min_slack"], res["samples"]

        add(f"{tag}/adjoint-s", "open question: lambda(S x) majorized by lambda(x)?", adjoint, theorem=False)

    for ri, (F, why) in enumerate(ex.rejected_frames):
        def rejected(seed, F=F, why=why):
            r = verify_jordan_frame(sys, F) if F.kind == "jordan" else verify_scaled_frame(sys, F)
            refused = not r.verified
            if F.kind == "scaled":
                refused = refused and not certify_minimality(sys, F, seed=seed, num_samples=10)["issued"]
            return refused, None, None, why

        add(f"rejected{ri}", "candidate frame must be rejected", rejected)

    out.extend(_special_checks(ex, cfg))
    return out


def _special_checks(ex, cfg):
    sys = ex.system
    N = cfg.samples
    out = []

    def add(name, citation, verdict, margin, seed, samples, theorem=True):
        out.append(_record(f"{ex.id}/{name}", citation, verdict, margin, seed, samples, theorem))

    if ex.id == "ex3_6":
        seed = _seed_for(cfg.seed, "ex3_6/no-rank-one")
        count = max(N * 100, 1)
        r = exm.no_rank_one_search(ex, count, seed)
        add("no-rank-one", "no rank-one element: every 3-of-4 subsystem is nonsingular",
            r["holds"], r["min_second_eigenvalue"], seed, count)
    if ex.id == "ex3_2":
        seed = _seed_for(cfg.seed, "ex3_2/no-primitive")
        count = max(N * 10, 1)
        X = sampling.gaussian(seed, "primitive", count, 1)
        hits = sum(classify_idempotent(sys, x) == 1 for x in X[: min(count, 2000)])
        lam = eigenvalues_many(sys, X)
        hits += int(np.sum(np.all(np.abs(lam - np.r_[1.0, 0.0]) <= 1e-8, axis=1)))
        add("no-primitive-idempotent", "e is not a sum of primitive idempotents", hits == 0, float(-hits), seed, count)
    if ex.id == "ex3_3":
        seed = _seed_for(cfg.seed, "ex3_3/automorphisms")
        F = ex.known_frames[0]
        P = np.eye(3)[[1, 2, 0]]
        checks = [
            automorphism_characterization_check(sys, A, F, True, min(N, 200), seed)
            for A in (np.eye(3), P, np.diag([2.0, 1.0, 1.0]))
        ]
        ok = all(c["agree"] for c in checks)
        ok &= checks[1]["system_automorphism"] and not checks[2]["system_automorphism"]
        ok &= checks[2]["cone_automorphism"]
        add("automorphism-characterization", "system-automorphism iff cone-automorphism fixing e", ok, None, seed, min(N, 200))
    if ex.id == "ex3_4":
        seed = _seed_for(cfg.seed, "ex3_4/swap-rejected")
        swap = np.eye(3)[[1, 0, 2]]
        v = is_system_automorphism(sys, swap, min(N, 200), seed)
        add("swap-not-automorphism", "swapping x1 and x2 changes the spectrum", not v.holds, v.worst, seed, min(N, 200))
    if ex.id == "exR4E4":
        seed = _seed_for(cfg.seed, "exR4E4/no-jordan-in-derivative")
        r = no_jordan_frame_in_derivative_check(sys, np.eye(4))
        add("no-jordan-in-derivative", "derivative systems of degree >= 4 have no Jordan frame",
            r["consistent"] and not r["verified_in_derivative"], None, seed, None)
    if ex.id == "exR3E3":
        seed = _seed_for(cfg.seed, "exR3E3/derivative-exception")
        r = no_jordan_frame_in_derivative_check(sys, [[1.5, 0, 0], [-0.5, 1, 1]])
        add("derivative-jordan-exception", "the n = 3 derivative system does carry a Jordan frame",
            r["verified_in_derivative"], None, seed, None)
    if ex.id.startswith("sym"):
        m = int(ex.id[3:])
        seed = _seed_for(cfg.seed, f"{ex.id}/diag-extraction")
        Dg = diag_operator(sys, ex.known_frames[0])
        count = max(1, N // 2)
        X = sampling.gaussian(seed, "diag", count, sys.dim)
        err = 0.0
        for x in X[: min(count, 200)]:
            M = exm.unvec_sym(x, m)
            err = max(err, float(np.abs(exm.unvec_sym(Dg @ x, m) - np.diag(np.diag(M))).max()))
        add("diag-extraction", "Diag with the canonical frame extracts the matrix diagonal", err <= 1e-10, -err, seed, count)
    return out


def global_checks(cfg: RunConfig) -> list[dict]:
    out = []
    seed = _seed_for(cfg.seed, "global/hlp-transfer")
    gen = _gen(seed, "hlp")
    worst_res, worst_ds = 0.0, -np.inf
    for _ in range(cfg.samples):
        n = int(gen.integers(2, 9))
        v = gen.normal(size=n)
        u = random_ds_matrix(gen, n) @ v
        D, _ = hlp_transfer(u, v)
        worst_res = max(worst_res, float(np.abs(D @ v - u).max()))
        worst_ds = max(worst_ds, ds_violation(D))
    ok = worst_res <= 1e-8 and worst_ds <= 0
    out.append(_record("global/hlp-transfer", "Dv = u for a doubly stochastic D whenever u is majorized by v",
                       ok, -worst_res, seed, cfg.samples))
    return out


def run_suite(exemplar_ids=None, cfg: RunConfig | None = None) -> dict:
    """Run the suite on the given exemplars (all when None) and return the report."""
    cfg = cfg or RunConfig()
    tol = None
    if cfg.tol:
        tol = exm.Tolerances().replace(**cfg.tol)
    all_ex = exm.catalog(tol)
    chosen = all_ex if exemplar_ids is None else [exm.get(i, tol) for i in exemplar_ids]
    checks = []
    for ex in chosen:
        checks.extend(exemplar_checks(ex, cfg))
    if exemplar_ids is None:
        checks.extend(global_checks(cfg))
    checks.sort(key=lambda c: c["id"])
    failed = [c["id"] for c in checks if c["theorem"] and c["verdict"] == "fail"]
    return {
        "config": {**cfg.to_dict(), "exemplars": [ex.id for ex in chosen]},
        "checks": checks,
        "summary": {"total": len(checks), "failed": failed, "passed": not failed},
    }


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=1, allow_nan=True)
