"""Named check suites over a seeded corpus.

Four sections: "curvature" covers the solid-angle identity and the pointwise
and integrated curvature bounds; "localized" covers ball-local estimates,
rearrangement, and the subset bounds on surfaces and grids; "functional"
covers coarea, dyadic slicing, and the Sobolev-type bounds with fitted
constants; "classical" covers shadow and diameter formulas. run_suite wires
the corpus into the checks with deterministic ordering, so a (section, seed,
profile) triple pins the exact report stream.
"""

from __future__ import annotations

import numpy as np

from ..geometry import Params, make_body, surface_quadrature
from ..icosphere import icosahedron
from ..nonlocal_ops import ScalarField, halpha_chord
from ..quadrature import sphere_rule
from . import checks, corpus
from .reports import InequalityReport, SlicingSequence

SUITE_SECTIONS = ("curvature", "localized", "functional", "classical")

ALPHAS = (0.25, 0.5, 0.75)

# (s, p) pairs kept under the n > s*p ceiling for every n >= 1
SP_GRID = ((0.25, 1.0), (0.5, 1.0), (0.75, 1.0), (0.25, 2.0), (0.5, 1.5))

PROFILES = {
    "default": dict(
        n1=10, n2=4, res={1: 96, 2: 80},
        gauss_points=12, interpolation=18, localized=10, split=16,
        growth=10, rearrangement=48, subset_bound=18, flat_random=24,
        slicing=240, set_sobolev=16, function_sobolev=8,
        shadow_bodies=5, mc_samples=60000, coarea_res={1: 128, 2: 80},
    ),
    "full": dict(
        n1=70, n2=30, res={1: 128, 2: 80},
        gauss_points=16, interpolation=60, localized=20, split=30,
        growth=20, rearrangement=200, subset_bound=60, flat_random=100,
        slicing=1000, set_sobolev=40, function_sobolev=20,
        shadow_bodies=6, mc_samples=60000, coarea_res={1: 192, 2: 80},
    ),
    # "default" instance counts on surface meshes twice as fine; node-seeded
    # randomness means the instances themselves differ from "default"
    "fine": dict(
        n1=10, n2=4, res={1: 192, 2: 160},
        gauss_points=12, interpolation=18, localized=10, split=16,
        growth=10, rearrangement=48, subset_bound=18, flat_random=24,
        slicing=240, set_sobolev=16, function_sobolev=8,
        shadow_bodies=5, mc_samples=60000, coarea_res={1: 256, 2: 160},
    ),
}


def icosahedron_body():
    verts, _ = icosahedron()
    return make_body({"type": "hull3d", "vertices": verts})


class _Context:
    """Shared corpus, quadratures, and curvature cache for one suite run."""

    def __init__(self, seed: int, profile: str):
        if profile not in PROFILES:
            raise ValueError(f"unknown profile {profile!r}")
        self.seed = seed
        self.prof = PROFILES[profile]
        self.named = corpus.body_corpus(seed, self.prof["n1"], self.prof["n2"])
        self._quads: dict[int, object] = {}
        self.hcache: dict = {}

    def body(self, i: int):
        return self.named[i % len(self.named)][1]

    def name(self, i: int) -> str:
        return self.named[i % len(self.named)][0]

    def quad(self, i: int):
        i = i % len(self.named)
        if i not in self._quads:
            body = self.named[i][1]
            self._quads[i] = surface_quadrature(body, self.prof["res"][body.n])
        return self._quads[i]

    def body_alpha(self, i: int) -> float:
        # one alpha per body, shared by every section so the cache carries
        return ALPHAS[i % len(ALPHAS)]


def _spread_indices(count: int, total: int) -> np.ndarray:
    return np.unique(np.linspace(0, count - 1, total).astype(int))


def _tag(report: InequalityReport, seed: int, body_name=None) -> InequalityReport:
    report.seed = seed
    if body_name is not None:
        report.details["body"] = body_name
    return report


# ---------------------------------------------------------------------------


def _run_curvature(ctx: _Context) -> list[InequalityReport]:
    prof, seed = ctx.prof, ctx.seed
    out = []

    showcase = [
        ("disk-512gon", corpus.disk_polygon(512), 1024, 1e-3),
        ("icosahedron", icosahedron_body(), 1280, 2e-2),
        (ctx.name(1), ctx.body(1), prof["res"][1], 1e-2),
        (ctx.name(prof["n1"]), ctx.body(prof["n1"]), prof["res"][2], 5e-2),
    ]
    for name, body, res, tol in showcase:
        quad = surface_quadrature(body, res)
        pts = _spread_indices(quad.node_count, prof["gauss_points"])
        out.append(_tag(checks.check_gauss_law(body, quad, pts, tol), seed, name))

    rng = np.random.default_rng([seed, 11])
    kinds = ("cap", "cap", "rand")
    for i in range(prof["interpolation"]):
        quad = ctx.quad(i)
        body, name = ctx.body(i), ctx.name(i)
        anchor = int(rng.integers(quad.node_count))
        subset = corpus.random_subset(rng, quad, anchor, kind=kinds[i % 3])
        alpha = ALPHAS[i % 3]
        hval = halpha_chord(
            body, quad.points[anchor], alpha, normal=quad.normals[anchor]
        ).value
        out.append(
            _tag(
                checks.check_curvature_interpolation(
                    body, quad, subset, anchor, alpha, halpha_value=hval
                ),
                seed,
                name,
            )
        )

    for i in range(len(ctx.named)):
        body, quad, name = ctx.body(i), ctx.quad(i), ctx.name(i)
        alpha = ctx.body_alpha(i)
        out.append(
            _tag(
                checks.check_pointwise_global(body, quad, alpha, cache=ctx.hcache),
                seed,
                name,
            )
        )
        s = ALPHAS[(i + 1) % 3]
        out.append(
            _tag(
                checks.check_integral_bound(body, quad, alpha, s, cache=ctx.hcache),
                seed,
                name,
            )
        )
    return out


def _run_localized(ctx: _Context) -> list[InequalityReport]:
    prof, seed = ctx.prof, ctx.seed
    out = []

    rng = np.random.default_rng([seed, 21])
    for i in range(prof["localized"]):
        body, quad, name = ctx.body(i), ctx.quad(i), ctx.name(i)
        xi = int(rng.integers(quad.node_count))
        radius = float(rng.uniform(0.15, 0.75)) * body.diameter()
        out.append(
            _tag(checks.check_localized_identity(body, quad, xi, radius), seed, name)
        )

    # ball-split bound: measure every instance against constant 1, fit the
    # envelope, then report with per-instance generators replayed so the
    # Monte Carlo volumes are identical in both passes
    rng = np.random.default_rng([seed, 31])
    split_instances = []
    for i in range(prof["split"]):
        body, quad, name = ctx.body(i), ctx.quad(i), ctx.name(i)
        xi = int(rng.integers(quad.node_count))
        radius = float(rng.uniform(0.15, 0.45)) * body.diameter()
        split_instances.append((i, name, xi, radius))
    ratio = 0.0
    for k, (i, name, xi, radius) in enumerate(split_instances):
        probe = checks.check_reverse_isoperimetric(
            ctx.body(i), ctx.quad(i), xi, radius, 1.0,
            np.random.default_rng([seed, 31, k]), rel_tolerance=0.0,
        )
        if probe.details["cap"] > 1e-12:
            ratio = max(ratio, probe.lhs / probe.details["cap"])
    c_split = ratio * (1.0 + 1e-9)
    for k, (i, name, xi, radius) in enumerate(split_instances):
        out.append(
            _tag(
                checks.check_reverse_isoperimetric(
                    ctx.body(i), ctx.quad(i), xi, radius, c_split,
                    np.random.default_rng([seed, 31, k]),
                ),
                seed,
                name,
            )
        )

    rng = np.random.default_rng([seed, 41])
    for i in range(prof["growth"]):
        body, quad, name = ctx.body(i), ctx.quad(i), ctx.name(i)
        xi = int(rng.integers(quad.node_count))
        radii = np.geomspace(0.05, 1.1, 8) * (body.diameter() / 2.0)
        out.append(
            _tag(checks.check_perimeter_growth(body, quad, xi, radii), seed, name)
        )

    rng = np.random.default_rng([seed, 51])
    kinds = ("cap", "rand", "cap")
    for i in range(prof["rearrangement"]):
        quad, name = ctx.quad(i), ctx.name(i)
        anchor = int(rng.integers(quad.node_count))
        subset = corpus.random_subset(rng, quad, anchor, kind=kinds[i % 3])
        sp = ALPHAS[i % 3]
        out.append(
            _tag(checks.check_rearrangement(quad, subset, anchor, sp), seed, name)
        )

    rng = np.random.default_rng([seed, 55])
    subset_instances = []
    for i in range(prof["subset_bound"]):
        body, quad, name = ctx.body(i), ctx.quad(i), ctx.name(i)
        anchor = int(rng.integers(quad.node_count))
        subset = corpus.random_subset(rng, quad, anchor, kind=kinds[i % 3])
        s, p = SP_GRID[i % len(SP_GRID)]
        alpha = ctx.body_alpha(i)
        hval = halpha_chord(
            body, quad.points[anchor], alpha, normal=quad.normals[anchor]
        ).value
        subset_instances.append((i, name, anchor, subset, s, p, alpha, hval))
    ratio = 0.0
    for i, name, anchor, subset, s, p, alpha, hval in subset_instances:
        probe = checks.check_pointwise_subset(
            ctx.quad(i), subset, anchor, alpha, s, p, 1.0, c_split,
            halpha_value=hval, body=ctx.body(i),
        )
        ratio = max(ratio, probe.lhs / probe.rhs)
    c_subset = ratio * (1.0 + 1e-9)
    for i, name, anchor, subset, s, p, alpha, hval in subset_instances:
        out.append(
            _tag(
                checks.check_pointwise_subset(
                    ctx.quad(i), subset, anchor, alpha, s, p, c_subset, c_split,
                    halpha_value=hval, body=ctx.body(i),
                ),
                seed,
                name,
            )
        )

    # grid cell unions: balls saturate the bound, random blobs sit inside it
    for n, h in ((1, 1.0 / 200.0), (2, 1.0 / 24.0)):
        cells = checks.ball_cells(n, h, 1.0)
        center = np.zeros(n, dtype=int)
        for alpha in ALPHAS:
            # balls saturate the bound; the staircase set can land a hair past it
            rep = checks.check_flat_subset_bound(n, alpha, h, cells, center, 1e-3)
            out.append(_tag(rep, seed, f"grid-ball-{n}d"))
            out.append(
                _tag(
                    checks.identity_report(
                        "flat-subset-equality-case",
                        rep.lhs,
                        rep.rhs,
                        1e-2,
                        constant_used=rep.constant_used,
                        constant_provenance="derived-closed-form",
                        params={"n": n, "alpha": alpha},
                        resolution=len(cells),
                    ),
                    seed,
                    f"grid-ball-{n}d",
                )
            )
    rng = np.random.default_rng([seed, 61])
    for i in range(prof["flat_random"]):
        n = 1 if i % 3 == 0 else 2
        cells = corpus.random_cell_union(rng, n, 60)
        x_cell = cells[int(rng.integers(len(cells)))]
        alpha = ALPHAS[i % 3]
        out.append(
            _tag(
                checks.check_flat_subset_bound(
                    n, alpha, 1.0, cells, x_cell, rel_tolerance=5e-3
                ),
                seed,
                f"grid-union-{n}d",
            )
        )
    return out


def _run_functional(ctx: _Context) -> list[InequalityReport]:
    prof, seed = ctx.prof, ctx.seed
    out = []

    rng = np.random.default_rng([seed, 71])
    coarea_bodies = [
        ("disk-96gon", corpus.disk_polygon(96), prof["coarea_res"][1]),
        ("icosahedron", icosahedron_body(), prof["coarea_res"][2]),
    ]
    for name, body, res in coarea_bodies:
        quad = surface_quadrature(body, res)
        for kind in ("cap", "cosine", "bump"):
            values = corpus.field_values(rng, quad, kind)
            field = ScalarField(quad, values)
            s = 0.25 if kind == "cosine" else 0.5
            tol = 1e-10 if kind == "cap" else 2e-2
            levels = 64 if kind == "cap" else 128
            rep = checks.check_coarea(field, s, levels=levels, rel_tolerance=tol)
            rep.details["field"] = kind
            out.append(_tag(rep, seed, name))

    # the one-window sequence pins the closed forms before the random sweep
    out.append(
        _tag(
            checks.check_slicing_inequality(
                SlicingSequence(0, [1.0]), Params(2, s=0.5, p=1.0)
            ),
            seed,
            "unit-window",
        )
    )
    rng = np.random.default_rng([seed, 81])
    combos = [
        (n, s, p)
        for n in (1, 2)
        for s in ALPHAS
        for p in (1.0, 1.5, 2.0)
        if n > s * p
    ]
    for i in range(prof["slicing"]):
        n, s, p = combos[i % len(combos)]
        seq = corpus.random_slicing_sequence(rng)
        out.append(
            _tag(
                checks.check_slicing_inequality(seq, Params(n, s=s, p=p)),
                seed,
                "random-sequence",
            )
        )

    rng = np.random.default_rng([seed, 91])
    set_instances = []
    for k in range(prof["set_sobolev"]):
        i = (k * 5) % len(ctx.named)  # stride so solid bodies are hit too
        body, quad, name = ctx.body(i), ctx.quad(i), ctx.name(i)
        anchor = int(rng.integers(quad.node_count))
        subset = corpus.random_subset(rng, quad, anchor)
        alpha = ctx.body_alpha(i)
        s = ALPHAS[k % 3]
        hvals = checks.halpha_at_nodes(body, quad, alpha, cache=ctx.hcache)
        set_instances.append((i, name, subset, s, alpha, hvals))
    ratio = 0.0
    for i, name, subset, s, alpha, hvals in set_instances:
        probe = checks.check_set_sobolev(
            ctx.quad(i), subset, Params(ctx.body(i).n, s=s), alpha, 1.0, hvals
        )
        ratio = max(ratio, probe.lhs / probe.rhs)
    c_set = ratio * (1.0 + 1e-9)
    for i, name, subset, s, alpha, hvals in set_instances:
        out.append(
            _tag(
                checks.check_set_sobolev(
                    ctx.quad(i), subset, Params(ctx.body(i).n, s=s), alpha,
                    c_set, hvals,
                ),
                seed,
                name,
            )
        )

    rng = np.random.default_rng([seed, 101])
    fn_instances = []
    for k in range(prof["function_sobolev"]):
        i = (k * 5) % len(ctx.named)
        body, quad, name = ctx.body(i), ctx.quad(i), ctx.name(i)
        kind = ("cosine", "bump")[k % 2]
        values = corpus.field_values(rng, quad, kind)
        s, p = SP_GRID[k % len(SP_GRID)]
        alpha = ctx.body_alpha(i)
        hvals = checks.halpha_at_nodes(body, quad, alpha, cache=ctx.hcache)
        fn_instances.append((i, name, values, s, p, alpha, hvals, kind))
    ratio = 0.0
    for i, name, values, s, p, alpha, hvals, kind in fn_instances:
        probe = checks.check_function_sobolev(
            ScalarField(ctx.quad(i), values), Params(ctx.body(i).n, s=s, p=p),
            alpha, 1.0, hvals,
        )
        ratio = max(ratio, probe.lhs / probe.rhs)
    c_fn = ratio * (1.0 + 1e-9)
    for i, name, values, s, p, alpha, hvals, kind in fn_instances:
        rep = checks.check_function_sobolev(
            ScalarField(ctx.quad(i), values), Params(ctx.body(i).n, s=s, p=p),
            alpha, c_fn, hvals,
        )
        rep.details["field"] = kind
        out.append(_tag(rep, seed, name))
    return out


def _run_classical(ctx: _Context) -> list[InequalityReport]:
    prof, seed = ctx.prof, ctx.seed
    out = []

    rng = np.random.default_rng([seed, 111])
    shadow_bodies = [
        ("square", corpus.rectangle(1.0, 1.0)),
        ("17gon", corpus.regular_polygon(17, 1.1)),
        ("ellipse-hull", corpus.random_ellipse_polygon(rng)),
        ("box3d", corpus.box3d(0.8, 1.1, 0.6)),
        ("icosahedron", icosahedron_body()),
        ("hull3d", corpus.random_hull3d(rng)),
    ][: prof["shadow_bodies"]]
    rules = {1: sphere_rule(1, 720), 2: sphere_rule(2, 1152)}
    for name, body in shadow_bodies:
        tol = 1e-3 if body.n == 1 else 1e-2
        out.append(
            _tag(checks.check_cauchy_formula(body, rules[body.n], tol), seed, name)
        )

    rng = np.random.default_rng([seed, 121])
    for n, res, tol in ((1, 720, 1e-3), (2, 4608, 1e-2)):
        tau = rng.normal(size=n + 1)
        tau /= np.linalg.norm(tau)
        out.append(_tag(checks.check_abs_cosine(n, sphere_rule(n, res), tau, tol), seed))

    diam_bodies = [("disk-512gon", corpus.disk_polygon(512)), ("icosahedron", icosahedron_body())]
    diam_bodies += list(ctx.named)
    for name, body in diam_bodies:
        out.append(_tag(checks.check_rosenthal_szasz(body), seed, name))
        out.append(_tag(checks.check_isodiametric(body), seed, name))
    return out


_RUNNERS = {
    "curvature": _run_curvature,
    "localized": _run_localized,
    "functional": _run_functional,
    "classical": _run_classical,
}


def run_suite(section: str = "all", seed: int = 0, profile: str = "default"):
    """Run one named section, or all of them, returning the report list."""
    if section != "all" and section not in _RUNNERS:
        raise ValueError(
            f"unknown section {section!r}; choose from {SUITE_SECTIONS + ('all',)}"
        )
    ctx = _Context(seed, profile)
    sections = SUITE_SECTIONS if section == "all" else (section,)
    reports: list[InequalityReport] = []
    for name in sections:
        reports.extend(_RUNNERS[name](ctx))
    return reports
