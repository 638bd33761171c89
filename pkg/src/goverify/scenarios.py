"""Scenario catalog, configuration parsing, and the check pipeline.

A :class:`ScenarioSpec` pins everything needed to reproduce a run: the
algebra (family/size or an embedded structure table), the subgroup, the
metric (explicit parameters, block-spec text, or a seeded grid), the checks,
backend, tolerances and seed.  Identical spec + seed yields byte-identical
machine reports.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from . import arith, go, metrics, reps
from .arith import ContractViolation, ToleranceProfile, q
from .lie import (EmbeddingLayout, StructureAlgebra, build_classical, embed_so_partition,
                  ingest_structure_table, serialize_structure_table)
from .metrics import BlockSpec, MetricOperator
from .report import Report, encode_fraction, encode_vector
from .subspaces import Subspace, is_regular, orthogonal_complement

CHECK_ORDER = ("validate", "regular", "weakly-regular", "equivariance",
               "go", "natred", "dazi", "split", "sweep")


@dataclass(frozen=True)
class ScenarioSpec:
    """Deterministic description of one verification run."""

    name: str
    algebra: dict
    subgroup: dict | None = None
    metric: dict | None = None
    checks: tuple[str, ...] = ("validate",)
    backend: str = arith.EXACT
    seed: int = 0
    samples: int = 64
    tolerances: tuple[float, float, float] = (1e-9, 1e-8, 1e-7)

    def to_obj(self) -> dict:
        return {
            "name": self.name,
            "algebra": self.algebra,
            "subgroup": self.subgroup,
            "metric": self.metric,
            "checks": list(self.checks),
            "backend": self.backend,
            "seed": self.seed,
            "samples": self.samples,
            "tolerances": list(self.tolerances),
        }

    @staticmethod
    def from_obj(obj: dict) -> "ScenarioSpec":
        return ScenarioSpec(
            name=obj["name"], algebra=obj["algebra"], subgroup=obj.get("subgroup"),
            metric=obj.get("metric"), checks=tuple(obj.get("checks", ())),
            backend=obj.get("backend", arith.EXACT), seed=int(obj.get("seed", 0)),
            samples=int(obj.get("samples", 64)),
            tolerances=tuple(obj.get("tolerances", (1e-9, 1e-8, 1e-7))))

    @property
    def tol(self) -> ToleranceProfile:
        r, s, e = self.tolerances
        return ToleranceProfile(rank_epsilon=r, residual_epsilon=s, eigen_gap_epsilon=e)


# ---------------------------------------------------------------------------
# building blocks from spec dictionaries
# ---------------------------------------------------------------------------

@dataclass
class BuiltScenario:
    spec: ScenarioSpec
    algebra: StructureAlgebra
    layout: EmbeddingLayout | None
    named: dict[str, Subspace]
    subgroup: Subspace | None
    metric: MetricOperator | None


def build_algebra(algebra_spec: dict) -> StructureAlgebra:
    if "family" in algebra_spec:
        return build_classical(algebra_spec["family"], int(algebra_spec["n"]))
    if "table" in algebra_spec:
        return ingest_structure_table(algebra_spec["table"])
    raise ContractViolation("algebra spec needs 'family'+'n' or 'table'")


def _block_names(partition) -> list[str]:
    s = len(partition)
    names = [f"k{i}" for i in range(1, s + 1)]
    names += [f"m{i}_{j}" for i in range(1, s + 1) for j in range(i + 1, s + 1)]
    return names


def build_scenario(spec: ScenarioSpec) -> BuiltScenario:
    algebra = build_algebra(spec.algebra)
    layout = None
    named: dict[str, Subspace] = {}
    subgroup = None
    sub = spec.subgroup or {}
    if "partition" in sub:
        layout = embed_so_partition(algebra, tuple(sub["partition"]))
        named = layout.named_subspaces()
        subgroup = layout.subalgebra
    elif "span" in sub:
        rows = arith.qarray([[Fraction(v) for v in row] for row in sub["span"]])
        subgroup = Subspace(algebra, rows)
        named["k"] = subgroup
        named["m"] = orthogonal_complement(subgroup, algebra.form())
    elif "subspace" in sub:
        from .subspaces import parse_subspace
        subgroup = parse_subspace(algebra, sub["subspace"])
        named["k"] = subgroup
        named["m"] = orthogonal_complement(subgroup, algebra.form())
    elif "indices" in sub:
        subgroup = Subspace.from_indices(algebra, [int(i) for i in sub["indices"]])
        named["k"] = subgroup
        named["m"] = orthogonal_complement(subgroup, algebra.form())
    elif sub.get("kind") == "cartan-diagonal":
        idx = [i for i, lab in enumerate(algebra.labels) if lab.startswith("D")]
        subgroup = Subspace.from_indices(algebra, idx)
        named["t"] = subgroup
        pieces = reps.isotypic_decomposition(subgroup,
                                             orthogonal_complement(subgroup, algebra.form()),
                                             seed=spec.seed)
        for i, piece in enumerate(pieces.components, start=1):
            named[f"r{i}"] = piece
    elif "chain" in sub:
        inner = Subspace.from_indices(algebra, [int(i) for i in sub["chain"]["inner"]])
        outer = Subspace.from_indices(algebra, [int(i) for i in sub["chain"]["outer"]])
        if not outer.contains_space(inner):
            raise ContractViolation("chain: inner subalgebra must lie inside the outer one")
        form = algebra.form()
        named["h"] = inner
        named["u"] = orthogonal_complement(inner, form).intersect(outer)
        named["p"] = orthogonal_complement(outer, form)
        subgroup = inner
    metric = None
    if spec.metric is not None and "grid" not in spec.metric and "flaggrid" not in spec.metric:
        metric = build_metric(spec.metric, algebra, layout, named)
    return BuiltScenario(spec=spec, algebra=algebra, layout=layout, named=named,
                         subgroup=subgroup, metric=metric)


def build_metric(metric_spec: dict, algebra: StructureAlgebra,
                 layout: EmbeddingLayout | None, named: dict) -> MetricOperator:
    if "scalar" in metric_spec:
        value = q(Fraction(metric_spec["scalar"]))
        blocks = ((Subspace.full(algebra), value),)
        return metrics.metric_from_blocks(algebra, BlockSpec(blocks))
    if "params" in metric_spec:
        if layout is None:
            raise ContractViolation("params metric needs a partition subgroup")
        names = _block_names(layout.partition)
        values = [Fraction(v) for v in metric_spec["params"]]
        if len(values) != len(names):
            raise ContractViolation(f"expected {len(names)} parameters {names}")
        blocks = tuple((named[n], v) for n, v in zip(names, values))
        return metrics.metric_from_blocks(algebra, BlockSpec(blocks))
    if "triple" in metric_spec:
        x = Fraction(metric_spec["triple"]["x"])
        y = Fraction(metric_spec["triple"]["y"])
        blocks = ((named["h"], Fraction(1)), (named["u"], x), (named["p"], y))
        return metrics.metric_from_blocks(algebra, BlockSpec(blocks))
    if "blockspec" in metric_spec:
        return metrics.metric_from_blocks(algebra, parse_blockspec(metric_spec["blockspec"], named))
    raise ContractViolation("metric spec needs 'params', 'scalar', 'triple' or 'blockspec'")


def parse_blockspec(text: str, named: dict) -> BlockSpec:
    """Parse the block-spec text format.

    Lines: ``block <name> scalar <p>/<q>`` for scalar blocks and
    ``centerblock <name> matrix <entries...>`` (row-major) for the free
    symmetric block; ``#`` starts a comment.  Names refer to the scenario's
    named subspaces (``k1``, ``m1_2``, ... for partition layouts).
    """
    blocks = []
    center = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "block" and len(parts) == 4 and parts[2] == "scalar":
            name, value = parts[1], Fraction(parts[3])
        elif parts[0] == "centerblock" and len(parts) >= 4 and parts[2] == "matrix":
            name = parts[1]
            if name not in named:
                raise ContractViolation(f"line {lineno}: unknown subspace {name!r}")
            space = named[name]
            entries = [Fraction(v) for v in parts[3:]]
            if len(entries) != space.dim * space.dim:
                raise ContractViolation(f"line {lineno}: center block needs {space.dim}^2 entries")
            center = (space, arith.qarray(entries).reshape(space.dim, space.dim))
            continue
        else:
            raise ContractViolation(f"line {lineno}: malformed block-spec line")
        if name not in named:
            raise ContractViolation(f"line {lineno}: unknown subspace {name!r}")
        blocks.append((named[name], value))
    return BlockSpec(tuple(blocks), center)


# ---------------------------------------------------------------------------
# the pipeline
# ---------------------------------------------------------------------------

def run_check(spec: ScenarioSpec, workers: int = 1) -> Report:
    """Execute the requested checks in dependency order and build the report."""
    built = build_scenario(spec)
    rep = Report(spec=spec.to_obj(), seed=spec.seed, backend=spec.backend)
    for check in CHECK_ORDER:
        if check not in spec.checks:
            continue
        handler = _CHECKS[check]
        handler(built, rep, workers=workers)
    return rep


def _check_validate(built: BuiltScenario, rep: Report, **_):
    algebra = built.algebra
    algebra.validate()
    killing = algebra.killing
    rep.add({
        "record": "check", "name": "validate", "verdict": True, "negative": False,
        "dim": algebra.dim,
        "killing_negative_definite": algebra.canonical_form is not None,
        "killing_degenerate": bool(killing.degenerate),
    })


def _check_regular(built: BuiltScenario, rep: Report, **_):
    result = is_regular(_require_subgroup(built), seed=built.spec.seed)
    rep.add({
        "record": "check", "name": "regular", "verdict": bool(result.regular),
        "negative": not result.regular,
        "maximal_rank": bool(result.maximal_rank),
        "rank_ambient": result.rank_ambient,
        "rank_subalgebra": result.rank_subalgebra,
        "rank_normalizer": result.rank_normalizer,
    })


def _check_weakly_regular(built: BuiltScenario, rep: Report, **_):
    k = _require_subgroup(built)
    result = reps.is_weakly_regular(k, seed=built.spec.seed)
    sufficient = reps.criterion_weak_regularity(k)
    if sufficient and not result.weakly_regular:  # pragma: no cover - implication
        raise arith.ExactComputationError("sufficient criterion violated the full decision")
    rep.add({
        "record": "check", "name": "weakly-regular", "verdict": bool(result),
        "negative": not bool(result),
        "dim_subalgebra": result.dim_subalgebra,
        "dim_centralizer_in_complement": result.dim_centralizer_in_complement,
        "dim_opposite": result.dim_opposite,
        "intertwiner_dim": result.intertwiner_dim,
        "self_normalizing": result.dim_centralizer_in_complement == 0,
        "criterion_sufficient": bool(sufficient),
    })


def _check_equivariance(built: BuiltScenario, rep: Report, **_):
    spec = built.spec
    result = metrics.equivariance_check(_require_metric(built), _require_subgroup(built),
                                        backend=spec.backend, tol=spec.tol)
    rep.add({
        "record": "check", "name": "equivariance", "verdict": bool(result),
        "negative": not bool(result), "backend": spec.backend,
        "witness_index": result.witness_index,
    })


def _go_record(name: str, verdict: go.GoVerdict, subject: str,
               keep_certificates: bool) -> dict:
    record = {
        "record": "check", "name": name, "verdict": verdict.kind,
        "negative": verdict.disproved, "with_respect_to": subject,
        "samples": verdict.samples, "backend": verdict.backend,
        "strategy": {"seed": verdict.strategy.seed, "random_count": verdict.strategy.random_count,
                     "structured": verdict.strategy.structured,
                     "basis_vectors": verdict.strategy.basis_vectors},
        "counterexample": None,
    }
    if verdict.counterexample is not None:
        record["counterexample"] = {
            "label": verdict.counterexample_label,
            "direction": encode_vector(verdict.counterexample.direction),
            "rank_a": verdict.counterexample.rank_a,
            "rank_ab": verdict.counterexample.rank_ab,
        }
    if keep_certificates:
        record["certificates"] = [
            {"direction": encode_vector(c.direction), "witness": encode_vector(c.witness)}
            for c in verdict.certificates]
    return record


def _strategy(spec: ScenarioSpec) -> go.SamplingStrategy:
    return go.SamplingStrategy(seed=spec.seed, random_count=spec.samples)


def _check_go(built: BuiltScenario, rep: Report, **_):
    spec = built.spec
    operator = _require_metric(built)
    strategy = _strategy(spec)
    kprime = metrics.isometry_subalgebra(operator)
    if built.subgroup is not None:
        verdict = go.go_verdict(operator, built.subgroup, strategy, backend=spec.backend,
                                tol=spec.tol, keep_certificates=True)
        rep.add(_go_record("go", verdict, "subgroup", keep_certificates=True))
    verdict_iso = go.go_verdict(operator, kprime, strategy, backend=spec.backend,
                                tol=spec.tol, keep_certificates=True)
    record = _go_record("go-isometry", verdict_iso, "isometry-subalgebra", keep_certificates=True)
    record["isometry_dim"] = kprime.dim
    rep.add(record)


def _check_natred(built: BuiltScenario, rep: Report, **_):
    spec = built.spec
    operator = _require_metric(built)
    k = _require_subgroup(built)
    m = orthogonal_complement(k, built.algebra.form())
    result = go.natred_condition_check(operator, k, m, backend=spec.backend, tol=spec.tol)
    rep.add({
        "record": "check", "name": "natred", "verdict": bool(result),
        "negative": not bool(result), "backend": spec.backend,
        "witness_triple": list(result.witness_triple) if result.witness_triple else None,
    })


def _check_dazi(built: BuiltScenario, rep: Report, **_):
    operator = _require_metric(built)
    result = metrics.dazi_structure_check(operator, seed=built.spec.seed)
    rep.add({
        "record": "check", "name": "dazi", "verdict": bool(result.verdict),
        "negative": not result.verdict,
        "isometry_dim": result.isometry_subalgebra.dim,
        "center_dim": result.decomposition.center.dim if result.decomposition else None,
        "ideal_dims": [i.dim for i in result.decomposition.ideals] if result.decomposition else [],
        "ideal_scalars": [encode_fraction(s) for s in result.ideal_scalars],
        "complement_scalar": encode_fraction(result.complement_scalar)
        if result.complement_scalar is not None else None,
        "reason": result.reason,
    })


def _check_split(built: BuiltScenario, rep: Report, **_):
    spec = built.spec
    result = go.split_check(_require_metric(built), _require_subgroup(built),
                            _strategy(spec), seed=spec.seed)
    rep.add({
        "record": "check", "name": "split", "verdict": bool(result.ok),
        "negative": not result.ok,
        "hypotheses_met": result.hypotheses_met,
        "exploratory": result.exploratory,
        "weakly_regular": result.weakly_regular,
        "semisimple": result.flags.semisimple,
        "self_normalizing": result.flags.self_normalizing,
        "subalgebra_invariant": result.subalgebra_invariant,
        "complement_invariant": result.complement_invariant,
        "bi_invariant_on_subalgebra": result.bi_invariant_on_subalgebra,
        "coset_verdict": result.coset_verdict.kind if result.coset_verdict else None,
    })


def _require_subgroup(built: BuiltScenario) -> Subspace:
    if built.subgroup is None:
        raise ContractViolation(f"check needs a subgroup in scenario {built.spec.name!r}")
    return built.subgroup


def _require_metric(built: BuiltScenario) -> MetricOperator:
    if built.metric is None:
        raise ContractViolation(f"check needs a metric in scenario {built.spec.name!r}")
    return built.metric


# ---------------------------------------------------------------------------
# the equivalence sweep
# ---------------------------------------------------------------------------

def grid_parameter_tuples(partition, count: int, seed: int):
    """Seeded parameter tuples: alternately fully generic and normal-form shaped."""
    s = len(partition)
    names = _block_names(partition)
    pairs = [(i, j) for i in range(1, s + 1) for j in range(i + 1, s + 1)]
    variants = ["m-equal", "all-equal"] + [f"merge:{i}:{j}" for (i, j) in pairs]
    for t in range(count):
        rng = random.Random(f"sweep:{seed}:{t}")

        def rand_pos():
            return Fraction(rng.randint(1, 9), rng.randint(1, 3))

        params = {name: rand_pos() for name in names}
        if t % 2 == 0:
            kind = "generic"
        else:
            kind = variants[(t // 2) % len(variants)]
            if kind == "all-equal":
                value = rand_pos()
                params = {name: value for name in names}
            elif kind == "m-equal":
                value = rand_pos()
                for (i, j) in pairs:
                    params[f"m{i}_{j}"] = value
            else:
                _, si, sj = kind.split(":")
                i, j = int(si), int(sj)
                merged = rand_pos()
                outside = rand_pos()
                params[f"k{i}"] = merged
                params[f"k{j}"] = merged
                params[f"m{i}_{j}"] = merged
                for (l, m) in pairs:
                    if (l, m) != (i, j):
                        params[f"m{l}_{m}"] = outside
        yield t, kind, params


def _sweep_tuple(built: BuiltScenario, index: int, kind: str, params: dict) -> dict:
    spec = built.spec
    names = _block_names(built.layout.partition)
    blocks = tuple((built.named[n], params[n]) for n in names)
    operator = metrics.metric_from_blocks(built.algebra, BlockSpec(blocks))
    strategy = go.SamplingStrategy(seed=spec.seed * 100003 + index, random_count=spec.samples)
    kprime = metrics.isometry_subalgebra(operator)
    verdict = go.go_verdict(operator, kprime, strategy)
    dazi = metrics.dazi_structure_check(operator, seed=spec.seed)
    agree = (not verdict.disproved) == bool(dazi.verdict)
    record = {
        "index": index, "kind": kind,
        "params": {n: encode_fraction(params[n]) for n in names},
        "kprime_dim": kprime.dim,
        "go": verdict.kind, "dazi": bool(dazi.verdict), "agree": agree,
        "samples": verdict.samples,
        "counterexample": None,
        "normalizer_equivariant": None,
        "split_ok": None,
    }
    if verdict.counterexample is not None:
        record["counterexample"] = {
            "label": verdict.counterexample_label,
            "direction": encode_vector(verdict.counterexample.direction),
            "rank_a": verdict.counterexample.rank_a,
            "rank_ab": verdict.counterexample.rank_ab,
        }
    else:
        # normalizer equivariance over both the partition subgroup and the
        # isometry subalgebra, plus the splitting of the restriction blocks
        ne_sub = go.normalizer_equivariance_check(operator, built.subgroup, seed=spec.seed)
        ne_iso = go.normalizer_equivariance_check(operator, kprime, seed=spec.seed)
        record["normalizer_equivariant"] = bool(ne_sub.ok and ne_iso.ok)
        split = go.split_check(operator, kprime, strategy, seed=spec.seed)
        record["split_ok"] = bool(split.ok)
    return record


def _check_sweep(built: BuiltScenario, rep: Report, workers: int = 1, **_):
    spec = built.spec
    if built.layout is None:
        raise ContractViolation("equivalence sweep needs a partition subgroup")
    count = int(spec.metric["grid"]["tuples"]) if spec.metric and "grid" in spec.metric else 200
    jobs = list(grid_parameter_tuples(built.layout.partition, count, spec.seed))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda job: _sweep_tuple(built, *job), jobs))
    else:
        results = [_sweep_tuple(built, t, kind, params) for t, kind, params in jobs]
    results.sort(key=lambda r: r["index"])
    disagreements = sum(1 for r in results if not r["agree"])
    rep.add({
        "record": "check", "name": "sweep", "verdict": disagreements == 0,
        "negative": disagreements != 0,
        "partition": list(built.layout.partition),
        "count": count, "disagreements": disagreements,
        "not_disproved": sum(1 for r in results if r["go"] == "NotDisproved"),
        "tuples": results,
    })


_CHECKS = {
    "validate": _check_validate,
    "regular": _check_regular,
    "weakly-regular": _check_weakly_regular,
    "equivariance": _check_equivariance,
    "go": _check_go,
    "natred": _check_natred,
    "dazi": _check_dazi,
    "split": _check_split,
    "sweep": _check_sweep,
}

ALL_CHECKS = ("validate", "regular", "weakly-regular", "equivariance",
              "go", "natred", "dazi", "split")


# ---------------------------------------------------------------------------
# the catalog
# ---------------------------------------------------------------------------

def _so5_table() -> str:
    return serialize_structure_table(build_classical("so", 5))


def scenario_catalog() -> dict[str, ScenarioSpec]:
    """Named scenarios reproducing the built-in case studies."""
    catalog = {}
    for name, n, partition in (("so6-222-grid", 6, (2, 2, 2)),
                               ("so7-223-grid", 7, (2, 2, 3)),
                               ("so8-233-grid", 8, (2, 3, 3))):
        catalog[name] = ScenarioSpec(
            name=name, algebra={"family": "so", "n": n},
            subgroup={"partition": list(partition)},
            metric={"grid": {"tuples": 200}},
            checks=("validate", "regular", "weakly-regular", "sweep"),
            samples=24)
    catalog["so9-333-regularity"] = ScenarioSpec(
        name="so9-333-regularity", algebra={"family": "so", "n": 9},
        subgroup={"partition": [3, 3, 3]},
        checks=("validate", "regular", "weakly-regular"))
    catalog["so12-partition4-genmet1"] = ScenarioSpec(
        name="so12-partition4-genmet1", algebra={"family": "so", "n": 12},
        subgroup={"partition": [3, 3, 3, 3]},
        metric={"params": ["1", "2", "3", "4", "5/2", "7/2", "9/2", "11/2", "13/2", "15/2"]},
        checks=("validate", "regular", "weakly-regular", "equivariance", "go",
                "natred", "dazi", "split"),
        samples=16)
    catalog["su3-torus-flag"] = ScenarioSpec(
        name="su3-torus-flag", algebra={"family": "su", "n": 3},
        subgroup={"kind": "cartan-diagonal"},
        metric={"flaggrid": {"tuples": 24}},
        checks=("validate", "flag-sweep"), samples=16)
    catalog["triple-shape-demo"] = ScenarioSpec(
        name="triple-shape-demo", algebra={"table": _so5_table()},
        subgroup={"chain": {"inner": [0, 1, 4], "outer": [0, 1, 2, 4, 5, 7]}},
        metric={"triple": {"x": "1/2", "y": "2"}},
        checks=("validate", "regular", "weakly-regular", "equivariance", "go",
                "natred", "dazi", "split"),
        samples=16)
    return catalog


# the flag sweep is scenario-specific: tuples of (center block, root scalars)
def _flag_tuples(count: int, seed: int):
    for t in range(count):
        rng = random.Random(f"flag:{seed}:{t}")

        def rand_pos():
            return Fraction(rng.randint(1, 9), rng.randint(1, 3))

        a = rand_pos()
        b = Fraction(rng.randint(-2, 2), 4)
        c = rand_pos() + b * b / a  # Schur bound keeps the block positive definite
        mus = [rand_pos() for _ in range(3)]
        if t % 2 == 1:
            mus = [mus[0]] * 3
        yield t, (a, b, c), mus


def _check_flag_sweep(built: BuiltScenario, rep: Report, **_):
    spec = built.spec
    torus = built.named["t"]
    root_pieces = [built.named[f"r{i}"] for i in (1, 2, 3)]
    count = int(spec.metric["flaggrid"]["tuples"])
    results = []
    for t, (a, b, c), mus in _flag_tuples(count, spec.seed):
        center = (torus, arith.qarray([[a, b], [b, c]]))
        blocks = tuple((piece, mu) for piece, mu in zip(root_pieces, mus))
        operator = metrics.metric_from_blocks(built.algebra, BlockSpec(blocks, center))
        strategy = go.SamplingStrategy(seed=spec.seed * 100003 + t, random_count=spec.samples)
        kprime = metrics.isometry_subalgebra(operator)
        verdict = go.go_verdict(operator, kprime, strategy)
        dazi = metrics.dazi_structure_check(operator, seed=spec.seed)
        agree = (not verdict.disproved) == bool(dazi.verdict)
        record = {
            "index": t,
            "center": [encode_fraction(a), encode_fraction(b), encode_fraction(c)],
            "root_scalars": [encode_fraction(m) for m in mus],
            "kprime_dim": kprime.dim, "go": verdict.kind, "dazi": bool(dazi.verdict),
            "agree": agree, "counterexample": None,
        }
        if verdict.counterexample is not None:
            record["counterexample"] = {
                "label": verdict.counterexample_label,
                "direction": encode_vector(verdict.counterexample.direction),
                "rank_a": verdict.counterexample.rank_a,
                "rank_ab": verdict.counterexample.rank_ab,
            }
        results.append(record)
    disagreements = sum(1 for r in results if not r["agree"])
    rep.add({
        "record": "check", "name": "sweep", "verdict": disagreements == 0,
        "negative": disagreements != 0, "count": count,
        "disagreements": disagreements, "flag": True,
        "not_disproved": sum(1 for r in results if r["go"] == "NotDisproved"),
        "tuples": results,
    })


_CHECKS["flag-sweep"] = _check_flag_sweep
CHECK_ORDER = CHECK_ORDER + ("flag-sweep",)


# ---------------------------------------------------------------------------
# replay
# ---------------------------------------------------------------------------

def replay_report(text: str) -> dict:
    """Re-verify every embedded exact certificate of a machine report.

    Counterexamples are replayed through the rank-gap check and witnesses
    through the defining identity; returns counts and a ``verified`` flag.
    """
    from .report import parse_machine
    header, records, _summary = parse_machine(text)
    spec = ScenarioSpec.from_obj(header["spec"])
    built = build_scenario(spec)
    verified = 0
    failed = 0
    for record in records:
        name = record.get("name")
        if name in ("go", "go-isometry"):
            operator = _require_metric(built)
            subgroup = built.subgroup if record["with_respect_to"] == "subgroup" \
                else metrics.isometry_subalgebra(operator)
            ok, bad = _replay_go_record(operator, subgroup, record)
            verified += ok
            failed += bad
        elif name == "sweep" and not record.get("flag"):
            names = _block_names(built.layout.partition)
            for tup in record["tuples"]:
                if tup["counterexample"] is None:
                    continue
                params = {n: Fraction(v) for n, v in tup["params"].items()}
                blocks = tuple((built.named[n], params[n]) for n in names)
                operator = metrics.metric_from_blocks(built.algebra, BlockSpec(blocks))
                kprime = metrics.isometry_subalgebra(operator)
                ok, bad = _replay_counterexample(operator, kprime, tup["counterexample"])
                verified += ok
                failed += bad
    return {"verified": verified, "failed": failed, "ok": failed == 0}


def _replay_go_record(operator, subgroup, record) -> tuple[int, int]:
    from .report import decode_vector
    verified = failed = 0
    if record.get("counterexample"):
        ok, bad = _replay_counterexample(operator, subgroup, record["counterexample"])
        verified += ok
        failed += bad
    for cert in record.get("certificates", []):
        certificate = go.GoCertificate(direction=decode_vector(cert["direction"]),
                                       witness=decode_vector(cert["witness"]))
        if go.replay_certificate(operator, certificate, subgroup):
            verified += 1
        else:
            failed += 1
    return verified, failed


def _replay_counterexample(operator, subgroup, payload) -> tuple[int, int]:
    from .report import decode_vector
    counterexample = go.Unsolvable(direction=decode_vector(payload["direction"]),
                                   rank_a=int(payload["rank_a"]),
                                   rank_ab=int(payload["rank_ab"]))
    if go.replay_counterexample(operator, subgroup, counterexample):
        return 1, 0
    return 0, 1
