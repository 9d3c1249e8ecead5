"""
Groupoids and their two model algebras.

The function algebra carries the coproduct dual to composition, the
convolution algebra the coproduct λ_p -> λ_p⊗λ_p. Both come with the known
answers for E, G1, G2, F1..F4, ε and S, which the pipeline compares its own
results against. Infinite presets are directed unions of finite windows and
are verified window by window.

Convention: s(p) is the right unit (p·s(p) = p), t(p) the left unit, and
p·q is defined when s(p) = t(q).
"""

import logging
import random
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .classify import Classification
from .coalg import CoproductData
from .config import Settings
from .errors import BadParameter, UnknownPreset, WindowInvalid
from .exactla import ONE, Matrix, Vector
from .fdalg import Algebra, StarStructure
from .legs import identity
from .pipeline import ModelOracles, Presentation, run_verification
from .report import CheckResult, Diagnostics, ReportBuilder, VerificationReport, compare, failed, passed, verdict

logger = logging.getLogger(__name__)

MODELS = ("function", "convolution")


@dataclass(frozen=True, eq=False)
class FiniteGroupoid:
    """
    A finite groupoid given by tables. `compose` holds exactly the
    composable pairs.
    """

    morphisms: Tuple[str, ...]
    source: Dict[str, str]
    target: Dict[str, str]
    compose: Dict[Tuple[str, str], str]
    inverse: Dict[str, str]
    name: str = ""

    @classmethod
    def from_rules(
        cls,
        morphisms: Sequence[str],
        source: Callable[[str], str],
        target: Callable[[str], str],
        compose: Callable[[str, str], Optional[str]],
        inverse: Callable[[str], str],
        name: str = "",
    ) -> "FiniteGroupoid":
        table = {}
        for p in morphisms:
            for q in morphisms:
                r = compose(p, q)
                if r is not None:
                    table[(p, q)] = r
        return cls(
            tuple(morphisms),
            {p: source(p) for p in morphisms},
            {p: target(p) for p in morphisms},
            table,
            {p: inverse(p) for p in morphisms},
            name,
        )

    @cached_property
    def index(self) -> Dict[str, int]:
        return {p: k for k, p in enumerate(self.morphisms)}

    @cached_property
    def units(self) -> Tuple[str, ...]:
        return tuple(p for p in self.morphisms if self.source[p] == p and self.target[p] == p)

    def __len__(self) -> int:
        return len(self.morphisms)

    def product(self, p: str, q: str) -> Optional[str]:
        return self.compose.get((p, q))

    def restrict(self, morphisms: Sequence[str]) -> "FiniteGroupoid":
        """The subgroupoid on `morphisms`, kept in the order given."""
        keep = set(morphisms)
        return FiniteGroupoid(
            tuple(morphisms),
            {p: self.source[p] for p in morphisms},
            {p: self.target[p] for p in morphisms},
            {pq: r for pq, r in self.compose.items() if pq[0] in keep and pq[1] in keep},
            {p: self.inverse[p] for p in morphisms},
            self.name,
        )


def validate_groupoid(g: FiniteGroupoid) -> Diagnostics:
    """Check every groupoid axiom exhaustively; the first violation is reported."""
    problem = _first_violation(g)
    if problem is None:
        return [passed("groupoid-valid", f"{len(g)} morphisms, {len(g.units)} units")]
    detail, where = problem
    return [failed("groupoid-valid", detail, {"morphisms": where})]


def _first_violation(g: FiniteGroupoid) -> Optional[Tuple[str, str]]:
    known = set(g.morphisms)
    for p in g.morphisms:
        for table, name in ((g.source, "source"), (g.target, "target"), (g.inverse, "inverse")):
            if table.get(p) not in known:
                return f"{name} of {p} is not a morphism", p
    for p in g.morphisms:
        for u in (g.source[p], g.target[p]):
            if g.source[u] != u or g.target[u] != u:
                return f"{u} is a source or target but not a unit", p
        if g.product(p, g.source[p]) != p or g.product(g.target[p], p) != p:
            return "unit law fails", p
    for (p, q), r in g.compose.items():
        if r not in known:
            return f"{p}·{q} is not a morphism", f"{p}, {q}"
    for p in g.morphisms:
        for q in g.morphisms:
            defined = (p, q) in g.compose
            if defined != (g.source[p] == g.target[q]):
                return "composition is not defined exactly when s(p) = t(q)", f"{p}, {q}"
            if defined:
                pq = g.compose[(p, q)]
                if g.source[pq] != g.source[q] or g.target[pq] != g.target[p]:
                    return "s(pq) = s(q), t(pq) = t(p) fails", f"{p}, {q}"
    for (p, q), pq in g.compose.items():
        for x in g.morphisms:
            if g.source[q] == g.target[x] and g.product(pq, x) != g.product(p, g.product(q, x)):
                return "composition is not associative", f"{p}, {q}, {x}"
    for p in g.morphisms:
        inv = g.inverse[p]
        if g.product(inv, p) != g.source[p] or g.product(p, inv) != g.target[p]:
            return "inverse law fails", p
        if g.inverse[inv] != p:
            return "inverse is not an involution", p
    return None


@dataclass(frozen=True, eq=False)
class LazyGroupoid:
    """
    An infinite groupoid given by rules on morphism ids, exhausted by the
    nested finite windows window(1) ⊆ window(2) ⊆ ...
    """

    name: str
    source: Callable[[str], str]
    target: Callable[[str], str]
    compose: Callable[[str, str], Optional[str]]
    inverse: Callable[[str], str]
    window_morphisms: Callable[[int], List[str]]

    def window(self, k: int) -> FiniteGroupoid:
        if k < 1:
            raise WindowInvalid(f"window size must be positive, got {k}")
        g = FiniteGroupoid.from_rules(
            self.window_morphisms(k), self.source, self.target, self.compose, self.inverse, f"{self.name}[{k}]"
        )
        bad = validate_groupoid(g)[0]
        if not bad.passed:
            raise WindowInvalid(f"window {k} of {self.name}: {bad.detail}")
        return g


Groupoid = FiniteGroupoid | LazyGroupoid


# Presets


@dataclass(frozen=True)
class _Rules:
    """Source, target, composition and inverse as functions of ids."""

    source: Callable[[str], str]
    target: Callable[[str], str]
    compose: Callable[[str, str], Optional[str]]
    inverse: Callable[[str], str]
    morphisms: Callable[[int], List[str]]


_PAIR = re.compile(r"^\((\d+),(\d+)\)$")
_CYCLIC = re.compile(r"^g\^(\d+)@unit_(\d+)$")


def _pair_rules() -> _Rules:
    def parts(p: str) -> Tuple[int, int]:
        m = _PAIR.match(p)
        return int(m.group(1)), int(m.group(2))

    def source(p: str) -> str:
        _, j = parts(p)
        return f"({j},{j})"

    def target(p: str) -> str:
        i, _ = parts(p)
        return f"({i},{i})"

    def compose(p: str, q: str) -> Optional[str]:
        (i, j), (k, l) = parts(p), parts(q)
        return f"({i},{l})" if j == k else None

    def inverse(p: str) -> str:
        i, j = parts(p)
        return f"({j},{i})"

    def morphisms(units: int) -> List[str]:
        return [f"({i},{j})" for i in range(units) for j in range(units)]

    return _Rules(source, target, compose, inverse, morphisms)


def _cyclic_rules(order: int) -> _Rules:
    def parts(p: str) -> Tuple[int, int]:
        m = _CYCLIC.match(p)
        return int(m.group(1)), int(m.group(2))

    def unit(p: str) -> str:
        return f"g^0@unit_{parts(p)[1]}"

    def compose(p: str, q: str) -> Optional[str]:
        (a, u), (b, v) = parts(p), parts(q)
        return f"g^{(a + b) % order}@unit_{u}" if u == v else None

    def inverse(p: str) -> str:
        a, u = parts(p)
        return f"g^{(-a) % order}@unit_{u}"

    def morphisms(copies: int) -> List[str]:
        return [f"g^{a}@unit_{u}" for u in range(copies) for a in range(order)]

    return _Rules(unit, unit, compose, inverse, morphisms)


def _positive(text: str, what: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise BadParameter(f"{what} must be an integer, got {text!r}")
    if value < 1:
        raise BadParameter(f"{what} must be at least 1, got {value}")
    return value


def _component(name: str) -> Tuple[_Rules, Optional[int]]:
    """Rules of one preset and its size, None for the infinite ones."""
    parts = name.split(":")
    match parts:
        case ["pair", "inf"]:
            return _pair_rules(), None
        case ["pair", n]:
            return _pair_rules(), _positive(n, "pair size")
        case ["group", "cyclic", n]:
            return _cyclic_rules(_positive(n, "group order")), 1
        case ["bundle", "cyclic", n, "inf"]:
            return _cyclic_rules(_positive(n, "group order")), None
        case ["bundle", "cyclic", n, k]:
            return _cyclic_rules(_positive(n, "group order")), _positive(k, "number of copies")
        case _:
            raise UnknownPreset(
                f"unknown preset {name!r}; expected pair:N, group:cyclic:N, bundle:cyclic:N:k, "
                "pair:inf, bundle:cyclic:N:inf or a '+' union"
            )


def _union_rules(components: List[Tuple[_Rules, Optional[int]]]) -> _Rules:
    """Disjoint union; ids of component c are prefixed "c|"."""

    def split(p: str) -> Tuple[_Rules, str, str]:
        c, _, rest = p.partition("|")
        return components[int(c)][0], c, rest

    def lift(fn: Callable[[_Rules], Callable[[str], str]]) -> Callable[[str], str]:
        def apply(p: str) -> str:
            rules, c, rest = split(p)
            return f"{c}|{fn(rules)(rest)}"

        return apply

    def compose(p: str, q: str) -> Optional[str]:
        rules, c, x = split(p)
        _, d, y = split(q)
        if c != d:
            return None
        r = rules.compose(x, y)
        return None if r is None else f"{c}|{r}"

    def morphisms(k: int) -> List[str]:
        out = []
        for c, (rules, size) in enumerate(components):
            out.extend(f"{c}|{p}" for p in rules.morphisms(k if size is None else size))
        return out

    return _Rules(
        lift(lambda r: r.source), lift(lambda r: r.target), compose, lift(lambda r: r.inverse), morphisms
    )


def preset(name: str) -> Groupoid:
    """
    Build a preset groupoid.

    Args:
        name (str): pair:N, group:cyclic:N, bundle:cyclic:N:k, pair:inf,
            bundle:cyclic:N:inf, or several of these joined by "+".

    Returns:
        Groupoid: A validated FiniteGroupoid, or a LazyGroupoid when any
            component is infinite.

    Raises:
        UnknownPreset: If a component is not recognised.
        BadParameter: If a size is not a positive integer.
    """
    names = name.split("+")
    components = [_component(part.strip()) for part in names]
    if len(components) == 1:
        rules, size = components[0]
    else:
        rules, size = _union_rules(components), (0 if all(s is not None for _, s in components) else None)
    if size is None:
        logger.debug("preset %s is infinite, windows are built on demand", name)
        return LazyGroupoid(name, rules.source, rules.target, rules.compose, rules.inverse, rules.morphisms)
    g = FiniteGroupoid.from_rules(rules.morphisms(size), rules.source, rules.target, rules.compose, rules.inverse, name)
    bad = validate_groupoid(g)[0]
    if not bad.passed:
        raise BadParameter(f"preset {name} is not a groupoid: {bad.detail}")
    return g


# Model algebras


def _diagonal(g: FiniteGroupoid, holds: Callable[[str, str], bool]) -> Matrix:
    """The multiplication operator on A⊗A by the indicator of `holds`."""
    return Matrix.diagonal([ONE if holds(p, q) else 0 for p in g.morphisms for q in g.morphisms])


def _inversion(g: FiniteGroupoid) -> Matrix:
    return Matrix.permutation([g.index[g.inverse[p]] for p in g.morphisms])


def _t_matrix(g: FiniteGroupoid, images: Dict[Tuple[str, str], Tuple[str, str]]) -> Matrix:
    """Matrix sending the basis pair (p, q) to the basis pair images[(p, q)]."""
    n, idx = len(g), g.index
    return Matrix.from_entries(
        n * n, n * n, [(idx[x] * n + idx[y], idx[p] * n + idx[q], ONE) for (p, q), (x, y) in images.items()]
    )


def function_algebra(g: FiniteGroupoid) -> Presentation:
    """
    Functions on g with pointwise product and Δ(f)(p, q) = f(pq).

    T1(δ_r⊗δ_q) = δ_{rq⁻¹}⊗δ_q when s(r) = s(q), T2(δ_p⊗δ_r) = δ_p⊗δ_{p⁻¹r}
    when t(p) = t(r); the algebra is commutative so T3 = T1 and T4 = T2.
    """
    n, s, t, inv = len(g), g.source, g.target, g.inverse
    algebra = Algebra.from_structure(n, [(i, i, i, ONE) for i in range(n)], list(g.morphisms), f"C({g.name})")
    t1 = _t_matrix(g, {(r, q): (g.product(r, inv[q]), q) for r in g.morphisms for q in g.morphisms if s[r] == s[q]})
    t2 = _t_matrix(g, {(p, r): (p, g.product(inv[p], r)) for p in g.morphisms for r in g.morphisms if t[p] == t[r]})
    e = _diagonal(g, lambda p, q: s[p] == t[q])
    f1 = _diagonal(g, lambda p, q: s[p] == s[q])
    f2 = _diagonal(g, lambda p, q: t[p] == t[q])
    oracles = ModelOracles(
        E_left=e,
        E_right=e,
        G1=f1,
        G2=f2,
        F={"F1": (f1, f1), "F2": (f2, f2), "F3": (f1, f1), "F4": (f2, f2)},
        S=_inversion(g),
        counit={g.index[u]: ONE for u in g.units},
    )
    return Presentation(
        CoproductData(algebra, t1, t2, t1, t2),
        star=StarStructure(algebra, identity(n)),
        oracles=oracles,
    )


def convolution_algebra(g: FiniteGroupoid) -> Presentation:
    """
    The groupoid algebra: λ_pλ_q = λ_{pq} when defined, else 0, with
    Δ(λ_p) = λ_p⊗λ_p and λ_p* = λ_{p⁻¹}.
    """
    n, s, t, idx = len(g), g.source, g.target, g.index
    structure = [(idx[p], idx[q], idx[r], ONE) for (p, q), r in g.compose.items()]
    algebra = Algebra.from_structure(n, structure, list(g.morphisms), f"C[{g.name}]")
    pairs = [(p, q) for p in g.morphisms for q in g.morphisms]
    t1 = _t_matrix(g, {(p, q): (p, g.product(p, q)) for p, q in pairs if s[p] == t[q]})
    t2 = _t_matrix(g, {(p, q): (g.product(p, q), q) for p, q in pairs if s[p] == t[q]})
    t3 = _t_matrix(g, {(p, q): (p, g.product(q, p)) for p, q in pairs if s[q] == t[p]})
    t4 = _t_matrix(g, {(p, q): (g.product(q, p), q) for p, q in pairs if s[q] == t[p]})
    e_left = _diagonal(g, lambda p, q: t[p] == t[q])
    e_right = _diagonal(g, lambda p, q: s[p] == s[q])
    g_map = _diagonal(g, lambda p, q: s[p] == t[q])
    inversion = _inversion(g)
    oracles = ModelOracles(
        E_left=e_left,
        E_right=e_right,
        G1=g_map,
        G2=g_map,
        F={name: (e_left, e_right) for name in ("F1", "F2", "F3", "F4")},
        S=inversion,
        counit={k: ONE for k in range(n)},
    )
    return Presentation(
        CoproductData(algebra, t1, t2, t3, t4),
        star=StarStructure(algebra, inversion),
        oracles=oracles,
    )


def model_presentation(g: FiniteGroupoid, model: str) -> Presentation:
    match model:
        case "function":
            return function_algebra(g)
        case "convolution":
            return convolution_algebra(g)
        case _:
            raise BadParameter(f"unknown model {model!r}, expected one of {', '.join(MODELS)}")


def _delta(c: CoproductData) -> Matrix:
    """Δ as a map A -> A⊗A for a unital algebra: Δ(a) = T1(a⊗1)."""
    n, unit = c.n, c.parent.unit
    return Matrix.from_columns(n * n, [c.T1.apply({a * n + k: v for k, v in unit.items()}) for a in range(n)])


def check_duality_pairing(g: FiniteGroupoid) -> Diagnostics:
    """
    With ⟨δ_p, λ_q⟩ = [p = q] the pairing matrix is the identity, so the
    pairing identities become transposition identities between the models.
    """
    fun_model, conv_model = function_algebra(g), convolution_algebra(g)
    fun, conv = fun_model.coproduct, conv_model.coproduct
    return [
        compare(
            "ex-1.16-pairing",
            [
                ("⟨fg, λ_p⟩ = ⟨f⊗g, Δ(λ_p)⟩", fun.parent.mult.transpose(), _delta(conv)),
                ("⟨Δ(f), λ_p⊗λ_q⟩ = ⟨f, λ_pλ_q⟩", _delta(fun), conv.parent.mult.transpose()),
                ("⟨S(f), λ_p⟩ = ⟨f, S(λ_p)⟩", fun_model.oracles.S, conv_model.oracles.S.transpose()),
            ],
        )
    ]


# Infinite models


@dataclass
class WindowedRun:
    report: VerificationReport
    classification: Classification
    windows: Dict[int, Classification] = field(default_factory=dict)


def sample_infinite(
    g: LazyGroupoid,
    model: str,
    k_max: int,
    seed: int = 0,
    settings: Optional[Settings] = None,
    path: str = "def114",
) -> WindowedRun:
    """
    Verify windows 1..k_max exhaustively and certify the properties of the
    infinite algebra that the windows witness.

    Raises:
        WindowInvalid: If a window fails the groupoid axioms.
    """
    settings = settings or Settings()
    builder = ReportBuilder()
    summary = Classification()
    windows: Dict[int, Classification] = {}
    runs = {}
    groupoids: Dict[int, FiniteGroupoid] = {}
    for k in range(1, k_max + 1):
        window = g.window(k)
        groupoids[k] = window
        logger.info("window %d of %s: %d morphisms", k, g.name, len(window))
        run = run_verification(model_presentation(window, model), settings, path, prefix=f"window-{k}/")
        run.builder.add(validate_groupoid(window))
        builder.absorb(_namespaced(run.builder, k))
        runs[k] = run
        windows[k] = run.classification
    if k_max == 0:
        return WindowedRun(VerificationReport.from_builder(builder, paths=[path], seed=seed), summary)
    builder.add(_window_consistency(groupoids, runs))
    builder.add(_non_unital(groupoids, runs, model))
    builder.add(_local_units(groupoids[k_max], runs[k_max], model, seed))
    summary.wmha = all(c.wmha for c in windows.values())
    summary.regular = all(c.regular for c in windows.values())
    stars = [c.star_compatible for c in windows.values()]
    summary.star_compatible = None if any(x is None for x in stars) else all(stars)
    summary.reasons["weak_hopf"] = "non-unital"
    flags = summary.to_json()
    flags["windows"] = {str(k): c.to_json() for k, c in windows.items()}
    report = VerificationReport.from_builder(builder, classification=flags, paths=[path], seed=seed)
    return WindowedRun(report, summary, windows)


def _namespaced(window_builder: ReportBuilder, k: int) -> ReportBuilder:
    out = ReportBuilder()
    for result in window_builder.results():
        out.add(result)
    out.witnesses[f"window-{k}"] = dict(window_builder.witnesses)
    return out


def _window_consistency(groupoids: Dict[int, FiniteGroupoid], runs) -> CheckResult:
    """Witnesses of window k restricted to window k-1 equal those of window k-1."""
    for k in range(2, len(groupoids) + 1):
        small, big = groupoids[k - 1], groupoids[k]
        rows = [big.index[p] for p in small.morphisms]
        pairs = [i * len(big) + j for i in rows for j in rows]
        a, b = runs[k - 1], runs[k]
        if any(r.state.E is None or r.antipode is None or r.antipode.S_matrix is None for r in (a, b)):
            return failed("window-consistency", f"window {k - 1} or {k} has no witnesses")
        restricted = (
            b.state.E.left.extract(pairs, pairs),
            b.state.E.right.extract(pairs, pairs),
            b.antipode.S_matrix.extract(rows, rows),
        )
        expected = (a.state.E.left, a.state.E.right, a.antipode.S_matrix)
        if restricted != expected:
            return failed("window-consistency", f"witnesses of window {k} do not restrict to window {k - 1}")
        counit = {i: v for i, v in enumerate(b.state.counit.functional.get(r) for r in rows) if v}
        if counit != a.state.counit.functional:
            return failed("window-consistency", f"counit of window {k} does not restrict to window {k - 1}")
    return passed("window-consistency", f"E, S and ε restrict across {len(groupoids)} windows")


def _model_unit(g: FiniteGroupoid, model: str) -> Vector:
    """Σ_p δ_p for functions, Σ_e λ_e for convolution."""
    if model == "function":
        return {g.index[p]: ONE for p in g.morphisms}
    return {g.index[u]: ONE for u in g.units}


def _non_unital(groupoids: Dict[int, FiniteGroupoid], runs, model: str) -> CheckResult:
    """
    A unit of the union would restrict to the unit of every window; the
    window units have support growing with k, so no finitely supported
    element is a unit.
    """
    supports = []
    for k, g in groupoids.items():
        unit = runs[k].state.coproduct.parent.unit
        if unit != _model_unit(g, model):
            return failed("non-unital", f"unit of window {k} is not the model unit")
        supports.append(len(unit))
    growing = all(x < y for x, y in zip(supports, supports[1:]))
    if len(supports) == 1:
        return passed("non-unital", f"window unit has support {supports[0]}; one window cannot show growth")
    return verdict("non-unital", growing, f"window unit supports {supports} grow with the window")


def _local_units(g: FiniteGroupoid, run, model: str, seed: int, trials: int = 3) -> CheckResult:
    """Sampled finite sets F have a unit: the indicator of the units F touches."""
    rng = random.Random(seed)
    algebra = run.state.coproduct.parent
    for _ in range(trials):
        sample = rng.sample(list(g.morphisms), min(3, len(g)))
        units = {g.source[p] for p in sample} | {g.target[p] for p in sample}
        if model == "function":
            support = [q for q in g.morphisms if g.source[q] in units and g.target[q] in units]
        else:
            support = sorted(units, key=g.index.get)
        e = {g.index[q]: ONE for q in support}
        for p in sample:
            x = {g.index[p]: ONE}
            if algebra.multiply_vectors(e, x) != x or algebra.multiply_vectors(x, e) != x:
                return failed("local-units", f"local unit for {sorted(sample)} fails at {p}")
    return passed("local-units", f"{trials} sampled sets of seed {seed} have local units")
