"""Recipe files: a declarative description of one fiducial vector.

A recipe lists the number-field generators (square roots, real roots of
small polynomials, roots of unity), derived quantities (explicit or
fixed by a product constraint), the ``d`` components, the normalising
factor, and the identities the vector is claimed to satisfy.  The line
grammar is documented in ``docs/recipe_format.md``; :func:`parse_recipe`
validates everything it can without evaluating numbers, and
:func:`serialize` writes a recipe back in a form that parses to an equal
object.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .expr import Expression, ExpressionError, Num, Parser, parse_expression, symbols, to_text

SQRT, POLYROOT, ROOTOFUNITY = "sqrt", "polyroot", "rootofunity"
SEARCH = "search"


class RecipeError(ValueError):
    """Invalid recipe text; ``line``/``col`` are 1-based when known."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {col}" if col is not None else "") + ": "
        super().__init__(where + message)
        self.line = line
        self.col = col


class RecipeSyntaxError(RecipeError):
    pass


class UnknownSymbol(RecipeError):
    pass


class NonTriangularConstraints(RecipeError):
    pass


class LayoutMismatch(RecipeError):
    pass


@dataclass(frozen=True)
class GeneratorDef:
    """One field generator.

    ``kind`` is ``sqrt`` (``operand``; ``branch`` principal/negated),
    ``polyroot`` (ascending ``coeffs``; ``branch`` an ascending-root index
    or ``"search"``) or ``rootofunity`` (``root`` = (num, den) meaning
    exp(i*pi*num/den)).
    """

    name: str
    kind: str
    operand: Expression | None = None
    coeffs: tuple[Expression, ...] = ()
    root: tuple[int, int] | None = None
    branch: str | int = "principal"
    partner: str | None = None

    def dependencies(self) -> set[str]:
        if self.kind == SQRT:
            return set(symbols(self.operand))
        return {s for c in self.coeffs for s in symbols(c)}

    @property
    def is_search(self) -> bool:
        return self.kind == POLYROOT and self.branch == SEARCH


@dataclass(frozen=True)
class DerivedDef:
    """A derived quantity: explicit (``product`` empty) or solved from
    ``prod(product) = value`` for ``name``."""

    name: str
    value: Expression
    product: tuple[str, ...] = ()
    unit: bool = False

    @property
    def is_constraint(self) -> bool:
        return bool(self.product)

    def dependencies(self) -> set[str]:
        deps = set(symbols(self.value))
        deps.update(s for s in self.product if s != self.name)
        return deps


@dataclass(frozen=True)
class Relation:
    name: str
    lhs: Expression
    rhs: Expression


@dataclass(frozen=True)
class RatioPolynomial:
    """A polynomial (ascending integer coefficients) to be evaluated on
    every ordered ratio of the listed symbols; a report, not a claim."""

    name: str
    coeffs: tuple[int, ...]
    symbols: tuple[str, ...]


@dataclass(frozen=True)
class UnitCheck:
    """An element of the base quadratic field whose exact norm is checked."""

    name: str
    value: Expression


@dataclass(frozen=True)
class FiducialRecipe:
    label: str
    d: int
    layout: tuple[int, ...]
    generators: tuple[GeneratorDef, ...]
    derived: tuple[DerivedDef, ...]
    components: tuple[Expression, ...]
    norm: Expression
    norm_radicand: Expression | None = None
    relations: tuple[Relation, ...] = ()
    ratio_polynomials: tuple[RatioPolynomial, ...] = ()
    unit_checks: tuple[UnitCheck, ...] = ()
    templates: tuple[tuple[str, tuple[Expression, ...]], ...] = ()
    block_order: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()
    canonical_branches: tuple[tuple[str, int], ...] = field(default=(), compare=False)

    def generator(self, name: str) -> GeneratorDef:
        for g in self.generators:
            if g.name == name:
                return g
        raise KeyError(name)

    @property
    def search_generators(self) -> list[GeneratorDef]:
        return [g for g in self.generators if g.is_search]

    @property
    def base_generator(self) -> GeneratorDef | None:
        """The generator ``a = sqrt(D0)`` of the real quadratic base field."""
        for g in self.generators:
            if g.name == "a" and g.kind == SQRT:
                return g
        return None

    @property
    def D0(self) -> int | None:
        g = self.base_generator
        if g is None or not isinstance(g.operand, Num):
            return None
        return int(g.operand.value)

    @property
    def unit_claims(self) -> list[str]:
        return [x.name for x in self.derived if x.unit]

    def with_canonical_branches(self, branches: dict[str, int]) -> "FiducialRecipe":
        return replace(self, canonical_branches=tuple(sorted(branches.items())))


def validate_layout(d: int, layout: tuple[int, ...], line: int | None = None) -> None:
    """Layouts are ordered (p, 3, 4): an odd prime other than 3, then 3, then 4."""
    if math.prod(layout) != d:
        raise LayoutMismatch(f"layout {'x'.join(map(str, layout))} does not multiply to {d}", line)

    def rank(f):
        if f == 4:
            return 2
        if f == 3:
            return 1
        if f > 3 and f % 2 and all(f % q for q in range(3, math.isqrt(f) + 1, 2)):
            return 0
        raise LayoutMismatch(f"layout factor {f} is not 3, 4 or an odd prime", line)

    ranks = [rank(f) for f in layout]
    if ranks != sorted(set(ranks)) or len(set(ranks)) != len(ranks):
        raise LayoutMismatch("layout factors must appear in the order p, 3, 4, at most once each", line)


_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")
_LABEL = re.compile(r"[0-9]+[a-z]$")


def _check_name(name: str, line: int, col: int | None = None) -> str:
    if not _NAME.match(name):
        raise RecipeSyntaxError(f"invalid name {name!r}", line, col)
    return name


class _RecipeBuilder:
    def __init__(self):
        self.label = None
        self.d = None
        self.layout = None
        self.notes: list[str] = []
        self.generators: list[GeneratorDef] = []
        self.derived: list[DerivedDef] = []
        self.components: dict[int, Expression] = {}
        self.templates: dict[str, tuple[Expression, ...]] = {}
        self.block_order: list[str] = []
        self.norm = None
        self.norm_radicand = None
        self.relations: list[Relation] = []
        self.ratio_polynomials: list[RatioPolynomial] = []
        self.unit_checks: list[UnitCheck] = []
        self.uses: list[tuple[int, Expression]] = []  # checked at the end
        self.partner_refs: list[tuple[int, str]] = []

    @property
    def generator_names(self):
        return {g.name for g in self.generators}

    @property
    def defined(self):
        return self.generator_names | {x.name for x in self.derived}

    def require(self, names, allowed, line, what="symbol"):
        for s in names:
            if s not in allowed:
                raise UnknownSymbol(f"unknown {what} {s!r}", line)

    def new_name(self, name, line):
        if name in self.defined:
            raise RecipeSyntaxError(f"{name!r} is defined twice", line)
        return name


def _options(parser: Parser, line: int) -> list[str]:
    words = []
    while not parser.at_end():
        kind, value, col = parser.next()
        if kind not in ("name", "num"):
            raise RecipeSyntaxError(f"unexpected {value!r}", line, col)
        words.append(value)
    return words


def _parse_gen(b: _RecipeBuilder, text: str, offset: int, line: int) -> None:
    m = re.match(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*", text)
    if not m:
        raise RecipeSyntaxError("expected 'gen <name> = ...'", line, offset + 1)
    name = b.new_name(m.group(1), line)
    p = Parser(text[m.end():], offset + m.end())
    try:
        kind, value, col = p.next()
        if kind != "name" or value not in (SQRT, POLYROOT, ROOTOFUNITY):
            raise RecipeSyntaxError("generator must be sqrt(...), polyroot(...) or rootofunity(...)", line, col)
        p.expect("(")
        if value == ROOTOFUNITY:
            nums = []
            for i in range(2):
                sign = 1
                if p.peek[1] == "-":
                    p.next()
                    sign = -1
                k, v, c = p.next()
                if k != "num" or "." in v:
                    raise RecipeSyntaxError("rootofunity takes two integers", line, c)
                nums.append(sign * int(v))
                p.expect("," if i == 0 else ")")
            if nums[1] < 1:
                raise RecipeSyntaxError("rootofunity denominator must be positive", line)
            if len(_options(p, line)):
                raise RecipeSyntaxError("rootofunity takes no options", line)
            b.generators.append(GeneratorDef(name, ROOTOFUNITY, root=(nums[0], nums[1])))
            return
        exprs = [p.expression()]
        while p.peek[1] == ",":
            p.next()
            exprs.append(p.expression())
        p.expect(")")
    except ExpressionError as exc:
        raise RecipeSyntaxError(exc.message, line, exc.col) from None
    words = _options(p, line)
    branch: str | int = "principal" if value == SQRT else 0
    partner = None
    i = 0
    while i < len(words):
        w = words[i]
        if w == "partner" and i + 1 < len(words):
            partner = _check_name(words[i + 1], line)
            i += 2
        elif w == "branch" and i + 1 < len(words):
            opt = words[i + 1]
            if value == SQRT and opt in ("principal", "negated"):
                branch = opt
                i += 2
            elif value == POLYROOT and opt == SEARCH:
                branch = SEARCH
                i += 2
            elif value == POLYROOT and opt == "index" and i + 2 < len(words) and words[i + 2].isdigit():
                branch = int(words[i + 2])
                i += 3
            else:
                raise RecipeSyntaxError(f"bad branch specification for {value}", line)
        else:
            raise RecipeSyntaxError(f"unexpected option {w!r}", line)
    if value == SQRT:
        if len(exprs) != 1:
            raise RecipeSyntaxError("sqrt takes one argument", line)
        gen = GeneratorDef(name, SQRT, operand=exprs[0], branch=branch, partner=partner)
    else:
        if len(exprs) < 2:
            raise RecipeSyntaxError("polyroot needs at least two coefficients", line)
        if branch == SEARCH and len(exprs) < 3:
            raise RecipeSyntaxError("branch search needs a polynomial of degree >= 2", line)
        gen = GeneratorDef(name, POLYROOT, coeffs=tuple(exprs), branch=branch, partner=partner)
    # generators may only use earlier generators (tower order)
    b.require(gen.dependencies(), b.generator_names, line, "generator")
    if partner:
        b.partner_refs.append((line, partner))
    b.generators.append(gen)


def _parse_tail_expression(text: str, offset: int, line: int) -> tuple[Expression, list[str]]:
    p = Parser(text, offset)
    try:
        expr = p.expression()
    except ExpressionError as exc:
        raise RecipeSyntaxError(exc.message, line, exc.col) from None
    return expr, _options(p, line)


def _parse_norm(text: str, offset: int, line: int):
    """``<expr>``, ``sqrt(<expr>)`` or ``<prefactor>*sqrt(<expr>)``; the
    whole prefactor text multiplies the root."""
    m = re.fullmatch(r"\s*(?:(.*?)\*\s*)?sqrt\s*\((.*)\)\s*", text)
    if m is None:
        return parse_expression(text, offset), None
    radicand_at = offset + m.start(2)
    radicand = parse_expression(m.group(2), radicand_at)
    prefactor = Num(Fraction(1))
    if m.group(1) is not None:
        prefactor = parse_expression(m.group(1), offset)
    return prefactor, radicand


def parse_recipe(text: str) -> FiducialRecipe:
    """Parse and validate a recipe; raises a :class:`RecipeError` subclass."""
    b = _RecipeBuilder()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        if not body.strip():
            continue
        m = re.match(r"\s*(\S+)", body)
        keyword = m.group(1)
        rest_at = m.end()
        rest = body[rest_at:]
        if b.label is None and keyword != "entry":
            raise RecipeSyntaxError("recipe must start with an 'entry' line", lineno, 1)
        try:
            _dispatch(b, keyword, rest, rest_at, lineno)
        except ExpressionError as exc:
            raise RecipeSyntaxError(exc.message, lineno, exc.col) from None
    return _finish(b)


def _dispatch(b: _RecipeBuilder, keyword: str, rest: str, at: int, line: int) -> None:
    if keyword == "entry":
        m = re.fullmatch(r"\s+(\S+)\s+dim\s+(\d+)\s+layout\s+(\d+(?:x\d+)*)\s*", rest)
        if not m or b.label is not None:
            raise RecipeSyntaxError("expected 'entry <label> dim <d> layout <f1>x<f2>...'", line)
        if not _LABEL.match(m.group(1)):
            raise RecipeSyntaxError(f"invalid label {m.group(1)!r}", line)
        b.label, b.d = m.group(1), int(m.group(2))
        b.layout = tuple(int(f) for f in m.group(3).split("x"))
        validate_layout(b.d, b.layout, line)
    elif keyword == "note":
        b.notes.append(rest.strip())
    elif keyword == "gen":
        _parse_gen(b, rest, at, line)
    elif keyword == "let":
        m = re.match(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*=", rest)
        if not m:
            raise RecipeSyntaxError("expected 'let <name> = <expr>'", line)
        name = b.new_name(m.group(1), line)
        expr, opts = _parse_tail_expression(rest[m.end():], at + m.end(), line)
        if opts not in ([], ["unit"]):
            raise RecipeSyntaxError(f"unexpected {' '.join(opts)!r}", line)
        b.require(symbols(expr), b.defined, line)
        b.derived.append(DerivedDef(name, expr, unit=bool(opts)))
    elif keyword == "constraint":
        m = re.match(r"\s*([A-Za-z_][A-Za-z0-9_]*(?:\s*\*\s*[A-Za-z_][A-Za-z0-9_]*)+)\s*=", rest)
        if not m:
            raise RecipeSyntaxError("expected 'constraint <n1>*<n2>*... = <expr> solve <n>'", line)
        product = tuple(s.strip() for s in m.group(1).split("*"))
        expr, opts = _parse_tail_expression(rest[m.end():], at + m.end(), line)
        if len(opts) not in (2, 3) or opts[0] != "solve" or (len(opts) == 3 and opts[2] != "unit"):
            raise RecipeSyntaxError("constraint must end with 'solve <name> [unit]'", line)
        target = opts[1]
        if target not in product:
            raise NonTriangularConstraints(f"solve target {target!r} is not in the product", line)
        undefined = [s for s in product if s not in b.defined]
        if undefined != [target] or product.count(target) != 1:
            raise NonTriangularConstraints(
                f"constraint must leave exactly one new unknown ({target!r}); undefined: {undefined}", line
            )
        b.require(symbols(expr), b.defined, line)
        b.derived.append(DerivedDef(target, expr, product=product, unit=len(opts) == 3))
    elif keyword == "component":
        m = re.match(r"\s*(\d+)\s*=", rest)
        if not m:
            raise RecipeSyntaxError("expected 'component <index> = <expr>'", line)
        index = int(m.group(1))
        if index in b.components:
            raise LayoutMismatch(f"component {index} given twice", line)
        b.components[index] = parse_expression(rest[m.end():], at + m.end())
        b.uses.append((line, b.components[index]))
    elif keyword == "block":
        m = re.match(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*=", rest)
        if not m:
            raise RecipeSyntaxError("expected 'block <name> = [<expr>, ...]'", line)
        p = Parser(rest[m.end():], at + m.end())
        p.expect("[")
        entries = [p.expression()]
        while p.peek[1] == ",":
            p.next()
            entries.append(p.expression())
        p.expect("]")
        if not p.at_end():
            raise RecipeSyntaxError(f"unexpected {p.peek[1]!r}", line, p.peek[2])
        b.templates[m.group(1)] = tuple(entries)
        b.uses.extend((line, e) for e in entries)
    elif keyword == "blocks":
        for name in rest.split():
            if name not in b.templates:
                raise UnknownSymbol(f"unknown block {name!r}", line)
            b.block_order.append(name)
    elif keyword == "norm":
        m = re.match(r"\s*=", rest)
        if not m or b.norm is not None:
            raise RecipeSyntaxError("expected a single 'norm = <expr>'", line)
        b.norm, b.norm_radicand = _parse_norm(rest[m.end():], at + m.end(), line)
        b.uses.append((line, b.norm))
        if b.norm_radicand is not None:
            b.uses.append((line, b.norm_radicand))
    elif keyword == "relation":
        m = re.match(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*:", rest)
        if not m or rest.count("==") != 1:
            raise RecipeSyntaxError("expected 'relation <name>: <expr> == <expr>'", line)
        lhs_text, rhs_text = rest[m.end():].split("==")
        lhs = parse_expression(lhs_text, at + m.end())
        rhs = parse_expression(rhs_text, at + m.end() + len(lhs_text) + 2)
        if any(r.name == m.group(1) for r in b.relations):
            raise RecipeSyntaxError(f"relation {m.group(1)!r} defined twice", line)
        b.relations.append(Relation(m.group(1), lhs, rhs))
        b.uses.extend([(line, lhs), (line, rhs)])
    elif keyword == "ratiopoly":
        m = re.fullmatch(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*:\s*(.+?)\s+on\s+(.+)", rest)
        if not m:
            raise RecipeSyntaxError("expected 'ratiopoly <name>: <c0>, ..., <ck> on <s1>, ..., <sn>'", line)
        try:
            coeffs = tuple(int(c) for c in m.group(2).split(","))
        except ValueError:
            raise RecipeSyntaxError("ratiopoly coefficients must be integers", line) from None
        names = tuple(s.strip() for s in m.group(3).split(","))
        b.require(names, b.defined, line)
        b.ratio_polynomials.append(RatioPolynomial(m.group(1), coeffs, names))
    elif keyword == "unitcheck":
        m = re.match(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*:", rest)
        if not m:
            raise RecipeSyntaxError("expected 'unitcheck <name>: <expr>'", line)
        value = parse_expression(rest[m.end():], at + m.end())
        if set(symbols(value)) - {"a"}:
            raise UnknownSymbol("unitcheck expressions may only use the base generator 'a'", line)
        b.unit_checks.append(UnitCheck(m.group(1), value))
    else:
        raise RecipeSyntaxError(f"unknown directive {keyword!r}", line, 1)


def _finish(b: _RecipeBuilder) -> FiducialRecipe:
    if b.label is None:
        raise RecipeSyntaxError("empty recipe")
    for line, expr in b.uses:
        b.require(symbols(expr), b.defined, line)
    for line, partner in b.partner_refs:
        b.require([partner], b.generator_names, line, "partner generator")
    if b.norm is None:
        raise RecipeSyntaxError("missing 'norm = <expr>' line")
    if b.templates and b.components:
        raise RecipeSyntaxError("use either component lines or block templates, not both")
    if b.templates:
        components = []
        for name in b.block_order:
            if len(b.templates[name]) != b.layout[-1]:
                raise LayoutMismatch(f"block {name!r} has {len(b.templates[name])} entries, expected {b.layout[-1]}")
            components.extend(b.templates[name])
    else:
        if sorted(b.components) != list(range(1, len(b.components) + 1)):
            raise LayoutMismatch("component indices must run 1..d without gaps")
        components = [b.components[i] for i in range(1, len(b.components) + 1)]
    if len(components) != b.d:
        raise LayoutMismatch(f"{len(components)} components given for dimension {b.d}")
    for g in b.generators:
        if g.kind == ROOTOFUNITY and g.root == (1, 4) and b.d % 4:
            raise LayoutMismatch(f"exp(i*pi/4) is only admitted when 4 divides d (d = {b.d})")
    return FiducialRecipe(
        label=b.label,
        d=b.d,
        layout=b.layout,
        generators=tuple(b.generators),
        derived=tuple(b.derived),
        components=tuple(components),
        norm=b.norm,
        norm_radicand=b.norm_radicand,
        relations=tuple(b.relations),
        ratio_polynomials=tuple(b.ratio_polynomials),
        unit_checks=tuple(b.unit_checks),
        templates=tuple(b.templates.items()),
        block_order=tuple(b.block_order),
        notes=tuple(b.notes),
    )


def _gen_line(g: GeneratorDef) -> str:
    if g.kind == ROOTOFUNITY:
        return f"gen {g.name} = rootofunity({g.root[0]},{g.root[1]})"
    if g.kind == SQRT:
        line = f"gen {g.name} = sqrt({to_text(g.operand)})"
        if g.branch != "principal":
            line += f" branch {g.branch}"
    else:
        line = f"gen {g.name} = polyroot({','.join(to_text(c) for c in g.coeffs)})"
        line += " branch search" if g.branch == SEARCH else f" branch index {g.branch}"
    if g.partner:
        line += f" partner {g.partner}"
    return line


def _derived_line(x: DerivedDef) -> str:
    unit = " unit" if x.unit else ""
    if x.is_constraint:
        return f"constraint {'*'.join(x.product)} = {to_text(x.value)} solve {x.name}{unit}"
    return f"let {x.name} = {to_text(x.value)}{unit}"


def _norm_text(r: FiducialRecipe) -> str:
    if r.norm_radicand is None:
        return to_text(r.norm)
    root = f"sqrt({to_text(r.norm_radicand)})"
    if r.norm == Num(Fraction(1)):
        return root
    # the prefactor is parsed on its own, so it never needs brackets
    return f"{to_text(r.norm)}*{root}"


def serialize(recipe: FiducialRecipe) -> str:
    """Recipe text that :func:`parse_recipe` maps back to an equal recipe."""
    r = recipe
    lines = [f"entry {r.label} dim {r.d} layout {'x'.join(map(str, r.layout))}"]
    lines += [f"note {n}" for n in r.notes]
    lines += [_gen_line(g) for g in r.generators]
    lines += [_derived_line(x) for x in r.derived]
    if r.templates:
        for name, entries in r.templates:
            lines.append(f"block {name} = [{','.join(to_text(e) for e in entries)}]")
        lines.append("blocks " + " ".join(r.block_order))
    else:
        lines += [f"component {i} = {to_text(c)}" for i, c in enumerate(r.components, start=1)]
    lines.append(f"norm = {_norm_text(r)}")
    lines += [f"relation {x.name}: {to_text(x.lhs)} == {to_text(x.rhs)}" for x in r.relations]
    lines += [
        f"ratiopoly {x.name}: {','.join(map(str, x.coeffs))} on {','.join(x.symbols)}"
        for x in r.ratio_polynomials
    ]
    lines += [f"unitcheck {x.name}: {to_text(x.value)}" for x in r.unit_checks]
    return "\n".join(lines) + "\n"


def fiducial_dependencies(recipe: FiducialRecipe) -> set[str]:
    """Every generator or derived symbol the vector and its norm depend on."""
    defs = {g.name: g.dependencies() for g in recipe.generators}
    defs.update({x.name: x.dependencies() for x in recipe.derived})
    roots = (*recipe.components, recipe.norm) + ((recipe.norm_radicand,) if recipe.norm_radicand else ())
    todo = [s for c in roots for s in symbols(c)]
    seen: set[str] = set()
    while todo:
        s = todo.pop()
        if s not in seen:
            seen.add(s)
            todo.extend(defs.get(s, ()))
    return seen


def canonical_text(recipe: FiducialRecipe) -> str:
    """Whitespace-free description of the vector alone: the generators it
    depends on (sorted by name), its derived quantities, components (or
    block templates) and norm."""
    needed = fiducial_dependencies(recipe)
    parts = [_gen_line(g).replace(" ", "") for g in sorted(recipe.generators, key=lambda g: g.name) if g.name in needed]
    parts += [_derived_line(x).replace(" ", "") for x in recipe.derived if x.name in needed]
    if recipe.templates:
        parts += [f"block{n}=[{','.join(to_text(e) for e in es)}]" for n, es in recipe.templates]
        parts.append("blocks" + ",".join(recipe.block_order))
    else:
        parts += [to_text(c) for c in recipe.components]
    parts.append("norm=" + _norm_text(recipe))
    return ";".join(parts)


def character_count(recipe: FiducialRecipe) -> int:
    return len(canonical_text(recipe))
