"""Textual formats for measures, martingales, strategies, sources, machines,
tests and regions.

Measure documents are JSON with a "kind" field:

    {"kind": "fair_coin"}
    {"kind": "bernoulli", "p": "1/3"}
    {"kind": "split_table", "entries": [["", "0"], ["0", "1/2"]],
     "default": "1/2", "total": "1/1"}
    {"kind": "interleave", "factors": [<doc>, <doc>]}
    {"kind": "pushforward", "decomposition": "bary:3"}

Rationals are always "num/den" strings and documents round-trip losslessly.
The CLI also accepts compact one-line forms:

    measures        fair | bernoulli:1/3 | split_table:FILE |
                    interleave:SPEC*SPEC | push:DEC
    martingales     quotient:SPEC/SPEC | all_in:0 | table:FILE | file:FILE
    strategies      doubling:CYLFILE | bit_all_in:SIDES |
                    likelihood_ratio:MEASURESPEC | table:FILE | null
    sources         prng:SEED | bernoulli:P,seed=SEED | champernowne |
                    file:PATH | literal:BITS
    decompositions  binary | ternary | bary:B | interleave:D
"""

import json

from . import betting, cells
from .bits import prefix_free_violation, validate_bits
from .errors import ConstructionError, SpecParseError
from .martingale import Martingale, from_measures, table_martingale
from .measure import Measure, MeasureSpec, build_measure
from .rationals import format_rational, parse_rational
from .sources import SourceSpec


# ---------------------------------------------------------------- measures

def measure_doc_to_spec(doc: dict) -> MeasureSpec:
    kind = doc.get("kind")
    if kind == "fair_coin":
        return MeasureSpec("fair_coin")
    if kind == "bernoulli":
        return MeasureSpec("bernoulli", p=parse_rational(doc["p"]))
    if kind == "split_table":
        entries = tuple(
            (validate_bits(sigma), parse_rational(q)) for sigma, q in doc.get("entries", [])
        )
        return MeasureSpec(
            "split_table",
            entries=entries,
            default=parse_rational(doc.get("default", "1/2")),
            total=parse_rational(doc.get("total", "1/1")),
        )
    if kind == "interleave":
        f1, f2 = doc["factors"]
        return MeasureSpec("interleave", factors=(measure_doc_to_spec(f1), measure_doc_to_spec(f2)))
    if kind == "pushforward":
        return MeasureSpec("pushforward", decomposition=parse_decomposition(doc["decomposition"]))
    raise SpecParseError(f"unknown measure kind {kind!r}")


def measure_spec_to_doc(spec: MeasureSpec) -> dict:
    if spec.kind == "fair_coin":
        return {"kind": "fair_coin"}
    if spec.kind == "bernoulli":
        return {"kind": "bernoulli", "p": format_rational(spec.p)}
    if spec.kind == "split_table":
        return {
            "kind": "split_table",
            "entries": [[sigma, format_rational(q)] for sigma, q in spec.entries],
            "default": format_rational(spec.default),
            "total": format_rational(spec.total),
        }
    if spec.kind == "interleave":
        docs = []
        for factor in spec.factors:
            docs.append(
                measure_spec_to_doc(factor if isinstance(factor, MeasureSpec) else factor.spec)
            )
        return {"kind": "interleave", "factors": docs}
    if spec.kind == "pushforward":
        return {"kind": "pushforward", "decomposition": spec.decomposition.spec_name}
    raise SpecParseError(f"unknown measure kind {spec.kind!r}")


def measure_snapshot_doc(mu: Measure, depth: int) -> dict:
    """Lossless-to-depth serialization of any measure as an explicit table."""
    entries = []

    def walk(sigma: str):
        if mu.mass(sigma) > 0:
            entries.append([sigma, format_rational(mu.split(sigma))])
        if len(sigma) + 1 < depth:
            walk(sigma + "0")
            walk(sigma + "1")

    if depth > 0:
        walk("")
    return {
        "kind": "split_table",
        "entries": entries,
        "default": "1/2",
        "total": format_rational(mu.total),
    }


def measure_to_doc(mu: Measure, depth: int = 12) -> dict:
    if isinstance(mu.spec, MeasureSpec):
        try:
            return measure_spec_to_doc(mu.spec)
        except SpecParseError:
            pass
    return measure_snapshot_doc(mu, depth)


def parse_measure(text: str) -> Measure:
    """Compact one-line measure spec (see module docstring)."""
    text = text.strip()
    if text in ("fair", "fair_coin"):
        return build_measure(MeasureSpec("fair_coin"))
    if text.startswith("bernoulli:"):
        return build_measure(MeasureSpec("bernoulli", p=parse_rational(text.split(":", 1)[1])))
    if text.startswith("split_table:"):
        path = text.split(":", 1)[1]
        with open(path) as fh:
            return build_measure(measure_doc_to_spec(json.load(fh)))
    if text.startswith("interleave:"):
        body = text.split(":", 1)[1]
        if "*" not in body:
            raise SpecParseError("interleave needs SPEC*SPEC")
        left, right = body.split("*", 1)
        return build_measure(
            MeasureSpec("interleave", factors=(parse_measure(left), parse_measure(right)))
        )
    if text.startswith("push:"):
        return parse_decomposition(text.split(":", 1)[1]).pushforward()
    if text.startswith("doc:"):
        with open(text.split(":", 1)[1]) as fh:
            return build_measure(measure_doc_to_spec(json.load(fh)))
    raise SpecParseError(f"cannot parse measure spec {text!r}")


# ------------------------------------------------------------ martingales

def parse_martingale(text: str, base: Measure = None) -> Martingale:
    """Compact martingale spec; table forms fall back to `base` for the measure."""
    text = text.strip()
    if text.startswith("quotient:"):
        body = text.split(":", 1)[1]
        for i, ch in enumerate(body):
            if ch != "/":
                continue
            try:
                nu = parse_measure(body[:i])
                mu = parse_measure(body[i + 1 :])
            except (SpecParseError, ConstructionError, ValueError, OSError):
                continue
            return from_measures(nu, mu)
        raise SpecParseError(f"cannot split quotient spec {text!r}")
    if text.startswith("all_in:"):
        side = text.split(":", 1)[1]
        if side not in ("0", "1"):
            raise SpecParseError(f"all_in side must be 0 or 1, got {side!r}")
        if base is None:
            raise SpecParseError("all_in martingale needs a base measure")
        from .battery import all_in_on_bit

        return all_in_on_bit(base, int(side))
    if text.startswith(("table:", "file:")):
        if base is None:
            raise SpecParseError("table martingale needs a base measure")
        path = text.split(":", 1)[1]
        with open(path) as fh:
            doc = json.load(fh)
        entries = {validate_bits(s): parse_rational(v) for s, v in doc.get("entries", {}).items()}
        return table_martingale(base, entries, start=parse_rational(doc.get("start", "1/1")))
    raise SpecParseError(f"cannot parse martingale spec {text!r}")


# -------------------------------------------------------------- strategies

def parse_strategy(text: str, mu: Measure) -> betting.BettingStrategy:
    text = text.strip()
    if text == "null":
        return betting.NullStrategy()
    if text.startswith("doubling:"):
        target = load_cylinder_file(text.split(":", 1)[1])
        return betting.doubling_strategy(target, mu)
    if text.startswith("bit_all_in:"):
        return betting.BitAllInStrategy(sides=text.split(":", 1)[1])
    if text.startswith("likelihood_ratio:"):
        return betting.LikelihoodRatioStrategy(parse_measure(text.split(":", 1)[1]))
    if text.startswith("table:"):
        with open(text.split(":", 1)[1]) as fh:
            doc = json.load(fh)
        nodes = {}
        for history, node in doc.get("nodes", {}).items():
            nodes[validate_bits(history)] = (_event_from_doc(node["event"]), parse_rational(node["stake"]))
        return betting.TableStrategy(nodes, start_capital=parse_rational(doc.get("start", "1/1")))
    raise SpecParseError(f"cannot parse strategy spec {text!r}")


def _event_from_doc(doc: dict):
    if doc.get("kind") == "bit":
        return betting.BitEvent(index=int(doc["index"]), side=int(doc["side"]))
    if doc.get("kind") == "cylinders":
        return betting.CylinderEvent(generators=tuple(validate_bits(s) for s in doc["strings"]))
    raise SpecParseError(f"unknown event kind {doc.get('kind')!r}")


# ----------------------------------------------------------------- sources

def parse_source(text: str) -> SourceSpec:
    text = text.strip()
    if text == "champernowne":
        return SourceSpec(kind="champernowne")
    if text.startswith("literal:"):
        return SourceSpec(kind="literal", bits=validate_bits(text.split(":", 1)[1]))
    if text.startswith("file:"):
        return SourceSpec(kind="file", path=text.split(":", 1)[1])
    if text.startswith("prng:"):
        body = text.split(":", 1)[1]
        seed = body.split("=", 1)[1] if body.startswith("seed=") else body
        return SourceSpec(kind="prng", seed=int(seed))
    if text.startswith("bernoulli:"):
        body = text.split(":", 1)[1]
        parts = body.split(",")
        p = parse_rational(parts[0])
        seed = 0
        for part in parts[1:]:
            if part.startswith("seed="):
                seed = int(part.split("=", 1)[1])
            else:
                raise SpecParseError(f"bad source option {part!r}")
        return SourceSpec(kind="bernoulli", p=p, seed=seed)
    raise SpecParseError(f"cannot parse source spec {text!r}")


# --------------------------------------------------------- decompositions

def parse_decomposition(text: str) -> cells.CellDecomposition:
    text = text.strip()
    if text in ("binary", "binary_digits"):
        return cells.binary_digits()
    if text == "ternary":
        return cells.bary_grouped(3)
    if text.startswith("bary:"):
        return cells.bary_grouped(int(text.split(":", 1)[1]))
    if text.startswith("interleave:"):
        return cells.interleave(int(text.split(":", 1)[1]))
    if text.startswith("natural:"):
        return cells.natural(parse_measure(text.split(":", 1)[1]))
    raise SpecParseError(f"cannot parse decomposition spec {text!r}")


# ------------------------------------------------------------------- files

def load_cylinder_file(path: str) -> tuple:
    """Newline-separated generators, validated prefix-free."""
    with open(path) as fh:
        strings = [line.strip() for line in fh if line.strip()]
    for s in strings:
        validate_bits(s)
    bad = prefix_free_violation(strings)
    if bad is not None:
        raise SpecParseError(f"cylinder file not prefix-free: {bad[0]!r} < {bad[1]!r}")
    return tuple(sorted(strings))


def load_machine_file(path: str):
    """Lines "codeword<TAB>output"; empty output allowed."""
    table = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if "\t" not in line:
                raise SpecParseError(f"{path}:{lineno}: expected codeword<TAB>output")
            codeword, output = line.split("\t", 1)
            table[validate_bits(codeword.strip())] = validate_bits(output.strip())
    from .machines import PrefixFreeMachine

    return PrefixFreeMachine(table)


def load_request_file(path: str) -> list:
    """Lines "n<TAB>sigma"."""
    requests = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if "\t" not in line:
                raise SpecParseError(f"{path}:{lineno}: expected n<TAB>sigma")
            n, sigma = line.split("\t", 1)
            requests.append((int(n), validate_bits(sigma.strip())))
    return requests


def parse_region(lines) -> cells.Region:
    """Interval pairs "num/den,num/den", one per line."""
    pairs = []
    for line in lines:
        line = line.strip()
        if not line:
            continue
        lo, hi = line.split(",", 1)
        pairs.append((parse_rational(lo), parse_rational(hi)))
    return cells.Region.from_pairs(pairs)


def region_to_lines(region: cells.Region) -> list:
    return [f"{format_rational(lo)},{format_rational(hi)}" for lo, hi in region.intervals]


# ------------------------------------------------------------ test bundles

def test_to_doc(obj, depth: int = 12) -> dict:
    from . import randtests

    if isinstance(obj, randtests.IntegralStep):
        return {
            "kind": "integral",
            "depth": obj.depth,
            "base": measure_to_doc(obj.base, depth),
            "bound": measure_to_doc(obj.bound, depth),
            "values": [[cell, format_rational(v)] for cell, v in sorted(obj.values.items())],
            "unit_witness": obj.unit_witness,
        }
    if isinstance(obj, randtests.BoundedMLTest):
        return {
            "kind": "bounded_ml",
            "base": measure_to_doc(obj.base, depth),
            "bound": measure_to_doc(obj.bound, depth),
            "levels": [list(level.generators) for level in obj.levels],
            "depth": max((level.depth for level in obj.levels), default=0),
        }
    if isinstance(obj, randtests.VitaliTest):
        return {
            "kind": "vitali",
            "base": measure_to_doc(obj.base, depth),
            "bound": measure_to_doc(obj.bound, depth),
            "pieces": [list(piece.generators) for piece in obj.pieces],
            "depth": max((piece.depth for piece in obj.pieces), default=0),
        }
    if isinstance(obj, randtests.MLTest):
        return {
            "kind": "ml",
            "base": measure_to_doc(obj.base, depth),
            "levels": [list(level.generators) for level in obj.levels],
            "depth": max((level.depth for level in obj.levels), default=0),
        }
    raise SpecParseError(f"cannot serialize {type(obj).__name__}")


def test_from_doc(doc: dict):
    from . import randtests

    kind = doc.get("kind")
    base = build_measure(measure_doc_to_spec(doc["base"]))
    depth = int(doc.get("depth", 0))
    if kind == "ml":
        levels = [randtests.CylinderSet.from_strings(gens, depth) for gens in doc["levels"]]
        return randtests.MLTest(base=base, levels=levels)
    bound = build_measure(measure_doc_to_spec(doc["bound"]))
    if kind == "bounded_ml":
        levels = [randtests.CylinderSet.from_strings(gens, depth) for gens in doc["levels"]]
        return randtests.BoundedMLTest(base=base, levels=levels, bound=bound)
    if kind == "vitali":
        pieces = [randtests.CylinderSet.from_strings(gens, depth) for gens in doc["pieces"]]
        return randtests.VitaliTest(base=base, pieces=pieces, bound=bound)
    if kind == "integral":
        values = {validate_bits(cell): parse_rational(v) for cell, v in doc["values"]}
        return randtests.IntegralStep(
            base=base,
            depth=depth,
            values=values,
            bound=bound,
            unit_witness=bool(doc.get("unit_witness", False)),
        )
    raise SpecParseError(f"unknown test kind {kind!r}")
