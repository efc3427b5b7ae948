"""Parsing and printing of operation expressions and module description files.

Expression grammar (ASCII)::

    expr  := term { "+" term }
    term  := "1" | sqop { sqop }
    sqop  := "Sq" integer        integer >= 1, decimal, no leading zeros

Whitespace may surround any token. The lone token ``"0"`` denotes the zero sum.
"""

from __future__ import annotations

import json
from typing import Any, Mapping

from .gf2 import GF2Matrix, unvec, vec
from .modules import FiniteUnstableAlgebra, FiniteUnstableModule, make_finite
from .steenrod import AdmissibleSum, SteenrodExpression, format_monomial

MAX_INDEX_DIGITS = 6


class ParseError(ValueError):
    def __init__(self, position: int, expected: str, found: str):
        self.position = position
        self.expected = expected
        self.found = found
        super().__init__(f"at byte {position}: expected {expected}, found {found}")


class SchemaError(ValueError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path or '<document>'}: {message}")


class _Scanner:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.data) and self.data[self.pos] in b" \t\r\n":
            self.pos += 1

    def peek(self) -> int | None:
        return self.data[self.pos] if self.pos < len(self.data) else None

    def found(self) -> str:
        if self.pos >= len(self.data):
            return "end of input"
        return repr(self.data[self.pos:self.pos + 8].decode("latin-1"))

    def fail(self, expected: str):
        raise ParseError(self.pos, expected, self.found())


def parse_op(text: str | bytes) -> SteenrodExpression:
    """Parse an expression; the result is not normalized.

    Raises:
        ParseError: with the byte offset of the first deviation from the grammar.
    """
    data = text.encode("utf-8") if isinstance(text, str) else bytes(text)
    sc = _Scanner(data)
    sc.skip_ws()
    if sc.peek() == ord("0"):
        sc.pos += 1
        sc.skip_ws()
        if sc.peek() is not None:
            sc.fail("end of input after '0'")
        return SteenrodExpression(())
    terms = [_term(sc)]
    while True:
        sc.skip_ws()
        c = sc.peek()
        if c is None:
            break
        if c != ord("+"):
            sc.fail("'+' or end of input")
        sc.pos += 1
        sc.skip_ws()
        terms.append(_term(sc))
    return SteenrodExpression(tuple(terms))


def _term(sc: _Scanner) -> tuple[int, ...]:
    if sc.peek() == ord("1"):
        sc.pos += 1
        return ()
    if sc.peek() != ord("S"):
        sc.fail("'1' or 'Sq'")
    out = [_sqop(sc)]
    while True:
        save = sc.pos
        sc.skip_ws()
        if sc.peek() == ord("S"):
            out.append(_sqop(sc))
        else:
            sc.pos = save
            return tuple(out)


def _sqop(sc: _Scanner) -> int:
    if sc.data[sc.pos:sc.pos + 2] != b"Sq":
        sc.fail("'Sq'")
    sc.pos += 2
    start = sc.pos
    c = sc.peek()
    if c is None or not 0x31 <= c <= 0x39:
        sc.fail("an index 1-9" if c != ord("0") else "a positive index without leading zero")
    while sc.peek() is not None and 0x30 <= sc.peek() <= 0x39:
        sc.pos += 1
        if sc.pos - start > MAX_INDEX_DIGITS:
            sc.pos = start
            sc.fail(f"an index of at most {MAX_INDEX_DIGITS} digits")
    return int(sc.data[start:sc.pos])


def print_op(x: AdmissibleSum | SteenrodExpression) -> str:
    """Canonical text; ``print_op(parse_op(s))`` keeps terms in input order for raw expressions."""
    if isinstance(x, AdmissibleSum):
        return str(x)
    if not x.terms:
        return "0"
    return " + ".join(format_monomial(t) for t in x.terms)


# -- module documents --


def _int(doc: Any, path: str, minimum: int = 0) -> int:
    if isinstance(doc, bool) or not isinstance(doc, int) or doc < minimum:
        raise SchemaError(path, f"expected an integer >= {minimum}")
    return doc


def _matrix(doc: Any, path: str, nrows: int, ncols: int) -> GF2Matrix:
    if not isinstance(doc, list) or len(doc) != nrows:
        raise SchemaError(path, f"expected a list of {nrows} rows")
    rows = []
    for r, row in enumerate(doc):
        if not isinstance(row, list) or len(row) != ncols:
            raise SchemaError(f"{path}[{r}]", f"expected a row of {ncols} entries")
        for c, b in enumerate(row):
            if isinstance(b, bool) or b not in (0, 1):
                raise SchemaError(f"{path}[{r}][{c}]", "expected 0 or 1")
        rows.append(vec(row))
    return GF2Matrix(nrows, ncols, tuple(rows))


def _bits(doc: Any, path: str, n: int) -> int:
    if not isinstance(doc, list) or len(doc) != n:
        raise SchemaError(path, f"expected a 0/1 vector of length {n}")
    for c, b in enumerate(doc):
        if isinstance(b, bool) or b not in (0, 1):
            raise SchemaError(f"{path}[{c}]", "expected 0 or 1")
    return vec(doc)


def _pair(key: str, path: str) -> tuple[int, int]:
    parts = key.split(",")
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise SchemaError(path, f"key {key!r} is not of the form 'a,b'")
    return int(parts[0]), int(parts[1])


_KNOWN = {"top_degree", "dims", "ops", "products", "labels", "name", "truncated"}


def load_module(document: str | bytes | Mapping[str, Any]) -> FiniteUnstableModule | FiniteUnstableAlgebra:
    """Load a module (or, when ``products`` is present, an algebra) and validate it.

    Raises:
        SchemaError: naming the offending field path.
        ModuleValidationError: from the constructors.
    """
    if isinstance(document, (str, bytes)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError("", f"invalid JSON: {exc.msg} at position {exc.pos}") from None
    else:
        doc = document
    if not isinstance(doc, dict):
        raise SchemaError("", "expected a JSON object")
    for k in doc:
        if k not in _KNOWN:
            raise SchemaError(k, "unknown field")
    top = _int(doc.get("top_degree"), "top_degree")
    dims_doc = doc.get("dims")
    if not isinstance(dims_doc, list) or len(dims_doc) != top + 1:
        raise SchemaError("dims", f"expected a list of {top + 1} dimensions")
    dims = [_int(x, f"dims[{d}]") for d, x in enumerate(dims_doc)]
    ops_doc = doc.get("ops", {})
    if not isinstance(ops_doc, dict):
        raise SchemaError("ops", "expected an object")
    ops: dict[int, dict[int, GF2Matrix]] = {}
    for key, blocks in ops_doc.items():
        path = f"ops.{key}"
        if not key.startswith("Sq") or not key[2:].isdigit() or key[2] == "0":
            raise SchemaError(path, "operation keys look like 'Sq<i>' with i >= 1")
        i = int(key[2:])
        if i > top:
            raise SchemaError(path, f"operation exceeds top degree {top}")
        if not isinstance(blocks, list) or len(blocks) != top - i + 1:
            raise SchemaError(path, f"expected {top - i + 1} per-degree matrices (degrees 0..{top - i})")
        ops[i] = {d: _matrix(b, f"{path}[{d}]", dims[d + i], dims[d]) for d, b in enumerate(blocks)}
    labels: dict[tuple[int, int], str] = {}
    labels_doc = doc.get("labels", {})
    if not isinstance(labels_doc, dict):
        raise SchemaError("labels", "expected an object")
    for key, text in labels_doc.items():
        d, j = _pair(key, f"labels.{key}")
        if d > top or j >= dims[d]:
            raise SchemaError(f"labels.{key}", "not a basis element")
        if not isinstance(text, str):
            raise SchemaError(f"labels.{key}", "expected a string")
        labels[(d, j)] = text
    name = doc.get("name", "M")
    if not isinstance(name, str):
        raise SchemaError("name", "expected a string")
    truncated = doc.get("truncated", False)
    if not isinstance(truncated, bool):
        raise SchemaError("truncated", "expected a boolean")
    if truncated:
        module = FiniteUnstableModule(dims, ops, labels=labels, name=name, truncated=True)
    else:
        module = make_finite(dims, ops, labels=labels, name=name)
    if "products" not in doc:
        return module
    prod_doc = doc["products"]
    if not isinstance(prod_doc, dict):
        raise SchemaError("products", "expected an object")
    products: dict[tuple[int, int], list[list[int]]] = {}
    for key, table in prod_doc.items():
        path = f"products.{key}"
        d1, d2 = _pair(key, path)
        if d1 < 1 or d2 < 1 or d1 + d2 > top:
            raise SchemaError(path, "degrees must be positive with sum at most top_degree")
        if not isinstance(table, list) or len(table) != dims[d1]:
            raise SchemaError(path, f"expected {dims[d1]} rows")
        rows = []
        for a, row in enumerate(table):
            if not isinstance(row, list) or len(row) != dims[d2]:
                raise SchemaError(f"{path}[{a}]", f"expected {dims[d2]} entries")
            rows.append([_bits(v, f"{path}[{a}][{b}]", dims[d1 + d2]) for b, v in enumerate(row)])
        products[(d1, d2)] = rows
    return FiniteUnstableAlgebra(module, products)


def save_module(obj: FiniteUnstableModule | FiniteUnstableAlgebra) -> dict:
    """The canonical document; zero operations and default labels are omitted."""
    alg = obj if isinstance(obj, FiniteUnstableAlgebra) else None
    m = alg.module if alg else obj
    top = m.top_degree
    doc: dict[str, Any] = {"name": m.name, "top_degree": top, "dims": list(m.dims)}
    if m.truncated:
        doc["truncated"] = True
    ops = {}
    for i in range(1, top + 1):
        blocks = [m.matrix(i, d) for d in range(top - i + 1)]
        if any(not b.is_zero() for b in blocks):
            ops[f"Sq{i}"] = [b.to_lists() for b in blocks]
    doc["ops"] = ops
    labels = {}
    for (d, j), text in sorted(m.space.labels.items()):
        if text != f"x{d}_{j}":
            labels[f"{d},{j}"] = text
    if labels:
        doc["labels"] = labels
    if alg is not None:
        prods = {}
        for (d1, d2), table in sorted(alg.tables.items()):
            if any(v for row in table for v in row):
                n = m.dim(d1 + d2)
                prods[f"{d1},{d2}"] = [[unvec(v, n) for v in row] for row in table]
        doc["products"] = prods
    return doc


def dumps_module(obj: FiniteUnstableModule | FiniteUnstableAlgebra) -> str:
    return json.dumps(save_module(obj), indent=1, sort_keys=False)


def parse_element(spec: str) -> dict[int, int]:
    """Parse ``"d:i[,i...] + d:i"`` into per-degree bit vectors.

    Raises:
        ParseError: malformed specification.
    """
    out: dict[int, int] = {}
    pos = 0
    for part in spec.split("+"):
        piece = part.strip()
        start = pos + (len(part) - len(part.lstrip()))
        if ":" not in piece:
            raise ParseError(start, "'degree:index[,index...]'", repr(piece))
        deg, _, idx = piece.partition(":")
        if not deg.strip().isdigit():
            raise ParseError(start, "a degree", repr(deg))
        d = int(deg)
        v = 0
        for tok in idx.split(","):
            if not tok.strip().isdigit():
                raise ParseError(start, "a basis index", repr(tok))
            v ^= 1 << int(tok)
        out[d] = out.get(d, 0) ^ v
        pos += len(part) + 1
    return out
