"""Text formats for group elements and generator-composition files.

Two formats, both using decimal reals with 17 significant digits:

* element records: flat whitespace-separated numbers.
    - s3s3: 12 reals (the three unit quaternions as w x y z), the J-sign
      index kappa, and the rotation tag tau in {0, 1, 2} meaning
      {0, 2pi/3, 4pi/3}; 14 tokens.
    - cp3: 32 reals (4x4 complex matrix, row-major, re/im interleaved)
      plus the conjugation flag; 33 tokens.
    - flag: 18 reals (3x3 complex matrix, row-major, re/im interleaved),
      the column permutation as an ordered triple of {1,2,3}, and the
      conjugation flag; 22 tokens.

* generator-composition files: line-oriented, one generator per line with
  named parameters (``name=v1,v2,...``), composed in file order with the
  first line acting first.  Lines starting with ``#`` and blank lines are
  skipped.  Vocabulary per space:
    - s3s3: ``translation a=.. b=.. c=..`` (4 reals each),
            ``psi kappa=K tau=T``, ``element`` with all five parameters;
    - cp3:  ``matrix m=<32 reals>``, ``conj``;
    - flag: ``matrix m=<18 reals>``, ``perm p=i,j,k``, ``conj``.

A file whose first meaningful token is a number is an element record;
otherwise it is a generator composition.
"""

from __future__ import annotations

import numpy as np

from . import cp3, flag, s3s3
from .errors import SerializationError
from .quaternions import ONE, Quaternion
from .report import format_real

__all__ = ["serialize_element", "parse_element_text", "load_element_text"]


def _reals(xs) -> str:
    return " ".join(format_real(x) for x in xs)


def _complex_flat(M: np.ndarray):
    out = []
    for z in M.ravel():
        out.extend((z.real, z.imag))
    return out


def _complex_unflat(vals, n):
    data = np.array(vals[0::2]) + 1j * np.array(vals[1::2])
    return data.reshape(n, n)


def serialize_element(space: str, element) -> str:
    """Flat text record of a group element (see module docstring)."""
    if space == "s3s3":
        qs = [element.a, element.b, element.c]
        coeffs = [c for q in qs for c in (q.w, q.x, q.y, q.z)]
        return f"{_reals(coeffs)} {element.kappa} {element.tau_idx}"
    if space == "cp3":
        return f"{_reals(_complex_flat(element.A))} {element.k}"
    if space == "flag":
        perm = " ".join(str(i + 1) for i in element.sigma)
        return f"{_reals(_complex_flat(element.A))} {perm} {element.k}"
    raise ValueError(f"unknown space {space!r}")


def _tokenize(text: str):
    """Tokens with (line, column) positions, 1-based; comments stripped."""
    out = []
    for ln, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0]
        col = 1
        for piece in body.split():
            col = body.index(piece, col - 1) + 1
            out.append((piece, ln, col))
            col += len(piece)
    return out


def _as_float(token):
    text, ln, col = token
    try:
        return float(text)
    except ValueError:
        raise SerializationError(f"expected a number, found {text!r}", ln, col) from None


def _as_int(token, allowed=None):
    text, ln, col = token
    try:
        value = int(text)
    except ValueError:
        raise SerializationError(f"expected an integer, found {text!r}", ln, col) from None
    if allowed is not None and value not in allowed:
        raise SerializationError(f"value {value} outside {sorted(allowed)}", ln, col)
    return value


def parse_element_text(space: str, text: str):
    """Parse a flat element record."""
    tokens = _tokenize(text)
    counts = {"s3s3": 14, "cp3": 33, "flag": 22}
    if space not in counts:
        raise ValueError(f"unknown space {space!r}")
    if len(tokens) != counts[space]:
        ln, col = (tokens[-1][1], tokens[-1][2]) if tokens else (1, 1)
        raise SerializationError(
            f"element record for {space} needs {counts[space]} tokens, found {len(tokens)}",
            ln, col,
        )
    try:
        if space == "s3s3":
            reals = [_as_float(t) for t in tokens[:12]]
            kappa = _as_int(tokens[12], {0, 1})
            tau = _as_int(tokens[13], {0, 1, 2})
            qs = [Quaternion(*reals[4 * i: 4 * i + 4]) for i in range(3)]
            return s3s3.Isometry(*qs, kappa, tau)
        if space == "cp3":
            reals = [_as_float(t) for t in tokens[:32]]
            k = _as_int(tokens[32], {0, 1})
            return cp3.Isometry(_complex_unflat(reals, 4), k)
        reals = [_as_float(t) for t in tokens[:18]]
        perm = tuple(_as_int(t, {1, 2, 3}) - 1 for t in tokens[18:21])
        k = _as_int(tokens[21], {0, 1})
        return flag.Isometry(_complex_unflat(reals, 3), perm, k)
    except SerializationError:
        raise
    except Exception as exc:
        raise SerializationError(f"invalid element: {exc}", tokens[0][1], tokens[0][2]) from None


def _named_params(tokens, lineno):
    params = {}
    for text, ln, col in tokens:
        if "=" not in text:
            raise SerializationError(f"expected name=value, found {text!r}", ln, col)
        name, _, raw = text.partition("=")
        if not name or not raw:
            raise SerializationError(f"malformed parameter {text!r}", ln, col)
        try:
            params[name] = [float(piece) for piece in raw.split(",")]
        except ValueError:
            raise SerializationError(f"non-numeric value in {text!r}", ln, col) from None
    return params


def _need(params, name, count, ln):
    if name not in params:
        raise SerializationError(f"missing parameter {name!r}", ln)
    if len(params[name]) != count:
        raise SerializationError(
            f"parameter {name!r} needs {count} values, found {len(params[name])}", ln
        )
    return params[name]


def _parse_generator(space: str, head, rest, identity):
    word, ln, col = head
    params = _named_params(rest, ln)
    if space == "s3s3":
        if word == "translation":
            qs = [Quaternion(*_need(params, key, 4, ln)) for key in ("a", "b", "c")]
            return s3s3.Isometry(*qs, 0, 0)
        if word == "psi":
            kappa = int(_need(params, "kappa", 1, ln)[0])
            tau = int(_need(params, "tau", 1, ln)[0])
            if kappa not in (0, 1) or tau not in (0, 1, 2):
                raise SerializationError("psi indices out of range", ln)
            return s3s3.Isometry(ONE, ONE, ONE, kappa, tau)
        if word == "element":
            qs = [Quaternion(*_need(params, key, 4, ln)) for key in ("a", "b", "c")]
            kappa = int(_need(params, "kappa", 1, ln)[0])
            tau = int(_need(params, "tau", 1, ln)[0])
            return s3s3.Isometry(*qs, kappa, tau)
    elif space == "cp3":
        if word == "matrix":
            return cp3.Isometry(_complex_unflat(_need(params, "m", 32, ln), 4), 0)
        if word == "conj":
            return cp3.Isometry(np.eye(4, dtype=complex), 1)
    elif space == "flag":
        if word == "matrix":
            return flag.Isometry(_complex_unflat(_need(params, "m", 18, ln), 3))
        if word == "perm":
            triple = [int(v) for v in _need(params, "p", 3, ln)]
            if sorted(triple) != [1, 2, 3]:
                raise SerializationError(f"not a permutation of 1,2,3: {triple}", ln)
            return flag.Isometry(np.eye(3, dtype=complex),
                                 tuple(v - 1 for v in triple), 0)
        if word == "conj":
            return flag.Isometry(np.eye(3, dtype=complex), (0, 1, 2), 1)
    raise SerializationError(f"unknown generator {word!r} for space {space}", ln, col)


def _identity(space: str):
    return {"s3s3": s3s3.identity_isometry,
            "cp3": cp3.identity_isometry,
            "flag": flag.identity_isometry}[space]()


def load_element_text(space: str, text: str):
    """Element from a flat record or a generator-composition text.

    Generator lines compose in file order with the first line acting first
    on points: the result is line_n * ... * line_1.
    """
    tokens = _tokenize(text)
    if not tokens:
        raise SerializationError("empty input", 1, 1)
    first = tokens[0][0]
    try:
        float(first)
        is_record = True
    except ValueError:
        is_record = False
    if is_record:
        return parse_element_text(space, text)

    by_line: dict = {}
    for tok in tokens:
        by_line.setdefault(tok[1], []).append(tok)
    total = _identity(space)
    for ln in sorted(by_line):
        toks = by_line[ln]
        try:
            gen = _parse_generator(space, toks[0], toks[1:], total)
        except SerializationError:
            raise
        except Exception as exc:
            raise SerializationError(f"invalid generator: {exc}", ln) from None
        total = gen.compose(total)
    return total
