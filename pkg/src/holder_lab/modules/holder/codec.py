# src/holder_lab/modules/holder/codec.py
"""
Canonical text form of a PiecewiseFn.

    alpha <value>
    a b affine m c                       # c + m (x - a)
    a b arc left|right sign coeff offset # offset + sign*coeff*|x - anchor|^alpha
    a b mixed m c p1 c1 [p2 c2 ...]      # c + m (x - a) + sum ci |x - pi|^alpha

Numbers are written with 17 significant digits, so decoding restores the
exact binary64 values.
"""

from __future__ import annotations

from pathlib import Path

from holder_lab.core.errors import InvalidParameter

from .piecewise import ArcTerm, PiecewiseFn, Segment, from_segments

__all__ = ["dumps", "loads", "read", "write", "fmt"]


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _segment_line(s: Segment) -> str:
    head = f"{fmt(s.a)} {fmt(s.b)}"
    kind = s.kind
    if kind == "affine":
        return f"{head} affine {fmt(s.slope)} {fmt(s.offset)}"
    if kind == "arc":
        t = s.arcs[0]
        side = "left" if t.anchor == s.a else "right"
        sign = 1 if t.coeff > 0 else -1
        return f"{head} arc {side} {sign} {fmt(abs(t.coeff))} {fmt(s.offset)}"
    terms = " ".join(f"{fmt(t.anchor)} {fmt(t.coeff)}" for t in s.arcs)
    return f"{head} mixed {fmt(s.slope)} {fmt(s.offset)} {terms}"


def dumps(f: PiecewiseFn) -> str:
    lines = [f"alpha {fmt(f.alpha)}"]
    lines += [_segment_line(s) for s in f.segments]
    return "\n".join(lines) + "\n"


def _parse_segment(tokens: list[str], lineno: int) -> Segment:
    try:
        a, b = float(tokens[0]), float(tokens[1])
        kind = tokens[2]
        rest = tokens[3:]
        if kind == "affine" and len(rest) == 2:
            return Segment.affine(a, b, float(rest[0]), float(rest[1]))
        if kind == "arc" and len(rest) == 4:
            side = rest[0]
            if side not in ("left", "right"):
                raise InvalidParameter(f"line {lineno}: arc side must be left|right")
            return Segment.arc(
                a, b, side, int(rest[1]), float(rest[2]), float(rest[3])  # type: ignore[arg-type]
            )
        if kind == "mixed" and len(rest) >= 2 and len(rest) % 2 == 0:
            pairs = rest[2:]
            arcs = tuple(
                ArcTerm(float(pairs[i]), float(pairs[i + 1])) for i in range(0, len(pairs), 2)
            )
            return Segment(a, b, float(rest[0]), float(rest[1]), arcs)
    except (IndexError, ValueError) as err:
        raise InvalidParameter(f"line {lineno}: malformed segment ({err})") from err
    raise InvalidParameter(f"line {lineno}: unknown segment form {' '.join(tokens)!r}")


def loads(text: str) -> PiecewiseFn:
    lines = [
        (n, ln.split()) for n, ln in enumerate(text.splitlines(), start=1) if ln.strip()
    ]
    if not lines or lines[0][1][:1] != ["alpha"] or len(lines[0][1]) != 2:
        raise InvalidParameter("first line must be 'alpha <value>'")
    try:
        alpha = float(lines[0][1][1])
    except ValueError as err:
        raise InvalidParameter(f"bad alpha value {lines[0][1][1]!r}") from err
    segs = tuple(_parse_segment(tokens, n) for n, tokens in lines[1:])
    if not segs:
        raise InvalidParameter("no segments after the alpha line")
    return from_segments(alpha, segs)


def write(f: PiecewiseFn, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(f), encoding="utf-8")
    return path


def read(path: Path) -> PiecewiseFn:
    return loads(path.read_text(encoding="utf-8"))
