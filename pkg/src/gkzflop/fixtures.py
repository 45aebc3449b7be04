"""Fixture file IO and the two bundled wall-crossing fixtures.

File format::

    rank <d>
    <d integers per point line, one line per point>
    deg <d integers>
    triangulation <label>
    <one cone per line, 1-based point indices>
    triangulation <label>
    ...

Blank lines and '#' comments are tolerated on parse; the writer emits the
canonical form (no comments), and the bundled files round-trip bit-exactly.
"""

import importlib.resources

from .errors import ParseError
from .toric import ToricData, Triangulation

BUNDLED = ("a1", "conifold")


def parse_fixture(text):
    """Parse fixture text into (ToricData, {label: Triangulation})."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("rank "):
        raise ParseError("fixture must start with a 'rank d' line")
    try:
        rank = int(lines[0].split()[1])
    except (IndexError, ValueError):
        raise ParseError("malformed rank line") from None
    if rank < 1:
        raise ParseError("rank must be positive")
    points = []
    i = 1
    while i < len(lines) and not lines[i].startswith("deg"):
        parts = lines[i].split()
        try:
            row = tuple(int(p) for p in parts)
        except ValueError:
            raise ParseError(f"bad point line: {lines[i]!r}") from None
        if len(row) != rank:
            raise ParseError(f"point line has {len(row)} coordinates, want {rank}")
        points.append(row)
        i += 1
    if i == len(lines):
        raise ParseError("missing deg line")
    parts = lines[i].split()
    if parts[0] != "deg" or len(parts) != rank + 1:
        raise ParseError("malformed deg line")
    try:
        deg = tuple(int(p) for p in parts[1:])
    except ValueError:
        raise ParseError("malformed deg line") from None
    if not points:
        raise ParseError("fixture has no points")
    i += 1
    triangulations = {}
    current_label = None
    current_cones = []
    def flush():
        if current_label is None:
            return
        if not current_cones:
            raise ParseError(f"triangulation {current_label!r} has no cones")
        triangulations[current_label] = Triangulation(
            label=current_label, maximal=tuple(current_cones))
    while i < len(lines):
        if lines[i].startswith("triangulation"):
            flush()
            parts = lines[i].split()
            if len(parts) != 2:
                raise ParseError("malformed triangulation header")
            current_label = parts[1]
            if current_label in triangulations:
                raise ParseError(f"duplicate triangulation {current_label!r}")
            current_cones = []
        else:
            if current_label is None:
                raise ParseError(f"cone line outside a triangulation: {lines[i]!r}")
            try:
                idx = [int(p) for p in lines[i].split()]
            except ValueError:
                raise ParseError(f"bad cone line: {lines[i]!r}") from None
            if not idx or len(set(idx)) != len(idx):
                raise ParseError(f"bad cone line: {lines[i]!r}")
            for j in idx:
                if not 1 <= j <= len(points):
                    raise ParseError(f"cone index {j} out of range")
            current_cones.append(frozenset(j - 1 for j in idx))
        i += 1
    flush()
    if not triangulations:
        raise ParseError("fixture has no triangulations")
    return ToricData(rank=rank, points=tuple(points), deg=deg), triangulations


def write_fixture(data, triangulations):
    """Canonical fixture text for (ToricData, {label: Triangulation})."""
    out = [f"rank {data.rank}"]
    for v in data.points:
        out.append(" ".join(str(x) for x in v))
    out.append("deg " + " ".join(str(x) for x in data.deg))
    for label, t in triangulations.items():
        out.append(f"triangulation {label}")
        for sigma in t.maximal:
            out.append(" ".join(str(j + 1) for j in sorted(sigma)))
    return "\n".join(out) + "\n"


def fixture_text(name):
    """Raw text of a bundled fixture."""
    if name not in BUNDLED:
        raise ParseError(f"unknown fixture {name!r}; bundled: {', '.join(BUNDLED)}")
    ref = importlib.resources.files("gkzflop").joinpath(f"data/{name}.txt")
    return ref.read_text()


def load_fixture(name_or_path):
    """Load a bundled fixture by name, or any fixture file by path."""
    if name_or_path in BUNDLED:
        text = fixture_text(name_or_path)
    else:
        try:
            with open(name_or_path) as fh:
                text = fh.read()
        except OSError as exc:
            raise ParseError(f"cannot read fixture {name_or_path!r}: {exc}") from None
    return parse_fixture(text)
