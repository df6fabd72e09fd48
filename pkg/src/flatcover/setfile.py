"""Read and write point sets in the ``flatset v1`` text format.

    # flatset v1
    r=<int>
    mode=points|hexmask
    <payload>

``points`` mode lists one point per line as an r-character binary string
with coordinate 0 leftmost.  ``hexmask`` mode writes the 2^r-bit mask as hex
digits, lowest nibble first, wrapped at 64 digits per line.
"""

from __future__ import annotations

import io
from pathlib import Path
from typing import TextIO

from .errors import ParameterError
from .f2 import PointSet, format_point, parse_point

HEADER = "# flatset v1"
HEX_LINE = 64


def dumps(s: PointSet, mode: str = "points") -> str:
    buf = io.StringIO()
    dump(s, buf, mode)
    return buf.getvalue()


def dump(s: PointSet, fh: TextIO, mode: str = "points") -> None:
    if mode not in ("points", "hexmask"):
        raise ParameterError(f"unknown mode {mode!r}")
    fh.write(f"{HEADER}\nr={s.r}\nmode={mode}\n")
    if mode == "points":
        for p in s:
            fh.write(format_point(p, s.r) + "\n")
        return
    n_nibbles = max(1, (1 << s.r) // 4)
    digits = "".join("%x" % ((s.mask >> (4 * k)) & 0xF) for k in range(n_nibbles))
    for start in range(0, len(digits), HEX_LINE):
        fh.write(digits[start:start + HEX_LINE] + "\n")


def loads(text: str) -> PointSet:
    lines = text.splitlines()
    if len(lines) < 3 or lines[0].strip() != HEADER:
        raise ParameterError("missing '# flatset v1' header")
    r_key, _, r_text = lines[1].strip().partition("=")
    mode_key, _, mode = lines[2].strip().partition("=")
    if r_key != "r" or mode_key != "mode" or not r_text.isdigit():
        raise ParameterError("malformed flatset header")
    r = int(r_text)
    body = [ln.strip() for ln in lines[3:] if ln.strip()]
    if mode == "points":
        pts = []
        for ln in body:
            if len(ln) != r:
                raise ParameterError(f"point {ln!r} is not {r} characters")
            pts.append(parse_point(ln))
        return PointSet.from_points(r, pts)
    if mode == "hexmask":
        digits = "".join(body)
        if len(digits) != max(1, (1 << r) // 4):
            raise ParameterError("hexmask length does not match r")
        mask = 0
        for k, ch in enumerate(digits):
            mask |= int(ch, 16) << (4 * k)
        return PointSet(r, mask)
    raise ParameterError(f"unknown mode {mode!r}")


def write(path: str | Path, s: PointSet, mode: str = "points") -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        dump(s, fh, mode)


def read(path: str | Path) -> PointSet:
    return loads(Path(path).read_text(encoding="ascii"))
