"""Fixed-width bit-string helpers.

Elements are stored internally as non-negative integers; the public query
interface speaks fixed-width ASCII strings of '0'/'1', most significant bit
first.
"""

from .errors import MalformedQueryError


def to_bits(x: int, width: int) -> str:
    """Encode ``x`` as a ``width``-bit string, MSB first."""
    if width < 1:
        raise MalformedQueryError(f"width must be positive, got {width}")
    if x < 0 or x >= 1 << width:
        raise MalformedQueryError(f"{x} does not fit in {width} bits")
    return format(x, f"0{width}b")


def from_bits(s: str, width: int | None = None) -> int:
    """Decode a bit string, checking width and alphabet."""
    if not isinstance(s, str) or not s or any(c not in "01" for c in s):
        raise MalformedQueryError(f"not a bit string: {s!r}")
    if width is not None and len(s) != width:
        raise MalformedQueryError(
            f"expected width {width}, got width {len(s)} ({s!r})"
        )
    return int(s, 2)


def as_int(x, width: int) -> int:
    """Accept an element as either an int or a bit string; return the int.

    Integers are range-checked against ``width``; strings are width-checked.
    """
    if isinstance(x, str):
        return from_bits(x, width)
    x = int(x)
    if x < 0 or x >= 1 << width:
        raise MalformedQueryError(f"{x} out of range for {width} bits")
    return x


def pair_encode(r: int, z: int, n: int) -> int:
    """Pack two n-bit numbers into one 2n-bit number, ``r`` in the high bits."""
    return (r << n) | z


def pair_decode(x: int, n: int) -> tuple[int, int]:
    """Split a 2n-bit number into its high and low n-bit halves."""
    return x >> n, x & ((1 << n) - 1)
