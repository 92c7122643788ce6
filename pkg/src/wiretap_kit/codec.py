"""Big-endian conversion between integers and d-ary strings (tuples of digits)."""

from .errors import DomainError

_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


def to_digits(value, d, length):
    if not 0 <= value < d**length:
        raise DomainError(f"{value} does not fit in {length} base-{d} digits")
    out = [0] * length
    for i in range(length - 1, -1, -1):
        value, out[i] = divmod(value, d)
    return tuple(out)


def from_digits(digits, d):
    value = 0
    for a in digits:
        if not 0 <= a < d:
            raise DomainError(f"digit {a} outside [0, {d})")
        value = value * d + a
    return value


def format_string(digits, d):
    """Render a string for JSON: one character per symbol when d <= 36."""
    if d <= len(_DIGITS):
        return "".join(_DIGITS[a] for a in digits)
    return ".".join(str(a) for a in digits)


def parse_string(text, d):
    if d <= len(_DIGITS):
        return tuple(_DIGITS.index(c) for c in text)
    return tuple(int(c) for c in text.split(".")) if text else ()


def bits_to_int(bits):
    return from_digits(bits, 2)


def int_to_bits(value, length):
    return to_digits(value, 2, length)
