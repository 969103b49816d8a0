"""Packet framing and Manchester line coding for the light channel.

A payload (the hardware ID of a light) is a short sequence of bits. On the
wire it travels as channel symbols, 1 = light on, 0 = light off. Each payload
bit is Manchester encoded (0 -> "10", 1 -> "01"), which keeps the number of
on and off symbols balanced so the light shows no visible flicker, and bounds
runs of identical symbols at two. The packet head is a fixed preamble "10001"
followed by a start frame delimiter "01"; the triple zero in the preamble can
never occur in encoded payload data, which is what makes the frame boundary
findable in a raw symbol stream.

Payloads and symbol streams are plain 1-D uint8 arrays over {0, 1} (any
sequence of 0/1 ints is accepted and coerced). All functions are pure, so
values can be shared freely across threads.
"""

import numpy as np

PREAMBLE = (1, 0, 0, 0, 1)
SFD = (0, 1)
SYMBOLS_PER_BIT = 2

DEFAULT_PAYLOAD_BITS = 8


class CodecError(ValueError):
    """Base class for framing and line-code errors."""


class OddLengthError(CodecError):
    """Manchester input has an odd number of symbols."""


class InvalidPairError(CodecError):
    """A symbol pair is not a Manchester codeword (got 00 or 11)."""


class NoPacketError(CodecError):
    """No preamble in the stream leads to a complete, valid payload."""


class FramingConfig:
    """Frame layout constants: preamble, start delimiter, symbols per bit.

    The defaults are the link's fixed wire format; the type exists so the
    layout travels as one value rather than three loose arguments.
    """

    def __init__(self, preamble=PREAMBLE, sfd=SFD, symbols_per_bit=SYMBOLS_PER_BIT):
        self.preamble = tuple(int(s) for s in preamble)
        self.sfd = tuple(int(s) for s in sfd)
        self.symbols_per_bit = int(symbols_per_bit)
        if not self.preamble or not self.sfd:
            raise ValueError("preamble and sfd must be non-empty")
        if any(s not in (0, 1) for s in self.preamble + self.sfd):
            raise ValueError("framing patterns must be over {0, 1}")
        if self.symbols_per_bit < 1:
            raise ValueError("symbols_per_bit must be >= 1")

    def __repr__(self):
        return (f"FramingConfig(preamble={self.preamble}, sfd={self.sfd}, "
                f"symbols_per_bit={self.symbols_per_bit})")


DEFAULT_FRAMING = FramingConfig()


def _as_bits(seq, name="sequence"):
    arr = np.asarray(seq, dtype=np.uint8).ravel()
    if arr.size == 0:
        raise ValueError(f"{name} must be non-empty")
    if not np.all((arr == 0) | (arr == 1)):
        raise ValueError(f"{name} must contain only 0 and 1")
    return arr


def packet_size(n_bits, framing=DEFAULT_FRAMING):
    """Total symbols in a packet carrying n_bits of payload."""
    if n_bits < 1:
        raise ValueError("n_bits must be >= 1")
    return len(framing.preamble) + len(framing.sfd) + n_bits * framing.symbols_per_bit


def manchester_encode(payload):
    """Encode payload bits to channel symbols, one "10"/"01" pair per bit."""
    bits = _as_bits(payload, "payload")
    out = np.empty(2 * bits.size, dtype=np.uint8)
    out[0::2] = 1 - bits
    out[1::2] = bits
    return out


def manchester_decode(symbols):
    """Invert manchester_encode.

    Raises OddLengthError for streams that cannot split into pairs and
    InvalidPairError when a pair is 00 or 11.
    """
    syms = _as_bits(symbols, "symbols")
    if syms.size % 2 != 0:
        raise OddLengthError(f"symbol count {syms.size} is odd")
    first = syms[0::2]
    second = syms[1::2]
    if np.any(first == second):
        bad = int(np.argmax(first == second))
        raise InvalidPairError(f"pair at symbol {2 * bad} is not a Manchester codeword")
    return second.copy()


def build_packet(payload, framing=DEFAULT_FRAMING, n_bits=None):
    """Assemble preamble + SFD + Manchester-encoded payload.

    When n_bits is given the payload length must match it (the receiver
    expects a fixed width).
    """
    bits = _as_bits(payload, "payload")
    if n_bits is not None and bits.size != n_bits:
        raise ValueError(f"payload has {bits.size} bits, expected {n_bits}")
    return np.concatenate([
        np.asarray(framing.preamble, dtype=np.uint8),
        np.asarray(framing.sfd, dtype=np.uint8),
        manchester_encode(bits),
    ])


def find_preamble(stream, framing=DEFAULT_FRAMING):
    """All indices where the preamble pattern starts, in ascending order."""
    syms = np.asarray(stream, dtype=np.uint8).ravel()
    pat = np.asarray(framing.preamble, dtype=np.uint8)
    if syms.size < pat.size:
        return []
    windows = np.lib.stride_tricks.sliding_window_view(syms, pat.size)
    hits = np.nonzero(np.all(windows == pat, axis=1))[0]
    return [int(i) for i in hits]


def parse_packet(stream, framing=DEFAULT_FRAMING, n_bits=DEFAULT_PAYLOAD_BITS):
    """Recover a payload from a raw symbol stream.

    Every preamble hit is tried: the SFD must follow, then 2*n_bits symbols
    are Manchester decoded. Because the transmitter loops the same packet,
    the stream usually carries several copies; when more than one decodes,
    disagreements are settled by a per-bit majority vote (ties go to the
    earliest copy). Raises NoPacketError when nothing decodes.
    """
    syms = np.asarray(stream, dtype=np.uint8).ravel()
    m = len(framing.preamble)
    s = len(framing.sfd)
    span = packet_size(n_bits, framing)
    sfd = np.asarray(framing.sfd, dtype=np.uint8)

    copies = []
    for i in find_preamble(syms, framing):
        if i + span > syms.size:
            continue
        if not np.array_equal(syms[i + m:i + m + s], sfd):
            continue
        body = syms[i + m + s:i + span]
        try:
            copies.append(manchester_decode(body))
        except CodecError:
            continue

    if not copies:
        raise NoPacketError("no complete valid packet in stream")
    if len(copies) == 1:
        return copies[0]
    stack = np.stack(copies)
    votes = stack.sum(axis=0)
    majority = (2 * votes > stack.shape[0]).astype(np.uint8)
    tie = 2 * votes == stack.shape[0]
    majority[tie] = stack[0][tie]
    return majority


def symbols_to_text(symbols):
    """Render a symbol stream as a '0'/'1' string (CLI and debug form)."""
    return "".join(str(int(s)) for s in np.asarray(symbols).ravel())


def text_to_symbols(text):
    """Parse the '0'/'1' string form back into a symbol array."""
    if not text or any(c not in "01" for c in text):
        raise ValueError("symbol text must be a non-empty string over '0'/'1'")
    return np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0")


def payload_from_hex(hex_str, n_bits=DEFAULT_PAYLOAD_BITS):
    """Hex string (with or without 0x) to an MSB-first bit array of n_bits."""
    if n_bits < 1:
        raise ValueError("n_bits must be >= 1")
    value = int(hex_str, 16)
    if value < 0 or value >= (1 << n_bits):
        raise ValueError(f"payload {hex_str} does not fit in {n_bits} bits")
    return np.array([(value >> (n_bits - 1 - i)) & 1 for i in range(n_bits)],
                    dtype=np.uint8)


def payload_to_hex(bits):
    """MSB-first bit array to a 0x-prefixed hex string."""
    arr = _as_bits(bits, "payload")
    value = 0
    for b in arr:
        value = (value << 1) | int(b)
    width = (arr.size + 3) // 4
    return f"0x{value:0{width}x}"
