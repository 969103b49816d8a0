#!/usr/bin/env python3
"""A tour of the packet format.

Every light repeats one short packet forever: a 5-symbol preamble, a 2-symbol
start delimiter, then one Manchester pair per payload bit. This script builds
packets, shows why the preamble is findable in any phase of the loop, and
round-trips every possible 8-bit payload.
"""

import numpy as np

from lightlink import (build_packet, find_preamble, manchester_encode,
                       packet_size, parse_packet, payload_from_hex,
                       payload_to_hex, symbols_to_text)

print("== framing ==")
payload = payload_from_hex("0x5a", 8)
packet = build_packet(payload)
text = symbols_to_text(packet)
print(f"payload 0x5a -> bits {''.join(map(str, payload))}")
print(f"packet ({packet.size} symbols): {text}")
print(f"  preamble {text[:5]} | sfd {text[5:7]} | payload pairs {text[7:]}")
print(f"packet_size(n) for n=1,8,16: "
      f"{[packet_size(n) for n in (1, 8, 16)]}")

print("\n== the encoded payload is DC balanced ==")
symbols = manchester_encode(payload)
print(f"{symbols.sum()} on-symbols out of {symbols.size} "
      f"(the light carries no perceivable flicker)")

print("\n== the receiver sees an arbitrary window of the loop ==")
loop = np.tile(packet, 3)
for cut in (0, 5, 17):
    window = loop[cut:cut + 50]
    hits = find_preamble(window)
    decoded = parse_packet(window)
    print(f"cut at symbol {cut:2d}: preambles at {hits}, "
          f"decoded {payload_to_hex(decoded)}")

print("\n== repetition also settles disagreements ==")
noisy = np.concatenate([build_packet(payload), build_packet(payload),
                        build_packet(payload_from_hex("0xa5", 8))])
print(f"two 0x5a copies + one 0xa5 copy -> vote picks "
      f"{payload_to_hex(parse_packet(noisy))}")

print("\n== exhaustive round trip ==")
ok = 0
for value in range(256):
    bits = payload_from_hex(hex(value), 8)
    ok += np.array_equal(parse_packet(build_packet(bits)), bits)
print(f"{ok}/256 payloads survive encode -> parse")
