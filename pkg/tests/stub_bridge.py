"""Tiny scripted denoiser process used by the bridge-client tests.

Modes: identity (echo payload), double (payload * 2), badmagic
(corrupted response header), short (truncated response), fail
(diagnostic + exit 3), sleep (hang without answering), wrongsigma
(echoes sigma + 1), persist (identity loop over many frames).
"""

import struct
import sys
import time

HEADER = struct.Struct("<4sIIId")


def read_exact(n):
    buf = b""
    while len(buf) < n:
        chunk = sys.stdin.buffer.read(n - len(buf))
        if not chunk:
            return buf
        buf += chunk
    return buf


def handle_one(mode):
    header = read_exact(HEADER.size)
    if len(header) < HEADER.size:
        return False
    magic, h, w, c, sigma = HEADER.unpack(header)
    payload = read_exact(h * w * c * 8)

    if mode == "fail":
        print("stub: refusing request", file=sys.stderr)
        sys.exit(3)
    if mode == "sleep":
        time.sleep(60)
    if mode == "double":
        import numpy as np

        values = np.frombuffer(payload, dtype="<f8") * 2.0
        payload = values.astype("<f8").tobytes()
    out_sigma = sigma + 1.0 if mode == "wrongsigma" else sigma
    out_magic = b"XXXX" if mode == "badmagic" else b"TDN1"
    response = HEADER.pack(out_magic, h, w, c, out_sigma) + payload
    if mode == "short":
        response = response[: len(response) // 2]
    sys.stdout.buffer.write(response)
    sys.stdout.buffer.flush()
    return True


def main():
    mode = sys.argv[1] if len(sys.argv) > 1 else "identity"
    if mode == "persist":
        while handle_one("identity"):
            pass
    else:
        handle_one(mode)


if __name__ == "__main__":
    main()
