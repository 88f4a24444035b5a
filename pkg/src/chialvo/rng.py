"""Seedable xoshiro256** generator for network initial conditions.

The network runs must be bit-reproducible from a 64-bit seed across
platforms and numpy versions, so the generator is spelled out here
rather than delegated to numpy.  xoshiro256** is the Blackman/Vigna
public-domain generator; the 64-bit seed is expanded to the 256-bit
state with splitmix64, the recommended seeding procedure.
"""

MASK64 = (1 << 64) - 1


def _splitmix64(state):
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


def _rotl(v, k):
    return ((v << k) | (v >> (64 - k))) & MASK64


class Xoshiro256StarStar:
    def __init__(self, seed):
        seed = int(seed) & MASK64
        s = []
        for _ in range(4):
            seed, word = _splitmix64(seed)
            s.append(word)
        self.s = s

    def next_u64(self):
        s0, s1, s2, s3 = self.s
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self.s = [s0, s1, s2, s3]
        return result

    def random(self):
        # 53-bit mantissa convention: top bits of the 64-bit word
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, lo, hi, n):
        return [lo + (hi - lo) * self.random() for _ in range(n)]
