"""Reference MT19937-64 + Box-Muller stream used to freeze generator values.

Independent of the C++ code: the engine follows the published MT19937-64
recurrence (Matsumoto & Nishimura), seeded as std::mt19937_64.
"""
import math
import sys

NN, MM = 312, 156
MATRIX_A = 0xB5026F5AA96619E9
UM, LM = 0xFFFFFFFF80000000, 0x7FFFFFFF
MASK = (1 << 64) - 1


class MT64:
    def __init__(self, seed):
        self.mt = [0] * NN
        self.mt[0] = seed & MASK
        for i in range(1, NN):
            prev = self.mt[i - 1]
            self.mt[i] = (6364136223846793005 * (prev ^ (prev >> 62)) + i) & MASK
        self.mti = NN

    def next(self):
        if self.mti >= NN:
            for i in range(NN):
                x = (self.mt[i] & UM) | (self.mt[(i + 1) % NN] & LM)
                xa = x >> 1
                if x & 1:
                    xa ^= MATRIX_A
                self.mt[i] = self.mt[(i + MM) % NN] ^ xa
            self.mti = 0
        x = self.mt[self.mti]
        self.mti += 1
        x ^= (x >> 29) & 0x5555555555555555
        x ^= (x << 17) & 0x71D67FFFEDA60000
        x ^= (x << 37) & 0xFFF7EEE000000000
        x ^= x >> 43
        return x & MASK


def normals(seed, count):
    eng = MT64(seed)
    out = []
    while len(out) < count:
        u1 = ((eng.next() >> 11) + 1) * 2.0**-53
        u2 = (eng.next() >> 11) * 2.0**-53
        r = math.sqrt(-2.0 * math.log(u1))
        out.append(r * math.cos(2.0 * math.pi * u2))
        out.append(r * math.sin(2.0 * math.pi * u2))
    return out[:count]


if __name__ == "__main__":
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else 1
    eng = MT64(5489)
    for _ in range(9999):
        eng.next()
    print("10000th default output", eng.next())
    for v in normals(seed, 6):
        print(repr(v))
