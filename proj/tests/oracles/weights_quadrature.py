"""Reference value of the omega-weighted L1 norm of exp(-|x|) on [-50, 50]."""
import mpmath as mp

mp.mp.dps = 30

def S(u):
    return u ** 3 * (10 - 15 * u + 6 * u * u)

def m(x):
    if x <= -1:
        return mp.mpf(0)
    if x >= 1:
        return x
    return x * S((x + 1) / 2)

f = lambda x: mp.e ** (m(x) - abs(x))
val = mp.quad(f, [-50, -1, 0, 1, 50])
print(mp.nstr(val, 20))
