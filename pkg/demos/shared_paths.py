"""
Cyclic exponential arrays and path sharing
==========================================

How forking a list-decoding path stays cheap: every store is a cyclic
exponential array whose writes replace a single internal array.
"""

from slowpolar import Cea, copies_per_cycle
from slowpolar.cea import changed_array

# sixteen slots, filled once
cea = Cea(4)
for i in range(16):
    cea.write(i, f"a{i}")

# a second cycle: watch which internal array each advancing write replaces
for i in range(13):
    before = cea.last
    cea.write(i, f"b{i}")
    print(f"write {i:2d} after {before:2d} -> replaces {changed_array(before, i)}")

print("tier sizes:", [len(t) for t in cea.tiers], " previous:", len(cea.previous))
print("read(9) =", cea.read(9), " read(14) =", cea.read(14))

# a clone shares every array with its parent until one of them writes
twin = cea.clone()
twin.write(13, "twin")
shared = sum(a is b for a, b in zip(cea.arrays(), twin.arrays()))
print("arrays still shared after one write:", shared, "of", len(cea.arrays()))
print("parent unaffected:", cea.read(12), " twin sees:", twin.read(13))

# amortized cost: copies per full cycle grow like lam * 2**lam / 2
for lam in (2, 4, 8, 12):
    print(f"lam={lam:2d}  copies per cycle {copies_per_cycle(lam)}")
