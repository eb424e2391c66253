"""The flat Fedosov product with vanishing curvature series is the Moyal product.

Also shows how a non-flat constant connection changes the product while
keeping it associative.
"""
import random

from starflux import FedosovProduct, MoyalProduct, SymplecticConnection, TorusFun, check_associativity
from starflux.acceptance import random_fun
from starflux.dynamics import probe_modes

K = 3
fed, moy = FedosovProduct(2, K), MoyalProduct(2, K)
mismatch = sum(fed.pair(m, n) != moy.pair(m, n) for m in probe_modes(2, 2) for n in probe_modes(2, 2))
print(f"flat Fedosov vs Moyal on 625 mode pairs: {mismatch} mismatches")

e10, e01 = TorusFun.mode((1, 0), 1, K), TorusFun.mode((0, 1), 1, K)
print("e10 * e01 =", moy.star(e10, e01))

conn = SymplecticConnection.from_lowered({(0, 0, 0): 1, (0, 1, 1): -1})
curved = FedosovProduct(2, 2, conn, Omega=(1,))
print("with a constant Christoffel connection, e10 * e01 =", curved.star(e10.with_order(2), e01.with_order(2)))
rng = random.Random(0)
F, G, H = (random_fun(rng, 2, 2, 1, 2) for _ in range(3))
print("associativity residual on a random triple:", check_associativity(curved, F, G, H))
