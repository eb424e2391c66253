"""Flux of paths of automorphisms of the Moyal product.

A path generated by ``dH + c`` (``c`` harmonic) has flux ``c``; products
of paths add fluxes, and a path with zero total flux can be replaced by a
Hamiltonian one with the same endpoint.
"""
from starflux import AutPath, FormalScalar, MoyalProduct, TorusForm, TorusFun, dfun, flux_of_path, hamiltonianize
from starflux.cli import class_text

K = 3
P = MoyalProduct(2, K)
nu = FormalScalar.nu(K)

H = TorusFun({(1, 1): 1, (0, -1): 2}, 2, K).scale(nu)
A = AutPath(dfun(H) + TorusForm.one_form([nu, nu * 3], K), P)
B = AutPath({1: TorusForm.one_form([nu * -2, nu], K)}, P)
print("flux(A) =", class_text(A.flux()))
print("flux(B) =", class_text(B.flux()))
both = A.family().compose(B.family())
print("flux(A_t B_t) =", class_text(flux_of_path((both, P))))

loop = AutPath({0: dfun(H) + TorusForm.one_form([nu, 0], K), 1: TorusForm.one_form([nu * -2, 0], K)}, P)
print("flux of the detour:", class_text(loop.flux()))
Hs = hamiltonianize(loop, probe_bound=1)
same = AutPath.hamiltonian(Hs, P).endpoint().equals_on_probes(loop.endpoint(), 2)
print("Hamiltonian path with the same endpoint found:", same)
