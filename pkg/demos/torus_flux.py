"""Deformed flux of the coordinate rotations of the 2-torus.

Builds the Fedosov data for a flat connection and
``Omega = (nu C1 + nu^2 C2) dtheta1 ^ dtheta2``, lifts each rotation loop to
the Weyl algebra and compares the resulting class with the direct average
of ``i(v) Omega``.
"""
from starflux import FedosovData, classical_flux, flux_def_closed_form, loop_lift
from starflux.cli import class_text

K = 3

for C in [(1, 0), (2, 5), (-1, 3)]:
    data = FedosovData(None, C, K=K)
    print(f"Omega coefficients C1, C2 = {C}")
    for v in [(1, 0), (0, 1)]:
        lift = loop_lift(v, data)
        direct = flux_def_closed_form(v, data)
        print(f"  loop v={v}: classical {class_text(classical_flux(v, K))}  "
              f"lifted {class_text(lift.flux)}  averaged {class_text(direct)}")
