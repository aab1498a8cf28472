"""Tor lengths and Euler characteristics against A/P, A/Q and (v, w)."""
from frobmult import verify_cli as vc
from frobmult import paperdata as pd
from frobmult.homology import euler_characteristic, koszul_complex, tor_lengths_scalar


def show(label, tor):
    print(f"{label:<22} Tor = {tor}  chi = {euler_characteristic(tor)}")


def main():
    ctx = vc.Context(vc.RunConfig())
    show("chi(N, A/P) scalar", ctx.tor_P_scalar())
    show("chi(N, A/P) groebner", ctx.tor_P_groebner())
    show("chi(N', A/P)", tor_lengths_scalar(pd.build_N_twisted(), ctx.phi(), 8))
    show("chi(N, A/Q)", tor_lengths_scalar(ctx.N, ctx.phi_Q(), 8))
    show("chi(N, P)", tor_lengths_scalar(ctx.N, ctx.resolution_P(), 8))
    kos = koszul_complex([ctx.A.parse("v"), ctx.A.parse("w")], ctx.N, ctx.A)
    show("Koszul(v, w; N)", kos.homology())


if __name__ == "__main__":
    main()
