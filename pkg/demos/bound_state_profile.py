"""How tightly are the two polaritons bound?

Take the upper bound state of sector P=1 and look at the joint probability
of finding the excitations a distance d apart.  At g/J = 5 almost all weight
sits on the same or neighbouring cavities; just above the critical coupling
the pair spreads out over several sites.
"""


from jchbound import ModelParams
from jchbound.cli import bound_state_probabilities

N, P = 50, 1


def show(g):
    params = ModelParams(N, 0.0, 1.0, g)
    for branch, lam, probs in bound_state_probabilities(params, P):
        print(f"g/J = {g}, {branch} branch, lambda = {lam:+.6f}")
        print(f"  same-site + neighbour mass {probs.nn_mass:.4f}, rms separation {probs.width:.3f}")
        seps, ff, fa, aa = probs.symmetric(4)
        print("     d    photon-photon  photon-atom   atom-atom")
        for d, a, b, c in zip(seps, ff, fa, aa):
            print(f"  {d:4d}    {a:.5f}       {b:.5f}      {c:.5f}")


if __name__ == "__main__":
    for g in (5.0, 1.8):
        show(g)
        print()
