"""
Resonance function, its factorization and the trilinear multiplier scan
=======================================================================

For the quintic symbol p(n) = n^5 + beta lambda^-2 n^3 - gamma lambda^-4 n the
phase mismatch H = p(n) - p(n1) - p(n2) - p(n3) over a triple factors
through the pair sums.  After clearing lambda^5 it is an integer identity:

    2 lambda^5 H = (m1+m2)(m2+m3)(m3+m1) (5 (m1^2 + m2^2 + m3^2 + m^2) + 6 beta)

which the audit below checks exactly.  The second half scans the frequency
multiplier over its five regions and prints where the bound is tight.
"""

from kawahara.symbols import (
    DispersionParams,
    FrequencyTriple,
    PhaseSymbol,
    Region,
    case_bound_scan,
    factorization_audit,
    quintic_resonance,
    resonance_H,
    resonance_H_factored,
    scaled_resonance_direct,
    scaled_resonance_factored,
    sextic_family,
)

# One triple on the lambda = 2 torus, evaluated directly and through the factored form.
p = DispersionParams(beta=1.0)
sym = PhaseSymbol.bare(p, lam=2.0)
t = FrequencyTriple(3, -1, 5, lam=2.0)
print(f"triple {t.indices} -> m = {t.m}, pair product = {t.pair_product}")
print(f"H direct = {resonance_H(t, sym):.12f}, H factored = {resonance_H_factored(t, 1.0, 2.0):.12f}")

# Exact rational arithmetic: the two sides agree as Fractions, not just as floats.
print("exact:", scaled_resonance_direct(3, -1, 5, 1, 0, 2) == scaled_resonance_factored(3, -1, 5, 1, 2))

# The full box |m_j| <= 20 in cleared integer arithmetic.
for beta in (0, 1, 2):
    print(f"beta={beta}: violations in the box = {factorization_audit(20, beta, 0)}")

# Resonant triples (a pair sums to zero) give H = 0.
print("resonant triple H:", resonance_H(FrequencyTriple(4, -4, 7), PhaseSymbol.bare(DispersionParams())))

# The degenerate sextic family makes the quintic interaction vanish identically.
outer, inner = sextic_family(10, 3, -5)
print(f"sextic family N=10, a=3, b=-5: outer={outer}, inner={inner}, "
      f"quintic resonance={quintic_resonance(outer, inner, PhaseSymbol.bare(DispersionParams()))}")

# Multiplier scan.  Regions II and IV exceed the bound by a fixed factor that
# does not depend on lambda; the argmax triple shows the extremal configuration.
reports = case_bound_scan(list(Region), s=0.0, b=0.5, delta=0.05, lam=1.0, M_max=64)
for region, rep in reports.items():
    print(f"region {region.value:>3}: max ratio = {rep.max_ratio:.4f} at {rep.argmax_triple} over {rep.count} triples")
