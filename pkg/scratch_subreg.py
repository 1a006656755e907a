import sys, time

sys.path.insert(0, "src")
from wsub.fock import BosonBasis
from wsub import subreg as S

for n in (1, 2):
    t0 = time.time()
    gens = S.strong_generators(n)
    print(f"n={n} generators built ({time.time()-t0:.2f}s)")
    assert gens.rho.check_exp_action(), "rho action on e^-c"
    basis = gens.basis
    for v in (basis.exp(-basis.unit("c")), basis.vacuum()):
        assert gens.rho.symmetric_polynomial_check(v), "sym poly identity"
    print("  rho family checks pass")
    assert gens.verify_weights_and_charges(), "weights/charges"
    print("  weights and charges pass")
    results = S.verify_subreg_opes(gens)
    for r in results:
        print(f"  [{r.status}] {r.name}")
        if not r.passed:
            print("    lhs:", r.lhs)
            print("    rhs:", r.rhs)
            print("    diff:", r.diff)
    assert all(r.passed for r in results)
    a1, a2, a3 = S.u2_relation(gens)
    print(f"  U2 relation: a1={a1}, a2={a2}, a3={a3}")
    for r in S.generation_checks(gens):
        print(f"  [{r.status}] {r.name}")
        assert r.passed, r.diff
    pairs = S.decompose_regular_content(gens, "G-")
    print(f"  G- decomposes into {len(pairs)} pairs")
    for i in list(range(2, n + 1)) + [n + 1]:
        pairs = S.decompose_regular_content(gens, f"U{i}")
        print(f"  U{i} decomposes into {len(pairs)} pairs")
    for name, x in gens.named().items():
        assert S.verify_inverse_screening(x, gens.engine), f"screening kills {name}"
    print("  inverse screening kills all generators")
    for m in range(0, 4):
        for j in range(0, n + 1):
            lhs, ok = S.ith_product_identity(gens, m, j)
            assert ok, f"ith product m={m} j={j}: {lhs}"
    print("  ith product identity passes")
    assert S.alternative_conformal_check(gens)
    print("  alternative conformal structure passes")
    c0 = S.zero_mode_shift(gens, basis.field(3))
    assert c0.is_one, f"G+ zero mode shift = {c0}"
    t0 = time.time()
    p = S.zero_mode_polynomial(n)
    print(f"  zero-mode polynomial ({time.time()-t0:.2f}s): {p}")
    assert p.is_polynomial_in("x") and p.degree("x") <= n + 1

# singular vector layer (numeric)
from fractions import Fraction
assert S.singular_vector_check(2, 3, Fraction(-1, 2))  # 2(k+2)=3 at k=-1/2
assert not S.singular_vector_check(2, 3, Fraction(1, 3))
assert S.simple_quotient_embeds(2, Fraction(-1, 3))
assert not S.simple_quotient_embeds(2, Fraction(1))
assert S.admissible_level_embeds(2, 5, 3)
assert not S.admissible_level_embeds(2, 5, 2)
print("singular vector predicates pass")

gens1 = S.strong_generators(1)
sv = S.singular_vector_product(gens1, 2)
print("n=1 G-_(1) e^{2c} =", sv)

# spectral flow
f = gens1.field
jw, dw = S.spectral_flow_weight(1, f(1), f(2), 1)
print("flowed weight:", jw, dw)
print("flowed mode:", S.spectral_flow_mode(1, "L", 0, 2, f))
print("flowed mode:", S.spectral_flow_mode(1, "G+", 0, 2, f))
v = gens1.basis.exp(-S.b_momentum(gens1.basis))
print("flowed state momenta:", {str(m) for m in S.spectral_flow_state(v, 3).momenta()})

beta, gamma = S.fms_images(gens1.basis)
eng = gens1.engine
bg0 = eng.nth_product(beta, gamma, 0)
bg1 = eng.nth_product(beta, gamma, 1)
print("beta_(0)gamma =", bg0, "| beta_(1)gamma =", bg1)
assert bg0 == gens1.basis.vacuum().scale(-1)
assert bg1.is_zero
screen = gens1.basis.exp(S.fms_screening_momentum(gens1.basis))
assert eng.nth_product(screen, beta, 0).is_zero
assert eng.nth_product(screen, gamma, 0).is_zero
print("FMS bosonisation checks pass")
print("ALL SMOKE TESTS PASS")
