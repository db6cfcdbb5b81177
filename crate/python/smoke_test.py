"""Smoke test for the pyguess extension module.

Build and install first, e.g. `maturin develop -m crates/py/Cargo.toml`,
then run `python python/smoke_test.py`.
"""

import pyguess as pg


def main() -> None:
    phi = pg.parse("f(1) = 0")
    assert pg.eval_qf(phi, pg.Oracle("prefix:[3,0,2]:pad0")) == (True, [1])
    assert pg.attempt(pg.parse("f(5) = 0"), [3, 0, 2]) == ("failed", 5)

    sigma = pg.parse("exists x. forall y. f(x) = 0")
    pi = pg.parse("forall x. exists y. f(y) = 0")
    assert sigma.classify() == "sigma2" and pi.classify() == "pi2"
    assert [pg.mu(sigma, p) for p in ([3, 0, 2], [3, 1, 2], [0])] == [1, 3, 0]

    g = pg.Guesser.from_delta2(pi, sigma)
    assert [g.guess(p) for p in ([3, 0, 2], [3, 1, 2], [0])] == [1, 0, 1]
    t = g.trace(pg.Oracle("plantzero:5"), 40)
    assert t.final_guess == 1 and t.stable_from == 6

    pi2, sigma2 = pg.sentences_from_guesser("Gz")
    assert str(sigma2) == "exists x. forall y. (y > x -> Gz[ f(z) : z .. y ] = 1)"
    assert pg.parse(str(pi2)) == pi2

    r = pg.diagonalize(pg.Guesser.builtin("parity"), 10, 10_000)
    assert r.completed and r.flips == list(range(1, 11))
    r = pg.diagonalize(pg.Guesser.builtin("const-1"), 10, 100)
    assert not r.completed and r.status.startswith("budget_exhausted(phase=2")
    r = pg.cantor_adversary(pg.Guesser.builtin("last-is-5"), 10, 100)
    assert r.completed and set(r.prefix) <= {0, 5}
    r = pg.permutation_adversary(pg.Guesser.builtin("initial-segment"), 6, 100)
    assert len(set(r.prefix)) == len(r.prefix)

    assert pg.unpair(5) == (0, 2) and pg.pair(0, 2) == 5
    try:
        pg.parse("forall x. (")
    except ValueError as e:
        assert "syntax error" in str(e)
    else:
        raise AssertionError("expected a syntax error")
    print("pyguess smoke test passed")


if __name__ == "__main__":
    main()
