#!/usr/bin/env python3
"""Smoke test for the vabeq_py extension module.

Builds nothing itself: expects the cdylib to exist under target/release (or
target/debug). Copies it next to a temp dir under the import name and runs
the pipeline end to end on the infinite dihedral group and on Z.
"""

import pathlib
import shutil
import sys
import sysconfig
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load_module():
    candidates = [
        ROOT / "target" / "release" / "libvabeq_py.so",
        ROOT / "target" / "debug" / "libvabeq_py.so",
        ROOT / "target" / "release" / "libvabeq_py.dylib",
        ROOT / "target" / "debug" / "libvabeq_py.dylib",
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("build the extension first: cargo build -p vabeq-py --release")
    tmp = tempfile.mkdtemp(prefix="vabeq_py_")
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    shutil.copy2(built, pathlib.Path(tmp) / f"vabeq_py{suffix}")
    sys.path.insert(0, tmp)
    import vabeq_py

    return vabeq_py


DIHEDRAL_GROUP = """vabeq group v1
rank 1
cosets 2
label 0 e
label 1 t
action 0
1
action 1
-1
cocycle 0 0 sigma 0 vec 0
cocycle 0 1 sigma 1 vec 0
cocycle 1 0 sigma 1 vec 0
cocycle 1 1 sigma 0 vec 0
gen a coset 0 vec 1 weight 1
gen t coset 1 vec 0 weight 1
"""

Z_GROUP = """vabeq group v1
rank 1
cosets 1
label 0 e
action 0
1
cocycle 0 0 sigma 0 vec 0
gen a coset 0 vec 1 weight 1
"""

SQUARE_SYSTEM = "vabeq system v1\nvariables 1\neq X1 X1\n"

EXAMPLE_SYSTEM = """vabeq system v1
variables 3
eq X1 X2^-1 X3 [-1; 0]
eq X2^-1 X3
"""


def normal_form(y):
    return ("a" * y) if y >= 0 else ("a^-1" * (-y))


def main():
    vq = load_module()

    dihedral = vq.Group(DIHEDRAL_GROUP)
    assert dihedral.rank == 1 and dihedral.cosets == 2, repr(dihedral)
    assert dihedral.dump() == DIHEDRAL_GROUP

    square = vq.EquationSystem(SQUARE_SYSTEM)
    assert square.variables == 1

    # Solutions of X^2 = 1 in the weight-6 ball: identity plus the
    # reflections (y, t) with |y| <= 5.
    solutions = vq.solve(dihedral, square, 6)
    assert len(solutions) == 12, solutions
    assert [([0], 0)] in [s for s in solutions]
    assert all(coset == 1 for ((_, coset),) in [tuple(s) for s in solutions if s[0][1] == 1])

    # The solution language in normal form.
    language = vq.build_edt0l(dihedral, square)
    words, complete = language.enumerate(8)
    assert complete
    expected = {""} | {normal_form(y) + "t" for y in range(-7, 8)}
    assert set(words) == expected, sorted(words)

    # Round trip through the dump format, DOT export is well-formed.
    again = vq.Edt0l(language.dump())
    assert again.dump() == language.dump()
    assert language.dot().startswith("digraph control")

    # Verified rational growth: sigma = 1, 1, 2, 2, ... = (1 + z^2)/(1 - z).
    report = vq.relative_growth(dihedral, square, 20)
    assert report["status"] == "verified", report
    assert report["coefficients"][:5] == [1, 1, 2, 2, 2]
    assert report["numerator"] == [1, 0, 1]
    assert report["denominator"] == [1, -1]

    # The three-variable example over Z: solutions (1, y, y).
    z = vq.Group(Z_GROUP)
    example = vq.EquationSystem(EXAMPLE_SYSTEM)
    for tuple_ in vq.solve(z, example, 5):
        (x, _), (y, _), (z2, _) = tuple_
        assert x == [1] and y == z2
    exl = vq.build_edt0l(z, example)
    words, complete = exl.enumerate(9)
    assert complete
    assert "a##" in words and "a#a#a" in words and "a#a^-1#a^-1" in words

    # Closure operations compose.
    both = exl.union(language)
    words2, complete = both.enumerate(8)
    assert complete
    assert "t" in words2 and "a##" in words2

    # Multivariate table of X = Y = Z: entries (w, w, w) only.
    xyz = vq.EquationSystem("vabeq system v1\nvariables 3\neq X1 X2^-1\neq X2 X3^-1\n")
    table = vq.multivariate_growth(z, xyz, 9)
    assert table[(0, 0, 0)] == 1
    assert table[(1, 1, 1)] == 2 and table[(3, 3, 3)] == 2
    assert all(len(set(k)) == 1 for k in table)

    # The reduction dump parses back through the text schema.
    reduction = vq.reduce(dihedral, square)
    assert reduction.startswith("vabeq reduction v1")

    print("smoke test passed")


if __name__ == "__main__":
    main()
