"""The mouse invents a gruffalo and then meets one.

Five updates drive the story: the mouse tells the fox, then the owl, about
an imaginary gruffalo; the mouse then imagines it; a real gruffalo appears
and the others drop out of the picture.  After each step the script prints
how the model grew and checks a few beliefs at the current world.
"""

from audel import EvalContext, iterate_updates, load_model, model_check, parse_formula
from audel.testkit import bundled_data

HERE = bundled_data() / "gruffalo"

CHECKS = {
    0: ["~P[g] true", "P[f] true"],
    1: ["~P[g] true", "P[f] P[g] true", "B[m] B[f] P[g] true"],
    2: ["P[o] P[g] true", "~P[f] P[o] P[g] true"],
    3: ["P[m] P[g] true"],
    4: ["P[g] (p(f,o,g) & P[m] ~P[f] true)", "B[m] P[f] true"],
    5: ["P[g] (p(f,o,g) & q(o,g) & P[m] (~P[f] true & ~P[o] true))"],
}


def main():
    ctx = EvalContext(directory=HERE)
    m = load_model(HERE / "M0.json")
    w = m.designated
    for step in range(6):
        if step:
            m, w = iterate_updates(m, w, [(ctx.frame(f"U{step}"), f"u{step}")])
        print(f"step {step}: world {w}, {len(m.worlds)} worlds, agents {sorted(m.agents)}")
        for text in CHECKS[step]:
            print(f"    {model_check(m, w, parse_formula(text), ctx)!s:<5}  {text}")


if __name__ == "__main__":
    main()
