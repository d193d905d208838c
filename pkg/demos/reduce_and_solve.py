"""From an update formula to a satisfiability verdict.

An update modality is rewritten away step by step; the resulting
update-free formula goes to the tableau for transitive frames, and the
witness it returns is checked against the original formula.
"""

from audel import EvalContext, load_model, parse_formula, print_formula, reduce_to_el, sat_del, sat_k4
from audel.model import model_to_dict
from audel.testkit import bundled_data


def main():
    ctx = EvalContext(directory=bundled_data() / "dorm")
    f = parse_formula("<warden@u> (P[i] true & ~B[i] p)")
    el, trace = reduce_to_el(f, ctx)
    print(f"input:   {print_formula(f)}")
    for entry in trace:
        print(f"  {entry.rule:>4} at {list(entry.position)}: {print_formula(entry.after)}")
    print(f"reduced: {print_formula(el)}")

    out = sat_del(f, ctx)
    print(f"\nverdict: {out.verdict}; witness satisfies the input: {out.stats.get('witness_checks_original')}")
    print(model_to_dict(out.witness))

    for text in ("~(B[a] p -> B[a] B[a] p)", "~(~B[a] p -> B[a] ~B[a] p)"):
        print(f"\n{text}: {sat_k4(parse_formula(text)).verdict}")
    print("Positive introspection is valid over transitive frames; negative introspection is not.")

    m = load_model(bundled_data() / "dorm" / "warden_model.json")
    print(f"\nwarden model: {len(m.worlds)} worlds, agents {sorted(m.agents)}")


if __name__ == "__main__":
    main()
