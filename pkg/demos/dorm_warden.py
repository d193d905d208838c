"""A new warden arrives at a dormitory.

Before the arrival the warden ``i`` does not exist at all, so ``P[i] true``
is false.  The update adds ``i`` with beliefs ascribed by the residents, and
we look at what the newcomer believes about the fluent ``p``.
"""

from audel import iterate_updates, load_frame, load_model, model_check, parse_formula
from audel.frames import add_set, observers
from audel.model import to_dot
from audel.testkit import bundled_data

DORM = bundled_data() / "dorm"


def show(m, w, text):
    print(f"  {text:<28} {model_check(m, w, parse_formula(text))}")


def main():
    m = load_model(DORM / "warden_model.json")
    U = load_frame(DORM / "warden.json")
    s = m.designated

    print(f"Before the arrival, at {s}:")
    for text in ("P[i] true", "B[a] p", "B[r1] p"):
        show(m, s, text)

    print(f"\nEvent {U.designated}: adds {sorted(add_set(U, U.designated))}, "
          f"observed by {sorted(observers(U, U.designated))}")

    after, w = iterate_updates(m, s, [(U, U.designated)])
    print(f"\nAfter the arrival, at {w} ({len(after.worlds)} worlds):")
    for text in ("P[i] true", "B[i] p", "B[i] ~p", "B[a] p"):
        show(after, w, text)

    print("\nThe warden exists but has no settled opinion about p.")
    print("\nGraphviz rendering of the updated model:\n")
    print(to_dot(after, "warden"))


if __name__ == "__main__":
    main()
