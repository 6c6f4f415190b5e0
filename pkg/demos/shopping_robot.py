"""A shopping robot that changes its mind.

Walks through the shopping tree: a few truths on its branches, which
plans are coherent with what the robot believes, and what happens when
it adopts the plan of buying equipment at time 1.
"""
from paltime import TOP, BoundedPath, evaluate, is_coherent, parse, revise, weak_beliefs_consistent
from paltime.models import format_tree
from paltime import scenarios as sc


def main():
    tree = sc.shopping_tree()
    print("The tree (node | true atoms):")
    print(format_tree(tree))

    print("\nTruth on branches:")
    for text, branch, _ in sc.SHOPPING_TRUTHS:
        value = evaluate(tree.model(BoundedPath(branch)), parse(text, sc.SHOPPING))
        print(f"  {'.'.join(branch):12s} {text}  ->  {value}")

    print(f"\nBeliefs: {sc.SHOPPING_BELIEFS}")
    for plan in [(("food", 0), ("cook", 1)), (("food", 0), ("equip", 1))]:
        db = sc.shopping_database(plan)
        print(f"  intentions {db.intentions.to_text():20s} coherent={is_coherent(db)}"
              f"  weak beliefs consistent={weak_beliefs_consistent(db)}")

    db = sc.shopping_database()
    out = revise(db, TOP, ("equip", 1))
    print(f"\nAdopting equip@1 on top of {db.intentions.to_text()} gives {out.intentions.to_text()}")


if __name__ == "__main__":
    main()
