"""Joint versus step-by-step revision.

The agent plans the dentist at 0 and eating at 1, then learns that it
cannot eat right after the dentist, and also wants to see a movie at 1.
Doing both changes at once keeps the dentist visit; first revising the
beliefs and then adding the movie can lose it, depending on which
intentions the selection prefers to keep.
"""
from paltime import parse, revise
from paltime.revision import probe_joint_vs_separate
from paltime import scenarios as sc


def main():
    db = sc.dentist_database()
    news = parse(sc.DENTIST_NEWS, sc.DENTIST)
    print(f"beliefs    {sc.DENTIST_BELIEFS}")
    print(f"intentions {db.intentions.to_text()}")
    print(f"news       {sc.DENTIST_NEWS}, new intention movie@1\n")

    joint = revise(db, news, sc.DENTIST_NEW_INTENTION)
    print(f"joint revision:            {joint.intentions.to_text()}")
    for selector in ("temporal", "latest_first"):
        j, s = probe_joint_vs_separate(db, news, sc.DENTIST_NEW_INTENTION, selector=selector)
        print(f"{selector:13s} joint {j.to_text():22s} separate {s.to_text():22s}"
              f" {'differ' if j != s else 'agree'}")


if __name__ == "__main__":
    main()
