"""Ranked beliefs about two purchases.

Every tree over {pre(food), pre(equip), pre(food,equip)} is ranked by how
plausible it is.  Learning that both purchases in a row are impossible
moves the "either one" trees to the top and makes the robot drop its
later intention.
"""
import time

import numpy as np

from paltime import EpistemicState, IntentionDatabase, iterated_revise, models_of_strong, parse
from paltime import scenarios as sc


def table(k, u):
    rows = [("both", sc.BOTH), ("either", sc.EITHER), ("neither", sc.NEITHER)]
    masks = {name: models_of_strong(parse(f, sc.PURCHASE), u).mask for name, f in rows}
    masks["other"] = models_of_strong(sc.purchase_cheaper_only(), u).mask
    for name, m in masks.items():
        print(f"  {name:8s} {int(m.sum()):7d} trees  rank {sorted(set(k.ranks[m].tolist()))}")


def main():
    start = time.perf_counter()
    u = sc.purchase_universe()
    print(f"{len(u.trees)} trees enumerated in {time.perf_counter() - start:.1f}s")
    state = EpistemicState(sc.purchase_ranking(), IntentionDatabase(sc.PURCHASE_INTENTIONS))
    print("before:")
    table(state.ranking, u)
    out = iterated_revise(state, parse(sc.NOT_BOTH, sc.PURCHASE))
    print(f"after revising by {sc.NOT_BOTH}:")
    table(out.ranking, u)
    print(f"intentions {state.intentions.to_text()} -> {out.intentions.to_text()}")
    assert np.all(out.ranking.ranks >= 0)


if __name__ == "__main__":
    main()
