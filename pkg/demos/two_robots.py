"""Two household robots sharing plans.

The second robot learns it cannot clean at time 1.  That removes its own
cleaning intention and the joint plan to move furniture afterwards; the
breakfast plan survives.  Then both robots commit to cooking lunch
together at time 2, which pushes out the breakfast plan.
"""
from paltime import intention_view, mas_revise_collective, mas_revise_individual, theta, to_text
from paltime.multiagent import agent_coherent
from paltime import scenarios as sc


def show(system, title):
    print(title)
    for ag in sc.AGENTS:
        print(f"  {ag}: intentions {system.dbs[ag].intentions.to_text():12s}"
              f" coherent={agent_coherent(system, ag)}")
    print("  collective:", ", ".join(repr(c) for c in system.collective) or "none")


def main():
    system = sc.robot_system()
    show(system, "start")
    print("  joint actions the first robot expects:")
    for f in theta(intention_view(system, "ag1"), sc.ROBOTS, sc.AGENTS):
        print("   ", to_text(f)[:90])

    first = mas_revise_individual(system, "ag2", sc.robot_no_cleaning())
    show(first.system, "\nafter the second robot learns it cannot clean")
    print("  dropped:", first.dropped_collective, first.dropped_individual)

    second = mas_revise_collective(first.system, sc.C3)
    show(second.system, "\nafter committing to lunch together")


if __name__ == "__main__":
    main()
