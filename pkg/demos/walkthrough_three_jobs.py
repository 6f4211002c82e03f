"""
A three-job walkthrough
=======================

Builds the small three-job instance with capacity 50, lists the event
precedences its time windows imply, scores a few event orders with the
schedule LP and finally finds the optimum by enumeration.
"""
from cecsp import (EventOrder, enumerate_exact, implicit_precedences,
                   score_order, three_job_instance, validate_schedule)

inst = three_job_instance()
for j, jb in enumerate(inst.jobs, start=1):
    print(f"job {j}: E={jb.e_total:g} window=[{jb.release:g}, {jb.deadline:g}] "
          f"rate in [{jb.p_min:g}, {jb.p_max:g}] w={jb.weight:g}")

# event 2j-1 starts job j, event 2j completes it
prec = implicit_precedences(inst)
print("\nimplied precedences:", sorted(prec.pairs))

# the slack-free LP gives the best schedule for a fixed order, or nothing
# when no schedule follows that order
for seq in ([1, 2, 3, 4, 5, 6], [1, 3, 2, 4, 5, 6], [1, 3, 4, 5, 2, 6]):
    order = EventOrder(seq)
    sched, score = score_order(inst, order, weights=None)
    print(f"{order.label():24s} objective {score:.4f}")

res = enumerate_exact(inst)
print(f"\noptimum {res.objective:.6f} over {res.explored} orders: "
      f"{res.order.label()}")
for j in range(1, inst.n + 1):
    print(f"  C{j} = {res.schedule.completion(j):.4f}")
print(validate_schedule(inst, res.order, res.schedule).summary())
