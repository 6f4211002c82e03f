"""
Generating instances and screening them with max flow
=====================================================

Draws a batch of random instances, runs the flow test on each and shows
what a failing instance looks like.
"""
from cecsp import GenConfig, Instance, Job, check_feasibility, generate_instance

for n in (5, 10, 20):
    passed = sum(check_feasibility(generate_instance(
        GenConfig.preset(n, 50.0, seed=s))).passes for s in range(100))
    print(f"n={n:2d}: {passed}/100 instances pass the flow test")

# two jobs that each need the whole capacity over the same unit window
inst = Instance(100.0, [Job(100.0, 0.0, 1.0, 0.0, 100.0),
                        Job(100.0, 0.0, 1.0, 0.0, 100.0)])
rep = check_feasibility(inst)
print(f"\noverloaded: max flow {rep.max_flow_value:g} of {rep.demand:g}")
print("shortfall per job:", rep.shortfall)
print("bottleneck intervals:", rep.saturated_intervals)

# passing the test is necessary, not sufficient: rate lower bounds are
# not part of the network
