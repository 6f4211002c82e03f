"""
Drawing a resource profile
==========================

Solves a random instance and writes its schedule as an SVG: stacked
rates per interval under the dashed capacity line.
"""
import sys

from cecsp import GenConfig, SAConfig, generate_instance
from cecsp.gantt import save_svg
from cecsp.search import solve

out = sys.argv[1] if len(sys.argv) > 1 else "profile.svg"
inst = generate_instance(GenConfig.preset(6, 50.0, seed=4))
res = solve(inst, SAConfig.for_instance(6, max_iter=300, seed=0))
sched = res.best_feasible_schedule or res.best_schedule
save_svg(inst, sched, out, title=f"n=6, objective {sched.objective(inst):.2f}")
print(f"wrote {out}")
