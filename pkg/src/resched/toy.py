"""Two-task single-machine demo instance used throughout tests and docs.

One unary machine is down for maintenance over [5, 10).  Task 0 takes 4 units
on average, task 1 takes 5.  Scheduling on averages puts task 1 first (done
by 5, task 0 lands after maintenance, makespan 14).  But when only task 1 is
stochastic, say uniform on {3..7}, a long draw no longer fits before the
maintenance window and the whole plan slips: in expectation task-0-first
(makespan 15) beats task-1-first (16.6).  Picking the plan that looks best
under mean durations is exactly the trap the trainable estimators avoid.
"""

from __future__ import annotations

from .instance import Instance, ResourceDef, Scenario, Task, UnavailabilityWindow
from .scenarios import Sampler, uniform_sampler

# Uniform spread of the stochastic task's duration: {5-2, ..., 5+2}.
STOCHASTIC_HALFWIDTHS = (0, 2)


def toy_instance() -> Instance:
    return Instance(
        tasks=(
            Task(id=0, duration=4, demands=(1,)),
            Task(id=1, duration=5, demands=(1,)),
        ),
        resources=(ResourceDef(id=0, capacity=1),),
        unavailability=(UnavailabilityWindow(resource=0, start=5, end=10),),
    )


def toy_scenarios() -> list[Scenario]:
    """The five equiprobable realizations of the stochastic task."""
    return [Scenario((4, d)) for d in (3, 4, 5, 6, 7)]


def toy_sampler() -> Sampler:
    return uniform_sampler(STOCHASTIC_HALFWIDTHS)
