"""Canonical sample fixtures used across tests, docs, and the CLI demo.

Two hand-built problem-solving records mirror the classic verification
outcomes: a Heisenberg-picture ladder-operator derivation where both the
math and the physics check out, and an infinite-well energy computed at
n=0 where the arithmetic is right but the zero-point-energy constraint is
violated.
"""

from __future__ import annotations

from .records import SampleRecord

HEISENBERG_ANSWER = """\
Step 1 (equation of motion). With H = hbar*w*raise*lower, the commutator
[H, a] = -hbar*w*a gives da/dt = -I*w*a.
Step 2 (time evolution). Solving the ODE: a(t) = a_0*exp(-I*w*t), and the
adjoint evolves as a_0^dag*exp(I*w*t).
@claim{kind=final_expression, expr=a_0*exp(-I*w*t)}
Step 3 (consistency). The phases cancel in the equal-time commutator, so
[a(t), a^dag(t)] = exp(-I*w*t)*exp(I*w*t)*[a(0), a^dag(0)] = 1 for all t:
the canonical commutation relation is time-independent.
@claim{kind=commutator, a=exp(-I*w*t)*lower, b=exp(I*w*t)*raise, result=1}
"""

HEISENBERG_REFERENCE = """\
a(t) = a_0*exp(-I*w*t); the equal-time commutator stays 1 at all times.
@claim{kind=final_expression, expr=a_0*exp(-I*w*t)}
@claim{kind=commutator, a=exp(-I*w*t)*lower, b=exp(I*w*t)*raise, result=1}
"""

HEISENBERG_SAMPLE = SampleRecord(
    id="fx-heisenberg-ladder",
    task_type="problem_solving",
    topic="quantum optics",
    difficulty="hard",
    question=(
        "For a single-mode cavity field with H = hbar*w*a^dag*a, derive a(t) "
        "in the Heisenberg picture and show that [a(t), a^dag(t)] is "
        "time-independent."
    ),
    answer=HEISENBERG_ANSWER,
    reference_answer=HEISENBERG_REFERENCE,
    think_trace="<think>Heisenberg equation, then phase cancellation.</think>",
)

BOX_N0_ANSWER = """\
The energy levels of the one-dimensional infinite well are
E_n = n^2*pi^2*hbar^2/(2*m*L^2).
Substituting the requested quantum number n = 0:
E_0 = 0^2*pi^2*hbar^2/(2*m*L^2) = 0.
@claim{kind=numeric, value=0, ref=n^2*pi^2*hbar^2/(2*m*L^2), where=(n:0; m:1; L:1)}
So the particle's energy in this state is zero.
@claim{kind=energy, value=0, n=0, system=bound_state}
"""

BOX_N0_SAMPLE = SampleRecord(
    id="fx-box-zero-point",
    task_type="problem_solving",
    topic="bound states",
    difficulty="easy",
    question=(
        "A particle of mass m sits in a one-dimensional infinite potential "
        "well of width L. Using the standard energy formula, compute the "
        "energy E_n for the state with quantum number n = 0."
    ),
    answer=BOX_N0_ANSWER,
    reference_answer=(
        "E_n = n^2*pi^2*hbar^2/(2*m*L^2); substitution at n=0 gives 0, but no "
        "physical bound state exists there (n must be a positive integer)."
    ),
)

CANONICAL_SAMPLES = (HEISENBERG_SAMPLE, BOX_N0_SAMPLE)
