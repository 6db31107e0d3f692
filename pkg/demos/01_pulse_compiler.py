"""Compile one gate through every protection scheme and inspect the schedules.

The compiler turns a named gate into an executable event list: bare hard
pulses, a BB1 composite expansion, or BB1 components individually embedded
in a decoupling cycle.  Every schedule is verified against its target before
it leaves the compiler.
"""

from ddgates import build_schedule, pulse_count, schedule_to_json, verify_schedule

TAU = 1.5e-5

print(f"Hadamard at inter-pulse delay tau = {TAU * 1e6:.0f} us\n")
print(f"{'scheme':14s} {'pulses':>6s} {'duration (us)':>14s} {'zero-noise F':>13s}")
for scheme in ("simple", "simple_padded", "bb1", "xy4", "xy8", "kdd"):
    sched = build_schedule("H", scheme, TAU)
    print(
        f"{scheme:14s} {pulse_count(sched):6d} {sched.total_duration * 1e6:14.1f} "
        f"{verify_schedule(sched):13.12f}"
    )

print("\nEvent stream of the protected NOT (xy4), first cycle:")
sched = build_schedule("NOT", "xy4", TAU)
for ev in sched.events[:9]:
    if ev.kind == "delay":
        print(f"  delay          {ev.duration * 1e6:6.2f} us")
    else:
        print(
            f"  {ev.kind:14s} {ev.duration * 1e6:6.2f} us  "
            f"phase={ev.rotation.phase:+.3f} rad  angle={ev.rotation.angle:+.3f} rad"
        )
print(f"  ... {len(sched.events) - 9} more events")

print("\nSchedules serialize to a self-describing JSON record:")
text = schedule_to_json(build_schedule("NOT", "xy8", TAU))
print("\n".join(text.splitlines()[:6]))
print(f"  ... ({len(text.splitlines())} lines total)")
