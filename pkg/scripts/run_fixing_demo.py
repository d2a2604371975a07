#!/usr/bin/env python3
"""Plan fixing configurations for both assembly orders of the proxy product.

Prints the per-step posture / fixed-part table for each order, plus the
relation matrices backing the decisions.
"""

import time

from softjig import (
    AssemblySequence,
    DIRECTION_ORDER,
    compute_relation_matrices,
    configure_fixing_parts,
    proxy_assembly,
)

SEQUENCES = ["motor,plate,bolts", "plate,bolts,motor"]


def main() -> None:
    assembly = proxy_assembly()
    print(f"parts: {', '.join(assembly.part_ids)}")
    print(f"contact tolerance: {assembly.contact_epsilon:.4f} mm\n")

    matrices = compute_relation_matrices(assembly)
    print("contact matrix:")
    for row in matrices.contact.astype(int):
        print("   ", row.tolist())
    print("\ninterference-free matrices (row static, column moving):")
    for d in DIRECTION_ORDER:
        print(f"  {d.value}: {matrices.interference_free[d].astype(int).tolist()}")

    for seq_text in SEQUENCES:
        sequence = AssemblySequence.parse(seq_text)
        started = time.perf_counter()
        plan = configure_fixing_parts(assembly, sequence)
        elapsed = time.perf_counter() - started
        print(f"\nassembly order [{seq_text}]  ({elapsed:.2f} s)")
        print(f"  {'step':>4}  {'posture':>7}  {'fixed part':<12} {'CoG height (mm)':>16}")
        for step in plan.steps:
            print(f"  {step.step_index:>4}  {step.posture_label.value:>7}  "
                  f"{step.fixed_part:<12} {step.cog_height:>16.3f}")
        if not plan.complete:
            print(f"  halted: {plan.halt_reason}")


if __name__ == "__main__":
    main()
