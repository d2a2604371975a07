#!/usr/bin/env python3
"""Classify synthetic fixing trials with the displacement metrics.

Builds before/after marker observations at the mean success and failure
travel distances plus the exact decision boundary, and reports how each is
classified at the 90%-of-push threshold.
"""

from softjig import JigFrameObservation, displacement_report, frame_distance

JIG_WIDTH_PX = 320.0      # 160 mm jig imaged at 0.5 mm per pixel
MARKER_RADIUS_PX = 100.0

TRIALS = {
    "mean success travel": 156.4,   # 78.2 mm
    "mean failure travel": 108.4,   # 54.2 mm
    "decision boundary": 126.0,     # 63.0 mm = 0.9 x 70 mm
}


def observation(cx: float, tag: str) -> JigFrameObservation:
    r = MARKER_RADIUS_PX
    return JigFrameObservation(
        points=((cx, r), (cx + r, 0.0), (cx, -r), (cx - r, 0.0)),
        image_tag=tag,
    )


def main() -> None:
    before = observation(0.0, "before")
    print(f"{'trial':<22} {'travel (mm)':>12} {'frame dist (px)':>16} verdict")
    for name, pixels in TRIALS.items():
        after = observation(pixels, f"after-{name}")
        result = displacement_report(before, after, jig_width_px=JIG_WIDTH_PX)
        verdict = "success" if result.success else "failure"
        print(f"{name:<22} {result.centroid_translation_mm:>12.1f} "
              f"{frame_distance(before, after):>16.3f} {verdict}")


if __name__ == "__main__":
    main()
