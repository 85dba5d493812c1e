"""Stick-figure SVG rendering for 12-joint skeleton sequences."""

from __future__ import annotations

from pathlib import Path

from .data import SkeletonSequence
from .errors import DataError

# fixed 11-edge tree over the default 12-joint layout:
# 0/1 shoulders, 2/3 elbows, 4/5 wrists, 6/7 hips, 8/9 knees, 10/11 ankles
BONES = (
    (0, 1),            # shoulder girdle
    (0, 2), (2, 4),    # left arm
    (1, 3), (3, 5),    # right arm
    (0, 6), (1, 7),    # torso sides
    (6, 8), (8, 10),   # left leg
    (7, 9), (9, 11),   # right leg
)


def _to_px(value: float, size: int, margin: int, flip: bool) -> float:
    # coords live in [-1, 1]; the y axis points up, SVG's points down
    unit = -value if flip else value
    return margin + (unit + 1.0) * 0.5 * (size - 2 * margin)


def skeleton_frame_svg(frame, size: int = 240, margin: int = 16,
                       bones=BONES) -> str:
    """Render one (J, 2) frame as a standalone SVG document."""
    if frame.ndim != 2 or frame.shape[1] < 2:
        raise DataError(f"frame must be (J, >=2), got {frame.shape}")
    pts = [
        (_to_px(x, size, margin, flip=False), _to_px(y, size, margin, flip=True))
        for x, y in frame[:, :2]
    ]
    lines = []
    for a, b in bones:
        if a < len(pts) and b < len(pts):
            (x1, y1), (x2, y2) = pts[a], pts[b]
            lines.append(
                f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
                'stroke="#1f4e79" stroke-width="3" stroke-linecap="round"/>'
            )
    dots = [
        f'<circle cx="{x:.2f}" cy="{y:.2f}" r="4" fill="#c1272d"/>'
        for x, y in pts
    ]
    body = "\n  ".join(lines + dots)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">\n'
        f'  <rect width="{size}" height="{size}" fill="white"/>\n'
        f"  {body}\n</svg>\n"
    )


def write_svg_frames(seq: SkeletonSequence, out_dir: Path, size: int = 240) -> list[Path]:
    """One SVG file per frame, named frame_0000.svg onward."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for t in range(seq.frames):
        path = out_dir / f"frame_{t:04d}.svg"
        path.write_text(skeleton_frame_svg(seq.coords[t], size=size), encoding="utf-8")
        paths.append(path)
    return paths
