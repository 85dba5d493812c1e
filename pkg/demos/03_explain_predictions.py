#!/usr/bin/env python3
"""Generate a skeleton-video explanation for an unseen-class prediction.

For a given IMU window the model decodes a skeleton movement sequence from
the encoded feature, then looks up the seen-class reference video with the
minimum DTW distance (Mahalanobis frame cost) - the "matching seen class".
A good explanation moves like a seen activity from the same super-class as
the prediction. Frames are written as a stick-figure SVG sequence.

Run demos/02_train_zero_shot_model.py first to produce the checkpoint.
"""

from pathlib import Path

from zshar import estimate_cost_model, explain, load_checkpoint, load_dataset
from zshar.render import write_svg_frames

out_root = Path(__file__).parent / "_output"
ckpt_path = out_root / "demo_checkpoint.ckpt"
if not ckpt_path.exists():
    raise SystemExit("run demos/02_train_zero_shot_model.py first")

ckpt = load_checkpoint(ckpt_path)
dataset = load_dataset(out_root / "dataset" / "manifest.json")
fold = ckpt.fold
unseen = dataset.semantics.restrict(fold.unseen)
references = [(cls, seq) for cls in sorted(fold.seen) for seq in dataset.skeletons[cls]]
cost_model = estimate_cost_model([seq for _, seq in references])

sc_of = dataset.superclasses.mapping
print(f"unseen classes: {fold.unseen}\n")
for cls in fold.unseen:
    window = dataset.windows_for([cls])[0]
    result = explain(window, ckpt.params, unseen, references, cost_model=cost_model)
    aligned = sc_of[result.matching_seen_class] == sc_of[result.predicted_class]
    print(f"sample {window.id} (true class {cls}, super-class {sc_of[cls]})")
    print(f"  predicted class:     {result.predicted_class}")
    print(f"  matching seen class: {result.matching_seen_class} "
          f"(DTW {result.dtw_to_match:.2f}, super-class "
          f"{'aligned' if aligned else 'MISALIGNED'})")
    frames_dir = out_root / "explanations" / window.id
    paths = write_svg_frames(result.generated, frames_dir)
    print(f"  wrote {len(paths)} SVG frames to {frames_dir}\n")
