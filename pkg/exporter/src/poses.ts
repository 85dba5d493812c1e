import { ClipVideo, ExportError, PoseExtractor } from './types.js';

/**
 * Pose backend reading the per-frame 25-keypoint annotations embedded in the
 * clip container (written upstream by whatever pose model produced the clip).
 * A missing or null entry means no person was detected in that frame.
 */
export class EmbeddedPoseExtractor implements PoseExtractor {
  readonly name = 'embedded-annotations';

  extract(clip: ClipVideo, frameIndex: number): number[][] | null {
    if (clip.poses === null) {
      throw new ExportError(`${clip.path}: clip carries no pose annotations`);
    }
    return clip.poses[frameIndex];
  }
}

/** Drop low-confidence detections: a pose counts only if mean score >= threshold. */
export function usablePose(pose: number[][] | null, minScore = 0.0): number[][] | null {
  if (pose === null) return null;
  if (minScore > 0) {
    const scores = pose.map((kp) => kp[2] ?? 1.0);
    const mean = scores.reduce((a, b) => a + b, 0) / scores.length;
    if (mean < minScore) return null;
  }
  return pose;
}
