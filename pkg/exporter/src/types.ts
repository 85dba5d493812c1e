// Shared types for the export pipeline.

/** One decoded clip: grayscale frames plus optional per-frame pose annotations. */
export interface ClipVideo {
  /** class name parsed from the `<class>__<idx>` filename */
  className: string;
  /** video index parsed from the filename */
  index: number;
  /** source file path */
  path: string;
  fps: number;
  width: number;
  height: number;
  /** frames[t] is a row-major width*height grayscale array in [0, 1] */
  frames: number[][];
  /** poses[t] is 25 keypoints [x, y, score] in pixel units, or null when no person was detected */
  poses: (number[][] | null)[] | null;
}

export interface ExportJob {
  /** directory of `<class>__<idx>.clip.json` files */
  videosDir: string;
  outDir: string;
  embeddingDim: number;
  /** frames uniformly sampled per clip before embedding */
  framesPerClip: number;
  /** indices into the 25-keypoint layout selecting the exported joints */
  keypointIndices: number[];
  /** classes that must be present; discovered from filenames when empty */
  classes: string[];
}

export interface VideoEncoder {
  /** recorded in the output metadata */
  readonly name: string;
  /** which feature layer the embedding comes from; recorded in metadata */
  readonly layer: string;
  readonly embeddingDim: number;
  embed(clip: ClipVideo, framesPerClip: number): number[];
}

export interface PoseExtractor {
  readonly name: string;
  /** 25 keypoints [x, y, score] for one frame, or null when no person is found */
  extract(clip: ClipVideo, frameIndex: number): number[][] | null;
}

/** User/config problems: bad flags, missing files, malformed clips. Exit code 2. */
export class ExportError extends Error {}

// engine default: L/R shoulder, elbow, wrist, hip, knee, ankle in the
// 25-point layout (7..12 arms, 17..22 legs)
export const DEFAULT_KEYPOINT_INDICES = [7, 8, 9, 10, 11, 12, 17, 18, 19, 20, 21, 22];
