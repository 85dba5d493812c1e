// Deterministic clip fixtures: pixel content and poses are pure functions
// of (class, index, frame), so repeated exports must be byte-identical.

import { mkdirSync, writeFileSync } from 'fs';
import { join } from 'path';

export interface ClipOptions {
  frames?: number;
  width?: number;
  height?: number;
  /** frame indices with no detected person (pose = null) */
  personFree?: number[];
  /** freeze the pose so every frame is identical */
  staticPose?: boolean;
  /** omit the poses array entirely */
  noPoses?: boolean;
}

export function clipDoc(className: string, index: number, opts: ClipOptions = {}) {
  const frames = opts.frames ?? 8;
  const width = opts.width ?? 8;
  const height = opts.height ?? 8;
  const classPhase = [...className].reduce((a, c) => a + c.charCodeAt(0), 0) % 7;
  const pixels: number[][] = [];
  const poses: (number[][] | null)[] = [];
  for (let t = 0; t < frames; t++) {
    const frame: number[] = [];
    for (let y = 0; y < height; y++) {
      for (let x = 0; x < width; x++) {
        const v =
          0.5 +
          0.5 * Math.sin(0.7 * x + classPhase) * Math.cos(0.5 * y + index) * Math.sin(0.9 * t + classPhase);
        frame.push(Math.round(v * 1000) / 1000);
      }
    }
    pixels.push(frame);
    if (opts.personFree?.includes(t)) {
      poses.push(null);
    } else {
      const phase = opts.staticPose ? 0 : (2 * Math.PI * t) / frames;
      const pose: number[][] = [];
      for (let k = 0; k < 25; k++) {
        const baseX = 40 + 3 * k;
        const baseY = 30 + 2 * k;
        pose.push([
          Math.round((baseX + 5 * Math.sin(phase + k + classPhase)) * 100) / 100,
          Math.round((baseY + 4 * Math.cos(phase + 0.5 * k + index)) * 100) / 100,
          0.9,
        ]);
      }
      poses.push(pose);
    }
  }
  return {
    fps: 30,
    width,
    height,
    frames: pixels,
    ...(opts.noPoses ? {} : { poses }),
  };
}

export function writeClip(dir: string, className: string, index: number, opts: ClipOptions = {}): string {
  mkdirSync(dir, { recursive: true });
  const path = join(dir, `${className}__${index}.clip.json`);
  writeFileSync(path, JSON.stringify(clipDoc(className, index, opts)));
  return path;
}
