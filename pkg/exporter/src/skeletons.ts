import { join } from 'path';

import { discoverClips, readClip } from './clips.js';
import { atomicWrite, fmt } from './io.js';
import { usablePose } from './poses.js';
import { ExportError, ExportJob, PoseExtractor } from './types.js';

export interface SkeletonsResult {
  written: string[];
  /** rejected videos (unreadable, person-free, or < 2 usable frames) */
  rejected: { path: string; reason: string }[];
}

/**
 * Extract per-frame keypoints, keep the configured joints, min-max
 * normalize each axis to [-1, 1] over the video, and write one engine CSV
 * per video (`<class>__<idx>.csv`). Frames without a detected person are
 * dropped; videos with fewer than two usable frames are rejected.
 */
export async function exportSkeletons(job: ExportJob, extractor: PoseExtractor): Promise<SkeletonsResult> {
  validateKeypointIndices(job.keypointIndices);
  const clips = discoverClips(job.videosDir);
  if (clips.length === 0) {
    throw new ExportError(`no <class>__<idx>.clip.json files in ${job.videosDir}`);
  }
  const wanted = job.classes.length
    ? clips.filter((c) => job.classes.includes(c.className))
    : clips;

  const rejected: { path: string; reason: string }[] = [];
  const written: string[] = [];
  const results = await Promise.all(
    wanted.map(async (entry) => {
      try {
        const clip = readClip(entry.path, entry.className, entry.index);
        const rows: number[][] = [];
        for (let t = 0; t < clip.frames.length; t++) {
          const pose = usablePose(extractor.extract(clip, t));
          if (pose === null) continue; // no person in this frame
          rows.push(job.keypointIndices.flatMap((j) => [pose[j][0], pose[j][1]]));
        }
        if (rows.length < 2) {
          throw new ExportError(`${entry.path}: only ${rows.length} usable frame(s); need >= 2`);
        }
        return { entry, rows: normalizePerAxis(rows, job.keypointIndices.length) };
      } catch (err) {
        rejected.push({ path: entry.path, reason: (err as Error).message });
        return null;
      }
    }),
  );
  for (const result of results) {
    if (result === null) continue;
    const { entry, rows } = result;
    const outPath = join(job.outDir, 'skeletons', `${entry.className}__${entry.index}.csv`);
    const text = rows.map((row) => row.map(fmt).join(',')).join('\n') + '\n';
    atomicWrite(outPath, text);
    written.push(outPath);
  }
  if (written.length === 0) {
    throw new ExportError('every video was rejected; nothing exported');
  }
  return { written, rejected };
}

/** Per-axis min-max to [-1, 1] over the whole video; constant axes map to 0. */
export function normalizePerAxis(rows: number[][], joints: number): number[][] {
  const out = rows.map((r) => r.slice());
  for (let axis = 0; axis < 2; axis++) {
    let lo = Infinity;
    let hi = -Infinity;
    for (const row of rows) {
      for (let j = 0; j < joints; j++) {
        const v = row[2 * j + axis];
        if (v < lo) lo = v;
        if (v > hi) hi = v;
      }
    }
    const span = hi - lo;
    for (let t = 0; t < rows.length; t++) {
      for (let j = 0; j < joints; j++) {
        const v = rows[t][2 * j + axis];
        out[t][2 * j + axis] = span > 0 ? (2 * (v - lo)) / span - 1 : 0;
      }
    }
  }
  return out;
}

export function validateKeypointIndices(indices: number[]): void {
  if (indices.length === 0) throw new ExportError('keypoint index list is empty');
  if (new Set(indices).size !== indices.length) {
    throw new ExportError(`keypoint index list has duplicates: ${indices.join(',')}`);
  }
  const bad = indices.filter((i) => !Number.isInteger(i) || i < 0 || i >= 25);
  if (bad.length > 0) {
    throw new ExportError(`keypoint indices out of range [0, 25): ${bad.join(',')}`);
  }
}
