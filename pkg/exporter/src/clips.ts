import { readFileSync, readdirSync, statSync } from 'fs';
import { basename, join } from 'path';

import { ClipVideo, ExportError } from './types.js';

export const CLIP_SUFFIX = '.clip.json';

/** `<class>__<idx>.clip.json` -> {className, index}; null for other files. */
export function parseClipName(filename: string): { className: string; index: number } | null {
  if (!filename.endsWith(CLIP_SUFFIX)) return null;
  const stem = basename(filename, CLIP_SUFFIX);
  const sep = stem.lastIndexOf('__');
  if (sep <= 0) return null;
  const idx = Number(stem.slice(sep + 2));
  if (!Number.isInteger(idx) || idx < 0) return null;
  return { className: stem.slice(0, sep), index: idx };
}

/** All clip files in a directory, sorted by (class, index). */
export function discoverClips(videosDir: string): { className: string; index: number; path: string }[] {
  let entries: string[];
  try {
    entries = readdirSync(videosDir);
  } catch {
    throw new ExportError(`videos directory not found: ${videosDir}`);
  }
  const found = [];
  for (const name of entries.sort()) {
    const parsed = parseClipName(name);
    if (parsed === null) continue;
    const path = join(videosDir, name);
    if (!statSync(path).isFile()) continue;
    found.push({ ...parsed, path });
  }
  found.sort((a, b) =>
    a.className === b.className ? a.index - b.index : a.className < b.className ? -1 : 1,
  );
  return found;
}

/** Parse one clip container; throws ExportError on anything malformed. */
export function readClip(path: string, className: string, index: number): ClipVideo {
  let doc: any;
  try {
    doc = JSON.parse(readFileSync(path, 'utf-8'));
  } catch (err) {
    throw new ExportError(`${path}: unreadable clip (${(err as Error).message})`);
  }
  const { fps, width, height, frames } = doc ?? {};
  if (
    typeof fps !== 'number' ||
    !Number.isInteger(width) ||
    !Number.isInteger(height) ||
    !Array.isArray(frames) ||
    frames.length === 0
  ) {
    throw new ExportError(`${path}: clip must declare fps, width, height and a non-empty frames array`);
  }
  for (let t = 0; t < frames.length; t++) {
    if (!Array.isArray(frames[t]) || frames[t].length !== width * height) {
      throw new ExportError(`${path}: frame ${t} has ${frames[t]?.length} pixels, expected ${width * height}`);
    }
  }
  const poses = doc.poses ?? null;
  if (poses !== null) {
    if (!Array.isArray(poses) || poses.length !== frames.length) {
      throw new ExportError(`${path}: poses must be one entry per frame or omitted`);
    }
    for (let t = 0; t < poses.length; t++) {
      const p = poses[t];
      if (p === null) continue;
      if (!Array.isArray(p) || p.length !== 25 || p.some((kp: any) => !Array.isArray(kp) || kp.length < 2)) {
        throw new ExportError(`${path}: pose at frame ${t} must be 25 [x, y, score] keypoints or null`);
      }
    }
  }
  return { className, index, path, fps, width, height, frames, poses };
}

/** Uniformly sampled frame indices (endpoint-inclusive) down or up to `count`. */
export function sampleFrameIndices(total: number, count: number): number[] {
  if (count <= 1 || total === 1) return [0];
  const out = [];
  for (let k = 0; k < count; k++) {
    out.push(Math.round((k * (total - 1)) / (count - 1)));
  }
  return out;
}
