import { join } from 'path';

import { discoverClips, readClip } from './clips.js';
import { atomicWrite } from './io.js';
import { ExportError, ExportJob, VideoEncoder } from './types.js';

export interface SemanticsResult {
  outPath: string;
  /** per-file problems that were skipped, for the report */
  skipped: { path: string; reason: string }[];
  classCounts: Record<string, number>;
}

/**
 * Embed every video and write the engine's semantic-vector JSON: the mean
 * vector per class plus the per-video vectors and provenance counts.
 * Unreadable clips are skipped and reported; a class that ends up with no
 * usable video is an error.
 */
export async function exportSemantics(job: ExportJob, encoder: VideoEncoder): Promise<SemanticsResult> {
  const clips = discoverClips(job.videosDir);
  if (clips.length === 0) {
    throw new ExportError(`no <class>__<idx>.clip.json files in ${job.videosDir}`);
  }
  const expected = job.classes.length
    ? job.classes
    : [...new Set(clips.map((c) => c.className))].sort();
  for (const cls of expected) {
    if (!clips.some((c) => c.className === cls)) {
      throw new ExportError(`class ${cls} has no videos in ${job.videosDir}`);
    }
  }

  const skipped: { path: string; reason: string }[] = [];
  const videoVectors: Record<string, number[][]> = {};
  const jobs = clips
    .filter((c) => expected.includes(c.className))
    .map(async (entry) => {
      try {
        const clip = readClip(entry.path, entry.className, entry.index);
        const vec = encoder.embed(clip, job.framesPerClip);
        return { ...entry, vec };
      } catch (err) {
        skipped.push({ path: entry.path, reason: (err as Error).message });
        return null;
      }
    });
  for (const result of await Promise.all(jobs)) {
    if (result === null) continue;
    (videoVectors[result.className] ??= []).push(result.vec);
  }

  const emptied = expected.filter((cls) => !(videoVectors[cls]?.length > 0));
  if (emptied.length > 0) {
    throw new ExportError(`no usable videos left for class(es): ${emptied.join(', ')}`);
  }

  const vectors: Record<string, number[]> = {};
  const counts: Record<string, number> = {};
  for (const cls of expected) {
    const vecs = videoVectors[cls];
    const mean = new Array(job.embeddingDim).fill(0);
    for (const v of vecs) for (let j = 0; j < mean.length; j++) mean[j] += v[j];
    vectors[cls] = mean.map((s) => s / vecs.length);
    counts[cls] = vecs.length;
  }

  const doc = {
    embedding_dim: job.embeddingDim,
    vectors,
    video_vectors: videoVectors,
    video_counts: counts,
    metadata: {
      encoder: encoder.name,
      layer: encoder.layer,
      frames_per_clip: job.framesPerClip,
      source: job.videosDir,
    },
  };
  const outPath = join(job.outDir, 'semantics.json');
  atomicWrite(outPath, stableJson(doc) + '\n');
  return { outPath, skipped, classCounts: counts };
}

/** JSON with sorted keys so identical inputs give identical bytes. */
export function stableJson(value: unknown): string {
  return JSON.stringify(sortKeys(value), null, 2);
}

function sortKeys(value: any): any {
  if (Array.isArray(value)) return value.map(sortKeys);
  if (value !== null && typeof value === 'object') {
    const out: Record<string, any> = {};
    for (const key of Object.keys(value).sort()) out[key] = sortKeys(value[key]);
    return out;
  }
  return value;
}
