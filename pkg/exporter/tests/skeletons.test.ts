import { mkdtempSync, readFileSync, readdirSync } from 'fs';
import { tmpdir } from 'os';
import { join } from 'path';
import { beforeEach, describe, expect, it } from 'vitest';

import { EmbeddedPoseExtractor } from '../src/poses.js';
import { exportSkeletons, normalizePerAxis } from '../src/skeletons.js';
import { DEFAULT_KEYPOINT_INDICES, ExportError, ExportJob } from '../src/types.js';
import { writeClip } from './fixtures.js';

function tmp(): string {
  return mkdtempSync(join(tmpdir(), 'exporter-'));
}

function job(videosDir: string, outDir: string, overrides: Partial<ExportJob> = {}): ExportJob {
  return {
    videosDir,
    outDir,
    embeddingDim: 6,
    framesPerClip: 8,
    keypointIndices: [...DEFAULT_KEYPOINT_INDICES],
    classes: [],
    ...overrides,
  };
}

function readCsv(path: string): number[][] {
  return readFileSync(path, 'utf-8')
    .trim()
    .split('\n')
    .map((line) => line.split(',').map(Number));
}

describe('export-skeletons', () => {
  let videos: string;
  let out: string;
  const extractor = new EmbeddedPoseExtractor();

  beforeEach(() => {
    videos = tmp();
    out = tmp();
  });

  it('writes one engine CSV per video with 12 joints x 2 axes', async () => {
    writeClip(videos, 'walking', 0, { frames: 6 });
    const result = await exportSkeletons(job(videos, out), extractor);
    expect(result.written).toHaveLength(1);
    const rows = readCsv(result.written[0]);
    expect(rows).toHaveLength(6);
    expect(rows[0]).toHaveLength(24);
  });

  it('a static pose exports constant rows', async () => {
    writeClip(videos, 'still', 0, { frames: 5, staticPose: true });
    const result = await exportSkeletons(job(videos, out), extractor);
    const rows = readCsv(result.written[0]);
    for (const row of rows) expect(row).toEqual(rows[0]);
  });

  it('normalizes each axis to [-1, 1] over the video', async () => {
    writeClip(videos, 'walking', 0, { frames: 10 });
    const result = await exportSkeletons(job(videos, out), extractor);
    const rows = readCsv(result.written[0]);
    for (let axis = 0; axis < 2; axis++) {
      const values = rows.flatMap((row) =>
        Array.from({ length: 12 }, (_, j) => row[2 * j + axis]),
      );
      expect(Math.min(...values)).toBeCloseTo(-1, 12);
      expect(Math.max(...values)).toBeCloseTo(1, 12);
    }
  });

  it('drops person-free frames', async () => {
    writeClip(videos, 'walking', 0, { frames: 8, personFree: [0, 3] });
    const result = await exportSkeletons(job(videos, out), extractor);
    expect(readCsv(result.written[0])).toHaveLength(6);
  });

  it('rejects videos with fewer than two usable frames', async () => {
    writeClip(videos, 'gone', 0, { frames: 5, personFree: [0, 1, 2, 3] });
    writeClip(videos, 'fine', 0, { frames: 5 });
    const result = await exportSkeletons(job(videos, out), extractor);
    expect(result.written).toHaveLength(1);
    expect(result.rejected).toHaveLength(1);
    expect(result.rejected[0].reason).toMatch(/usable frame/);
  });

  it('errors when every video is rejected', async () => {
    writeClip(videos, 'gone', 0, { frames: 4, personFree: [0, 1, 2, 3] });
    await expect(exportSkeletons(job(videos, out), extractor)).rejects.toThrow(/nothing exported/);
  });

  it('rejects clips without pose annotations', async () => {
    writeClip(videos, 'nopose', 0, { frames: 4, noPoses: true });
    await expect(exportSkeletons(job(videos, out), extractor)).rejects.toThrow(/nothing exported/);
  });

  it('validates the keypoint index list', async () => {
    writeClip(videos, 'a', 0);
    const dup = job(videos, out, { keypointIndices: [1, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11] });
    await expect(exportSkeletons(dup, extractor)).rejects.toThrow(ExportError);
    const range = job(videos, out, { keypointIndices: [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 25] });
    await expect(exportSkeletons(range, extractor)).rejects.toThrow(/out of range/);
  });

  it('is deterministic across runs', async () => {
    writeClip(videos, 'a', 0);
    writeClip(videos, 'a', 1);
    const out2 = tmp();
    const r1 = await exportSkeletons(job(videos, out), extractor);
    const r2 = await exportSkeletons(job(videos, out2), extractor);
    for (let i = 0; i < r1.written.length; i++) {
      expect(readFileSync(r1.written[i], 'utf-8')).toBe(readFileSync(r2.written[i], 'utf-8'));
    }
    expect(readdirSync(join(out, 'skeletons')).sort()).toEqual(['a__0.csv', 'a__1.csv']);
  });
});

describe('normalizePerAxis', () => {
  it('maps extremes to -1/1 and constants to 0', () => {
    const rows = [
      [0, 5, 2, 5],
      [4, 5, 0, 5],
    ];
    const out = normalizePerAxis(rows, 2);
    // x axis spans 0..4 -> -1..1; y axis constant 5 -> 0
    expect(out[0]).toEqual([-1, 0, 0, 0]);
    expect(out[1]).toEqual([1, 0, -1, 0]);
  });
});
