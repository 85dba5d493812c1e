import { readFileSync } from 'fs';

import { sampleFrameIndices } from './clips.js';
import { ClipVideo, ExportError, VideoEncoder } from './types.js';

// Deterministic 32-bit PRNG so the built-in encoder gives identical
// embeddings on every run and platform.
function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

const STATS_PER_FRAME = 6; // mean, std, four quadrant means

export function clipFeatureLength(framesPerClip: number): number {
  return framesPerClip * STATS_PER_FRAME + (framesPerClip - 1);
}

/** Raw clip descriptor: per-frame intensity statistics plus temporal deltas. */
export function clipFeatures(clip: ClipVideo, framesPerClip: number): number[] {
  const idxs = sampleFrameIndices(clip.frames.length, framesPerClip);
  const { width, height } = clip;
  const perFrame: number[][] = [];
  for (const t of idxs) {
    const px = clip.frames[t];
    let sum = 0;
    for (const v of px) sum += v;
    const mean = sum / px.length;
    let varsum = 0;
    for (const v of px) varsum += (v - mean) * (v - mean);
    const std = Math.sqrt(varsum / px.length);
    const quads = [0, 0, 0, 0];
    const counts = [0, 0, 0, 0];
    for (let y = 0; y < height; y++) {
      for (let x = 0; x < width; x++) {
        const q = (y < height / 2 ? 0 : 2) + (x < width / 2 ? 0 : 1);
        quads[q] += px[y * width + x];
        counts[q]++;
      }
    }
    perFrame.push([mean, std, ...quads.map((s, q) => s / Math.max(counts[q], 1))]);
  }
  const features = perFrame.flat();
  for (let k = 1; k < perFrame.length; k++) {
    features.push(Math.abs(perFrame[k][0] - perFrame[k - 1][0]));
  }
  // pad the degenerate single-sample case to the declared length
  while (features.length < clipFeatureLength(framesPerClip)) features.push(0);
  return features;
}

function projectionMatrix(rows: number, cols: number, seed: number): number[][] {
  const rand = mulberry32(seed);
  const scale = 1 / Math.sqrt(cols);
  const m: number[][] = [];
  for (let i = 0; i < rows; i++) {
    const row = [];
    for (let j = 0; j < cols; j++) row.push((2 * rand() - 1) * scale);
    m.push(row);
  }
  return m;
}

class ProjectionEncoder implements VideoEncoder {
  constructor(
    readonly name: string,
    readonly layer: string,
    readonly embeddingDim: number,
    private readonly matrix: number[][],
    private readonly featureDim: number,
  ) {}

  embed(clip: ClipVideo, framesPerClip: number): number[] {
    const feats = clipFeatures(clip, framesPerClip);
    if (feats.length !== this.featureDim) {
      throw new ExportError(
        `${clip.path}: clip features have length ${feats.length}, ` +
          `encoder ${this.name} expects ${this.featureDim} (check --frames-per-clip)`,
      );
    }
    return this.matrix.map((row) => {
      let s = 0;
      for (let j = 0; j < feats.length; j++) s += row[j] * feats[j];
      return s;
    });
  }
}

/** Self-contained deterministic encoder: clip statistics under a seeded projection. */
export function momentsEncoder(embeddingDim: number, framesPerClip: number): VideoEncoder {
  const featureDim = clipFeatureLength(framesPerClip);
  const matrix = projectionMatrix(embeddingDim, featureDim, 0x5eed0 + embeddingDim);
  return new ProjectionEncoder('moments-v1', 'clip-statistics', embeddingDim, matrix, featureDim);
}

/**
 * Load a projection-model file (the locally available "pretrained" encoder
 * artifact): JSON with name, layer, embedding_dim, feature_dim and matrix.
 */
export function loadModelEncoder(modelPath: string, framesPerClip: number): VideoEncoder {
  let doc: any;
  try {
    doc = JSON.parse(readFileSync(modelPath, 'utf-8'));
  } catch (err) {
    throw new ExportError(`cannot load encoder model ${modelPath}: ${(err as Error).message}`);
  }
  const { name, layer, embedding_dim, feature_dim, matrix } = doc ?? {};
  if (
    typeof name !== 'string' ||
    typeof layer !== 'string' ||
    !Number.isInteger(embedding_dim) ||
    !Number.isInteger(feature_dim) ||
    !Array.isArray(matrix) ||
    matrix.length !== embedding_dim ||
    matrix.some((row: any) => !Array.isArray(row) || row.length !== feature_dim)
  ) {
    throw new ExportError(`cannot load encoder model ${modelPath}: malformed model file`);
  }
  if (feature_dim !== clipFeatureLength(framesPerClip)) {
    throw new ExportError(
      `encoder model ${modelPath} expects feature_dim ${feature_dim}, ` +
        `but --frames-per-clip ${framesPerClip} yields ${clipFeatureLength(framesPerClip)}`,
    );
  }
  return new ProjectionEncoder(name, layer, embedding_dim, matrix, feature_dim);
}
