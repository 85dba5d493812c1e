#!/usr/bin/env node
// zshar-export: turn activity video clips into the engine's file formats.
//
//   zshar-export export-semantics --videos DIR --out DIR [--embedding-dim 16]
//                                 [--frames-per-clip 16] [--classes a,b,c]
//                                 [--encoder moments|model --model-path FILE]
//   zshar-export export-skeletons --videos DIR --out DIR [--keypoints 7,8,...]
//                                 [--classes a,b,c]
//
// Exit codes: 0 success, 1 internal failure, 2 user/config error.

import { pathToFileURL } from 'url';

import { loadModelEncoder, momentsEncoder } from './encoder.js';
import { EmbeddedPoseExtractor } from './poses.js';
import { exportSemantics } from './semantics.js';
import { exportSkeletons } from './skeletons.js';
import { DEFAULT_KEYPOINT_INDICES, ExportError, ExportJob } from './types.js';

interface Flags {
  [key: string]: string;
}

function parseFlags(argv: string[]): Flags {
  const flags: Flags = {};
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (!arg.startsWith('--')) throw new ExportError(`unexpected argument ${arg}`);
    const value = argv[i + 1];
    if (value === undefined || value.startsWith('--')) {
      throw new ExportError(`flag ${arg} needs a value`);
    }
    flags[arg.slice(2)] = value;
    i++;
  }
  return flags;
}

function intFlag(flags: Flags, name: string, fallback: number): number {
  if (!(name in flags)) return fallback;
  const v = Number(flags[name]);
  if (!Number.isInteger(v) || v < 1) throw new ExportError(`--${name} must be a positive integer`);
  return v;
}

function jobFromFlags(flags: Flags): ExportJob {
  for (const required of ['videos', 'out']) {
    if (!(required in flags)) throw new ExportError(`--${required} is required`);
  }
  const allowed = new Set([
    'videos', 'out', 'embedding-dim', 'frames-per-clip', 'keypoints', 'classes',
    'encoder', 'model-path',
  ]);
  for (const key of Object.keys(flags)) {
    if (!allowed.has(key)) throw new ExportError(`unknown flag --${key}`);
  }
  const keypoints = flags['keypoints']
    ? flags['keypoints'].split(',').map((s) => {
        const v = Number(s.trim());
        if (!Number.isInteger(v)) throw new ExportError(`--keypoints: ${s} is not an integer`);
        return v;
      })
    : [...DEFAULT_KEYPOINT_INDICES];
  return {
    videosDir: flags['videos'],
    outDir: flags['out'],
    embeddingDim: intFlag(flags, 'embedding-dim', 16),
    framesPerClip: intFlag(flags, 'frames-per-clip', 16),
    keypointIndices: keypoints,
    classes: flags['classes'] ? flags['classes'].split(',').map((s) => s.trim()) : [],
  };
}

async function cmdExportSemantics(flags: Flags): Promise<number> {
  const job = jobFromFlags(flags);
  const backend = flags['encoder'] ?? 'moments';
  let encoder;
  if (backend === 'moments') {
    encoder = momentsEncoder(job.embeddingDim, job.framesPerClip);
  } else if (backend === 'model') {
    if (!flags['model-path']) throw new ExportError('--encoder model needs --model-path');
    encoder = loadModelEncoder(flags['model-path'], job.framesPerClip);
    job.embeddingDim = encoder.embeddingDim;
  } else {
    throw new ExportError(`unknown encoder backend ${backend} (use moments or model)`);
  }
  const result = await exportSemantics(job, encoder);
  for (const skip of result.skipped) {
    console.error(`skipped ${skip.path}: ${skip.reason}`);
  }
  const total = Object.values(result.classCounts).reduce((a, b) => a + b, 0);
  console.log(
    `embedded ${total} videos over ${Object.keys(result.classCounts).length} classes ` +
      `with ${encoder.name} -> ${result.outPath}`,
  );
  return 0;
}

async function cmdExportSkeletons(flags: Flags): Promise<number> {
  const job = jobFromFlags(flags);
  const result = await exportSkeletons(job, new EmbeddedPoseExtractor());
  for (const rej of result.rejected) {
    console.error(`rejected ${rej.path}: ${rej.reason}`);
  }
  console.log(`wrote ${result.written.length} skeleton CSVs under ${job.outDir}/skeletons`);
  return result.rejected.length > 0 ? 1 : 0;
}

export async function runCli(argv: string[]): Promise<number> {
  try {
    const [command, ...rest] = argv;
    if (command === 'export-semantics') return await cmdExportSemantics(parseFlags(rest));
    if (command === 'export-skeletons') return await cmdExportSkeletons(parseFlags(rest));
    throw new ExportError(
      `usage: zshar-export <export-semantics|export-skeletons> --videos DIR --out DIR [...]`,
    );
  } catch (err) {
    if (err instanceof ExportError) {
      console.error(`error: ${err.message}`);
      return 2;
    }
    console.error(`internal failure: ${(err as Error).stack ?? err}`);
    return 1;
  }
}

const isMain =
  process.argv[1] !== undefined && import.meta.url === pathToFileURL(process.argv[1]).href;
if (isMain) {
  runCli(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
