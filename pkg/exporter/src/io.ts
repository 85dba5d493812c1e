import { mkdirSync, renameSync, writeFileSync } from 'fs';
import { dirname, join } from 'path';

/** Shortest round-trip decimal form (ECMAScript Number#toString), stable across runs. */
export function fmt(x: number): string {
  if (!Number.isFinite(x)) throw new Error(`non-finite value ${x}`);
  // avoid "-0" so identical data always serializes identically
  return String(x === 0 ? 0 : x);
}

/** Write via a temp file in the same directory, then rename into place. */
export function atomicWrite(path: string, content: string): void {
  mkdirSync(dirname(path), { recursive: true });
  const tmp = join(dirname(path), `.tmp-${process.pid}-${Math.abs(hash32(path))}`);
  writeFileSync(tmp, content, 'utf-8');
  renameSync(tmp, path);
}

function hash32(s: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < s.length; i++) {
    h ^= s.charCodeAt(i);
    h = Math.imul(h, 0x01000193);
  }
  return h | 0;
}
