import * as fs from 'fs';
import * as path from 'path';

import { writeCifarBatch, writeIdxImages, writeIdxLabels } from '../src/idx';
import { buildModel, saveModel, seedModel } from '../src/model';
import { mulberry32 } from '../src/rng';

// Real test sets are not shipped; these synthesize full-size stand-ins in
// the genuine wire formats so shape and determinism contracts are exercised
// end to end.
export function writeSyntheticIdx(dir: string, name: string, count: number,
                                  seed: number): void {
  const rng = mulberry32(seed);
  const data = new Uint8Array(count * 28 * 28);
  for (let i = 0; i < data.length; i++) data[i] = Math.floor(rng() * 256);
  const labels = new Uint8Array(count);
  for (let i = 0; i < count; i++) labels[i] = Math.floor(rng() * 10);
  fs.mkdirSync(path.join(dir, name), { recursive: true });
  writeIdxImages(path.join(dir, name, 't10k-images-idx3-ubyte'),
                 { count, rows: 28, cols: 28, data });
  writeIdxLabels(path.join(dir, name, 't10k-labels-idx1-ubyte'), labels);
}

export function writeSyntheticCifar(dir: string, count: number, seed: number): void {
  const rng = mulberry32(seed);
  const data = new Uint8Array(count * 3072);
  for (let i = 0; i < data.length; i++) data[i] = Math.floor(rng() * 256);
  const labels = new Uint8Array(count);
  for (let i = 0; i < count; i++) labels[i] = Math.floor(rng() * 10);
  fs.mkdirSync(path.join(dir, 'cifar10'), { recursive: true });
  writeCifarBatch(path.join(dir, 'cifar10', 'test_batch.bin'),
                  { count, labels, data });
}

export function writeSyntheticDatasets(dir: string, count = 10_000): void {
  writeSyntheticIdx(dir, 'mnist', count, 101);
  writeSyntheticIdx(dir, 'fashion', count, 202);
  writeSyntheticCifar(dir, count, 303);
}

export function makeModelArtifact(file: string, seed: number, classes = 10): void {
  const model = buildModel(classes);
  seedModel(model, seed);
  saveModel(model, file);
}
