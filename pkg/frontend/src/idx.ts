import * as fs from 'fs';

import { DatasetMissing } from './errors';

export interface IdxImages {
  count: number;
  rows: number;
  cols: number;
  data: Uint8Array; // count * rows * cols, row-major
}

const IMAGE_MAGIC = 0x00000803;
const LABEL_MAGIC = 0x00000801;

function readFileOrThrow(path: string): Buffer {
  if (!fs.existsSync(path)) {
    throw new DatasetMissing(`dataset file not found: ${path}`);
  }
  return fs.readFileSync(path);
}

export function readIdxImages(path: string): IdxImages {
  const buf = readFileOrThrow(path);
  if (buf.readUInt32BE(0) !== IMAGE_MAGIC) {
    throw new DatasetMissing(`${path}: bad IDX image magic`);
  }
  const count = buf.readUInt32BE(4);
  const rows = buf.readUInt32BE(8);
  const cols = buf.readUInt32BE(12);
  const data = new Uint8Array(buf.buffer, buf.byteOffset + 16, count * rows * cols);
  return { count, rows, cols, data };
}

export function readIdxLabels(path: string): Uint8Array {
  const buf = readFileOrThrow(path);
  if (buf.readUInt32BE(0) !== LABEL_MAGIC) {
    throw new DatasetMissing(`${path}: bad IDX label magic`);
  }
  const count = buf.readUInt32BE(4);
  return new Uint8Array(buf.buffer, buf.byteOffset + 8, count);
}

export function writeIdxImages(path: string, images: IdxImages): void {
  const header = Buffer.alloc(16);
  header.writeUInt32BE(IMAGE_MAGIC, 0);
  header.writeUInt32BE(images.count, 4);
  header.writeUInt32BE(images.rows, 8);
  header.writeUInt32BE(images.cols, 12);
  fs.writeFileSync(path, Buffer.concat([header, Buffer.from(images.data)]));
}

export function writeIdxLabels(path: string, labels: Uint8Array): void {
  const header = Buffer.alloc(8);
  header.writeUInt32BE(LABEL_MAGIC, 0);
  header.writeUInt32BE(labels.length, 4);
  fs.writeFileSync(path, Buffer.concat([header, Buffer.from(labels)]));
}

// CIFAR-10 binary test batch: records of 1 label byte + 3072 pixel bytes
// (1024 red, 1024 green, 1024 blue, each a 32x32 plane).
export interface CifarBatch {
  count: number;
  labels: Uint8Array;
  data: Uint8Array; // count * 3072, planar RGB
}

const CIFAR_RECORD = 1 + 3072;

export function readCifarBatch(path: string): CifarBatch {
  const buf = readFileOrThrow(path);
  if (buf.length % CIFAR_RECORD !== 0) {
    throw new DatasetMissing(`${path}: size not a multiple of ${CIFAR_RECORD}`);
  }
  const count = buf.length / CIFAR_RECORD;
  const labels = new Uint8Array(count);
  const data = new Uint8Array(count * 3072);
  for (let i = 0; i < count; i++) {
    labels[i] = buf[i * CIFAR_RECORD];
    data.set(buf.subarray(i * CIFAR_RECORD + 1, (i + 1) * CIFAR_RECORD), i * 3072);
  }
  return { count, labels, data };
}

export function writeCifarBatch(path: string, batch: CifarBatch): void {
  const out = Buffer.alloc(batch.count * CIFAR_RECORD);
  for (let i = 0; i < batch.count; i++) {
    out[i * CIFAR_RECORD] = batch.labels[i];
    out.set(batch.data.subarray(i * 3072, (i + 1) * 3072), i * CIFAR_RECORD + 1);
  }
  fs.writeFileSync(path, out);
}
