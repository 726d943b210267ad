import * as path from 'path';

import { DatasetMissing } from './errors';
import { cifarToRgb, grayToRgb, resizeBilinear } from './image';
import { readCifarBatch, readIdxImages, readIdxLabels } from './idx';
import { mulberry32 } from './rng';

export type DatasetName = 'mnist' | 'fashion' | 'cifar10' | 'concatenated';

export interface LoadOptions {
  seed: number;
  randomChannels: boolean;
}

// Lazy image access keeps the 30k-image concatenated set out of memory;
// only the currently requested image is materialized.
export interface LoadedDataset {
  ids: string[];
  labelIndices: number[]; // indices into the dataset's local 10-label vocab
  imageAt: (i: number) => Float32Array; // 32*32*3 HWC floats
}

const REPLICATE = [1, 1, 1];

function channelScaleTable(count: number, opts: LoadOptions): number[][] {
  if (!opts.randomChannels) return [];
  const rng = mulberry32(opts.seed);
  const table: number[][] = [];
  for (let i = 0; i < count; i++) {
    table.push([rng(), rng(), rng()]);
  }
  return table;
}

function loadIdxDataset(name: string, dataDir: string, opts: LoadOptions): LoadedDataset {
  const dir = path.join(dataDir, name);
  const images = readIdxImages(path.join(dir, 't10k-images-idx3-ubyte'));
  const labels = readIdxLabels(path.join(dir, 't10k-labels-idx1-ubyte'));
  if (labels.length !== images.count) {
    throw new DatasetMissing(`${name}: ${images.count} images but ${labels.length} labels`);
  }
  const scales = channelScaleTable(images.count, opts);
  const pixels = images.rows * images.cols;
  return {
    ids: Array.from(labels, (_, i) => `${name}:${i}`),
    labelIndices: Array.from(labels),
    imageAt: (i) => {
      const gray = resizeBilinear(images.data, images.rows, 32, i * pixels);
      return grayToRgb(gray, opts.randomChannels ? scales[i] : REPLICATE);
    },
  };
}

function loadCifar(dataDir: string): LoadedDataset {
  const batch = readCifarBatch(path.join(dataDir, 'cifar10', 'test_batch.bin'));
  return {
    ids: Array.from(batch.labels, (_, i) => `cifar10:${i}`),
    labelIndices: Array.from(batch.labels),
    imageAt: (i) => cifarToRgb(batch.data, i * 3072),
  };
}

export function loadDataset(name: DatasetName, dataDir: string,
                            opts: LoadOptions): LoadedDataset {
  if (name === 'mnist' || name === 'fashion') {
    return loadIdxDataset(name, dataDir, opts);
  }
  if (name === 'cifar10') {
    return loadCifar(dataDir);
  }
  // concatenated: MNIST then Fashion then CIFAR10, local labels offset into
  // the 30-label space m0..m9, f0..f9, c0..c9
  const parts = [
    loadIdxDataset('mnist', dataDir, opts),
    loadIdxDataset('fashion', dataDir, opts),
    loadCifar(dataDir),
  ];
  const offsets = [0, 10, 20];
  const ids = parts.flatMap((p) => p.ids);
  const labelIndices = parts.flatMap((p, k) => p.labelIndices.map((l) => l + offsets[k]));
  const bounds: number[] = [];
  let acc = 0;
  for (const p of parts) {
    acc += p.ids.length;
    bounds.push(acc);
  }
  return {
    ids,
    labelIndices,
    imageAt: (i) => {
      let k = 0;
      while (i >= bounds[k]) k++;
      return parts[k].imageAt(i - (k === 0 ? 0 : bounds[k - 1]));
    },
  };
}

export const CONCAT_VOCAB = [
  ...Array.from({ length: 10 }, (_, i) => `m${i}`),
  ...Array.from({ length: 10 }, (_, i) => `f${i}`),
  ...Array.from({ length: 10 }, (_, i) => `c${i}`),
];
