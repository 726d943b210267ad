import * as path from 'path';

import * as tf from '@tensorflow/tfjs';

import { DatasetName, loadDataset } from './datasets';
import { ShapeMismatch } from './errors';
import { loadModel, outputWidth } from './model';
import { writePredictions } from './predictions';

export interface ExportJob {
  modelPath: string;
  dataset: DatasetName;
  vocab: string[]; // global labels this model emits, in output order
  dataDir: string;
  outPath: string;
  seed: number;
  randomChannels: boolean;
}

const BATCH = 512;

export function exportPredictions(job: ExportJob): number {
  const model = loadModel(job.modelPath);
  const width = outputWidth(model);
  if (width !== job.vocab.length) {
    throw new ShapeMismatch(
      `model emits ${width} classes but vocab has ${job.vocab.length} labels`);
  }
  const data = loadDataset(job.dataset, job.dataDir,
                           { seed: job.seed, randomChannels: job.randomChannels });
  const rows: Float32Array[] = [];
  for (let start = 0; start < data.ids.length; start += BATCH) {
    const n = Math.min(BATCH, data.ids.length - start);
    const batch = new Float32Array(n * 32 * 32 * 3);
    for (let i = 0; i < n; i++) {
      batch.set(data.imageAt(start + i), i * 32 * 32 * 3);
    }
    const out = tf.tidy(() => {
      const input = tf.tensor4d(batch, [n, 32, 32, 3]);
      return model.predict(input) as tf.Tensor2D;
    });
    const values = out.dataSync() as Float32Array;
    out.dispose();
    for (let i = 0; i < n; i++) {
      rows.push(values.slice(i * width, (i + 1) * width));
    }
  }
  const modelId = path.basename(job.modelPath).replace(/\.[^.]+$/, '');
  writePredictions(job.outPath, modelId, job.vocab, data.ids, rows);
  return rows.length;
}
