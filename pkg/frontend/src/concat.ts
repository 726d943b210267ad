import * as fs from 'fs';
import * as path from 'path';

import { CONCAT_VOCAB, loadDataset } from './datasets';
import { writeGroundTruth } from './predictions';

export interface ConcatJob {
  dataDir: string;
  outDir: string;
  seed: number;
  randomChannels: boolean;
}

export interface ConcatManifest {
  seed: number;
  channel_policy: 'replicate' | 'random';
  vocab: string[];
  datasets: { name: string; count: number; offset: number }[];
}

// Emits ground_truth.csv over the 30-label space plus manifest.json
// recording instance ordering and the channel policy, so a later export run
// with the same seed lines up exactly.
export function buildConcatTestset(job: ConcatJob): ConcatManifest {
  const data = loadDataset('concatenated', job.dataDir,
                           { seed: job.seed, randomChannels: job.randomChannels });
  fs.mkdirSync(job.outDir, { recursive: true });
  writeGroundTruth(path.join(job.outDir, 'ground_truth.csv'), data.ids,
                   data.labelIndices.map((l) => CONCAT_VOCAB[l]));

  const counts = new Map<string, number>();
  for (const id of data.ids) {
    const name = id.split(':')[0];
    counts.set(name, (counts.get(name) ?? 0) + 1);
  }
  let offset = 0;
  const datasets = [...counts.entries()].map(([name, count]) => {
    const entry = { name, count, offset };
    offset += count;
    return entry;
  });
  const manifest: ConcatManifest = {
    seed: job.seed,
    channel_policy: job.randomChannels ? 'random' : 'replicate',
    vocab: CONCAT_VOCAB,
    datasets,
  };
  fs.writeFileSync(path.join(job.outDir, 'manifest.json'),
                   JSON.stringify(manifest, null, 2) + '\n');
  return manifest;
}
