#!/usr/bin/env node
import yargs from 'yargs';
import { hideBin } from 'yargs/helpers';

import { buildConcatTestset } from './concat';
import { DatasetName } from './datasets';
import { ExporterError } from './errors';
import { exportPredictions } from './export';

function run(fn: () => void): void {
  try {
    fn();
  } catch (e) {
    if (e instanceof ExporterError) {
      console.error(`${e.constructor.name}: ${e.message}`);
      process.exit(1);
    }
    throw e;
  }
}

yargs(hideBin(process.argv))
  .command(
    'export',
    'Run a model over a dataset and write a prediction-matrix file',
    (y) => y
      .option('model', { type: 'string', demandOption: true })
      .option('dataset', {
        type: 'string', demandOption: true,
        choices: ['mnist', 'fashion', 'cifar10', 'concatenated'],
      })
      .option('vocab', { type: 'string', demandOption: true,
                         describe: 'comma-separated labels in model output order' })
      .option('out', { type: 'string', demandOption: true })
      .option('data-dir', { type: 'string', default: 'data' })
      .option('seed', { type: 'number', default: 0 })
      .option('random-channels', { type: 'boolean', default: false }),
    (argv) => run(() => {
      const count = exportPredictions({
        modelPath: argv.model,
        dataset: argv.dataset as DatasetName,
        vocab: argv.vocab.split(','),
        dataDir: argv['data-dir'],
        outPath: argv.out,
        seed: argv.seed,
        randomChannels: argv['random-channels'],
      });
      console.log(`wrote ${count} rows to ${argv.out}`);
    }),
  )
  .command(
    'concat',
    'Assemble the concatenated test set: ground truth plus index manifest',
    (y) => y
      .option('out-dir', { type: 'string', demandOption: true })
      .option('data-dir', { type: 'string', default: 'data' })
      .option('seed', { type: 'number', default: 0 })
      .option('random-channels', { type: 'boolean', default: false }),
    (argv) => run(() => {
      const manifest = buildConcatTestset({
        dataDir: argv['data-dir'],
        outDir: argv['out-dir'],
        seed: argv.seed,
        randomChannels: argv['random-channels'],
      });
      const total = manifest.datasets.reduce((s, d) => s + d.count, 0);
      console.log(`wrote ${total} ground-truth rows to ${argv['out-dir']}`);
    }),
  )
  .demandCommand(1)
  .strict()
  .parse();
