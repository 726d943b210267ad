import * as fs from 'fs';

import * as tf from '@tensorflow/tfjs';

import { ModelLoadError } from './errors';
import { mulberry32, normals } from './rng';

// One fixed small architecture; the artifact file stores only class count
// and weights.  Paper-level accuracy is out of scope, the model just has
// to produce well-formed softmax rows deterministically.
const FILTERS = 4;
const KERNEL = 3;
const STRIDES = 2;
const FORMAT = 'logifold-cnn-v1';

export function buildModel(classes: number): tf.LayersModel {
  const model = tf.sequential();
  model.add(tf.layers.conv2d({
    inputShape: [32, 32, 3],
    filters: FILTERS,
    kernelSize: KERNEL,
    strides: STRIDES,
    activation: 'relu',
  }));
  model.add(tf.layers.flatten());
  model.add(tf.layers.dense({ units: classes, activation: 'softmax' }));
  return model;
}

export function seedModel(model: tf.LayersModel, seed: number): void {
  const rng = mulberry32(seed);
  const seeded = model.getWeights().map((w) => {
    const values = normals(rng, w.size, 0.3);
    return tf.tensor(values, w.shape);
  });
  model.setWeights(seeded);
}

interface Artifact {
  format: string;
  classes: number;
  weights: { shape: number[]; values: number[] }[];
}

export function saveModel(model: tf.LayersModel, path: string): void {
  const artifact: Artifact = {
    format: FORMAT,
    classes: model.outputs[0].shape[1] as number,
    weights: model.getWeights().map((w) => ({
      shape: w.shape.slice(),
      values: Array.from(w.dataSync()),
    })),
  };
  fs.writeFileSync(path, JSON.stringify(artifact) + '\n');
}

export function loadModel(path: string): tf.LayersModel {
  if (!fs.existsSync(path)) {
    throw new ModelLoadError(`model artifact not found: ${path}`);
  }
  let artifact: Artifact;
  try {
    artifact = JSON.parse(fs.readFileSync(path, 'utf-8'));
  } catch (e) {
    throw new ModelLoadError(`unparseable model artifact: ${path}`);
  }
  if (artifact.format !== FORMAT || !Array.isArray(artifact.weights)) {
    throw new ModelLoadError(`${path}: not a ${FORMAT} artifact`);
  }
  const model = buildModel(artifact.classes);
  const expected = model.getWeights();
  if (expected.length !== artifact.weights.length) {
    throw new ModelLoadError(`${path}: weight count mismatch`);
  }
  model.setWeights(artifact.weights.map((w, i) => {
    if (w.shape.join(',') !== expected[i].shape.join(',')) {
      throw new ModelLoadError(
        `${path}: weight ${i} shape ${w.shape} != ${expected[i].shape}`);
    }
    return tf.tensor(w.values, w.shape);
  }));
  return model;
}

export function outputWidth(model: tf.LayersModel): number {
  return model.outputs[0].shape[1] as number;
}
