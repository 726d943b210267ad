import * as fs from 'fs';

// Prediction-matrix wire format consumed by the combiner:
//   # model_id=<s> labels=<l1,l2,...>
//   <instance_id>,<p1>,...,<pk>
// UTF-8, LF endings, probabilities printed with 9 fractional digits.
export function formatPredictions(modelId: string, labels: string[],
                                  ids: string[], rows: Float32Array[]): string {
  const lines = [`# model_id=${modelId} labels=${labels.join(',')}`];
  for (let i = 0; i < ids.length; i++) {
    const parts = new Array<string>(rows[i].length);
    for (let j = 0; j < rows[i].length; j++) {
      parts[j] = rows[i][j].toFixed(9);
    }
    lines.push(`${ids[i]},${parts.join(',')}`);
  }
  return lines.join('\n') + '\n';
}

export function writePredictions(path: string, modelId: string, labels: string[],
                                 ids: string[], rows: Float32Array[]): void {
  fs.writeFileSync(path, formatPredictions(modelId, labels, ids, rows));
}

// Ground-truth wire format: one `instance_id,label` line per instance.
export function writeGroundTruth(path: string, ids: string[], labels: string[]): void {
  const lines = ids.map((id, i) => `${id},${labels[i]}`);
  fs.writeFileSync(path, lines.join('\n') + '\n');
}
