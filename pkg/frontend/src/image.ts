// Preprocessing: 28x28 grayscale -> 32x32 RGB float images in [0, 1],
// matching the model's input shape.  Channel policy is either deterministic
// replication (default) or seeded random per-channel scaling.

export function resizeBilinear(
  src: Uint8Array, srcSize: number, dstSize: number, offset = 0,
): Float32Array {
  const out = new Float32Array(dstSize * dstSize);
  const scale = (srcSize - 1) / (dstSize - 1);
  for (let y = 0; y < dstSize; y++) {
    const fy = y * scale;
    const y0 = Math.floor(fy);
    const y1 = Math.min(y0 + 1, srcSize - 1);
    const wy = fy - y0;
    for (let x = 0; x < dstSize; x++) {
      const fx = x * scale;
      const x0 = Math.floor(fx);
      const x1 = Math.min(x0 + 1, srcSize - 1);
      const wx = fx - x0;
      const p00 = src[offset + y0 * srcSize + x0];
      const p01 = src[offset + y0 * srcSize + x1];
      const p10 = src[offset + y1 * srcSize + x0];
      const p11 = src[offset + y1 * srcSize + x1];
      const top = p00 * (1 - wx) + p01 * wx;
      const bot = p10 * (1 - wx) + p11 * wx;
      out[y * dstSize + x] = (top * (1 - wy) + bot * wy) / 255;
    }
  }
  return out;
}

// gray (H*W) -> HWC RGB; channelScales has 3 entries, all 1 for replicate.
export function grayToRgb(gray: Float32Array, channelScales: number[]): Float32Array {
  const out = new Float32Array(gray.length * 3);
  for (let i = 0; i < gray.length; i++) {
    out[i * 3] = gray[i] * channelScales[0];
    out[i * 3 + 1] = gray[i] * channelScales[1];
    out[i * 3 + 2] = gray[i] * channelScales[2];
  }
  return out;
}

// CIFAR planar RGB record (3 * 1024 bytes) -> HWC floats in [0, 1].
export function cifarToRgb(data: Uint8Array, offset: number): Float32Array {
  const out = new Float32Array(32 * 32 * 3);
  for (let i = 0; i < 1024; i++) {
    out[i * 3] = data[offset + i] / 255;
    out[i * 3 + 1] = data[offset + 1024 + i] / 255;
    out[i * 3 + 2] = data[offset + 2048 + i] / 255;
  }
  return out;
}
