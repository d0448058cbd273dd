// Binary frame codec, symmetric with the service side.
//
// Layout (little-endian): magic u32 "RFM1", seq u32, point_count u32,
// span f32, point_count f32 heights, 3*point_count f32 normals.
// Total byte length is 16 + 16 * point_count.

export const FRAME_MAGIC = 0x52464d31;
const HEADER_BYTES = 16;

export interface FrameMessage {
  seq: number;
  span: number;
  z: Float32Array;
  normals: Float32Array; // length 3 * z.length, xyz interleaved
}

export class CodecError extends Error {}

export function decodeFrame(buf: ArrayBuffer): FrameMessage {
  if (buf.byteLength < HEADER_BYTES) {
    throw new CodecError(`frame too short (${buf.byteLength} bytes)`);
  }
  const head = new DataView(buf, 0, HEADER_BYTES);
  const magic = head.getUint32(0, true);
  if (magic !== FRAME_MAGIC) {
    throw new CodecError(`bad frame magic 0x${magic.toString(16)}`);
  }
  const seq = head.getUint32(4, true);
  const count = head.getUint32(8, true);
  const span = head.getFloat32(12, true);
  const expected = HEADER_BYTES + 16 * count;
  if (buf.byteLength !== expected) {
    throw new CodecError(
      `frame length ${buf.byteLength} != ${expected} for ${count} points`);
  }
  // buffers from the socket are already little-endian float32
  const z = new Float32Array(buf.slice(HEADER_BYTES, HEADER_BYTES + 4 * count));
  const normals = new Float32Array(buf.slice(HEADER_BYTES + 4 * count));
  return { seq, span, z, normals };
}

export function encodeFrame(msg: FrameMessage): ArrayBuffer {
  const count = msg.z.length;
  if (msg.normals.length !== 3 * count) {
    throw new CodecError("normals must hold 3 floats per point");
  }
  const buf = new ArrayBuffer(HEADER_BYTES + 16 * count);
  const head = new DataView(buf, 0, HEADER_BYTES);
  head.setUint32(0, FRAME_MAGIC, true);
  head.setUint32(4, msg.seq, true);
  head.setUint32(8, count, true);
  head.setFloat32(12, msg.span, true);
  new Float32Array(buf, HEADER_BYTES, count).set(msg.z);
  new Float32Array(buf, HEADER_BYTES + 4 * count, 3 * count).set(msg.normals);
  return buf;
}
