// Viewer-side session state: connection, latest frame, camera.

import type { FrameMessage } from "./codec";
import type { ReliefParams } from "./params";

export type Connection = "connecting" | "open" | "closed" | "error";

export interface OrbitCamera {
  azimuth: number;
  elevation: number;
  zoom: number;
}

export class ViewerState {
  sessionId: string;
  pointCount = 0;
  diagonal = 0;
  xy: Float32Array | null = null;
  frame: FrameMessage | null = null;
  params: ReliefParams | null = null;
  connection: Connection = "connecting";
  camera: OrbitCamera = { azimuth: 0.5, elevation: 0.9, zoom: 1.0 };

  constructor(sessionId: string) {
    this.sessionId = sessionId;
  }

  /** Accept a frame only if it is newer than the one on screen. */
  acceptFrame(frame: FrameMessage): boolean {
    if (this.frame !== null && frame.seq <= this.frame.seq) {
      return false;
    }
    this.frame = frame;
    return true;
  }

  /** Current span as a fraction of the bounding-box diagonal. */
  spanFraction(): number | null {
    if (this.frame === null || this.diagonal <= 0) return null;
    return this.frame.span / this.diagonal;
  }
}
