// HTTP and WebSocket access to the relief service.

import { decodeFrame, FrameMessage } from "./codec";
import type { ReliefParams } from "./params";

export interface SessionInfo {
  id: string;
  state: "Preparing" | "Ready" | "Targeting" | "Error";
  point_count: number;
  control_count: number;
  diagonal: number;
  params: ReliefParams;
  error?: { code: string; message: string };
}

export interface TargetProgress {
  solves: number;
  alpha: number;
  beta: number;
  span: number;
}

export interface TargetResult {
  alpha: number;
  beta: number;
  span: number;
  solves: number;
}

export interface StreamHandlers {
  onInit?: (init: { seq: number; point_count: number; params: ReliefParams }) => void;
  onFrame?: (frame: FrameMessage) => void;
  onProgress?: (p: TargetProgress) => void;
  onTarget?: (t: TargetResult) => void;
  onExport?: (e: { url: string; format: string }) => void;
  onError?: (message: string) => void;
  onConnection?: (open: boolean) => void;
}

async function checked(r: Response): Promise<Response> {
  if (!r.ok) throw new Error(`${r.url}: HTTP ${r.status}`);
  return r;
}

export async function getInfo(base: string, id: string): Promise<SessionInfo> {
  const r = await checked(await fetch(`${base}/session/${id}`));
  return r.json();
}

export async function waitReady(base: string, id: string,
                                pollMs = 500): Promise<SessionInfo> {
  for (;;) {
    const info = await getInfo(base, id);
    if (info.state === "Ready") return info;
    if (info.state === "Error") {
      throw new Error(info.error?.message ?? "session failed to prepare");
    }
    await new Promise((res) => setTimeout(res, pollMs));
  }
}

export async function createSession(base: string, file: File,
                                    view?: string): Promise<string> {
  const form = new FormData();
  form.append("cloud", file);
  if (view) form.append("view", view);
  const r = await fetch(`${base}/session`, { method: "POST", body: form });
  if (!r.ok) {
    const body = await r.json().catch(() => null);
    throw new Error(body?.message ?? `upload failed: HTTP ${r.status}`);
  }
  return (await r.json()).id;
}

export async function fetchXY(base: string, id: string): Promise<Float32Array> {
  const r = await checked(await fetch(`${base}/session/${id}/xy`));
  return new Float32Array(await r.arrayBuffer());
}

export async function fetchTopology(base: string, id: string): Promise<Uint32Array> {
  const r = await checked(await fetch(`${base}/session/${id}/mesh-topology`));
  return new Uint32Array(await r.arrayBuffer());
}

const BACKOFF_START_MS = 500;
const BACKOFF_MAX_MS = 10_000;

/**
 * WebSocket stream with automatic reconnect (exponential backoff).
 * Binary frames are decoded and handed to onFrame; JSON side messages
 * are dispatched by their single key.
 */
export class ReliefStream {
  private ws: WebSocket | null = null;
  private backoff = BACKOFF_START_MS;
  private closed = false;

  constructor(private wsUrl: string, private handlers: StreamHandlers) {
    this.connect();
  }

  private connect(): void {
    if (this.closed) return;
    const ws = new WebSocket(this.wsUrl);
    ws.binaryType = "arraybuffer";
    this.ws = ws;
    let gotInit = false;
    ws.onmessage = (ev: MessageEvent) => {
      if (ev.data instanceof ArrayBuffer) {
        try {
          this.handlers.onFrame?.(decodeFrame(ev.data));
        } catch (e) {
          this.handlers.onError?.(String(e));
          ws.close();
        }
        return;
      }
      const msg = JSON.parse(ev.data as string);
      if (!gotInit) {
        gotInit = true;
        this.backoff = BACKOFF_START_MS;
        this.handlers.onInit?.(msg);
        this.handlers.onConnection?.(true);
        return;
      }
      if (msg.progress) this.handlers.onProgress?.(msg.progress);
      else if (msg.target) this.handlers.onTarget?.(msg.target);
      else if (msg.export) this.handlers.onExport?.(msg.export);
      else if (msg.error) this.handlers.onError?.(msg.error.message ?? "server error");
    };
    ws.onclose = () => {
      this.handlers.onConnection?.(false);
      if (this.closed) return;
      setTimeout(() => this.connect(), this.backoff);
      this.backoff = Math.min(this.backoff * 2, BACKOFF_MAX_MS);
    };
    ws.onerror = () => ws.close();
  }

  private sendJson(msg: object): void {
    if (this.ws && this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(JSON.stringify(msg));
    }
  }

  setParams(params: ReliefParams): void {
    this.sendJson({ set_params: params });
  }

  setBase(base: string): void {
    this.sendJson({ set_base: { base } });
  }

  targetHeight(h0: number): void {
    this.sendJson({ target_height: { h0 } });
  }

  requestExport(format: string): void {
    this.sendJson({ export: { format } });
  }

  close(): void {
    this.closed = true;
    this.ws?.close();
  }
}
