// Entry point: session bootstrap, controls, stream wiring, render loop.

import {
  createSession, fetchTopology, fetchXY, ReliefStream, waitReady,
} from "./client";
import { Banner, formatHud, FpsCounter } from "./hud";
import {
  alphaToSlider, BETA_MAX, DEFAULT_PARAMS, GAMMA_MAX, ParamSender,
  ReliefParams, sliderToAlpha,
} from "./params";
import { ViewerState } from "./state";
import { attachOrbitControls, ReliefView } from "./viewer";

const el = <T extends HTMLElement>(id: string) =>
  document.getElementById(id) as T;

const httpBase = location.origin;
const wsBase = httpBase.replace(/^http/, "ws");

async function startSession(id: string): Promise<void> {
  const banner = new Banner(el("banner"));
  const hud = el("hud");
  const state = new ViewerState(id);
  const info = await waitReady(httpBase, id);
  state.pointCount = info.point_count;
  state.diagonal = info.diagonal;
  state.params = { ...info.params };

  const [xy, topology] = await Promise.all([
    fetchXY(httpBase, id), fetchTopology(httpBase, id)]);
  state.xy = xy;

  const canvas = el<HTMLCanvasElement>("canvas");
  canvas.width = canvas.clientWidth;
  canvas.height = canvas.clientHeight;
  const view = new ReliefView(canvas, xy, topology, state.camera);
  attachOrbitControls(canvas, state.camera, () => requestRender());

  const fpsCounter = new FpsCounter();
  let renderQueued = false;
  function requestRender() {
    if (renderQueued) return;
    renderQueued = true;
    requestAnimationFrame(() => {
      renderQueued = false;
      view.render();
    });
  }

  function refreshHud() {
    hud.textContent = formatHud(state.params, state.frame?.span ?? null,
                                state.spanFraction(), fpsCounter.fps());
  }

  const stream = new ReliefStream(`${wsBase}/session/${id}/stream`, {
    onInit: (init) => {
      banner.hide();
      state.params = { ...init.params };
      syncSliders(state.params);
      sender.flush();
    },
    onFrame: (frame) => {
      if (!state.acceptFrame(frame)) return;
      view.applyFrame(frame);
      fpsCounter.tick();
      refreshHud();
      requestRender();
    },
    onProgress: (p) => {
      el("target-status").textContent =
        `solving: ${p.solves} solves, span ${p.span.toFixed(4)}`;
    },
    onTarget: (t) => {
      el("target-status").textContent =
        `done in ${t.solves} solves: span ${t.span.toFixed(4)}`;
      state.params = { alpha: t.alpha, beta: t.beta, gamma: state.params!.gamma };
      syncSliders(state.params);
      refreshHud();
    },
    onExport: (e) => {
      const a = document.createElement("a");
      a.href = `${httpBase}${e.url}`;
      a.download = "";
      a.click();
    },
    onError: (message) => banner.show(message),
    onConnection: (open) => {
      if (!open) banner.show("connection lost, reconnecting...");
      for (const i of ["alpha", "beta", "gamma"]) {
        el<HTMLInputElement>(`slider-${i}`).disabled = !open;
      }
    },
  });

  const sender = new ParamSender((p: ReliefParams) => stream.setParams(p));

  function readSliders(): ReliefParams {
    return {
      alpha: sliderToAlpha(Number(el<HTMLInputElement>("slider-alpha").value)),
      beta: Number(el<HTMLInputElement>("slider-beta").value) * BETA_MAX,
      gamma: Number(el<HTMLInputElement>("slider-gamma").value) * GAMMA_MAX,
    };
  }

  function syncSliders(p: ReliefParams) {
    el<HTMLInputElement>("slider-alpha").value = String(alphaToSlider(p.alpha));
    el<HTMLInputElement>("slider-beta").value = String(p.beta / BETA_MAX);
    el<HTMLInputElement>("slider-gamma").value = String(p.gamma / GAMMA_MAX);
  }

  for (const name of ["alpha", "beta", "gamma"]) {
    el<HTMLInputElement>(`slider-${name}`).addEventListener("input", () => {
      state.params = readSliders();
      sender.update(state.params);
      refreshHud();
    });
  }

  el<HTMLButtonElement>("target-go").addEventListener("click", () => {
    const frac = Number(el<HTMLInputElement>("target-frac").value);
    if (frac > 0) stream.targetHeight(frac * state.diagonal);
  });
  el<HTMLButtonElement>("export-ply").addEventListener("click",
    () => stream.requestExport("ply"));
  el<HTMLSelectElement>("base-select").addEventListener("change", (ev) => {
    stream.setBase((ev.target as HTMLSelectElement).value);
  });

  window.addEventListener("resize", () => {
    canvas.width = canvas.clientWidth;
    canvas.height = canvas.clientHeight;
    view.resize(canvas.width, canvas.height);
    requestRender();
  });

  syncSliders(state.params ?? DEFAULT_PARAMS);
  refreshHud();
  requestRender();
}

async function boot(): Promise<void> {
  const banner = new Banner(el("banner"));
  const fromUrl = new URLSearchParams(location.search).get("session");
  if (fromUrl) {
    startSession(fromUrl).catch((e) => banner.show(String(e)));
    return;
  }
  el("upload-form").style.display = "block";
  el<HTMLButtonElement>("upload-go").addEventListener("click", async () => {
    const files = el<HTMLInputElement>("upload-file").files;
    if (!files || files.length === 0) return;
    try {
      banner.show("uploading and preparing...");
      const id = await createSession(httpBase, files[0]);
      history.replaceState(null, "", `?session=${id}`);
      el("upload-form").style.display = "none";
      await startSession(id);
      banner.hide();
    } catch (e) {
      banner.show(String(e));
    }
  });
}

boot();
