// three.js heightfield view: static XY + topology, streamed z and normals.

import * as THREE from "three";
import type { FrameMessage } from "./codec";
import type { OrbitCamera } from "./state";

export class ReliefView {
  private renderer: THREE.WebGLRenderer;
  private scene: THREE.Scene;
  private camera: THREE.PerspectiveCamera;
  private geometry: THREE.BufferGeometry;
  private positions: Float32Array;
  private center = new THREE.Vector3();
  private radius = 1;
  private orbit: OrbitCamera;

  constructor(canvas: HTMLCanvasElement, xy: Float32Array,
              topology: Uint32Array, orbit: OrbitCamera) {
    this.orbit = orbit;
    const n = xy.length / 2;
    this.positions = new Float32Array(3 * n);
    let minX = Infinity, maxX = -Infinity, minY = Infinity, maxY = -Infinity;
    for (let i = 0; i < n; i++) {
      const x = xy[2 * i], y = xy[2 * i + 1];
      this.positions[3 * i] = x;
      this.positions[3 * i + 1] = y;
      if (x < minX) minX = x;
      if (x > maxX) maxX = x;
      if (y < minY) minY = y;
      if (y > maxY) maxY = y;
    }
    this.center.set((minX + maxX) / 2, (minY + maxY) / 2, 0);
    this.radius = Math.hypot(maxX - minX, maxY - minY) / 2 || 1;

    this.geometry = new THREE.BufferGeometry();
    const pos = new THREE.BufferAttribute(this.positions, 3);
    pos.setUsage(THREE.DynamicDrawUsage);
    this.geometry.setAttribute("position", pos);
    const nrm = new THREE.BufferAttribute(new Float32Array(3 * n), 3);
    nrm.setUsage(THREE.DynamicDrawUsage);
    this.geometry.setAttribute("normal", nrm);
    this.geometry.setIndex(new THREE.BufferAttribute(topology, 1));

    const material = new THREE.MeshStandardMaterial({
      color: 0xcfc4ae, roughness: 0.8, metalness: 0.05,
      side: THREE.DoubleSide,
    });
    this.scene = new THREE.Scene();
    this.scene.background = new THREE.Color(0x20242c);
    this.scene.add(new THREE.Mesh(this.geometry, material));
    this.scene.add(new THREE.AmbientLight(0xffffff, 0.35));
    const key = new THREE.DirectionalLight(0xffffff, 1.1);
    key.position.set(1, 1, 2);
    this.scene.add(key);

    this.camera = new THREE.PerspectiveCamera(
      45, canvas.clientWidth / Math.max(1, canvas.clientHeight), 0.01, 1000);
    this.renderer = new THREE.WebGLRenderer({ canvas, antialias: true });
    this.resize(canvas.clientWidth, canvas.clientHeight);
  }

  /** Copy a decoded frame into the vertex buffers (z and normals only). */
  applyFrame(frame: FrameMessage): void {
    const n = frame.z.length;
    for (let i = 0; i < n; i++) {
      this.positions[3 * i + 2] = frame.z[i];
    }
    const pos = this.geometry.getAttribute("position") as THREE.BufferAttribute;
    pos.needsUpdate = true;
    const nrm = this.geometry.getAttribute("normal") as THREE.BufferAttribute;
    (nrm.array as Float32Array).set(frame.normals);
    nrm.needsUpdate = true;
  }

  setLightAngle(radians: number): void {
    const light = this.scene.children.find(
      (c) => c instanceof THREE.DirectionalLight) as THREE.DirectionalLight;
    light.position.set(Math.cos(radians), Math.sin(radians), 2);
  }

  resize(width: number, height: number): void {
    this.renderer.setSize(width, height, false);
    this.camera.aspect = width / Math.max(1, height);
    this.camera.updateProjectionMatrix();
  }

  render(): void {
    const { azimuth, elevation, zoom } = this.orbit;
    const d = (2.5 * this.radius) / zoom;
    this.camera.position.set(
      this.center.x + d * Math.cos(elevation) * Math.cos(azimuth),
      this.center.y + d * Math.cos(elevation) * Math.sin(azimuth),
      this.center.z + d * Math.sin(elevation));
    this.camera.up.set(0, 0, 1);
    this.camera.lookAt(this.center);
    this.renderer.render(this.scene, this.camera);
  }
}

/** Wire pointer drag and wheel events to the orbit parameters. */
export function attachOrbitControls(canvas: HTMLElement, orbit: OrbitCamera,
                                    onChange: () => void): void {
  let dragging = false;
  let lastX = 0, lastY = 0;
  canvas.addEventListener("pointerdown", (e) => {
    dragging = true;
    lastX = e.clientX;
    lastY = e.clientY;
    canvas.setPointerCapture(e.pointerId);
  });
  canvas.addEventListener("pointermove", (e) => {
    if (!dragging) return;
    orbit.azimuth -= (e.clientX - lastX) * 0.01;
    orbit.elevation = Math.min(1.55, Math.max(-1.55,
      orbit.elevation + (e.clientY - lastY) * 0.01));
    lastX = e.clientX;
    lastY = e.clientY;
    onChange();
  });
  canvas.addEventListener("pointerup", () => { dragging = false; });
  canvas.addEventListener("wheel", (e) => {
    e.preventDefault();
    orbit.zoom = Math.min(20, Math.max(0.1,
      orbit.zoom * Math.exp(-e.deltaY * 0.001)));
    onChange();
  }, { passive: false });
}
