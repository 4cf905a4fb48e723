/** 360 panorama sphere with clickable annotation hotspots.
 *
 * Hotspot directions are the bundle's resolved yaw/pitch, projected to
 * screen space every frame; clicking one reveals its label and text.
 */

import * as THREE from "three";

import type { BundleApi } from "../api";
import { hotspotsFromMedia, hotspotToVector, type Hotspot } from "../hotspots";
import type { MediaEntry } from "../types";

const SPHERE_RADIUS = 50;

export class PanoView {
  private renderer: THREE.WebGLRenderer | null = null;
  private scene = new THREE.Scene();
  private camera = new THREE.PerspectiveCamera(75, 4 / 3, 0.1, 200);
  private frame = 0;
  private disposed = false;
  private yaw = 0; // camera look yaw, degrees; 0 = image center
  private pitch = 0;
  private dragging = false;
  private hotspotEls: { hotspot: Hotspot; el: HTMLButtonElement; vec: THREE.Vector3 }[] = [];
  private detail: HTMLElement | null = null;

  constructor(
    private readonly container: HTMLElement,
    private readonly api: BundleApi,
    private readonly media: MediaEntry,
    private readonly onError: (message: string) => void,
  ) {}

  mount(): void {
    try {
      this.renderer = new THREE.WebGLRenderer({ antialias: true });
    } catch (err) {
      this.onError(`panorama view unavailable: ${String(err)}`);
      return;
    }
    const width = this.container.clientWidth || 640;
    const height = this.container.clientHeight || 480;
    this.renderer.setSize(width, height);
    this.camera.aspect = width / height;
    this.camera.updateProjectionMatrix();
    this.container.appendChild(this.renderer.domElement);

    const loader = new THREE.TextureLoader();
    loader.load(
      this.api.assetUrl(this.media.href),
      (texture) => {
        texture.colorSpace = THREE.SRGBColorSpace;
        const geometry = new THREE.SphereGeometry(SPHERE_RADIUS, 64, 32);
        geometry.scale(-1, 1, 1); // view from inside
        const mesh = new THREE.Mesh(geometry, new THREE.MeshBasicMaterial({ map: texture }));
        // Align the texture's horizontal center (u = 0.5) with -Z, the
        // yaw-0 direction the compiler's uv convention assumes.
        mesh.rotation.y = -Math.PI / 2;
        this.scene.add(mesh);
      },
      undefined,
      () => this.onError("could not load panorama image"),
    );

    for (const hotspot of hotspotsFromMedia(this.media)) {
      const el = document.createElement("button");
      el.className = "hv-hotspot";
      el.textContent = hotspot.label;
      el.dataset.yaw = String(hotspot.yaw);
      el.dataset.pitch = String(hotspot.pitch);
      el.addEventListener("click", () => this.showDetail(hotspot));
      this.container.appendChild(el);
      const v = hotspotToVector(hotspot, SPHERE_RADIUS * 0.95);
      this.hotspotEls.push({ hotspot, el, vec: new THREE.Vector3(v.x, v.y, v.z) });
    }

    this.bindPointer();
    this.lookAtYawPitch();
    this.loop();
  }

  private showDetail(hotspot: Hotspot): void {
    this.detail?.remove();
    const card = document.createElement("div");
    card.className = "hv-hotspot-detail";
    const title = document.createElement("strong");
    title.textContent = hotspot.label;
    const body = document.createElement("p");
    body.textContent = hotspot.body;
    const close = document.createElement("button");
    close.textContent = "×";
    close.addEventListener("click", () => card.remove());
    card.append(close, title, body);
    this.container.appendChild(card);
    this.detail = card;
  }

  private bindPointer(): void {
    const el = this.renderer!.domElement;
    let lastX = 0;
    let lastY = 0;
    el.addEventListener("pointerdown", (e) => {
      this.dragging = true;
      lastX = e.clientX;
      lastY = e.clientY;
      el.setPointerCapture(e.pointerId);
    });
    el.addEventListener("pointermove", (e) => {
      if (!this.dragging) return;
      this.yaw += (e.clientX - lastX) * -0.18;
      this.pitch += (e.clientY - lastY) * 0.18;
      this.pitch = Math.max(-89, Math.min(89, this.pitch));
      lastX = e.clientX;
      lastY = e.clientY;
      this.lookAtYawPitch();
    });
    el.addEventListener("pointerup", () => {
      this.dragging = false;
    });
  }

  private lookAtYawPitch(): void {
    const v = hotspotToVector({ yaw: this.yaw, pitch: this.pitch }, 1);
    this.camera.lookAt(v.x, v.y, v.z);
  }

  private placeHotspots(): void {
    if (!this.renderer) return;
    const { width, height } = this.renderer.domElement.getBoundingClientRect();
    for (const { el, vec } of this.hotspotEls) {
      const projected = vec.clone().project(this.camera);
      const visible = projected.z < 1;
      el.style.display = visible ? "block" : "none";
      if (!visible) continue;
      el.style.left = `${((projected.x + 1) / 2) * width}px`;
      el.style.top = `${((1 - projected.y) / 2) * height}px`;
    }
  }

  private loop = (): void => {
    if (this.disposed || !this.renderer) return;
    this.frame = requestAnimationFrame(this.loop);
    this.renderer.render(this.scene, this.camera);
    this.placeHotspots();
  };

  dispose(): void {
    this.disposed = true;
    cancelAnimationFrame(this.frame);
    this.renderer?.dispose();
    this.renderer?.domElement.remove();
    for (const { el } of this.hotspotEls) el.remove();
    this.detail?.remove();
  }
}
