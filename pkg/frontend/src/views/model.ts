/** Orbitable GLB viewer with the dollhouse toggle.
 *
 * Models are rendered with neutral white lighting and their own
 * materials untouched: monochrome textures mean "this building no
 * longer exists" and must reach the screen untinted.
 */

import * as THREE from "three";
import { GLTFLoader } from "three/examples/jsm/loaders/GLTFLoader.js";
import { OrbitControls } from "three/examples/jsm/controls/OrbitControls.js";

import type { BundleApi } from "../api";
import { DollhouseToggle } from "../media";
import type { MediaEntry } from "../types";

export class ModelView {
  private renderer: THREE.WebGLRenderer | null = null;
  private scene = new THREE.Scene();
  private camera = new THREE.PerspectiveCamera(45, 4 / 3, 0.01, 5000);
  private controls: OrbitControls | null = null;
  private current: THREE.Object3D | null = null;
  private frame = 0;
  private disposed = false;
  private readonly toggle: DollhouseToggle;

  constructor(
    private readonly container: HTMLElement,
    private readonly api: BundleApi,
    private readonly media: MediaEntry,
    private readonly onError: (message: string) => void,
  ) {
    this.toggle = new DollhouseToggle(media);
  }

  mount(): void {
    try {
      this.renderer = new THREE.WebGLRenderer({ antialias: true });
    } catch (err) {
      this.onError(`3D view unavailable: ${String(err)}`);
      return;
    }
    const width = this.container.clientWidth || 640;
    const height = this.container.clientHeight || 480;
    this.renderer.setSize(width, height);
    this.camera.aspect = width / height;
    this.camera.updateProjectionMatrix();
    this.container.appendChild(this.renderer.domElement);

    this.scene.background = new THREE.Color(0x1d1d22);
    this.scene.add(new THREE.AmbientLight(0xffffff, 1.1));
    const sun = new THREE.DirectionalLight(0xffffff, 2.0);
    sun.position.set(1, 2, 1.5);
    this.scene.add(sun);

    this.controls = new OrbitControls(this.camera, this.renderer.domElement);
    this.controls.enableDamping = true;

    if (this.toggle.available) {
      const button = document.createElement("button");
      button.className = "hv-dollhouse-toggle";
      button.textContent = "Dollhouse view";
      button.addEventListener("click", () => {
        const href = this.toggle.toggle();
        button.textContent = this.toggle.showingDollhouse ? "Full view" : "Dollhouse view";
        void this.load(href);
      });
      this.container.appendChild(button);
    }

    void this.load(this.toggle.currentHref);
    this.loop();
  }

  private async load(href: string): Promise<void> {
    try {
      const gltf = await new GLTFLoader().loadAsync(this.api.assetUrl(href));
      if (this.disposed) return;
      if (this.current) this.scene.remove(this.current);
      this.current = gltf.scene;
      this.scene.add(gltf.scene);
      this.frameObject(gltf.scene);
    } catch (err) {
      this.onError(`could not load model: ${String(err)}`);
    }
  }

  /** Frame the focus_target node when hinted, else the whole model. */
  private frameObject(root: THREE.Object3D): void {
    const hints = this.media.render_hints ?? {};
    const focusName = typeof hints["focus_target"] === "string" ? hints["focus_target"] : null;
    const focus = focusName ? (root.getObjectByName(focusName) ?? root) : root;
    const box = new THREE.Box3().setFromObject(focus);
    if (box.isEmpty()) return;
    const center = box.getCenter(new THREE.Vector3());
    const size = box.getSize(new THREE.Vector3()).length() || 1;
    this.camera.position.copy(center).add(new THREE.Vector3(size, size * 0.7, size));
    this.camera.near = size / 100;
    this.camera.far = size * 100;
    this.camera.updateProjectionMatrix();
    if (this.controls) {
      this.controls.target.copy(center);
      this.controls.update();
    }
  }

  private loop = (): void => {
    if (this.disposed || !this.renderer) return;
    this.frame = requestAnimationFrame(this.loop);
    this.controls?.update();
    this.renderer.render(this.scene, this.camera);
  };

  dispose(): void {
    this.disposed = true;
    cancelAnimationFrame(this.frame);
    this.controls?.dispose();
    this.renderer?.dispose();
    this.renderer?.domElement.remove();
  }
}
