/** The marker pop-up: media pane on the left, descriptive text on the
 *  right, prev/next arrows that wrap, and an exit that always lands on
 *  the map. A missing or broken asset shows an in-pop-up error panel;
 *  the application keeps running.
 */

import type { BundleApi } from "./api";
import type { SiteMap } from "./map";
import { popupViewFor, videoAttributes } from "./media";
import type { MarkerNavigator } from "./state";
import type { MarkerEntry, MediaEntry } from "./types";
import { textOf } from "./types";
import { ModelView } from "./views/model";
import { PanoView } from "./views/pano";

interface ActiveMediaView {
  dispose(): void;
}

export class PopupShell {
  private root: HTMLElement;
  private active: ActiveMediaView | null = null;

  constructor(
    container: HTMLElement,
    private readonly api: BundleApi,
    private readonly nav: MarkerNavigator,
    private readonly map: SiteMap,
  ) {
    this.root = document.createElement("div");
    this.root.className = "hv-popup-backdrop";
    this.root.hidden = true;
    container.appendChild(this.root);

    document.addEventListener("keydown", (e) => {
      if (this.root.hidden) return;
      if (e.key === "Escape") this.nav.exit();
      else if (e.key === "ArrowRight") this.nav.next();
      else if (e.key === "ArrowLeft") this.nav.prev();
    });

    nav.onChange((state) => {
      if (state.view === "map") this.hide();
      else this.show();
    });
  }

  private hide(): void {
    this.active?.dispose();
    this.active = null;
    this.root.hidden = true;
    this.root.replaceChildren();
  }

  private show(): void {
    const marker = this.nav.currentMarker();
    if (!marker) return;
    this.active?.dispose();
    this.active = null;
    this.root.hidden = false;
    this.root.replaceChildren();

    const dialog = document.createElement("div");
    dialog.className = "hv-popup";

    const media = document.createElement("div");
    media.className = "hv-popup-media";
    const text = document.createElement("div");
    text.className = "hv-popup-text";

    const title = document.createElement("h2");
    title.textContent = textOf(marker.title);
    const body = document.createElement("p");
    body.textContent = textOf(marker.body);
    text.append(title, body);

    const exit = document.createElement("button");
    exit.className = "hv-popup-exit";
    exit.textContent = "×";
    exit.title = "Back to map";
    exit.addEventListener("click", () => this.nav.exit());

    const prev = document.createElement("button");
    prev.className = "hv-popup-prev";
    prev.textContent = "‹";
    prev.title = "Previous marker";
    prev.addEventListener("click", () => this.nav.prev());
    const next = document.createElement("button");
    next.className = "hv-popup-next";
    next.textContent = "›";
    next.title = "Next marker";
    next.addEventListener("click", () => this.nav.next());

    dialog.append(media, text, exit, prev, next);
    this.root.appendChild(dialog);

    this.renderMedia(marker, media, text);
  }

  private error(into: HTMLElement, message: string): void {
    const panel = document.createElement("div");
    panel.className = "hv-media-error";
    panel.textContent = message;
    into.replaceChildren(panel);
  }

  private renderMedia(marker: MarkerEntry, pane: HTMLElement, text: HTMLElement): void {
    const view = popupViewFor(marker);
    const first: MediaEntry | undefined = marker.media[0];

    if (view !== "info" && !first) {
      this.error(pane, "This marker's media is missing from the bundle.");
      return;
    }

    if (view === "model") {
      const model = new ModelView(pane, this.api, first!, (msg) => this.error(pane, msg));
      model.mount();
      this.active = model;
      return;
    }

    if (view === "pano") {
      const pano = new PanoView(pane, this.api, first!, (msg) => this.error(pane, msg));
      pano.mount();
      this.active = pano;
      return;
    }

    if (view === "video") {
      const video = document.createElement("video");
      const attrs = videoAttributes();
      video.controls = attrs.controls;
      video.autoplay = attrs.autoplay;
      video.preload = attrs.preload;
      video.src = this.api.assetUrl(first!.href);
      video.addEventListener("error", () => this.error(pane, "Video failed to load."));
      pane.appendChild(video);
      return;
    }

    // info: photographs plus text, with the zoom-out control when the
    // marker points at related off-site locations.
    for (const m of marker.media) {
      const img = document.createElement("img");
      img.src = this.api.assetUrl(m.preview ?? m.href);
      img.alt = textOf(m.caption ?? marker.title);
      img.addEventListener("error", () => this.error(pane, "Image failed to load."));
      pane.appendChild(img);
      if (m.caption) {
        const cap = document.createElement("figcaption");
        cap.textContent = textOf(m.caption);
        pane.appendChild(cap);
      }
    }
    if (marker.media.length === 0) {
      pane.classList.add("hv-popup-media-empty");
    }
    if (marker.zoom_bounds) {
      const zoomOut = document.createElement("button");
      zoomOut.className = "hv-zoom-out";
      zoomOut.textContent = "Show related locations";
      const bounds = marker.zoom_bounds;
      zoomOut.addEventListener("click", () => {
        this.nav.exit();
        this.map.fitBounds(bounds);
      });
      text.appendChild(zoomOut);
      const list = document.createElement("ul");
      list.className = "hv-related";
      for (const rel of marker.related_locations) {
        const item = document.createElement("li");
        item.textContent = textOf(rel.label);
        list.appendChild(item);
      }
      text.appendChild(list);
    }
  }
}
