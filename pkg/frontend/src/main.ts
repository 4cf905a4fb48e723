/** Composition root: fetch the site, wire the map, timeline and pop-ups. */

import "./style.css";

import { BundleApi, resolveConfig } from "./api";
import { SiteMap } from "./map";
import { PopupShell } from "./popup";
import { MarkerNavigator } from "./state";
import { Timeline } from "./timeline";
import type { LayerIndex } from "./types";
import { textOf } from "./types";

async function boot(): Promise<void> {
  const config = resolveConfig();
  const api = new BundleApi(config);
  const app = document.getElementById("app")!;

  const site = await api.site();
  document.title = textOf(site.title);

  const mapHost = document.createElement("div");
  mapHost.id = "hv-map";
  app.appendChild(mapHost);

  const nav = new MarkerNavigator();
  const map = new SiteMap(
    mapHost,
    site.initial_view.position,
    site.initial_view.zoom,
    api,
    config,
    (marker) => nav.open(marker.marker_id),
  );
  await map.whenReady();

  const layers = new Map<string, LayerIndex>();
  for (const summary of site.layers) {
    const layer = await api.layer(summary.layer_id);
    layers.set(summary.layer_id, layer);
    map.addLayer(layer);
  }

  const popupHost = document.createElement("div");
  app.appendChild(popupHost);
  new PopupShell(popupHost, api, nav, map);

  const initialLayer = site.layers[0].layer_id;
  const timeline = new Timeline(
    site.layers.map((l) => l.layer_id),
    initialLayer,
  );

  // Timeline slider along the bottom of the map.
  const bar = document.createElement("nav");
  bar.id = "hv-timeline";
  const buttons = new Map<string, HTMLButtonElement>();
  for (const summary of site.layers) {
    const button = document.createElement("button");
    const period =
      summary.period_end === null
        ? `${summary.period_start}–`
        : `${summary.period_start}–${summary.period_end}`;
    button.innerHTML = `<span>${textOf(summary.label)}</span><small>${period}</small>`;
    button.addEventListener("click", () => timeline.select(summary.layer_id));
    bar.appendChild(button);
    buttons.set(summary.layer_id, button);
  }
  app.appendChild(bar);

  const applySample = (): void => {
    const sample = timeline.sample();
    map.applyOpacities(sample.opacities);
    map.showMarkers(sample.markerLayer);
    nav.setMarkers(layers.get(sample.markerLayer)?.markers ?? []);
    map.setBackgroundFor(layers.get(sample.activeLayer)!.base_style);
    for (const [id, button] of buttons) {
      button.classList.toggle("hv-active", id === sample.activeLayer);
    }
    requestAnimationFrame(applySample);
  };
  applySample();

  // A dismissible caption introduces the active layer's period.
  const caption = document.createElement("aside");
  caption.id = "hv-layer-caption";
  const captionText = document.createElement("span");
  const captionClose = document.createElement("button");
  captionClose.textContent = "×";
  captionClose.addEventListener("click", () => {
    caption.hidden = true;
  });
  caption.append(captionText, captionClose);
  app.appendChild(caption);
  let lastCaptionLayer = "";
  setInterval(() => {
    const active = timeline.sample().activeLayer;
    if (active !== lastCaptionLayer) {
      lastCaptionLayer = active;
      captionText.textContent = textOf(layers.get(active)!.label);
      caption.hidden = false;
    }
  }, 250);
}

boot().catch((err) => {
  const app = document.getElementById("app")!;
  const panel = document.createElement("div");
  panel.className = "hv-boot-error";
  panel.textContent = `Could not load the site bundle: ${String(err)}`;
  app.appendChild(panel);
});
