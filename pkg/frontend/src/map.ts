/** MapLibre adapter: basemap, historical overlays, marker icons.
 *
 * Overlay corner coordinates come from the bundle in NW, NE, SE, SW
 * order, exactly what an image source wants; the viewer does no
 * projection work of its own.
 */

import {
  Map as MapLibreMap,
  Marker,
  NavigationControl,
  type StyleSpecification,
} from "maplibre-gl";
import "maplibre-gl/dist/maplibre-gl.css";

import type { BundleApi, ViewerConfig } from "./api";
import { boundsToCorners, type Bounds } from "./geo";
import { iconElement } from "./icons";
import type { LayerIndex, MarkerEntry } from "./types";
import { textOf } from "./types";

const PLAIN_BG = "#e8e2d4";
const SATELLITE_BG = "#2b2e26";

export class SiteMap {
  readonly map: MapLibreMap;
  private markerHandles = new Map<string, Marker[]>();
  private overlayLayerIds = new Map<string, string[]>();
  private overlayDefaults = new Map<string, number>();
  private visibleMarkerLayer: string | null = null;

  constructor(
    container: HTMLElement,
    center: [number, number],
    zoom: number,
    private readonly api: BundleApi,
    config: ViewerConfig,
    private readonly onMarkerClick: (marker: MarkerEntry) => void,
  ) {
    const style: StyleSpecification = {
      version: 8,
      sources: {},
      layers: [
        { id: "hv-bg", type: "background", paint: { "background-color": PLAIN_BG } },
      ],
    };
    if (config.satelliteTiles) {
      style.sources["hv-satellite"] = {
        type: "raster",
        tiles: [config.satelliteTiles],
        tileSize: 256,
      };
    }
    this.map = new MapLibreMap({
      container,
      style,
      center,
      zoom,
      attributionControl: false,
    });
    this.map.addControl(new NavigationControl({ showCompass: false }));
  }

  whenReady(): Promise<void> {
    return new Promise((resolve) => {
      if (this.map.loaded()) resolve();
      else this.map.once("load", () => resolve());
    });
  }

  /** Register one temporal layer's overlays and markers, all hidden. */
  addLayer(layer: LayerIndex): void {
    const layerIds: string[] = [];
    for (const overlay of layer.overlays) {
      const id = `hv-overlay-${layer.layer_id}-${overlay.asset_id}`;
      const c = overlay.corners;
      this.map.addSource(id, {
        type: "image",
        url: this.api.assetUrl(overlay.href),
        coordinates: [c.nw, c.ne, c.se, c.sw],
      });
      this.map.addLayer({
        id,
        type: "raster",
        source: id,
        paint: { "raster-opacity": 0, "raster-fade-duration": 0 },
      });
      layerIds.push(id);
      this.overlayDefaults.set(id, overlay.opacity_default);
    }
    this.overlayLayerIds.set(layer.layer_id, layerIds);

    const handles = layer.markers.map((marker) => {
      const el = iconElement(marker.kind);
      el.title = textOf(marker.title);
      el.addEventListener("click", (event) => {
        event.stopPropagation();
        this.onMarkerClick(marker);
      });
      return new Marker({ element: el, anchor: "bottom" }).setLngLat([
        marker.position[0],
        marker.position[1],
      ]);
    });
    this.markerHandles.set(layer.layer_id, handles);
  }

  /** Apply a timeline sample: overlay opacities and the marker set. */
  applyOpacities(opacities: Record<string, number>): void {
    for (const [layerId, level] of Object.entries(opacities)) {
      for (const overlayId of this.overlayLayerIds.get(layerId) ?? []) {
        const base = this.overlayDefaults.get(overlayId) ?? 1;
        this.map.setPaintProperty(overlayId, "raster-opacity", level * base);
      }
    }
  }

  showMarkers(layerId: string): void {
    if (this.visibleMarkerLayer === layerId) return;
    if (this.visibleMarkerLayer !== null) {
      for (const handle of this.markerHandles.get(this.visibleMarkerLayer) ?? []) {
        handle.remove();
      }
    }
    for (const handle of this.markerHandles.get(layerId) ?? []) {
      handle.addTo(this.map);
    }
    this.visibleMarkerLayer = layerId;
  }

  setBackgroundFor(baseStyle: "satellite" | "plain"): void {
    this.map.setPaintProperty(
      "hv-bg",
      "background-color",
      baseStyle === "plain" ? PLAIN_BG : SATELLITE_BG,
    );
  }

  /** Animate to a precomputed bbox (the info-marker zoom-out). */
  fitBounds(bounds: Bounds): void {
    this.map.fitBounds(boundsToCorners(bounds), { padding: 40, duration: 1200 });
  }

  flyTo(lonlat: [number, number], zoom: number): void {
    this.map.flyTo({ center: lonlat, zoom, duration: 900 });
  }
}
