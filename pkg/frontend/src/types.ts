/** Bundle JSON shapes as the compiler emits them. The viewer consumes
 *  every geometric value (corners, yaw/pitch, u/v, bounds) verbatim. */

export type Localized = string | ({ default: string } & Record<string, string>);

export type MarkerKind = "model3d" | "pano360" | "info" | "video";

export interface SiteIndex {
  schema_version: number;
  site_id: string;
  title: Localized;
  description: Localized;
  initial_view: { position: [number, number]; zoom: number };
  layers: LayerSummary[];
  assets: Record<string, AssetEntry>;
}

export interface LayerSummary {
  layer_id: string;
  label: Localized;
  period_start: number;
  period_end: number | null;
  base_style: "satellite" | "plain";
  index: string;
  marker_count: number;
}

export interface AssetEntry {
  href: string;
  kind: "glb" | "image" | "video";
  role: string;
  bytes: number;
  width?: number;
  height?: number;
  preview?: string;
  caption?: Localized;
  render_hints?: Record<string, unknown>;
  equirectangular?: string;
}

export interface OverlayEntry {
  asset_id: string;
  href: string;
  opacity_default: number;
  corners: {
    nw: [number, number];
    ne: [number, number];
    se: [number, number];
    sw: [number, number];
  };
  rmse_m: number | null;
  width: number;
  height: number;
}

export interface Annotation {
  label: Localized;
  body: Localized;
  yaw: number;
  pitch: number;
  u: number;
  v: number;
}

export interface MediaEntry {
  asset_id: string;
  kind: "glb" | "image" | "video";
  role: string;
  href: string;
  width?: number;
  height?: number;
  preview?: string;
  caption?: Localized;
  render_hints?: Record<string, unknown>;
  heading?: number;
  annotations?: Annotation[];
  dollhouse_href?: string;
  equirectangular?: string;
}

export interface MarkerEntry {
  marker_id: string;
  kind: MarkerKind;
  position: number[];
  title: Localized;
  body: Localized;
  media: MediaEntry[];
  related_locations: { label: Localized; position: [number, number] }[];
  zoom_bounds: [number, number, number, number] | null;
  nav_order: number | null;
  extras: Record<string, unknown>;
}

export interface LayerIndex {
  layer_id: string;
  label: Localized;
  period_start: number;
  period_end: number | null;
  base_style: "satellite" | "plain";
  overlays: OverlayEntry[];
  markers: MarkerEntry[];
}

/** Viewer picks the default language; locale maps are future work. */
export function textOf(value: Localized | undefined): string {
  if (value === undefined) return "";
  return typeof value === "string" ? value : value.default;
}
