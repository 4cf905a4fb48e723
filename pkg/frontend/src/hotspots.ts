/** Panorama hotspots.
 *
 * Annotation directions arrive fully resolved from the bundle; the
 * viewer copies yaw/pitch verbatim and only projects them for display.
 * Convention: yaw 0 looks along -Z (the camera heading), positive yaw
 * turns right (+X); positive pitch up (+Y). Matches a sphere whose
 * equirectangular texture is centered on -Z.
 */

import type { Annotation, MediaEntry } from "./types";
import { textOf } from "./types";

export interface Hotspot {
  label: string;
  body: string;
  yaw: number;
  pitch: number;
  u: number;
  v: number;
}

export function hotspotsFromMedia(media: MediaEntry): Hotspot[] {
  return (media.annotations ?? []).map((a: Annotation) => ({
    label: textOf(a.label),
    body: textOf(a.body),
    yaw: a.yaw,
    pitch: a.pitch,
    u: a.u,
    v: a.v,
  }));
}

const DEG = Math.PI / 180;

export function hotspotToVector(
  h: { yaw: number; pitch: number },
  radius: number,
): { x: number; y: number; z: number } {
  const yaw = h.yaw * DEG;
  const pitch = h.pitch * DEG;
  return {
    x: radius * Math.cos(pitch) * Math.sin(yaw),
    y: radius * Math.sin(pitch),
    z: -radius * Math.cos(pitch) * Math.cos(yaw),
  };
}
