/** One visually distinct map icon per marker kind. */

import type { MarkerKind } from "./types";

const BADGE = (fill: string, glyph: string) =>
  `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 32 40" width="30" height="38">` +
  `<path d="M16 1C8 1 2 7 2 15c0 10 14 24 14 24s14-14 14-24C30 7 24 1 16 1z"` +
  ` fill="${fill}" stroke="#22201c" stroke-width="1.5"/>` +
  glyph +
  `</svg>`;

export const MARKER_ICONS: Record<MarkerKind, string> = {
  model3d: BADGE(
    "#b0703c",
    `<path d="M16 7l7 4v8l-7 4-7-4v-8z" fill="none" stroke="#fff" stroke-width="2"/>` +
      `<path d="M9 11l7 4 7-4M16 15v8" fill="none" stroke="#fff" stroke-width="1.5"/>`,
  ),
  pano360: BADGE(
    "#3c6fb0",
    `<circle cx="16" cy="15" r="7" fill="none" stroke="#fff" stroke-width="2"/>` +
      `<ellipse cx="16" cy="15" rx="7" ry="2.8" fill="none" stroke="#fff" stroke-width="1.5"/>`,
  ),
  info: BADGE(
    "#6a4f8f",
    `<circle cx="16" cy="9.5" r="2" fill="#fff"/>` +
      `<rect x="14" y="13" width="4" height="10" rx="1" fill="#fff"/>`,
  ),
  video: BADGE("#3f8f5a", `<path d="M12 9l11 6-11 6z" fill="#fff"/>`),
};

export function iconElement(kind: MarkerKind): HTMLElement {
  const el = document.createElement("div");
  el.className = `hv-marker hv-marker-${kind}`;
  el.innerHTML = MARKER_ICONS[kind];
  return el;
}
