/** Kind-to-view mapping and small pure pieces of the media pop-ups. */

import type { MarkerEntry, MediaEntry } from "./types";

export type PopupViewKind = "model" | "pano" | "video" | "info";

export function popupViewFor(marker: MarkerEntry): PopupViewKind {
  switch (marker.kind) {
    case "model3d":
      return "model";
    case "pano360":
      return "pano";
    case "video":
      return "video";
    case "info":
      return "info";
  }
}

/** Videos are embedded players that the visitor starts; never autoplay. */
export function videoAttributes(): { controls: boolean; autoplay: boolean; preload: "metadata" } {
  return { controls: true, autoplay: false, preload: "metadata" };
}

/** Main-model / dollhouse-variant swap for reconstructed buildings. */
export class DollhouseToggle {
  private dollhouse = false;

  constructor(private readonly media: MediaEntry) {}

  get available(): boolean {
    return typeof this.media.dollhouse_href === "string";
  }

  get showingDollhouse(): boolean {
    return this.dollhouse;
  }

  get currentHref(): string {
    if (this.dollhouse && this.media.dollhouse_href) return this.media.dollhouse_href;
    return this.media.href;
  }

  toggle(): string {
    if (this.available) this.dollhouse = !this.dollhouse;
    return this.currentHref;
  }
}
