/** Pop-up navigation state.
 *
 * At most one pop-up is open. Prev/next walk the compiler's marker
 * order and wrap at both ends; exit always returns to the map in one
 * action, from any state.
 */

import type { MarkerEntry } from "./types";

export type View =
  | { view: "map" }
  | { view: "popup"; markerId: string; mediaIndex: number };

export class MarkerNavigator {
  private markers: MarkerEntry[] = [];
  private state: View = { view: "map" };
  private listeners: ((state: View) => void)[] = [];

  setMarkers(markers: MarkerEntry[]): void {
    this.markers = [...markers];
    // Markers changed under an open pop-up (layer switch): back to map.
    if (this.state.view === "popup" && !this.find(this.state.markerId)) {
      this.exit();
    }
  }

  get current(): View {
    return this.state;
  }

  currentMarker(): MarkerEntry | null {
    return this.state.view === "popup" ? this.find(this.state.markerId) : null;
  }

  onChange(listener: (state: View) => void): void {
    this.listeners.push(listener);
  }

  open(markerId: string, mediaIndex = 0): void {
    if (!this.find(markerId)) {
      console.warn(`viewer: unknown marker ${markerId}`);
      return;
    }
    this.setState({ view: "popup", markerId, mediaIndex });
  }

  next(): void {
    this.step(1);
  }

  prev(): void {
    this.step(-1);
  }

  exit(): void {
    this.setState({ view: "map" });
  }

  private step(delta: number): void {
    const state = this.state;
    if (state.view !== "popup" || this.markers.length === 0) return;
    const at = this.markers.findIndex((m) => m.marker_id === state.markerId);
    const base = at >= 0 ? at : 0;
    const wrapped = (base + delta + this.markers.length) % this.markers.length;
    this.setState({ view: "popup", markerId: this.markers[wrapped].marker_id, mediaIndex: 0 });
  }

  private find(markerId: string): MarkerEntry | null {
    return this.markers.find((m) => m.marker_id === markerId) ?? null;
  }

  private setState(next: View): void {
    this.state = next;
    for (const listener of this.listeners) listener(next);
  }
}
