/** Temporal layer cross-fade.
 *
 * Selecting a layer starts a 600 ms transition with a smoothstep ease:
 * the outgoing layer's overlays fade along (1 - f(t)) and the incoming
 * along f(t), each still scaled by its authored opacity_default by the
 * map adapter. Markers swap at the midpoint. Selecting again mid-flight
 * retargets from the currently blended state, never jumping.
 */

export const TRANSITION_MS = 600;

export function smoothstep(t: number): number {
  const x = Math.min(1, Math.max(0, t));
  return x * x * (3 - 2 * x);
}

export interface TimelineSample {
  /** Per-layer opacity multiplier in [0, 1]; multiplies opacity_default. */
  opacities: Record<string, number>;
  /** The layer whose markers should be visible right now. */
  markerLayer: string;
  /** Transition target (the "active" layer as the UI highlights it). */
  activeLayer: string;
  transitioning: boolean;
}

export class Timeline {
  private readonly layerIds: string[];
  private readonly durationMs: number;
  private readonly now: () => number;

  private target: string;
  private markerSource: string;
  private startLevels: Record<string, number>;
  private startedAt: number | null = null;
  private lastT = 0;

  constructor(
    layerIds: string[],
    initial: string,
    durationMs: number = TRANSITION_MS,
    now: () => number = () => performance.now(),
  ) {
    if (!layerIds.includes(initial)) {
      throw new Error(`initial layer ${initial} not in ${layerIds}`);
    }
    this.layerIds = [...layerIds];
    this.durationMs = durationMs;
    this.now = now;
    this.target = initial;
    this.markerSource = initial;
    this.startLevels = this.levelsFor(initial);
  }

  private levelsFor(active: string): Record<string, number> {
    const levels: Record<string, number> = {};
    for (const id of this.layerIds) levels[id] = id === active ? 1 : 0;
    return levels;
  }

  private blendedLevels(f: number): Record<string, number> {
    const goal = this.levelsFor(this.target);
    const levels: Record<string, number> = {};
    for (const id of this.layerIds) {
      levels[id] = this.startLevels[id] + (goal[id] - this.startLevels[id]) * f;
    }
    return levels;
  }

  /** Begin (or retarget) a cross-fade. Unknown ids are ignored with a warning. */
  select(layerId: string): void {
    if (!this.layerIds.includes(layerId)) {
      console.warn(`timeline: unknown layer ${layerId}`);
      return;
    }
    if (layerId === this.target) return;
    const current = this.sample();
    // Markers currently shown stay until the new midpoint.
    this.markerSource = current.markerLayer;
    this.startLevels = current.opacities;
    this.target = layerId;
    this.startedAt = this.now();
    this.lastT = 0;
  }

  sample(at?: number): TimelineSample {
    if (this.startedAt === null) {
      return {
        opacities: this.levelsFor(this.target),
        markerLayer: this.target,
        activeLayer: this.target,
        transitioning: false,
      };
    }
    const elapsed = (at ?? this.now()) - this.startedAt;
    let t = Math.min(1, Math.max(0, elapsed / this.durationMs));
    // Monotonic within one transition even if the clock misbehaves.
    t = Math.max(t, this.lastT);
    this.lastT = t;
    if (t >= 1) {
      this.startedAt = null;
      this.markerSource = this.target;
      this.startLevels = this.levelsFor(this.target);
      return this.sample(at);
    }
    const f = smoothstep(t);
    return {
      opacities: this.blendedLevels(f),
      markerLayer: t >= 0.5 ? this.target : this.markerSource,
      activeLayer: this.target,
      transitioning: true,
    };
  }
}
