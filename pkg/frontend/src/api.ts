/** Bundle API client. The viewer talks to exactly three surfaces:
 *  /api/site, /api/layers/{id} and /assets/*, all under one base URL. */

import type { LayerIndex, SiteIndex } from "./types";

export interface ViewerConfig {
  baseUrl: string;
  /** Optional raster tile URL template for satellite base layers. */
  satelliteTiles?: string;
}

declare global {
  interface Window {
    HERITAGE_VIEWER_CONFIG?: Partial<ViewerConfig>;
  }
}

export function resolveConfig(overrides?: Partial<ViewerConfig>): ViewerConfig {
  const fromWindow = typeof window !== "undefined" ? window.HERITAGE_VIEWER_CONFIG : undefined;
  const baseUrl = overrides?.baseUrl ?? fromWindow?.baseUrl ?? "";
  return {
    baseUrl: baseUrl.replace(/\/+$/, ""),
    satelliteTiles: overrides?.satelliteTiles ?? fromWindow?.satelliteTiles,
  };
}

type FetchLike = (url: string) => Promise<Response>;

export class BundleApi {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(config: ViewerConfig, fetchFn: FetchLike = (url) => fetch(url)) {
    this.base = config.baseUrl;
    this.fetchFn = fetchFn;
  }

  async site(): Promise<SiteIndex> {
    return this.getJson<SiteIndex>(`${this.base}/api/site`);
  }

  async layer(layerId: string): Promise<LayerIndex> {
    return this.getJson<LayerIndex>(`${this.base}/api/layers/${layerId}`);
  }

  /** Bundle-relative hrefs ("assets/<hash>.<ext>") to absolute URLs. */
  assetUrl(href: string): string {
    return `${this.base}/${href.replace(/^\/+/, "")}`;
  }

  private async getJson<T>(url: string): Promise<T> {
    const response = await this.fetchFn(url);
    if (!response.ok) {
      throw new Error(`${url}: HTTP ${response.status}`);
    }
    return (await response.json()) as T;
  }
}
