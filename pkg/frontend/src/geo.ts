/** Bounding-box plumbing for the zoom-out control.
 *
 * zoom_bounds arrives precomputed as [west, south, east, north]; the
 * viewer reshapes it for the map API and checks containment, nothing
 * more.
 */

export type Bounds = [number, number, number, number]; // w, s, e, n

export function boundsToCorners(b: Bounds): [[number, number], [number, number]] {
  return [
    [b[0], b[1]],
    [b[2], b[3]],
  ];
}

export function boundsContain(b: Bounds, lonlat: [number, number]): boolean {
  const [w, s, e, n] = b;
  const [lon, lat] = lonlat;
  return w <= lon && lon <= e && s <= lat && lat <= n;
}
