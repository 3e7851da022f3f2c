/** Pure chart geometry: scales, drag-to-label conversion, line layouts. */

import type { LabelPayload, SegmentPayload } from "./api.js";

export interface Scale {
  toPixel(value: number): number;
  fromPixel(pixel: number): number;
}

export function linearScale(
  domainMin: number,
  domainMax: number,
  rangeMin: number,
  rangeMax: number,
): Scale {
  const span = domainMax - domainMin || 1;
  const ratio = (rangeMax - rangeMin) / span;
  return {
    toPixel: (value) => rangeMin + (value - domainMin) * ratio,
    fromPixel: (pixel) => domainMin + (pixel - rangeMin) / ratio,
  };
}

export function clamp(value: number, lo: number, hi: number): number {
  return Math.min(hi, Math.max(lo, value));
}

/** Nearest data position (1-based) for a pixel coordinate. */
export function positionFromPixel(pixel: number, x: Scale, n: number): number {
  return clamp(Math.round(x.fromPixel(pixel)), 1, n);
}

/**
 * Convert a horizontal drag into a label, or null when the drag spans
 * fewer than two data positions (such drags are ignored).
 */
export function dragToLabel(
  pixelA: number,
  pixelB: number,
  x: Scale,
  n: number,
  changes: 0 | 1,
): LabelPayload | null {
  const a = positionFromPixel(pixelA, x, n);
  const b = positionFromPixel(pixelB, x, n);
  const start = Math.min(a, b);
  const end = Math.max(a, b);
  if (end - start < 1) {
    return null;
  }
  return { start, end, changes };
}

/** New label list to submit for a drag; the server validates overlap. */
export function mergedLabels(
  existing: readonly LabelPayload[],
  added: LabelPayload,
): LabelPayload[] {
  const merged = [...existing, added];
  merged.sort((p, q) => p.start - q.start || p.end - q.end);
  return merged;
}

export interface Line {
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

/** Horizontal mean line per segment. */
export function segmentLines(
  segments: readonly SegmentPayload[],
  x: Scale,
  y: Scale,
): Line[] {
  return segments.map((segment) => ({
    x1: x.toPixel(segment.start - 0.5),
    y1: y.toPixel(segment.mean),
    x2: x.toPixel(segment.end + 0.5),
    y2: y.toPixel(segment.mean),
  }));
}

/** Vertical line per changepoint, drawn between positions t and t+1. */
export function changepointLines(
  changepoints: readonly number[],
  x: Scale,
  yTopPixel: number,
  yBottomPixel: number,
): Line[] {
  return changepoints.map((t) => {
    const pixel = x.toPixel(t + 0.5);
    return { x1: pixel, y1: yTopPixel, x2: pixel, y2: yBottomPixel };
  });
}
