/** SVG rendering of the sequence, labels, and fits. Thin DOM layer:
 * all geometry comes from geometry.ts, all contents from ViewState. */

import type { Algorithm } from "./api.js";
import {
  changepointLines,
  linearScale,
  segmentLines,
  type Scale,
} from "./geometry.js";
import type { ViewState } from "./state.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface ChartLayout {
  width: number;
  height: number;
  margin: { top: number; right: number; bottom: number; left: number };
}

export const DEFAULT_LAYOUT: ChartLayout = {
  width: 960,
  height: 420,
  margin: { top: 16, right: 16, bottom: 24, left: 44 },
};

export interface ChartScales {
  x: Scale;
  y: Scale;
  plotTop: number;
  plotBottom: number;
}

export function chartScales(state: ViewState, layout: ChartLayout): ChartScales {
  const { width, height, margin } = layout;
  const n = state.values.length || 1;
  let lo = Math.min(...state.values);
  let hi = Math.max(...state.values);
  if (!Number.isFinite(lo) || !Number.isFinite(hi)) {
    lo = 0;
    hi = 1;
  }
  const pad = (hi - lo || 1) * 0.08;
  return {
    x: linearScale(0.5, n + 0.5, margin.left, width - margin.right),
    y: linearScale(lo - pad, hi + pad, height - margin.bottom, margin.top),
    plotTop: margin.top,
    plotBottom: height - margin.bottom,
  };
}

function element<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number>,
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, String(value));
  }
  return node;
}

export function renderChart(
  svg: SVGSVGElement,
  state: ViewState,
  layout: ChartLayout = DEFAULT_LAYOUT,
): ChartScales {
  svg.setAttribute("viewBox", `0 0 ${layout.width} ${layout.height}`);
  svg.replaceChildren();
  const scales = chartScales(state, layout);
  const { x, y, plotTop, plotBottom } = scales;

  const labelLayer = element("g", { class: "labels" });
  for (const label of state.labels) {
    const left = x.toPixel(label.start - 0.5);
    const right = x.toPixel(label.end + 0.5);
    const rect = element("rect", {
      x: left,
      y: plotTop,
      width: right - left,
      height: plotBottom - plotTop,
      class:
        `label ${label.changes === 1 ? "label-positive" : "label-negative"}` +
        (label.status && label.status !== "correct" ? " label-inconsistent" : ""),
    });
    labelLayer.append(rect);
  }
  svg.append(labelLayer);

  const pointLayer = element("g", { class: "points" });
  state.values.forEach((value, i) => {
    pointLayer.append(
      element("circle", {
        cx: x.toPixel(i + 1),
        cy: y.toPixel(value),
        r: 2,
        class: "point",
      }),
    );
  });
  svg.append(pointLayer);

  for (const algorithm of ["opart", "lopart"] as Algorithm[]) {
    const fit = state.fits[algorithm];
    if (!fit || !state.overlays[algorithm]) {
      continue;
    }
    const layer = element("g", { class: `fit fit-${algorithm}` });
    for (const line of segmentLines(fit.segments, x, y)) {
      layer.append(element("line", { ...line, class: "mean" }));
    }
    for (const line of changepointLines(fit.changepoints, x, plotTop, plotBottom)) {
      layer.append(element("line", { ...line, class: "change" }));
    }
    svg.append(layer);
  }
  return scales;
}
