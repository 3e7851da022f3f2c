/** Application wiring: DOM events to state transitions to rendering. */

import { ApiClient, ApiError, type Algorithm } from "./api.js";
import { DEFAULT_LAYOUT, renderChart } from "./chart.js";
import { debounce } from "./debounce.js";
import { FitQueue } from "./fitQueue.js";
import { dragToLabel, mergedLabels, type Scale } from "./geometry.js";
import {
  INFINITY_INDEX,
  penaltyLabelAt,
  penaltyParamAt,
  SLIDER_STOP_COUNT,
} from "./grid.js";
import {
  acceptedLabelPayloads,
  applyAcceptedLabels,
  applyFit,
  applyFitFailure,
  applyRejection,
  applySession,
  initialState,
  setOverlay,
  setSlider,
  type ViewState,
} from "./state.js";

const FIT_DEBOUNCE_MS = 150;

/** Deterministic demo sequence: three mean levels plus light noise. */
function demoValues(n = 120): number[] {
  let seed = 0x2545f491;
  const next = () => {
    // xorshift32, mapped to [0, 1)
    seed ^= seed << 13;
    seed ^= seed >>> 17;
    seed ^= seed << 5;
    seed >>>= 0;
    return seed / 0x100000000;
  };
  const gauss = () =>
    Math.sqrt(-2 * Math.log(next() + 1e-12)) * Math.cos(2 * Math.PI * next());
  const values: number[] = [];
  for (let i = 0; i < n; i++) {
    const level = i < n / 3 ? 0 : i < (2 * n) / 3 ? 3 : 1;
    values.push(level + 0.4 * gauss());
  }
  return values;
}

class App {
  private state: ViewState = initialState();
  private readonly api = new ApiClient("");
  private readonly queue = new FitQueue();
  private xScale: Scale | null = null;
  private dragStartPixel: number | null = null;

  private readonly svg = document.querySelector<SVGSVGElement>("#chart")!;
  private readonly slider = document.querySelector<HTMLInputElement>("#penalty")!;
  private readonly sliderValue = document.querySelector<HTMLElement>("#penalty-value")!;
  private readonly banner = document.querySelector<HTMLElement>("#banner")!;
  private readonly costLabel = document.querySelector<HTMLElement>("#cost")!;

  private readonly refitSoon = debounce(() => void this.refit(), FIT_DEBOUNCE_MS);

  async start(): Promise<void> {
    this.slider.max = String(SLIDER_STOP_COUNT - 1);
    this.slider.value = String(this.state.sliderIndex);
    this.bindEvents();
    const values = demoValues();
    const id = await this.api.createSequence(values);
    const session = await this.api.getSequence(id);
    this.update(
      applySession(this.state, id, session.values, session.labels, session.version),
    );
    await this.refit();
  }

  private bindEvents(): void {
    this.slider.addEventListener("input", () => {
      this.update(setSlider(this.state, Number(this.slider.value)));
      this.refitSoon();
    });
    for (const algorithm of ["lopart", "opart"] as Algorithm[]) {
      const box = document.querySelector<HTMLInputElement>(`#show-${algorithm}`)!;
      box.checked = this.state.overlays[algorithm];
      box.addEventListener("change", () => {
        this.update(setOverlay(this.state, algorithm, box.checked));
        this.refitSoon();
      });
    }
    this.svg.addEventListener("mousedown", (event) => {
      this.dragStartPixel = this.svgX(event);
    });
    this.svg.addEventListener("mouseup", (event) => {
      const from = this.dragStartPixel;
      this.dragStartPixel = null;
      if (from !== null) {
        void this.finishDrag(from, this.svgX(event));
      }
    });
  }

  private svgX(event: MouseEvent): number {
    const rect = this.svg.getBoundingClientRect();
    return ((event.clientX - rect.left) / rect.width) * DEFAULT_LAYOUT.width;
  }

  private polarity(): 0 | 1 {
    const selected = document.querySelector<HTMLInputElement>(
      'input[name="polarity"]:checked',
    );
    return selected?.value === "negative" ? 0 : 1;
  }

  private async finishDrag(fromPixel: number, toPixel: number): Promise<void> {
    if (!this.state.sessionId || !this.xScale) {
      return;
    }
    const label = dragToLabel(
      fromPixel,
      toPixel,
      this.xScale,
      this.state.values.length,
      this.polarity(),
    );
    if (!label) {
      return; // sub-width drag: no-op
    }
    const submitted = mergedLabels(acceptedLabelPayloads(this.state), label);
    try {
      const version = await this.api.putLabels(this.state.sessionId, submitted);
      this.update(applyAcceptedLabels(this.state, submitted, version));
      await this.refit();
    } catch (error) {
      const detail = error instanceof ApiError ? error.detail : String(error);
      this.update(applyRejection(this.state, detail));
    }
  }

  private async refit(): Promise<void> {
    const { sessionId } = this.state;
    if (!sessionId) {
      return;
    }
    const penalty = penaltyParamAt(this.state.sliderIndex);
    const algorithms = (Object.keys(this.state.overlays) as Algorithm[]).filter(
      (algorithm) => this.state.overlays[algorithm],
    );
    await Promise.all(
      algorithms.map(async (algorithm) => {
        if (algorithm === "opart" && this.state.sliderIndex >= INFINITY_INDEX) {
          return; // the unconstrained solver has no infinite-penalty model
        }
        try {
          const fit = await this.queue.request(algorithm, (signal) =>
            this.api.getFit(sessionId, penalty, algorithm, signal),
          );
          if (fit) {
            this.update(applyFit(this.state, fit));
          }
        } catch (error) {
          const detail = error instanceof ApiError ? error.detail : String(error);
          this.update(applyFitFailure(this.state, detail));
        }
      }),
    );
  }

  private update(state: ViewState): void {
    this.state = state;
    this.render();
  }

  private render(): void {
    const scales = renderChart(this.svg, this.state);
    this.xScale = scales.x;
    this.sliderValue.textContent = penaltyLabelAt(this.state.sliderIndex);
    this.banner.textContent = this.state.banner ?? "";
    this.banner.classList.toggle("visible", this.state.banner !== null);
    const fit = this.state.fits.lopart;
    this.costLabel.textContent = fit ? `cost ${fit.cost.toFixed(3)}` : "";
  }
}

new App().start().catch((error) => {
  document.querySelector("#banner")!.textContent =
    `failed to start: ${String(error)}`;
});
