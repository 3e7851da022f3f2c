/** Penalty slider stops: the 21 log-spaced grid values plus an ∞ stop. */

export const GRID_EXPONENTS: readonly number[] = Array.from(
  { length: 21 },
  (_, k) => -5 + 0.5 * k,
);

/** Slider index of the infinity stop (one past the grid). */
export const INFINITY_INDEX = GRID_EXPONENTS.length;

export const SLIDER_STOP_COUNT = GRID_EXPONENTS.length + 1;

export function isInfinityStop(index: number): boolean {
  return index >= INFINITY_INDEX;
}

/** Value for the service's `penalty` query parameter at a slider stop. */
export function penaltyParamAt(index: number): string {
  if (index < 0 || index >= SLIDER_STOP_COUNT) {
    throw new RangeError(`slider index ${index} outside [0, ${SLIDER_STOP_COUNT})`);
  }
  if (isInfinityStop(index)) {
    return "inf";
  }
  return String(10 ** GRID_EXPONENTS[index]);
}

/** Short human-readable form, e.g. "10^-4.5" or "∞". */
export function penaltyLabelAt(index: number): string {
  if (isInfinityStop(index)) {
    return "∞";
  }
  const exponent = GRID_EXPONENTS[index];
  return Number.isInteger(exponent) ? `10^${exponent}` : `10^${exponent.toFixed(1)}`;
}
