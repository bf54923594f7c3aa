/** Quantitative encodings for the metric graph. These are fixed monotone
 * scales so component tests can assert the visual ordering directly:
 * strictly more usage means a strictly larger radius, strictly more
 * co-occurrence means a strictly thicker stroke. */

export const MIN_RADIUS = 10;
export const RADIUS_STEP = 6;

export const MIN_STROKE = 1;
export const STROKE_STEP = 1.5;

/** sqrt scale: area tracks the paper count, radius stays strictly monotone. */
export function radiusFor(usageCount: number): number {
  if (usageCount < 0 || !Number.isFinite(usageCount)) {
    throw new Error(`usage count must be a non-negative number, got ${usageCount}`);
  }
  return MIN_RADIUS + RADIUS_STEP * Math.sqrt(usageCount);
}

export function strokeWidthFor(cooccurrenceCount: number): number {
  if (cooccurrenceCount < 1 || !Number.isFinite(cooccurrenceCount)) {
    throw new Error(`co-occurrence count must be >= 1, got ${cooccurrenceCount}`);
  }
  return MIN_STROKE + STROKE_STEP * Math.sqrt(cooccurrenceCount - 1);
}
