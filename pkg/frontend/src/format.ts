// Presentation-only helpers. Model numbers arrive fully computed from the
// service; the only arithmetic here is clamping and shade-to-color scaling.

export function clamp01(value: number): number {
  if (Number.isNaN(value)) return 0;
  return Math.min(1, Math.max(0, value));
}

/** Render a probability or weight exactly as a six-decimal string. */
export function formatProbability(value: number): string {
  return value.toFixed(6);
}

/** Lightness percent for a heatmap shade; 0 is near white, 1 is darkest. */
export function shadeToLightness(shade: number): number {
  const s = clamp01(shade);
  return Math.round(95 - s * 62);
}

/** CSS color for a heatmap cell. Higher shade means a darker cell. */
export function shadeToColor(shade: number): string {
  return `hsl(213 62% ${shadeToLightness(shade)}%)`;
}

/** Text color that stays readable on top of shadeToColor(shade). */
export function shadeTextColor(shade: number): string {
  return shadeToLightness(shade) < 60 ? "#f5f7fa" : "#1f2a37";
}

const GROUP_HUES = [213, 158, 28, 288, 349, 96, 246, 18];

/** Stable accent color for the n-th cluster group (index, not model data). */
export function groupColor(index: number): string {
  const hue = GROUP_HUES[((index % GROUP_HUES.length) + GROUP_HUES.length) % GROUP_HUES.length];
  return `hsl(${hue} 55% 42%)`;
}
