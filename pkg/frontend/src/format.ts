// Display formatting. All numeric UI strings come through here so tests can
// pin them down in one place.

export function formatBadge(baseSimilarity: number): string {
  return baseSimilarity.toFixed(2);
}

export function formatPercentage(value: number | null): string {
  return value === null ? "unscored" : `${value.toFixed(2)}%`;
}

export function formatMetric(value: number | null | undefined, digits = 2): string {
  if (value === null || value === undefined) return "-";
  return value.toFixed(digits);
}

export function formatLambda(value: number): string {
  return value.toFixed(2);
}

export function formatDuration(ms: number): string {
  return ms >= 1000 ? `${(ms / 1000).toFixed(1)} s` : `${ms} ms`;
}
