// Probability heat scale: cool blue at 0 through to hot red at 1.

const BUCKETS = [
  '#313695',
  '#4575b4',
  '#74add1',
  '#abd9e9',
  '#e0f3f8',
  '#fee090',
  '#fdae61',
  '#f46d43',
  '#d73027',
  '#a50026',
];

export function bucketIndex(p: number): number {
  if (Number.isNaN(p)) return 0;
  const clamped = Math.min(Math.max(p, 0), 1);
  return Math.min(Math.floor(clamped * BUCKETS.length), BUCKETS.length - 1);
}

export function probabilityColor(p: number): string {
  return BUCKETS[bucketIndex(p)] as string;
}

export const COOLEST = BUCKETS[0] as string;
export const HOTTEST = BUCKETS[BUCKETS.length - 1] as string;

export function textColorOn(background: string): string {
  // mid-palette buckets are light; keep labels readable
  const light = new Set(['#abd9e9', '#e0f3f8', '#fee090', '#fdae61']);
  return light.has(background) ? '#1a1a1a' : '#ffffff';
}
