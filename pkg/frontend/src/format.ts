/** Presentation-only formatting. Every function maps one API field value to
 * display text; none of them combine fields or produce new model numbers.
 */

/** Population share in [0, 1] -> "34.0%". */
export function formatShare(fraction: number): string {
  return `${(fraction * 100).toFixed(1)}%`;
}

/** Percentage already on the 0-100 scale -> "57.3%". */
export function formatPct(pct: number): string {
  return `${pct.toFixed(1)}%`;
}

/** Emissions index (car-equivalents per respondent) -> "0.304". */
export function formatEmissions(value: number): string {
  return value.toFixed(3);
}

export function formatCount(count: number): string {
  return String(count);
}

/** Escape text nodes and attribute values. */
export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** data-value attributes carry the raw field so tests and tooling can check
 * rendered figures against the API payload exactly. JSON.stringify round
 * trips every finite number losslessly.
 */
export function rawValue(value: number | string | boolean | null): string {
  return JSON.stringify(value);
}
