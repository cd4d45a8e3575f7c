/** Client-side number formatting for the what-if panel and game screens.
 *
 * The assessed risk itself is always shown as the server's `display` string
 * verbatim; these helpers only format the additive what-if preview and the
 * guess/error readouts, the one piece of arithmetic the client is allowed.
 */

/** Signed percentage with one decimal, e.g. -1.3% or +0.4%; zero as 0.0%. */
export function formatSignedPercent(delta: number): string {
  const pct = delta * 100;
  const text = Math.abs(pct).toFixed(1);
  if (text === "0.0") return "0.0%";
  return `${pct < 0 ? "-" : "+"}${text}%`;
}

/** Unsigned percentage with one decimal for previews and guesses. */
export function formatPercent(probability: number): string {
  return `${(probability * 100).toFixed(1)}%`;
}

/** Clamp a number into [lo, hi]. */
export function clamp(value: number, lo: number, hi: number): number {
  return Math.min(hi, Math.max(lo, value));
}
