/** Closed-form reference curves overlaid on the rendered figures. */

/** Compactly supported self-similar profile, unit peak at the origin at t=0. */
export function barenblatt(x: number, t: number, m: number): number {
  const k = 1.0 / (m + 1.0);
  const scale = (t + 1.0) ** -k;
  const arg = 1.0 - ((k * (m - 1.0)) / (2.0 * m)) * x * x * (t + 1.0) ** (-2.0 * k);
  if (Math.abs(x) >= barenblattInterface(t, m)) return 0.0;
  return scale * Math.max(arg, 0.0) ** (1.0 / (m - 1.0));
}

/** Right interface position of the self-similar solution. */
export function barenblattInterface(t: number, m: number): number {
  const k = 1.0 / (m + 1.0);
  return Math.sqrt((2.0 * m) / (k * (m - 1.0))) * (t + 1.0) ** k;
}

/** Exact waiting time of the quartic-sine initial family, theta in [0, 1/4]. */
export function exactWaitingTime(m: number, theta: number): number {
  if (theta < 0.0 || theta > 0.25) throw new Error("theta must lie in [0, 1/4]");
  return 1.0 / (2.0 * (m + 1.0) * (1.0 - theta));
}
