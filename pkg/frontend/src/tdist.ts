/** Student-t machinery for the 95% confidence intervals.
 *
 * The inverse t CDF is computed numerically: the two-sided tail satisfies
 * P(|T| > t) = I_z(df/2, 1/2) with z = df / (df + t^2), where I is the
 * regularized incomplete beta function (evaluated by Lentz's continued
 * fraction); the tail equation is inverted by bisection on z.
 */

const LANCZOS = [
  676.5203681218851, -1259.1392167224028, 771.32342877765313,
  -176.61502916214059, 12.507343278686905, -0.13857109526572012,
  9.9843695780195716e-6, 1.5056327351493116e-7,
];

export function logGamma(x: number): number {
  if (x < 0.5) {
    // reflection
    return Math.log(Math.PI / Math.sin(Math.PI * x)) - logGamma(1 - x);
  }
  x -= 1;
  let acc = 0.99999999999980993;
  for (let i = 0; i < LANCZOS.length; i++) acc += LANCZOS[i] / (x + i + 1);
  const t = x + LANCZOS.length - 0.5;
  return 0.5 * Math.log(2 * Math.PI) + (x + 0.5) * Math.log(t) - t + Math.log(acc);
}

const betaContinuedFraction = (x: number, a: number, b: number): number => {
  // Lentz's algorithm for the incomplete beta continued fraction
  const tiny = 1e-300;
  let c = 1;
  let d = 1 - ((a + b) * x) / (a + 1);
  if (Math.abs(d) < tiny) d = tiny;
  d = 1 / d;
  let h = d;
  for (let m = 1; m <= 300; m++) {
    const m2 = 2 * m;
    let num = (m * (b - m) * x) / ((a + m2 - 1) * (a + m2));
    d = 1 + num * d;
    if (Math.abs(d) < tiny) d = tiny;
    c = 1 + num / c;
    if (Math.abs(c) < tiny) c = tiny;
    d = 1 / d;
    h *= d * c;
    num = (-(a + m) * (a + b + m) * x) / ((a + m2) * (a + m2 + 1));
    d = 1 + num * d;
    if (Math.abs(d) < tiny) d = tiny;
    c = 1 + num / c;
    if (Math.abs(c) < tiny) c = tiny;
    d = 1 / d;
    const delta = d * c;
    h *= delta;
    if (Math.abs(delta - 1) < 1e-15) break;
  }
  return h;
};

/** Regularized incomplete beta I_x(a, b). */
export function regularizedIncompleteBeta(x: number, a: number, b: number): number {
  if (x <= 0) return 0;
  if (x >= 1) return 1;
  const front = Math.exp(
    a * Math.log(x) + b * Math.log(1 - x) - Math.log(a) -
      (logGamma(a) + logGamma(b) - logGamma(a + b))
  );
  if (x < (a + 1) / (a + b + 2)) {
    return front * betaContinuedFraction(x, a, b);
  }
  // symmetry keeps the continued fraction in its fast-converging region
  const frontSym = Math.exp(
    b * Math.log(1 - x) + a * Math.log(x) - Math.log(b) -
      (logGamma(a) + logGamma(b) - logGamma(a + b))
  );
  return 1 - frontSym * betaContinuedFraction(1 - x, b, a);
}

/** Two-sided tail P(|T| > t) for t >= 0 with df degrees of freedom. */
export const tTwoSidedTail = (t: number, df: number): number =>
  regularizedIncompleteBeta(df / (df + t * t), df / 2, 0.5);

/** Inverse t CDF: the p-quantile of Student's t with df degrees of freedom. */
export function tQuantile(p: number, df: number): number {
  if (df < 1 || !Number.isFinite(df)) throw new Error(`bad degrees of freedom ${df}`);
  if (p <= 0 || p >= 1) throw new Error(`quantile level ${p} outside (0, 1)`);
  if (p === 0.5) return 0;
  if (p < 0.5) return -tQuantile(1 - p, df);
  const tail = 2 * (1 - p); // P(|T| > t) at the sought quantile
  // invert I_z(df/2, 1/2) = tail by bisection; I is increasing in z
  let lo = 0;
  let hi = 1;
  for (let i = 0; i < 200; i++) {
    const mid = (lo + hi) / 2;
    if (regularizedIncompleteBeta(mid, df / 2, 0.5) < tail) lo = mid;
    else hi = mid;
  }
  const z = (lo + hi) / 2;
  return Math.sqrt((df * (1 - z)) / z);
}

export interface Interval {
  lo: number;
  hi: number;
}

/** 95% confidence interval mean +/- t_{0.975, runs-1} * std / sqrt(runs);
 * null when fewer than two runs (no interval is defined). */
export function confidenceInterval(mean: number, std: number, runs: number): Interval | null {
  if (runs < 2) return null;
  if (std < 0) throw new Error(`negative standard deviation ${std}`);
  const half = (tQuantile(0.975, runs - 1) * std) / Math.sqrt(runs);
  return { lo: mean - half, hi: mean + half };
}
