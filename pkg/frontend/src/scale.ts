export type AxisScale = "linear" | "log";

export interface Scale {
  /** data value -> pixel coordinate */
  map: (v: number) => number;
  ticks: number[];
  domain: [number, number];
}

/** Round a raw step to the nearest 1/2/5 x 10^k value. */
function niceStep(raw: number): number {
  const power = Math.floor(Math.log10(raw));
  const base = raw / 10 ** power;
  const factor = base < 1.5 ? 1 : base < 3.5 ? 2 : base < 7.5 ? 5 : 10;
  return factor * 10 ** power;
}

export function linearScale(lo: number, hi: number, pxLo: number, pxHi: number): Scale {
  if (!(hi > lo)) {
    // degenerate domain: widen symmetrically so a flat series still renders
    const pad = lo === 0 ? 1 : Math.abs(lo) * 0.1;
    lo -= pad;
    hi += pad;
  }
  const step = niceStep((hi - lo) / 5);
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) {
    ticks.push(Math.abs(t) < step * 1e-9 ? 0 : t);
  }
  const span = hi - lo;
  return {
    map: (v) => pxLo + ((v - lo) / span) * (pxHi - pxLo),
    ticks,
    domain: [lo, hi],
  };
}

export function logScale(lo: number, hi: number, pxLo: number, pxHi: number): Scale {
  if (!(lo > 0) || !(hi > 0)) {
    throw new Error(`log scale needs a positive domain, got [${lo}, ${hi}]`);
  }
  if (lo === hi) {
    lo /= 10;
    hi *= 10;
  }
  const lLo = Math.log10(lo);
  const lHi = Math.log10(hi);
  const ticks: number[] = [];
  const first = Math.ceil(lLo - 1e-9);
  const last = Math.floor(lHi + 1e-9);
  // at most ~8 labelled decades so dense spectra stay readable
  const stride = Math.max(1, Math.ceil((last - first + 1) / 8));
  for (let e = first; e <= last; e += stride) {
    ticks.push(10 ** e);
  }
  const span = lHi - lLo;
  return {
    map: (v) => pxLo + ((Math.log10(v) - lLo) / span) * (pxHi - pxLo),
    ticks,
    domain: [lo, hi],
  };
}

export function makeScale(
  kind: AxisScale,
  lo: number,
  hi: number,
  pxLo: number,
  pxHi: number,
): Scale {
  return kind === "log" ? logScale(lo, hi, pxLo, pxHi) : linearScale(lo, hi, pxLo, pxHi);
}

/** Compact tick label: plain numbers in a sane range, powers of ten outside. */
export function tickLabel(v: number): string {
  if (v === 0) {
    return "0";
  }
  const a = Math.abs(v);
  if (a >= 0.001 && a < 10000) {
    const s = v.toPrecision(4);
    return s.includes(".") ? s.replace(/\.?0+$/, "") : s;
  }
  const exp = Math.floor(Math.log10(a));
  const mant = v / 10 ** exp;
  const m = Math.abs(mant - 1) < 1e-9 ? "" : `${mant.toPrecision(2).replace(/\.?0+$/, "")}x`;
  return `${m}1e${exp}`;
}
