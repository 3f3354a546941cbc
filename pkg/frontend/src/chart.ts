/** Minimal canvas line chart for trace previews. The coordinate math is a
 * pure function so it can be tested without a rendering backend. */

export interface Series {
  label: string;
  color: string;
  values: number[];
}

export interface Point {
  x: number;
  y: number;
}

/** Map a series onto pixel coordinates, y-flipped, with uniform padding.
 * A flat series is centered vertically. */
export function scaleSeries(
  t: number[],
  values: number[],
  width: number,
  height: number,
  pad = 8,
): Point[] {
  if (t.length !== values.length) throw new Error("t/value length mismatch");
  if (t.length === 0) return [];
  const t0 = t[0];
  const tSpan = t[t.length - 1] - t0 || 1;
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const span = hi - lo;
  const innerW = width - 2 * pad;
  const innerH = height - 2 * pad;
  return t.map((ti, i) => ({
    x: pad + ((ti - t0) / tSpan) * innerW,
    y:
      span === 0
        ? height / 2
        : pad + (1 - (values[i] - lo) / span) * innerH,
  }));
}

export function drawTrace(canvas: HTMLCanvasElement, t: number[], series: Series[]): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return; // headless environments have no 2d backend
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  for (const s of series) {
    const pts = scaleSeries(t, s.values, canvas.width, canvas.height);
    if (pts.length === 0) continue;
    ctx.strokeStyle = s.color;
    ctx.lineWidth = 1.25;
    ctx.beginPath();
    ctx.moveTo(pts[0].x, pts[0].y);
    for (const p of pts.slice(1)) ctx.lineTo(p.x, p.y);
    ctx.stroke();
  }
}
