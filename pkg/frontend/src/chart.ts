/** Convergence-chart helpers: pure CSV parsing and SVG point mapping. Chart
 * points come one-for-one from the server CSV rows. */

export interface CurvePoint {
  iteration: number;
  best: number;
}

export function parseConvergenceCsv(text: string): CurvePoint[] {
  const lines = text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
  if (lines.length === 0) return [];
  const header = lines[0].split(",");
  if (header[0] !== "iteration" || header[1] !== "best_so_far") {
    throw new Error(`unexpected convergence CSV header: ${lines[0]}`);
  }
  return lines.slice(1).map((line, i) => {
    const [iter, best] = line.split(",");
    const point = { iteration: Number(iter), best: Number(best) };
    if (!Number.isFinite(point.iteration) || !Number.isFinite(point.best)) {
      throw new Error(`bad convergence CSV row ${i + 2}: ${line}`);
    }
    return point;
  });
}

/** Map curve points into an SVG polyline "x,y" string. The y axis is
 * flipped (SVG grows downward) and a flat curve renders at mid-height. */
export function toPolyline(
  points: CurvePoint[],
  width: number,
  height: number,
): string {
  if (points.length === 0) return "";
  const xs = points.map((p) => p.iteration);
  const ys = points.map((p) => p.best);
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const yMin = Math.min(...ys);
  const yMax = Math.max(...ys);
  const xSpan = xMax - xMin || 1;
  const ySpan = yMax - yMin;
  return points
    .map((p) => {
      const x = ((p.iteration - xMin) / xSpan) * width;
      const y =
        ySpan === 0 ? height / 2 : height - ((p.best - yMin) / ySpan) * height;
      return `${round2(x)},${round2(y)}`;
    })
    .join(" ");
}

function round2(value: number): number {
  return Math.round(value * 100) / 100;
}
