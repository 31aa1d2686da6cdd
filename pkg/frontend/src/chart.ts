/** Grouped bar chart rendering as a standalone SVG string.
 *
 * One group per selected statistic, one bar slot per selected algorithm
 * inside each group. Sentinel cells ('*' undefined, '-' missing) render as an
 * empty slot so the remaining bars keep their alignment. When standard
 * deviations and a run count are available, 95% confidence whiskers are drawn
 * on top of the bars. Elapsed-time bars can use a log scale.
 */

import type { AlgorithmInfo, SelectedCell, Selection, StatName } from "./tables.js";
import { plottable } from "./tables.js";
import { confidenceInterval } from "./tdist.js";

export interface ChartOptions {
  width?: number;
  barHeight?: number;
  /** log10 scale for the elapsed-time group */
  logScaleE?: boolean;
}

const PALETTE = [
  "#4269d0", "#efb118", "#ff725c", "#6cc5b0", "#3ca951",
  "#ff8ab7", "#a463f2", "#97bbf5", "#9c6b4e", "#9498a0",
];

/** Deterministic colors: algorithms ranked by label, not by selection order. */
export function colorByLabel(algs: AlgorithmInfo[]): Map<number, string> {
  const ranked = [...algs].sort((a, b) => (a.label < b.label ? -1 : a.label > b.label ? 1 : 0));
  const colors = new Map<number, string>();
  ranked.forEach((alg, i) => colors.set(alg.id, PALETTE[i % PALETTE.length]));
  return colors;
}

const esc = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");

interface Scale {
  toY: (value: number) => number;
  baseline: number;
}

const makeScale = (
  stat: StatName,
  values: number[],
  top: number,
  bottom: number,
  logScaleE: boolean
): Scale => {
  if (stat === "E" && logScaleE) {
    const pos = values.filter((v) => v > 0);
    const hi = Math.max(...pos, 1e-12);
    const lo = Math.min(...pos, hi) / 10; // one decade of headroom at the floor
    const span = Math.log10(hi) - Math.log10(lo) || 1;
    return {
      toY: (v) =>
        v <= 0 ? bottom : bottom - ((Math.log10(v) - Math.log10(lo)) / span) * (bottom - top),
      baseline: bottom,
    };
  }
  let lo = 0;
  let hi = 1;
  if (stat === "E") hi = Math.max(...values, 1e-12);
  if (stat === "McAdj" || stat === "McArrow") lo = values.some((v) => v < 0) ? -1 : 0;
  const span = hi - lo;
  const toY = (v: number) => bottom - ((Math.min(Math.max(v, lo), hi) - lo) / span) * (bottom - top);
  return { toY, baseline: toY(0) };
};

/** Render one (vars, deg, n) cell as a grouped bar SVG. */
export function renderGroupedBars(
  cell: SelectedCell,
  algorithms: AlgorithmInfo[],
  selection: Selection,
  options: ChartOptions = {}
): string {
  if (selection.stats.length === 0 || selection.algIds.length === 0) {
    return `<p class="prompt">Select at least one statistic and one algorithm to plot.</p>`;
  }
  const width = options.width ?? 760;
  const height = 300;
  const margin = { top: 36, right: 12, bottom: 44, left: 36 };
  const plotW = width - margin.left - margin.right;
  const plotH = height - margin.top - margin.bottom;
  const bottom = margin.top + plotH;

  const groupW = plotW / selection.stats.length;
  const slotW = (groupW * 0.84) / selection.algIds.length;
  const colors = colorByLabel(algorithms);
  const byId = new Map(algorithms.map((a) => [a.id, a]));

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" class="grouped-bars">`
  );
  parts.push(
    `<text x="${margin.left}" y="18" class="title">` +
      esc(`vars=${cell.vars} deg=${cell.deg} n=${cell.n}`) +
      `</text>`
  );

  selection.stats.forEach((stat, gi) => {
    const x0 = margin.left + gi * groupW + groupW * 0.08;
    const values = cell.rows
      .map((row) => row.stats[stat])
      .filter(plottable);
    const scale = makeScale(stat, values, margin.top, bottom, options.logScaleE ?? false);
    parts.push(`<g class="group" data-stat="${stat}">`);
    parts.push(
      `<text x="${margin.left + gi * groupW + groupW / 2}" y="${height - 20}" ` +
        `text-anchor="middle" class="group-label">${stat}</text>`
    );
    selection.algIds.forEach((algId, si) => {
      const row = cell.rows[si];
      const stdRow = cell.stdRows[si];
      const x = x0 + si * slotW;
      const value = row.stats[stat];
      if (!plottable(value)) {
        // keep the slot, omit the bar: neighbours stay aligned
        parts.push(
          `<g class="slot empty" data-alg="${algId}" data-stat="${stat}">` +
            `<text x="${x + slotW / 2}" y="${bottom - 4}" text-anchor="middle" ` +
            `class="sentinel">${esc(String(value))}</text></g>`
        );
        return;
      }
      const y = scale.toY(value);
      const top = Math.min(y, scale.baseline);
      const h = Math.abs(scale.baseline - y);
      const color = colors.get(algId) ?? "#999";
      const label = byId.get(algId)?.label ?? `alg ${algId}`;
      parts.push(
        `<rect class="bar" data-alg="${algId}" data-stat="${stat}" x="${x.toFixed(2)}" ` +
          `y="${top.toFixed(2)}" width="${(slotW * 0.88).toFixed(2)}" height="${h.toFixed(2)}" ` +
          `fill="${color}"><title>${esc(`${label} ${stat}=${value}`)}</title></rect>`
      );
      const std = stdRow?.stats[stat];
      if (stdRow != null && std != null && plottable(std) && stat !== "E") {
        const interval = confidenceInterval(value, std, selection.runs);
        if (interval) {
          const cx = x + (slotW * 0.88) / 2;
          const yLo = Math.min(Math.max(scale.toY(interval.lo), margin.top), bottom);
          const yHi = Math.min(Math.max(scale.toY(interval.hi), margin.top), bottom);
          parts.push(
            `<g class="ci" data-alg="${algId}" data-stat="${stat}">` +
              `<line x1="${cx.toFixed(2)}" y1="${yHi.toFixed(2)}" x2="${cx.toFixed(2)}" y2="${yLo.toFixed(2)}" stroke="#333"/>` +
              `<line x1="${(cx - 3).toFixed(2)}" y1="${yHi.toFixed(2)}" x2="${(cx + 3).toFixed(2)}" y2="${yHi.toFixed(2)}" stroke="#333"/>` +
              `<line x1="${(cx - 3).toFixed(2)}" y1="${yLo.toFixed(2)}" x2="${(cx + 3).toFixed(2)}" y2="${yLo.toFixed(2)}" stroke="#333"/>` +
              `</g>`
          );
        }
      }
    });
    parts.push(`</g>`);
  });

  parts.push(`</svg>`);
  return parts.join("");
}

/** Legend entries in a fixed, label-ranked order. */
export function renderLegend(algorithms: AlgorithmInfo[], selected: number[]): string {
  const colors = colorByLabel(algorithms);
  const chosen = algorithms.filter((a) => selected.includes(a.id));
  const items = chosen
    .map(
      (a) =>
        `<span class="legend-item"><span class="swatch" ` +
        `style="background:${colors.get(a.id)}"></span>${esc(a.label)}</span>`
    )
    .join(" ");
  return `<div class="legend">${items}</div>`;
}
