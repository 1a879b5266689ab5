// Pure SVG-string renderers. No DOM access here: callers insert the strings,
// which keeps every visual testable as plain data.

import type { Attribution, CounterfactualMember, Embedding, ExplanationSet } from "./types.js";

const PALETTE = ["#4c78a8", "#f58518", "#54a24b", "#e45756", "#72b7b2", "#b279a2"];

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

export interface ScatterOptions {
  width?: number;
  height?: number;
  pointRadius?: number;
}

/**
 * Colored scatter of the embedded samples; SOM sessions render as a grid of
 * cells with per-cell occupancy counts instead.
 */
export function renderEmbedding(emb: Embedding, opts: ScatterOptions = {}): string {
  const width = opts.width ?? 480;
  const height = opts.height ?? 360;
  if (emb.points.length === 0) {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}">` +
      `<text x="${width / 2}" y="${height / 2}" text-anchor="middle" class="placeholder">no samples</text></svg>`
    );
  }
  if (emb.kind === "som" && emb.grid_shape) {
    return renderSomGrid(emb, width, height);
  }
  const r = opts.pointRadius ?? 3;
  const xs = emb.points.map((p) => p[0]);
  const ys = emb.points.map((p) => p[1]);
  const pad = 12;
  const sx = scale(Math.min(...xs), Math.max(...xs), pad, width - pad);
  const sy = scale(Math.min(...ys), Math.max(...ys), height - pad, pad);
  const marks = emb.points
    .map((p, i) => {
      const color = PALETTE[((emb.labels[i] % PALETTE.length) + PALETTE.length) % PALETTE.length];
      return (
        `<circle class="sample" data-index="${i}" cx="${sx(p[0]).toFixed(1)}" ` +
        `cy="${sy(p[1]).toFixed(1)}" r="${r}" fill="${color}">` +
        `<title>sample ${i}</title></circle>`
      );
    })
    .join("");
  return `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}">${marks}</svg>`;
}

function renderSomGrid(emb: Embedding, width: number, height: number): string {
  const [rows, cols] = emb.grid_shape as number[];
  const cw = width / cols;
  const ch = height / rows;
  const counts = new Map<string, number>();
  for (const p of emb.points) {
    const key = `${p[0]},${p[1]}`;
    counts.set(key, (counts.get(key) ?? 0) + 1);
  }
  const maxCount = Math.max(1, ...counts.values());
  const cells: string[] = [];
  for (let r0 = 0; r0 < rows; r0++) {
    for (let c0 = 0; c0 < cols; c0++) {
      const n = counts.get(`${r0},${c0}`) ?? 0;
      const shade = Math.round(245 - (n / maxCount) * 160);
      cells.push(
        `<rect class="cell" data-cell="${r0},${c0}" x="${(c0 * cw).toFixed(1)}" ` +
          `y="${(r0 * ch).toFixed(1)}" width="${cw.toFixed(1)}" height="${ch.toFixed(1)}" ` +
          `fill="rgb(${shade},${shade},255)" stroke="#999">` +
          `<title>cell (${r0}, ${c0}): ${n} samples</title></rect>`,
      );
    }
  }
  return `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}">${cells.join("")}</svg>`;
}

function scale(d0: number, d1: number, r0: number, r1: number): (v: number) => number {
  const span = d1 - d0 || 1;
  return (v) => r0 + ((v - d0) / span) * (r1 - r0);
}

export interface BarChartOptions {
  width?: number;
  barHeight?: number;
}

function bars(
  values: number[],
  names: string[],
  highlight: Set<number>,
  opts: BarChartOptions,
): string {
  const width = opts.width ?? 320;
  const barHeight = opts.barHeight ?? 14;
  const labelW = 80;
  const mid = labelW + (width - labelW) / 2;
  const maxAbs = Math.max(1e-12, ...values.map((v) => Math.abs(v)));
  const half = (width - labelW) / 2 - 4;
  const rows = values
    .map((v, j) => {
      const y = j * (barHeight + 4);
      const len = (Math.abs(v) / maxAbs) * half;
      const x = v >= 0 ? mid : mid - len;
      const cls = highlight.has(j) ? "bar changed" : "bar";
      const fill = highlight.has(j) ? "#e45756" : "#9ecae1";
      return (
        `<text x="${labelW - 6}" y="${y + barHeight - 3}" text-anchor="end">${esc(names[j] ?? `f${j}`)}</text>` +
        `<rect class="${cls}" data-feature="${j}" data-value="${v}" x="${x.toFixed(2)}" y="${y}" ` +
        `width="${len.toFixed(2)}" height="${barHeight}" fill="${fill}"/>`
      );
    })
    .join("");
  const height = values.length * (barHeight + 4);
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}">` +
    `<line x1="${mid}" y1="0" x2="${mid}" y2="${height}" stroke="#bbb"/>${rows}</svg>`
  );
}

/** One panel per member: delta bars with changed features highlighted. */
export function renderMemberPanel(
  member: CounterfactualMember,
  names: string[],
  index: number,
  opts: BarChartOptions = {},
): string {
  const chart = bars(member.delta, names, new Set(member.changed_features), opts);
  return (
    `<section class="member" data-member="${index}">` +
    `<h3>explanation ${index + 1}</h3>${chart}` +
    `<p class="map-error">map error: ${member.map_error.toFixed(4)}</p></section>`
  );
}

export function renderExplanation(es: ExplanationSet, names: string[]): string {
  const panels = es.members.map((m, i) => renderMemberPanel(m, names, i)).join("");
  const k = es.members.length;
  let matrix = "<table class=\"diversity\">";
  for (let i = 0; i < k; i++) {
    matrix += "<tr>" + es.pairwise_div[i].map((v) => `<td>${v}</td>`).join("") + "</tr>";
  }
  matrix += "</table>";
  const note = es.shortfall
    ? '<p class="shortfall">fewer explanations than requested: feature budget exhausted</p>'
    : "";
  return `<div class="explanation">${panels}${matrix}${note}</div>`;
}

export function renderAttribution(attr: Attribution, opts: BarChartOptions = {}): string {
  const chart = bars(attr.weights, attr.feature_names, new Set(), opts);
  const coverage =
    attr.n_failed > 0
      ? `<p class="coverage">${attr.n_failed} target(s) could not be solved</p>`
      : "";
  const fallback = attr.uniform_fallback
    ? '<p class="coverage">no changes suggested; showing uniform weights</p>'
    : "";
  return `<div class="attribution">${chart}${coverage}${fallback}</div>`;
}

export function renderErrorBanner(message: string): string {
  return `<div class="error-banner" role="alert">${esc(message)}</div>`;
}
