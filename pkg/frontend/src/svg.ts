import { Figure } from "./figures.js";

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { top: 48, right: 180, bottom: 56, left: 76 };

const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
  "#bcbd22",
  "#e377c2",
];

const DASHES = ["", "6 3", "2 2", "8 3 2 3"];

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

interface Scale {
  min: number;
  max: number;
  ticks: number[];
  toPixel(value: number): number;
}

function niceTicks(min: number, max: number, count: number): number[] {
  if (min === max) {
    return [min];
  }
  const span = max - min;
  const step0 = span / Math.max(count - 1, 1);
  const magnitude = 10 ** Math.floor(Math.log10(step0));
  const residual = step0 / magnitude;
  const step =
    residual >= 5 ? 5 * magnitude : residual >= 2 ? 2 * magnitude : magnitude;
  const first = Math.ceil(min / step) * step;
  const ticks: number[] = [];
  for (let v = first; v <= max + step * 1e-9; v += step) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

function makeScale(
  values: number[],
  pixelLow: number,
  pixelHigh: number,
): Scale {
  let min = Math.min(...values);
  let max = Math.max(...values);
  if (min === max) {
    const pad = min === 0 ? 1 : Math.abs(min) * 0.1;
    min -= pad;
    max += pad;
  } else {
    const pad = (max - min) * 0.05;
    min -= pad;
    max += pad;
  }
  const ticks = niceTicks(min, max, 6);
  return {
    min,
    max,
    ticks,
    toPixel: (v: number) =>
      pixelLow + ((v - min) / (max - min)) * (pixelHigh - pixelLow),
  };
}

function formatTick(value: number): string {
  if (value !== 0 && (Math.abs(value) >= 1e5 || Math.abs(value) < 1e-3)) {
    return value.toExponential(1);
  }
  return Number(value.toPrecision(6)).toString();
}

export function renderSvg(figure: Figure): string {
  const plotLeft = MARGIN.left;
  const plotRight = WIDTH - MARGIN.right;
  const plotTop = MARGIN.top;
  const plotBottom = HEIGHT - MARGIN.bottom;

  const xs = figure.series.flatMap((s) => s.points.map((p) => p.x));
  const ys = figure.series.flatMap((s) => s.points.map((p) => p.y));
  const xScale = makeScale(xs, plotLeft, plotRight);
  const yScale = makeScale(ys, plotBottom, plotTop);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(
    `<text x="${(plotLeft + plotRight) / 2}" y="24" text-anchor="middle" ` +
      `font-size="16">${escapeXml(figure.title)}</text>`,
  );

  for (const tick of xScale.ticks) {
    const px = xScale.toPixel(tick);
    parts.push(
      `<line x1="${px.toFixed(2)}" y1="${plotTop}" x2="${px.toFixed(2)}" ` +
        `y2="${plotBottom}" stroke="#e0e0e0" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${px.toFixed(2)}" y="${plotBottom + 18}" text-anchor="middle" ` +
        `font-size="11">${escapeXml(formatTick(tick))}</text>`,
    );
  }
  for (const tick of yScale.ticks) {
    const py = yScale.toPixel(tick);
    parts.push(
      `<line x1="${plotLeft}" y1="${py.toFixed(2)}" x2="${plotRight}" ` +
        `y2="${py.toFixed(2)}" stroke="#e0e0e0" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${plotLeft - 8}" y="${(py + 4).toFixed(2)}" text-anchor="end" ` +
        `font-size="11">${escapeXml(formatTick(tick))}</text>`,
    );
  }

  parts.push(
    `<rect x="${plotLeft}" y="${plotTop}" width="${plotRight - plotLeft}" ` +
      `height="${plotBottom - plotTop}" fill="none" stroke="#404040"/>`,
  );
  parts.push(
    `<text x="${(plotLeft + plotRight) / 2}" y="${HEIGHT - 12}" ` +
      `text-anchor="middle" font-size="13">${escapeXml(figure.xLabel)}</text>`,
  );
  parts.push(
    `<text x="18" y="${(plotTop + plotBottom) / 2}" text-anchor="middle" ` +
      `font-size="13" transform="rotate(-90 18 ${(plotTop + plotBottom) / 2})">` +
      `${escapeXml(figure.yLabel)}</text>`,
  );

  figure.series.forEach((series, index) => {
    const color = PALETTE[index % PALETTE.length];
    const dash = DASHES[Math.floor(index / PALETTE.length) % DASHES.length];
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    const coords = series.points.map(
      (p) => [xScale.toPixel(p.x), yScale.toPixel(p.y)] as const,
    );
    const path = coords
      .map(([x, y], i) => `${i === 0 ? "M" : "L"}${x.toFixed(2)} ${y.toFixed(2)}`)
      .join(" ");
    parts.push(
      `<path d="${path}" fill="none" stroke="${color}" stroke-width="2"${dashAttr}/>`,
    );
    for (const [x, y] of coords) {
      parts.push(
        `<circle cx="${x.toFixed(2)}" cy="${y.toFixed(2)}" r="3" fill="${color}"/>`,
      );
    }
    const legendY = plotTop + 16 + index * 18;
    parts.push(
      `<line x1="${plotRight + 12}" y1="${legendY - 4}" x2="${plotRight + 36}" ` +
        `y2="${legendY - 4}" stroke="${color}" stroke-width="2"${dashAttr}/>`,
    );
    parts.push(
      `<text x="${plotRight + 42}" y="${legendY}" font-size="11">` +
        `${escapeXml(series.label)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
