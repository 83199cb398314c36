import init, { ergotropyCurve, chargingCurve, powerBoundCurve } from "../pkg/dicke_battery_demo.js";

const COLORS = ["#1f5fbf", "#c0392b", "#888"];

function rows(flat, width) {
  const out = [];
  for (let i = 0; i + width <= flat.length; i += width) out.push(Array.from(flat.subarray(i, i + width)));
  return out;
}

// series: arrays of [x, y] pairs; NaN points break the line
function plot(canvas, series, xLabel, yLabel) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 48;
  ctx.clearRect(0, 0, w, h);
  const pts = series.flat().filter(([x, y]) => Number.isFinite(x) && Number.isFinite(y));
  if (!pts.length) return;
  let [x0, x1] = [Math.min(...pts.map(p => p[0])), Math.max(...pts.map(p => p[0]))];
  let [y0, y1] = [Math.min(0, ...pts.map(p => p[1])), Math.max(...pts.map(p => p[1]))];
  if (x1 === x0) x1 = x0 + 1;
  if (y1 === y0) y1 = y0 + 1;
  const sx = x => pad + (x - x0) / (x1 - x0) * (w - 2 * pad);
  const sy = y => h - pad - (y - y0) / (y1 - y0) * (h - 2 * pad);

  ctx.strokeStyle = "#444";
  ctx.fillStyle = "#444";
  ctx.font = "12px sans-serif";
  ctx.beginPath();
  ctx.moveTo(pad, pad / 2);
  ctx.lineTo(pad, h - pad);
  ctx.lineTo(w - pad / 2, h - pad);
  ctx.stroke();
  for (let k = 0; k <= 4; k++) {
    const xv = x0 + k * (x1 - x0) / 4, yv = y0 + k * (y1 - y0) / 4;
    ctx.fillText(xv.toPrecision(3), sx(xv) - 12, h - pad + 16);
    ctx.fillText(yv.toPrecision(3), 4, sy(yv) + 4);
  }
  ctx.fillText(xLabel, w / 2, h - 8);
  ctx.save();
  ctx.translate(12, h / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(yLabel, 0, 0);
  ctx.restore();

  series.forEach((s, i) => {
    ctx.strokeStyle = COLORS[i % COLORS.length];
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    let pen = false;
    for (const [x, y] of s) {
      if (!Number.isFinite(y)) { pen = false; continue; }
      pen ? ctx.lineTo(sx(x), sy(y)) : ctx.moveTo(sx(x), sy(y));
      pen = true;
    }
    ctx.stroke();
  });
}

function bind(formId, errId, draw) {
  const form = document.getElementById(formId);
  const err = document.getElementById(errId);
  const run = () => {
    err.textContent = "";
    const v = Object.fromEntries([...new FormData(form)].map(([k, x]) => [k, Number(x)]));
    try { draw(v); } catch (e) { err.textContent = e.message ?? String(e); }
  };
  form.addEventListener("submit", e => { e.preventDefault(); run(); });
  run();
}

await init();

bind("erg-form", "erg-err", ({ n, r }) => {
  const data = rows(ergotropyCurve(n, r, 400), 3);
  plot(document.getElementById("erg"),
    [data.map(d => [d[0], d[1]]), data.map(d => [d[0], d[2]])], "θ", "R / (Nω₀)");
});

bind("chg-form", "chg-err", ({ n, theta, r, k, t }) => {
  const data = rows(chargingCurve(n, theta, r, k, t, 400), 4);
  plot(document.getElementById("chg"),
    [1, 2, 3].map(c => data.map(d => [d[0], d[c]])), "Nγ₋t", "E / (Nω₀)");
});

bind("pow-form", "pow-err", ({ r }) => {
  const data = rows(powerBoundCurve(r, 400), 3).filter(d => d[2] === 1);
  plot(document.getElementById("pow"), [data.map(d => [d[0], d[1]])], "E / (Nω₀)", "P_av / (N²ω₀γ₋)");
});
