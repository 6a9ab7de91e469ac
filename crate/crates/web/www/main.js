import init, { decompose_view, fit_view, compare_methods } from "./pkg/gpsrbf_web.js";

const $ = (id) => document.getElementById(id);

function params() {
  return {
    samples: 1 << Number($("samples").value),
    sigma: Number($("sigma").value),
    seed: Math.max(0, Math.floor(Number($("seed").value) || 0)),
    lowFrac: Number($("lowfrac").value),
    highFrac: Number($("highfrac").value),
    component: $("component").value,
    method: $("method").value,
    band: $("band").value,
    nnsize: Number($("nnsize").value),
    spread: Number($("spread").value),
  };
}

function syncOutputs() {
  for (const out of document.querySelectorAll("output")) {
    const input = $(out.htmlFor.value);
    out.value = input.id === "samples" ? String(1 << Number(input.value)) : input.value;
  }
}

function extent(series) {
  let lo = Infinity, hi = -Infinity;
  for (const s of series) for (const v of s) { if (v < lo) lo = v; if (v > hi) hi = v; }
  if (!(hi > lo)) { lo -= 1; hi += 1; }
  return [lo, hi];
}

// Draws each series as a polyline in the box [x0, y0, w, h] of the canvas.
function plot(ctx, box, series, colors, range = extent(series)) {
  const [x0, y0, w, h] = box;
  const [lo, hi] = range;
  ctx.strokeStyle = "#eee";
  ctx.strokeRect(x0, y0, w, h);
  series.forEach((s, k) => {
    ctx.strokeStyle = colors[k];
    ctx.lineWidth = 1;
    ctx.beginPath();
    for (let i = 0; i < s.length; i++) {
      const x = x0 + (w * i) / Math.max(1, s.length - 1);
      const y = y0 + h - (h * (s[i] - lo)) / (hi - lo);
      i ? ctx.lineTo(x, y) : ctx.moveTo(x, y);
    }
    ctx.stroke();
  });
}

function clear(canvas) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  return ctx;
}

function drawBands() {
  const p = params();
  const view = decompose_view(p.samples, p.sigma, p.seed, p.lowFrac, p.highFrac, p.component);
  const canvas = $("bands");
  const ctx = clear(canvas);
  const rows = [[view.noisy, "#999"], [view.low, "#1f77b4"], [view.mid, "#2ca02c"], [view.high, "#d62728"]];
  const h = canvas.height / rows.length;
  rows.forEach(([s, c], k) => plot(ctx, [0, k * h + 2, canvas.width, h - 4], [s], [c]));
  view.free();
}

function drawFit() {
  const p = params();
  const view = fit_view(p.samples, p.sigma, p.seed, p.method, p.band, p.lowFrac, p.highFrac, p.nnsize, p.spread, p.component);
  const canvas = $("fitplot");
  const ctx = clear(canvas);
  const curves = [view.target, view.original, view.teaching, view.learned];
  plot(ctx, [0, 0, canvas.width, canvas.height], curves, ["#ccc", "#222", "#ff7f0e", "#1f77b4"], extent(curves.slice(1)));

  const sse = Array.from(view.sse_history, (v) => Math.log10(Math.max(v, 1e-300)));
  const sctx = clear($("ssecurve"));
  plot(sctx, [0, 0, $("ssecurve").width, $("ssecurve").height], [sse], ["#9467bd"]);
  sctx.fillStyle = "#555";
  sctx.fillText("log10 SSE per added neuron", 6, 14);

  $("fitstats").textContent =
    `${view.neurons} neurons on ${view.training_samples} training samples, ` +
    `output MSE ${view.mse.toExponential(3)}, ${view.elapsed_ms.toFixed(0)} ms`;
  view.free();
}

function runCompare() {
  const p = params();
  const c = compare_methods(p.samples, p.sigma, p.seed, p.band, p.lowFrac, p.highFrac, p.nnsize, p.spread);
  const rows = $("comparison").rows;
  const fill = (row, samples, ms, mse) => {
    row.cells[1].textContent = samples;
    row.cells[2].textContent = ms.toFixed(0);
    row.cells[3].textContent = mse.toExponential(3);
  };
  fill(rows[1], c.conventional_samples, c.conventional_ms, c.conventional_mse);
  fill(rows[2], c.improved_samples, c.improved_ms, c.improved_mse);
  $("comparison").hidden = false;
  $("speedup").textContent = Number.isNaN(c.speedup)
    ? "Runs finished below clock resolution."
    : `Speedup ${c.speedup.toFixed(2)}x (band ${p.band}).`;
  c.free();
}

// Runs `f` and reports errors from the wasm side in the status line.
function guarded(f) {
  return () => {
    try {
      $("status").textContent = "";
      f();
    } catch (e) {
      $("status").textContent = String(e.message ?? e);
    }
  };
}

await init();
syncOutputs();
$("status").textContent = "";
for (const input of document.querySelectorAll("#signal input, #signal select")) {
  input.addEventListener("input", () => { syncOutputs(); guarded(drawBands)(); });
}
for (const id of ["nnsize", "spread"]) $(id).addEventListener("input", syncOutputs);
$("fit").addEventListener("click", guarded(drawFit));
$("compare").addEventListener("click", guarded(runCompare));
guarded(drawBands)();
guarded(drawFit)();
