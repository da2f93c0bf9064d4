import init, { radial_profiles, beta_curve, bound_state_frequency, Evolution } from "./pkg/deltalap_wasm.js";

const $ = (id) => document.getElementById(id);

function plot(canvas, series, colors, opts = {}) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  const xs = series[0].map((p) => p[0]);
  const ys = series.flat().map((p) => p[1]).filter(Number.isFinite);
  const x0 = opts.logx ? Math.log(Math.min(...xs)) : Math.min(...xs);
  const x1 = opts.logx ? Math.log(Math.max(...xs)) : Math.max(...xs);
  let y0 = opts.ymin ?? Math.min(...ys);
  let y1 = opts.ymax ?? Math.max(...ys);
  if (y1 - y0 < 1e-12) { y1 += 1; y0 -= 1; }
  const px = (x) => 40 + ((opts.logx ? Math.log(x) : x) - x0) / (x1 - x0) * (w - 50);
  const py = (y) => h - 20 - (y - y0) / (y1 - y0) * (h - 30);
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(40, py(0)); ctx.lineTo(w - 10, py(0));
  ctx.stroke();
  ctx.fillStyle = "#555";
  ctx.fillText(y1.toPrecision(3), 2, 14);
  ctx.fillText(y0.toPrecision(3), 2, h - 20);
  series.forEach((pts, i) => {
    ctx.strokeStyle = colors[i];
    ctx.beginPath();
    pts.forEach(([x, y], k) => {
      const yc = Math.min(Math.max(y, y0), y1);
      k === 0 ? ctx.moveTo(px(x), py(yc)) : ctx.lineTo(px(x), py(yc));
    });
    ctx.stroke();
  });
  return px;
}

function rows(flat, width) {
  const out = [];
  for (let i = 0; i < flat.length; i += width) out.push(Array.from(flat.slice(i, i + width)));
  return out;
}

function drawProfiles() {
  const rmax = Number($("rmax").value);
  $("rmax-out").textContent = rmax;
  const r = rows(radial_profiles(rmax, 300), 4);
  plot($("profiles"), [1, 2, 3].map((c) => r.map((row) => [row[0], row[c]])),
    ["#1f77b4", "#d62728", "#2ca02c"], { ymin: -0.2, ymax: 0.8 });
}

function drawBeta() {
  const alpha = Number($("alpha").value);
  const w0 = bound_state_frequency(alpha);
  $("alpha-out").textContent = `${alpha.toFixed(2)}, omega0 = ${w0.toPrecision(4)}`;
  const pts = rows(beta_curve(alpha, w0 / 100, w0 * 100, 200), 2);
  const px = plot($("beta"), [pts], ["#9467bd"], { logx: true });
  const ctx = $("beta").getContext("2d");
  ctx.strokeStyle = "#d62728";
  ctx.beginPath();
  ctx.moveTo(px(w0), 10); ctx.lineTo(px(w0), $("beta").height - 20);
  ctx.stroke();
}

let evolution = null;
let running = false;

function drawDensity() {
  const n = evolution.n();
  const rho = evolution.density();
  const peak = Math.max(...rho) || 1;
  const canvas = $("density");
  const ctx = canvas.getContext("2d");
  const img = ctx.createImageData(n, n);
  for (let i = 0; i < n * n; i++) {
    const v = Math.sqrt(rho[i] / peak);
    img.data[4 * i] = 255 * v;
    img.data[4 * i + 1] = 120 * v;
    img.data[4 * i + 2] = 255 * (1 - v);
    img.data[4 * i + 3] = 255;
  }
  const tmp = new OffscreenCanvas(n, n);
  tmp.getContext("2d").putImageData(img, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(tmp, 0, 0, canvas.width, canvas.height);
  $("evo-status").textContent = `t = ${evolution.time().toFixed(3)}, mass = ${evolution.mass().toPrecision(10)}`;
}

function frame() {
  if (!running) return;
  evolution.advance(4);
  drawDensity();
  requestAnimationFrame(frame);
}

await init();
$("rmax").addEventListener("input", drawProfiles);
$("alpha").addEventListener("input", drawBeta);
$("evo-start").addEventListener("click", () => {
  evolution = new Evolution(64, 16, Number($("evo-alpha").value), Number($("evo-mu").value),
    Number($("evo-amp").value), 3, 0.01);
  running = true;
  requestAnimationFrame(frame);
});
$("evo-stop").addEventListener("click", () => { running = false; });
drawProfiles();
drawBeta();
