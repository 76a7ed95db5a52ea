import init, { Demo, densityProbe } from "./pkg/scone_demo.js";

const $ = (id) => document.getElementById(id);
const LABEL_COLOURS = { 1: "#1f77b4", 2: "#d62728", 3: "#9467bd" };

let demo = null;
let summary = null;

function status(text) {
  $("status").textContent = text;
}

function bounds(points) {
  let [x0, y0, x1, y1] = [Infinity, Infinity, -Infinity, -Infinity];
  for (let i = 0; i < points.length; i += 2) {
    x0 = Math.min(x0, points[i]);
    x1 = Math.max(x1, points[i]);
    y0 = Math.min(y0, points[i + 1]);
    y1 = Math.max(y1, points[i + 1]);
  }
  const pad = 0.05 * Math.max(x1 - x0, y1 - y0);
  return { x0: x0 - pad, y0: y0 - pad, span: Math.max(x1 - x0, y1 - y0) + 2 * pad };
}

function drawView(v, member) {
  const canvas = $("view" + v);
  const ctx = canvas.getContext("2d");
  const pts = summary.points[v];
  const b = bounds(pts);
  const scale = canvas.width / b.span;
  const px = (x) => (x - b.x0) * scale;
  const py = (y) => canvas.height - (y - b.y0) * scale;
  ctx.clearRect(0, 0, canvas.width, canvas.height);

  const hit = member ? member.hits.map((h) => h.length > 0) : null;
  const n = summary.labels.length;
  for (let i = 0; i < n; i++) {
    const s = summary.anomaly[i];
    const shade = Math.round(230 * (1 - s));
    ctx.fillStyle = hit && hit[i] ? "#2ca02c" : `rgb(${shade},${shade},${shade})`;
    ctx.beginPath();
    ctx.arc(px(pts[2 * i]), py(pts[2 * i + 1]), 2.2, 0, 2 * Math.PI);
    ctx.fill();
  }
  for (let i = 0; i < n; i++) {
    const colour = LABEL_COLOURS[summary.labels[i]];
    if (!colour) continue;
    ctx.strokeStyle = colour;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    ctx.arc(px(pts[2 * i]), py(pts[2 * i + 1]), 5, 0, 2 * Math.PI);
    ctx.stroke();
  }
  if (member && $("show-spheres").checked) {
    member.indices.forEach((idx, j) => {
      const cx = px(pts[2 * idx]);
      const cy = py(pts[2 * idx + 1]);
      ctx.strokeStyle = "rgba(255,127,14,0.9)";
      ctx.lineWidth = 1;
      ctx.beginPath();
      ctx.arc(cx, cy, member.radii[v][j] * scale, 0, 2 * Math.PI);
      ctx.stroke();
      ctx.fillStyle = "#ff7f0e";
      ctx.fillRect(cx - 3, cy - 3, 6, 6);
    });
  }
}

function redraw() {
  if (!summary) return;
  const member = JSON.parse(demo.member(Number($("member").value)));
  $("member-label").textContent = $("member").value;
  for (let v = 0; v < summary.points.length; v++) drawView(v, member);
}

function runScore() {
  status("");
  try {
    if (demo) demo.free();
    demo = new Demo(
      $("mode").value,
      Number($("seed").value),
      Number($("psi").value),
      Number($("k").value),
      Number($("t").value),
      $("variant").value,
    );
    summary = JSON.parse(demo.summary());
  } catch (e) {
    demo = null;
    summary = null;
    status(String(e.message || e));
    return;
  }
  const rows = Object.entries(summary.per_type)
    .map(([name, auc]) => `<tr><td>${name}</td><td>${auc.toFixed(4)}</td></tr>`)
    .join("");
  $("auc").innerHTML = `<table><tr><th>overall AUC</th><th>${summary.auc.toFixed(4)}</th></tr>${rows}</table>`;
  $("member").max = demo.memberCount() - 1;
  $("member").value = Math.min(Number($("member").value), demo.memberCount() - 1);
  redraw();
}

function runProbe() {
  status("");
  try {
    const r = JSON.parse(
      densityProbe(
        Number($("ratio").value),
        Number($("probe-psi").value),
        Number($("probe-k").value),
        Number($("trials").value),
        0,
      ),
    );
    $("probe-out").textContent =
      `P(member | sparse) = ${r.p_sparse.toFixed(4)}, P(member | dense) = ${r.p_dense.toFixed(4)}, ` +
      `one-sided p-value ${r.p_value.toExponential(2)} over ${r.trials} trials`;
  } catch (e) {
    status(String(e.message || e));
  }
}

await init();
$("run").addEventListener("click", runScore);
$("member").addEventListener("input", redraw);
$("show-spheres").addEventListener("change", redraw);
$("probe").addEventListener("click", runProbe);
runScore();
