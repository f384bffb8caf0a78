import init, { distribution, convergence, counts } from "./pkg/maxexp_web.js";

const $ = (id) => document.getElementById(id);

function fail(target, e) {
  target.innerHTML = `<p class="err">${e.message ?? e}</p>`;
}

function table(head, rows) {
  const th = head.map((h) => `<th>${h}</th>`).join("");
  const body = rows.map((r) => "<tr>" + r.map((c) => `<td>${c}</td>`).join("") + "</tr>").join("");
  return `<table><tr>${th}</tr>${body}</table>`;
}

const fmt = (v, d = 6) => (Math.abs(v) >= 1e6 ? v.toExponential(d) : v.toFixed(d));

// Axes with a margin; returns coordinate maps.
function frame(canvas, xr, yr) {
  const g = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, m = 44;
  g.clearRect(0, 0, w, h);
  g.strokeStyle = "#999";
  g.strokeRect(m, 8, w - m - 8, h - m);
  g.fillStyle = "#555";
  g.font = "12px system-ui";
  g.fillText(yr[1].toPrecision(3), 2, 18);
  g.fillText(yr[0].toPrecision(3), 2, h - m);
  const sx = (x) => m + ((x - xr[0]) / (xr[1] - xr[0] || 1)) * (w - m - 8);
  const sy = (y) => 8 + (1 - (y - yr[0]) / (yr[1] - yr[0] || 1)) * (h - m);
  return { g, sx, sy, h, m };
}

function bars(canvas, values) {
  const top = Math.max(...values, 1e-12);
  const { g, sx, sy } = frame(canvas, [0, values.length], [0, top]);
  g.fillStyle = "#3b6ea8";
  values.forEach((v, i) => {
    const x0 = sx(i + 0.1), x1 = sx(i + 0.9);
    g.fillRect(x0, sy(v), x1 - x0, sy(0) - sy(v));
    g.fillStyle = "#555";
    g.fillText(String(i + 1), (x0 + x1) / 2 - 3, sy(0) + 14);
    g.fillStyle = "#3b6ea8";
  });
}

// Scaled residual against log10 x.
function line(canvas, rows) {
  const pts = rows.map((r) => [Math.log10(r.x), r.scaled_residual]);
  const ys = pts.map((p) => p[1]).concat([0]);
  const lo = Math.min(...ys), hi = Math.max(...ys);
  const { g, sx, sy, h, m } = frame(canvas, [pts[0][0], pts[pts.length - 1][0]], [lo, hi]);
  g.strokeStyle = "#ccc";
  g.beginPath(); g.moveTo(sx(pts[0][0]), sy(0)); g.lineTo(sx(pts[pts.length - 1][0]), sy(0)); g.stroke();
  g.strokeStyle = "#c0392b";
  g.beginPath();
  pts.forEach(([x, y], i) => (i ? g.lineTo(sx(x), sy(y)) : g.moveTo(sx(x), sy(y))));
  g.stroke();
  g.fillStyle = "#555";
  g.fillText("log10 x", canvas.width / 2, h - m + 30);
}

function showDist() {
  try {
    const v = JSON.parse(distribution($("dist-f").value, Number($("dist-k").value)));
    bars($("dist-plot"), v.table.map((r) => r.pmf));
    let html = table(["k", "P(X = k)", "P(X ≤ k)"], v.table.map((r) => [r.k, fmt(r.pmf, 10), fmt(r.cdf, 10)]));
    if (v.mean) html += `<p>mean ${fmt(v.mean.value, 9)}, second moment ${fmt(v.second_moment.value, 9)}</p>`;
    $("dist-out").innerHTML = html;
  } catch (e) {
    fail($("dist-out"), e);
  }
}

function showConvergence() {
  try {
    const v = JSON.parse(convergence($("conv-stat").value, Number($("conv-pow").value), Number($("conv-x").value)));
    line($("conv-plot"), v.rows);
    $("conv-out").innerHTML = table(
      ["x", "exact sum", "main term", "residual", "scaled"],
      v.rows.map((r) => [r.x, r.empirical_exact ?? fmt(r.empirical), fmt(r.predicted, 2), fmt(r.residual, 2), fmt(r.scaled_residual, 4)]),
    );
  } catch (e) {
    fail($("conv-out"), e);
  }
}

function showCounts() {
  try {
    const v = JSON.parse(counts($("cnt-kind").value, Number($("cnt-k").value), Number($("cnt-x").value)));
    line($("cnt-plot"), v.rows);
    $("cnt-out").innerHTML = table(
      ["x", "count", "main term", "residual", "scaled"],
      v.rows.map((r) => [r.x, r.empirical_exact ?? fmt(r.empirical), fmt(r.predicted, 2), fmt(r.residual, 2), fmt(r.scaled_residual, 4)]),
    );
  } catch (e) {
    fail($("cnt-out"), e);
  }
}

await init();
$("dist-go").onclick = showDist;
$("conv-go").onclick = showConvergence;
$("cnt-go").onclick = showCounts;
showDist();
