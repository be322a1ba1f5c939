import init, { surface, partitionView, compare } from "./pkg/pwroc_web.js";

const form = document.getElementById("controls");
const slider = document.getElementById("window-slider");
const errorBox = document.getElementById("error");

function params() {
  const data = new FormData(form);
  const num = (k) => Number(data.get(k));
  return JSON.stringify({
    detector: data.get("detector"),
    lead: num("lead"),
    noise: num("noise"),
    events: num("events"),
    duration: num("duration"),
    seed: num("seed"),
    agg: data.get("agg"),
    windows: num("windows"),
  });
}

function canvas(id) {
  const el = document.getElementById(id);
  const ratio = window.devicePixelRatio || 1;
  const w = el.clientWidth;
  const h = Number(el.getAttribute("height"));
  el.width = w * ratio;
  el.height = h * ratio;
  el.style.height = h + "px";
  const ctx = el.getContext("2d");
  ctx.setTransform(ratio, 0, 0, ratio, 0, 0);
  ctx.clearRect(0, 0, w, h);
  return { ctx, w, h };
}

// Plot frame with [x0, x1] x [y0, y1] mapped into the canvas.
function frame({ ctx, w, h }, x0, x1, y0, y1, pad = 32) {
  const sx = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (w - pad - 8);
  const sy = (y) => h - pad + 8 - ((y - y0) / (y1 - y0 || 1)) * (h - pad - 8);
  ctx.strokeStyle = "#999";
  ctx.lineWidth = 1;
  ctx.strokeRect(pad, 8, w - pad - 8, h - pad);
  ctx.fillStyle = "#555";
  ctx.font = "11px system-ui";
  ctx.fillText(fmt(x0), pad, h - 10);
  ctx.fillText(fmt(x1), w - 40, h - 10);
  ctx.fillText(fmt(y1), 2, 16);
  ctx.fillText(fmt(y0), 2, h - pad + 8);
  return { sx, sy };
}

const fmt = (v) => (Math.abs(v) >= 100 ? v.toFixed(0) : v.toFixed(2));
const hue = (i, n) => `hsl(${Math.round(260 - (220 * i) / Math.max(n - 1, 1))} 70% 45%)`;

let sweep = null;

function drawSweep() {
  sweep = JSON.parse(surface(params()));
  const curves = canvas("curves");
  const { sx, sy } = frame(curves, 0, 1, 0, 1);
  const ctx = curves.ctx;
  ctx.setLineDash([4, 4]);
  ctx.strokeStyle = "#bbb";
  ctx.beginPath();
  ctx.moveTo(sx(0), sy(0));
  ctx.lineTo(sx(1), sy(1));
  ctx.stroke();
  ctx.setLineDash([]);
  const n = sweep.windows.length;
  sweep.windows.forEach((entry, i) => {
    if (!entry.curve) return;
    ctx.strokeStyle = hue(i, n);
    ctx.beginPath();
    entry.curve.points.forEach(([x, y], j) => (j ? ctx.lineTo(sx(x), sy(y)) : ctx.moveTo(sx(x), sy(y))));
    ctx.stroke();
  });

  const auc = canvas("auc");
  const f = frame(auc, 0, sweep.w_max, 0, 1);
  auc.ctx.strokeStyle = "#333";
  auc.ctx.beginPath();
  let started = false;
  sweep.windows.forEach((entry, i) => {
    if (!entry.curve) {
      started = false;
      return;
    }
    const x = f.sx(entry.window);
    const y = f.sy(entry.curve.auc);
    started ? auc.ctx.lineTo(x, y) : auc.ctx.moveTo(x, y);
    started = true;
  });
  auc.ctx.stroke();
  sweep.windows.forEach((entry, i) => {
    const x = f.sx(entry.window);
    if (!entry.curve) {
      auc.ctx.fillStyle = "#b00";
      auc.ctx.fillText("gap", x - 8, f.sy(0.05));
      return;
    }
    auc.ctx.fillStyle = hue(i, n);
    auc.ctx.beginPath();
    auc.ctx.arc(x, f.sy(entry.curve.auc), 3.5, 0, 2 * Math.PI);
    auc.ctx.fill();
  });
}

function selectedWindow() {
  const w = Number(slider.value) * (sweep ? sweep.w_max : 1);
  return Math.max(w, 1e-6);
}

function drawWindow() {
  const w = selectedWindow();
  document.getElementById("window-value").textContent = fmt(w);
  const view = JSON.parse(partitionView(params(), w));
  const tl = canvas("timeline");
  const t0 = view.timestamps[0];
  const t1 = view.timestamps[view.timestamps.length - 1];
  const { sx, sy } = frame(tl, t0, t1, 0, 1);
  const ctx = tl.ctx;
  for (const iv of view.intervals) {
    ctx.fillStyle = iv.positive ? "rgba(220,60,40,0.25)" : "rgba(40,90,200,0.12)";
    const x = sx(Math.max(iv.start, t0));
    ctx.fillRect(x, sy(1), sx(iv.end) - x, sy(0) - sy(1));
    ctx.strokeStyle = iv.positive ? "#c33" : "#35a";
    ctx.beginPath();
    const y = sy(Math.min(Math.max(iv.value, 0), 1));
    ctx.moveTo(x, y);
    ctx.lineTo(sx(iv.end), y);
    ctx.stroke();
  }
  ctx.strokeStyle = "rgba(0,0,0,0.55)";
  ctx.beginPath();
  view.timestamps.forEach((t, j) => {
    const x = sx(t);
    const y = sy(view.scores[j]);
    j ? ctx.lineTo(x, y) : ctx.moveTo(x, y);
  });
  ctx.stroke();
  ctx.strokeStyle = "#000";
  ctx.lineWidth = 2;
  for (const s of view.events) {
    ctx.beginPath();
    ctx.moveTo(sx(s), sy(0));
    ctx.lineTo(sx(s), sy(1));
    ctx.stroke();
  }
  ctx.lineWidth = 1;
  ctx.fillStyle = "#222";
  const aucText = view.curve ? `AUC ${view.curve.auc.toFixed(4)}` : "single class: no ROC curve";
  ctx.fillText(aucText, sx(t0) + 6, sy(1) + 14);

  const rows = JSON.parse(compare(params(), w));
  const table = document.getElementById("compare");
  const head = "<tr><th>α</th><th>threshold</th><th>range P</th><th>range R</th><th>range F1</th>"
    + "<th>pw P</th><th>pw R</th><th>pw F1</th></tr>";
  const cell = (v) => `<td>${v.toFixed(3)}</td>`;
  table.innerHTML = head + rows.map((r) => "<tr>" + [
    r.alpha, r.threshold, r.rb_precision, r.rb_recall, r.rb_f1, r.pw_precision, r.pw_recall, r.pw_f1,
  ].map(cell).join("") + "</tr>").join("");
}

function guarded(fn) {
  return () => {
    try {
      errorBox.textContent = "";
      fn();
    } catch (e) {
      errorBox.textContent = String(e);
    }
  };
}

const refreshAll = guarded(() => {
  drawSweep();
  drawWindow();
});

await init();
form.addEventListener("change", refreshAll);
slider.addEventListener("input", guarded(drawWindow));
window.addEventListener("resize", refreshAll);
refreshAll();
