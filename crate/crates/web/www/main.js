import init, { analyze, extendStep, playGame, generate, sliderSteps } from "./pkg/floppy_web.js";

const $ = (id) => document.getElementById(id);
let current = null;
let selected = null;

function num(s) {
  const [p, q] = s.split("/");
  return q === undefined ? Number(p) : Number(p) / Number(q);
}

function status(text, isError) {
  $("status").textContent = text;
  $("status").className = isError ? "err" : "";
}

function draw(metric, highlight) {
  const ctx = $("view").getContext("2d");
  const w = $("view").width, h = $("view").height;
  ctx.clearRect(0, 0, w, h);
  const n = metric.vertices.length;
  const pos = new Map();
  metric.vertices.forEach((v, i) => {
    const a = (2 * Math.PI * i) / n - Math.PI / 2;
    pos.set(v, [w / 2 + 0.4 * w * Math.cos(a), h / 2 + 0.4 * h * Math.sin(a)]);
  });
  ctx.font = "11px sans-serif";
  for (const e of metric.edges) {
    const [x1, y1] = pos.get(e.u), [x2, y2] = pos.get(e.v);
    const hit = highlight && [e.u, e.v].sort().join() === highlight.join();
    ctx.strokeStyle = hit ? "#d08000" : "#888";
    ctx.lineWidth = hit ? 3 : 1;
    ctx.beginPath(); ctx.moveTo(x1, y1); ctx.lineTo(x2, y2); ctx.stroke();
    ctx.fillStyle = "#555";
    ctx.fillText(e.w, (x1 + x2) / 2 + 3, (y1 + y2) / 2 - 3);
  }
  for (const [v, [x, y]] of pos) {
    ctx.fillStyle = "#2a5db0";
    ctx.beginPath(); ctx.arc(x, y, 6, 0, 2 * Math.PI); ctx.fill();
    ctx.fillStyle = "#000";
    ctx.fillText(v, x + 8, y - 8);
  }
}

function show(analysis, highlight) {
  current = analysis;
  $("doc").value = JSON.stringify(analysis.metric);
  draw(analysis.metric, highlight);
  const v = analysis.validation;
  const floppy = analysis.floppy ? (analysis.floppy.floppy ? "floppy" : "not floppy") : "not a graph metric";
  status(`${v.full ? "full" : "partial"}, ${floppy}`, !analysis.floppy || !analysis.floppy.floppy);
  const body = $("pairs").tBodies[0];
  body.innerHTML = "";
  selected = null;
  for (const p of analysis.missing) {
    const tr = body.insertRow();
    for (const cell of [p.pair.join(","), p.check, p.hat, p.interval.lo]) tr.insertCell().textContent = cell;
    tr.onclick = () => {
      for (const r of body.rows) r.classList.remove("sel");
      tr.classList.add("sel");
      selected = p;
      updateR();
    };
  }
  if (body.rows.length) body.rows[0].onclick();
}

function updateR() {
  if (!selected) { $("rval").textContent = ""; return; }
  const lo = num(selected.interval.lo), hi = num(selected.interval.hi);
  const t = Number($("slider").value) / sliderSteps();
  $("rval").textContent = `r ≈ ${(lo + (hi - lo) * t).toFixed(4)}`;
}

function guard(f) {
  try { f(); } catch (e) { status(String(e), true); }
}

await init();
$("slider").max = String(sliderSteps() - 1);
$("slider").oninput = updateR;
$("gen").onclick = () => guard(() => {
  const doc = generate($("kind").value, Number($("size").value), Number($("seed").value));
  show(JSON.parse(analyze(doc)));
});
$("load").onclick = () => guard(() => show(JSON.parse(analyze($("doc").value))));
$("step").onclick = () => guard(() => {
  if (!selected) return;
  const res = JSON.parse(extendStep($("doc").value, selected.pair.join(","), Number($("slider").value)));
  show(res.analysis, res.pair);
  $("game").textContent = `added ${res.pair.join(",")} = ${res.r}`;
});
$("play").onclick = () => guard(() => {
  const t = JSON.parse(playGame($("doc").value, Number($("gseed").value)));
  const lines = t.moves.map((m, i) => `${i + 1}. ${m.pair.join(",")} offered ${JSON.stringify(m.offered.intervals)} answered ${m.answer}`);
  lines.push(t.verdict);
  $("game").textContent = lines.join("\n");
  if (t.verdict === "PLAYER_I_WINS") {
    const seen = new Set(t.base.edges.map((e) => [e.u, e.v].sort().join()));
    const added = t.moves
      .filter((m) => { const k = [...m.pair].sort().join(); const fresh = !seen.has(k); seen.add(k); return fresh; })
      .map((m) => ({ u: m.pair[0], v: m.pair[1], w: m.answer }));
    const full = { vertices: t.base.vertices, edges: t.base.edges.concat(added) };
    show(JSON.parse(analyze(JSON.stringify(full))));
    $("game").textContent = lines.join("\n");
  }
});
$("gen").onclick();
