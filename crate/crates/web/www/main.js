import init, { fixture, analyze_instance, analyze_graph, decompose_periodic } from "./pkg/eqcohom_web.js";

const $ = (id) => document.getElementById(id);

const PERIODIC = ["hex", "torus-1", "torus-2", "square-index2"];
const INSTANCES = ["shear", "double-shear"];
const GRAPHS = ["c4-rotation", "p2-swap", "k3-s3", "two-triangles-swap"];

function fillSelect(sel, names, onChange) {
  for (const n of names) sel.add(new Option(n, n));
  sel.addEventListener("change", () => onChange(sel.value));
  onChange(names[0]);
}

function load(name) {
  const r = JSON.parse(fixture(name));
  if (!r.ok) throw new Error(r.error.message);
  return r.result;
}

function ratio(s) {
  const [p, q] = s.split("/");
  return Number(p) / (q === undefined ? 1 : Number(q));
}

function assertionLines(list) {
  return (list || []).map((a) => `${a.passed ? "PASS" : "FAIL"} ${a.name}`).join("\n");
}

function show(pre, r, extra = "") {
  if (!r.ok) {
    pre.innerHTML = "";
    pre.className = "fail";
    pre.textContent = `${r.error.kind}: ${r.error.message}`;
    return;
  }
  pre.className = "";
  pre.textContent = (extra ? extra + "\n\n" : "") + JSON.stringify(r.result, null, 2);
}

// d = 1 lifts are drawn with quotient vertices stacked vertically.
function position(lift, nVerts, v, cell) {
  const off = nVerts > 1 ? v / nVerts : 0;
  if (lift.d === 1) return [cell[0] + off * 0.5, off * 2 - 0.5];
  return [cell[0] + off * 0.45, cell[1] + off * 0.3];
}

function color(t) {
  const h = 240 - 240 * t;
  return `hsl(${h}, 70%, 50%)`;
}

function draw(lift) {
  const cv = $("p-canvas");
  const ctx = cv.getContext("2d");
  ctx.clearRect(0, 0, cv.width, cv.height);
  if (lift.d > 2) {
    ctx.fillStyle = "#555";
    ctx.fillText(`lift drawn for d <= 2 only (d = ${lift.d})`, 20, 30);
    return;
  }
  const nVerts = Math.max(...lift.vertices.map((x) => x.v)) + 1;
  const span = lift.radius + 1.2;
  const scale = cv.width / (2 * span);
  const px = ([x, y]) => [cv.width / 2 + x * scale, cv.height / 2 - y * scale];
  const values = lift.vertices.map((x) => ratio(x.potential));
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  ctx.strokeStyle = "#999";
  for (const e of lift.edges) {
    const [x0, y0] = px(position(lift, nVerts, e.from[0], e.from[1]));
    const [x1, y1] = px(position(lift, nVerts, e.to[0], e.to[1]));
    ctx.beginPath();
    ctx.moveTo(x0, y0);
    ctx.lineTo(x1, y1);
    ctx.stroke();
  }
  lift.vertices.forEach((x, i) => {
    const [cx, cy] = px(position(lift, nVerts, x.v, x.cell));
    ctx.fillStyle = color(hi > lo ? (values[i] - lo) / (hi - lo) : 0.5);
    ctx.beginPath();
    ctx.arc(cx, cy, Math.max(3, scale * 0.09), 0, 2 * Math.PI);
    ctx.fill();
  });
  ctx.fillStyle = "#333";
  ctx.fillText(`potential from ${lo.toFixed(2)} (blue) to ${hi.toFixed(2)} (red)`, 8, cv.height - 8);
}

function runPeriodic() {
  const r = JSON.parse(decompose_periodic($("p-graph").value, $("p-w").value, Number($("p-radius").value)));
  if (r.ok) {
    const a = r.result.decomposition.a.map((row, j) => `a[${j}] = ${row.join(", ")}`).join("\n");
    show($("p-out"), r, `${a}\nf = ${r.result.decomposition.f.join(", ")}`);
    draw(r.lift);
  } else {
    show($("p-out"), r);
    $("p-canvas").getContext("2d").clearRect(0, 0, 520, 520);
  }
}

function runInstance() {
  const r = JSON.parse(analyze_instance($("i-json").value));
  show($("i-out"), r, r.ok ? `dim ${r.result.dim} of at most ${r.result.md}\n${assertionLines(r.assertions)}` : "");
}

function runGraph() {
  const r = JSON.parse(analyze_graph($("g-graph").value, $("g-action").value));
  show($("g-out"), r, r.ok ? `dim ${r.result.dim}, consistent: ${r.result.consistent}` : "");
}

await init();

fillSelect($("p-fixture"), PERIODIC, (n) => {
  const f = load(n);
  $("p-graph").value = f.pgraph;
  $("p-w").value = f.w;
  runPeriodic();
});
fillSelect($("i-fixture"), INSTANCES, (n) => {
  $("i-json").value = load(n).instance;
  runInstance();
});
fillSelect($("g-fixture"), GRAPHS, (n) => {
  const f = load(n);
  $("g-graph").value = f.graph;
  $("g-action").value = f.action;
  runGraph();
});

$("p-radius").addEventListener("input", () => {
  $("p-radius-val").textContent = $("p-radius").value;
  runPeriodic();
});
$("p-run").addEventListener("click", runPeriodic);
$("i-run").addEventListener("click", runInstance);
$("g-run").addEventListener("click", runGraph);
