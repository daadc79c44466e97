import init, { er_triangle_ratio, overlap_sweep, embedding_error } from "./pkg/eigraph_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function show(out, f) {
  out.classList.remove("err");
  try {
    const value = JSON.parse(f());
    out.textContent = JSON.stringify(value, null, 2);
    return value;
  } catch (e) {
    out.classList.add("err");
    out.textContent = String(e.message ?? e);
    return null;
  }
}

function plot(svg, res) {
  const w = svg.width.baseVal.value, h = svg.height.baseVal.value, pad = 40;
  const pts = res.points.filter((p) => p.triangles !== null);
  const ymax = Math.max(res.reference_triangles, ...pts.map((p) => p.triangles), 1);
  const x = (v) => pad + v * (w - 2 * pad);
  const y = (v) => h - pad - (v / ymax) * (h - 2 * pad);
  const line = pts.map((p) => `${x(p.overlap).toFixed(1)},${y(p.triangles).toFixed(1)}`).join(" ");
  svg.innerHTML = `
    <line x1="${pad}" y1="${h - pad}" x2="${w - pad}" y2="${h - pad}" stroke="#888"/>
    <line x1="${pad}" y1="${pad}" x2="${pad}" y2="${h - pad}" stroke="#888"/>
    <line x1="${pad}" x2="${w - pad}" y1="${y(res.reference_triangles)}" y2="${y(res.reference_triangles)}"
          stroke="#000" stroke-dasharray="4 3"/>
    <polyline points="${line}" fill="none" stroke="#1f77b4" stroke-width="2"/>
    ${pts.map((p) => `<circle cx="${x(p.overlap)}" cy="${y(p.triangles)}" r="3" fill="#1f77b4"/>`).join("")}
    <text x="${w / 2}" y="${h - 8}" text-anchor="middle" font-size="12">expected overlap</text>
    <text x="${pad - 4}" y="${pad}" text-anchor="end" font-size="11">${ymax.toFixed(0)}</text>
    <text x="${pad - 4}" y="${h - pad}" text-anchor="end" font-size="11">0</text>
    <text x="${w - pad}" y="${y(res.reference_triangles) - 4}" text-anchor="end" font-size="11">input graph</text>`;
}

await init();
$("status").textContent = "Ready.";

$("er-run").onclick = () => show($("er-out"), () => er_triangle_ratio(num("er-n"), num("er-gamma")));

$("sw-run").onclick = () => {
  const res = show($("sw-out"), () =>
    overlap_sweep($("sw-model").value, num("sw-points"), num("sw-samples"), BigInt(num("sw-seed"))));
  if (res) plot($("sw-plot"), res);
};

$("em-run").onclick = () =>
  show($("em-out"), () => embedding_error(num("em-n"), num("em-d"), num("em-scale"), BigInt(num("em-seed"))));
