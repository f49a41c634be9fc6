import init, { analyze, optimize, sat } from "./pkg/majn_wasm.js";

const examples = {
  fa: `.inputs a b cin
.outputs cout=m sum=s
m = MAJ(a, b, cin)
p = MAJ(!a, b, cin)
s = MAJ(a, !m, p)
`,
  shared: "M5(M3(a,b,c), M3(a,b,d), M3(a,b,e), g, h)",
  unsat: "M5(M3(a,b,c), M5(M5(a,b,c,0,0), !b, c, 0, 0), !a, !b, 0)",
};

const $ = (id) => document.getElementById(id);
const out = $("out");

function metrics(m) {
  return `size=${m.size} depth=${m.depth} fanin=${m.fanin} inverters=${m.inverters}`;
}

function show(json, render) {
  const r = JSON.parse(json);
  out.className = r.error ? "error" : "";
  out.textContent = r.error ? `error: ${r.error}` : render(r);
}

function loadExample() {
  $("source").value = examples[$("example").value];
}

await init();
loadExample();
out.textContent = "ready";

$("example").onchange = loadExample;

$("analyze").onclick = () =>
  show(analyze($("source").value), (r) => [
    `inputs: ${r.inputs.join(" ")}`,
    metrics(r.metrics),
    ...r.outputs.map((o) =>
      `${o.name}: size=${o.size} depth=${o.depth} ${o.constants}` +
      (o.table ? ` table=${o.table} self-dual=${o.self_dual}` : "")),
    "",
    r.dot,
  ].join("\n"));

$("optimize").onclick = () =>
  show(optimize($("source").value, $("target").value, Number($("arity").value), 0), (r) => [
    `${r.target}: ${metrics(r.before)}`,
    `   -> ${metrics(r.after)}  (${r.moves} moves)`,
    "",
    ...r.trace,
    "",
    r.netlist,
  ].join("\n"));

$("sat").onclick = () =>
  show(sat($("source").value), (r) => [
    `${r.output}: ${r.satisfiable ? "SATISFIABLE" : "UNSATISFIABLE"} after ${r.branches} branches`,
    ...(r.witness ? [r.witness.map(([n, v]) => `${n}=${v ? 1 : 0}`).join(" ")] : []),
    "",
    ...r.trace,
  ].join("\n"));
