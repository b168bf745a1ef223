import init, {
  list_scenarios,
  run_scenario_json,
  fit_series_json,
} from "./pkg/decaylab_web.js";

const $ = (id) => document.getElementById(id);

let columns = null; // column name -> [[t, y], ...] from the last run

function setStatus(text, cls) {
  const el = $("status");
  el.textContent = text;
  el.className = cls || "";
}

function renderChecks(report) {
  const body = $("checks").querySelector("tbody");
  body.textContent = "";
  for (const check of report.checks) {
    const row = document.createElement("tr");
    const name = document.createElement("td");
    name.textContent = check.name;
    const status = document.createElement("td");
    status.textContent = check.status;
    status.className = "status-" + check.status.replace("/", "-");
    const detail = document.createElement("td");
    detail.textContent = check.detail;
    row.append(name, status, detail);
    body.append(row);
  }
}

function renderFitControls(report) {
  const select = $("fit-column");
  select.textContent = "";
  for (const name of Object.keys(columns)) {
    const option = document.createElement("option");
    option.value = name;
    option.textContent = name;
    select.append(option);
  }
  // sensible defaults: the norm column, fitted on the back half of the run
  if (columns.l2_u_sq) select.value = "l2_u_sq";
  const horizon = report.config.horizon;
  $("fit-t0").value = Math.max(1, Math.round(horizon / 4));
  $("fit-t1").value = Math.round(horizon);
}

function runScenario() {
  const id = $("scenario").value;
  const coarsen = parseInt($("coarsen").value, 10);
  const horizon = parseFloat($("horizon").value) || 0;
  setStatus(`running ${id} ...`);
  $("run").disabled = true;
  // give the status line a frame to paint before the tab blocks
  setTimeout(() => {
    try {
      const payload = JSON.parse(run_scenario_json(id, coarsen, horizon));
      const report = payload.report;
      columns = payload.columns;
      renderChecks(report);
      if (columns) renderFitControls(report);
      $("svg-holder").innerHTML = payload.svg || "";
      $("results").classList.remove("hidden");
      $("fit-result").classList.add("hidden");
      const verdict = `${id}: ${report.outcome} (expected ${report.expected})`;
      setStatus(verdict, report.as_expected ? "ok" : "error");
    } catch (err) {
      setStatus(String(err), "error");
    } finally {
      $("run").disabled = false;
    }
  }, 30);
}

function fitColumn() {
  if (!columns) return;
  const name = $("fit-column").value;
  let pts = columns[name];
  if ($("fit-sqrt").checked) {
    pts = pts.map(([t, y]) => [t, Math.sqrt(Math.max(y, 0))]);
  }
  const model = $("fit-model").value;
  const t0 = parseFloat($("fit-t0").value);
  const t1 = parseFloat($("fit-t1").value);
  const scale = parseFloat($("fit-scale").value) || 0;
  const cap = parseFloat($("fit-cap").value) || 0;
  const out = $("fit-result");
  try {
    const fit = JSON.parse(
      fit_series_json(JSON.stringify(pts), model, t0, t1, scale, cap),
    );
    let summary;
    if (model === "bounded") {
      summary =
        `bounded: ${fit.bounded}\n` +
        `trend exponent ${fit.exponent.toFixed(4)} (se ${fit.slope_se.toExponential(2)})\n` +
        `sup ${fit.sup.toExponential(4)} at t = ${fit.sup_t}, ` +
        `ratio ${fit.ratio.toFixed(4)} vs cap ${fit.ratio_cap}`;
    } else {
      summary =
        `${model} fit on [${fit.window[0]}, ${fit.window[1]}], ${fit.n_samples} samples\n` +
        `exponent ${fit.exponent.toFixed(4)} (se ${fit.slope_se.toExponential(2)}), ` +
        `prefactor ${fit.prefactor.toExponential(4)}, r^2 ${fit.r_squared.toFixed(4)}`;
    }
    out.textContent = `${name}${$("fit-sqrt").checked ? " (sqrt)" : ""}: ${summary}`;
    out.classList.remove("hidden");
  } catch (err) {
    out.textContent = String(err);
    out.classList.remove("hidden");
  }
}

async function main() {
  try {
    await init();
  } catch (err) {
    setStatus(
      "wasm bundle not found; build it with " +
        "`wasm-pack build crates/decaylab-web --target web --out-dir www/pkg` " +
        "and serve this directory.",
      "error",
    );
    throw err;
  }
  const entries = JSON.parse(list_scenarios());
  const select = $("scenario");
  for (const entry of entries) {
    const option = document.createElement("option");
    option.value = entry.id;
    option.textContent = `${entry.id} (${entry.kind}, ${entry.dim}d)`;
    option.title = entry.title;
    select.append(option);
  }
  $("run").addEventListener("click", runScenario);
  $("fit").addEventListener("click", fitColumn);
  $("fit-model").addEventListener("change", () => {
    $("bounded-inputs").classList.toggle(
      "hidden",
      $("fit-model").value !== "bounded",
    );
  });
  setStatus(`ready: ${entries.length} scenarios loaded`, "ok");
}

main();
