/** Page wiring: load the three result files, build the selection controls,
 * and render one grouped bar chart per chosen (vars, deg, n) cell. Everything
 * runs client-side from static files; nothing leaves the browser.
 */

import { renderGroupedBars, renderLegend } from "./chart.js";
import {
  LoadedTables,
  STAT_NAMES,
  Selection,
  StatName,
  loadTables,
  resolveSelection,
} from "./tables.js";

let tables: LoadedTables | null = null;

const el = <T extends HTMLElement>(id: string): T => {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
};

const readFile = (input: HTMLInputElement): Promise<string | null> =>
  new Promise((resolve, reject) => {
    const file = input.files?.[0];
    if (!file) return resolve(null);
    const reader = new FileReader();
    reader.onload = () => resolve(String(reader.result));
    reader.onerror = () => reject(reader.error);
    reader.readAsText(file);
  });

const status = (message: string, isError = false) => {
  const box = el<HTMLDivElement>("status");
  box.textContent = message;
  box.className = isError ? "status error" : "status";
};

const checkboxGroup = (containerId: string, entries: { value: string; label: string; checked: boolean }[]) => {
  const box = el<HTMLDivElement>(containerId);
  box.innerHTML = "";
  for (const entry of entries) {
    const lab = document.createElement("label");
    const cb = document.createElement("input");
    cb.type = "checkbox";
    cb.value = entry.value;
    cb.checked = entry.checked;
    lab.appendChild(cb);
    lab.appendChild(document.createTextNode(" " + entry.label));
    box.appendChild(lab);
  }
};

const checkedValues = (containerId: string): string[] =>
  Array.from(el<HTMLDivElement>(containerId).querySelectorAll("input:checked")).map(
    (node) => (node as HTMLInputElement).value
  );

async function onLoad() {
  try {
    const statsText = await readFile(el<HTMLInputElement>("stats-file"));
    const configText = await readFile(el<HTMLInputElement>("config-file"));
    const stdText = await readFile(el<HTMLInputElement>("std-file"));
    if (!statsText || !configText) {
      status("Choose at least stats.txt and config.txt.", true);
      return;
    }
    tables = loadTables(statsText, configText, stdText);
    const cfg = tables.config;
    checkboxGroup("vars-levels", cfg.varsLevels.map((v) => ({ value: String(v), label: String(v), checked: false })));
    checkboxGroup("deg-levels", cfg.degLevels.map((v) => ({ value: String(v), label: String(v), checked: false })));
    checkboxGroup("n-levels", cfg.nLevels.map((v) => ({ value: String(v), label: String(v), checked: false })));
    checkboxGroup(
      "alg-list",
      cfg.algorithms.map((a) => ({ value: String(a.id), label: `${a.id}. ${a.label}`, checked: false }))
    );
    checkboxGroup(
      "stat-list",
      STAT_NAMES.map((s) => ({ value: s, label: s, checked: s !== "E" && s !== "McAdj" && s !== "McArrow" }))
    );
    el<HTMLInputElement>("runs").value = String(cfg.runs);
    status(
      `Loaded ${tables.stats.rows.length} rows, ${cfg.algorithms.length} algorithms` +
        (tables.std ? ", with standard deviations (CIs on)." : "; no std.txt, CIs disabled.")
    );
  } catch (err) {
    tables = null;
    status(err instanceof Error ? err.message : String(err), true);
  }
}

function onPlot() {
  if (!tables) {
    status("Load the result files first.", true);
    return;
  }
  const selection: Selection = {
    vars: checkedValues("vars-levels").map(Number),
    deg: checkedValues("deg-levels").map(Number),
    n: checkedValues("n-levels").map(Number),
    algIds: checkedValues("alg-list").map(Number),
    stats: checkedValues("stat-list") as StatName[],
    runs: Number(el<HTMLInputElement>("runs").value) || tables.config.runs,
  };
  const plots = el<HTMLDivElement>("plots");
  if (
    selection.vars.length === 0 ||
    selection.deg.length === 0 ||
    selection.n.length === 0 ||
    selection.algIds.length === 0 ||
    selection.stats.length === 0
  ) {
    plots.innerHTML = "";
    status("Pick at least one value in every box, then plot.", true);
    return;
  }
  const { cells, missing } = resolveSelection(tables, selection);
  if (cells.length === 0) {
    plots.innerHTML = "";
    status(`No data for this combination (missing: ${missing.join("; ")}).`, true);
    return;
  }
  const logE = el<HTMLInputElement>("log-e").checked;
  const chunks = [renderLegend(tables.config.algorithms, selection.algIds)];
  for (const cell of cells) {
    chunks.push(renderGroupedBars(cell, tables.config.algorithms, selection, { logScaleE: logE }));
  }
  plots.innerHTML = chunks.join("\n");
  status(
    missing.length
      ? `Plotted ${cells.length} cell(s); skipped: ${missing.join("; ")}.`
      : `Plotted ${cells.length} cell(s).`
  );
}

export function init(): void {
  el<HTMLButtonElement>("load-btn").addEventListener("click", onLoad);
  el<HTMLButtonElement>("plot-btn").addEventListener("click", onPlot);
}

init();
